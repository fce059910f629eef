"""Line-oriented per-shot tally files.

Layout::

    # qsspi tallies resolution_exponent=5
    shot_index HH HV HD HA VH VV VD VA DH DV DD DA AH AV AD AA singles
    0 131.25 0.0 ...

Column ``XY`` holds coincidences with signal polarization X and idler
polarization Y. Counts are written with ``repr`` so floats round-trip exactly.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .acquisition import CELL_LABELS, TallySet

HEADER_COLUMNS = ("shot_index",) + CELL_LABELS + ("singles",)


def _fmt(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() and abs(value) < 2**53 else repr(value)


def format_tallies(tallies: TallySet) -> str:
    lines = [
        f"# qsspi tallies resolution_exponent={tallies.resolution_exponent}",
        " ".join(HEADER_COLUMNS),
    ]
    flat = tallies.counts.reshape(len(tallies), 16)
    for k in range(len(tallies)):
        fields = [str(k)] + [_fmt(v) for v in flat[k]] + [_fmt(tallies.singles[k])]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def write_tallies(path, tallies: TallySet) -> None:
    Path(path).write_text(format_tallies(tallies))


def parse_tallies(text: str) -> TallySet:
    exponent = None
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("resolution_exponent="):
                    exponent = int(token.split("=", 1)[1])
            continue
        if header is None:
            header = tuple(line.split())
            if header != HEADER_COLUMNS:
                raise ValueError(f"line {lineno}: unexpected tally header {line!r}")
            continue
        fields = line.split()
        if len(fields) != len(HEADER_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(HEADER_COLUMNS)} fields, got {len(fields)}")
        if int(fields[0]) != len(rows):
            raise ValueError(f"line {lineno}: shots out of order")
        rows.append([float(v) for v in fields[1:]])
    if not rows:
        raise ValueError("tally file has no data lines")
    data = np.array(rows)
    if exponent is None:
        exponent = int(round((math.log2(len(rows)) - 1) / 2))
    return TallySet(data[:, :16].reshape(-1, 4, 4), data[:, 16], exponent)


def read_tallies(path) -> TallySet:
    return parse_tallies(Path(path).read_text())
