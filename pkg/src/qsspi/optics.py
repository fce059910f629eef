"""Polarization statistics of the entangled source, Malus-law projections and
accidental coincidences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Basis(str, Enum):
    RECTILINEAR = "rectilinear"
    DIAGONAL = "diagonal"


class Polarization(str, Enum):
    H = "H"
    V = "V"
    D = "D"
    A = "A"

    @property
    def basis(self) -> Basis:
        return Basis.RECTILINEAR if self in (Polarization.H, Polarization.V) else Basis.DIAGONAL

    @property
    def angle(self) -> float:
        """Polarization axis angle in radians, measured from H."""
        return _ANGLES[self]

    @property
    def index(self) -> int:
        """Row/column position in a 4x4 tally (order H, V, D, A)."""
        return POLARIZATIONS.index(self)

    @property
    def orthogonal(self) -> "Polarization":
        return _ORTHOGONAL[self]


POLARIZATIONS = (Polarization.H, Polarization.V, Polarization.D, Polarization.A)
BASIS_STATES = {
    Basis.RECTILINEAR: (Polarization.H, Polarization.V),
    Basis.DIAGONAL: (Polarization.D, Polarization.A),
}
_ANGLES = {
    Polarization.H: 0.0,
    Polarization.V: math.pi / 2,
    Polarization.D: math.pi / 4,
    Polarization.A: -math.pi / 4,
}
_ORTHOGONAL = {
    Polarization.H: Polarization.V,
    Polarization.V: Polarization.H,
    Polarization.D: Polarization.A,
    Polarization.A: Polarization.D,
}


@dataclass(frozen=True)
class SourceModel:
    """Entangled pair source.

    pair_rate is the total signal/idler coincidence rate (cps) with every
    mirror on and no target in the path. visibility = 1 is the ideal Bell
    state; lower values mix in white noise.
    """

    pair_rate: float = 300.0
    visibility: float = 1.0
    idler_singles_rate: float = 8e4
    signal_singles_rate: float = 6e3

    def __post_init__(self):
        for name in ("pair_rate", "idler_singles_rate", "signal_singles_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite non-negative rate, got {value}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")


@dataclass(frozen=True)
class DetectorModel:
    coincidence_window: float = 650e-12
    acquisition_time_per_shot: float = 3.5

    def __post_init__(self):
        if not self.coincidence_window > 0:
            raise ValueError("coincidence_window must be positive")
        if not self.acquisition_time_per_shot > 0:
            raise ValueError("acquisition_time_per_shot must be positive")


def visibility_from_fidelity(fidelity: float, convention: str = "werner") -> float:
    """Map a Bell-state fidelity to a mixing visibility.

    ``"werner"``: F = (1 + 3v) / 4 for v|Phi+><Phi+| + (1 - v) I/4.
    ``"linear"``: v = 2F - 1, i.e. the per-basis error equals 1 - F.
    """
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity}")
    if convention == "werner":
        v = (4.0 * fidelity - 1.0) / 3.0
    elif convention == "linear":
        v = 2.0 * fidelity - 1.0
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return min(max(v, 0.0), 1.0)


def pair_probabilities(source, basis: Basis = Basis.RECTILINEAR) -> np.ndarray:
    """2x2 table P(signal=X_i, idler=X_j) within one basis.

    ``source`` is a SourceModel or a bare visibility. The Werner-mixed
    Phi+ state is correlated identically in both bases, so ``basis`` only
    labels the outcomes.
    """
    v = source.visibility if isinstance(source, SourceModel) else float(source)
    Basis(basis)
    same = (1.0 + v) / 4.0
    cross = (1.0 - v) / 4.0
    return np.array([[same, cross], [cross, same]])


def projection_probability(incoming: Polarization, analyzer_angle: float) -> float:
    """Malus-law probability that ``incoming`` passes an analyzer at ``analyzer_angle``."""
    return math.cos(Polarization(incoming).angle - analyzer_angle) ** 2


def overlap(a: Polarization, b: Polarization) -> float:
    """Exact |<a|b>|^2 for two of H, V, D, A: 1, 0, or 1/2 across bases."""
    a, b = Polarization(a), Polarization(b)
    if a.basis is not b.basis:
        return 0.5
    return 1.0 if a is b else 0.0


def accidental_rate(idler_singles: float, signal_singles: float, window: float) -> float:
    """Uncorrelated coincidence rate N_I * N_E * tau."""
    if idler_singles < 0 or signal_singles < 0 or window < 0:
        raise ValueError("rates and window must be non-negative")
    return idler_singles * signal_singles * window


def intercept_resend_error_rate(theta: float) -> float:
    """Error rate seen on one idler polarization under intercept-resend.

    Eve's basis is rotated by ``theta`` from Alice's and chosen at random
    between her two bases. The result is 1/4 for every ``theta``.
    """
    same_basis = (1.0 - math.cos(2 * theta) ** 2) / 2.0
    other_basis = (1.0 - math.sin(2 * theta) ** 2) / 2.0
    return (same_basis + other_basis) / 2.0
