"""Target reflectivity / channel efficiency grids and built-in glyph targets."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .pgm import read_pgm

GLYPH_NAMES = ("A", "D", "F", "mirrored-L", "blank", "full")
_GLYPH_BASE = 16


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def _as_unit_grid(values, name: str) -> np.ndarray:
    grid = np.array(values, dtype=float)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError(f"{name} must be a square 2-D grid, got shape {grid.shape}")
    if not np.all(np.isfinite(grid)) or grid.min() < 0.0 or grid.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    grid.setflags(write=False)
    return grid


@dataclass(frozen=True, eq=False)
class SceneProfile:
    """Per-pixel target reflectivity ``chi`` and channel efficiency ``eta``.

    ``eta`` defaults to all ones.
    """

    chi: np.ndarray
    eta: np.ndarray = field(default=None)

    def __post_init__(self):
        chi = _as_unit_grid(self.chi, "chi")
        eta = np.ones_like(chi) if self.eta is None else _as_unit_grid(self.eta, "eta")
        if eta.shape != chi.shape:
            raise ValueError(f"chi {chi.shape} and eta {eta.shape} differ in shape")
        eta.setflags(write=False)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "eta", eta)

    @property
    def side(self) -> int:
        return self.chi.shape[0]

    @property
    def n_pixels(self) -> int:
        return self.chi.size


def _glyph_bitmap(name: str) -> np.ndarray:
    text = resources.files("qsspi.glyphs").joinpath(f"{name}.txt").read_text()
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=float)


def builtin_glyph(name: str, side: int = 32) -> SceneProfile:
    """Binary glyph target on a ``side x side`` grid.

    Glyph bitmaps are 16x16 fixtures; larger sides are block-upsampled,
    smaller ones max-pooled.
    """
    if name not in GLYPH_NAMES:
        raise ValueError(f"unknown glyph {name!r}; expected one of {GLYPH_NAMES}")
    side = int(side)
    if not _is_power_of_two(side):
        raise ValueError(f"side must be a power of two, got {side}")
    if name == "blank":
        return SceneProfile(np.zeros((side, side)))
    if name == "full":
        return SceneProfile(np.ones((side, side)))
    base = _glyph_bitmap(name)
    if side >= _GLYPH_BASE:
        k = side // _GLYPH_BASE
        chi = np.kron(base, np.ones((k, k)))
    else:
        k = _GLYPH_BASE // side
        chi = base.reshape(side, k, side, k).max(axis=(1, 3))
    return SceneProfile(chi)


def load_scene_pgm(path, eta_path=None) -> SceneProfile:
    """Read a target from a P5 greymap, rescaling 0..255 to [0, 1]."""
    chi = read_pgm(path) / 255.0
    eta = None if eta_path is None else read_pgm(eta_path) / 255.0
    if not _is_power_of_two(chi.shape[0]):
        raise ValueError(f"{path}: side {chi.shape[0]} is not a power of two")
    return SceneProfile(chi, eta)


def effective_map(profile: SceneProfile) -> np.ndarray:
    return profile.eta * profile.chi


def scene_sum(profile: SceneProfile) -> float:
    """Sum of eta * chi over all pixels (S in the threshold formulas)."""
    return float(np.sum(effective_map(profile)))
