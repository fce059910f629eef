"""Polarization error rates, attack thresholds and the three-step verdict."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .optics import BASIS_STATES, POLARIZATIONS, Basis, Polarization
from .reconstruction import split_reconstructions, trustworthy_image

FULL_ATTACK_THRESHOLD = 0.25
# relative slack for ties: analytic runs land exactly on a threshold
TIE_RTOL = 1e-9


class Verdict(str, Enum):
    SECURE = "secure"
    PARTIAL_ATTACK = "partial_attack"
    FULL_ATTACK = "full_attack"
    INDETERMINATE = "indeterminate"


def _aggregate(tallies) -> np.ndarray:
    if hasattr(tallies, "aggregate"):
        return tallies.aggregate()
    counts = np.asarray(tallies, dtype=float)
    if counts.ndim == 3:
        counts = counts.sum(axis=0)
    if counts.shape != (4, 4):
        raise ValueError(f"expected 4x4 aggregated counts, got shape {counts.shape}")
    return counts


def error_rate_per_idler(tallies, idler_pol: Polarization) -> float:
    """C(X_j, X_i) / (C(X_i, X_i) + C(X_j, X_i)) for idler X_i; NaN when no counts."""
    c = _aggregate(tallies)
    idler = Polarization(idler_pol)
    i, j = idler.index, idler.orthogonal.index
    denom = c[i, i] + c[j, i]
    return float(c[j, i] / denom) if denom > 0 else math.nan


def basis_error_rates(tallies) -> tuple[float, float]:
    """(e_r, e_d): erroneous over all coincidences per basis, both idler outcomes pooled."""
    c = _aggregate(tallies)
    rates = []
    for basis in (Basis.RECTILINEAR, Basis.DIAGONAL):
        idx = [p.index for p in BASIS_STATES[basis]]
        block = c[np.ix_(idx, idx)]
        total = block.sum()
        wrong = block[0, 1] + block[1, 0]
        rates.append(float(wrong / total) if total > 0 else math.nan)
    return rates[0], rates[1]


def partial_threshold(g_mask: np.ndarray, g_all: np.ndarray, clip: bool = True) -> float:
    """e_T = sum(G_mask) / sum(G_all).

    With ``clip`` (the default) negative pixels are zeroed before summing.
    Under shot noise this biases e_T upward, since the noise-dominated
    G_mask keeps only its positive half.
    """
    if clip:
        g_mask = np.clip(g_mask, 0.0, None)
        g_all = np.clip(g_all, 0.0, None)
    mask_sum = float(np.sum(g_mask))
    all_sum = float(np.sum(g_all))
    if all_sum <= 0:
        raise ValueError("G_all sums to zero; threshold undefined")
    return mask_sum / all_sum


def theoretical_partial_error(
    s_a: float, n_a: float, s_e: float, n_e: float, attack: str = "intercept_resend"
) -> float:
    """Expected error rate from scene sums and rates.

    ``attack="intercept_resend"`` gives the partial-attack threshold
    (1/4) S_E n_E / (S_A n_A + S_E n_E); ``"random_polarization"`` doubles
    the prefactor.
    """
    prefactor = {"intercept_resend": 0.25, "random_polarization": 0.5}[attack]
    denom = s_a * n_a + s_e * n_e
    if denom <= 0:
        raise ValueError("S_A n_A + S_E n_E must be positive")
    return prefactor * s_e * n_e / denom


def _at_least(value: float, threshold: float) -> bool:
    return value >= threshold or math.isclose(value, threshold, rel_tol=TIE_RTOL)


def verdict(e_r: float, e_d: float, e_t: float) -> Verdict:
    """Three-step decision on the larger of the two basis error rates.

    1. >= 25 %: full deceiving attack, discard every image.
    2. >= e_T: partial attack, only the trustworthy image is credible.
    3. otherwise secure.

    A run without a single erroneous coincidence is secure even when
    e_T is 0.
    """
    if math.isnan(e_r) or math.isnan(e_d):
        return Verdict.INDETERMINATE
    e = max(e_r, e_d)
    if _at_least(e, FULL_ATTACK_THRESHOLD):
        return Verdict.FULL_ATTACK
    if e == 0.0:
        return Verdict.SECURE
    if math.isnan(e_t):
        return Verdict.INDETERMINATE
    if _at_least(e, e_t):
        return Verdict.PARTIAL_ATTACK
    return Verdict.SECURE


@dataclass(frozen=True)
class SecurityReport:
    e_r: float
    e_d: float
    e_T: float
    verdict: Verdict
    e_idler: dict[str, float]

    def as_dict(self) -> dict:
        out = {"e_r": self.e_r, "e_d": self.e_d, "e_T": self.e_T, "verdict": self.verdict.value}
        out.update({f"e_{k}": v for k, v in self.e_idler.items()})
        return out


@dataclass(frozen=True, eq=False)
class Analysis:
    """Everything derived from one tally set."""

    report: SecurityReport
    g_all: np.ndarray
    g_cor: np.ndarray
    g_mask: np.ndarray
    trustworthy: np.ndarray


def analyze(tallies, masks=None, clip_threshold: bool = True) -> Analysis:
    """Images, error rates, threshold and verdict for one run."""
    g_all, g_cor, g_mask = split_reconstructions(tallies, masks)
    e_r, e_d = basis_error_rates(tallies)
    try:
        e_t = partial_threshold(g_mask, g_all, clip=clip_threshold)
    except ValueError:
        e_t = math.nan
    report = SecurityReport(
        e_r=e_r,
        e_d=e_d,
        e_T=e_t,
        verdict=verdict(e_r, e_d, e_t),
        e_idler={p.value: error_rate_per_idler(tallies, p) for p in POLARIZATIONS},
    )
    return Analysis(report, g_all, g_cor, g_mask, trustworthy_image(g_cor, g_mask))
