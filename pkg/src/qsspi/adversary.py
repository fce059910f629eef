"""Eve's contribution to the coincidence statistics for each attack variant."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .optics import (
    BASIS_STATES,
    POLARIZATIONS,
    Basis,
    DetectorModel,
    Polarization,
    SourceModel,
    accidental_rate,
    overlap,
)
from .scene import SceneProfile


class AttackVariant(str, Enum):
    NONE = "none"
    FULL_INTERCEPT_RESEND = "full_intercept_resend"
    PARTIAL_INTERCEPT_RESEND = "partial_intercept_resend"
    RANDOM_POLARIZATION = "random_polarization"
    EMULATED_FIXED_POLARIZATION = "emulated_fixed_polarization"
    JAMMING = "jamming"


DECEIVING_VARIANTS = frozenset(
    {
        AttackVariant.FULL_INTERCEPT_RESEND,
        AttackVariant.PARTIAL_INTERCEPT_RESEND,
        AttackVariant.RANDOM_POLARIZATION,
        AttackVariant.EMULATED_FIXED_POLARIZATION,
    }
)


@dataclass(frozen=True)
class AttackSpec:
    """Adversary description.

    intensity_ratio is the photon rate of Eve's false signal relative to
    Alice's no-target signal singles rate; Eve's coincidence rate follows
    from the accidental-coincidence formula. Alice's own light reaches the
    receiver unless ``alice_blocked`` is set, which the full deceiving
    attack always does.
    """

    variant: AttackVariant = AttackVariant.NONE
    theta: float = 0.0
    fraud_scene: SceneProfile | None = None
    intensity_ratio: float = 0.0
    jam_power_ratio: float = 0.0
    fixed_polarization: Polarization = Polarization.H
    alice_blocked: bool = False

    def __post_init__(self):
        variant = AttackVariant(self.variant)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "fixed_polarization", Polarization(self.fixed_polarization))
        if variant is AttackVariant.FULL_INTERCEPT_RESEND:
            object.__setattr__(self, "alice_blocked", True)
        if self.intensity_ratio < 0:
            raise ValueError("intensity_ratio must be non-negative")
        if self.jam_power_ratio < 0:
            raise ValueError("jam_power_ratio must be non-negative")
        if variant in DECEIVING_VARIANTS and self.fraud_scene is None:
            raise ValueError(f"attack variant {variant.value!r} requires a fraud_scene")

    @property
    def deceiving(self) -> bool:
        return self.variant in DECEIVING_VARIANTS


@dataclass(frozen=True)
class EveContribution:
    """Eve's coincidence rates keyed by idler polarization (order H, V, D, A).

    ``correct[i]`` lands in the heralded signal polarization, ``error[i]``
    in the orthogonal one.
    """

    correct: np.ndarray = field(default_factory=lambda: np.zeros(4))
    error: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @property
    def total(self) -> float:
        return float(self.correct.sum() + self.error.sum())

    @property
    def error_fraction(self) -> float:
        total = self.total
        return float(self.error.sum()) / total if total > 0 else float("nan")

    def table(self) -> np.ndarray:
        """4x4 rates indexed ``[signal, idler]``."""
        out = np.zeros((4, 4))
        for idler in POLARIZATIONS:
            j = idler.index
            out[j, j] += self.correct[j]
            out[idler.orthogonal.index, j] += self.error[j]
        return out


def _check_rate(n_e: float) -> float:
    n_e = float(n_e)
    if n_e < 0:
        raise ValueError(f"n_E must be non-negative, got {n_e}")
    return n_e


def eve_rates_intercept_resend(n_e: float) -> EveContribution:
    # idler X_i is heralded with prob 1/4; Eve's basis matches w.p. 1/2
    # (always correct) or not (correct or erroneous with 1/2 each)
    n_e = _check_rate(n_e)
    return EveContribution(np.full(4, 3 * n_e / 16), np.full(4, n_e / 16))


def eve_rates_random_polarization(n_e: float) -> EveContribution:
    n_e = _check_rate(n_e)
    return EveContribution(np.full(4, n_e / 8), np.full(4, n_e / 8))


class Selection(str, Enum):
    KEEP = "keep"
    DISCARD = "discard"
    # kept; half of these coincidences fall in the orthogonal signal cell
    ERROR_COINCIDENCE = "error-coincidence"


def emulated_selection(
    alice_basis: Basis, eve_fixed_polarization: Polarization, idler_outcome: Polarization
) -> Selection:
    """Post-selection rule for the fixed-polarization laser emulation."""
    alice_basis = Basis(alice_basis)
    eve = Polarization(eve_fixed_polarization)
    idler = Polarization(idler_outcome)
    if idler.basis is not alice_basis:
        raise ValueError(f"idler outcome {idler.value} is not in the {alice_basis.value} basis")
    if eve.basis is alice_basis:
        return Selection.KEEP if idler is eve else Selection.DISCARD
    return Selection.ERROR_COINCIDENCE


def eve_rates_emulated(n_e: float, fixed_polarization: Polarization) -> EveContribution:
    """Selected accidental coincidences from a fixed-polarization laser.

    The laser is uncorrelated with the idler, so each basis (1/2) and idler
    outcome (1/2) is equally likely; the signal outcome follows Malus' law.
    Discarded combinations are dropped, so the kept total is below n_E.
    """
    n_e = _check_rate(n_e)
    correct = np.zeros(4)
    error = np.zeros(4)
    for basis, states in BASIS_STATES.items():
        for idler in states:
            if emulated_selection(basis, fixed_polarization, idler) is Selection.DISCARD:
                continue
            weight = n_e * 0.5 * 0.5
            correct[idler.index] += weight * overlap(fixed_polarization, idler)
            error[idler.index] += weight * overlap(fixed_polarization, idler.orthogonal)
    return EveContribution(correct, error)


def eve_contribution(attack: AttackSpec, n_e: float) -> EveContribution:
    """Per-idler split of Eve's coincidences for ``attack`` at rate ``n_e``."""
    v = attack.variant
    if v in (AttackVariant.FULL_INTERCEPT_RESEND, AttackVariant.PARTIAL_INTERCEPT_RESEND):
        return eve_rates_intercept_resend(n_e)
    if v is AttackVariant.RANDOM_POLARIZATION:
        return eve_rates_random_polarization(n_e)
    if v is AttackVariant.EMULATED_FIXED_POLARIZATION:
        return eve_rates_emulated(n_e, attack.fixed_polarization)
    return EveContribution()


def eve_pair_rate(attack: AttackSpec, source: SourceModel, detector: DetectorModel) -> float:
    """Eve's no-target coincidence rate n_E.

    Her light runs at ``intensity_ratio`` times Alice's signal singles rate
    and pairs with idler singles by accident within the window.
    """
    if not attack.deceiving:
        return 0.0
    photon_rate = attack.intensity_ratio * source.signal_singles_rate
    return accidental_rate(source.idler_singles_rate, photon_rate, detector.coincidence_window)


def eve_shot_intensity(attack: AttackSpec, mask, n_e: float) -> float:
    """Eve's coincidence rate during one shot: mean of mask * eta_E * chi_E times n_E."""
    if not attack.deceiving:
        return 0.0
    cells = getattr(mask, "cells", mask)
    fraud = attack.fraud_scene
    cells = np.asarray(cells)
    if cells.shape != fraud.chi.shape:
        raise ValueError(f"mask shape {cells.shape} does not match fraud scene {fraud.chi.shape}")
    return float(np.sum(cells * fraud.eta * fraud.chi)) / cells.size * n_e


def jamming_rates(
    attack: AttackSpec, source: SourceModel, detector: DetectorModel
) -> tuple[float, float]:
    """(signal singles inflation, accidental coincidence rate) for a jamming attack."""
    if attack.variant is not AttackVariant.JAMMING:
        raise ValueError(f"jamming_rates needs a jamming attack, got {attack.variant.value!r}")
    inflation = attack.jam_power_ratio * source.signal_singles_rate
    return inflation, accidental_rate(source.idler_singles_rate, inflation, detector.coincidence_window)


def uncorrelated_table() -> np.ndarray:
    """4x4 split of unpolarized accidentals: each same-basis cell gets 1/8."""
    table = np.zeros((4, 4))
    for states in BASIS_STATES.values():
        for x in states:
            for y in states:
                table[x.index, y.index] = 1.0 / 8.0
    return table
