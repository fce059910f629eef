"""Imaging run driver: per-shot expected or Poisson-sampled coincidence tallies."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .adversary import (
    AttackSpec,
    AttackVariant,
    eve_contribution,
    eve_pair_rate,
    jamming_rates,
    uncorrelated_table,
)
from .optics import BASIS_STATES, DetectorModel, SourceModel, pair_probabilities
from .patterns import PatternMask, mask_stack, pattern_sequence
from .scene import SceneProfile, effective_map

# tally cell order: signal polarization (row) x idler polarization (column)
CELL_LABELS = tuple(f"{x}{y}" for x in "HVDA" for y in "HVDA")


class Mode(str, Enum):
    ANALYTIC = "analytic"
    STOCHASTIC = "stochastic"


@dataclass(frozen=True)
class RunConfig:
    resolution_exponent: int = 5
    mode: Mode = Mode.ANALYTIC
    rng_seed: int = 0
    source: SourceModel = field(default_factory=SourceModel)
    detector: DetectorModel = field(default_factory=DetectorModel)
    attack: AttackSpec = field(default_factory=AttackSpec)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if int(self.resolution_exponent) < 1:
            raise ValueError("resolution_exponent must be >= 1")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    @property
    def side(self) -> int:
        return 2**self.resolution_exponent


@dataclass(frozen=True)
class CoincidenceTally:
    """Counts for one shot. ``counts[x, y]``: signal x, idler y in H, V, D, A order."""

    shot_index: int
    counts: np.ndarray
    signal_singles: float

    @property
    def total(self) -> float:
        return float(self.counts.sum())


@dataclass(frozen=True, eq=False)
class TallySet(Sequence):
    """Tallies for a whole mask sequence, stored as ``(shots, 4, 4)`` and ``(shots,)`` arrays."""

    counts: np.ndarray
    singles: np.ndarray
    resolution_exponent: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        singles = np.asarray(self.singles, dtype=float)
        if counts.ndim != 3 or counts.shape[1:] != (4, 4):
            raise ValueError(f"counts must have shape (shots, 4, 4), got {counts.shape}")
        if singles.shape != counts.shape[:1]:
            raise ValueError("singles must have one entry per shot")
        if counts.shape[0] != 2 ** (2 * self.resolution_exponent + 1):
            raise ValueError(
                f"{counts.shape[0]} shots do not match resolution exponent {self.resolution_exponent}"
            )
        if np.any(counts < 0) or np.any(singles < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "singles", singles)

    def __len__(self):
        return self.counts.shape[0]

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        k = range(len(self))[k]
        return CoincidenceTally(k, self.counts[k], float(self.singles[k]))

    def aggregate(self) -> np.ndarray:
        """4x4 counts summed over every shot."""
        return self.counts.sum(axis=0)

    def masks(self) -> np.ndarray:
        return mask_stack(self.resolution_exponent)


def _alice_table(source: SourceModel) -> np.ndarray:
    # each basis chosen with probability 1/2 for both arms together
    table = np.zeros((4, 4))
    probs = pair_probabilities(source)
    for states in BASIS_STATES.values():
        for a, x in enumerate(states):
            for b, y in enumerate(states):
                table[x.index, y.index] = 0.5 * probs[a, b]
    return table


def _mask_weights(masks: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Per-shot mean of mask * grid, i.e. (1/M) sum_ij P(i,j) grid(i,j)."""
    flat = masks.reshape(masks.shape[0], -1).astype(float)
    return flat @ grid.ravel() / flat.shape[1]


def _expected(config: RunConfig, scene: SceneProfile, masks: np.ndarray):
    """Expected (counts, singles) per shot for the stacked ``masks``."""
    if scene.side != masks.shape[-1]:
        raise ValueError(f"scene side {scene.side} does not match mask side {masks.shape[-1]}")
    src, det, attack = config.source, config.detector, config.attack
    t = det.acquisition_time_per_shot
    n_shots = masks.shape[0]
    counts = np.zeros((n_shots, 4, 4))
    singles = np.zeros(n_shots)

    if not attack.alice_blocked:
        weight = _mask_weights(masks, effective_map(scene))
        counts += (weight * src.pair_rate * t)[:, None, None] * _alice_table(src)
        singles += weight * src.signal_singles_rate * t

    if attack.deceiving:
        fraud = attack.fraud_scene
        if fraud.side != scene.side:
            raise ValueError("fraud scene and target scene differ in size")
        weight = _mask_weights(masks, effective_map(fraud))
        n_e = eve_pair_rate(attack, src, det)
        # EveContribution table is linear in n_E; evaluate per unit rate
        unit = eve_contribution(attack, 1.0).table()
        counts += (weight * n_e * t)[:, None, None] * unit
        singles += weight * attack.intensity_ratio * src.signal_singles_rate * t
    elif attack.variant is AttackVariant.JAMMING:
        inflation, acc = jamming_rates(attack, src, det)
        counts += acc * t * uncorrelated_table()
        singles += inflation * t
    elif attack.variant is not AttackVariant.NONE:
        raise ValueError(f"unknown attack variant {attack.variant!r}")
    return counts, singles


def expected_shot_tally(config: RunConfig, scene: SceneProfile, mask: PatternMask) -> CoincidenceTally:
    cells = np.asarray(getattr(mask, "cells", mask))
    counts, singles = _expected(config, scene, cells[None])
    return CoincidenceTally(getattr(mask, "shot_index", 0), counts[0], float(singles[0]))


def shot_rng(seed: int, repetition: int, shot_index: int) -> np.random.Generator:
    """Independent generator for one shot of one repetition."""
    return np.random.default_rng([int(seed), int(repetition), int(shot_index)])


def run_experiment(config: RunConfig, scene: SceneProfile, repetition: int = 0) -> TallySet:
    """Tallies for every mask of ``pattern_sequence(n)``.

    Analytic mode books expectations; stochastic mode draws each cell and
    the singles count from a Poisson law with that mean, using a generator
    keyed on (seed, repetition, shot).
    """
    masks = mask_stack(config.resolution_exponent)
    counts, singles = _expected(config, scene, masks)
    if config.mode is Mode.STOCHASTIC:
        for k in range(masks.shape[0]):
            rng = shot_rng(config.rng_seed, repetition, k)
            counts[k] = rng.poisson(counts[k])
            singles[k] = rng.poisson(singles[k])
    return TallySet(counts, singles, config.resolution_exponent)


def classical_singles_trace(config: RunConfig, scene: SceneProfile, repetition: int = 0) -> np.ndarray:
    """Per-shot signal singles counts, as a classical bucket detector sees them."""
    return run_experiment(config, scene, repetition).singles


def masks_for(config: RunConfig) -> list[PatternMask]:
    return pattern_sequence(config.resolution_exponent)
