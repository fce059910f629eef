"""scikit-learn style wrappers around the simulator and the security analysis.

Samples are whole imaging runs: one row holds the flattened ``(shots, 4, 4)``
tally of a run, so ``X`` has shape ``(n_runs, shots * 16)``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .acquisition import RunConfig, TallySet, run_experiment
from .adversary import AttackSpec
from .optics import DetectorModel, SourceModel
from .patterns import mask_stack
from .reconstruction import spi_reconstruct
from .security import analyze


class HadamardSPI(TransformerMixin, BaseEstimator):
    """Correlation reconstruction for the two-shot Hadamard sequence.

    ``transform`` maps bucket traces of shape ``(n_samples, 2**(2n+1))`` to
    flattened images of shape ``(n_samples, 4**n)``.
    """

    def __init__(self, resolution_exponent=5):
        self.resolution_exponent = resolution_exponent

    def fit(self, X=None, y=None):
        self.masks_ = mask_stack(self.resolution_exponent)
        self.n_features_in_ = self.masks_.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "masks_")
        X = check_array(X, ensure_min_samples=1)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} shots per sample, got {X.shape[1]}")
        images = spi_reconstruct(self.masks_, X.T)
        return images.reshape(X.shape[0], -1)


def _as_tally_sets(X, n_shots, exponent):
    X = check_array(X, ensure_min_samples=1)
    if X.shape[1] != n_shots * 16:
        raise ValueError(f"expected {n_shots * 16} features per run, got {X.shape[1]}")
    if np.any(X < 0):
        raise ValueError("tally counts must be non-negative")
    # singles do not enter the security analysis
    return [TallySet(row.reshape(n_shots, 4, 4), np.zeros(n_shots), exponent) for row in X]


class QSSPIAnalyzer(TransformerMixin, BaseEstimator):
    """Security analysis as a stateless estimator.

    ``predict`` returns the verdict per run, ``transform`` the flattened
    trustworthy image, ``score_samples`` the ``(e_r, e_d, e_T)`` triple.
    """

    def __init__(self, resolution_exponent=5):
        self.resolution_exponent = resolution_exponent

    def fit(self, X, y=None):
        self.masks_ = mask_stack(self.resolution_exponent)
        self.n_shots_ = self.masks_.shape[0]
        X = check_array(X, ensure_min_samples=1)
        self.n_features_in_ = self.n_shots_ * 16
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features per run, got {X.shape[1]}")
        return self

    def _analyses(self, X):
        check_is_fitted(self, "masks_")
        return [analyze(t, self.masks_) for t in _as_tally_sets(X, self.n_shots_, self.resolution_exponent)]

    def predict(self, X):
        return np.array([a.report.verdict.value for a in self._analyses(X)])

    def transform(self, X):
        return np.stack([a.trustworthy.ravel() for a in self._analyses(X)])

    def score_samples(self, X):
        return np.array([[a.report.e_r, a.report.e_d, a.report.e_T] for a in self._analyses(X)])


class QSSPISimulator(BaseEstimator):
    """Parameter container producing tally matrices for ``QSSPIAnalyzer``.

    Exposing the physical knobs through ``get_params``/``set_params`` lets
    parameter sweeps use ``sklearn.model_selection.ParameterGrid``.
    """

    def __init__(
        self,
        resolution_exponent=5,
        mode="analytic",
        random_state=0,
        pair_rate=300.0,
        visibility=1.0,
        idler_singles_rate=8e4,
        signal_singles_rate=6e3,
        coincidence_window=650e-12,
        acquisition_time_per_shot=3.5,
        attack=None,
    ):
        self.resolution_exponent = resolution_exponent
        self.mode = mode
        self.random_state = random_state
        self.pair_rate = pair_rate
        self.visibility = visibility
        self.idler_singles_rate = idler_singles_rate
        self.signal_singles_rate = signal_singles_rate
        self.coincidence_window = coincidence_window
        self.acquisition_time_per_shot = acquisition_time_per_shot
        self.attack = attack

    def run_config(self) -> RunConfig:
        return RunConfig(
            resolution_exponent=self.resolution_exponent,
            mode=self.mode,
            rng_seed=self.random_state,
            source=SourceModel(
                self.pair_rate, self.visibility, self.idler_singles_rate, self.signal_singles_rate
            ),
            detector=DetectorModel(self.coincidence_window, self.acquisition_time_per_shot),
            attack=self.attack if self.attack is not None else AttackSpec(),
        )

    def sample(self, scene, n_runs=1):
        """Flattened tallies of ``n_runs`` repetitions, shape ``(n_runs, shots * 16)``."""
        config = self.run_config()
        return np.stack(
            [run_experiment(config, scene, r).counts.ravel() for r in range(n_runs)]
        )
