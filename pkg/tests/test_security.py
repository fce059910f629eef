import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import partial_config
from qsspi.acquisition import RunConfig, run_experiment
from qsspi.adversary import AttackSpec, eve_pair_rate
from qsspi.optics import Polarization, SourceModel
from qsspi.scene import builtin_glyph, scene_sum
from qsspi.security import (
    Verdict,
    analyze,
    basis_error_rates,
    error_rate_per_idler,
    partial_threshold,
    theoretical_partial_error,
    verdict,
)

rate = st.floats(0, 1e4)
scene_total = st.floats(0, 1024)


@pytest.mark.parametrize(
    "e_r, e_d, e_t, expected",
    [
        (0.26, 0.24, 0.1, Verdict.FULL_ATTACK),
        (0.01, 0.01, 0.045, Verdict.SECURE),
        (0.10, 0.02, 0.08, Verdict.PARTIAL_ATTACK),
        (0.25, 0.0, 0.3, Verdict.FULL_ATTACK),
        (0.0, 0.0, 0.0, Verdict.SECURE),
        (0.08, 0.0, 0.08, Verdict.PARTIAL_ATTACK),
        (math.nan, 0.1, 0.1, Verdict.INDETERMINATE),
        (0.1, 0.1, math.nan, Verdict.INDETERMINATE),
    ],
)
def test_verdict_examples(e_r, e_d, e_t, expected):
    assert verdict(e_r, e_d, e_t) is expected


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 0.25))
def test_verdict_symmetric_and_consistent(e_r, e_d, e_t):
    v = verdict(e_r, e_d, e_t)
    assert v is verdict(e_d, e_r, e_t)
    e = max(e_r, e_d)
    if e > 0.25:
        assert v is Verdict.FULL_ATTACK
    elif e < 0.25 * (1 - 1e-8) and e < e_t * (1 - 1e-8):
        assert v is Verdict.SECURE


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 0.25))
def test_verdict_monotone_in_error(e, bump, e_t):
    order = {Verdict.SECURE: 0, Verdict.PARTIAL_ATTACK: 1, Verdict.FULL_ATTACK: 2}
    assert order[verdict(e, e, e_t)] <= order[verdict(e + bump, e, e_t)]


@given(scene_total, rate, scene_total, rate)
def test_theoretical_threshold_bounded(s_a, n_a, s_e, n_e):
    if s_a * n_a + s_e * n_e <= 0:
        with pytest.raises(ValueError):
            theoretical_partial_error(s_a, n_a, s_e, n_e)
        return
    e_t = theoretical_partial_error(s_a, n_a, s_e, n_e)
    assert 0 <= e_t <= 0.25
    assert theoretical_partial_error(s_a, n_a, s_e, n_e, "random_polarization") == pytest.approx(2 * e_t)


def test_theoretical_threshold_monotone_in_eve():
    values = [theoretical_partial_error(100, 300, 100, n) for n in (0, 100, 300, 1000, 1e6)]
    assert values[0] == 0
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(0.25, abs=1e-4)


@pytest.mark.parametrize("fraud,true", [("mirrored-L", "F"), ("D", "A")])
@pytest.mark.parametrize("ratio", [500, 1000, 2000])
def test_image_threshold_matches_formula(fraud, true, ratio):
    cfg, scene = partial_config(true, fraud, ratio)
    a = analyze(run_experiment(cfg, scene))
    n_e = eve_pair_rate(cfg.attack, cfg.source, cfg.detector)
    expected = theoretical_partial_error(scene_sum(scene), 300, scene_sum(cfg.attack.fraud_scene), n_e)
    assert a.report.e_T == pytest.approx(expected, rel=1e-6)
    # the measured error rate sits exactly on the threshold without noise
    assert max(a.report.e_r, a.report.e_d) == pytest.approx(expected, rel=1e-9)
    assert a.report.verdict is Verdict.PARTIAL_ATTACK
    assert 0 <= a.report.e_T <= 0.25


def test_threshold_grows_with_ratio():
    values = [analyze(run_experiment(*partial_config(ratio=r))).report.e_T for r in (500, 1000, 2000)]
    assert values[0] < values[1] < values[2]


def test_partial_threshold_direct():
    g_all = np.ones((2, 2))
    assert partial_threshold(np.zeros((2, 2)), g_all) == 0
    assert partial_threshold(np.full((2, 2), 0.25), g_all) == 0.25
    assert partial_threshold(np.array([[1.0, -1.0], [0, 0]]), g_all) == 0.25
    assert partial_threshold(np.array([[1.0, -1.0], [0, 0]]), g_all, clip=False) == 0
    with pytest.raises(ValueError):
        partial_threshold(np.zeros((2, 2)), np.zeros((2, 2)))


def test_hand_built_tally():
    counts = np.zeros((4, 4))
    counts[0, 0], counts[1, 0] = 90, 10  # idler H
    counts[1, 1], counts[0, 1] = 80, 20  # idler V
    counts[2, 2], counts[3, 2] = 50, 0  # idler D
    counts[3, 3], counts[2, 3] = 45, 5  # idler A
    assert error_rate_per_idler(counts, Polarization.H) == pytest.approx(0.1)
    assert error_rate_per_idler(counts, "V") == pytest.approx(0.2)
    assert error_rate_per_idler(counts, Polarization.D) == 0
    assert error_rate_per_idler(counts, Polarization.A) == pytest.approx(0.1)
    e_r, e_d = basis_error_rates(counts)
    assert e_r == pytest.approx(30 / 200)
    assert e_d == pytest.approx(5 / 100)
    # a per-shot stack aggregates to the same thing
    stack = np.stack([counts / 2, counts / 2])
    assert basis_error_rates(stack) == pytest.approx((e_r, e_d))


def test_undefined_rates_are_nan():
    counts = np.zeros((4, 4))
    counts[0, 0] = 5
    assert math.isnan(error_rate_per_idler(counts, Polarization.V))
    e_r, e_d = basis_error_rates(counts)
    assert e_r == 0 and math.isnan(e_d)
    assert verdict(e_r, e_d, 0.0) is Verdict.INDETERMINATE


def test_blank_scene_is_indeterminate():
    a = analyze(run_experiment(RunConfig(3), builtin_glyph("blank", 8)))
    assert a.report.verdict is Verdict.INDETERMINATE
    assert math.isnan(a.report.e_T)


def test_full_attack_detected():
    cfg, scene = partial_config("A", "D", variant="full_intercept_resend", n=4)
    report = analyze(run_experiment(cfg, scene)).report
    assert report.e_r == pytest.approx(0.25) and report.e_d == pytest.approx(0.25)
    assert all(v == pytest.approx(0.25) for v in report.e_idler.values())
    assert report.verdict is Verdict.FULL_ATTACK


def test_no_attack_secure():
    report = analyze(run_experiment(RunConfig(4), builtin_glyph("A", 16))).report
    assert report.e_r == report.e_d == report.e_T == 0
    assert report.verdict is Verdict.SECURE


def test_emulated_fixed_h_hides_rectilinear_errors():
    fraud = builtin_glyph("D", 16)
    attack = AttackSpec("emulated_fixed_polarization", fraud_scene=fraud, intensity_ratio=1000, fixed_polarization="H")
    report = analyze(run_experiment(RunConfig(4, attack=attack), builtin_glyph("A", 16))).report
    assert report.e_r == pytest.approx(0, abs=1e-12)
    assert report.e_d > 0.1
    assert report.verdict is not Verdict.SECURE


def test_imperfect_visibility_raises_error_floor():
    scene = builtin_glyph("A", 16)
    report = analyze(run_experiment(RunConfig(4, source=SourceModel(visibility=0.9)), scene)).report
    assert report.e_r == pytest.approx(0.05) and report.e_d == pytest.approx(0.05)


def test_report_dict_keys():
    report = analyze(run_experiment(RunConfig(2), builtin_glyph("full", 4))).report
    d = report.as_dict()
    assert set(d) == {"e_r", "e_d", "e_T", "verdict", "e_H", "e_V", "e_D", "e_A"}
    assert d["verdict"] == "secure"
