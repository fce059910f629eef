import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsspi.adversary import (
    AttackSpec,
    AttackVariant,
    EveContribution,
    Selection,
    emulated_selection,
    eve_contribution,
    eve_pair_rate,
    eve_rates_emulated,
    eve_rates_intercept_resend,
    eve_rates_random_polarization,
    eve_shot_intensity,
    jamming_rates,
)
from qsspi.optics import (
    BASIS_STATES,
    POLARIZATIONS,
    Basis,
    DetectorModel,
    Polarization,
    SourceModel,
    accidental_rate,
    projection_probability,
)
from qsspi.patterns import pattern_sequence
from qsspi.scene import SceneProfile, builtin_glyph

rates = st.floats(1e-6, 1e6)


def enumerate_intercept_resend(n_e):
    """Exhaustive tree: idler outcome, Eve's basis, Eve's outcome, Alice's signal outcome.

    Returns {idler: (correct, error)}.
    """
    out = {p: [0.0, 0.0] for p in POLARIZATIONS}
    for basis, states in BASIS_STATES.items():
        for idler in states:
            p_idler = 0.5 * 0.5  # Alice basis, then idler outcome
            for eve_basis in BASIS_STATES:
                for eve_out in BASIS_STATES[eve_basis]:
                    p_eve = 0.5 * projection_probability(idler, eve_out.angle)
                    for signal in states:
                        p_sig = projection_probability(eve_out, signal.angle)
                        w = n_e * p_idler * p_eve * p_sig
                        out[idler][0 if signal is idler else 1] += w
    return out


def test_intercept_resend_reference_values():
    c = eve_rates_intercept_resend(16)
    assert np.all(c.correct == 3) and np.all(c.error == 1)
    zero = eve_rates_intercept_resend(0)
    assert zero.total == 0


def test_intercept_resend_matches_enumeration():
    tree = enumerate_intercept_resend(1.0)
    c = eve_rates_intercept_resend(1.0)
    for p in POLARIZATIONS:
        assert c.correct[p.index] == pytest.approx(tree[p][0], abs=1e-15)
        assert c.error[p.index] == pytest.approx(tree[p][1], abs=1e-15)
    assert c.error_fraction == pytest.approx(0.25)


def test_random_polarization_matches_enumeration():
    assert np.all(eve_rates_random_polarization(8).correct == 1)
    assert np.all(eve_rates_random_polarization(8).error == 1)
    assert eve_rates_random_polarization(0).total == 0
    # Eve sends one of four states uniformly; Alice measures in either basis
    n_e = 4.0
    correct = error = 0.0
    for basis, states in BASIS_STATES.items():
        for idler in states:
            for sent in POLARIZATIONS:
                w = n_e * 0.5 * 0.5 * 0.25
                correct += w * projection_probability(sent, idler.angle)
                error += w * projection_probability(sent, idler.orthogonal.angle)
    c = eve_rates_random_polarization(n_e)
    assert c.correct.sum() == pytest.approx(correct)
    assert c.error.sum() == pytest.approx(error)
    assert c.error_fraction == pytest.approx(0.5)


@given(rates)
def test_error_fractions(n_e):
    assert eve_rates_intercept_resend(n_e).error_fraction == pytest.approx(0.25)
    assert eve_rates_random_polarization(n_e).error_fraction == pytest.approx(0.5)
    assert eve_rates_random_polarization(n_e).error_fraction == pytest.approx(
        2 * eve_rates_intercept_resend(n_e).error_fraction
    )


def test_contribution_table_layout():
    table = eve_rates_intercept_resend(16).table()
    assert table[0, 0] == 3 and table[1, 0] == 1  # idler H: HH correct, VH error
    assert table[2, 3] == 1 and table[3, 3] == 3  # idler A: DA error, AA correct
    assert table.sum() == 16
    assert table[0, 2] == 0  # cross-basis cells empty


def test_emulated_selection_rules():
    R, D = Basis.RECTILINEAR, Basis.DIAGONAL
    H, V = Polarization.H, Polarization.V
    assert emulated_selection(R, H, H) is Selection.KEEP
    assert emulated_selection(R, H, V) is Selection.DISCARD
    for idler in (Polarization.D, Polarization.A):
        assert emulated_selection(D, H, idler) is Selection.ERROR_COINCIDENCE
    with pytest.raises(ValueError):
        emulated_selection(R, H, Polarization.D)


def test_emulated_rates_fixed_h():
    c = eve_rates_emulated(8.0, Polarization.H)
    # rectilinear: only idler H survives, always correct
    assert c.correct[0] == 2 and c.error[0] == 0
    assert c.correct[1] == 0 and c.error[1] == 0
    # diagonal: all four combinations kept, half erroneous
    assert c.correct[2] == c.error[2] == c.correct[3] == c.error[3] == 1
    assert c.total == 6


def test_emulated_rates_fixed_d_mirror_h():
    h = eve_rates_emulated(1.0, Polarization.H)
    d = eve_rates_emulated(1.0, Polarization.D)
    assert np.allclose(d.correct, h.correct[[2, 3, 0, 1]])
    assert np.allclose(d.error, h.error[[2, 3, 0, 1]])


def test_shot_intensity_examples():
    masks = pattern_sequence(2)
    blank = AttackSpec("partial_intercept_resend", fraud_scene=builtin_glyph("blank", 4))
    assert all(eve_shot_intensity(blank, m, 100.0) == 0 for m in masks)
    full = AttackSpec("partial_intercept_resend", fraud_scene=builtin_glyph("full", 4))
    assert eve_shot_intensity(full, masks[0], 7.0) == pytest.approx(7.0)


def test_shot_intensity_matches_double_loop():
    rng = np.random.default_rng(3)
    fraud = SceneProfile(rng.random((8, 8)), rng.random((8, 8)))
    attack = AttackSpec("partial_intercept_resend", fraud_scene=fraud)
    for mask in pattern_sequence(3)[:20]:
        total = 0.0
        for i in range(8):
            for j in range(8):
                total += mask.cells[i, j] * fraud.eta[i, j] * fraud.chi[i, j] * 3.0
        assert eve_shot_intensity(attack, mask, 3.0) == pytest.approx(total / 64)


def test_shot_intensity_linear_and_monotone():
    fraud = builtin_glyph("D", 8)
    attack = AttackSpec("partial_intercept_resend", fraud_scene=fraud)
    mask = pattern_sequence(3)[6]
    assert eve_shot_intensity(attack, mask, 6.0) == pytest.approx(3 * eve_shot_intensity(attack, mask, 2.0))
    bigger = np.maximum(mask.cells, pattern_sequence(3)[10].cells)
    assert eve_shot_intensity(attack, bigger, 1.0) >= eve_shot_intensity(attack, mask, 1.0)
    with pytest.raises(ValueError):
        eve_shot_intensity(attack, np.ones((4, 4)), 1.0)


def test_eve_pair_rate_uses_accidental_formula():
    src, det = SourceModel(), DetectorModel()
    attack = AttackSpec("partial_intercept_resend", fraud_scene=builtin_glyph("D", 32), intensity_ratio=1000)
    assert eve_pair_rate(attack, src, det) == pytest.approx(accidental_rate(8e4, 6e6, 650e-12))
    doubled = AttackSpec("partial_intercept_resend", fraud_scene=builtin_glyph("D", 32), intensity_ratio=2000)
    assert eve_pair_rate(doubled, src, det) == pytest.approx(2 * eve_pair_rate(attack, src, det))


def test_jamming_rates():
    src, det = SourceModel(), DetectorModel()
    inflation, acc = jamming_rates(AttackSpec("jamming", jam_power_ratio=1000), src, det)
    assert inflation == pytest.approx(6e6)
    assert acc == pytest.approx(accidental_rate(8e4, 6e6, 650e-12))
    assert jamming_rates(AttackSpec("jamming", jam_power_ratio=0), src, det) == (0.0, 0.0)
    _, acc = jamming_rates(
        AttackSpec("jamming", jam_power_ratio=5.8e6 / 6e3), src, det
    )
    assert acc == pytest.approx(301.6) and acc == pytest.approx(accidental_rate(8e4, 5.8e6, 650e-12))
    with pytest.raises(ValueError):
        jamming_rates(AttackSpec(), src, det)


def test_no_attack_contributes_nothing():
    none = AttackSpec()
    assert eve_contribution(none, 100.0).total == 0
    assert eve_pair_rate(none, SourceModel(), DetectorModel()) == 0
    assert eve_shot_intensity(none, pattern_sequence(1)[0], 100.0) == 0


def test_attack_spec_validation():
    with pytest.raises(ValueError):
        AttackSpec("partial_intercept_resend")
    with pytest.raises(ValueError):
        AttackSpec("bogus")
    with pytest.raises(ValueError):
        AttackSpec("jamming", jam_power_ratio=-1)
    full = AttackSpec("full_intercept_resend", fraud_scene=builtin_glyph("D", 4))
    assert full.alice_blocked and full.variant is AttackVariant.FULL_INTERCEPT_RESEND


def test_contribution_defaults_empty():
    assert EveContribution().total == 0
    assert np.isnan(EveContribution().error_fraction)
