import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netlearn import signals


def test_symmetric_binary_values():
    m = signals.symmetric_binary(0.7)
    # oracle: z = ln(0.7/0.3) = 0.8472978603872036
    assert m.atoms[0].z == pytest.approx(0.8472978603872036, abs=1e-12)
    assert m.atoms[1].z == pytest.approx(-0.8472978603872036, abs=1e-12)
    assert signals.total_variation(m) == pytest.approx(0.4, abs=1e-12)
    assert signals.p_star(m) == pytest.approx(0.7, abs=1e-12)


def test_symmetric_binary_rejects_bad_q():
    for q in (0.5, 1.0, 0.2):
        with pytest.raises(ValueError):
            signals.symmetric_binary(q)


def test_model_validation():
    with pytest.raises(ValueError):  # masses do not sum to one
        signals.model_from_triples([(0.5, 0.4, 0.6), (-0.5, 0.5, 0.4)])
    with pytest.raises(ValueError):  # z inconsistent with masses
        signals.model_from_triples([(0.3, 0.4, 0.6), (-0.9, 0.6, 0.4)])
    with pytest.raises(ValueError):  # zero mass breaks mutual continuity
        signals.model_from_triples([(0.0, 0.0, 0.0), (0.0, 1.0, 1.0)])


def test_degenerate_model_rejected():
    # equal masses under both states carry no information (d_TV = 0)
    with pytest.raises(ValueError):
        signals.model_from_triples([(0.0, 1.0, 1.0)])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.501, 0.999))
def test_p_star_identity(q):
    m = signals.symmetric_binary(q)
    tv = signals.total_variation(m)
    assert signals.p_star(m) == pytest.approx(0.5 + 0.5 * tv, abs=1e-12)
    assert 0.0 < tv <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(-5.0, -0.1))
def test_two_atom_from_logits_consistent(z_plus, z_minus):
    m = signals.two_atom_from_logits(z_plus, z_minus)
    for a in m.atoms:
        assert a.z == pytest.approx(math.log(a.p1 / a.p0), abs=1e-10)
    assert sum(m.probs(0)) == pytest.approx(1.0, abs=1e-12)
    assert sum(m.probs(1)) == pytest.approx(1.0, abs=1e-12)


def test_two_atom_from_logits_rejects_same_sign():
    with pytest.raises(ValueError):
        signals.two_atom_from_logits(2.0, 0.5)
    with pytest.raises(ValueError):
        signals.two_atom_from_logits(-1.0, -2.0)


def test_royal_bounded_frozen_values():
    m = signals.royal_bounded()
    # oracle: p0+ = (1 - e^{-1.5}) / (e^{1.5} - e^{-1.5})
    assert m.atoms[0].z == pytest.approx(1.5, abs=1e-12)
    assert m.atoms[0].p0 == pytest.approx(0.18242552380635635, abs=1e-12)
    assert m.atoms[0].p1 == pytest.approx(0.8175744761936437, abs=1e-12)
    assert abs(m.atoms[0].z) <= 2.0 and abs(m.atoms[1].z) <= 2.0
    # private log-likelihood ratios stay inside (1, 2) in magnitude
    assert 1.0 < abs(m.atoms[0].z) < 2.0 and 1.0 < abs(m.atoms[1].z) < 2.0


def test_mad_king_asym_frozen_values():
    m = signals.mad_king_asym()
    assert m.atoms[0].z == pytest.approx(1.0, abs=1e-12)
    assert m.atoms[1].z == pytest.approx(-math.sqrt(7.0), abs=1e-12)
    # oracle via the two-equation solve
    assert m.atoms[0].p0 == pytest.approx(0.35093775346925193, abs=1e-10)
    assert m.atoms[0].p1 == pytest.approx(0.9539477181757078, abs=1e-10)
    assert m.atoms[1].p0 == pytest.approx(0.6490622465307481, abs=1e-10)


def test_sign_atoms():
    m = signals.symmetric_binary(0.6)
    neg, pos = m.sign_atoms()
    assert m.atoms[neg].z < 0 < m.atoms[pos].z
    three = signals.model_from_triples([
        (math.log(3), 0.2, 0.6), (0.0, 0.3, 0.3),
        (math.log(0.5 / 0.1) * -1, 0.5, 0.1)])
    with pytest.raises(ValueError):
        three.sign_atoms()


def test_private_belief_matches_logistic():
    m = signals.symmetric_binary(0.8)
    for idx in range(m.k):
        want = 1.0 / (1.0 + math.exp(-m.atoms[idx].z))
        assert signals.private_belief(signals.Signal(idx, 0.0), m) \
            == pytest.approx(want, abs=1e-12)


def test_sampler_distribution():
    m = signals.mad_king_asym()
    rng = np.random.default_rng(0)
    for s in (0, 1):
        draws = m.sample_atoms(rng, 50000, s)
        emp = np.bincount(draws, minlength=2) / 50000
        assert np.abs(emp - m.probs(s)).max() < 0.01


def test_signal_jitter_carries_no_information():
    m = signals.symmetric_binary(0.7, jitter_width=0.5)
    rng = np.random.default_rng(1)
    sig = signals.sample_signal(m, 1, rng)
    assert 0.0 <= sig.jitter < 0.5
    # belief depends on the atom only
    other = signals.Signal(sig.atom, 0.123)
    assert signals.private_belief(sig, m) == signals.private_belief(other, m)
