from fractions import Fraction

import numpy as np
import pytest
from conftest import hand_bipartite, hand_displacements, hand_f_mus, hand_f_sic, random_state
from hypothesis import given
from hypothesis import strategies as st

from farstab import potentials as pot
from farstab.algebra import build_group
from farstab.errors import DimensionMismatch, UnsupportedDimension
from farstab.explore import random_states, restart_rng
from farstab.mubs import stabilizer_mubs, stabilizer_states
from farstab.states import alltop_fiducial, sic_fiducial, sic_fiducial_d3


def test_probability_vector_examples(groups, mubs):
    b = mubs[5][0].bases[0]
    p = pot.probability_vector(b, b.columns[:, 0])
    assert np.allclose(p, [1, 0, 0, 0, 0], atol=1e-14)
    other = mubs[5][0].bases[1].columns[:, 2]
    assert np.allclose(pot.probability_vector(b, other), 0.2, atol=1e-12)
    psi = random_state(5, 11)
    direct = [abs(np.vdot(b.columns[:, i], psi)) ** 2 for i in range(5)]
    assert np.allclose(pot.probability_vector(b, psi), direct, atol=1e-14)


def test_dimension_mismatch(groups, mubs):
    with pytest.raises(DimensionMismatch):
        pot.f_sic(groups[3], np.ones(4) / 2)
    with pytest.raises(DimensionMismatch):
        pot.f_mus(mubs[3][0], np.ones(4) / 2)


def test_f_sic_table_values(groups):
    e0 = np.eye(3)[0]
    assert abs(pot.f_sic(groups[3], e0) - 1.5) < 1e-12
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(pot.f_sic(groups[2], plus) - 2 / 3) < 1e-12
    assert pot.f_sic(groups[2], sic_fiducial(2)) < 1e-14


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_f_sic_against_direct_sum(groups, d):
    ops = hand_displacements(d)
    for psi in [np.r_[1, 1, np.zeros(d - 2)] / np.sqrt(2), random_state(d, d)]:
        assert abs(pot.f_sic(groups[d], psi) - hand_f_sic(ops, psi)) < 1e-12


def test_f_sic_bipartite_direct_sum(groups):
    ops = hand_bipartite()
    for seed in range(5):
        psi = random_state(4, seed)
        assert abs(pot.f_sic(groups["b4"], psi) - hand_f_sic(ops, psi)) < 1e-12


@pytest.mark.parametrize("key", [3, 5, "b4"])
def test_f_mus_against_direct_sum(mubs, key):
    d = 4 if key == "b4" else key
    for mub in mubs[key]:
        bases = [b.columns for b in mub.bases]
        psi = random_state(d, 3)
        assert abs(pot.f_mus(mub, psi) - hand_f_mus(bases, psi)) < 1e-12


def test_f_mus_examples(groups, mubs):
    for s in stabilizer_states(groups[2]):
        assert abs(pot.f_mus(mubs[2][0], s) - 1 / 6) < 1e-12
    for sigma in np.linspace(0, np.pi / 3, 7):
        assert pot.f_mus(mubs[3][0], sic_fiducial_d3(sigma)) < 1e-14
    assert abs(pot.f_mus(mubs[7][0], alltop_fiducial(7)) - 9 / 686) < 1e-12


def test_batch_matches_single(groups, mubs):
    psi = random_states(restart_rng(0, 0), 6, 7)
    batch = pot.f_sic(groups[7], psi)
    assert np.allclose(batch, [pot.f_sic(groups[7], p) for p in psi], atol=1e-14)
    batch = pot.f_mus(mubs[7][0], psi)
    assert np.allclose(batch, [pot.f_mus(mubs[7][0], p) for p in psi], atol=1e-14)


def test_autocorrelation_examples():
    assert np.allclose(pot.autocorrelations(np.full(5, 0.2)), 0.2)
    assert np.allclose(pot.autocorrelations(np.eye(7)[0]), 0)
    assert np.allclose(pot.autocorrelations([0.5, 0.5, 0, 0, 0]), [0.25, 0])
    with pytest.raises(UnsupportedDimension):
        pot.autocorrelations(np.full(4, 0.25))


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 7, 11]))
def test_autocorrelation_identity(seed, d):
    p = np.random.default_rng(seed).dirichlet(np.ones(d))
    D = pot.autocorrelations(p)
    assert np.all(D >= 0)
    assert abs(2 * D.sum() - (1 - np.sum(p**2))) < 1e-12


def test_inequality_coefficients():
    assert pot.inequality_coefficient(7) == pytest.approx(49 / 6)
    assert pot.inequality_coefficient(4) == pytest.approx(16 / 3)


def test_saturation_d3(groups, mubs):
    psi = random_states(restart_rng(1, 0), 1000, 3)
    assert np.all(np.abs(pot.inequality_gaps(groups[3], mubs[3][0], psi)) < 1e-8)
    rep = pot.inequality_report(groups[3], mubs[3][0], psi[0])
    assert rep.saturated


def test_alltop_saturates_d7(groups, mubs):
    rep = pot.inequality_report(groups[7], mubs[7][0], alltop_fiducial(7))
    assert rep.saturated and rep.gap > -1e-10
    assert set(rep.to_dict()) >= {"f_sic", "f_mus_per_mub", "gap", "saturated"}


def test_generic_state_strict(groups, mubs):
    rep = pot.inequality_report(groups[5], mubs[5][0], random_state(5, 2))
    assert rep.gap > 1e-6 and not rep.saturated


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5, 7]))
def test_gap_nonnegative(seed, d):
    g = build_group(d)
    mub = stabilizer_mubs(g)[0]
    psi = random_states(restart_rng(seed, 0), 200, d)
    assert pot.inequality_gaps(g, mub, psi).min() >= -1e-10


@given(st.integers(0, 2**32 - 1))
def test_gap_nonnegative_bipartite(seed):
    g = build_group(4, "bipartite")
    psi = random_states(restart_rng(seed, 0), 200, 4)
    for mub in stabilizer_mubs(g):
        assert pot.inequality_gaps(g, mub, psi).min() >= -1e-10


def test_simplex_membership(groups, mubs):
    ok, spreads = pot.simplex_membership(groups[7], mubs[7][0], sic_fiducial(7))
    assert ok and spreads.max() < 1e-7
    ok, _ = pot.simplex_membership(groups[5], mubs[5][0], stabilizer_states(groups[5])[3])
    assert ok
    psi = sic_fiducial(5) + 0.1 * random_state(5, 4)
    psi /= np.linalg.norm(psi)
    ok, _ = pot.simplex_membership(groups[5], mubs[5][0], psi)
    assert not ok
    with pytest.raises(UnsupportedDimension):
        pot.simplex_membership(groups["b4"], mubs["b4"][0], np.eye(4)[0])


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 7]))
def test_simplex_matches_saturation(seed, d):
    g = build_group(d)
    mub = stabilizer_mubs(g)[0]
    for psi in (random_state(d, seed), stabilizer_states(g)[seed % (d * (d + 1))]):
        ok, _ = pot.simplex_membership(g, mub, psi)
        assert ok == pot.inequality_report(g, mub, psi).saturated


def _fd_projected(f, psi, h=1e-5):
    x = np.concatenate([psi.real, psi.imag])
    d = len(psi)
    grad = np.zeros(2 * d)
    for k in range(2 * d):
        e = np.zeros(2 * d)
        e[k] = h
        up, dn = x + e, x - e
        grad[k] = (f(up[:d] + 1j * up[d:]) - f(dn[:d] + 1j * dn[d:])) / (2 * h)
    return grad - (grad @ x) * x


@pytest.mark.parametrize("key", [5, 7, "b4"])
def test_gradients_finite_differences(groups, mubs, key):
    d = 4 if key == "b4" else key
    psi = random_state(d, 21)
    g, m = groups[key], mubs[key][0]
    for analytic, f in [
        (pot.gradient_f_sic(g, psi), lambda v: pot.f_sic(g, v)),
        (pot.gradient_f_mus(m, psi), lambda v: pot.f_mus(m, v)),
    ]:
        fd = _fd_projected(f, psi)
        assert np.linalg.norm(analytic - fd) <= 1e-6 * np.linalg.norm(fd)


def test_gradient_vanishes_at_sic(groups):
    psi = sic_fiducial_d3(0.3)
    assert np.linalg.norm(pot.gradient_f_sic(groups[3], psi)) < 1e-8


@given(st.integers(0, 2**32 - 1))
def test_gradient_orthogonal_to_phase(seed):
    g = build_group(5)
    mub = stabilizer_mubs(g)[0]
    psi = random_state(5, seed)
    phase_dir = np.concatenate([(1j * psi).real, (1j * psi).imag])
    for grad in (pot.gradient_f_sic(g, psi), pot.gradient_f_mus(mub, psi)):
        assert abs(grad @ phase_dir) < 1e-10 * max(1, np.linalg.norm(grad))


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 7, "b4"]), st.integers(0, 15))
def test_displacement_invariance(seed, key, k):
    g = build_group(4, "bipartite") if key == "b4" else build_group(key)
    mub = stabilizer_mubs(g)[0]
    psi = random_state(g.dim, seed)
    D = g.operators[k % g.element_count]
    assert abs(pot.f_sic(g, D @ psi) - pot.f_sic(g, psi)) < 1e-10
    assert abs(pot.f_mus(mub, D @ psi) - pot.f_mus(mub, psi)) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_ranges_prime(groups, mubs, d):
    sm, ss = pot.stabilizer_values(d)
    assert Fraction(sm).limit_denominator(1000) == Fraction((d - 1) ** 2, d * (d + 1))
    psi = random_states(restart_rng(d, 0), 2000, d)
    fs, fm = pot.f_sic(groups[d], psi), pot.f_mus(mubs[d][0], psi)
    assert fs.min() >= 0 and fs.max() < ss
    assert fm.min() >= 0 and fm.max() < sm
    S = stabilizer_states(groups[d])
    assert np.allclose(pot.f_sic(groups[d], S), ss, atol=1e-12)
    assert np.allclose(pot.f_mus(mubs[d][0], S), sm, atol=1e-12)


def test_range_bipartite(groups):
    g = groups["b4"]
    psi = random_states(restart_rng(4, 0), 100_000, 4)
    fs = pot.f_sic(g, psi)
    assert fs.min() > 0 and fs.max() < 12 / 5
    assert np.allclose(pot.f_sic(g, stabilizer_states(g)), 12 / 5, atol=1e-12)


def test_closed_forms():
    assert pot.fs_average_f_sic(3) == pytest.approx(0.3)
    assert pot.fs_average_f_sic(2) == pytest.approx(4 / 15)
    assert pot.fs_average_f_sic(5) == pytest.approx(10 / 21)
    assert pot.fs_average_f_mus(3) == pytest.approx(1 / 15)
    assert pot.fs_average_f_mus(4) == pytest.approx(2 / 35)
    assert pot.fs_average_f_mus(7) == pytest.approx(1 / 30)
    assert pot.alltop_values(5)[0] == pytest.approx(8 / 375)
