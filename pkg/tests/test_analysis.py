import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from farstab import potentials as pot
from farstab.algebra import build_group
from farstab.analysis import (
    classify_bases_d4,
    classify_basis,
    cube_root_of_unity_mod,
    from_chart,
    mus_in_real_zauner,
    orthogonality_graph,
    real_zauner_frame,
    reduced_purity,
    table1,
    to_chart,
    zauner_real_map,
)
from farstab.errors import UnclassifiableBasis, UnsupportedDimension
from farstab.mubs import enumerate_petals, petal_eigenbasis


@pytest.fixture(scope="module")
def frame7():
    return real_zauner_frame(7)


def test_cube_root():
    assert cube_root_of_unity_mod(7) == 2
    assert pow(cube_root_of_unity_mod(13), 3, 13) == 1
    with pytest.raises(UnsupportedDimension):
        cube_root_of_unity_mod(5)


def test_real_frame(frame7):
    R, zu = frame7
    assert R.shape == (7, 3)
    assert np.isrealobj(R) or np.allclose(np.imag(R), 0)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert np.allclose(R[:, 0], np.eye(7)[0])
    E = zu.largest_eigenspace
    assert np.allclose(E @ (E.conj().T @ R), R, atol=1e-10)
    assert np.allclose(zu.matrix @ R, R, atol=1e-10)
    with pytest.raises(UnsupportedDimension):
        real_zauner_frame(5)


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_chart_round_trip(x, y):
    assume(x * x + y * y < 0.99)  # the chart covers the upper hemisphere only
    R, _ = real_zauner_frame(7)
    psi = from_chart(R, np.array(x), np.array(y))
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert np.allclose(to_chart(R, psi), (x, y), atol=1e-9)
    assert np.allclose(to_chart(R, -psi), (x, y), atol=1e-9)


def test_small_map(frame7):
    m = zauner_real_map(7, grid_n=41, restarts=30)
    assert m.f_sic.shape == (41, 41)
    X, Y = np.meshgrid(m.x, m.y)
    inside = X**2 + Y**2 <= 1
    assert np.all(np.isfinite(m.f_sic[inside])) and np.all(np.isnan(m.f_sic[~inside]))
    R, zu = frame7
    psi = from_chart(R, X[inside], Y[inside])
    assert np.allclose(np.linalg.norm(psi, axis=1), 1, atol=1e-12)
    E = zu.largest_eigenspace
    assert np.abs(psi - (psi @ E.conj()) @ E.T).max() < 1e-10
    rows = m.rows()
    assert rows.shape == (inside.sum(), 3)
    assert len(m.marked["MUS"]) == 6 and len(m.marked["SIC"]) == 2
    assert all(abs(v - 21 / 4) < 1e-9 for _, v in m.marked["max"])


def test_mus_in_real_zauner():
    found = mus_in_real_zauner(7)
    g = build_group(7)
    fs = sorted(float(pot.f_sic(g, s)) for s in found)
    assert len(found) == 6
    assert sum(v < 1e-8 for v in fs) == 2
    assert all(v > 0.01 for v in fs[2:])


def test_graph_examples():
    B = petal_eigenbasis(enumerate_petals(build_group(5))[2]).columns
    g = orthogonality_graph(B.T)
    assert g.edge_count == 10 and g.is_regular and set(g.degrees) == {4}
    v = B[:, 0]
    g1 = orthogonality_graph([v, 1j * v, -v])
    assert len(g1.adjacency) == 1 and g1.edge_count == 0
    d = g.to_dict()
    assert d["vertices"] == 5 and len(d["edges"]) == 10


@given(st.lists(st.floats(0, 2 * np.pi), min_size=5, max_size=5))
def test_graph_phase_invariance(phases):
    B = petal_eigenbasis(enumerate_petals(build_group(5))[1]).columns
    states = np.vstack([B.T, np.ones(5) / np.sqrt(5)])
    a = orthogonality_graph(states).adjacency
    rotated = states * np.exp(1j * np.array(phases + [0.3]))[:, None]
    assert np.array_equal(a, orthogonality_graph(rotated).adjacency)
    assert np.array_equal(a, a.T) and not np.any(np.diag(a))


def test_classification_counts():
    shapes, ents = classify_bases_d4()
    assert shapes == {"computational": 1, "hadamard": 8, "sparse": 6}
    assert ents["maximally_entangled"] == 6
    assert ents["maximally_entangled"] + ents["product"] + ents["partially_entangled"] == 15


def test_computational_basis_is_product():
    shape, ent = classify_basis(np.eye(4))
    assert shape == "computational" and ent == "product"
    assert reduced_purity(np.eye(4)[2]) == pytest.approx(1)
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert reduced_purity(bell) == pytest.approx(0.5)


@given(st.lists(st.floats(0, 2 * np.pi), min_size=4, max_size=4))
def test_classification_phase_stable(phases):
    g = build_group(4, "bipartite")
    bases = [petal_eigenbasis(p).columns * np.exp(1j * np.array(phases)) for p in enumerate_petals(g)]
    shapes, ents = classify_bases_d4(bases)
    assert shapes == {"computational": 1, "hadamard": 8, "sparse": 6}
    assert ents["maximally_entangled"] == 6


def test_unclassifiable():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    with pytest.raises(UnclassifiableBasis):
        classify_basis(q)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_table1_rows(d):
    rows = table1(d)
    assert len(rows) == 6
    assert all(ok for *_, ok in rows)


def test_table1_values():
    rows = {(n, q): (v, e) for n, q, v, e, _ in table1(5)}
    assert rows[("stabilizer", "f_mus")][1] == pytest.approx(8 / 15)
    assert rows[("stabilizer", "f_sic")][1] == pytest.approx(10 / 3)
    rows = {(n, q): (v, e) for n, q, v, e, _ in table1(7)}
    assert rows[("alltop", "f_mus")][0] == pytest.approx(9 / 686, abs=1e-12)
    assert rows[("alltop", "f_sic")][0] == pytest.approx(3 / 28, abs=1e-12)
    with pytest.raises(UnsupportedDimension):
        table1(11)
