"""
Reproductions built on the other modules: the real Zauner map in d=7,
orthogonality graphs, the d=4 basis classification and Table 1 checks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import potentials as pot
from .algebra import build_group, is_prime, zauner_unitary
from .errors import IncompleteSet, SubspaceConstructionFailure, UnclassifiableBasis, UnsupportedDimension
from .explore import FMusSum, FSic, OptimizationProblem, ProfileMatch, optimize
from .mubs import enumerate_petals, petal_eigenbasis, stabilizer_mubs, stabilizer_states
from .states import (
    alltop_profile,
    alltop_vector,
    dedupe,
    sic_fiducial,
    table1_expectations,
)

# ---------------------------------------------------------------------------
# real Zauner subspace


def cube_root_of_unity_mod(d):
    """Smallest t with t^3 = 1, t != 1 mod d (needs d = 1 mod 3)."""
    for t in range(2, d):
        if pow(t, 3, d) == 1:
            return t
    raise UnsupportedDimension(f"no nontrivial cube root of unity mod {d}")


def real_zauner_frame(d=7):
    """Real orthonormal frame of the largest eigenspace of a Zauner unitary.

    The order-3 symplectic used is diag(t, 1/t) with t a cube root of unity
    mod d; its Clifford is the permutation |k> -> |t k>, so the eigenspace is
    spanned by real vectors. The first column is the computational basis
    vector e_0, which serves as the pole of the stereographic chart.
    """
    if not is_prime(d) or d % 3 != 1:
        raise UnsupportedDimension(f"real Zauner frame needs a prime d = 1 mod 3, got {d}")
    t = cube_root_of_unity_mod(d)
    zu = zauner_unitary(d, ((t, 0), (0, pow(t, -1, d))))
    E = zu.largest_eigenspace
    m = E.shape[1]
    u, s, _ = np.linalg.svd(np.hstack([E.real, E.imag]))
    if s[m] > 1e-8 or s[m - 1] < 1e-8:
        raise SubspaceConstructionFailure("eigenspace is not spanned by real vectors")
    R = u[:, :m]
    e0 = np.zeros(d)
    e0[0] = 1.0
    if np.linalg.norm(R.T @ e0) > 1 - 1e-12:
        rest = R - np.outer(e0, e0 @ R)
        u2, _, _ = np.linalg.svd(rest)
        R = np.column_stack([e0, u2[:, : m - 1]])
    if not np.allclose(E @ (E.conj().T @ R), R, atol=1e-10):
        raise SubspaceConstructionFailure("real frame leaves the eigenspace")
    return R, zu


def to_chart(frame, psi):
    """Stereographic (x, y) of a state in the real subspace, on the upper hemisphere."""
    s = np.real(frame.T @ psi)
    s = s / np.linalg.norm(s)
    if s[0] < 0:
        s = -s
    return s[1] / (1 + s[0]), s[2] / (1 + s[0])


def from_chart(frame, x, y):
    r2 = x * x + y * y
    pole = (1 - r2) / (1 + r2)
    sx, sy = 2 * x / (1 + r2), 2 * y / (1 + r2)
    coords = np.stack([pole, sx, sy], axis=-1)
    return coords @ frame.T.astype(complex)


@dataclass
class SubspaceMap:
    x: np.ndarray
    y: np.ndarray
    f_sic: np.ndarray = field(repr=False)
    marked: dict = field(default_factory=dict)
    frame: np.ndarray = field(default=None, repr=False)

    @property
    def grid_max(self):
        return float(np.nanmax(self.f_sic))

    def rows(self):
        X, Y = np.meshgrid(self.x, self.y, indexing="xy")
        keep = np.isfinite(self.f_sic)
        return np.column_stack([X[keep], Y[keep], self.f_sic[keep]])


def _real_search(frame, objective, restarts, seed, tol):
    d = frame.shape[0]
    prob = OptimizationProblem(d, objective, frame=frame, real=True, restarts=restarts, max_iter=500, polish=restarts)
    res = optimize(prob, seed=seed)
    return dedupe(res.states[res.values < tol])


def mus_in_real_zauner(d=7, restarts=200, seed=0, tol=1e-20):
    """All minimum uncertainty states inside the real Zauner subspace."""
    frame, _ = real_zauner_frame(d)
    group = build_group(d)
    found = _real_search(frame, FMusSum(stabilizer_mubs(group)), restarts, seed, tol)
    if len(found) != 6:
        warnings.warn(f"found {len(found)} MUS in the real Zauner subspace, expected 6", IncompleteSet, stacklevel=2)
    return found


def alltop_in_real_zauner(d=7, restarts=60, seed=0, tol=1e-20):
    """States of the real Zauner subspace with the Alltop expectation profile for some petal."""
    frame, _ = real_zauner_frame(d)
    group = build_group(d)
    found = []
    for z in range(len(enumerate_petals(group))):
        found += _real_search(frame, ProfileMatch(group, alltop_profile(group, z)), restarts, seed + z, tol)
    return dedupe(found)


def zauner_real_map(d=7, grid_n=400, restarts=60, seed=0):
    """f_SIC over a stereographic grid of the real Zauner subspace, with marked points."""
    frame, _ = real_zauner_frame(d)
    group = build_group(d)
    x = np.linspace(-1.0, 1.0, grid_n)
    X, Y = np.meshgrid(x, x, indexing="xy")
    inside = X**2 + Y**2 <= 1.0
    psi = from_chart(frame, X[inside], Y[inside])
    values = np.full(X.shape, np.nan)
    chunk = 20_000
    flat = np.empty(len(psi))
    for k in range(0, len(psi), chunk):
        flat[k : k + chunk] = pot.f_sic(group, psi[k : k + chunk])
    values[inside] = flat

    marked = {"MUS": [], "SIC": [], "Alltop": [], "max": []}
    for s in mus_in_real_zauner(d, seed=seed):
        fs = float(pot.f_sic(group, s))
        marked["MUS"].append((to_chart(frame, s), fs))
        if fs < 1e-8:
            marked["SIC"].append((to_chart(frame, s), fs))
    for s in alltop_in_real_zauner(d, seed=seed):
        marked["Alltop"].append((to_chart(frame, s), float(pot.f_sic(group, s))))
    prob = OptimizationProblem(
        d, FSic(group, -1.0), frame=frame, real=True, restarts=restarts, max_iter=500, polish=restarts
    )
    res = optimize(prob, seed=seed)
    top = -res.values[0]
    for s in dedupe(res.states[-res.values > top - 1e-9]):
        marked["max"].append((to_chart(frame, s), float(pot.f_sic(group, s))))
    return SubspaceMap(x, x, values, marked, frame)


# ---------------------------------------------------------------------------
# orthogonality graphs


@dataclass
class OrthogonalityGraph:
    states: np.ndarray = field(repr=False)
    adjacency: np.ndarray = field(repr=False)

    @property
    def degrees(self):
        return self.adjacency.sum(axis=1)

    @property
    def edge_count(self):
        return int(self.adjacency.sum() // 2)

    @property
    def is_regular(self):
        deg = self.degrees
        return bool(len(deg) == 0 or np.all(deg == deg[0]))

    def edges(self):
        i, j = np.nonzero(np.triu(self.adjacency))
        return list(zip(i.tolist(), j.tolist()))

    def to_dict(self):
        return {
            "vertices": len(self.adjacency),
            "edges": self.edges(),
            "edge_count": self.edge_count,
            "degrees": self.degrees.tolist(),
            "regular": self.is_regular,
        }


def orthogonality_graph(states, tol=1e-8):
    """Vertices are the distinct states; edges join orthogonal pairs."""
    states = np.array(dedupe(list(np.asarray(states, dtype=complex))))
    ov = np.abs(states.conj() @ states.T) ** 2
    adj = ov < tol
    np.fill_diagonal(adj, False)
    return OrthogonalityGraph(states, adj.astype(int))


# ---------------------------------------------------------------------------
# d = 4 basis classification


def reduced_purity(psi):
    """Purity of the first-qubit reduced state of a two-qubit vector."""
    M = np.asarray(psi).reshape(2, 2)
    rho = M @ M.conj().T
    return float(np.real(np.trace(rho @ rho)))


def classify_basis(B, tol=1e-10):
    A = np.abs(B)
    zeros = int(np.sum(A < tol))
    if np.all((A < tol) | (np.abs(A - 1) < tol)):
        shape = "computational"
    elif np.all(np.abs(A - 0.5) < tol):
        shape = "hadamard"
    elif zeros >= A.size // 2:
        shape = "sparse"
    else:
        raise UnclassifiableBasis(f"basis with {zeros} zero entries fits no category")
    purities = [reduced_purity(c) for c in B.T]
    if all(abs(p - 0.5) < tol for p in purities):
        ent = "maximally_entangled"
    elif all(abs(p - 1) < tol for p in purities):
        ent = "product"
    else:
        ent = "partially_entangled"
    return shape, ent


def classify_bases_d4(bases=None, tol=1e-10):
    """Counts of matrix shapes and entanglement over the 15 petal eigenbases of H(2) x H(2)."""
    if bases is None:
        group = build_group(4, "bipartite")
        bases = [petal_eigenbasis(p).columns for p in enumerate_petals(group)]
    shapes = {"computational": 0, "hadamard": 0, "sparse": 0}
    ents = {"maximally_entangled": 0, "product": 0, "partially_entangled": 0}
    for B in bases:
        s, e = classify_basis(getattr(B, "columns", B), tol)
        shapes[s] += 1
        ents[e] += 1
    return shapes, ents


# ---------------------------------------------------------------------------
# Table 1


def table1(d, seed=0, tol=1e-9, sic_tol=1e-12):
    """Rows (state, quantity, computed, expected, pass) for prime d in {2, 3, 5, 7}."""
    if d not in (2, 3, 5, 7):
        raise UnsupportedDimension(f"table 1 is reproduced for d in (2, 3, 5, 7), got {d}")
    group = build_group(d)
    mub = stabilizer_mubs(group)[0]
    exp = table1_expectations(d)
    states = {
        "stabilizer": stabilizer_states(group)[0],
        "alltop": alltop_vector(d, seed=seed),
        "sic": sic_fiducial(d, seed=seed),
    }
    rows = []
    for name, psi in states.items():
        fm, fs = float(pot.f_mus(mub, psi)), float(pot.f_sic(group, psi))
        em, es = exp[name]
        t = sic_tol if name == "sic" else tol
        rows.append((name, "f_mus", fm, float(em), abs(fm - float(em)) < t))
        rows.append((name, "f_sic", fs, float(es), abs(fs - float(es)) < t))
    return rows
