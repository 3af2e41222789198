"""
Special states: SIC fiducials, Alltop vectors, MUB-balanced states.

Only a few of these have closed forms (d=2 SIC, the d=3 SIC family, the
cubic-phase Alltop vectors for primes d >= 5); everything else is found
variationally through :func:`farstab.explore.optimize`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import potentials as pot
from .algebra import build_group, fidelity, fix_phase, negative_parity_basis
from .errors import IncompleteSet, SearchFailure, UnsupportedDimension
from .explore import BalanceDefect, FMusSum, FSic, OptimizationProblem, ProfileMatch, optimize
from .mubs import enumerate_petals, stabilizer_mubs, stabilizer_states

DEDUPE_TOL = 1e-8


@dataclass
class NamedState:
    label: str
    dim: int
    vector: np.ndarray
    expected_f_sic: Fraction = None
    expected_f_mus: Fraction = None


def dedupe(states, tol=DEDUPE_TOL):
    """Drop states whose fidelity with an earlier one exceeds ``1 - tol``."""
    out = []
    for s in states:
        if not any(fidelity(s, t) > 1 - tol for t in out):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# predicates


def balance_defect(mub, psi):
    """sum_z |sort(p_z) - sort(p_0)|^2; zero exactly for MUB-balanced states."""
    p = np.sort(pot.probability_vectors(mub, psi), axis=-1)
    return np.sum((p - p[..., :1, :]) ** 2, axis=(-1, -2))


def parity_residual(group, psi):
    """min over the d^2 displaced parities P_p of ||P_p psi + psi||; zero iff psi has negative parity about some point."""
    from .algebra import displaced_parities

    PP = displaced_parities(group)
    return float(np.min(np.linalg.norm(PP @ psi + psi, axis=-1)))


def is_mus(mub, psi, tol=1e-8):
    return bool(np.all(np.abs(pot.purity_residuals(mub, psi)) < tol))


# ---------------------------------------------------------------------------
# SIC fiducials


def sic_fiducial_d3(sigma):
    """(0, 1, -e^{i sigma}) / sqrt(2), sigma clamped to [0, pi/3]."""
    sigma = float(np.clip(sigma, 0.0, 2 * np.pi / 6))
    return np.array([0.0, 1.0, -np.exp(1j * sigma)]) / np.sqrt(2)


def _sic_d2():
    # Bloch vector (1, 1, 1)/sqrt(3)
    theta = np.arccos(1 / np.sqrt(3))
    return np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])


def sic_fiducial(d, restarts=200, seed=0, tol=1e-12):
    """A Weyl-Heisenberg SIC fiducial in prime d <= 7, by multi-start minimisation of f_SIC."""
    if d not in (2, 3, 5, 7):
        raise UnsupportedDimension(f"SIC search is provided for d in (2, 3, 5, 7), got {d}")
    group = build_group(d)
    if d == 2:
        return _sic_d2()
    prob = OptimizationProblem(d, FSic(group), restarts=restarts, polish=min(restarts, 20), max_iter=300)
    res = optimize(prob, seed=seed)
    if res.value >= tol:
        raise SearchFailure(f"best f_SIC {res.value:.3g} after {restarts} restarts")
    return fix_phase(res.state)


# ---------------------------------------------------------------------------
# Alltop vectors


def alltop_fiducial(d):
    """Amplitudes w^{k^3} / sqrt(d) for a prime d >= 5."""
    if d < 5 or d % 2 == 0 or d not in (5, 7, 11, 13, 17, 19):
        raise UnsupportedDimension(f"cubic Alltop vector needs a prime d >= 5, got {d}")
    k = np.arange(d)
    return np.exp(2j * np.pi * (k**3 % d) / d) / np.sqrt(d)


def alltop_profile(group, petal_index=0):
    """Target |<psi|D_p|psi>|^2: zero on one petal, 1/d on every other nontrivial index."""
    petal = enumerate_petals(group)[petal_index]
    members = set(petal.members)
    return np.array([0.0 if idx in members else 1 / group.dim for idx in group.nontrivial_indices])


def alltop_fiducial_profile(d, restarts=100, seed=0, tol=1e-20):
    """Fiducial whose H(d) orbit forms d MU bases, all unbiased to the computational basis.

    Found by matching the Alltop expectation profile; used where no cubic
    closed form exists (d = 2, 3).
    """
    group = build_group(d)
    prob = OptimizationProblem(d, ProfileMatch(group, alltop_profile(group)), restarts=restarts, polish=10)
    res = optimize(prob, seed=seed)
    if res.value > tol:
        raise SearchFailure(f"profile mismatch {res.value:.3g}")
    return fix_phase(res.state)


def alltop_fiducial_d3(restarts=100, seed=0):
    return alltop_fiducial_profile(3, restarts=restarts, seed=seed)


def alltop_vector(d, seed=0):
    """Alltop fiducial for any prime d: exact for d=2 and d >= 5, variational for d=3."""
    if d == 2:
        # Bloch vector (1, 1, 0)/sqrt(2): unbiased to Z, overlap 1/2 with X and Y
        return np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    if d == 3:
        return alltop_fiducial_d3(seed=seed)
    return alltop_fiducial(d)


def alltop_fiducial_d4(restarts=200, seed=0):
    """Minimiser of the summed f_MUS over all six stabilizer MUBs of H(2) x H(2)."""
    group = build_group(4, "bipartite")
    mubs = stabilizer_mubs(group)
    prob = OptimizationProblem(4, FMusSum(mubs), restarts=restarts, polish=10, max_iter=600)
    res = optimize(prob, seed=seed)
    if abs(res.value - 3 / 40) > 1e-8:
        raise SearchFailure(f"summed f_MUS {res.value:.10f}, expected 3/40")
    return fix_phase(res.state)


def orbit(group, psi):
    """D_p psi for every index p (identity first)."""
    return np.einsum("nij,j->ni", group.operators, psi)


def orbit_bases(group, psi, tol=1e-8):
    """Split the group orbit of ``psi`` into orthonormal bases.

    Returns the list of bases (arrays of shape (d, d), columns are vectors)
    and the largest deviation of inter-basis overlaps from 1/d.
    """
    d = group.dim
    V = orbit(group, psi)
    ov = np.abs(V.conj() @ V.T) ** 2
    unused = list(range(len(V)))
    bases = []
    while unused:
        i = unused.pop(0)
        block = [i] + [j for j in unused if ov[i, j] < tol]
        if len(block) != d or any(ov[a, b] > tol for a in block for b in block if a != b):
            return bases, np.inf
        unused = [j for j in unused if j not in block]
        bases.append(V[block].T)
    dev = 0.0
    for a in range(len(bases)):
        for b in range(a + 1, len(bases)):
            x = np.abs(bases[a].conj().T @ bases[b]) ** 2
            dev = max(dev, float(np.max(np.abs(x - 1 / d))))
    return bases, dev


# ---------------------------------------------------------------------------
# MUB-balanced states


def find_mub_balanced(d, restarts=None, seed=0, tol=1e-10, expected=None):
    """MUB-balanced states found by minimising the balance defect.

    Odd d (3 mod 4): the search runs inside the negative-parity eigenspace of
    the parity operator about the origin. d=4: unrestricted search, balanced
    with respect to the first stabilizer MUB.
    """
    if d == 4:
        group = build_group(4, "bipartite")
        frame = None
        restarts = 200 if restarts is None else restarts
    elif d in (3, 7, 11, 19):
        group = build_group(d)
        frame = negative_parity_basis(d)
        restarts = 2000 if restarts is None else restarts
    else:
        raise UnsupportedDimension(f"no MUB-balanced search for d={d}")
    mub = stabilizer_mubs(group)[0]
    if frame is not None and frame.shape[1] == 1:
        return [fix_phase(frame[:, 0])]
    prob = OptimizationProblem(d, BalanceDefect(mub), frame=frame, restarts=restarts, max_iter=600)
    res = optimize(prob, seed=seed)
    good = res.states[res.values < tol]
    if len(good) == 0:
        raise SearchFailure(f"no balanced state below defect {tol:g}; best {res.values.min():.3g}")
    out = [fix_phase(s) for s in dedupe(good)]
    if expected is None and d % 4 == 3:
        expected = d * (d - 1) // 2 if d > 3 else 1
    if expected is not None and len(out) < expected:
        warnings.warn(f"found {len(out)} of {expected} balanced states", IncompleteSet, stacklevel=2)
    return out


# ---------------------------------------------------------------------------
# catalog


def table1_expectations(d):
    F = Fraction
    return {
        "stabilizer": (F((d - 1) ** 2, d * (d + 1)), F(d * (d - 1), d + 1)),
        "alltop": (F((d - 1) ** 2, d**3 * (d + 1)), F(d - 1, d * (d + 1))),
        "sic": (F(0), F(0)),
    }


def catalog(d, seed=0):
    """Named special states of prime d with their expected (f_MUS, f_SIC) where known."""
    group = build_group(d)
    exp = table1_expectations(d)
    out = [NamedState("stabilizer", d, stabilizer_states(group)[0], exp["stabilizer"][1], exp["stabilizer"][0])]
    out.append(NamedState("alltop", d, alltop_vector(d, seed=seed), exp["alltop"][1], exp["alltop"][0]))
    if d in (2, 3, 5, 7):
        out.append(NamedState("sic", d, sic_fiducial(d, seed=seed), exp["sic"][1], exp["sic"][0]))
    if d == 3:
        out.append(NamedState("mub_balanced", d, sic_fiducial_d3(0.0), Fraction(0), Fraction(0)))
    if d == 7:
        psi = find_mub_balanced(7, restarts=50, seed=seed, expected=0)[0]
        out.append(NamedState("mub_balanced", d, psi, Fraction(7, 8), Fraction(0)))
    return out


def anchor_states(group, seed=0):
    """Anchors for the scatter datasets, keyed by name."""
    d = group.dim
    anchors = {"stabilizer": stabilizer_states(group)[0]}
    if group.kind == "bipartite":
        anchors["alltop"] = alltop_fiducial_d4(restarts=50, seed=seed)
        anchors["mub_balanced"] = find_mub_balanced(4, restarts=50, seed=seed)[0]
        return anchors
    for s in catalog(d, seed=seed):
        anchors[s.label] = s.vector
    return anchors

