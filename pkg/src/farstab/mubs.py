"""
Maximal abelian subgroups (petals), flowers and stabilizer MUBs.

Petals are found purely from index arithmetic: for prime d they are the
d+1 lines through the origin of Z_d^2, for the bipartite group the 15
Lagrangian planes of Z_2^4. A flower is a set of petals partitioning the
nontrivial indices. Eigenbases come from character projectors, so the same
code serves every group kind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import FLOWER_DIMS, displacement, fix_phase, fidelity
from .errors import DegenerateProjector, UnsupportedDimension


@dataclass(frozen=True)
class Petal:
    group: object = field(repr=False, compare=False)
    members: tuple
    generators: tuple

    @property
    def dim(self):
        return self.group.dim


@dataclass(frozen=True)
class Flower:
    petals: tuple

    @property
    def group(self):
        return self.petals[0].group


@dataclass(frozen=True)
class Basis:
    dim: int
    columns: np.ndarray = field(repr=False)
    petal: Petal = None

    @property
    def matrix(self):
        return self.columns


@dataclass(frozen=True)
class MUBasisSet:
    bases: tuple
    labels: tuple = ()

    @property
    def dim(self):
        return self.bases[0].dim

    def stacked(self):
        """Array of shape (n_bases, d, d); ``[z, :, i]`` is basis vector i of basis z."""
        return np.array([b.columns for b in self.bases])


def _span(group, gens):
    """All nontrivial indices generated by ``gens``."""
    m = group.modulus
    out = set()
    for coeffs in itertools.product(range(m), repeat=len(gens)):
        v = [0] * len(gens[0])
        for c, g in zip(coeffs, gens):
            v = [(x + c * y) % m for x, y in zip(v, g)]
        out.add(tuple(v))
    out.discard(tuple([0] * len(gens[0])))
    return tuple(sorted(out))


def enumerate_petals(group):
    """Every maximal abelian subgroup, sorted by canonical generator order."""
    if group.kind == "single" and group.dim not in FLOWER_DIMS:
        raise UnsupportedDimension(f"H({group.dim}) has no flower")
    nontrivial = group.nontrivial_indices
    petals = {}
    if group.kind == "single":
        for g in nontrivial:
            members = _span(group, [g])
            petals.setdefault(members, (members[0],))
    else:
        for u, v in itertools.combinations(nontrivial, 2):
            if not group.commute(u, v):
                continue
            members = _span(group, [u, v])
            if len(members) == 3:
                petals.setdefault(members, (members[0], members[1]))
    out = [Petal(group, members, gens) for members, gens in petals.items()]
    out.sort(key=lambda p: p.generators)
    return out


def enumerate_flowers(group, petals=None):
    """Every partition of the nontrivial indices into petals."""
    petals = enumerate_petals(group) if petals is None else petals
    n_nontrivial = group.element_count - 1
    size = len(petals[0].members)
    k = n_nontrivial // size
    flowers = []
    for combo in itertools.combinations(range(len(petals)), k):
        seen = set()
        ok = True
        for i in combo:
            m = set(petals[i].members)
            if seen & m:
                ok = False
                break
            seen |= m
        if ok and len(seen) == n_nontrivial:
            flowers.append(Flower(tuple(petals[i] for i in combo)))
    return flowers


def _petal_representation(petal):
    """Generator operators rescaled so each satisfies G^n = 1 exactly."""
    group = petal.group
    n = group.modulus
    ops = []
    for g in petal.generators:
        G = displacement(group, g).copy()
        c = np.linalg.matrix_power(G, n)[0, 0]
        G *= np.exp(-1j * np.angle(c) / n)
        ops.append(G)
    return n, ops


def petal_eigenbasis(petal, tol=1e-8):
    """Joint eigenbasis of a petal via rank-1 character projectors.

    Columns are ordered by the character exponents of the generators and each
    column's first nonzero amplitude is made real positive.
    """
    d = petal.dim
    n, ops = _petal_representation(petal)
    order = n ** len(ops)
    powers = [[np.linalg.matrix_power(G, a) for a in range(n)] for G in ops]
    cols = []
    for chi in itertools.product(range(n), repeat=len(ops)):
        Pi = np.zeros((d, d), dtype=complex)
        for a in itertools.product(range(n), repeat=len(ops)):
            term = np.eye(d, dtype=complex)
            for G, ai in zip(powers, a):
                term = term @ G[ai]
            phase = np.exp(-2j * np.pi * sum(c * x for c, x in zip(chi, a)) / n)
            Pi += phase * term
        Pi /= order
        rank = np.real(np.trace(Pi))
        if abs(rank - 1) > tol:
            raise DegenerateProjector(f"projector rank {rank:.6f} for character {chi}")
        j = np.argmax(np.linalg.norm(Pi, axis=0))
        v = Pi[:, j] / np.linalg.norm(Pi[:, j])
        cols.append(fix_phase(v))
    return Basis(d, np.array(cols).T, petal)


def stabilizer_mub(flower):
    bases = tuple(petal_eigenbasis(p) for p in flower.petals)
    return MUBasisSet(bases, tuple(range(len(bases))))


def stabilizer_mubs(group):
    """One MUB per flower, in canonical flower order (a single MUB for prime d)."""
    return [stabilizer_mub(f) for f in enumerate_flowers(group)]


def stabilizer_states(group, tol=1e-8):
    """All petal eigenvectors, deduplicated by fidelity."""
    states = []
    for petal in enumerate_petals(group):
        for v in petal_eigenbasis(petal).columns.T:
            if not any(fidelity(v, s) > 1 - tol for s in states):
                states.append(v)
    return np.array(states)


def unbiasedness_report(mub):
    """Largest deviation of inter-basis |<e|f>|^2 from 1/d."""
    d = mub.dim
    B = mub.stacked()
    worst = 0.0
    for z1, z2 in itertools.combinations(range(len(B)), 2):
        ov = np.abs(B[z1].conj().T @ B[z2]) ** 2
        worst = max(worst, float(np.max(np.abs(ov - 1 / d))))
    return worst
