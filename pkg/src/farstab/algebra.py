"""
Finite Heisenberg groups, parity and order-3 Clifford (Zauner) unitaries.

Two group kinds are supported:

* ``single``: the Weyl-Heisenberg group H(d), generated by
  the clock ``Z|k> = w^k |k>`` and shift ``X|k> = |k+1>``.
* ``bipartite``: the two-qubit group H(2) x H(2) acting on C^4.

Single-kind groups exist for the primes up to 19 and for d=4 (H(4), which
carries f_SIC but has no flower).

Displacement indices are plain integer tuples, ``(i, j)`` for the single
kind and ``(a, b, c, e)`` (first qubit ``(a, b)``, second ``(c, e)``) for
the bipartite kind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstructionFailure,
    IndexOutOfRange,
    UnsupportedDimension,
)

SINGLE_DIMS = (2, 3, 4, 5, 7, 11, 13, 17, 19)
# H(4) is available for frame-potential work only; it has no flower
FLOWER_DIMS = (2, 3, 5, 7, 11, 13, 17, 19)
BIPARTITE_DIMS = (4,)

ATOL_ALGEBRA = 1e-12
ATOL_UNITARY = 1e-10


# ---------------------------------------------------------------------------
# small helpers


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def fidelity(psi, phi):
    """|<psi|phi>|^2, broadcasting over leading axes."""
    return np.abs(np.sum(np.conj(psi) * phi, axis=-1)) ** 2


def same_state(psi, phi, tol=1e-8):
    return bool(fidelity(psi, phi) > 1 - tol)


def fix_phase(psi, tol=1e-9):
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    psi = np.asarray(psi, dtype=complex)
    nz = np.flatnonzero(np.abs(psi) > tol)
    if len(nz) == 0:
        return psi
    a = psi[nz[0]]
    return psi * (np.abs(a) / a)


def is_unitary(U, atol=ATOL_UNITARY):
    U = np.asarray(U)
    return np.allclose(U @ U.conj().T, np.eye(U.shape[0]), atol=atol, rtol=0)


def matrix_to_json(M):
    """Row-major nested lists of ``[re, im]`` pairs."""
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(M)]


def matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def shift(d):
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d):
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def is_prime(n):
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


# ---------------------------------------------------------------------------
# the group


@dataclass(frozen=True)
class HeisenbergGroup:
    dim: int
    kind: str
    omega: complex
    generators: tuple
    indices: tuple = field(repr=False)
    operators: np.ndarray = field(repr=False)

    @property
    def element_count(self):
        return len(self.indices)

    @property
    def nontrivial_indices(self):
        return self.indices[1:]

    @property
    def nontrivial_operators(self):
        return self.operators[1:]

    @property
    def modulus(self):
        return 2 if self.kind == "bipartite" else self.dim

    def canonical(self, idx):
        idx = tuple(int(v) for v in idx)
        n = 4 if self.kind == "bipartite" else 2
        if len(idx) != n:
            raise IndexOutOfRange(f"index {idx} has wrong length for {self.kind} group")
        return tuple(v % self.modulus for v in idx)

    def position(self, idx):
        return self._lookup[self.canonical(idx)]

    def compose(self, a, b):
        """Index of D_a D_b, up to phase."""
        return tuple((x + y) % self.modulus for x, y in zip(self.canonical(a), self.canonical(b)))

    def symplectic(self, a, b):
        """Exponent s with D_a D_b = w^s D_b D_a (w = e^{2 pi i / modulus})."""
        a, b = self.canonical(a), self.canonical(b)
        m = self.modulus
        if self.kind == "bipartite":
            return (a[1] * b[0] - a[0] * b[1] + a[3] * b[2] - a[2] * b[3]) % m
        return (a[1] * b[0] - a[0] * b[1]) % m

    def commute(self, a, b):
        return self.symplectic(a, b) == 0

    def __post_init__(self):
        object.__setattr__(self, "_lookup", {idx: n for n, idx in enumerate(self.indices)})


def build_group(d, kind="single"):
    """Construct H(d) (``kind='single'``) or H(2) x H(2) (``kind='bipartite'``, d=4)."""
    if kind == "single":
        if d not in SINGLE_DIMS:
            raise UnsupportedDimension(f"single-kind group not supported for d={d}")
        X, Z = shift(d), clock(d)
        indices = tuple(itertools.product(range(d), repeat=2))
        generators = (X, Z)
    elif kind == "bipartite":
        if d not in BIPARTITE_DIMS:
            raise UnsupportedDimension(f"bipartite group only exists here for d=4, got {d}")
        X, Z = shift(2), clock(2)
        I2 = np.eye(2, dtype=complex)
        generators = (np.kron(X, I2), np.kron(Z, I2), np.kron(I2, X), np.kron(I2, Z))
        indices = tuple(itertools.product(range(2), repeat=4))
    else:
        raise UnsupportedDimension(f"unknown group kind {kind!r}")
    omega = np.exp(2j * np.pi / d)
    ops = np.array([_displacement_matrix(d, kind, idx) for idx in indices])
    return HeisenbergGroup(d, kind, omega, generators, indices, ops)


def _displacement_matrix(d, kind, idx):
    if kind == "bipartite":
        a, b, c, e = idx
        X, Z = shift(2), clock(2)
        mp = np.linalg.matrix_power
        return np.kron(mp(X, a) @ mp(Z, b), mp(X, c) @ mp(Z, e))
    i, j = idx
    # X^i Z^j |k> = w^{jk} |k+i>
    k = np.arange(d)
    M = np.zeros((d, d), dtype=complex)
    M[(k + i) % d, k] = np.exp(2j * np.pi * j * k / d)
    if d % 2:
        half = pow(2, -1, d)
        M *= np.exp(2j * np.pi * (half * i * j % d) / d)
    return M


def displacement(group, idx):
    """D_ij = w^{ij/2} X^i Z^j (odd d), bare X^i Z^j products otherwise."""
    n = 4 if group.kind == "bipartite" else 2
    idx = tuple(idx)
    if len(idx) != n or any(not 0 <= v < group.modulus for v in idx):
        raise IndexOutOfRange(f"index {idx} out of range for {group.kind} group of dim {group.dim}")
    return group.operators[group.position(idx)]


# ---------------------------------------------------------------------------
# parity


def _require_odd_prime(d):
    if d % 2 == 0 or not is_prime(d):
        raise UnsupportedDimension(f"need an odd prime dimension, got {d}")


def parity_operator(d):
    """P|k> = |-k mod d>."""
    _require_odd_prime(d)
    k = np.arange(d)
    P = np.zeros((d, d))
    P[(-k) % d, k] = 1.0
    return P


def negative_parity_basis(d):
    """Columns (|k> - |d-k>)/sqrt(2), k = 1..(d-1)/2."""
    _require_odd_prime(d)
    m = (d - 1) // 2
    B = np.zeros((d, m), dtype=complex)
    for k in range(1, m + 1):
        B[k, k - 1] = 1 / np.sqrt(2)
        B[d - k, k - 1] = -1 / np.sqrt(2)
    return B


def displaced_parities(group):
    """All d^2 parity operators D_p P D_p^dagger."""
    P = parity_operator(group.dim)
    return np.einsum("nij,jk,nlk->nil", group.operators, P, group.operators.conj())


# ---------------------------------------------------------------------------
# order-3 Clifford unitaries

ZAUNER_SYMPLECTIC = ((0, -1), (1, -1))


@dataclass(frozen=True)
class ZaunerUnitary:
    dim: int
    symplectic: tuple
    matrix: np.ndarray = field(repr=False)
    phase: float
    eigenvalues: tuple
    eigenspaces: tuple = field(repr=False)

    @property
    def largest_eigenspace(self):
        return self.eigenspaces[0]

    def index_image(self, idx):
        (a, b), (c, e) = self.symplectic
        i, j = idx
        return ((a * i + b * j) % self.dim, (c * i + e * j) % self.dim)


def clifford_unitary(group, S):
    """Unitary U (up to phase) with U D_p U^dagger = D_{Sp} for a symplectic S mod d.

    Solved as the one-dimensional common null space of ``U D_p - D_{Sp} U``
    for the two generating displacements.
    """
    d = group.dim
    S = np.asarray(S, dtype=int) % d
    if round(np.linalg.det(S)) % d != 1:
        raise ConstructionFailure(f"matrix {S.tolist()} is not symplectic mod {d}")
    blocks = []
    I = np.eye(d)
    for p in ((1, 0), (0, 1)):
        Dp = displacement(group, p)
        Dsp = displacement(group, tuple(S @ np.array(p) % d))
        # row-major vec: vec(A U) = (A kron I) vec U, vec(U B) = (I kron B^T) vec U
        blocks.append(np.kron(Dsp, I) - np.kron(I, Dp.T))
    M = np.vstack(blocks)
    _, s, vh = np.linalg.svd(M)
    if s[-2] < 1e-6:
        raise ConstructionFailure("intertwiner is not unique")
    U = vh[-1].conj().reshape(d, d)
    U /= np.sqrt(np.real(np.trace(U @ U.conj().T)) / d)
    return U


def zauner_unitary(d, symplectic=ZAUNER_SYMPLECTIC, atol=1e-8):
    """Order-3 Clifford unitary for the given order-3 symplectic matrix.

    The overall phase is fixed so that ``U^3 = 1`` and the largest eigenspace
    has eigenvalue 1. Eigenspaces are returned largest first as column frames.
    """
    _require_odd_prime(d)
    group = build_group(d)
    S = np.asarray(symplectic, dtype=int) % d
    if not np.array_equal(np.linalg.matrix_power(S, 3) % d, np.eye(2, dtype=int)):
        raise ConstructionFailure(f"{S.tolist()} does not have order 3 mod {d}")
    U = clifford_unitary(group, S)
    U3 = np.linalg.matrix_power(U, 3)
    phase = float(np.angle(U3[0, 0]))
    if not np.allclose(U3, U3[0, 0] * np.eye(d), atol=1e-10):
        raise ConstructionFailure("U^3 is not proportional to the identity")
    U = U * np.exp(-1j * phase / 3)

    # group eigenvectors by cube root of unity
    vals, vecs = np.linalg.eig(U)
    labels = np.round(np.angle(vals) / (2 * np.pi / 3)).astype(int) % 3
    spaces = []
    for lab in range(3):
        cols = vecs[:, labels == lab]
        if cols.shape[1]:
            q, _ = np.linalg.qr(cols)
            spaces.append((lab, q))
    spaces.sort(key=lambda t: (-t[1].shape[1], t[0]))
    top = spaces[0][0]
    # rotate so the largest eigenspace carries eigenvalue 1
    rot = np.exp(-2j * np.pi * top / 3)
    U = U * rot
    spaces = [((lab - top) % 3, q) for lab, q in spaces]

    for idx in group.nontrivial_indices:
        D = displacement(group, idx)
        img = displacement(group, tuple(S @ np.array(idx) % d))
        C = U @ D @ U.conj().T
        k = np.argmax(np.abs(img[:, 0]))
        ph = C[k, 0] / img[k, 0]
        if not np.allclose(C, ph * img, atol=atol):
            raise ConstructionFailure(f"conjugation check failed at index {idx}")

    return ZaunerUnitary(
        dim=d,
        symplectic=tuple(tuple(int(v) for v in row) for row in S),
        matrix=U,
        phase=phase,
        eigenvalues=tuple(np.exp(2j * np.pi * lab / 3) for lab, _ in spaces),
        eigenspaces=tuple(q for _, q in spaces),
    )
