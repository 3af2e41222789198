import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "farstab",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("farstab")

PRIMES = (2, 3, 5, 7)


def random_state(d, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def hand_x(d):
    """Shift built entry by entry: X|k> = |k+1>."""
    X = np.zeros((d, d), dtype=complex)
    for k in range(d):
        X[(k + 1) % d, k] = 1
    return X


def hand_z(d):
    w = np.exp(2j * np.pi / d)
    return np.diag([w**k for k in range(d)])


def hand_displacements(d):
    """All d^2 operators X^i Z^j (phases irrelevant for |<D>|^2), identity first."""
    X, Z = hand_x(d), hand_z(d)
    mp = np.linalg.matrix_power
    return [mp(X, i) @ mp(Z, j) for i in range(d) for j in range(d)]


def hand_bipartite():
    X, Z = hand_x(2), hand_z(2)
    mp = np.linalg.matrix_power
    return [
        np.kron(mp(X, a) @ mp(Z, b), mp(X, c) @ mp(Z, e))
        for a in range(2)
        for b in range(2)
        for c in range(2)
        for e in range(2)
    ]


def hand_f_sic(ops, psi):
    d = len(psi)
    return sum((abs(np.vdot(psi, D @ psi)) ** 2 - 1 / (d + 1)) ** 2 for D in ops[1:])


def hand_f_mus(bases, psi):
    d = len(psi)
    total = 0.0
    for B in bases:
        p = [abs(np.vdot(B[:, i], psi)) ** 2 for i in range(d)]
        total += (sum(x * x for x in p) - 2 / (d + 1)) ** 2
    return total


@pytest.fixture(scope="session")
def groups():
    from farstab.algebra import build_group

    out = {d: build_group(d) for d in PRIMES}
    out["b4"] = build_group(4, "bipartite")
    return out


@pytest.fixture(scope="session")
def mubs(groups):
    from farstab.mubs import stabilizer_mubs

    return {k: stabilizer_mubs(g) for k, g in groups.items()}
