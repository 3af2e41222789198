"""
Frame potentials f_SIC and f_MUS, probability vectors and autocorrelations.

Every evaluator accepts a single state of shape ``(d,)`` or a batch of shape
``(n, d)``. Gradients are returned in complex form ``g = df/dRe + i df/dIm``;
:func:`gradient_f_sic` and :func:`gradient_f_mus` give the real
``(dRe, dIm)`` vector projected onto the tangent space of the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UnsupportedDimension

SATURATION_TOL = 1e-8
SPREAD_TOL = 1e-7


def _check_dim(dim, psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != dim:
        raise DimensionMismatch(f"state of length {psi.shape[-1]} for dimension {dim}")
    return psi


def _flat_ops(group):
    ops = group.nontrivial_operators
    n, d, _ = ops.shape
    return ops.reshape(n * d, d), n, d


def expectations(group, psi):
    """<psi|D_p|psi> for every nontrivial index p, shape (..., d^2 - 1)."""
    psi = _check_dim(group.dim, psi)
    flat, n, d = _flat_ops(group)
    batch = np.atleast_2d(psi)
    Dpsi = (batch @ flat.T).reshape(len(batch), n, d)
    e = np.einsum("ri,rni->rn", batch.conj(), Dpsi)
    return e if psi.ndim == 2 else e[0]


def squared_expectations(group, psi):
    """|<psi|D_p|psi>|^2 over nontrivial p; uses an FFT for single-kind groups."""
    psi = _check_dim(group.dim, psi)
    if group.kind != "single":
        return np.abs(expectations(group, psi)) ** 2
    d = group.dim
    batch = np.atleast_2d(psi)
    # <psi|X^i Z^j|psi> = sum_m conj(psi_{m+i}) psi_m w^{jm}
    rolled = np.stack([np.roll(batch, -i, axis=1) for i in range(d)], axis=1)
    a = rolled.conj() * batch[:, None, :]
    e2 = np.abs(np.fft.ifft(a, axis=2) * d) ** 2
    out = e2.reshape(len(batch), d * d)[:, 1:]
    return out if psi.ndim == 2 else out[0]


def f_sic(group, psi):
    """sum over nontrivial p of (|<psi|D_p|psi>|^2 - 1/(d+1))^2."""
    d = group.dim
    return np.sum((squared_expectations(group, psi) - 1 / (d + 1)) ** 2, axis=-1)


def f_sic_and_grad(group, psi):
    psi = _check_dim(group.dim, psi)
    d = group.dim
    flat, n, _ = _flat_ops(group)
    batch = np.atleast_2d(psi)
    Dpsi = (batch @ flat.T).reshape(len(batch), n, d)
    e = np.einsum("ri,rni->rn", batch.conj(), Dpsi)
    w = np.abs(e) ** 2 - 1 / (d + 1)
    val = np.sum(w**2, axis=1)
    # p and -p both appear, so the D^dagger term doubles the D term
    g = 8 * np.einsum("rn,rni->ri", w * e.conj(), Dpsi)
    if psi.ndim == 1:
        return val[0], g[0]
    return val, g


# ---------------------------------------------------------------------------
# MUB side


def _stack(mub):
    return mub.stacked() if hasattr(mub, "stacked") else np.asarray(mub)


def amplitudes(mub, psi):
    """<e_r^(z)|psi>, shape (..., n_bases, d)."""
    B = _stack(mub)
    psi = _check_dim(B.shape[1], psi)
    return np.einsum("zir,...i->...zr", B.conj(), psi)


def probability_vectors(mub, psi):
    return np.abs(amplitudes(mub, psi)) ** 2


def probability_vector(basis, psi):
    """p_i = |<e_i|psi>|^2 for one basis."""
    cols = basis.columns if hasattr(basis, "columns") else np.asarray(basis)
    psi = _check_dim(cols.shape[0], psi)
    return np.abs(psi @ cols.conj()) ** 2


def purities(mub, psi):
    """sum_r p_{r,(z)}^2 for every basis z."""
    return np.sum(probability_vectors(mub, psi) ** 2, axis=-1)


def purity_residuals(mub, psi):
    B = _stack(mub)
    return purities(B, psi) - 2 / (B.shape[1] + 1)


def f_mus(mub, psi):
    """sum_z (sum_r p_{r,(z)}^2 - 2/(d+1))^2."""
    return np.sum(purity_residuals(mub, psi) ** 2, axis=-1)


def purity_residuals_and_grads(mub, psi):
    """Residuals h_z of shape (n, Z) and complex gradients of shape (n, Z, d)."""
    B = _stack(mub)
    psi = _check_dim(B.shape[1], psi)
    batch = np.atleast_2d(psi)
    c = np.einsum("zir,ni->nzr", B.conj(), batch)
    p = np.abs(c) ** 2
    h = np.sum(p**2, axis=2) - 2 / (B.shape[1] + 1)
    g = 4 * np.einsum("nzr,zir->nzi", p * c, B)
    return h, g


def f_mus_and_grad(mub, psi):
    psi = np.asarray(psi, dtype=complex)
    h, gh = purity_residuals_and_grads(mub, psi)
    val = np.sum(h**2, axis=1)
    g = np.einsum("nz,nzi->ni", 2 * h, gh)
    if psi.ndim == 1:
        return val[0], g[0]
    return val, g


def _real_projected(psi, g):
    psi = np.asarray(psi, dtype=complex)
    g = g - np.real(np.sum(psi.conj() * g, axis=-1, keepdims=True)) * psi
    return np.concatenate([g.real, g.imag], axis=-1)


def gradient_f_sic(group, psi):
    """(dRe, dIm) of f_SIC with the radial component removed."""
    _, g = f_sic_and_grad(group, psi)
    return _real_projected(psi, g)


def gradient_f_mus(mub, psi):
    _, g = f_mus_and_grad(mub, psi)
    return _real_projected(psi, g)


# ---------------------------------------------------------------------------
# autocorrelations and the inequality


def autocorrelations(p):
    """Delta_k = sum_m p_m p_{m+k} for k = 1..(d-1)/2 (odd d only)."""
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    if d % 2 == 0:
        raise UnsupportedDimension("autocorrelations need odd d")
    return np.stack(
        [np.sum(p * np.roll(p, -k, axis=-1), axis=-1) for k in range(1, (d - 1) // 2 + 1)],
        axis=-1,
    )


def inequality_coefficient(d):
    return d * d / (d - 1)


@dataclass
class PotentialReport:
    dim: int
    f_sic: float
    f_mus_per_mub: list
    inequality_lhs: float
    inequality_rhs: float
    gap: float
    saturated: bool

    def to_dict(self):
        return {
            "dim": self.dim,
            "f_sic": self.f_sic,
            "f_mus_per_mub": list(self.f_mus_per_mub),
            "inequality_lhs": self.inequality_lhs,
            "inequality_rhs": self.inequality_rhs,
            "gap": self.gap,
            "saturated": self.saturated,
        }


def inequality_report(group, mub, psi, tol=SATURATION_TOL):
    """f_SIC >= d^2/(d-1) f_MUS for one MUB; ``mub`` may also be a list of MUBs."""
    mubs = mub if isinstance(mub, (list, tuple)) else [mub]
    fs = float(f_sic(group, psi))
    fm = [float(f_mus(m, psi)) for m in mubs]
    rhs = inequality_coefficient(group.dim) * fm[0]
    gap = fs - rhs
    return PotentialReport(group.dim, fs, fm, fs, rhs, gap, abs(gap) < tol)


def inequality_gaps(group, mub, psi):
    """Vectorised gap f_SIC - d^2/(d-1) f_MUS."""
    return f_sic(group, psi) - inequality_coefficient(group.dim) * f_mus(mub, psi)


def delta_spreads(mub, psi):
    """Per-basis spread max_k Delta_k - min_k Delta_k."""
    D = autocorrelations(probability_vectors(mub, psi))
    return D.max(axis=-1) - D.min(axis=-1)


def simplex_membership(group, mub, psi, tol=SPREAD_TOL):
    """True when every MU-plane projection of the orbit of ``psi`` is a regular simplex."""
    if group.dim % 2 == 0:
        raise UnsupportedDimension("simplex membership is defined for odd prime d")
    spreads = delta_spreads(mub, psi)
    return bool(np.all(spreads < tol)), spreads


# ---------------------------------------------------------------------------
# closed forms


def fs_average_f_sic(d):
    if d % 2:
        return d * (d - 1) / ((d + 2) * (d + 1))
    return d * d / ((d + 3) * (d + 1))


def fs_average_f_mus(d):
    return 4 * (d - 1) / ((d + 3) * (d + 2) * (d + 1))


def stabilizer_values(d):
    """(f_MUS, f_SIC) for stabilizer states in prime d."""
    return (d - 1) ** 2 / (d * (d + 1)), d * (d - 1) / (d + 1)


def alltop_values(d):
    return (d - 1) ** 2 / (d**3 * (d + 1)), (d - 1) / (d * (d + 1))
