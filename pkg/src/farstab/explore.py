"""
Fubini-Study sampling, Monte Carlo averages, scatter datasets and the
multi-start penalty optimizer every search in the package goes through.

The optimizer runs all restarts as one batch: projected gradient descent
on the unit sphere with a per-restart Armijo step, the quadratic penalty
weight escalating stage by stage. Candidates are then polished one by one
with scipy (BFGS without constraints, SLSQP with them).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sopt

from . import potentials as pot
from .algebra import build_group, normalize
from .errors import NoFeasiblePoint, UnknownAnchorState
from .mubs import stabilizer_mubs

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# sampling


def restart_rng(seed, counter):
    """Generator for task ``counter`` of master ``seed``; serial and parallel runs agree."""
    return np.random.default_rng([int(seed), int(counter)])


def random_states(rng, n, d):
    """``n`` Fubini-Study distributed unit vectors in C^d."""
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return normalize(z)


@dataclass
class Sampler:
    dim: int
    seed: int = 0
    counter: int = 0

    def state(self, counter):
        return random_states(restart_rng(self.seed, counter), 1, self.dim)[0]

    def __iter__(self):
        return self

    def __next__(self):
        psi = self.state(self.counter)
        self.counter += 1
        return psi


def sample_fs(sampler):
    return next(sampler)


def mc_average(functional, d, n, seed=0, chunk=100_000):
    """Mean and standard error of ``functional(batch)`` over ``n`` FS-random states.

    ``functional`` maps an ``(m, d)`` batch to ``m`` values.
    """
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    mean = m2 = 0.0
    done = 0
    k = 0
    while done < n:
        m = min(chunk, n - done)
        vals = np.asarray(functional(random_states(restart_rng(seed, k), m, d)), dtype=float)
        # merge chunk mean and squared deviations (Chan et al.)
        cm = vals.mean()
        delta = cm - mean
        mean += delta * m / (done + m)
        m2 += np.sum((vals - cm) ** 2) + delta**2 * done * m / (done + m)
        done += m
        k += 1
    var = m2 / (n - 1)
    return mean, np.sqrt(var / n)


def fs_functional(name, d, kind=None):
    """Batch callable for ``fsic`` or ``fmus``, as used by :func:`mc_average`.

    At d=4, ``fsic`` defaults to H(4) and ``fmus`` to the first stabilizer MUB
    of H(2) x H(2) (H(4) has no flower).
    """
    if name == "fsic":
        group = build_group(d, kind or "single")
        return lambda psi: pot.f_sic(group, psi)
    if name == "fmus":
        kind = kind or ("bipartite" if d == 4 else "single")
        mub = stabilizer_mubs(build_group(d, kind))[0]
        return lambda psi: pot.f_mus(mub, psi)
    raise ValueError(f"unknown functional {name!r}; expected 'fsic' or 'fmus'")


# ---------------------------------------------------------------------------
# functionals: callables mapping an (n, d) batch to (values, complex gradients)


class Functional:
    name = "functional"

    def __call__(self, psi):
        raise NotImplementedError

    def value(self, psi):
        return self(np.atleast_2d(psi))[0]


class FSic(Functional):
    def __init__(self, group, sign=1.0):
        self.group = group
        self.sign = sign
        self.name = "f_sic" if sign > 0 else "neg_f_sic"

    def __call__(self, psi):
        v, g = pot.f_sic_and_grad(self.group, psi)
        return self.sign * v, self.sign * g


class FMusSum(Functional):
    """Sum of f_MUS over a list of MUBs."""

    name = "f_mus_sum"

    def __init__(self, mubs):
        self.mubs = list(mubs)
        self.stacks = [m.stacked() for m in self.mubs]

    def __call__(self, psi):
        vals, grads = 0.0, 0.0
        for B in self.stacks:
            v, g = pot.f_mus_and_grad(B, psi)
            vals = vals + v
            grads = grads + g
        return vals, grads

    def components(self, psi):
        """Independent purity residuals and their complex gradients for one state.

        One residual per MUB is dropped: they always sum to zero.
        """
        hs, gs = [], []
        for B in self.stacks:
            h, g = pot.purity_residuals_and_grads(B, psi)
            hs.append(h[0, :-1])
            gs.append(g[0, :-1])
        return np.concatenate(hs), np.concatenate(gs)


class BalanceDefect(Functional):
    """sum_z |sort(p_z) - sort(p_0)|^2; the sort is held fixed when differentiating."""

    name = "balance_defect"

    def __init__(self, mub):
        self.mub = mub
        self.B = mub.stacked()

    def __call__(self, psi):
        psi = np.atleast_2d(psi)
        c = np.einsum("zir,ni->nzr", self.B.conj(), psi)
        p = np.abs(c) ** 2
        order = np.argsort(p, axis=2)
        q = np.take_along_axis(p, order, axis=2)
        diff = q - q[:, :1, :]
        val = np.sum(diff**2, axis=(1, 2))
        dq = 2 * diff
        dq[:, 0, :] = -np.sum(2 * diff[:, 1:, :], axis=1)
        dp = np.empty_like(dq)
        np.put_along_axis(dp, order, dq, axis=2)
        g = 2 * np.einsum("nzr,nzr,zir->ni", dp, c, self.B)
        return val, g


class ProfileMatch(Functional):
    """sum_p (|<psi|D_p|psi>|^2 - t_p)^2 for prescribed targets t_p."""

    name = "profile_match"

    def __init__(self, group, targets):
        self.group = group
        self.targets = np.asarray(targets, dtype=float)
        flat, n, d = pot._flat_ops(group)
        self.flat, self.n, self.d = flat, n, d

    def __call__(self, psi):
        psi = np.atleast_2d(psi)
        Dpsi = (psi @ self.flat.T).reshape(len(psi), self.n, self.d)
        e = np.einsum("ri,rni->rn", psi.conj(), Dpsi)
        w = np.abs(e) ** 2 - self.targets
        return np.sum(w**2, axis=1), 8 * np.einsum("rn,rni->ri", w * e.conj(), Dpsi)


class SmoothMax(Functional):
    """(sum_i f_i^k)^(1/k) over component functionals; a smooth stand-in for max_i f_i."""

    name = "smooth_max"

    def __init__(self, parts, k=8):
        self.parts = list(parts)
        self.k = k

    def __call__(self, psi):
        vals, grads = zip(*(f(psi) for f in self.parts))
        vals = np.maximum(np.array(vals), 1e-300)
        s = np.sum(vals**self.k, axis=0)
        out = s ** (1 / self.k)
        w = (vals / out) ** (self.k - 1)
        return out, np.einsum("fn,fni->ni", w, np.array(grads))


class Sum(Functional):
    name = "sum"

    def __init__(self, parts, weights=None):
        self.parts = list(parts)
        self.weights = [1.0] * len(self.parts) if weights is None else list(weights)

    def __call__(self, psi):
        vals, grads = 0.0, 0.0
        for w, f in zip(self.weights, self.parts):
            v, g = f(psi)
            vals = vals + w * v
            grads = grads + w * g
        return vals, grads


# ---------------------------------------------------------------------------
# problems and results


DEFAULT_SCHEDULE = tuple(10.0**k for k in range(6))


@dataclass
class OptimizationProblem:
    dim: int
    objective: Functional
    constraints: list = field(default_factory=list)
    frame: np.ndarray = None
    real: bool = False
    penalty_schedule: tuple = DEFAULT_SCHEDULE
    restarts: int = 1000
    max_iter: int = 400
    gtol: float = 1e-9
    residual_tol: float = 1e-10
    polish: int = None

    def __post_init__(self):
        if self.frame is not None:
            F = np.asarray(self.frame, dtype=complex)
            if F.shape[0] != self.dim:
                raise ValueError("frame has wrong ambient dimension")
            if not np.allclose(F.conj().T @ F, np.eye(F.shape[1]), atol=1e-12):
                raise ValueError("frame columns are not orthonormal")
            self.frame = F


@dataclass
class OptimizationResult:
    state: np.ndarray
    value: float
    residual: float
    converged: bool
    states: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    converged_mask: np.ndarray = field(repr=False)
    restarts: int = 0
    distinct_optima: int = 0

    def to_dict(self):
        return {
            "state": [[float(z.real), float(z.imag)] for z in self.state],
            "value": float(self.value),
            "residual": float(self.residual),
            "converged": bool(self.converged),
            "restarts": int(self.restarts),
            "distinct_optima": int(self.distinct_optima),
            "converged_count": int(np.sum(self.converged_mask)),
        }


def _tangent(x, g, real):
    if real:
        g = g.real.astype(complex)
    return g - np.real(np.sum(x.conj() * g, axis=1, keepdims=True)) * x


def descend(fun, x, real=False, gtol=1e-9, max_iter=400, c1=1e-4, shrink=0.5, max_halvings=50):
    """Batched projected gradient descent with Armijo backtracking.

    ``fun`` maps coordinates ``(n, m)`` to values ``(n,)`` and complex
    gradients ``(n, m)``. Each row keeps its own step size.
    """
    x = normalize(x)
    f, g = fun(x)
    g = _tangent(x, g, real)
    t = np.full(len(x), 0.1)
    gn2 = np.sum(np.abs(g) ** 2, axis=1)
    for _ in range(max_iter):
        todo = np.flatnonzero(gn2 > gtol**2)
        if len(todo) == 0:
            break
        for _ in range(max_halvings):
            xn = normalize(x[todo] - t[todo, None] * g[todo])
            fn, gn = fun(xn)
            ok = fn <= f[todo] - c1 * t[todo] * gn2[todo]
            if ok.any():
                acc = todo[ok]
                x[acc] = xn[ok]
                f[acc] = fn[ok]
                g[acc] = _tangent(xn[ok], gn[ok], real)
                gn2[acc] = np.sum(np.abs(g[acc]) ** 2, axis=1)
                t[acc] *= 2.0
            todo = todo[~ok]
            if len(todo) == 0:
                break
            t[todo] *= shrink
        else:
            # step collapsed; these rows are at a numerical stationary point
            gn2[todo] = 0.0
    return x, f


def _coords_fun(problem, fun):
    F = problem.frame
    if F is None:
        return fun

    def wrapped(c):
        v, g = fun(c @ F.T)
        return v, g @ F.conj()

    return wrapped


def _penalized(problem, mu):
    parts = [problem.objective] + list(problem.constraints)
    return Sum(parts, [1.0] + [mu] * len(problem.constraints))


def _to_state(problem, c):
    return c if problem.frame is None else c @ problem.frame.T


def _random_coords(problem, seed):
    m = problem.dim if problem.frame is None else problem.frame.shape[1]
    out = np.empty((problem.restarts, m), dtype=complex)
    for r in range(problem.restarts):
        rng = restart_rng(seed, r)
        if problem.real:
            out[r] = normalize(rng.standard_normal(m)).astype(complex)
        else:
            out[r] = random_states(rng, 1, m)[0]
    return out


def _pack(c, real):
    return c.real.copy() if real else np.concatenate([c.real, c.imag])


def _unpack(x, real, m):
    return x.astype(complex) if real else x[:m] + 1j * x[m:]


def _chain(problem, u, g_state):
    """Real gradient wrt the packed unnormalised coordinates."""
    F = problem.frame
    gc = g_state if F is None else F.conj().T @ g_state
    nrm = np.linalg.norm(u)
    chat = u / nrm
    gc = (gc - np.real(np.vdot(chat, gc)) * chat) / nrm
    return gc.real.copy() if problem.real else np.concatenate([gc.real, gc.imag])


def polish_one(problem, c0, maxiter=500):
    """Refine one candidate with scipy; returns normalised coordinates."""
    m = len(c0)
    real = problem.real

    def state_of(x):
        u = _unpack(x, real, m)
        return u, _to_state(problem, u / np.linalg.norm(u))

    def obj(x):
        u, psi = state_of(x)
        v, g = problem.objective(psi[None, :])
        return float(v[0]), _chain(problem, u, g[0])

    x0 = _pack(c0, real)
    if not problem.constraints:
        res = sopt.minimize(obj, x0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": maxiter})
        return normalize(_unpack(res.x, real, m))

    def cons(x):
        _, psi = state_of(x)
        return np.concatenate([f.components(psi[None, :])[0] for f in problem.constraints])

    def cons_jac(x):
        u, psi = state_of(x)
        rows = []
        for f in problem.constraints:
            _, gs = f.components(psi[None, :])
            rows.extend(_chain(problem, u, g) for g in gs)
        return np.array(rows)

    res = sopt.minimize(
        obj,
        x0,
        jac=True,
        method="SLSQP",
        constraints=[{"type": "eq", "fun": cons, "jac": cons_jac}],
        options={"ftol": 1e-14, "maxiter": maxiter},
    )
    return normalize(_unpack(res.x, real, m))


def _distinct_values(values, tol=1e-7):
    vals = np.sort(values[np.isfinite(values)])
    if len(vals) == 0:
        return 0
    return int(1 + np.sum(np.diff(vals) > tol))


def optimize(problem, seed=0):
    """Multi-start minimisation of ``problem.objective`` subject to its constraints."""
    coords = _random_coords(problem, seed)
    schedule = problem.penalty_schedule if problem.constraints else (0.0,)
    for mu in schedule:
        fun = _coords_fun(problem, _penalized(problem, mu))
        coords, _ = descend(fun, coords, problem.real, problem.gtol, problem.max_iter)

    def evaluate(c):
        psi = _to_state(problem, c)
        v = problem.objective(psi)[0]
        r = np.zeros(len(psi))
        for f in problem.constraints:
            r = np.maximum(r, np.abs(f(psi)[0]))
        return v, r

    values, residuals = evaluate(coords)
    n_polish = problem.restarts if problem.polish is None else min(problem.polish, problem.restarts)
    if n_polish:
        # polish the most promising restarts first
        score = values + np.where(residuals > 1e-6, np.inf, 0.0) if problem.constraints else values
        for r in np.argsort(score, kind="stable")[:n_polish]:
            try:
                c = polish_one(problem, coords[r])
            except (ValueError, np.linalg.LinAlgError):
                continue
            v, res = evaluate(c[None, :])
            better = res[0] <= max(residuals[r], problem.residual_tol) and v[0] <= values[r] + 1e-12
            if better or (problem.constraints and res[0] < residuals[r] and res[0] < problem.residual_tol):
                coords[r], values[r], residuals[r] = c, v[0], res[0]

    states = _to_state(problem, coords)
    if problem.constraints:
        conv = residuals < problem.residual_tol
        if not conv.any():
            raise NoFeasiblePoint(
                f"no restart reached constraint residual {problem.residual_tol:g} "
                f"(best {residuals.min():.3g})"
            )
    else:
        conv = np.ones(len(values), dtype=bool)
    order = np.lexsort((np.arange(len(values)), np.where(conv, values, np.inf)))
    best = order[0]
    return OptimizationResult(
        state=states[best],
        value=float(values[best]),
        residual=float(residuals[best]),
        converged=bool(conv[best]),
        states=states[order],
        values=values[order],
        residuals=residuals[order],
        converged_mask=conv[order],
        restarts=problem.restarts,
        distinct_optima=_distinct_values(values[conv]),
    )


def max_f_sic_on_mus(d, restarts=60, seed=0, polish=None):
    """Maximise f_SIC over minimum uncertainty states (f_MUS = 0) of prime d."""
    group = build_group(d)
    mubs = stabilizer_mubs(group)
    prob = OptimizationProblem(d, FSic(group, -1.0), [FMusSum(mubs)], restarts=restarts, polish=polish)
    return optimize(prob, seed=seed)


# ---------------------------------------------------------------------------
# Table 2 and the stingray

TABLE2_VALUES = (0.0, 0.0041666666, 0.0102012357, 0.01875, 0.046875, 0.075)


def table2(restarts=1000, seed=0, polish=50):
    """Minimum of sum_{i<=k} f_MUS^(i) over states in C^4, for k = 1..6."""
    group = build_group(4, "bipartite")
    mubs = stabilizer_mubs(group)
    out = []
    for k in range(1, 7):
        prob = OptimizationProblem(4, FMusSum(mubs[:k]), restarts=restarts, max_iter=600, polish=polish)
        out.append(optimize(prob, seed=seed + k))
    return out


def stingray_dataset(n, seed=0, pair=(0, 1)):
    """Rows (f_MUS^(i), f_MUS^(j)) for FS-random states in d=4."""
    group = build_group(4, "bipartite")
    mubs = stabilizer_mubs(group)
    psi = random_states(restart_rng(seed, 0), n, 4)
    i, j = pair
    return np.column_stack([pot.f_mus(mubs[i], psi), pot.f_mus(mubs[j], psi)])


def min_max_pair(i, j, restarts=20_000, seed=0, max_iter=300):
    """Smallest max(f_MUS^(i), f_MUS^(j)) found from ``restarts`` local searches."""
    group = build_group(4, "bipartite")
    mubs = stabilizer_mubs(group)
    fi, fj = FMusSum([mubs[i]]), FMusSum([mubs[j]])
    x = random_states(restart_rng(seed, 0), restarts, 4)
    x, _ = descend(SmoothMax([fi, fj]), x, gtol=1e-10, max_iter=max_iter)
    vals = np.maximum(fi(x)[0], fj(x)[0])
    k = int(np.argmin(vals))
    return float(vals[k]), x[k]


# ---------------------------------------------------------------------------
# scatter datasets


def parse_mixture(spec):
    """``"uniform:1,stabilizer:1,sic:1"`` -> [("uniform", 1.0), ...]."""
    out = []
    for part in spec.split(","):
        name, _, w = part.strip().partition(":")
        out.append((name.strip(), float(w) if w else 1.0))
    return out


def near(rng, anchor, n, eps):
    """``n`` states obtained by adding complex Gaussian noise of scale ``eps`` to ``anchor``."""
    anchor = np.asarray(anchor, dtype=complex)
    noise = rng.standard_normal((n, len(anchor))) + 1j * rng.standard_normal((n, len(anchor)))
    return normalize(anchor[None, :] + eps * noise / np.sqrt(2))


def scatter_dataset(d, n, mixture="uniform:1,stabilizer:1,sic:1", seed=0, eps=0.15, kind=None, mub_index=0):
    """Rows (f_mus, f_sic, anchor label) for a mixture of random and near-anchor states.

    Components are ``uniform`` or the name of an anchor state from
    :func:`farstab.states.anchor_states`. For d=4 the bipartite group is used and
    ``mub_index`` picks the stabilizer MUB.
    """
    from .states import anchor_states

    kind = kind or ("bipartite" if d == 4 else "single")
    group = build_group(d, kind)
    mub = stabilizer_mubs(group)[mub_index]
    mix = parse_mixture(mixture) if isinstance(mixture, str) else list(mixture)
    anchors = None
    weights = np.array([w for _, w in mix], dtype=float)
    counts = np.floor(n * weights / weights.sum()).astype(int)
    counts[0] += n - counts.sum()
    fm, fs, labels = [], [], []
    for k, ((name, _), m) in enumerate(zip(mix, counts)):
        rng = restart_rng(seed, k)
        if name == "uniform":
            psi = random_states(rng, m, d)
        else:
            if anchors is None:
                anchors = anchor_states(group, seed=seed)
            if name not in anchors:
                raise UnknownAnchorState(name)
            psi = near(rng, anchors[name], m, eps)
        fm.append(pot.f_mus(mub, psi))
        fs.append(pot.f_sic(group, psi))
        labels.extend([name] * m)
    return np.concatenate(fm), np.concatenate(fs), labels


def boundary_segment(group, mub, n_theta=200, basis_pair=((0, 0), (0, 1))):
    """cos(t) e + sin(t) f for two orthogonal stabilizer states e, f of one basis."""
    B = mub.stacked()
    (z1, i1), (z2, i2) = basis_pair
    e, f = B[z1][:, i1], B[z2][:, i2]
    if abs(np.vdot(e, f)) > 1e-10:
        raise ValueError("boundary segment needs two orthogonal stabilizer states (same basis, distinct vectors)")
    theta = np.linspace(0, np.pi / 4, n_theta)
    psi = np.cos(theta)[:, None] * e + np.sin(theta)[:, None] * f
    return theta, pot.f_mus(mub, psi), pot.f_sic(group, psi)
