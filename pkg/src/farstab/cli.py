"""
Command-line front end.

    farstab mub dump --dim 5 --flower 0
    farstab potentials eval --dim 7 --state psi.json
    farstab states catalog --dim 5
    farstab states balanced --dim 7 --restarts 2000 --seed 0 --out balanced.csv
    farstab explore scatter --dim 5 --n 60000 --mix uniform:1,stabilizer:1,sic:1 --out fig2.csv
    farstab explore optimize --spec problem.json --out result.json
    farstab explore fs-average --dim 3 --n 1000000 --functional fsic
    farstab analysis zauner-map --grid 400 --out map.csv
    farstab analysis graph --in balanced.csv --tol 1e-8 --out graph.json
    farstab analysis table1 --dim 7
    farstab analysis classify-d4
    farstab reproduce --table 2 --restarts 1000 --seed 7

Every run echoes its effective configuration as one JSON line on stderr.
Exit status: 0 success, 1 a check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import potentials as pot
from .errors import (
    DimensionMismatch,
    IncompleteSet,
    IndexOutOfRange,
    NoFeasiblePoint,
    SearchFailure,
    UnknownAnchorState,
    UnsupportedDimension,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


class CheckFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration and output helpers

@dataclass
class RunConfig:
    command: str
    dim: int = None
    kind: str = None
    seed: int = 0
    restarts: int = None
    out: str = None
    options: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def csv_text(header, rows):
    """CSV with a header row; floats carry 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def state_columns(d):
    return [f"re{k}" for k in range(d)] + [f"im{k}" for k in range(d)]


def state_row(psi):
    return [float(v) for v in np.real(psi)] + [float(v) for v in np.imag(psi)]


def read_states_csv(path):
    """Rows of ``re0..re{d-1}, im0..im{d-1}`` (other columns ignored) as complex vectors."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{path}: no states")
    d = sum(1 for k in rows[0] if k.startswith("re") and k[2:].isdigit())
    if d == 0:
        raise ConfigError(f"{path}: expected columns re0.., im0..")
    return np.array([[float(r[f"re{k}"]) + 1j * float(r[f"im{k}"]) for k in range(d)] for r in rows])


def read_state(path, d):
    """A state from JSON (list of [re, im] pairs, or {"amplitudes": [...]}) or a one-row CSV."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"state file {path} not found")
    if path.suffix == ".csv":
        psi = read_states_csv(path)[0]
    else:
        data = json.loads(path.read_text())
        if isinstance(data, dict):
            data = data.get("amplitudes", data.get("state"))
        psi = np.array([complex(*z) if isinstance(z, list) else complex(z) for z in data])
    if d is not None and len(psi) != d:
        raise ConfigError(f"state has {len(psi)} amplitudes, --dim is {d}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1) > 1e-8:
        raise ConfigError(f"state norm {nrm:.12g} is not 1")
    return psi / nrm


class Summary:
    """PASS/FAIL lines for a reproduction."""

    def __init__(self):
        self.lines = []
        self.failed = []

    def check(self, name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        self.lines.append(line)
        print(line, flush=True)
        if not ok:
            self.failed.append(line)
        return ok

    def text(self):
        return "\n".join(self.lines) + "\n"


# ---------------------------------------------------------------------------
# mub / potentials / states


def cmd_mub_dump(cfg):
    from .algebra import build_group, matrix_to_json
    from .mubs import enumerate_flowers, stabilizer_mub, unbiasedness_report

    group = build_group(cfg.dim, cfg.kind or ("bipartite" if cfg.dim == 4 else "single"))
    flowers = enumerate_flowers(group)
    k = cfg.options["flower"]
    if not 0 <= k < len(flowers):
        raise ConfigError(f"--flower must lie in [0, {len(flowers)}), got {k}")
    mub = stabilizer_mub(flowers[k])
    out = {
        "dim": group.dim,
        "kind": group.kind,
        "flower": k,
        "flower_count": len(flowers),
        "petals": [[list(m) for m in b.petal.members] for b in mub.bases],
        "bases": [matrix_to_json(b.columns) for b in mub.bases],
        "unbiasedness_deviation": unbiasedness_report(mub),
    }
    emit(dumps(out), cfg.out)


def _group_and_mubs(d, kind):
    from .algebra import build_group
    from .mubs import stabilizer_mubs

    kind = kind or ("bipartite" if d == 4 else "single")
    group = build_group(d, kind)
    return group, stabilizer_mubs(group)


def cmd_potentials_eval(cfg):
    group, mubs = _group_and_mubs(cfg.dim, cfg.kind)
    psi = read_state(cfg.options["state"], cfg.dim)
    rep = pot.inequality_report(group, mubs, psi).to_dict()
    rep["kind"] = group.kind
    rep["inequality_coefficient"] = pot.inequality_coefficient(group.dim)
    if group.dim % 2:
        rep["delta_spreads"] = pot.delta_spreads(mubs[0], psi)
    emit(dumps(rep), cfg.out)


def cmd_states_catalog(cfg):
    from .states import anchor_states, catalog

    d = cfg.dim
    group, mubs = _group_and_mubs(d, cfg.kind)
    entries = []
    if group.kind == "bipartite":
        named = [(k, v, None, None) for k, v in anchor_states(group, seed=cfg.seed).items()]
    else:
        named = [(s.label, s.vector, s.expected_f_sic, s.expected_f_mus) for s in catalog(d, seed=cfg.seed)]
    for label, psi, es, em in named:
        entries.append(
            {
                "label": label,
                "amplitudes": [[float(z.real), float(z.imag)] for z in psi],
                "f_sic": float(pot.f_sic(group, psi)),
                "f_mus": [float(pot.f_mus(m, psi)) for m in mubs],
                "expected_f_sic": None if es is None else str(es),
                "expected_f_mus": None if em is None else str(em),
            }
        )
    emit(dumps({"dim": d, "kind": group.kind, "states": entries}), cfg.out)


def balanced_rows(d, restarts, seed):
    from .states import balance_defect, find_mub_balanced

    group, mubs = _group_and_mubs(d, None)
    states = find_mub_balanced(d, restarts=restarts, seed=seed)
    header = ["index"] + state_columns(d) + ["defect", "f_sic", "f_mus"]
    rows = [
        [i] + state_row(s) + [float(balance_defect(mubs[0], s)), float(pot.f_sic(group, s)), float(pot.f_mus(mubs[0], s))]
        for i, s in enumerate(states)
    ]
    return states, csv_text(header, rows)


def cmd_states_balanced(cfg):
    _, text = balanced_rows(cfg.dim, cfg.restarts, cfg.seed)
    emit(text, cfg.out)


# ---------------------------------------------------------------------------
# explore


def scatter_text(fm, fs, labels):
    return csv_text(["f_mus", "f_sic", "anchor"], zip(fm.tolist(), fs.tolist(), labels))


def cmd_explore_scatter(cfg):
    from .explore import scatter_dataset

    o = cfg.options
    fm, fs, labels = scatter_dataset(
        cfg.dim, o["n"], o["mix"], seed=cfg.seed, eps=o["eps"], kind=cfg.kind, mub_index=o["mub"]
    )
    emit(scatter_text(fm, fs, labels), cfg.out)


def build_problem(cfg):
    """OptimizationProblem from the problem options (see ``explore optimize --help``)."""
    from .algebra import negative_parity_basis
    from .analysis import real_zauner_frame
    from .explore import BalanceDefect, FMusSum, FSic, OptimizationProblem

    o = cfg.options
    group, mubs = _group_and_mubs(cfg.dim, cfg.kind)
    chosen = o.get("mubs")
    sel = mubs if chosen is None else [mubs[i] for i in chosen]

    def functional(name):
        if name == "f_sic":
            return FSic(group)
        if name in ("neg_f_sic", "-f_sic"):
            return FSic(group, -1.0)
        if name in ("f_mus", "f_mus_sum"):
            return FMusSum(sel)
        if name == "balance_defect":
            return BalanceDefect(sel[0])
        raise ConfigError(f"unknown functional {name!r}")

    frame, real = None, False
    sub = o.get("subspace")
    if sub == "negative_parity":
        frame = negative_parity_basis(cfg.dim)
    elif sub == "real_zauner":
        frame, _ = real_zauner_frame(cfg.dim)
        real = True
    elif sub is not None:
        raise ConfigError(f"unknown subspace {sub!r}")
    kwargs = {k: o[k] for k in ("max_iter", "gtol", "residual_tol", "polish") if o.get(k) is not None}
    if o.get("penalty_schedule") is not None:
        kwargs["penalty_schedule"] = tuple(float(w) for w in o["penalty_schedule"])
    return OptimizationProblem(
        cfg.dim,
        functional(o.get("objective", "f_sic")),
        [functional(c) for c in o.get("constraints") or []],
        frame=frame,
        real=real,
        restarts=cfg.restarts or 1000,
        **kwargs,
    )


def cmd_explore_optimize(cfg):
    from .explore import optimize

    res = optimize(build_problem(cfg), seed=cfg.seed)
    out = res.to_dict()
    out["config"] = asdict(cfg)
    emit(dumps(out), cfg.out)


def cmd_explore_fs_average(cfg):
    from .explore import fs_functional, mc_average

    name = cfg.options["functional"]
    mean, err = mc_average(fs_functional(name, cfg.dim, cfg.kind), cfg.dim, cfg.options["n"], seed=cfg.seed)
    exact = pot.fs_average_f_sic(cfg.dim) if name == "fsic" else pot.fs_average_f_mus(cfg.dim)
    out = {"functional": name, "dim": cfg.dim, "n": cfg.options["n"], "mean": mean, "stderr": err}
    out["closed_form"] = exact
    out["z_score"] = (mean - exact) / err
    emit(dumps(out), cfg.out)
    if abs(out["z_score"]) > 3:
        raise CheckFailed(f"fs-average {name} d={cfg.dim}: mean {mean:.6g} is {out['z_score']:.2f} stderr from {exact:.6g}")


# ---------------------------------------------------------------------------
# analysis


def zauner_outputs(grid, restarts, seed):
    from .analysis import zauner_real_map

    m = zauner_real_map(7, grid_n=grid, restarts=restarts, seed=seed)
    table = csv_text(["x", "y", "f_sic"], m.rows().tolist())
    marked = {k: [{"x": float(p[0][0]), "y": float(p[0][1]), "f_sic": p[1]} for p in v] for k, v in m.marked.items()}
    marked["grid_max"] = m.grid_max
    return m, table, dumps(marked)


def sidecar(path):
    return str(Path(path).with_suffix(".json")) if path else None


def cmd_analysis_zauner_map(cfg):
    _, table, marked = zauner_outputs(cfg.options["grid"], cfg.restarts or 60, cfg.seed)
    emit(table, cfg.out)
    if cfg.out:
        write_atomic(sidecar(cfg.out), marked)
    else:
        sys.stdout.write(marked)


def cmd_analysis_graph(cfg):
    from .analysis import orthogonality_graph

    states = read_states_csv(cfg.options["input"])
    emit(dumps(orthogonality_graph(states, tol=cfg.options["tol"]).to_dict()), cfg.out)


def table1_summary(dims, seed, summary):
    from .analysis import table1

    rows = []
    for d in dims:
        for name, q, val, exp, ok in table1(d, seed=seed):
            rows.append([d, name, q, val, exp])
            tol = "1e-12" if name == "sic" else "1e-9"
            summary.check(f"table1 d={d} {name} {q}", ok, f"{val:.12g} vs {exp:.12g}, tol {tol}")
    return csv_text(["dim", "state", "quantity", "computed", "expected"], rows)


def cmd_analysis_table1(cfg):
    s = Summary()
    text = table1_summary([cfg.dim] if cfg.dim else [2, 3, 5, 7], cfg.seed, s)
    if cfg.out:
        write_atomic(cfg.out, text)
    if s.failed:
        raise CheckFailed(s.failed[0])


def classify_d4_report():
    from .algebra import build_group
    from .analysis import classify_bases_d4
    from .mubs import enumerate_flowers, enumerate_petals, stabilizer_states

    group = build_group(4, "bipartite")
    shapes, ents = classify_bases_d4()
    return {
        "petals": len(enumerate_petals(group)),
        "flowers": len(enumerate_flowers(group)),
        "stabilizer_states": len(stabilizer_states(group)),
        "shapes": shapes,
        "entanglement": ents,
    }


def cmd_analysis_classify_d4(cfg):
    emit(dumps(classify_d4_report()), cfg.out)


# ---------------------------------------------------------------------------
# reproduce


def _gap_check(s, name, gaps):
    s.check(f"{name}: inequality gap >= -1e-10 on every row", gaps.min() >= -1e-10, f"min gap {gaps.min():.3g}")


def reproduce_scatter(d, cfg, outdir, s, mixture):
    from .algebra import build_group
    from .explore import boundary_segment, scatter_dataset

    n = cfg.options.get("n") or 60_000
    fm, fs, labels = scatter_dataset(d, n, mixture, seed=cfg.seed, eps=cfg.options.get("eps", 0.15))
    write_atomic(outdir / f"scatter_d{d}.csv", scatter_text(fm, fs, labels))
    group, mubs = _group_and_mubs(d, None)
    c = pot.inequality_coefficient(d)
    _gap_check(s, f"d={d} scatter ({n} states)", fs - c * fm)
    sm, ss = pot.stabilizer_values(d) if group.kind == "single" else (None, 12 / 5)
    s.check(f"d={d} scatter: f_sic <= stabilizer value", fs.max() <= ss + 1e-9, f"max {fs.max():.10g}")
    if sm is not None:
        s.check(f"d={d} scatter: f_mus <= stabilizer value", fm.max() <= sm + 1e-9, f"max {fm.max():.10g}")
    theta, bm, bs = boundary_segment(group, mubs[0])
    write_atomic(outdir / f"boundary_d{d}.csv", csv_text(["theta", "f_mus", "f_sic"], zip(theta, bm, bs)))
    _gap_check(s, f"d={d} two-stabilizer boundary segment", bs - c * bm)
    if sm is not None:
        ok = abs(bm[0] - sm) < 1e-9 and abs(bs[0] - ss) < 1e-9
        s.check(f"d={d} boundary segment starts at the stabilizer corner", ok, f"({bm[0]:.10g}, {bs[0]:.10g})")
    return group, fs


def reproduce_figure(k, cfg, outdir, s):
    from .algebra import build_group
    from .analysis import orthogonality_graph
    from .explore import TABLE2_VALUES, FMusSum, OptimizationProblem, max_f_sic_on_mus, min_max_pair, optimize, stingray_dataset
    from .mubs import stabilizer_mubs, stabilizer_states

    if k == 2:
        reproduce_scatter(5, cfg, outdir, s, "uniform:1,stabilizer:1,sic:1")
    elif k == 3:
        reproduce_scatter(7, cfg, outdir, s, "uniform:1,stabilizer:1,sic:1,mub_balanced:1")
        res = max_f_sic_on_mus(7, restarts=30, seed=cfg.seed)
        v = -res.values[res.converged_mask]
        s.check("d=7 max f_sic on MUS = 7/8 +- 1e-6", bool(len(v) and np.all(np.abs(v - 7 / 8) < 1e-6)), f"{len(v)} converged, range [{v.min():.10g}, {v.max():.10g}]")
        states, text = balanced_rows(7, cfg.restarts, cfg.seed)
        write_atomic(outdir / "balanced_d7.csv", text)
        g = orthogonality_graph(states)
        write_atomic(outdir / "graph_d7.json", dumps(g.to_dict()))
        s.check("d=7 balanced states in one negative-parity eigenspace: 21", len(g.adjacency) == 21, f"{len(g.adjacency)} found")
        s.check("d=7 orthogonality graph is regular", g.is_regular, f"degree {g.degrees[0] if len(g.degrees) else '-'}, {g.edge_count} edges")
    elif k == 4:
        m, table, marked = zauner_outputs(cfg.options.get("grid") or 400, 60, cfg.seed)
        write_atomic(outdir / "map.csv", table)
        write_atomic(outdir / "map.json", marked)
        s.check("zauner map grid max 5.24 +- 0.01", abs(m.grid_max - 5.24) <= 0.01, f"{m.grid_max:.6f}")
        s.check("zauner map: 6 MUS", len(m.marked["MUS"]) == 6, str(len(m.marked["MUS"])))
        s.check("zauner map: 2 of the MUS are SICs", len(m.marked["SIC"]) == 2, str(len(m.marked["SIC"])))
        al = [v for _, v in m.marked["Alltop"]]
        ok = len(al) == 6 and all(abs(v - 3 / 28) < 1e-9 for v in al)
        s.check("zauner map: 6 Alltop vectors with f_sic = 3/28", ok, f"{len(al)} found")
    elif k == 5:
        rep = classify_d4_report()
        write_atomic(outdir / "classify_d4.json", dumps(rep))
        s.check("d=4: 15 petals", rep["petals"] == 15, str(rep["petals"]))
        s.check("d=4: 6 flowers", rep["flowers"] == 6, str(rep["flowers"]))
        s.check("d=4: 60 stabilizer states", rep["stabilizer_states"] == 60, str(rep["stabilizer_states"]))
        sh = rep["shapes"]
        s.check("d=4 shapes: 1 computational, 8 Hadamard, 6 sparse", (sh["computational"], sh["hadamard"], sh["sparse"]) == (1, 8, 6), str(sh))
        s.check("d=4: 6 maximally entangled bases", rep["entanglement"]["maximally_entangled"] == 6, str(rep["entanglement"]))
    elif k == 6:
        group, fs = reproduce_scatter(4, cfg, outdir, s, "uniform:1,stabilizer:1,alltop:1")
        s.check("d=4 scatter: f_sic >= 3/20 (Alltop minimum)", fs.min() >= 0.15 - 1e-9, f"min {fs.min():.10g}")
        top = pot.f_sic(group, stabilizer_states(group))
        s.check("d=4: every stabilizer state has f_sic = 12/5", np.allclose(top, 12 / 5, atol=1e-12, rtol=0), f"range [{top.min():.12g}, {top.max():.12g}]")
    elif k == 7:
        n = cfg.options.get("n") or 50_000
        data = stingray_dataset(n, seed=cfg.seed)
        write_atomic(outdir / "stingray.csv", csv_text(["f_mus_1", "f_mus_2"], data.tolist()))
        s.check("stingray: f1 + f2 >= 1/240 on every row", data.sum(axis=1).min() >= 1 / 240 - 1e-9, f"min {data.sum(axis=1).min():.10g}")
        mubs = stabilizer_mubs(build_group(4, "bipartite"))
        res = optimize(OptimizationProblem(4, FMusSum(mubs[:2]), restarts=cfg.restarts or 1000, max_iter=600, polish=50), seed=cfg.seed)
        s.check("min f1 + f2 matches Table 2 row 2 within 1e-6", abs(res.value - TABLE2_VALUES[1]) < 1e-6, f"{res.value:.10f}")
        pair_restarts = cfg.options.get("pair_restarts") or 20_000
        rows = []
        for i in range(6):
            for j in range(i + 1, 6):
                v, _ = min_max_pair(i, j, restarts=pair_restarts, seed=cfg.seed)
                rows.append([i, j, v])
                s.check(f"min max(f{i + 1}, f{j + 1}) > 1e-4", v > 1e-4, f"{v:.6g} over {pair_restarts} restarts")
        write_atomic(outdir / "min_max_pairs.csv", csv_text(["i", "j", "min_max"], rows))
    else:
        raise ConfigError(f"--figure must be one of 2..7, got {k}")


def reproduce_table(k, cfg, outdir, s):
    from .explore import TABLE2_VALUES, table2

    if k == 1:
        text = table1_summary([cfg.dim] if cfg.dim else [2, 3, 5, 7], cfg.seed, s)
        write_atomic(outdir / "table1.csv", text)
    elif k == 2:
        results = table2(restarts=cfg.restarts or 1000, seed=cfg.seed)
        rows = []
        for n, (res, ref) in enumerate(zip(results, TABLE2_VALUES), start=1):
            rows.append([n, res.value, ref])
            s.check(f"table2 row {n} within 1e-6", abs(res.value - ref) < 1e-6, f"{res.value:.10f} vs {ref:.10f}")
        write_atomic(outdir / "table2.csv", csv_text(["mubs", "minimum", "reference"], rows))
    else:
        raise ConfigError(f"--table must be 1 or 2, got {k}")


def cmd_reproduce(cfg):
    o = cfg.options
    if (o.get("figure") is None) == (o.get("table") is None):
        raise ConfigError("give exactly one of --figure or --table")
    outdir = Path(cfg.out or "reproduce_out")
    s = Summary()
    if o.get("figure") is not None:
        reproduce_figure(o["figure"], cfg, outdir, s)
        tag = f"figure{o['figure']}"
    else:
        reproduce_table(o["table"], cfg, outdir, s)
        tag = f"table{o['table']}"
    write_atomic(outdir / f"{tag}_summary.txt", s.text())
    if s.failed:
        raise CheckFailed(s.failed[0])


# ---------------------------------------------------------------------------
# parser


def _global(parser, dim_required=False, default_restarts=None):
    parser.add_argument("--dim", type=int, required=dim_required, help="Hilbert-space dimension")
    parser.add_argument("--kind", choices=("single", "bipartite"), help="group kind (default: bipartite for d=4)")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--restarts", type=int, default=default_restarts, help="optimizer restarts")
    parser.add_argument("--out", help="output path (stdout if omitted)")
    parser.add_argument("--spec", help="JSON file whose keys override the flags")


def build_parser():
    p = argparse.ArgumentParser(prog="farstab", description="Frame potentials, MUBs and SIC/MUS searches.")
    top = p.add_subparsers(dest="group", required=True)

    mub = top.add_parser("mub", help="stabilizer MUB matrices").add_subparsers(dest="action", required=True)
    q = mub.add_parser("dump", help="basis matrices of one stabilizer MUB as JSON")
    _global(q, dim_required=True)
    q.add_argument("--flower", type=int, default=0)
    q.set_defaults(func=cmd_mub_dump)

    potentials = top.add_parser("potentials", help="evaluate f_sic and f_mus for a state").add_subparsers(dest="action", required=True)
    q = potentials.add_parser("eval", help="PotentialReport for a state file")
    _global(q, dim_required=True)
    q.add_argument("--state", required=True, help="JSON list of [re, im] pairs, or CSV with re0.., im0..")
    q.set_defaults(func=cmd_potentials_eval)

    states = top.add_parser("states", help="special-state catalog and MUB-balanced searches").add_subparsers(dest="action", required=True)
    q = states.add_parser("catalog", help="named special states with their potentials")
    _global(q, dim_required=True)
    q.set_defaults(func=cmd_states_catalog)
    q = states.add_parser("balanced", help="MUB-balanced states as CSV")
    _global(q, dim_required=True)
    q.set_defaults(func=cmd_states_balanced)

    explore = top.add_parser("explore", help="scatter datasets, optimizer runs, Monte Carlo averages").add_subparsers(dest="action", required=True)
    q = explore.add_parser("scatter", help="(f_mus, f_sic) scatter dataset as CSV")
    _global(q, dim_required=True)
    q.add_argument("--n", type=int, default=60_000)
    q.add_argument("--mix", default="uniform:1,stabilizer:1,sic:1", help="name:weight,... over uniform and anchor states")
    q.add_argument("--eps", type=float, default=0.15, help="noise scale for near-anchor states")
    q.add_argument("--mub", type=int, default=0, help="stabilizer MUB defining f_mus")
    q.set_defaults(func=cmd_explore_scatter)
    q = explore.add_parser(
        "optimize",
        help="multi-start optimization from a problem JSON",
        description=(
            "Problem keys: dim, kind, objective (f_sic | neg_f_sic | f_mus_sum | balance_defect), "
            "constraints (list of the same names, target 0), mubs (indices), "
            "subspace (negative_parity | real_zauner), restarts, seed, penalty_schedule, "
            "max_iter, gtol, residual_tol, polish."
        ),
    )
    _global(q)
    for name in ("objective", "subspace"):
        q.add_argument(f"--{name.replace('_', '-')}", dest=name)
    q.add_argument("--constraints", nargs="*")
    q.add_argument("--mubs", type=int, nargs="*")
    q.add_argument("--polish", type=int)
    q.add_argument("--max-iter", dest="max_iter", type=int)
    q.set_defaults(func=cmd_explore_optimize, penalty_schedule=None, gtol=None, residual_tol=None)
    q = explore.add_parser("fs-average", help="Monte Carlo Fubini-Study average against the closed form")
    _global(q, dim_required=True)
    q.add_argument("--n", type=int, default=1_000_000)
    q.add_argument("--functional", choices=("fsic", "fmus"), required=True)
    q.set_defaults(func=cmd_explore_fs_average)

    analysis = top.add_parser("analysis", help="Zauner map, orthogonality graphs, Table 1, d=4 classification").add_subparsers(dest="action", required=True)
    q = analysis.add_parser("zauner-map", help="f_sic over the real Zauner subspace in d=7")
    _global(q)
    q.add_argument("--grid", type=int, default=400)
    q.set_defaults(func=cmd_analysis_zauner_map)
    q = analysis.add_parser("graph", help="orthogonality graph of a states CSV")
    _global(q)
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--tol", type=float, default=1e-8)
    q.set_defaults(func=cmd_analysis_graph)
    q = analysis.add_parser("table1", help="closed-form checks for stabilizer, Alltop and SIC states")
    _global(q)
    q.set_defaults(func=cmd_analysis_table1)
    q = analysis.add_parser("classify-d4", help="shape and entanglement counts of the 15 bases in d=4")
    _global(q)
    q.set_defaults(func=cmd_analysis_classify_d4)

    q = top.add_parser("reproduce", help="dataset plus PASS/FAIL summary for one figure or table")
    _global(q)
    q.add_argument("--figure", type=int, choices=range(2, 8))
    q.add_argument("--table", type=int, choices=(1, 2))
    q.add_argument("--grid", type=int)
    q.add_argument("--n", type=int)
    q.add_argument("--eps", type=float, default=0.15)
    q.add_argument("--pair-restarts", dest="pair_restarts", type=int)
    q.set_defaults(func=cmd_reproduce)
    return p


def resolve_config(args):
    """Fold flags and the optional --spec JSON (which wins) into a RunConfig."""
    values = vars(args).copy()
    func = values.pop("func")
    command = f"{values.pop('group')} {values.pop('action', '') or ''}".strip()
    spec = values.get("spec")
    if spec:
        try:
            data = json.loads(Path(spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read --spec {spec}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("--spec must hold a JSON object")
        unknown = set(data) - set(values)
        if unknown:
            raise ConfigError(f"unknown keys in --spec: {sorted(unknown)}")
        values.update(data)
    if values.get("dim") is None and func in (cmd_explore_optimize,):
        raise ConfigError("the problem needs a dim")
    cfg = RunConfig(command, **{k: values.pop(k) for k in ("dim", "kind", "seed", "restarts", "out")})
    values.pop("spec", None)
    cfg.options = values
    return cfg, func


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, func = resolve_config(args)
        print(cfg.to_json(), file=sys.stderr, flush=True)
        with warnings.catch_warnings():
            warnings.simplefilter("always", IncompleteSet)
            warnings.formatwarning = lambda msg, cat, *a, **k: f"warning: {cat.__name__}: {msg}\n"
            func(cfg)
    except CheckFailed as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (NoFeasiblePoint, SearchFailure) as exc:
        print(f"FAIL: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ConfigError, UnsupportedDimension, UnknownAnchorState, IndexOutOfRange, DimensionMismatch, ValueError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
