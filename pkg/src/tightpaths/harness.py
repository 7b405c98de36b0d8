"""Seeded experiments: one trial runs the whole two-round pipeline.

A trial grows a long path with round-one edges, trims it into a trunk with
two stubs, grows augmenting ends on both sides, and tries to close a cycle
with round-two edges. Grids of cells are read from an INI file; every trial
becomes one CSV row and every cell one aggregate row.
"""

from __future__ import annotations

import configparser
import csv
import itertools
import logging
import math
import multiprocessing
import os
import statistics
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .closer import expected_closures, try_close, write_certificate
from .fray import AugmentingFamily, FamilyFailure, build_family, trunk_lengths
from .oracle import EdgeOracle
from .params import RunConstants, degree_thresholds, derive_params, l_one
from .pathfinder import run_pathfinder
from .structures import TightPath, validate_cycle, validate_path

log = logging.getLogger(__name__)

SCHEMA_LINE = "# tightpaths results schema 1"


@dataclass(frozen=True)
class Cell:
    n: int
    k: int
    j: int
    c: float

    def __post_init__(self):
        if not 2 <= self.j <= self.k - 1:
            raise ValueError(f"cell needs 2 <= j <= k-1, got k={self.k}, j={self.j}")
        if not self.c > 1:
            raise ValueError(f"cell needs c > 1 (supercritical), got c={self.c}")
        derive_params(self.n, self.k, self.j)

    @property
    def label(self) -> str:
        return f"n{self.n}_k{self.k}_j{self.j}_c{self.c:g}"


@dataclass
class ExperimentConfig:
    cells: list = field(default_factory=list)
    trials: int = 20
    base_seed: int = 0
    delta: float = 0.3
    eps: float = 0.05
    omega: float | None = None        # None: max(3, ln ln n)
    c_chain: tuple = ()
    p0_fraction: float | None = None  # None: 1 - delta/2
    stub_edges: int | None = None     # None: ceil((ln n)^2)
    budget: int = 2_000_000
    brute_cap: int = 12
    close_weak_families: bool = False
    force_close: bool = False         # debug: second round probability 1
    out: str | None = None
    cert_dir: str | None = None

    def constants(self, cell: Cell) -> RunConstants:
        from .params import default_omega
        omega = self.omega if self.omega is not None else default_omega(cell.n)
        return RunConstants(c=cell.c, delta=self.delta, eps=self.eps, c_chain=tuple(self.c_chain), omega=omega,
                            p0_fraction=self.p0_fraction, stub_edges=self.stub_edges)


def _split(val: str) -> list[str]:
    return [x for x in (s.strip() for s in val.replace(",", " ").split()) if x]


def _opt(sec, key, conv, default=None):
    if key not in sec or not sec[key].strip():
        return default
    return conv(sec[key].strip())


def _bool(s: str) -> bool:
    return s.strip().lower() in ("1", "true", "yes", "on")


def load_config(path) -> ExperimentConfig:
    """Read an INI experiment file.

    ``[experiment]`` and ``[constants]`` hold scalars; each ``[cell.NAME]``
    section gives n, k, j and c, where any of them may list several values
    (comma or space separated) to expand into a grid.
    """
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(path)
    ex = cp["experiment"] if cp.has_section("experiment") else {}
    co = cp["constants"] if cp.has_section("constants") else {}
    cfg = ExperimentConfig(
        trials=_opt(ex, "trials", int, 20),
        base_seed=_opt(ex, "base_seed", int, 0),
        budget=_opt(ex, "budget", lambda s: int(float(s)), 2_000_000),
        brute_cap=_opt(ex, "brute_cap", int, 12),
        close_weak_families=_opt(ex, "close_weak_families", _bool, False),
        force_close=_opt(ex, "force_close", _bool, False),
        out=_opt(ex, "out", str),
        cert_dir=_opt(ex, "cert_dir", str),
        delta=_opt(co, "delta", float, 0.3),
        eps=_opt(co, "eps", float, 0.05),
        omega=_opt(co, "omega", float),
        c_chain=tuple(float(x) for x in _split(co.get("c_chain", "") if co else "")),
        p0_fraction=_opt(co, "p0_fraction", float),
        stub_edges=_opt(co, "stub_edges", int),
    )
    for name in cp.sections():
        if not name.startswith("cell"):
            continue
        sec = cp[name]
        grid = [[int(x) for x in _split(sec["n"])], [int(x) for x in _split(sec["k"])],
                [int(x) for x in _split(sec["j"])], [float(x) for x in _split(sec["c"])]]
        for n, k, j, c in itertools.product(*grid):
            cfg.cells.append(Cell(n, k, j, c))
    for cell in cfg.cells:
        cfg.constants(cell)  # validates the constants against each cell
    return cfg


@dataclass
class TrialResult:
    cell: str
    n: int
    k: int
    j: int
    c: float
    seed: int
    L1: float = 0.0
    bound: float = 0.0          # (1 - delta) L1
    trunk: int = 0              # |P0|
    stub: int = 0
    dfs_stop: str = ""
    L_P: int = 0
    dfs_queries: int = 0
    dfs_delta_ratio: float = 0.0
    fray_a_stop: str = ""
    fray_b_stop: str = ""
    family_a: int = 0
    family_b: int = 0
    pair_fraction: float = 0.0
    heavy: int = 0
    heavy_bound: float = 0.0    # 2kn / ln n
    max_extension: int = 0      # longest stored augmenting path beyond P0
    fray_queries: int = 0
    family_ok: bool = False
    closure_attempted: bool = False
    closed: bool = False
    certified: bool = False     # closed from a family meeting every guarantee
    L_C: int = 0
    L_C_over_n: float = 0.0
    triples: int = 0
    expected: float = 0.0       # triples * (p'')^s
    expected_union: float = 0.0  # same with the chance of an edge in either round
    close_queries: int = 0
    failure: str = ""
    cert_path: str = ""
    wall_time: float = 0.0


RESULT_FIELDS = [f.name for f in fields(TrialResult)]
AGG_FIELDS = ["cell", "n", "k", "j", "c", "trials", "certified_rate", "closed_rate", "family_rate", "dfs_rate",
              "mean_LC_over_n", "std_LC_over_n", "mean_LC_over_n_certified", "l1_over_n", "mean_pair_fraction",
              "mean_dfs_delta_ratio", "max_heavy"]


def _check_family(fam: AugmentingFamily, oracle, rnd: int, sample: int, rng) -> str | None:
    """Validate every stored extension edge and a sample of whole augmenting paths."""
    params = fam.params
    j = params.j
    tails = []
    for side in (fam.family_A, fam.family_B):
        for node in side.values():
            while node.parent is not None:
                tails.append(tuple(sorted(node.tail)))
                node = node.parent
    if tails:
        uniq = np.array(sorted(set(tails)), dtype=np.int64)
        if not oracle.peek(uniq, rnd).all():
            return "family edge not in the hypergraph"
    test = lambda K: bool(oracle.peek(np.array([K]), rnd)[0])
    for side in (fam.family_A, fam.family_B):
        keys = list(side)
        for i in rng.choice(len(keys), size=min(sample, len(keys)), replace=False):
            seq = side[keys[i]].sequence(j)
            if not validate_path(TightPath(seq, params.k, j), test):
                return "augmenting path failed validation"
    return None


def run_trial(cell: Cell, seed: int, cfg: ExperimentConfig, track: bool = False) -> TrialResult:
    """Run the whole pipeline for one seed; failures are recorded, never raised."""
    t0 = time.perf_counter()
    params = derive_params(cell.n, cell.k, cell.j)
    consts = cfg.constants(cell)
    p, p1, p2 = consts.probabilities(params)
    if cfg.force_close:
        p2 = 1.0
    L1 = l_one(params, cell.c)
    res = TrialResult(cell=cell.label, n=cell.n, k=cell.k, j=cell.j, c=cell.c, seed=seed, L1=L1,
                      bound=(1 - consts.delta) * L1, heavy_bound=2 * cell.k * cell.n / math.log(cell.n))
    trunk, stub = trunk_lengths(params, consts, L1)
    res.trunk, res.stub = trunk, stub
    target = trunk + 2 * stub
    oracle = EdgeOracle(params, (p1, p2), seed, track=track)
    try:
        dfs = run_pathfinder(oracle, params, consts, round=0, target_length=target, seed=seed)
        res.dfs_stop, res.L_P, res.dfs_queries = dfs.stop, dfs.path.length, dfs.stats["t"]
        th = degree_thresholds(params, consts)
        res.dfs_delta_ratio = max(d / t for d, t in zip(dfs.stats["max_degree"], th))
        if dfs.path.length < target:
            res.failure = f"dfs stopped at {dfs.stop} with length {dfs.path.length} < {target}"
            return _done(res, t0)
        P0_prime = dfs.path.subpath(0, target)
        if not validate_path(P0_prime, lambda K: bool(oracle.peek(np.array([K]), 0)[0])):
            res.failure = "round-one path failed validation"
            return _done(res, t0)
        q0 = oracle.total_queries
        fam = None
        try:
            fam = build_family(oracle, params, consts, P0_prime, stub=stub)
            res.family_ok = True
        except FamilyFailure as exc:
            out = exc.outcome
            if isinstance(out, AugmentingFamily):
                fam = out
                res.failure = f"pair fraction below 1 - eps ({out.pair_fraction:.4f})"
            else:
                res.failure = f"fray {exc.side} stopped at {exc.stop}"
                if exc.side == "A":
                    res.fray_a_stop = exc.stop
                else:
                    res.fray_a_stop, res.fray_b_stop = "S4", exc.stop
                res.fray_queries = oracle.total_queries - q0
                return _done(res, t0)
        res.fray_queries = oracle.total_queries - q0
        res.fray_a_stop, res.fray_b_stop = fam.runs[0].stop, fam.runs[1].stop
        res.family_a, res.family_b = len(fam.family_A), len(fam.family_B)
        res.pair_fraction = fam.pair_fraction
        res.heavy = len(fam.heavy)
        res.max_extension = max(nd.length for side in (fam.family_A, fam.family_B)
                                for nd in side.values()) - fam.P0.length
        bad = _check_family(fam, oracle, 0, 10, np.random.default_rng(seed))
        if bad:
            res.failure = bad
            return _done(res, t0)
        if not (res.family_ok or cfg.close_weak_families):
            return _done(res, t0)
        res.closure_attempted = True
        q1 = oracle.total_queries
        close = try_close(fam, oracle, params, budget=cfg.budget, seed=seed, round=1)
        res.close_queries = oracle.total_queries - q1
        res.triples = close.tried
        res.expected = expected_closures(close.tried, params, p2)
        res.expected_union = expected_closures(close.tried, params, 1 - (1 - p1) * (1 - p2))
        if close.cycle is None:
            res.failure = res.failure or f"no closing triple within budget {cfg.budget}"
            return _done(res, t0)
        if not validate_cycle(close.cycle, lambda K: bool(oracle.peek(np.array([K]), 1)[0])):
            res.failure = "cycle failed validation"
            return _done(res, t0)
        res.closed = True
        res.certified = res.family_ok
        res.L_C = close.cycle.length
        res.L_C_over_n = res.L_C / cell.n
        if cfg.cert_dir:
            Path(cfg.cert_dir).mkdir(parents=True, exist_ok=True)
            path = Path(cfg.cert_dir) / f"{cell.label}_seed{seed}.cert"
            write_certificate(path, close.cycle, params, oracle, round=1, delta=consts.delta, c=cell.c,
                              extra={"family_ok": int(res.family_ok)})
            res.cert_path = str(path)
    except Exception as exc:  # recorded so that one bad trial does not sink a sweep
        log.exception("trial %s seed %d crashed", cell.label, seed)
        res.failure = f"crash: {type(exc).__name__}: {exc}"
    return _done(res, t0)


def _done(res: TrialResult, t0: float) -> TrialResult:
    res.wall_time = round(time.perf_counter() - t0, 3)
    return res


def _trial_job(args):
    cell, seed, cfg = args
    return run_trial(cell, seed, cfg)


def aggregate(rows: list[TrialResult]) -> list[dict]:
    """Per-cell summaries; L_C of trials without a certified cycle counts as 0."""
    out = []
    by_cell: dict = {}
    for r in rows:
        by_cell.setdefault(r.cell, []).append(r)
    for label, rs in by_cell.items():
        r0 = rs[0]
        lc = [r.L_C_over_n if r.certified else 0.0 for r in rs]
        lc_cert = [r.L_C_over_n for r in rs if r.certified]
        out.append({
            "cell": label, "n": r0.n, "k": r0.k, "j": r0.j, "c": r0.c, "trials": len(rs),
            "certified_rate": sum(r.certified for r in rs) / len(rs),
            "closed_rate": sum(r.closed for r in rs) / len(rs),
            "family_rate": sum(r.family_ok for r in rs) / len(rs),
            "dfs_rate": sum(r.L_P >= r.trunk + 2 * r.stub for r in rs) / len(rs),
            "mean_LC_over_n": statistics.fmean(lc),
            "std_LC_over_n": statistics.pstdev(lc),
            "mean_LC_over_n_certified": statistics.fmean(lc_cert) if lc_cert else 0.0,
            "l1_over_n": r0.L1 / r0.n,
            "mean_pair_fraction": statistics.fmean(r.pair_fraction for r in rs),
            "mean_dfs_delta_ratio": statistics.fmean(r.dfs_delta_ratio for r in rs),
            "max_heavy": max(r.heavy for r in rs),
        })
    return out


def _fmt(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(round(v, 10))
    return v


def write_results(path, rows: list[TrialResult], aggs: list[dict] | None = None):
    aggs = aggregate(rows) if aggs is None else aggs
    cols = ["row"] + RESULT_FIELDS + [c for c in AGG_FIELDS if c not in RESULT_FIELDS]
    with open(path, "w", newline="") as fh:
        fh.write(SCHEMA_LINE + "\n")
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            w.writerow({"row": "trial", **{k: _fmt(v) for k, v in asdict(r).items()}})
        for a in aggs:
            w.writerow({"row": "cell", **{k: _fmt(v) for k, v in a.items()}})


def read_results(path) -> tuple[list[dict], list[dict]]:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != SCHEMA_LINE:
            raise ValueError(f"{path}: unexpected schema line {first!r}")
        rows = list(csv.DictReader(fh))
    return [r for r in rows if r["row"] == "trial"], [r for r in rows if r["row"] == "cell"]


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, out=None) -> tuple[list[TrialResult], list[dict]]:
    """Run every (cell, trial) pair; results are ordered by cell then seed."""
    out = out or cfg.out
    tasks = [(cell, cfg.base_seed + t, cfg) for cell in cfg.cells for t in range(cfg.trials)]
    rows: list[TrialResult] = []
    try:
        if jobs > 1 and len(tasks) > 1:
            with multiprocessing.get_context("spawn").Pool(jobs) as pool:
                for r in pool.imap(_trial_job, tasks):
                    rows.append(r)
        else:
            for t in tasks:
                rows.append(_trial_job(t))
    finally:
        if out:
            write_results(out, rows)
    return rows, aggregate(rows)


def plot_curve(results_path, svg_path):
    """Mean L_C/n against c per (k, j), with the curve (1 - c^(-1/(k-j)))/(k-j)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    _, cells = read_results(results_path)
    if not cells:
        raise ValueError("results table has no cell rows")
    groups: dict = {}
    for row in cells:
        groups.setdefault((int(row["k"]), int(row["j"])), []).append(row)
    fig, axes = plt.subplots(1, len(groups), figsize=(4.5 * len(groups), 3.6), squeeze=False)
    for ax, ((k, j), rows) in zip(axes[0], sorted(groups.items())):
        step = k - j
        cs = [float(r["c"]) for r in rows]
        hi = max(max(cs) * 1.25, 2.0)
        grid = np.linspace(1.0, hi, 200)
        ax.plot(grid, (1 - grid ** (-1 / step)) / step, label="(1 - c^(-1/(k-j)))/(k-j)")
        ax.scatter(cs, [float(r["mean_LC_over_n"]) for r in rows], color="C3", zorder=3, label="mean L_C/n")
        ax.set_title(f"k={k}, j={j}")
        ax.set_xlabel("c")
        ax.set_ylabel("L / n")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(svg_path, format="svg")
    plt.close(fig)
    return svg_path


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})


def default_jobs() -> int:
    return max(1, (os.cpu_count() or 1))


# -- small explicit instances

@dataclass
class SmallRun:
    path: TightPath
    cycle: object   # TightCycle or None
    dfs_stop: str
    memo_hits: int


def small_pipeline(inst, seed: int = 0, cert_path=None) -> SmallRun:
    """Run the search and a closing pass on an explicit instance through the replay oracle.

    Degree and time stops are lifted so the search runs until no neutral
    j-set is left. The closing pass tries every sub-path of the found path,
    longest first, with every choice of outside vertices, and keeps the first
    configuration whose bridge windows are all edges.
    """
    from itertools import permutations

    from .closer import write_certificate
    from .oracle import ReplayOracle
    from .structures import closing_windows, close_cycle

    params = derive_params(inst.n, inst.k, inst.j)
    consts = RunConstants(c=2.0)
    oracle = ReplayOracle(inst.edges, inst.n, inst.k, rounds=2, track=True)
    dfs = run_pathfinder(oracle, params, consts, round=0, target_length=inst.n, seed=seed,
                         max_time=10**12, thresholds=(math.inf,) * inst.j)
    path = dfs.path
    edge = lambda K: tuple(sorted(K)) in oracle.edges
    cycle = None
    for length in range(path.length, 0, -1):
        for first in range(path.length - length + 1):
            sub = path.subpath(first, length)
            rest = [v for v in range(inst.n) if v not in set(sub.vertex_seq)]
            for R in permutations(rest, params.b):
                if all(edge(w) for w in closing_windows(sub, R, params)):
                    cand = close_cycle(sub, R)
                    if validate_cycle(cand, edge):
                        cycle = cand
                        break
            if cycle is not None:
                break
        if cycle is not None:
            break
    if cycle is not None and cert_path is not None:
        write_certificate(cert_path, cycle, params, oracle, round=0)
    return SmallRun(path, cycle, dfs.stop, dfs.stats["memo_hits"])
