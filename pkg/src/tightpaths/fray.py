"""Breadth-first growth of augmenting path ends around a fixed trunk path.

Starting from the ends of short subpaths of the round-one path, the search
explores j-sets in FIFO order, querying every eligible k-set from the head
before moving on. Every discovered j-set is the end of a path that extends
the trunk, so the output is a family of augmenting ends with their paths.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from .discovered import DiscoveredGraph, JSetIndex
from .oracle import BaseOracle
from .params import Params, RunConstants, degree_thresholds, disc_cap
from .pathnode import PathNode, move_marks
from .scan import make_scanner
from .structures import TightPath, child_extensions, jset, split_partition

S1, S2, S3, S4 = "S1", "S2", "S3", "S4"


class FamilyFailure(RuntimeError):
    """A fray run stopped without reaching the target family size."""

    def __init__(self, side: str, stop: str, outcome=None):
        super().__init__(f"fray run for side {side} stopped at {stop}")
        self.side = side
        self.stop = stop
        self.outcome = outcome


@dataclass
class Seed:
    J: tuple
    part: tuple
    node: PathNode


@dataclass
class FrayOutcome:
    paths: dict            # j-set -> PathNode of the path ending there
    stop: str
    t: int
    generations: dict      # j-set -> generation
    snapshots: list        # (t, active, explored) after each exploration
    stats: dict = field(default_factory=dict)


@dataclass
class BfsState:
    queue: deque
    explored: set
    disc: DiscoveredGraph
    forb: frozenset
    t: int = 0


def fray(oracle: BaseOracle, params: Params, consts: RunConstants, P0: TightPath, P0_prime: TightPath,
         seeds, forb=frozenset(), round: int = 0, cap: int | None = None, max_length: int | None = None,
         snapshot_path=None, compiled: bool = True) -> FrayOutcome:
    """Run the breadth-first search from ``seeds`` until S1-S4 fires.

    S1: the queue empties. S2: some active path reaches ``max_length`` edges
    (default the length of ``P0_prime``). S3: some Delta_i reaches its degree
    threshold. S4: ``cap`` j-sets (default ceil(eps^2 n^j)) are discovered.
    """
    n, j = params.n, params.j
    forb = frozenset(int(v) for v in forb)
    cap = disc_cap(params, consts) if cap is None else cap
    L0 = P0_prime.length if max_length is None else max_length
    thresholds = degree_thresholds(params, consts)
    scanner = make_scanner(oracle, params, prefer_compiled=compiled)

    base = np.zeros(n, dtype=bool)
    base[list(P0_prime.vertex_seq)] = True
    if forb:
        base[list(forb)] = True
    pathmarks = np.zeros(n, dtype=bool)
    current = None

    disc = DiscoveredGraph(j)
    index = JSetIndex(n, j)  # explored j-sets only
    state = BfsState(queue=deque(), explored=set(), disc=disc, forb=forb)
    paths: dict = {}
    parts: dict = {}
    gens: dict = {}
    snapshots = []
    stats = {"edges": 0, "batch_sizes": [], "reactivated": 0, "partial_batch": None, "seeds": 0}
    if oracle.track:
        oracle.begin_phase()

    stop = None
    best = 0
    for sd in sorted(seeds, key=lambda s: s.J):
        if sd.J in disc:
            continue
        disc.record_discovery(sd.J)
        paths[sd.J], parts[sd.J], gens[sd.J] = sd.node, sd.part, 0
        state.queue.append(sd.J)
        stats["seeds"] += 1
        best = max(best, sd.node.length)
    if len(disc) >= cap:
        stop = S4
    elif best >= L0:
        stop = S2
    elif disc.exceeded(thresholds) is not None:
        stop = S3

    while stop is None:
        if not state.queue:
            stop = S1
            break
        J = state.queue[0]
        node = paths[J]
        if node is not current:
            move_marks(pathmarks, current, node)
            current = node
        res = scanner.scan(J, base | pathmarks, index, -1, round, False)
        used = res.scanned
        for code, ordinal, new in res.hits:
            K = tuple(sorted(J + new))
            stats["edges"] += 1
            batch = 0
            for child, cpart, ordered in child_extensions(parts[J], new, params):
                batch += 1
                if child in disc:
                    # already active through another path: a second queue copy
                    # would find nothing once the first is explored
                    stats["reactivated"] += 1
                    continue
                cnode = node.extend(ordered, new)
                disc.record_discovery(child, J, K)
                paths[child], parts[child], gens[child] = cnode, cpart, gens[J] + 1
                state.queue.append(child)
                best = max(best, cnode.length)
                if len(disc) >= cap:
                    stop = S4
                elif cnode.length >= L0:
                    stop = S2
                elif disc.exceeded(thresholds) is not None:
                    stop = S3
                if stop:
                    break
            if stop:
                stats["partial_batch"] = batch
                used = ordinal + 1
                break
            stats["batch_sizes"].append(batch)
        scanner.commit(res, used, round)
        state.t += used
        if stop:
            break
        state.queue.popleft()
        state.explored.add(J)
        index.add(J)
        snapshots.append((state.t, len(state.queue), len(state.explored)))

    stats["memo_hits"] = oracle.end_phase() if oracle.track else 0
    stats["max_degree"] = tuple(disc.max_degree)
    stats["explored"] = len(state.explored)
    stats["best_length"] = best
    stats["generation_histogram"] = dict(sorted(Counter(gens.values()).items()))
    if snapshot_path is not None:
        _dump_snapshots(snapshot_path, snapshots, stats["generation_histogram"])
    return FrayOutcome(paths=paths, stop=stop, t=state.t, generations=gens, snapshots=snapshots, stats=stats)


def _dump_snapshots(path, snapshots, hist):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "active", "explored", "generation_histogram"])
        hstr = ";".join(f"{g}:{c}" for g, c in hist.items())
        for i, row in enumerate(snapshots):
            w.writerow(list(row) + [hstr if i == len(snapshots) - 1 else ""])


def side_seeds(seq, params: Params, P0_len: int, stub: int) -> list[Seed]:
    """Seeds for the end of ``seq`` (the vertex sequence of P0').

    The i-th seed (i = 1..stub) is the end of the subpath made of P0 plus the
    first i edges of the stub at that end; its path starts at the opposite
    end of P0 and leaves the other stub out.
    """
    step = params.step
    off = stub * step
    out = []
    for i in range(1, stub + 1):
        sub = tuple(seq[off: off + params.v(P0_len + i)])
        J = jset(sub[-params.j:])
        out.append(Seed(J, split_partition(sub, params), PathNode.root(sub, P0_len + i)))
    return out


def heavy_threshold(params: Params, consts: RunConstants) -> float:
    return consts.eps**2 * math.log(params.n) ** 3 * params.n ** (params.j - 1)


def vertex_loads(paths, exclude=()) -> Counter:
    """How many paths contain each vertex outside ``exclude``."""
    ex = set(exclude)
    load = Counter()
    for node in paths:
        vs = set(node.added_vertices()) if isinstance(node, PathNode) else set(node)
        load.update(vs - ex)
    return load


def heavy_vertices(paths, params: Params, consts: RunConstants, exclude=()) -> set:
    """Vertices outside ``exclude`` lying in at least eps^2 (ln n)^3 n^(j-1) paths.

    ``paths`` holds PathNodes (their vertices added beyond the seed are
    counted) or plain vertex collections.
    """
    th = heavy_threshold(params, consts)
    return {v for v, c in vertex_loads(paths, exclude).items() if c >= th}


def path_bitsets(vertex_sets, n: int) -> np.ndarray:
    """(n, words) array whose row v marks the members of ``vertex_sets`` containing v."""
    m = len(vertex_sets)
    words = max(1, (m + 63) // 64)
    bits = np.zeros((n, words), dtype=np.uint64)
    for i, vs in enumerate(vertex_sets):
        if vs:
            idx = np.fromiter(vs, dtype=np.int64)
            bits[idx, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return bits


def union_bitsets(bits: np.ndarray, vertex_sets) -> np.ndarray:
    """Row i: OR over the vertices of ``vertex_sets[i]`` of ``bits``."""
    out = np.zeros((len(vertex_sets), bits.shape[1]), dtype=np.uint64)
    for i, vs in enumerate(vertex_sets):
        if vs:
            out[i] = np.bitwise_or.reduce(bits[np.fromiter(vs, dtype=np.int64)], axis=0)
    return out


def count_disjoint_pairs(sets_a, sets_b, n: int) -> int:
    """Number of pairs (A, B) with vertex-disjoint sets."""
    if not sets_a or not sets_b:
        return 0
    bits = path_bitsets(sets_a, n)
    hit = union_bitsets(bits, sets_b)
    meet = int(np.bitwise_count(hit).sum())
    return len(sets_a) * len(sets_b) - meet


@dataclass
class AugmentingFamily:
    params: Params
    P0: TightPath
    P0_prime: TightPath
    stub: int
    J_s: tuple
    J_e: tuple
    family_A: dict   # j-set -> PathNode (path begins at the J_e end of P0)
    family_B: dict   # j-set -> PathNode (path begins at the J_s end of P0)
    disjoint_pairs: int
    heavy: set
    runs: tuple      # the two FrayOutcomes

    @property
    def pair_fraction(self) -> float:
        tot = len(self.family_A) * len(self.family_B)
        return self.disjoint_pairs / tot if tot else 0.0

    def extra_vertices(self, side: str) -> list:
        fam = self.family_A if side == "A" else self.family_B
        return [set(node.added_vertices()) for node in fam.values()]


def trunk_lengths(params: Params, consts: RunConstants, l1: float) -> tuple[int, int]:
    """(|P0|, stub) for a run: |P0| = ceil(trunk_fraction * L1)."""
    return math.ceil(consts.trunk_fraction * l1), consts.stub(params.n)


def build_family(oracle: BaseOracle, params: Params, consts: RunConstants, P0_prime: TightPath,
                 stub: int | None = None, round: int = 0, cap: int | None = None,
                 compiled: bool = True, snapshot_prefix=None) -> AugmentingFamily:
    """Trim the stubs, run the two breadth-first searches and pair their ends.

    Raises FamilyFailure unless both runs stop at S4 and at least a 1 - eps
    fraction of end pairs have vertex-disjoint augmenting parts.
    """
    stub = consts.stub(params.n) if stub is None else stub
    L = P0_prime.length
    P0_len = L - 2 * stub
    if P0_len < 1:
        raise ValueError(f"path of length {L} too short for two stubs of {stub} edges")
    step = params.step
    X = tuple(P0_prime.vertex_seq)
    P0 = TightPath(X[stub * step: stub * step + params.v(P0_len)], params.k, params.j)
    Y = X[::-1]

    snap = (lambda tag: f"{snapshot_prefix}_{tag}.csv") if snapshot_prefix else (lambda tag: None)
    run_a = fray(oracle, params, consts, P0, P0_prime, side_seeds(Y, params, P0_len, stub), forb=(),
                 round=round, cap=cap, snapshot_path=snap("A"), compiled=compiled)
    if run_a.stop != S4:
        raise FamilyFailure("A", run_a.stop, run_a)
    heavy = heavy_vertices(run_a.paths.values(), params, consts, exclude=X)
    run_b = fray(oracle, params, consts, P0, P0_prime, side_seeds(X, params, P0_len, stub), forb=heavy,
                 round=round, cap=cap, snapshot_path=snap("B"), compiled=compiled)
    if run_b.stop != S4:
        raise FamilyFailure("B", run_b.stop, run_b)
    sets_a = [set(nd.added_vertices()) for nd in run_a.paths.values()]
    sets_b = [set(nd.added_vertices()) for nd in run_b.paths.values()]
    pairs = count_disjoint_pairs(sets_a, sets_b, params.n)
    fam = AugmentingFamily(params=params, P0=P0, P0_prime=P0_prime, stub=stub, J_s=P0.start, J_e=P0.end,
                           family_A=run_a.paths, family_B=run_b.paths, disjoint_pairs=pairs, heavy=heavy,
                           runs=(run_a, run_b))
    if pairs < (1 - consts.eps) * len(sets_a) * len(sets_b):
        raise FamilyFailure("pairs", f"disjoint fraction {fam.pair_fraction:.4f}", fam)
    return fam
