"""Depth-first growth of a single long j-tight path.

j-sets move from neutral to active (a path ending in them is known) to
explored (every eligible k-set containing them has been queried). Queries
always come from the most recently activated j-set. Each found edge
activates a batch of C(k-j, a) ends, and an empty stack triggers a new start
at a uniformly random neutral j-set.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .discovered import DiscoveredGraph, JSetIndex, eligible_extensions
from .oracle import BaseOracle
from .params import Params, RunConstants, degree_thresholds, l_one, time_cap
from .scan import make_scanner
from .pathnode import PathNode, move_marks
from .structures import TightPath, child_extensions, jset, split_partition, validate_path

DFS1, DFS2, DFS3, EXHAUSTED = "DFS1", "DFS2", "DFS3", "exhausted"


class _Entry:
    __slots__ = ("J", "part", "node", "cursor", "children", "visited")

    def __init__(self, J, part, node):
        self.J = J
        self.part = part
        self.node = node
        self.cursor = -1
        self.children = 0
        self.visited = False


@dataclass
class DfsState:
    params: Params
    stack: list = field(default_factory=list)
    explored: set = field(default_factory=set)
    disc: DiscoveredGraph = None
    index: JSetIndex = None
    t: int = 0
    best: PathNode | None = None

    def status(self, J) -> str:
        if J in self.explored:
            return "explored"
        if J in self.disc.members:
            return "active"
        return "neutral"


@dataclass
class DfsOutcome:
    path: TightPath
    stop: str
    stats: dict


def dfs_eligible_ksets(J: tuple, state: DfsState, node: PathNode | None = None, after: int = -1):
    """Lazily enumerate the k-sets still eligible from ``J`` (lexicographic on K - J)."""
    n = state.params.n
    marks = np.zeros(n, dtype=bool)
    if node is not None:
        move_marks(marks, None, node)
    rows, _ = eligible_extensions(J, state.params, marks, state.index, after=after)
    for row in rows.tolist():
        yield tuple(sorted(row))


def dfs_target(params: Params, consts: RunConstants) -> int:
    """Length stop (1 - delta/3) L1, rounded up."""
    return math.ceil((1 - consts.delta / 3) * l_one(params, consts.c))


def run_pathfinder(oracle: BaseOracle, params: Params, consts: RunConstants, round: int = 0,
                   target_length: int | None = None, seed: int = 0, start=None,
                   max_time: int | None = None, audit: bool = False, trace_path=None,
                   trace_every: int = 1000, census: bool = False, compiled: bool = True,
                   thresholds=None) -> DfsOutcome:
    """Run the depth-first search until a stopping condition fires.

    Stops when a path of ``target_length`` edges is found (DFS1, default
    (1 - delta/3) L1), after ``eps^2 n^k`` queries (DFS2), when some
    Delta_i reaches ``eps c_i n^(j-i)`` (DFS3), or when no neutral j-set is left.
    ``census`` records, at each j-set's first visit as head, the path
    length and its eligible and positive k-set counts.
    ``start`` optionally fixes the first j-set, as a vertex sequence whose
    order sets the extendable partition. ``thresholds`` replaces the Delta_i
    stop levels (for instance infinity on small explicit instances).
    """
    n, k, j = params.n, params.k, params.j
    if target_length is None:
        target_length = dfs_target(params, consts)
    cap = time_cap(params, consts) if max_time is None else max_time
    if thresholds is None:
        thresholds = degree_thresholds(params, consts)
    rng = np.random.default_rng(seed)
    scanner = make_scanner(oracle, params, prefer_compiled=compiled and not audit)

    state = DfsState(params=params, disc=DiscoveredGraph(j), index=JSetIndex(n, j))
    disc, index, stack = state.disc, state.index, state.stack
    marks = np.zeros(n, dtype=bool)
    current: PathNode | None = None
    total_jsets = math.comb(n, j)
    stop = None
    stats = {"new_starts": 0, "edges": 0, "batch_sizes": [], "census": [], "explored_children": [],
             "audit_failures": 0, "trajectory": []}
    trace_rows = []
    start_seq = tuple(start) if start is not None else None
    if oracle.track or audit:
        oracle.begin_phase()

    def activate(J, part, node, parent, edge):
        disc.record_discovery(J, parent, edge)
        index.add(J)
        entry = _Entry(J, part, node)
        stack.append(entry)
        if state.best is None or node.length > state.best.length:
            state.best = node
        return entry

    while True:
        if state.t >= cap:
            stop = DFS2
            break
        if not stack:
            if len(disc) >= total_jsets:
                stop = EXHAUSTED
                break
            if start_seq is not None:
                seq, start_seq = start_seq, None
                J = jset(seq)
                if J in disc:
                    continue
            else:
                J = jset(rng.choice(n, size=j, replace=False))
                while J in disc:
                    J = jset(rng.choice(n, size=j, replace=False))
                seq = J
            stats["new_starts"] += 1
            part = split_partition(seq, params)
            node = PathNode.root(tuple(v for b in part for v in b), 0)
            activate(J, part, node, None, None)
            if target_length <= 0:
                stop = DFS1
                break
            continue

        entry = stack[-1]
        if entry.node is not current:
            move_marks(marks, current, entry.node)
            current = entry.node
        if census and not entry.visited:
            elig, pos = scanner.count(entry.J, marks, index, round)
            stats["census"].append((entry.node.length, elig, pos))
        entry.visited = True
        budget = cap - state.t
        res = scanner.scan(entry.J, marks, index, entry.cursor, round, True, limit=budget)
        if not res.hits:
            scanner.commit(res, res.scanned, round)
            state.t += res.scanned
            if not res.exhausted:
                stop = DFS2
                break
            stack.pop()
            state.explored.add(entry.J)
            stats["explored_children"].append((entry.node.length, entry.children))
            continue
        code, ordinal, new = res.hits[0]
        scanner.commit(res, ordinal + 1, round)
        state.t += ordinal + 1
        entry.cursor = code
        K = tuple(sorted(entry.J + new))
        stats["edges"] += 1
        batch = 0
        for child, cpart, ordered in child_extensions(entry.part, new, params):
            if child in disc:
                raise AssertionError(f"child {child} already discovered")
            cnode = entry.node.extend(ordered, new)
            activate(child, cpart, cnode, entry.J, K)
            batch += 1
            if audit and not validate_path(cnode.path(k, j), lambda e: bool(oracle.peek(np.array([e]), round)[0])):
                stats["audit_failures"] += 1
        entry.children += batch
        stats["batch_sizes"].append(batch)
        if trace_path is not None and stats["edges"] % trace_every == 0:
            trace_rows.append(_trace_row(state, disc, thresholds))
        if stats["edges"] % trace_every == 0:
            stats["trajectory"].append((state.t, state.best.length, len(disc), tuple(disc.max_degree)))
        if state.best.length >= target_length:
            stop = DFS1
            break
        if disc.exceeded(thresholds) is not None:
            stop = DFS3
            break

    stats["t"] = state.t
    stats["explored"] = len(state.explored)
    stats["discovered"] = len(disc)
    stats["max_degree"] = tuple(disc.max_degree)
    stats["degree_thresholds"] = thresholds
    stats["memo_hits"] = oracle.end_phase() if (oracle.track or audit) else 0
    stats["state"] = state
    best = state.best
    path = best.path(k, j) if best is not None else TightPath((), k, j)
    if trace_path is not None:
        trace_rows.append(_trace_row(state, disc, thresholds))
        with open(trace_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "length", "discovered"] + [f"delta{i}_ratio" for i in range(j)])
            w.writerows(trace_rows)
    return DfsOutcome(path=path, stop=stop, stats=stats)


def _trace_row(state, disc, thresholds):
    best = state.best.length if state.best is not None else 0
    return [state.t, best, len(disc)] + [round(d / th, 6) for d, th in zip(disc.max_degree, thresholds)]
