"""Exhaustive longest j-tight path and cycle on small explicit hypergraphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .oracle import read_edge_list
from .structures import TightCycle, validate_cycle


class BudgetExceeded(RuntimeError):
    """The search needed more steps than allowed; no answer is given."""


@dataclass
class SmallInstance:
    n: int
    k: int
    j: int
    edges: frozenset = field(default_factory=frozenset)
    cap: int = 12
    budget: int = 5_000_000

    def __post_init__(self):
        if not 1 <= self.j <= self.k - 1:
            raise ValueError(f"need 1 <= j <= k-1, got k={self.k}, j={self.j}")
        if self.n > self.cap:
            raise ValueError(f"n={self.n} exceeds the brute-force cap {self.cap}")
        edges = set()
        for e in self.edges:
            e = tuple(sorted(int(v) for v in e))
            if len(e) != self.k or len(set(e)) != self.k or e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"malformed edge {e}")
            edges.add(e)
        self.edges = frozenset(edges)

    @classmethod
    def complete(cls, n, k, j, **kw):
        return cls(n, k, j, frozenset(itertools.combinations(range(n), k)), **kw)

    @classmethod
    def from_file(cls, path, n=None, k=None, j=2, **kw):
        edges = read_edge_list(path)
        if k is None:
            if not edges:
                raise ValueError("cannot infer k from an empty edge list")
            k = len(edges[0])
        if n is None:
            n = 1 + max((max(e) for e in edges), default=k)
        return cls(n, k, j, frozenset(edges), **kw)


class _Counter:
    def __init__(self, budget):
        self.left = budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("brute-force step budget exhausted")


def _is_edge(inst, vs) -> bool:
    return tuple(sorted(vs)) in inst.edges


def brute_longest_path(inst: SmallInstance) -> int:
    """Maximum number of edges in a j-tight path; 0 when there is no edge."""
    if not inst.edges:
        return 0
    k, j = inst.k, inst.j
    step = k - j
    steps = _Counter(inst.budget)
    memo: dict = {}

    def extend(used: int, tail: tuple) -> int:
        # longest extension from an ordered end ``tail`` (last j vertices)
        key = (used, tail)
        if key in memo:
            return memo[key]
        steps.tick()
        best = 0
        free = [v for v in range(inst.n) if not used >> v & 1]
        for new in itertools.permutations(free, step):
            if _is_edge(inst, tail + new):
                nxt = (tail + new)[-j:]
                mask = used
                for v in new:
                    mask |= 1 << v
                best = max(best, 1 + extend(mask, nxt))
        memo[key] = best
        return best

    best = 0
    for e in inst.edges:
        for order in itertools.permutations(e):
            mask = 0
            for v in order:
                mask |= 1 << v
            best = max(best, 1 + extend(mask, order[-j:]))
    return best


def brute_longest_cycle(inst: SmallInstance) -> int | None:
    """Longest j-tight cycle length, or None when there is none.

    The lexicographically smallest edge of the cycle is fixed as its first
    window, which removes rotations; every ordering of it is tried.
    """
    if not inst.edges:
        return None
    k, j, n = inst.k, inst.j, inst.n
    step = k - j
    steps = _Counter(inst.budget)
    best = None
    edge_list = sorted(inst.edges)
    for first in edge_list:
        lo = first
        for order in itertools.permutations(first):
            seq = list(order)
            used = set(order)
            stack = [(seq, used)]
            while stack:
                seq, used = stack.pop()
                steps.tick()
                N = len(seq)
                if N % step == 0 and N >= k:
                    cyc = TightCycle(tuple(seq), k, j)
                    L = N // step
                    if (best is None or L > best) and validate_cycle(cyc, inst.edges):
                        if all(tuple(sorted(e)) >= lo for e in cyc.edges()):
                            best = L
                if N + step > n:
                    continue
                free = [v for v in range(n) if v not in used]
                for new in itertools.permutations(free, step):
                    window = tuple(seq[N - j:]) + new
                    key = tuple(sorted(window))
                    if key in inst.edges and key > lo:
                        stack.append((seq + list(new), used | set(new)))
    return best
