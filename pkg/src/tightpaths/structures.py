"""j-sets, extendable partitions, tight paths and cycles, and their validators."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .params import Params

JSet = tuple  # sorted tuple of j distinct vertex ids
Partition = tuple  # ordered tuple of blocks (C_0, C_1, ..., C_r), each a sorted tuple

EdgeTest = Callable[[tuple], bool]


def jset(vertices: Iterable[int]) -> JSet:
    vs = tuple(sorted(int(v) for v in vertices))
    if len(set(vs)) != len(vs):
        raise ValueError(f"repeated vertex in {vs}")
    return vs


def is_partition(part: Partition, params: Params, J: Sequence[int] | None = None) -> bool:
    """Check block sizes (a, k-j, ..., k-j) and that the blocks partition ``J``."""
    if len(part) != params.r + 1:
        return False
    sizes = [len(b) for b in part]
    if sizes[0] != params.a or any(s != params.step for s in sizes[1:]):
        return False
    flat = [v for b in part for v in b]
    if len(set(flat)) != len(flat):
        return False
    return J is None or set(flat) == set(J)


def split_partition(seq: Sequence[int], params: Params) -> Partition:
    """Block structure of the last j vertices of ``seq`` in path order."""
    tail = list(seq[len(seq) - params.j:])
    blocks = [tuple(sorted(tail[: params.a]))]
    for i in range(params.r):
        lo = params.a + i * params.step
        blocks.append(tuple(sorted(tail[lo: lo + params.step])))
    return tuple(blocks)


def lexicographic_partition(J: JSet, params: Params) -> Partition:
    return split_partition(sorted(J), params)


def child_extensions(part: Partition, new: Sequence[int], params: Params):
    """Yield ``(child, child_partition, ordered_tail)`` for an edge J + new.

    ``ordered_tail`` is the new edge in path order: the parent end with its
    first full block rearranged so the chosen a-subset comes last, followed by
    the new vertices. Replacing the parent's last j vertices by it gives a
    valid sequence for the extended path.
    """
    new = tuple(sorted(new))
    if params.r >= 1:
        pool, rest = part[1], part[2:] + (new,)
        head = part[0]
    else:
        # no full block in J: the a-subset is taken from the new vertices
        pool, rest = new, ()
        head = part[0]
    for Z in itertools.combinations(pool, params.a):
        remaining = tuple(v for v in pool if v not in Z)
        child_part = (Z,) + rest
        child = jset(v for b in child_part for v in b)
        if params.r >= 1:
            ordered = head + remaining + Z + tuple(v for b in rest for v in b)
        else:
            ordered = head + remaining + Z
        yield child, child_part, ordered


def child_jsets(J: JSet, part: Partition, K: Iterable[int], params: Params):
    """Children of end ``J`` (with partition ``part``) after finding edge ``K``."""
    K = set(K)
    if len(K) != params.k:
        raise ValueError(f"K must have {params.k} vertices")
    if not K.issuperset(J):
        raise ValueError("K must contain J")
    new = sorted(K.difference(J))
    return [(child, cpart) for child, cpart, _ in child_extensions(part, new, params)]


def windows(seq: Sequence[int], k: int, j: int) -> list[tuple]:
    step = k - j
    count = (len(seq) - j) // step
    return [tuple(seq[step * i: step * i + k]) for i in range(count)]


def cyclic_windows(seq: Sequence[int], k: int, j: int) -> list[tuple]:
    step = k - j
    N = len(seq)
    return [tuple(seq[(step * i + t) % N] for t in range(k)) for i in range(N // step)]


@dataclass(frozen=True)
class TightPath:
    vertex_seq: tuple
    k: int
    j: int

    def __post_init__(self):
        object.__setattr__(self, "vertex_seq", tuple(int(v) for v in self.vertex_seq))

    @property
    def length(self) -> int:
        return (len(self.vertex_seq) - self.j) // (self.k - self.j)

    def edges(self) -> list[frozenset]:
        return [frozenset(w) for w in windows(self.vertex_seq, self.k, self.j)]

    @property
    def start(self) -> JSet:
        return jset(self.vertex_seq[: self.j])

    @property
    def end(self) -> JSet:
        return jset(self.vertex_seq[-self.j:])

    def reversed(self) -> "TightPath":
        return TightPath(self.vertex_seq[::-1], self.k, self.j)

    def subpath(self, first_edge: int, length: int) -> "TightPath":
        """Sub-path made of ``length`` consecutive edges starting at ``first_edge``."""
        step = self.k - self.j
        lo = first_edge * step
        return TightPath(self.vertex_seq[lo: lo + self.j + length * step], self.k, self.j)


@dataclass(frozen=True)
class TightCycle:
    vertex_seq: tuple
    k: int
    j: int

    def __post_init__(self):
        object.__setattr__(self, "vertex_seq", tuple(int(v) for v in self.vertex_seq))

    @property
    def length(self) -> int:
        return len(self.vertex_seq) // (self.k - self.j)

    def edges(self) -> list[frozenset]:
        return [frozenset(w) for w in cyclic_windows(self.vertex_seq, self.k, self.j)]


def path_edges(path: TightPath, params: Params | None = None) -> list[frozenset]:
    return path.edges()


def _as_test(edge_test) -> EdgeTest:
    if callable(edge_test):
        return edge_test
    edges = {frozenset(e) for e in edge_test}
    return lambda K: frozenset(K) in edges


def validate_path(path: TightPath, edge_test) -> bool:
    """True iff ``path`` is a well-formed tight path all of whose windows pass."""
    return path_problem(path, edge_test) is None


def path_problem(path: TightPath, edge_test) -> str | None:
    seq, k, j = path.vertex_seq, path.k, path.j
    if not 1 <= j < k:
        return "bad parameters"
    if len(seq) < j or (len(seq) - j) % (k - j):
        return "degenerate length"
    if len(set(seq)) != len(seq):
        return "repeated vertex"
    test = _as_test(edge_test)
    for w in windows(seq, k, j):
        if not test(tuple(sorted(w))):
            return "wrong edge"
    return None


def validate_cycle(cycle: TightCycle, edge_test) -> bool:
    return cycle_problem(cycle, edge_test) is None


def cycle_problem(cycle: TightCycle, edge_test) -> str | None:
    seq, k, j = cycle.vertex_seq, cycle.k, cycle.j
    if not 1 <= j < k:
        return "bad parameters"
    if len(set(seq)) != len(seq):
        return "repeated vertex"
    if len(seq) < k or len(seq) % (k - j):
        return "degenerate length"
    ws = [frozenset(w) for w in cyclic_windows(seq, k, j)]
    if len(set(ws)) != len(ws) or any(len(w) != k for w in ws):
        return "degenerate length"
    test = _as_test(edge_test)
    for w in ws:
        if not test(tuple(sorted(w))):
            return "wrong edge"
    return None


def bridge_windows(tail: Sequence[int], R: Sequence[int], head: Sequence[int], params: Params) -> list[tuple]:
    """The s wrap-around windows joining a path's last j vertices, R and its first j."""
    bridge = tuple(tail) + tuple(R) + tuple(head)
    step = params.step
    return [bridge[step * m: step * m + params.k] for m in range(params.s)]


def closing_windows(path: TightPath, R: Sequence[int], params: Params) -> list[frozenset]:
    """Edges needed to close ``path`` into a cycle through the outside vertices ``R``."""
    R = tuple(int(v) for v in R)
    if len(R) != params.b:
        raise ValueError(f"need exactly b={params.b} outside vertices, got {len(R)}")
    if len(set(R)) != len(R) or set(R) & set(path.vertex_seq):
        raise ValueError("R must be distinct vertices outside the path")
    seq = path.vertex_seq
    return [frozenset(w) for w in bridge_windows(seq[-params.j:], R, seq[: params.j], params)]


def close_cycle(path: TightPath, R: Sequence[int]) -> TightCycle:
    return TightCycle(tuple(path.vertex_seq) + tuple(R), path.k, path.j)


def hamilton_bound(n: int, k: int, j: int) -> int:
    return n // (k - j)


def num_children(params: Params) -> int:
    return math.comb(params.step, params.a)
