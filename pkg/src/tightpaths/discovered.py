"""Discovered j-sets, their i-degrees, and the eligibility filter built on them."""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict

import numpy as np

from .params import Params

NEW_START, JUMP, PIVOT = "new-start", "jump", "pivot"


class DiscoveredGraph:
    """The j-uniform hypergraph of discovered j-sets with running max i-degrees.

    ``degree[i][I]`` counts members containing the i-set ``I``; ``max_degree[i]``
    is the running maximum (Delta_i). Delta_0 is the member count. Each
    increment is tagged by its cause (new start, jump or pivot).
    """

    def __init__(self, j: int):
        self.j = j
        self.members: set = set()
        self.degree = [None] + [Counter() for _ in range(1, j)]
        self.max_degree = [0] * j
        self.causes: Counter = Counter()  # (I, cause) -> count

    def __len__(self):
        return len(self.members)

    def __contains__(self, J):
        return J in self.members

    def record_discovery(self, J: tuple, parent: tuple | None = None, edge=None) -> list[tuple[int, tuple]]:
        """Insert ``J`` and return the (i, I) counters it touched.

        ``parent`` is the j-set the edge was found from; ``None`` marks a new
        start (or a seed).
        """
        if J in self.members:
            raise ValueError(f"j-set {J} already discovered")
        self.members.add(J)
        self.max_degree[0] = len(self.members)
        parent_set = set(parent) if parent is not None else None
        touched = []
        for i in range(1, self.j):
            table = self.degree[i]
            for I in itertools.combinations(J, i):
                d = table[I] + 1
                table[I] = d
                if d > self.max_degree[i]:
                    self.max_degree[i] = d
                if parent_set is None:
                    cause = NEW_START
                elif parent_set.issuperset(I):
                    cause = PIVOT
                else:
                    cause = JUMP
                self.causes[(I, cause)] += 1
                touched.append((i, I))
        return touched

    def delta(self, i: int) -> int:
        return self.max_degree[i]

    def true_max_degree(self, i: int) -> int:
        """Delta_i recomputed from scratch; used to audit the running maxima."""
        if i == 0:
            return len(self.members)
        counts = Counter(I for J in self.members for I in itertools.combinations(J, i))
        return max(counts.values(), default=0)

    def exceeded(self, thresholds) -> int | None:
        """Smallest i with Delta_i >= threshold_i, else None."""
        for i, th in enumerate(thresholds):
            if self.max_degree[i] >= th:
                return i
        return None

    def cause_totals(self, I: tuple) -> dict[str, int]:
        return {c: self.causes[(I, c)] for c in (NEW_START, JUMP, PIVOT)}


def record_discovery(disc: DiscoveredGraph, J: tuple, parent=None, edge=None) -> DiscoveredGraph:
    disc.record_discovery(J, parent, edge)
    return disc


class JSetIndex:
    """Set of j-sets that forbid any k-set containing them.

    Keeps, for each (j-1)-set, the vertices completing it to a member, so that
    vertex-level exclusions are cheap; for j = 2 a dense adjacency matrix backs
    the pair test used by k - j >= 2.
    """

    def __init__(self, n: int, j: int, dense_limit: int = 6000):
        self.n, self.j = n, j
        self.members: set = set()
        self.link: dict[tuple, set] = defaultdict(set)
        self.adj = np.zeros((n, n), dtype=bool) if j == 2 and n <= dense_limit else None
        self._keys = None

    def __contains__(self, J):
        return J in self.members

    def __len__(self):
        return len(self.members)

    def add(self, J: tuple):
        if J in self.members:
            return
        self.members.add(J)
        for u in J:
            self.link[tuple(v for v in J if v != u)].add(u)
        if self.adj is not None:
            x, y = J
            self.adj[x, y] = self.adj[y, x] = True
        self._keys = None

    def blocked_by(self, J: tuple) -> set:
        """Vertices v such that J - u + v is a member for some u in J."""
        out: set = set()
        for u in J:
            S = tuple(v for v in J if v != u)
            s = self.link.get(S)
            if s:
                out |= s
        return out

    def keys(self) -> np.ndarray:
        if self._keys is None:
            self._keys = np.array(sorted(encode_sorted(m, self.n) for m in self.members), dtype=np.int64)
        return self._keys


def encode_sorted(vs, n: int) -> int:
    key = 0
    for v in vs:
        key = key * n + int(v)
    return key


def _combos(U: np.ndarray, size: int) -> np.ndarray:
    if size == 1:
        return U.reshape(-1, 1)
    if size == 2:
        a, b = np.triu_indices(len(U), k=1)
        return np.stack([U[a], U[b]], axis=1)
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(U.tolist(), size)),
                       dtype=np.int64)
    return flat.reshape(-1, size)


def eligible_extensions(J: tuple, params: Params, blocked: np.ndarray, excl: JSetIndex,
                        after: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """k-sets K = J + N eligible from ``J``, in lexicographic order of N.

    N avoids every vertex flagged in ``blocked`` and every vertex of J, and K
    contains no member of ``excl`` other than J itself. Only N whose code
    (base-n encoding of sorted N) exceeds ``after`` are returned. Returns
    ``(rows, codes)`` with rows of shape (m, k).
    """
    n, j, step = params.n, params.j, params.step
    mask = ~blocked.copy()
    mask[list(J)] = False
    bad = excl.blocked_by(J)
    if bad:
        mask[list(bad)] = False
    U = np.flatnonzero(mask)
    if step == 1:
        N = U.reshape(-1, 1)
        codes = U.astype(np.int64)
    else:
        if after >= 0:
            # drop leading vertices that cannot start a combination beyond the cursor
            first = after // n ** (step - 1)
            U_first_ok = U >= first
            U = U[U_first_ok]
        N = _combos(U, step)
        codes = np.zeros(len(N), dtype=np.int64)
        for c in range(step):
            codes = codes * n + N[:, c]
    if after >= 0 and len(codes):
        keep = codes > after
        N, codes = N[keep], codes[keep]
    if step >= 2 and len(N) and len(excl):
        ok = _no_inner_members(J, N, params, excl)
        N, codes = N[ok], codes[ok]
    rows = np.empty((len(N), params.k), dtype=np.int64)
    rows[:, :j] = J
    rows[:, j:] = N
    return rows, codes


def _no_inner_members(J: tuple, N: np.ndarray, params: Params, excl: JSetIndex) -> np.ndarray:
    """Reject rows where some j-subset with >= 2 vertices of N is a member."""
    j, step, n = params.j, params.step, params.n
    ok = np.ones(len(N), dtype=bool)
    if j == 2 and excl.adj is not None:
        for a, b in itertools.combinations(range(step), 2):
            ok &= ~excl.adj[N[:, a], N[:, b]]
        return ok
    keys = excl.keys()
    for t in range(2, min(j, step) + 1):
        for S in itertools.combinations(J, j - t):
            for T in itertools.combinations(range(step), t):
                cols = np.concatenate([np.broadcast_to(np.array(S, dtype=np.int64), (len(N), len(S))),
                                       N[:, list(T)]], axis=1)
                cols.sort(axis=1)
                code = np.zeros(len(N), dtype=np.int64)
                for c in range(j):
                    code = code * n + cols[:, c]
                pos = np.searchsorted(keys, code)
                pos[pos >= len(keys)] = 0
                ok &= keys[pos] != code
    return ok
