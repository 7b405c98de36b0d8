"""Lazily sampled edges of the binomial random k-uniform hypergraph.

Every k-set K gets, for each round r, a uniform draw computed from a keyed
hash of (seed, K, r). The draw does not depend on query order, so searches
that interleave their queries stay reproducible. Only counters and, when
tracking is on, a memo of the sampled k-sets are kept; the hypergraph itself
is never materialised.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .params import Params

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finaliser on a Python int."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(_M1)
        x ^= x >> np.uint64(27)
        x *= np.uint64(_M2)
        x ^= x >> np.uint64(31)
    return x


def _unit(h: np.ndarray) -> np.ndarray:
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class OracleError(ValueError):
    pass


class BaseOracle:
    """Query counting and memo bookkeeping shared by sampled and replayed oracles."""

    def __init__(self, n: int, k: int, rounds: int, track: bool = True):
        self.n = n
        self.k = k
        self.rounds = rounds
        self.track = track
        self.memo: dict[tuple, bool] = {}
        self.query_counter = Counter()
        self.memo_hits = Counter()
        self.phase_hits = 0
        self._phase_seen: set | None = None

    # -- subclasses supply the raw per-row outcome
    def _outcome_rows(self, rows: np.ndarray, round: int) -> np.ndarray:
        raise NotImplementedError

    def _check_round(self, round: int):
        if not 0 <= round < self.rounds:
            raise OracleError(f"round {round} out of range (have {self.rounds})")

    def canonical(self, K: Iterable[int]) -> tuple:
        Kt = tuple(sorted(int(v) for v in K))
        if len(Kt) != self.k or len(set(Kt)) != self.k:
            raise OracleError(f"malformed k-set {Kt} (k={self.k})")
        if Kt[0] < 0 or Kt[-1] >= self.n:
            raise OracleError(f"k-set {Kt} not inside [0, {self.n})")
        return Kt

    def begin_phase(self):
        """Start counting repeat queries local to one search phase."""
        self._phase_seen = set()
        self.phase_hits = 0

    def end_phase(self) -> int:
        hits = self.phase_hits
        self._phase_seen = None
        return hits

    def _record(self, key: tuple, round: int, outcome: bool):
        if self._phase_seen is not None:
            if (key, round) in self._phase_seen:
                self.phase_hits += 1
            else:
                self._phase_seen.add((key, round))
        if self.track:
            if (key, round) in self.memo:
                self.memo_hits[round] += 1
                return
            self.memo[(key, round)] = outcome
        self.query_counter[round] += 1

    def query(self, K: Iterable[int], round: int = 0) -> bool:
        """Is K an edge in any round up to and including ``round``?"""
        self._check_round(round)
        key = self.canonical(K)
        if self.track and (key, round) in self.memo:
            outcome = self.memo[(key, round)]
        else:
            outcome = bool(self._outcome_rows(np.array([key], dtype=np.int64), round)[0])
        self._record(key, round, outcome)
        return outcome

    def peek(self, rows: np.ndarray, round: int = 0) -> np.ndarray:
        """Outcomes for many k-sets (one per row) without counting them as queries."""
        self._check_round(round)
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != self.k:
            raise OracleError(f"expected an (m, {self.k}) array of k-sets")
        if len(rows) == 0:
            return np.zeros(0, dtype=bool)
        return self._outcome_rows(rows, round)

    def commit(self, rows: np.ndarray, round: int, outcomes: np.ndarray):
        """Book the first ``len(rows)`` peeked k-sets as issued queries."""
        m = len(rows)
        if m == 0:
            return
        if not self.track and self._phase_seen is None:
            self.query_counter[round] += m
            return
        canon = np.sort(np.asarray(rows, dtype=np.int64), axis=1)
        for row, out in zip(canon.tolist(), np.asarray(outcomes).tolist()):
            self._record(tuple(row), round, bool(out))

    def edge_test(self, round: int = 0):
        """Predicate over k-sets that queries this oracle, for the validators."""
        return lambda K: self.query(K, round)

    @property
    def total_queries(self) -> int:
        return sum(self.query_counter.values())


class EdgeOracle(BaseOracle):
    """Multi-round Bernoulli edge source for H^k(n, p).

    ``round_probs`` lists the per-round probabilities; a k-set is an edge by
    round r if its draw succeeded in any round <= r.
    """

    def __init__(self, params: Params | None = None, round_probs: Sequence[float] = (), seed: int = 0,
                 track: bool = True, n: int | None = None, k: int | None = None):
        if params is not None:
            n, k = params.n, params.k
        if n is None or k is None:
            raise OracleError("need params or explicit n and k")
        probs = tuple(float(p) for p in round_probs)
        if not probs:
            raise OracleError("need at least one round probability")
        for p in probs:
            if not (0.0 <= p <= 1.0) or math.isnan(p):
                raise OracleError(f"round probability {p} outside [0, 1]")
        super().__init__(n, k, len(probs), track=track)
        self.round_probs = probs
        self.seed = int(seed) & MASK64
        base = mix64(self.seed ^ 0x5EED5EED5EED5EED)
        ids = np.arange(n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            self._vertex_keys = mix64_array(ids * np.uint64(_GOLDEN) + np.uint64(base))
        self._round_salts = [mix64(base + (r + 1) * _GOLDEN) for r in range(len(probs))]

    def set_hash(self, rows: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self._vertex_keys[rows].sum(axis=1, dtype=np.uint64)

    def draws(self, rows: np.ndarray, round: int) -> np.ndarray:
        """Uniform [0, 1) draw of each row's k-set in one round."""
        h = self.set_hash(np.asarray(rows, dtype=np.int64))
        return self._draws_from_hash(h, round)

    def _draws_from_hash(self, h: np.ndarray, round: int) -> np.ndarray:
        return _unit(mix64_array(h ^ np.uint64(self._round_salts[round])))

    def _outcome_rows(self, rows: np.ndarray, round: int) -> np.ndarray:
        h = self.set_hash(rows)
        out = np.zeros(len(rows), dtype=bool)
        for r in range(round + 1):
            if self.round_probs[r] > 0:
                out |= self._draws_from_hash(h, r) < self.round_probs[r]
        return out


def new_oracle(params: Params, round_probs: Sequence[float], seed: int, track: bool = True) -> EdgeOracle:
    return EdgeOracle(params, round_probs, seed, track=track)


class ReplayOracle(BaseOracle):
    """Fixed edge set; every round answers membership."""

    def __init__(self, edges: Iterable[Iterable[int]], n: int, k: int, rounds: int = 2, track: bool = True):
        super().__init__(n, k, rounds, track=track)
        self.edges = frozenset(self.canonical(e) for e in edges)
        self.round_probs = None

    def _outcome_rows(self, rows: np.ndarray, round: int) -> np.ndarray:
        canon = np.sort(rows, axis=1).tolist()
        return np.fromiter((tuple(r) in self.edges for r in canon), dtype=bool, count=len(canon))


def replay_oracle(edge_list: Iterable[Iterable[int]], n: int, k: int, rounds: int = 2) -> ReplayOracle:
    return ReplayOracle(edge_list, n, k, rounds=rounds)


def complete_edges(n: int, k: int):
    return itertools.combinations(range(n), k)


def read_edge_list(path) -> list[tuple]:
    """Plain-text edge list: one edge per line, space-separated vertex ids; '#' comments."""
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            edges.append(tuple(sorted(int(tok) for tok in line.split())))
        except ValueError as exc:
            raise OracleError(f"{path}:{lineno}: {exc}") from None
    return edges


def write_edge_list(path, edges: Iterable[Iterable[int]], header: str | None = None):
    lines = [f"# {header}"] if header else []
    lines += [" ".join(str(v) for v in sorted(e)) for e in edges]
    Path(path).write_text("\n".join(lines) + "\n")


def load_replay(path, n: int | None = None, k: int | None = None) -> ReplayOracle:
    edges = read_edge_list(path)
    if k is None:
        if not edges:
            raise OracleError("cannot infer k from an empty edge list")
        k = len(edges[0])
    if n is None:
        n = 1 + max((max(e) for e in edges), default=k)
    return ReplayOracle(edges, n, k)
