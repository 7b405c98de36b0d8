"""Scanning the eligible k-sets of one j-set.

Two interchangeable routes: a generic numpy route that materialises the
candidate rows (and books every query into a tracking oracle), and a compiled
route for hashed oracles with j = 2 and k - j <= 2, which enumerates
candidates on the fly and only reports the hits. Both enumerate candidates in
lexicographic order of K - J and must agree hit for hit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discovered import JSetIndex, eligible_extensions
from .oracle import BaseOracle, EdgeOracle
from .params import Params

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


@dataclass
class ScanResult:
    hits: list = field(default_factory=list)  # (code, ordinal, new vertices)
    scanned: int = 0        # eligible candidates walked before stopping
    exhausted: bool = True  # walked past the last eligible candidate
    rows: np.ndarray | None = None
    outcomes: np.ndarray | None = None


class NumpyScanner:
    def __init__(self, oracle: BaseOracle, params: Params):
        self.oracle = oracle
        self.params = params

    def scan(self, J, blocked, excl: JSetIndex, after: int, round: int, first_only: bool,
             limit: int | None = None) -> ScanResult:
        rows, codes = eligible_extensions(J, self.params, blocked, excl, after=after)
        exhausted = True
        if limit is not None and len(rows) > limit:
            rows, codes = rows[:limit], codes[:limit]
            exhausted = False
        out = self.oracle.peek(rows, round)
        hit_idx = np.flatnonzero(out)
        j = self.params.j
        res = ScanResult(rows=rows, outcomes=out)
        if first_only and len(hit_idx):
            h = int(hit_idx[0])
            res.hits = [(int(codes[h]), h, tuple(int(v) for v in rows[h, j:]))]
            res.scanned = h + 1
            res.exhausted = False
        else:
            res.hits = [(int(codes[h]), int(h), tuple(int(v) for v in rows[h, j:])) for h in hit_idx]
            res.scanned = len(rows)
            res.exhausted = exhausted
        return res

    def count(self, J, blocked, excl, round: int) -> tuple[int, int]:
        """(eligible, positive) counts from J, without booking queries."""
        rows, _ = eligible_extensions(J, self.params, blocked, excl)
        return len(rows), int(self.oracle.peek(rows, round).sum())

    def commit(self, res: ScanResult, count: int, round: int):
        if count:
            self.oracle.commit(res.rows[:count], round, res.outcomes[:count])


if numba is not None:
    _M1 = np.uint64(0xBF58476D1CE4E5B9)
    _M2 = np.uint64(0x94D049BB133111EB)
    _S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
    _INV53 = 1.0 / float(1 << 53)

    @numba.njit(cache=True)
    def _is_edge(h, salts, probs, nround):
        for r in range(nround):
            p = probs[r]
            if p <= 0.0:
                continue
            x = h ^ salts[r]
            x = (x ^ (x >> _S30)) * _M1
            x = (x ^ (x >> _S27)) * _M2
            x = x ^ (x >> _S31)
            if float(x >> _S11) * _INV53 < p:
                return True
        return False

    @numba.njit(cache=True)
    def _scan_kernel(U, step, n, adj, keys, base, salts, probs, nround, after, first_only, limit,
                     hit_codes, hit_ord):
        # returns (hits stored, scanned, exhausted, positives); hits beyond the
        # output capacity are counted but not stored
        cap = hit_codes.shape[0]
        nh = 0
        scanned = 0
        m = U.shape[0]
        if step == 1:
            for a in range(m):
                v = U[a]
                if v <= after:
                    continue
                if scanned >= limit:
                    return min(nh, cap), scanned, False, nh
                scanned += 1
                if _is_edge(base + keys[v], salts, probs, nround):
                    if nh < cap:
                        hit_codes[nh] = v
                        hit_ord[nh] = scanned - 1
                    nh += 1
                    if first_only:
                        return min(nh, cap), scanned, False, nh
            return min(nh, cap), scanned, True, nh
        for a in range(m):
            v = U[a]
            if (v + 1) * n - 1 <= after:
                continue
            hv = base + keys[v]
            for b in range(a + 1, m):
                w = U[b]
                code = v * n + w
                if code <= after or adj[v, w]:
                    continue
                if scanned >= limit:
                    return min(nh, cap), scanned, False, nh
                scanned += 1
                if _is_edge(hv + keys[w], salts, probs, nround):
                    if nh < cap:
                        hit_codes[nh] = code
                        hit_ord[nh] = scanned - 1
                    nh += 1
                    if first_only:
                        return min(nh, cap), scanned, False, nh
        return min(nh, cap), scanned, True, nh


class CompiledScanner:
    """Compiled scan for hashed, untracked oracles with j = 2 and k - j in {1, 2}."""

    def __init__(self, oracle: EdgeOracle, params: Params):
        self.oracle = oracle
        self.params = params
        self.keys = oracle._vertex_keys
        self.salts = np.array(oracle._round_salts, dtype=np.uint64)
        self.probs = np.array(oracle.round_probs, dtype=np.float64)
        self._no_adj = np.zeros((1, 1), dtype=np.bool_)

    def _allowed(self, J, blocked, excl):
        mask = ~blocked
        mask[list(J)] = False
        bad = excl.blocked_by(J)
        if bad:
            mask[list(bad)] = False
        return np.flatnonzero(mask).astype(np.int64)

    def _run(self, J, blocked, excl, after, round, first_only, limit):
        U = self._allowed(J, blocked, excl)
        step = self.params.step
        if step == 2 and excl.adj is None:
            raise RuntimeError("compiled scan needs the dense adjacency for k - j = 2")
        adj = excl.adj if step == 2 else self._no_adj
        with np.errstate(over="ignore"):
            base = self.keys[list(J)].sum(dtype=np.uint64)
        lim = np.iinfo(np.int64).max if limit is None else int(limit)
        cap = 64
        while True:
            codes = np.empty(cap, dtype=np.int64)
            ords = np.empty(cap, dtype=np.int64)
            stored, scanned, exhausted, total = _scan_kernel(
                U, step, self.params.n, adj, self.keys, np.uint64(base), self.salts, self.probs,
                round + 1, int(after), first_only, lim, codes, ords)
            if total <= cap:
                return codes[:stored], ords[:stored], scanned, exhausted, total
            cap = 2 * total

    def scan(self, J, blocked, excl, after, round, first_only, limit=None) -> ScanResult:
        codes, ords, scanned, exhausted, _ = self._run(J, blocked, excl, after, round, first_only, limit)
        n, step = self.params.n, self.params.step
        hits = []
        for code, o in zip(codes.tolist(), ords.tolist()):
            new = (code,) if step == 1 else (code // n, code % n)
            hits.append((code, o, new))
        return ScanResult(hits=hits, scanned=int(scanned), exhausted=bool(exhausted))

    def count(self, J, blocked, excl, round):
        _, _, scanned, _, positives = self._run(J, blocked, excl, -1, round, False, None)
        return int(scanned), int(positives)

    def commit(self, res: ScanResult, count: int, round: int):
        if count:
            self.oracle.query_counter[round] += count


def make_scanner(oracle: BaseOracle, params: Params, prefer_compiled: bool = True):
    compiled_ok = (numba is not None and prefer_compiled and isinstance(oracle, EdgeOracle)
                   and not oracle.track and params.j == 2 and params.step in (1, 2)
                   and params.n <= 6000)
    return CompiledScanner(oracle, params) if compiled_ok else NumpyScanner(oracle, params)
