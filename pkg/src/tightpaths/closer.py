"""Closing an augmented path into a cycle with second-round edges.

For an end A on one side and B on the other whose augmenting parts are
vertex-disjoint, P_{A,B} runs from A through the trunk to B. Appending b
outside vertices R and reading the cyclic windows adds s bridge windows; if
all of them are edges by the second round, the result is a tight cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fray import AugmentingFamily, path_bitsets, union_bitsets
from .oracle import BaseOracle, EdgeOracle, OracleError, ReplayOracle
from .params import Params, derive_params, l_one
from .structures import TightCycle, TightPath, closing_windows, cycle_problem

CERT_HEADER = "# tightpaths certificate v1"


@dataclass
class ClosingTriple:
    A: tuple
    B: tuple
    R: tuple
    required_edges: list


@dataclass
class CloseOutcome:
    cycle: TightCycle | None
    triple: ClosingTriple | None
    tried: int
    admissible: int
    queries: int


def joined_path(seq_a, seq_b, params: Params, P0_len: int) -> tuple:
    """Vertex sequence of P_{A,B}: A's path reversed, then B's path beyond the trunk."""
    return tuple(seq_a[::-1]) + tuple(seq_b[params.v(P0_len):])


def try_close(family: AugmentingFamily, oracle: BaseOracle, params: Params, budget: int = 2_000_000,
              seed: int = 0, round: int = 1, chunk: int = 1 << 15) -> CloseOutcome:
    """Test random admissible triples (A, B, R) until one closes or ``budget`` run out.

    Pairs are drawn uniformly without replacement; pairs whose augmenting
    parts meet are skipped and do not use budget. The bridge windows are
    queried in ``round`` (edges of any earlier round count as well).
    """
    rng = np.random.default_rng(seed)
    j, k, b = params.j, params.k, params.b
    P0_len = family.P0.length
    keys_a, keys_b = list(family.family_A), list(family.family_B)
    na, nb = len(keys_a), len(keys_b)
    total = na * nb
    out = CloseOutcome(None, None, 0, 0, 0)
    if total == 0 or budget <= 0:
        return out
    nodes_a = [family.family_A[J] for J in keys_a]
    nodes_b = [family.family_B[J] for J in keys_b]
    extra_a = [set(nd.added_vertices()) for nd in nodes_a]
    extra_b = [set(nd.added_vertices()) for nd in nodes_b]
    meet = union_bitsets(path_bitsets(extra_a, params.n), extra_b)  # row b marks A paths met by B
    # ordered ends: the last j vertices of each stored path
    head_a = np.array([nd.tail[-j:][::-1] for nd in nodes_a], dtype=np.int64)  # first j of P_{A,B}
    tail_b = np.array([nd.tail[-j:] for nd in nodes_b], dtype=np.int64)
    seen: set = set()
    step = params.step
    while out.tried < budget and len(seen) < total:
        m = min(chunk, total - len(seen))
        idx = np.unique(rng.integers(0, total, size=m))
        if seen:
            idx = idx[[int(x) not in seen for x in idx]]
        seen.update(idx.tolist())
        ia, ib = idx // nb, idx % nb
        ok = ((meet[ib, ia >> 6] >> (ia & 63).astype(np.uint64)) & np.uint64(1)) == 0
        ia, ib = ia[ok], ib[ok]
        out.admissible += len(ia)
        if len(ia) == 0:
            continue
        room = budget - out.tried
        ia, ib = ia[:room], ib[:room]
        if b == 0:
            bridge = np.concatenate([tail_b[ib], head_a[ia]], axis=1)
            Rs = np.zeros((len(ia), 0), dtype=np.int64)
        else:
            Rs = np.array([_draw_R(rng, params, extra_a[x] | extra_b[y], family) for x, y in zip(ia, ib)],
                          dtype=np.int64).reshape(len(ia), b)
            bridge = np.concatenate([tail_b[ib], Rs, head_a[ia]], axis=1)
        rows = np.stack([bridge[:, step * w: step * w + k] for w in range(params.s)], axis=1)
        flat = rows.reshape(-1, k)
        res = oracle.peek(flat, round).reshape(len(ia), params.s)
        closed = np.flatnonzero(res.all(axis=1))
        if len(closed):
            h = int(closed[0])
            used = h + 1
        else:
            used = len(ia)
        oracle.commit(flat[: used * params.s], round, res[:used].reshape(-1))
        out.tried += used
        out.queries += used * params.s
        if len(closed):
            x, y = int(ia[h]), int(ib[h])
            seq_a = nodes_a[x].sequence(j)
            seq_b = nodes_b[y].sequence(j)
            pab = TightPath(joined_path(seq_a, seq_b, params, P0_len), k, j)
            R = tuple(int(v) for v in Rs[h])
            req = closing_windows(pab, R, params)
            cyc = TightCycle(pab.vertex_seq + R, k, j)
            problem = cycle_problem(cyc, lambda K: bool(oracle.peek(np.array([K]), round)[0]))
            if problem is not None:
                raise AssertionError(f"closed configuration failed validation: {problem}")
            out.cycle = cyc
            out.triple = ClosingTriple(keys_a[x], keys_b[y], R, req)
            return out
    return out


def _draw_R(rng, params: Params, extras, family: AugmentingFamily) -> tuple:
    taken = set(family.P0_prime.vertex_seq) | extras
    R: list = []
    while len(R) < params.b:
        v = int(rng.integers(params.n))
        if v not in taken and v not in R:
            R.append(v)
    return tuple(R)


def expected_closures(triples: int, params: Params, p_edge: float) -> float:
    """First-moment count triples * q^s, q the chance a window is an edge by the closing round."""
    return float(triples) * p_edge**params.s


# -- certificates

def write_certificate(path, cycle: TightCycle, params: Params, oracle: BaseOracle, round: int = 1,
                      delta: float | None = None, c: float | None = None, extra: dict | None = None):
    lines = [CERT_HEADER, f"n = {params.n}", f"k = {params.k}", f"j = {params.j}", f"round = {round}"]
    if isinstance(oracle, EdgeOracle):
        lines += ["mode = hashed", f"seed = {oracle.seed}",
                  "round_probs = " + " ".join(repr(p) for p in oracle.round_probs)]
    elif isinstance(oracle, ReplayOracle):
        lines += ["mode = replay", f"rounds = {oracle.rounds}"]
    else:
        raise OracleError("unsupported oracle type for certificates")
    if delta is not None:
        lines.append(f"delta = {delta!r}")
    if c is not None:
        lines.append(f"c = {c!r}")
    for key, val in (extra or {}).items():
        lines.append(f"{key} = {val}")
    lines.append(f"length = {cycle.length}")
    lines.append("cycle = " + " ".join(str(v) for v in cycle.vertex_seq))
    if isinstance(oracle, ReplayOracle):
        for e in sorted(oracle.edges):
            lines.append("edge = " + " ".join(str(v) for v in e))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class Certificate:
    fields: dict
    cycle: tuple
    edges: list

    def oracle(self) -> BaseOracle:
        n, k = int(self.fields["n"]), int(self.fields["k"])
        if self.fields.get("mode") == "replay":
            return ReplayOracle(self.edges, n, k, rounds=int(self.fields.get("rounds", 2)), track=False)
        probs = tuple(float(x) for x in self.fields["round_probs"].split())
        return EdgeOracle(round_probs=probs, seed=int(self.fields["seed"]), track=False, n=n, k=k)


class CertificateError(ValueError):
    pass


def read_certificate(path) -> Certificate:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != CERT_HEADER:
        raise CertificateError("not a tightpaths certificate (bad header)")
    fields, edges, cycle = {}, [], None
    for line in text[1:]:
        if not line.strip() or line.startswith("#"):
            continue
        if "=" not in line:
            raise CertificateError(f"malformed line: {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "edge":
            edges.append(tuple(int(v) for v in val.split()))
        elif key == "cycle":
            cycle = tuple(int(v) for v in val.split())
        else:
            fields[key] = val
    for req in ("n", "k", "j", "round", "mode"):
        if req not in fields:
            raise CertificateError(f"missing field {req}")
    if cycle is None:
        raise CertificateError("missing cycle")
    return Certificate(fields, cycle, edges)


@dataclass
class Verdict:
    ok: bool
    problem: str | None
    length: int
    bound: float | None

    def __str__(self):
        if not self.ok:
            return f"FAIL: {self.problem}"
        msg = f"PASS: cycle of length {self.length}"
        if self.bound is not None:
            msg += f" clears (1 - delta) L1 = {self.bound:.2f}"
        return msg


def check_certificate(path) -> Verdict:
    """Rebuild the oracle from the certificate and re-query every window."""
    cert = read_certificate(path)
    f = cert.fields
    n, k, j, rnd = int(f["n"]), int(f["k"]), int(f["j"]), int(f["round"])
    oracle = cert.oracle()
    if any(v < 0 or v >= n for v in cert.cycle):
        return Verdict(False, "vertex out of range", 0, None)
    cyc = TightCycle(cert.cycle, k, j)
    problem = cycle_problem(cyc, lambda K: bool(oracle.peek(np.array([K]), rnd)[0]))
    bound = None
    if "delta" in f and "c" in f:
        bound = (1 - float(f["delta"])) * l_one(derive_params(n, k, j), float(f["c"]))
        if problem is None and cyc.length < bound:
            problem = "too short"
    if problem is None and "length" in f and int(f["length"]) != cyc.length:
        problem = "degenerate length"
    return Verdict(problem is None, problem, cyc.length, bound)
