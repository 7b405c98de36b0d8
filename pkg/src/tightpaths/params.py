"""Parameter arithmetic shared by every search phase."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Params:
    """Arithmetic skeleton for j-tight structures in a k-uniform hypergraph.

    ``a`` is the residue of k modulo k-j taken in [1, k-j], ``r`` the number of
    full (k-j)-blocks in an end j-set, ``s`` the number of edges needed to close
    a path into a cycle and ``b`` the number of extra vertices those edges use.
    """

    n: int
    k: int
    j: int
    a: int
    r: int
    s: int
    b: int

    @property
    def step(self) -> int:
        """Vertices added per edge, k - j."""
        return self.k - self.j

    @property
    def batch_size(self) -> int:
        """Number of j-sets activated by one found edge."""
        return math.comb(self.k - self.j, self.a)

    def v(self, length: int) -> int:
        """Vertex count of a path with ``length`` edges."""
        return self.j + length * (self.k - self.j)


def derive_params(n: int, k: int, j: int) -> Params:
    if not (1 <= j <= k - 1):
        raise ValueError(f"tightness j={j} must satisfy 1 <= j <= k-1 (k={k})")
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    step = k - j
    a = k % step or step
    s = -(-j // step)
    r = s - 1
    b = k - j - a
    assert a + r * step == j and b == s * step - j
    return Params(n=n, k=k, j=j, a=a, r=r, s=s, b=b)


def p_zero_exact(params: Params) -> Fraction:
    return Fraction(1, math.comb(params.step, params.a) * math.comb(params.n, params.step))


def p_zero(params: Params) -> float:
    """Threshold probability 1 / (C(k-j, a) C(n, k-j)) for linear-length paths."""
    return float(p_zero_exact(params))


def l_one(params: Params, c: float) -> float:
    """Critical length (1 - c^(-1/(k-j))) / (k-j) * n."""
    if not c > 1:
        raise ValueError(f"supercriticality constant must exceed 1, got c={c}")
    step = params.step
    return (1.0 - c ** (-1.0 / step)) / step * params.n


def log_sq(n: int, floor: int = 4) -> int:
    """ceil((ln n)^2), floored so that toy instances keep a few seeds."""
    return max(floor, math.ceil(math.log(n) ** 2))


def default_c_chain(j: int) -> tuple[float, ...]:
    return tuple(2.0 * 4.0**i for i in range(j))


def default_omega(n: int) -> float:
    return max(3.0, math.log(math.log(n)))


@dataclass(frozen=True)
class RunConstants:
    """Finite-n stand-ins for the asymptotic constants of a run.

    ``p0_fraction`` is the length of the trunk path as a fraction of L1 and
    defaults to 1 - delta/2; ``stub_edges`` is the number of edges trimmed from
    each end of the round-one path (default ceil((ln n)^2)).
    """

    c: float
    delta: float = 0.3
    eps: float = 0.05
    c_chain: tuple[float, ...] = ()
    omega: float = 3.0
    p0_fraction: float | None = None
    stub_edges: int | None = None

    def __post_init__(self):
        if not self.c > 1:
            raise ValueError(f"c must exceed 1, got {self.c}")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 < self.eps < self.delta:
            raise ValueError("eps must lie in (0, delta)")
        chain = tuple(float(x) for x in self.c_chain)
        object.__setattr__(self, "c_chain", chain)
        if chain:
            if chain[0] <= 1 or any(x >= y for x, y in zip(chain, chain[1:])):
                raise ValueError("c_chain must be strictly increasing and start above 1")
            if self.eps * chain[-1] >= 1:
                raise ValueError("need eps * c_{j-1} < 1")
        if not self.omega > 1:
            raise ValueError("omega must exceed 1")
        if self.p0_fraction is not None and not 0 < self.p0_fraction < 1:
            raise ValueError("p0_fraction must lie in (0, 1)")

    def chain_for(self, j: int) -> tuple[float, ...]:
        chain = self.c_chain or default_c_chain(j)
        if len(chain) < j:
            raise ValueError(f"c_chain needs {j} entries, got {len(chain)}")
        return chain[:j]

    @property
    def trunk_fraction(self) -> float:
        return self.p0_fraction if self.p0_fraction is not None else 1 - self.delta / 2

    def stub(self, n: int) -> int:
        return self.stub_edges if self.stub_edges is not None else log_sq(n)

    def probabilities(self, params: Params) -> tuple[float, float, float]:
        """Return (p, p', p'') with p' = (1 - 1/omega) p and p'' = p - p'."""
        p = self.c * p_zero(params)
        p1 = (1 - 1 / self.omega) * p
        return p, p1, p - p1


def degree_thresholds(params: Params, consts: RunConstants) -> tuple[float, ...]:
    """eps * c_i * n^(j-i) for i = 0..j-1."""
    chain = consts.chain_for(params.j)
    return tuple(consts.eps * chain[i] * params.n ** (params.j - i) for i in range(params.j))


def time_cap(params: Params, consts: RunConstants) -> int:
    return max(4, math.ceil(consts.eps**2 * params.n**params.k))


def disc_cap(params: Params, consts: RunConstants) -> int:
    return max(4, math.ceil(consts.eps**2 * params.n**params.j))
