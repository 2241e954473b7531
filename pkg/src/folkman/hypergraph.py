"""The clique hypergraph H(n, k) and co-degree functions.

Vertices of H(n, k) are the edges of K_n (indexed in canonical edge order)
and its hyperedges are the edge sets of the copies of K_k.  Hyperedges are
stored as bitmasks over the vertex set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .graph import Graph, complete_graph, members
from .logint import LogInterval, certify_le, Verdict

MAX_MATERIALIZED_N = 12


class HypergraphError(ValueError):
    pass


def ell(j: int) -> int:
    """Smallest ``l`` with ``j <= binom(l, 2)``: the fewest vertices spanning ``j`` edges."""
    if j < 1:
        raise ValueError("j must be at least 1")
    l = 2
    while l * (l - 1) // 2 < j:
        l += 1
    return l


@dataclass(frozen=True)
class Hypergraph:
    """``h``-uniform hypergraph on vertices ``0..num_vertices-1``."""

    num_vertices: int
    edges: tuple[int, ...]
    h: int

    def __post_init__(self):
        full = (1 << self.num_vertices) - 1
        for e in self.edges:
            if e & ~full:
                raise HypergraphError("hyperedge mentions a vertex outside the vertex set")
            if e.bit_count() != self.h:
                raise HypergraphError(f"hyperedge of size {e.bit_count()} in a {self.h}-uniform hypergraph")

    @classmethod
    def from_sets(cls, num_vertices: int, edges, h: int | None = None) -> Hypergraph:
        masks = []
        for e in edges:
            m = 0
            for v in e:
                m |= 1 << v
            masks.append(m)
        if h is None:
            h = masks[0].bit_count() if masks else 0
        return cls(num_vertices, tuple(masks), h)

    def degree(self, v: int) -> int:
        bit = 1 << v
        return sum(1 for e in self.edges if e & bit)

    def set_degree(self, J: int) -> int:
        """Number of hyperedges containing the vertex set ``J`` (a bitmask)."""
        return sum(1 for e in self.edges if e & J == J)

    @property
    def average_degree(self) -> float:
        return self.h * len(self.edges) / self.num_vertices if self.num_vertices else 0.0

    @cached_property
    def _max_codegrees(self) -> list[list[int]]:
        # table[v][j] = d_j(v).  Only sets J inside some hyperedge can have d(J) > 0,
        # so it is enough to walk subsets of hyperedges.
        table = [[0] * (self.h + 1) for _ in range(self.num_vertices)]
        cache: dict[int, int] = {}
        for e in self.edges:
            verts = members(e)
            for j in range(1, self.h + 1):
                for J in combinations(verts, j):
                    mask = 0
                    for v in J:
                        mask |= 1 << v
                    d = cache.get(mask)
                    if d is None:
                        d = cache[mask] = self.set_degree(mask)
                    for v in J:
                        if d > table[v][j]:
                            table[v][j] = d
        return table

    def max_j_degree(self, v: int, j: int) -> int:
        """``d_j(v)``: the largest number of hyperedges through a ``j``-set containing ``v``."""
        if not 1 <= j <= self.h:
            raise ValueError(f"j must lie in 1..{self.h}")
        if not 0 <= v < self.num_vertices:
            raise IndexError(v)
        return self._max_codegrees[v][j]

    def is_independent(self, S) -> bool:
        """True iff no hyperedge lies inside ``S`` (a bitmask or an iterable of vertices)."""
        mask = S if isinstance(S, int) else sum(1 << v for v in set(S))
        if mask & ~((1 << self.num_vertices) - 1):
            raise ValueError("S is not a subset of the vertex set")
        return not any(e & mask == e for e in self.edges)

    def to_text(self) -> str:
        lines = [f"{self.num_vertices} {self.h}"]
        lines.extend(" ".join(map(str, members(e))) for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Hypergraph:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise HypergraphError("first line must be 'n h'")
        n, h = int(rows[0][0]), int(rows[0][1])
        return cls.from_sets(n, [[int(x) for x in r] for r in rows[1:]], h)


@dataclass(frozen=True)
class CliqueHypergraph(Hypergraph):
    n: int = 0
    k: int = 0

    @cached_property
    def host(self) -> Graph:
        return complete_graph(self.n)

    def graph_of(self, S: int) -> Graph:
        """Graph on ``[n]`` whose edge set is the vertex subset ``S`` of H(n, k)."""
        edges = self.host.edges()
        return Graph.from_edges(self.n, [edges[i] for i in members(S)])


def build_clique_hypergraph(n: int, k: int) -> CliqueHypergraph:
    if not 2 <= k <= n:
        raise HypergraphError("need 2 <= k <= n")
    if n > MAX_MATERIALIZED_N:
        raise HypergraphError(f"H(n,k) is only materialized for n <= {MAX_MATERIALIZED_N}")
    kn = complete_graph(n)
    idx = kn.edge_index
    hyper = []
    for q in combinations(range(n), k):
        m = 0
        for u, v in combinations(q, 2):
            m |= 1 << idx[(u, v)]
        hyper.append(m)
    return CliqueHypergraph(n * (n - 1) // 2, tuple(hyper), k * (k - 1) // 2, n=n, k=k)


def clique_max_j_degree(n: int, k: int, j: int) -> int:
    """Closed form of ``d_j(v)`` in H(n, k): ``binom(n - l_j, k - l_j)``."""
    lj = ell(j)
    return math.comb(n - lj, k - lj) if lj <= k else 0


def _tau(tau) -> LogInterval:
    t = LogInterval.exact(tau) if not isinstance(tau, LogInterval) else tau
    if t.is_zero:
        raise ValueError("tau must be positive")
    return t


def _codegree_sum(n_vertices, avg_degree_total, h, sums, tau, drop_factor) -> LogInterval:
    # 2^{binom(h,2)-1} / (N d) * sum_j S_j / (2^{binom(j-1,2)} tau^{j-1}),  N d = total degree
    total = LogInterval.zero()
    for j in range(2, h + 1):
        if sums[j] == 0:
            continue
        term = LogInterval.exact(sums[j]) / tau ** (j - 1)
        if not drop_factor:
            term = term / LogInterval.pow2(math.comb(j - 1, 2))
        total = total + term
    return LogInterval.pow2(math.comb(h, 2) - 1) / LogInterval.exact(avg_degree_total) * total


def codegree_function(H: Hypergraph, tau, drop_factor: bool = False) -> LogInterval:
    """Co-degree function of ``H`` at ``tau``.

    ``drop_factor=True`` omits the ``2^{binom(j-1,2)}`` divisor, which gives
    the (larger) quantity used when bounding H(n, k).
    """
    if not H.edges:
        raise HypergraphError("co-degree function needs at least one hyperedge")
    t = _tau(tau)
    sums = [0] * (H.h + 1)
    for v in range(H.num_vertices):
        for j in range(2, H.h + 1):
            sums[j] += H.max_j_degree(v, j)
    n_times_d = H.h * len(H.edges)
    return _codegree_sum(H.num_vertices, n_times_d, H.h, sums, t, drop_factor)


def codegree_clique_closed_form(n: int, k: int, tau, drop_factor: bool = False) -> LogInterval:
    """Co-degree function of H(n, k) from the closed-form degrees; no materialization."""
    if not 2 <= k <= n:
        raise HypergraphError("need 2 <= k <= n")
    t = _tau(tau)
    h = math.comb(k, 2)
    N = math.comb(n, 2)
    sums = [0] * (h + 1)
    for j in range(2, h + 1):
        sums[j] = N * clique_max_j_degree(n, k, j)
    return _codegree_sum(N, N * math.comb(n - 2, k - 2), h, sums, t, drop_factor)


def delta_nk(n, k: int, tau) -> LogInterval:
    """``sum_{j=2}^{binom(k,2)} 2^{k^4} k^{k-2} / (tau^{j-1} n^{l_j - 2})``; ``n`` may be an enclosure."""
    if k < 3:
        raise ValueError("k must be at least 3")
    nn = n if isinstance(n, LogInterval) else LogInterval.exact(n)
    t = _tau(tau)
    head = LogInterval.pow2(k**4) * LogInterval.exact(k ** (k - 2))
    total = LogInterval.zero()
    for j in range(2, math.comb(k, 2) + 1):
        total = total + head / (t ** (j - 1) * nn ** (ell(j) - 2))
    return total


@dataclass(frozen=True)
class ClaimReport:
    n: int
    k: int
    tau: str
    exact: LogInterval
    bound: LogInterval
    verdict: Verdict
    margin: float

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_TRUE

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "tau": self.tau,
            "codegree_log2": list(self.exact.log2_bounds()),
            "bound_log2": list(self.bound.log2_bounds()),
            "verdict": self.verdict.value,
            "margin": self.margin,
        }


def check_claim_deltadelta(n: int, k: int, tau, drop_factor: bool = False) -> ClaimReport:
    """Certified comparison of the exact co-degree function of H(n, k) with ``delta_nk``."""
    H = build_clique_hypergraph(n, k)
    lhs = codegree_function(H, tau, drop_factor=drop_factor)
    rhs = delta_nk(n, k, tau)
    verdict, margin = certify_le(lhs, rhs)
    return ClaimReport(n, k, str(tau), lhs, rhs, verdict, margin)
