"""Simple undirected graphs on ``[n]`` with bitmask adjacency rows.

Vertex sets are plain Python ints used as bitmasks (bit ``v`` set means
``v`` is a member); clique lists are returned as sorted vertex tuples.
Edges are always reported in the canonical order: pairs ``(u, v)`` with
``u < v``, sorted lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

VertexSet = tuple[int, ...]

GRAPH6_MAX_N = 258047


class GraphFormatError(ValueError):
    pass


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> VertexSet:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph; ``rows[v]`` is the neighbourhood bitmask of ``v``."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(self.rows) != self.n:
            raise ValueError("need exactly one adjacency row per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {v} mentions a vertex outside [n]")
            if row >> v & 1:
                raise ValueError(f"loop at vertex {v}")
            rest = row
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                if not self.rows[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
                rest ^= low

    # construction --------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside [n] for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    # basic queries -------------------------------------------------------

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} not in [0, {self.n})")
        return self.rows[v].bit_count()

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    @cached_property
    def _edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for u, row in enumerate(self.rows):
            out.extend((u, v) for v in members(row >> (u + 1) << (u + 1)))
        return tuple(out)

    def edges(self) -> tuple[tuple[int, int], ...]:
        """All edges in canonical order."""
        return self._edges

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self._edges)}

    def complement(self) -> Graph:
        full = (1 << self.n) - 1
        return Graph(self.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(self.rows)))

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = list(self.rows)
        for u, v in edges:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph(self.n, tuple(rows))

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> Graph:
        return Graph.from_edges(self.n, list(self._edges) + list(edges))

    def is_subgraph_of(self, other: Graph) -> bool:
        return self.n == other.n and all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def edge_count_within(self, mask: int) -> int:
        total = 0
        rest = mask
        while rest:
            low = rest & -rest
            total += (self.rows[low.bit_length() - 1] & mask).bit_count()
            rest ^= low
        return total // 2

    # cliques -------------------------------------------------------------

    def has_clique(self, t: int, witness: bool = False):
        """Whether some ``t`` vertices are pairwise adjacent.

        With ``witness=True`` returns ``(found, vertices)`` where ``vertices``
        is the lexicographically first such clique, or ``None``.
        """
        if t < 1:
            raise ValueError("clique size must be at least 1")
        found = self._find_clique(t)
        if witness:
            return found is not None, found
        return found is not None

    def _find_clique(self, t: int) -> VertexSet | None:
        rows = self.rows

        def extend(chosen: list[int], cand: int, need: int) -> bool:
            if need == 0:
                return True
            while cand and cand.bit_count() >= need:
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                chosen.append(v)
                if extend(chosen, cand & rows[v], need - 1):
                    return True
                chosen.pop()
            return False

        chosen: list[int] = []
        if extend(chosen, (1 << self.n) - 1, t):
            return tuple(chosen)
        return None

    def clique_number(self) -> int:
        t = 0
        while t < self.n and self._find_clique(t + 1) is not None:
            t += 1
        return t

    def enumerate_cliques(self, k: int) -> list[VertexSet]:
        """Every ``k``-clique exactly once, in lexicographic order of sorted tuples."""
        if k < 1:
            raise ValueError("clique size must be at least 1")
        rows = self.rows
        out: list[VertexSet] = []

        def grow(chosen: list[int], cand: int) -> None:
            if len(chosen) == k:
                out.append(tuple(chosen))
                return
            need = k - len(chosen)
            while cand and cand.bit_count() >= need:
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                chosen.append(v)
                grow(chosen, cand & rows[v])
                chosen.pop()

        grow([], (1 << self.n) - 1)
        return out

    def is_clique(self, vertices: Sequence[int]) -> bool:
        return all(self.adjacent(u, v) for u, v in combinations(vertices, 2))

    # subgraphs -----------------------------------------------------------

    def induced_subgraph(self, vertices: Iterable[int] | int) -> Graph:
        """Subgraph induced by ``vertices``, relabelled ``0..|S|-1`` in increasing order."""
        verts = members(vertices) if isinstance(vertices, int) else tuple(sorted(set(vertices)))
        for v in verts:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} not in [0, {self.n})")
        pos = {v: i for i, v in enumerate(verts)}
        rows = []
        for v in verts:
            row = 0
            for u in members(self.rows[v]):
                if u in pos:
                    row |= 1 << pos[u]
            rows.append(row)
        return Graph(len(verts), tuple(rows))

    def degeneracy_order(self) -> list[int]:
        """Vertices ordered core-first (reverse of a smallest-last ordering)."""
        remaining = (1 << self.n) - 1
        order = []
        while remaining:
            best = None
            best_deg = None
            for v in members(remaining):
                d = (self.rows[v] & remaining).bit_count()
                if best_deg is None or d < best_deg:
                    best, best_deg = v, d
            order.append(best)
            remaining &= ~(1 << best)
        order.reverse()
        return order

    # serialisation -------------------------------------------------------

    def to_graph6(self) -> str:
        return to_graph6(self)

    def to_edgelist(self) -> str:
        return to_edgelist(self)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def graham_graph() -> Graph:
    """K8 with the edges of a 5-cycle on vertices 3..7 removed (K3 joined to C5)."""
    cyc = [(3 + i, 3 + (i + 1) % 5) for i in range(5)]
    return complete_graph(8).remove_edges(cyc)


# random graphs --------------------------------------------------------------


def _uniform_stream(key: int, count: int) -> np.ndarray:
    """``count`` uniforms in [0, 1) from Philox-4x64 keyed by ``key``.

    Word ``i`` of the stream is word ``i % 4`` of the block at counter
    ``i // 4``, so edge ``i`` always sees the same uniform for a given key.
    """
    bitgen = np.random.Philox(key=key)
    raw = bitgen.random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def sample_gnp(n: int, p: float, seed: int, stream: int = 0) -> Graph:
    """Binomial random graph G(n, p), a pure function of ``(n, p, seed, stream)``.

    The Philox key is ``seed + stream * 2**64``; edge ``i`` in canonical order
    of K_n is present iff the ``i``-th uniform of that key is below ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    m = n * (n - 1) // 2
    rows = [0] * n
    if m == 0 or p == 0.0:
        return Graph(n, tuple(rows))
    present = _uniform_stream(seed + (stream << 64), m) < p
    iu, ju = np.triu_indices(n, k=1)
    for u, v in zip(iu[present].tolist(), ju[present].tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


# graph6 ---------------------------------------------------------------------


def _encode_n(n: int) -> str:
    if n < 0 or n > GRAPH6_MAX_N:
        raise GraphFormatError(f"graph6 cannot encode n={n}")
    if n <= 62:
        return chr(n + 63)
    return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))


def to_graph6(g: Graph) -> str:
    bits = []
    for j in range(1, g.n):
        row = g.rows[j]
        bits.extend(row >> i & 1 for i in range(j))
    bits.extend([0] * (-len(bits) % 6))
    body = "".join(
        chr(63 + int("".join(map(str, bits[i : i + 6])), 2)) for i in range(0, len(bits), 6)
    )
    return _encode_n(g.n) + body


def from_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<") :]
    if not s:
        raise GraphFormatError("empty graph6 string")
    codes = [ord(c) - 63 for c in s]
    if any(c < 0 or c > 63 for c in codes):
        raise GraphFormatError("graph6 characters must lie in '?'..'~'")
    if codes[0] == 63:
        if len(codes) < 4 or codes[1] == 63:
            raise GraphFormatError("unsupported or truncated graph6 size header")
        n = (codes[1] << 12) | (codes[2] << 6) | codes[3]
        payload = codes[4:]
    else:
        n = codes[0]
        payload = codes[1:]
    m = n * (n - 1) // 2
    need = (m + 5) // 6
    if len(payload) != need:
        raise GraphFormatError(f"graph6 payload has {len(payload)} bytes, expected {need} for n={n}")
    bits = []
    for c in payload:
        bits.extend(c >> s & 1 for s in range(5, -1, -1))
    if any(bits[m:]):
        raise GraphFormatError("non-zero padding bits in graph6 payload")
    rows = [0] * n
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bits[idx]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            idx += 1
    return Graph(n, tuple(rows))


# edge lists -----------------------------------------------------------------


def to_edgelist(g: Graph) -> str:
    lines = [f"# n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def from_edgelist(text: str, n: int | None = None) -> Graph:
    """Parse ``u v`` lines (0-indexed).  A ``# n N`` comment fixes the vertex count."""
    edges = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                declared = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = declared if declared is not None else 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


def read_graph(path) -> Graph:
    """Load a graph from a graph6 file (first line) or an edge-list file."""
    with open(path) as fh:
        text = fh.read()
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if str(path).endswith((".g6", ".graph6")) or (first and " " not in first and not first.startswith("#")):
        return from_graph6(first)
    return from_edgelist(text)


def iter_graph6_lines(text: str) -> Iterator[Graph]:
    for line in text.splitlines():
        if line.strip():
            yield from_graph6(line)
