"""Exact decision of ``G -> (K_k)_r`` with replayable certificates.

The search precomputes every copy of K_k in the host, orders the edges so
that dense cores are coloured first, and backtracks over colours with two
kinds of pruning:

* a clique whose edges all share a colour is a conflict;
* a clique with all but one edge sharing colour ``c`` removes ``c`` from the
  remaining edge's domain (unit propagation).

Colour symmetry is broken by first occurrence: along the search order, colour
``c + 1`` may appear only after colour ``c`` has been used.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .graph import Graph, VertexSet, from_graph6

BUDGET_ENV = "FOLKMAN_NODE_BUDGET"


class Outcome(str, Enum):
    ARROWS = "Arrows"
    NON_ARROWING = "NonArrowing"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:
        return self.value


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeColoring:
    """Total map from the edges of ``graph`` (canonical order) to colours ``1..r``."""

    graph: Graph
    colors: tuple[int, ...]
    r: int

    def __post_init__(self):
        if len(self.colors) != self.graph.edge_count():
            raise ColoringError(
                f"coloring has {len(self.colors)} entries but graph has {self.graph.edge_count()} edges"
            )
        bad = [c for c in self.colors if not 1 <= c <= self.r]
        if bad:
            raise ColoringError(f"colours must lie in 1..{self.r}, got {bad[0]}")

    @classmethod
    def from_function(cls, graph: Graph, r: int, fn) -> EdgeColoring:
        return cls(graph, tuple(fn(u, v) for u, v in graph.edges()), r)

    def color(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.colors[self.graph.edge_index[(u, v)]]

    def color_class(self, c: int) -> Graph:
        return Graph.from_edges(
            self.graph.n, [e for e, col in zip(self.graph.edges(), self.colors) if col == c]
        )

    def relabel(self, perm: dict[int, int]) -> EdgeColoring:
        return EdgeColoring(self.graph, tuple(perm[c] for c in self.colors), self.r)

    def canonical(self) -> EdgeColoring:
        """Colours renamed by first appearance in canonical edge order (edge 0 gets colour 1)."""
        perm: dict[int, int] = {}
        for c in self.colors:
            if c not in perm:
                perm[c] = len(perm) + 1
        nxt = len(perm) + 1
        for c in range(1, self.r + 1):
            if c not in perm:
                perm[c] = nxt
                nxt += 1
        return self.relabel(perm)


def verify_coloring(graph: Graph, coloring: EdgeColoring | Sequence[int], k: int, r: int | None = None):
    """Some monochromatic K_k as ``(colour, vertices)``, or ``None`` if the colouring is proper."""
    if not isinstance(coloring, EdgeColoring):
        colors = tuple(coloring)
        coloring = EdgeColoring(graph, colors, r if r is not None else max(colors, default=1))
    if coloring.graph != graph:
        raise ColoringError("coloring is defined on a different graph")
    for c in range(1, coloring.r + 1):
        found, verts = coloring.color_class(c).has_clique(k, witness=True)
        if found:
            assert graph.is_clique(verts)
            return c, verts
    return None


@dataclass
class SearchStats:
    nodes: int = 0
    cliques: int = 0
    edges: int = 0
    wall_time: float = 0.0
    exhausted: bool = False
    subtrees: int = 1
    budget_hit: str | None = None


@dataclass(frozen=True)
class ArrowCertificate:
    graph: Graph
    k: int
    r: int
    verdict: Outcome
    witness: EdgeColoring | None
    stats: SearchStats = field(default_factory=SearchStats)
    mode: str = "deterministic"

    def to_json(self) -> dict:
        return {
            "host": self.graph.to_graph6(),
            "k": self.k,
            "r": self.r,
            "verdict": self.verdict.value,
            "witness": list(self.witness.colors) if self.witness is not None else None,
            "mode": self.mode,
            "stats": asdict(self.stats),
        }

    @classmethod
    def from_json(cls, data: dict) -> ArrowCertificate:
        g = from_graph6(data["host"])
        w = data.get("witness")
        witness = EdgeColoring(g, tuple(w), data["r"]) if w is not None else None
        return cls(
            g,
            data["k"],
            data["r"],
            Outcome(data["verdict"]),
            witness,
            SearchStats(**data.get("stats", {})),
            data.get("mode", "deterministic"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def recheck(self) -> bool:
        """Re-verify the witness without searching.  Arrows verdicts have no witness to check."""
        if self.verdict is Outcome.NON_ARROWING:
            return self.witness is not None and verify_coloring(self.graph, self.witness, self.k) is None
        return self.witness is None


class _BudgetExceeded(Exception):
    pass


def _search_order(graph: Graph) -> list[tuple[int, int]]:
    pos = {v: i for i, v in enumerate(graph.degeneracy_order())}
    return sorted(
        graph.edges(),
        key=lambda e: (max(pos[e[0]], pos[e[1]]), min(pos[e[0]], pos[e[1]])),
    )


class _Search:
    """Backtracking state over edges in search order (positions ``0..m-1``)."""

    def __init__(self, graph: Graph, k: int, r: int, symmetry: bool = True):
        self.graph, self.k, self.r = graph, k, r
        self.order = _search_order(graph)
        self.m = len(self.order)
        where = {e: i for i, e in enumerate(self.order)}
        cliques = graph.enumerate_cliques(k)
        self.cliques = [
            tuple(where[(u, v)] for u, v in combinations(q, 2)) for q in cliques
        ]
        self.size = k * (k - 1) // 2
        self.edge_cliques: list[list[int]] = [[] for _ in range(self.m)]
        for qi, q in enumerate(self.cliques):
            for e in q:
                self.edge_cliques[e].append(qi)
        self.symmetry = symmetry
        self.color = [0] * self.m
        self.dom = [((1 << (r + 1)) - 2)] * self.m
        self.cnt = [0] * (len(self.cliques) * (r + 1))
        self.unc = [self.size] * len(self.cliques)
        self.trail: list[tuple] = []
        self.prefmax = [0] * (self.m + 1)
        self.nodes = 0
        self.node_budget: int | None = None
        self.deadline: float | None = None

    def assign(self, e: int, c: int) -> bool:
        r1 = self.r + 1
        size = self.size
        color, dom, cnt, unc, trail = self.color, self.dom, self.cnt, self.unc, self.trail
        queue = [(e, c)]
        ok = True
        while queue:
            e, c = queue.pop()
            if color[e]:
                if color[e] != c:
                    ok = False
                    break
                continue
            if not dom[e] >> c & 1:
                ok = False
                break
            color[e] = c
            trail.append(("a", e))
            for q in self.edge_cliques[e]:
                unc[q] -= 1
                idx = q * r1 + c
                cnt[idx] += 1
                if cnt[idx] == size:
                    ok = False
                elif cnt[idx] == size - 1 and unc[q] == 1:
                    f = next(x for x in self.cliques[q] if not color[x])
                    if dom[f] >> c & 1:
                        trail.append(("d", f, dom[f]))
                        dom[f] &= ~(1 << c)
                        if dom[f] == 0:
                            ok = False
                        elif dom[f] & (dom[f] - 1) == 0:
                            queue.append((f, dom[f].bit_length() - 1))
            if not ok:
                break
        return ok

    def undo(self, mark: int) -> None:
        r1 = self.r + 1
        trail, color, cnt, unc, dom = self.trail, self.color, self.cnt, self.unc, self.dom
        while len(trail) > mark:
            entry = trail.pop()
            if entry[0] == "a":
                e = entry[1]
                c = color[e]
                for q in self.edge_cliques[e]:
                    unc[q] += 1
                    cnt[q * r1 + c] -= 1
                color[e] = 0
            else:
                dom[entry[1]] = entry[2]

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise _BudgetExceeded("nodes")
        if self.deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise _BudgetExceeded("time")

    def choices(self, i: int) -> list[int]:
        pm = self.prefmax[i]
        limit = min(self.r, pm + 1) if self.symmetry else self.r
        return [c for c in range(1, limit + 1) if self.dom[i] >> c & 1]

    def dfs(self, i: int) -> bool:
        self._tick()
        if i == self.m:
            return True
        pm = self.prefmax[i]
        c_now = self.color[i]
        if c_now:
            if self.symmetry and c_now > pm + 1:
                return False
            self.prefmax[i + 1] = max(pm, c_now)
            return self.dfs(i + 1)
        for c in self.choices(i):
            mark = len(self.trail)
            if self.assign(i, c):
                self.prefmax[i + 1] = max(pm, c)
                if self.dfs(i + 1):
                    return True
            self.undo(mark)
        return False

    def replay(self, decisions: Sequence[int]) -> bool:
        """Apply branch decisions for positions ``0..len-1``; False if inconsistent."""
        for i, c in enumerate(decisions):
            pm = self.prefmax[i]
            if self.color[i]:
                if self.color[i] != c or (self.symmetry and c > pm + 1):
                    return False
            elif not self.assign(i, c):
                return False
            self.prefmax[i + 1] = max(pm, c)
        return True

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []

        def walk(i: int, acc: list[int]) -> None:
            if i == depth or i == self.m:
                out.append(tuple(acc))
                return
            pm = self.prefmax[i]
            if self.color[i]:
                c = self.color[i]
                if self.symmetry and c > pm + 1:
                    return
                self.prefmax[i + 1] = max(pm, c)
                acc.append(c)
                walk(i + 1, acc)
                acc.pop()
                return
            for c in self.choices(i):
                mark = len(self.trail)
                if self.assign(i, c):
                    self.prefmax[i + 1] = max(pm, c)
                    acc.append(c)
                    walk(i + 1, acc)
                    acc.pop()
                self.undo(mark)

        walk(0, [])
        return out

    def witness(self) -> EdgeColoring:
        by_edge = dict(zip(self.order, self.color))
        return EdgeColoring(self.graph, tuple(by_edge[e] for e in self.graph.edges()), self.r)


def _default_node_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else None


def _run(search: _Search, start: int, node_budget, time_budget) -> tuple[Outcome, str | None]:
    search.node_budget = node_budget
    search.deadline = time.monotonic() + time_budget if time_budget is not None else None
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * search.m + 1000))
    try:
        found = search.dfs(start)
    except _BudgetExceeded as exc:
        return Outcome.INDETERMINATE, str(exc)
    finally:
        sys.setrecursionlimit(old)
    return (Outcome.NON_ARROWING if found else Outcome.ARROWS), None


def _solve_subtree(rows, k, r, decisions, node_budget, time_budget):
    graph = Graph(len(rows), tuple(rows))
    search = _Search(graph, k, r)
    if not search.replay(decisions):
        return Outcome.ARROWS, None, 0, None
    outcome, hit = _run(search, len(decisions), node_budget, time_budget)
    colors = search.witness().colors if outcome is Outcome.NON_ARROWING else None
    return outcome, colors, search.nodes, hit


def arrows(
    graph: Graph,
    k: int,
    r: int,
    mode: str = "deterministic",
    node_budget: int | None = None,
    time_budget: float | None = None,
    n_jobs: int | None = None,
) -> ArrowCertificate:
    """Decide whether every ``r``-colouring of ``graph`` has a monochromatic K_k.

    ``mode="deterministic"`` is single-threaded and returns the first proper
    colouring in search order.  ``mode="parallel"`` splits the search into
    subtrees over worker processes; its verdict is the same, its witness may
    differ.  Exceeding ``node_budget`` or ``time_budget`` (seconds) yields
    ``Outcome.INDETERMINATE`` rather than a verdict.
    """
    if k < 2:
        raise ValueError("clique size must be at least 2")
    if r < 1:
        raise ValueError("need at least one colour")
    if mode not in ("deterministic", "parallel"):
        raise ValueError(f"unknown mode {mode!r}")
    if node_budget is None:
        node_budget = _default_node_budget()
    t0 = time.perf_counter()
    search = _Search(graph, k, r)
    stats = SearchStats(cliques=len(search.cliques), edges=search.m)

    if k == 2 and search.m > 0:
        # every single edge is a K_2
        stats.exhausted = True
        stats.wall_time = time.perf_counter() - t0
        return ArrowCertificate(graph, k, r, Outcome.ARROWS, None, stats, mode)

    if mode == "deterministic":
        outcome, hit = _run(search, 0, node_budget, time_budget)
        stats.nodes = search.nodes
        witness = search.witness() if outcome is Outcome.NON_ARROWING else None
    else:
        outcome, witness, hit = _parallel(search, graph, k, r, node_budget, time_budget, n_jobs, stats)

    if witness is not None:
        witness = witness.canonical()
    stats.budget_hit = hit
    stats.exhausted = outcome is Outcome.ARROWS
    stats.wall_time = time.perf_counter() - t0
    if witness is not None and verify_coloring(graph, witness, k) is not None:
        raise AssertionError("search produced a witness that is not proper")
    return ArrowCertificate(graph, k, r, outcome, witness, stats, mode)


def _parallel(search, graph, k, r, node_budget, time_budget, n_jobs, stats):
    workers = n_jobs or os.cpu_count() or 1
    depth = 0
    prefixes = [()]
    while depth < search.m and len(prefixes) < 4 * workers and depth < 24:
        depth += 1
        prefixes = search.prefixes(depth)
    stats.subtrees = len(prefixes)
    if not prefixes:
        return Outcome.ARROWS, None, None
    outcome = Outcome.ARROWS
    witness = None
    hit = None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = {
            pool.submit(_solve_subtree, graph.rows, k, r, pre, node_budget, time_budget)
            for pre in prefixes
        }
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                res, colors, nodes, sub_hit = fut.result()
                stats.nodes += nodes
                if res is Outcome.NON_ARROWING and witness is None:
                    witness = EdgeColoring(graph, tuple(colors), r)
                    outcome = Outcome.NON_ARROWING
                elif res is Outcome.INDETERMINATE and outcome is Outcome.ARROWS:
                    outcome = Outcome.INDETERMINATE
                    hit = sub_hit
            if witness is not None:
                for fut in pending:
                    fut.cancel()
                break
    if witness is not None:
        hit = None
    return outcome, witness, hit


def brute_force_arrows(graph: Graph, k: int, r: int, max_colorings: int = 1 << 26):
    """Oracle: enumerate all ``r**|E|`` colourings.

    Returns ``(arrows, witness_colors)`` where the witness is the first proper
    colouring in base-``r`` counting order over canonical edges.
    """
    edges = graph.edges()
    m = len(edges)
    total = r**m
    if total > max_colorings:
        raise ValueError(f"{total} colourings exceed the enumeration cap")
    idx = graph.edge_index
    qs = [
        np.array([idx[(u, v)] for u, v in combinations(q, 2)], dtype=np.intp)
        for q in graph.enumerate_cliques(k)
    ]
    if not qs:
        return False, (1,) * m
    chunk = 1 << 16
    powers = r ** np.arange(m - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % r
        bad = np.zeros(len(codes), dtype=bool)
        for q in qs:
            sub = digits[:, q]
            bad |= np.all(sub == sub[:, :1], axis=1)
        good = np.flatnonzero(~bad)
        if good.size:
            return False, tuple(int(d) + 1 for d in digits[good[0]])
    return True, None


@dataclass(frozen=True)
class FolkmanBundle:
    graph: Graph
    k: int
    r: int
    l: int
    arrow: ArrowCertificate
    has_forbidden_clique: bool
    forbidden_clique: VertexSet | None
    clique_number: int

    @property
    def holds(self) -> bool | None:
        """True/False verdict, or None when the arrowing search was indeterminate."""
        if self.has_forbidden_clique:
            return False
        if self.arrow.verdict is Outcome.INDETERMINATE:
            return None
        return self.arrow.verdict is Outcome.ARROWS

    def to_json(self) -> dict:
        return {
            "host": self.graph.to_graph6(),
            "k": self.k,
            "r": self.r,
            "l": self.l,
            "is_folkman": self.holds,
            "arrowing": self.arrow.to_json(),
            "clique": {
                "size": self.l,
                "present": self.has_forbidden_clique,
                "witness": list(self.forbidden_clique) if self.forbidden_clique else None,
                "clique_number": self.clique_number,
            },
        }


def is_folkman(graph: Graph, k: int, r: int, l: int | None = None, **search_kw) -> FolkmanBundle:
    """Check ``graph -> (K_k)_r`` and that ``graph`` has no K_l (default ``l = k + 1``)."""
    if l is None:
        l = k + 1
    if l < k + 1:
        raise ValueError("forbidden clique size must be at least k + 1")
    present, verts = graph.has_clique(l, witness=True)
    cert = arrows(graph, k, r, **search_kw)
    return FolkmanBundle(graph, k, r, l, cert, present, verts, graph.clique_number())

