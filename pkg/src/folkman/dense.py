"""Density, canonical sequences, the colouring dichotomy, and Monte Carlo runs.

Brute-force companions to the counting and density arguments: exact checks at
small sizes, seeded sampling where exhaustion is out of reach, and the
parameters of the relaxed-Folkman construction evaluated in log scale.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .arrowing import EdgeColoring, Outcome, arrows
from .graph import Graph, complete_graph, members, sample_gnp, _uniform_stream
from .logint import LogInterval, Verdict, as_fraction, certify_le


class BudgetExceeded(RuntimeError):
    pass


# (rho, d)-density -------------------------------------------------------------


@dataclass(frozen=True)
class DensityParams:
    rho: Fraction
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rho", as_fraction(self.rho))
        object.__setattr__(self, "d", as_fraction(self.d))
        if not (0 < self.rho <= 1 and 0 < self.d <= 1):
            raise ValueError("need 0 < rho <= 1 and 0 < d <= 1")

    def m(self, n: int) -> int:
        return math.ceil(self.rho * n)


@dataclass(frozen=True)
class DensityResult:
    dense: bool
    definitive: bool
    m: int
    checked: int
    violation: tuple[int, ...] | None = None
    violation_edges: int | None = None

    def __bool__(self) -> bool:
        return self.dense


def is_rho_d_dense(
    graph: Graph,
    rho,
    d,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 10_000,
    max_subsets: int = 10**7,
) -> DensityResult:
    """Whether every induced subgraph on ``m >= rho n`` vertices has ``>= d m^2 / 2`` edges.

    Only ``m = ceil(rho n)`` is examined.  ``mode="sampled"`` draws ``trials``
    random ``m``-subsets: a violation is definitive, its absence is not.
    """
    dp = DensityParams(rho, d)
    n = graph.n
    m = dp.m(n)
    need = dp.d * m * m  # compare against 2 * e(S)
    if n == 0 or m > n:
        return DensityResult(True, True, m, 0)
    if mode == "exhaustive":
        if math.comb(n, m) > max_subsets:
            raise BudgetExceeded(f"binom({n},{m}) subsets exceed the exhaustive cap {max_subsets}")
        checked = 0
        for S in combinations(range(n), m):
            checked += 1
            mask = 0
            for v in S:
                mask |= 1 << v
            e = graph.edge_count_within(mask)
            if 2 * e < need:
                return DensityResult(False, True, m, checked, S, e)
        return DensityResult(True, True, m, checked)
    if mode == "sampled":
        rng = np.random.Generator(np.random.Philox(key=seed))
        for t in range(trials):
            S = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
            mask = sum(1 << v for v in S)
            e = graph.edge_count_within(mask)
            if 2 * e < need:
                return DensityResult(False, True, m, t + 1, S, e)
        return DensityResult(True, False, m, trials)
    raise ValueError(f"unknown mode {mode!r}")


def complete_host_size(k: int, d) -> int:
    """Smallest ``n`` for which K_n meets both hypotheses of the density Ramsey bound.

    With ``rho = (d/2)^{2k-4}``: ``n >= (2/d)^{2k-4}`` and K_n is
    ``(rho, d)``-dense, i.e. ``m - 1 >= d m`` at ``m = ceil(rho n)``.
    """
    d = as_fraction(d)
    if not 0 < d < 1:
        raise ValueError("d must lie in (0, 1)")
    rho = (d / 2) ** (2 * k - 4)
    n = max(1, math.ceil((2 / d) ** (2 * k - 4)))
    while True:
        m = math.ceil(rho * n)
        if m - 1 >= d * m:
            return n
        n += 1


# canonical sequences ----------------------------------------------------------


@dataclass(frozen=True)
class CanonicalSequence:
    vertices: tuple[int, ...]
    forward_colors: tuple[int, ...]

    def verify(self, coloring: EdgeColoring) -> bool:
        g = coloring.graph
        vs = self.vertices
        if len(self.forward_colors) != max(len(vs) - 1, 0) or len(set(vs)) != len(vs):
            return False
        for i, u in enumerate(vs[:-1]):
            for w in vs[i + 1 :]:
                if not g.adjacent(u, w) or coloring.color(u, w) != self.forward_colors[i]:
                    return False
        return True


@dataclass(frozen=True)
class LevelReport:
    level: int
    size: int
    vertex: int
    degree: int
    degree_ok: bool
    color: int
    class_size: int
    class_ok: bool


@dataclass(frozen=True)
class CanonicalResult:
    sequence: CanonicalSequence | None
    levels: tuple[LevelReport, ...]
    failed_level: int | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.sequence is not None

    @property
    def hypotheses_held(self) -> bool:
        return all(lv.degree_ok and lv.class_ok for lv in self.levels)


def _class_rows(coloring: EdgeColoring) -> tuple[list[int], list[int]]:
    n = coloring.graph.n
    rows = ([0] * n, [0] * n)
    for (u, v), c in zip(coloring.graph.edges(), coloring.colors):
        side = rows[c - 1]
        side[u] |= 1 << v
        side[v] |= 1 << u
    return rows


def canonical_sequence(coloring: EdgeColoring, ell: int, d) -> CanonicalResult:
    """Greedy canonical sequence of length ``ell`` in a 2-coloured graph.

    At each level take a maximum-degree vertex of the current set (lowest index
    on ties), then keep its larger colour class of neighbours (colour 1 on ties).
    Whether the degree reached ``d |M|`` and the class reached ``d |M| / 2`` is
    recorded per level; the run fails only when the set empties too early.
    """
    if coloring.r != 2:
        raise ValueError("canonical sequences are defined for 2-colourings")
    if ell < 1:
        raise ValueError("length must be positive")
    d = as_fraction(d)
    g = coloring.graph
    red, blue = _class_rows(coloring)
    current = (1 << g.n) - 1
    seq: list[int] = []
    fwd: list[int] = []
    levels: list[LevelReport] = []
    while len(seq) < ell - 1:
        size = current.bit_count()
        if size == 0:
            return CanonicalResult(None, tuple(levels), len(seq) + 1, "no vertices left")
        best, best_deg = -1, -1
        for v in members(current):
            deg = (g.rows[v] & current).bit_count()
            if deg > best_deg:
                best, best_deg = v, deg
        c1 = red[best] & current
        c2 = blue[best] & current
        color, nxt = (1, c1) if c1.bit_count() >= c2.bit_count() else (2, c2)
        levels.append(
            LevelReport(
                level=len(seq) + 1,
                size=size,
                vertex=best,
                degree=best_deg,
                degree_ok=best_deg >= d * size,
                color=color,
                class_size=nxt.bit_count(),
                class_ok=2 * nxt.bit_count() >= d * size,
            )
        )
        seq.append(best)
        fwd.append(color)
        current = nxt
    if current == 0:
        return CanonicalResult(None, tuple(levels), len(seq) + 1, "no vertices left")
    seq.append(members(current & -current)[0])
    result = CanonicalSequence(tuple(seq), tuple(fwd))
    assert result.verify(coloring)
    return CanonicalResult(result, tuple(levels))


def mono_clique_from_canonical(seq: CanonicalSequence, coloring: EdgeColoring, k: int):
    """Monochromatic K_k inside a canonical sequence of length ``2k - 2``.

    Some colour appears ``>= k - 1`` times among the first ``2k - 3`` forward
    colours; those vertices and the last one form the clique.
    """
    if len(seq.vertices) != 2 * k - 2:
        raise ValueError(f"need a canonical sequence of length {2 * k - 2}")
    if not seq.verify(coloring):
        raise ValueError("sequence is not canonical for this colouring")
    head = seq.forward_colors[: 2 * k - 3]
    for c in (1, 2):
        idx = [i for i, col in enumerate(head) if col == c]
        if len(idx) >= k - 1:
            verts = tuple(sorted([seq.vertices[i] for i in idx[: k - 1]] + [seq.vertices[-1]]))
            for u, w in combinations(verts, 2):
                if coloring.color(u, w) != c:
                    raise AssertionError("pigeonhole clique is not monochromatic")
            return c, verts
    raise AssertionError("pigeonhole failed on a valid canonical sequence")


def random_two_coloring(graph: Graph, seed: int, stream: int = 0) -> EdgeColoring:
    m = graph.edge_count()
    u = _uniform_stream(seed + (stream << 64), m) if m else np.empty(0)
    return EdgeColoring(graph, tuple(int(x) for x in 1 + (u >= 0.5)), 2)


# the colouring dichotomy ------------------------------------------------------


@dataclass(frozen=True)
class DichotomyResult:
    mono_count: int
    last_color_edges: int
    first: bool
    second: bool

    @property
    def side(self) -> str:
        if self.first and self.second:
            return "Both"
        if self.first:
            return "First"
        if self.second:
            return "Second"
        return "Neither"


def _dichotomy_sides(n, k, R, mono, last):
    # mono > (1/2) binom(n,k) / binom(R,k)   and   last > binom(n,2) / R^2
    first = 2 * mono * math.comb(R, k) > math.comb(n, k)
    second = last * R * R > math.comb(n, 2)
    return first, second


def dichotomy_check(n: int, k: int, r: int, R: int, coloring: EdgeColoring) -> DichotomyResult:
    """Exact counts for one ``(r+1)``-colouring of K_n."""
    if n < R:
        raise ValueError("need n >= R")
    if coloring.graph != complete_graph(n) or coloring.r != r + 1:
        raise ValueError(f"need an ({r}+1)-colouring of K_{n}")
    mono = sum(len(coloring.color_class(c).enumerate_cliques(k)) for c in range(1, r + 1))
    last = sum(1 for c in coloring.colors if c == r + 1)
    return DichotomyResult(mono, last, *_dichotomy_sides(n, k, R, mono, last))


@dataclass
class DichotomySummary:
    n: int
    k: int
    r: int
    R: int
    total: int = 0
    first_only: int = 0
    second_only: int = 0
    both: int = 0
    neither: int = 0
    counterexample: tuple[int, ...] | None = None
    exhaustive: bool = True
    runtime_ms: float = 0.0

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _count_chunk(digits: np.ndarray, qs: np.ndarray, n, k, r, R, summary: DichotomySummary):
    # digits: colourings x edges, values 0..r (value r is the last colour)
    sub = digits[:, qs]  # colourings x cliques x clique-edges
    mono = np.all(sub == sub[:, :, :1], axis=2) & (sub[:, :, 0] < r)
    mono_count = mono.sum(axis=1)
    last = (digits == r).sum(axis=1)
    first = 2 * mono_count * math.comb(R, k) > math.comb(n, k)
    second = last * R * R > math.comb(n, 2)
    summary.total += len(digits)
    summary.both += int(np.sum(first & second))
    summary.first_only += int(np.sum(first & ~second))
    summary.second_only += int(np.sum(~first & second))
    bad = ~first & ~second
    nb = int(bad.sum())
    summary.neither += nb
    if nb and summary.counterexample is None:
        summary.counterexample = tuple(int(x) + 1 for x in digits[np.flatnonzero(bad)[0]])


def _clique_edge_index(n: int, k: int) -> np.ndarray:
    kn = complete_graph(n)
    idx = kn.edge_index
    return np.array(
        [[idx[(u, v)] for u, v in combinations(q, 2)] for q in combinations(range(n), k)],
        dtype=np.intp,
    )


def dichotomy_exhaustive(n: int, k: int, r: int, R: int, max_colorings: int = 3**15) -> DichotomySummary:
    """Every ``(r+1)``-colouring of K_n, split by prefix into vectorised blocks."""
    if n < R:
        raise ValueError("need n >= R")
    m = n * (n - 1) // 2
    base = r + 1
    total = base**m
    if total > max_colorings:
        raise BudgetExceeded(f"{total} colourings exceed the exhaustive cap {max_colorings}")
    t0 = time.perf_counter()
    qs = _clique_edge_index(n, k)
    summary = DichotomySummary(n, k, r, R)
    # the first `pre` edges are fixed per block; the rest vary inside it
    pre = 0
    while base ** (m - pre) > 1 << 19 and pre < m:
        pre += 1
    tail = m - pre
    tail_codes = np.arange(base**tail, dtype=np.int64)
    powers = base ** np.arange(tail - 1, -1, -1, dtype=np.int64)
    tail_digits = ((tail_codes[:, None] // powers[None, :]) % base).astype(np.int8)
    for prefix in range(base**pre):
        head = [(prefix // base ** (pre - 1 - i)) % base for i in range(pre)]
        digits = np.empty((len(tail_digits), m), dtype=np.int8)
        digits[:, :pre] = head
        digits[:, pre:] = tail_digits
        _count_chunk(digits, qs, n, k, r, R, summary)
    summary.runtime_ms = 1000 * (time.perf_counter() - t0)
    return summary


def dichotomy_sampled(n: int, k: int, r: int, R: int, samples: int, seed: int) -> DichotomySummary:
    """Uniform random ``(r+1)``-colourings; a counterexample found is definitive."""
    if n < R:
        raise ValueError("need n >= R")
    t0 = time.perf_counter()
    m = n * (n - 1) // 2
    qs = _clique_edge_index(n, k)
    rng = np.random.Generator(np.random.Philox(key=seed))
    summary = DichotomySummary(n, k, r, R, exhaustive=False)
    block = max(1, min(samples, (1 << 22) // max(1, qs.size)))
    done = 0
    while done < samples:
        size = min(block, samples - done)
        digits = rng.integers(0, r + 1, size=(size, m), dtype=np.int8)
        _count_chunk(digits, qs, n, k, r, R, summary)
        done += size
    summary.runtime_ms = 1000 * (time.perf_counter() - t0)
    return summary


# relaxed Folkman construction -------------------------------------------------


@dataclass(frozen=True)
class KLParams:
    k: int
    alpha: Fraction
    n: LogInterval
    p: LogInterval
    rho: LogInterval

    @property
    def log2n(self) -> Fraction:
        return Fraction(4 * self.k) / (1 - 4 * self.alpha)

    @property
    def log2p(self) -> Fraction:
        """Exponent of p from the definition ``p = 2 n^{-(7+4 alpha)/(16k)}``."""
        return 1 - self.log2n * (7 + 4 * self.alpha) / (16 * self.k)

    @property
    def log2p_simplified(self) -> Fraction:
        return -(20 * self.alpha + 3) / (4 * (1 - 4 * self.alpha))

    def clique_threshold(self) -> Fraction:
        """``log n / log(1/p) = 16k / (20 alpha + 3)``: l-cliques vanish once ``(l-1)/2`` exceeds it."""
        return self.log2n / -self.log2p

    def min_clique_size(self) -> int:
        """Smallest ``l`` with ``(l - 1)/2 >= log n / log(1/p)``."""
        return math.ceil(2 * self.clique_threshold() + 1)

    def expected_cliques(self, l: int) -> LogInterval:
        """``(e n / l * p^{(l-1)/2})^l``, an upper bound on the expected number of K_l."""
        e = LogInterval.one().exp()
        return (e * self.n / l * self.p ** Fraction(l - 1, 2)) ** l

    def chernoff_bound(self, t, eps) -> LogInterval:
        """``exp(-eps^2 p t^2 / 24)``: a fixed t-set spans fewer than ``(1-eps) p t^2 / 2`` edges."""
        return (LogInterval.exact(eps) ** 2 * self.p * LogInterval.exact(t) ** 2 / 24).neg_exp()

    def density_hypotheses(self) -> dict:
        """Both hypotheses of the density Ramsey bound with ``d = (1 - eps) p``, ``eps = (log n)^{-1/3}``.

        Evaluated with the exact exponent ``2k - 4`` and the simplified ``2k``.
        """
        eps = LogInterval.exact(self.log2n) ** Fraction(-1, 3)
        one_minus = LogInterval.one() - eps
        dd = one_minus * self.p
        out = {}
        for label, e in (("exact", 2 * self.k - 4), ("simplified", 2 * self.k)):
            n_ok = certify_le((LogInterval.exact(2) / dd) ** e, self.n)
            rho_ok = certify_le(self.rho, (dd / 2) ** e)
            out[label] = {
                "exponent": e,
                "n_large_enough": n_ok[0].value,
                "n_margin": n_ok[1],
                "rho_small_enough": rho_ok[0].value,
                "rho_margin": rho_ok[1],
            }
        return out


def kl_construction_params(k: int, alpha) -> KLParams:
    a = as_fraction(alpha)
    if not 0 < a < Fraction(1, 4):
        raise ValueError("alpha must lie in (0, 1/4)")
    if k < 3:
        raise ValueError("k must be at least 3")
    log2n = Fraction(4 * k) / (1 - 4 * a)
    n = LogInterval.pow2(log2n)
    p = LogInterval.pow2(1 - log2n * (7 + 4 * a) / (16 * k))
    rho = LogInterval.exact(log2n) ** 2 / n
    return KLParams(k, a, n, p, rho)


# Monte Carlo ------------------------------------------------------------------


@dataclass(frozen=True)
class KFreeness:
    """Event that G(n, p) contains no K_{k+1}."""

    n: int
    p: float
    k: int

    def __call__(self, g: Graph) -> bool | None:
        return not g.has_clique(self.k + 1)


@dataclass(frozen=True)
class Arrowing:
    """Event that G(n, p) -> (K_k)_r; ``None`` when the search budget runs out."""

    n: int
    p: float
    k: int
    r: int
    node_budget: int = 200_000

    def __call__(self, g: Graph) -> bool | None:
        cert = arrows(g, self.k, self.r, node_budget=self.node_budget)
        if cert.verdict is Outcome.INDETERMINATE:
            return None
        return cert.verdict is Outcome.ARROWS


@dataclass
class MCResult:
    experiment: str
    params: dict
    seed: int
    trials: int
    successes: int
    undecided: int
    estimate: float
    ci95: tuple[float, float]
    runtime_ms: float
    partial: bool = False

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "successes": self.successes,
            "undecided": self.undecided,
            "estimate": self.estimate,
            "ci95": list(self.ci95),
            "runtime_ms": self.runtime_ms,
            "partial": self.partial,
        }


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    lo, hi = proportion_confint(successes, trials, alpha=0.05, method="wilson")
    return (float(lo), float(hi))


def _run_trials(event, seed: int, start: int, stop: int) -> tuple[int, int]:
    hits = undecided = 0
    for t in range(start, stop):
        g = sample_gnp(event.n, event.p, seed, stream=t)
        res = event(g)
        if res is None:
            undecided += 1
        elif res:
            hits += 1
    return hits, undecided


def mc_estimate(event, trials: int, seed: int, n_jobs: int = 1) -> MCResult:
    """Frequency of ``event`` over ``trials`` seeded samples of G(n, p) with a Wilson 95% interval.

    Trial ``t`` samples with Philox key ``seed + t * 2**64``, so results do not
    depend on ``n_jobs``.  Undecided trials are excluded from the estimate and
    flag the result as partial.
    """
    t0 = time.perf_counter()
    if n_jobs <= 1:
        hits, undecided = _run_trials(event, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, n_jobs + 1).astype(int)
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(
                pool.map(_run_trials, [event] * n_jobs, [seed] * n_jobs, bounds[:-1].tolist(), bounds[1:].tolist())
            )
        hits = sum(h for h, _ in parts)
        undecided = sum(u for _, u in parts)
    decided = trials - undecided
    estimate = hits / decided if decided else math.nan
    return MCResult(
        experiment=type(event).__name__,
        params={k: v for k, v in event.__dict__.items()},
        seed=seed,
        trials=trials,
        successes=hits,
        undecided=undecided,
        estimate=estimate,
        ci95=wilson_interval(hits, decided),
        runtime_ms=1000 * (time.perf_counter() - t0),
        partial=undecided > 0,
    )
