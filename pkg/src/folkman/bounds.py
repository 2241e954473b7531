"""Parameter derivation and certified checks of the Folkman upper-bound argument.

Every magnitude is a :class:`~folkman.logint.LogInterval`, so the checks run
at the real threshold ``n = k^{400 k^4} R^{40 k^2}`` and not at a scaled-down
stand-in.  Logarithms are binary throughout, matching the argument being
checked; ``ln`` appears only where a natural log is meant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .hypergraph import delta_nk, ell
from .logint import (
    DomainError,
    LogInterval,
    Verdict,
    binomial,
    certify_le,
    ctx,
    factorial,
    log2_real,
)


def _li(x) -> LogInterval:
    return x if isinstance(x, LogInterval) else LogInterval.exact(x)


# Ramsey numbers --------------------------------------------------------------


def ramsey_upper_skolem(k: int, r: int) -> LogInterval:
    """Skolem's bound ``R(k; r) < r^{rk}``."""
    if k < 3 or r < 2:
        raise ValueError("need k >= 3 and r >= 2")
    return LogInterval.exact(r ** (r * k))


def product_lower_table(r: int, base_values: dict[int, int]) -> dict[int, int]:
    """Best lower bounds for ``1..r`` colours from ``R(k;s+t) >= (R(k;s)-1)(R(k;t)-1)+1``."""
    best: dict[int, int] = {}
    for s in range(1, r + 1):
        cands = [base_values[s]] if s in base_values else []
        for a in range(1, s // 2 + 1):
            b = s - a
            if a in best and b in best:
                cands.append((best[a] - 1) * (best[b] - 1) + 1)
        if cands:
            best[s] = max(cands)
    return best


def ramsey_lower_product(k: int, r: int, base_values: dict[int, int]) -> LogInterval:
    best = product_lower_table(r, base_values)
    if r not in best:
        raise ValueError(f"base values {sorted(base_values)} do not reach r={r} colours")
    return LogInterval.exact(best[r])


# the parameter set -----------------------------------------------------------


def threshold_n(k: int, R) -> LogInterval:
    """Smallest admissible vertex count ``k^{400 k^4} R^{40 k^2}``."""
    return LogInterval.exact(k) ** (400 * k**4) * _li(R) ** (40 * k**2)


@dataclass(frozen=True)
class ParamSet:
    k: int
    r: int
    R: LogInterval
    n: LogInterval
    b: LogInterval
    C: LogInterval
    C0: LogInterval
    tau: LogInterval
    eps: LogInterval
    alpha: LogInterval
    p: LogInterval

    def summary(self) -> dict:
        out = {"k": self.k, "r": self.r}
        for name in ("R", "n", "b", "C", "C0", "tau", "eps", "alpha", "p"):
            out[f"log2_{name}"] = list(getattr(self, name).log2_bounds())
        return out

    def containments(self) -> dict[str, bool]:
        """Re-derive each defining expression and check it overlaps the stored enclosure."""
        k, n = self.k, self.n
        shrink = n ** Fraction(-2, k + 1)
        fresh = {
            "b": (LogInterval.exact(2) * self.R**2).reciprocal(),
            "p": self.C * shrink,
            "tau": self.C0 * shrink,
            "eps": self.alpha / (2 * self.r),
            "alpha": binomial(self.R, k).reciprocal(),
        }
        return {name: _overlaps(getattr(self, name), val) for name, val in fresh.items()}


def _overlaps(a: LogInterval, b: LogInterval) -> bool:
    return a.lo <= b.hi and b.lo <= a.hi


def derive_params(k: int, r: int, R, n=None, log2n=None) -> ParamSet:
    """All constants of the random-graph argument for given ``k``, ``r`` and Ramsey value ``R``.

    ``n`` defaults to :func:`threshold_n`; ``log2n`` is a shortcut for
    ``n = 2**log2n``.
    """
    if k < 3 or r < 2:
        raise ValueError("need k >= 3 and r >= 2")
    RR = _li(R)
    verdict, _ = certify_le(LogInterval.exact(2 * r + 1), RR)
    if verdict is not Verdict.CERTIFIED_TRUE:
        raise ValueError(f"R must exceed 2r = {2 * r}")
    if log2n is not None:
        if n is not None:
            raise ValueError("give n or log2n, not both")
        n = LogInterval.pow2(log2n)
    nn = threshold_n(k, RR) if n is None else _li(n)
    logn = nn.log2_iv
    logk = log2_real(k)
    C = LogInterval(5 * ctx.sqrt(logn * logk)) * RR**16
    C0 = LogInterval(4 * ctx.sqrt(logn)) * RR ** Fraction(10, k)
    shrink = nn ** Fraction(-2, k + 1)
    alpha = binomial(RR, k).reciprocal()
    return ParamSet(
        k=k,
        r=r,
        R=RR,
        n=nn,
        b=(LogInterval.exact(2) * RR**2).reciprocal(),
        C=C,
        C0=C0,
        tau=C0 * shrink,
        eps=alpha / (2 * r),
        alpha=alpha,
        p=C * shrink,
    )


# the chain -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainItem:
    id: str
    lhs: LogInterval | None
    rhs: LogInterval | None
    verdict: Verdict
    margin: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "lhs_log2": list(self.lhs.log2_bounds()) if self.lhs is not None else None,
            "rhs_log2": list(self.rhs.log2_bounds()) if self.rhs is not None else None,
            "verdict": self.verdict.value,
            "margin": None if math.isnan(self.margin) else self.margin,
            "note": self.note,
        }


@dataclass(frozen=True)
class ChainReport:
    k: int
    r: int
    R: LogInterval
    n: LogInterval
    items: tuple[ChainItem, ...] = field(default_factory=tuple)

    @property
    def all_true(self) -> bool:
        return all(it.verdict is Verdict.CERTIFIED_TRUE for it in self.items)

    @property
    def any_false(self) -> bool:
        return any(it.verdict is Verdict.CERTIFIED_FALSE for it in self.items)

    def item(self, id_: str) -> ChainItem:
        for it in self.items:
            if it.id == id_:
                return it
        raise KeyError(id_)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "log2_R": list(self.R.log2_bounds()),
            "log2_n": list(self.n.log2_bounds()),
            "items": [it.to_json() for it in self.items],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def recheck_report(data: dict) -> bool:
    """Recompute each verdict from the recorded log2 sides of a ChainReport JSON."""
    for it in data["items"]:
        if it["lhs_log2"] is None or it["rhs_log2"] is None:
            if it["verdict"] != Verdict.INDETERMINATE.value:
                return False
            continue
        (llo, lhi), (rlo, rhi) = it["lhs_log2"], it["rhs_log2"]
        if lhi <= rlo:
            expect = Verdict.CERTIFIED_TRUE.value
        elif llo > rhi:
            expect = Verdict.CERTIFIED_FALSE.value
        else:
            expect = Verdict.INDETERMINATE.value
        # outward float rounding may only weaken a certified verdict
        if it["verdict"] != expect and expect != Verdict.INDETERMINATE.value:
            return False
    return True


def _item(id_: str, build) -> ChainItem:
    try:
        lhs, rhs = build()
    except DomainError as exc:
        return ChainItem(id_, None, None, Verdict.INDETERMINATE, math.nan, f"undefined: {exc}")
    verdict, margin = certify_le(lhs, rhs)
    return ChainItem(id_, lhs, rhs, verdict, margin)


def check_chain(ps: ParamSet) -> ChainReport:
    """Certify every inequality the upper-bound argument needs, as ``lhs <= rhs`` items.

    Items, in order:

    ``p_at_most_half``      (2C)^{(k+1)/2} <= n, i.e. p <= 1/2
    ``n_final``             (3/b)^{(k+1)/(k-1)} C^{binom(k+2,2)} <= n
    ``n_strong``            2^{10k^2 sqrt(log n log k)} R^{20k^2} <= n
    ``tau_small``           tau <= ((k^2)!)^{-2}
    ``codegree_small``      delta(n,k,tau) <= eps / (k^2)!
    ``tau_power_j<j>``      2^{16k^4} R^{2k} <= tau^{j-1} n^{l_j - 2}, each j
    ``c0_lower``            2^{80k^2} R^{10/k} <= C0
    ``ratio_last``          2R^3 log R (2k)^{4k^2} log n <= C / C0
    ``container_vs_edges``  r (2k^2)! log(1/eps) C0 log(1/tau) <= C / (2R^2)
    ``bp_vs_fkg``           C^{binom(k+1,2)} n <= (b/3) C n^{1+(k-1)/(k+1)}
    """
    k, r, R, n = ps.k, ps.r, ps.R, ps.n
    logk = log2_real(k)
    logn = n.log2_iv
    k2fact = factorial(k * k)
    items = [
        _item("p_at_most_half", lambda: ((2 * ps.C) ** Fraction(k + 1, 2), n)),
        _item(
            "n_final",
            lambda: (
                (LogInterval.exact(3) / ps.b) ** Fraction(k + 1, k - 1) * ps.C ** math.comb(k + 2, 2),
                n,
            ),
        ),
        _item(
            "n_strong",
            lambda: (LogInterval(10 * k * k * ctx.sqrt(logn * logk)) * R ** (20 * k * k), n),
        ),
        _item("tau_small", lambda: (ps.tau, (k2fact**2).reciprocal())),
        _item("codegree_small", lambda: (delta_nk(n, k, ps.tau), ps.eps / k2fact)),
    ]
    target = LogInterval.pow2(16 * k**4) * R ** (2 * k)
    for j in range(2, math.comb(k, 2) + 1):
        items.append(
            _item(f"tau_power_j{j}", lambda j=j: (target, ps.tau ** (j - 1) * n ** (ell(j) - 2)))
        )
    items.append(_item("c0_lower", lambda: (LogInterval.pow2(80 * k * k) * R ** Fraction(10, k), ps.C0)))
    items.append(
        _item(
            "ratio_last",
            lambda: (
                2 * R**3 * R.log2() * LogInterval.exact(2 * k) ** (4 * k * k) * n.log2(),
                ps.C / ps.C0,
            ),
        )
    )
    items.append(
        _item(
            "container_vs_edges",
            lambda: (
                r * factorial(2 * k * k) * ps.eps.reciprocal().log2() * ps.C0 * ps.tau.reciprocal().log2(),
                ps.C / (2 * R**2),
            ),
        )
    )
    items.append(
        _item(
            "bp_vs_fkg",
            lambda: (
                ps.C ** math.comb(k + 1, 2) * n,
                ps.b / 3 * ps.C * n ** (1 + Fraction(k - 1, k + 1)),
            ),
        )
    )
    return ChainReport(k, r, R, n, tuple(items))


# probability bounds ----------------------------------------------------------


def fkg_lower_bound(n, k: int, C) -> LogInterval:
    """``exp(-C^{binom(k+1,2)} n)``, a lower bound on P(G(n,p) has no K_{k+1}) for ``p = C n^{-2/(k+1)}``."""
    nn, CC = _li(n), _li(C)
    if k < 3:
        raise ValueError("k must be at least 3")
    if certify_le(LogInterval.exact(3), nn)[0] is not Verdict.CERTIFIED_TRUE:
        raise ValueError("n must be at least 3")
    p = CC * nn ** Fraction(-2, k + 1)
    if certify_le(p, LogInterval.exact(Fraction(1, 2)))[0] is not Verdict.CERTIFIED_TRUE:
        raise DomainError("the bound needs p = C n^{-2/(k+1)} <= 1/2, certified")
    if CC.is_zero:
        return LogInterval.one()
    return (CC ** math.comb(k + 1, 2) * nn).neg_exp()


def _log_inverse(x: LogInterval, name: str, upper: Fraction) -> LogInterval:
    # log2(1/x) for x certifiably in (0, upper)
    if x.is_zero or certify_le(LogInterval.exact(upper), x)[0] is not Verdict.CERTIFIED_FALSE:
        raise DomainError(f"{name} must lie strictly between 0 and {upper}")
    return x.reciprocal().log2()


def container_count_bound(k: int, eps, tau, n, r: int = 1) -> LogInterval:
    """Upper bound on ``r * ln|C|``: ``r (2k^2)! log(1/eps) tau log(1/tau) binom(n, 2)``."""
    t = _li(tau)
    log_e = _log_inverse(_li(eps), "eps", Fraction(1, 2))
    log_t = _log_inverse(t, "tau", Fraction(1))
    return r * factorial(2 * k * k) * log_e * t * log_t * binomial(_li(n), 2)


def container_constant(h: int) -> int:
    return 800 * math.factorial(h) ** 3 * h


def generic_container_bound(h: int, eps, tau, num_vertices) -> LogInterval:
    """``c log(1/eps) tau log(1/tau) N`` with ``c = 800 (h!)^3 h`` for an ``h``-graph on ``N`` vertices."""
    t = _li(tau)
    log_e = _log_inverse(_li(eps), "eps", Fraction(1, 2))
    log_t = _log_inverse(t, "tau", Fraction(1))
    return LogInterval.exact(container_constant(h)) * log_e * t * log_t * _li(num_vertices)


@dataclass(frozen=True)
class NonRamseyBound:
    """``|C|^r exp(-p binom(n,2) / R^2)`` compared with ``exp(-b p binom(n,2))``.

    The union bound equals ``exp(-exponent)``; ``exponent`` is ``None`` when it
    is not certifiably positive (the bound is then at least 1).
    """

    container_ln: LogInterval
    density_term: LogInterval
    target: LogInterval
    exponent: LogInterval | None
    verdict: Verdict
    margin: float

    @property
    def value(self) -> LogInterval | None:
        return self.exponent.neg_exp() if self.exponent is not None else None

    @property
    def target_value(self) -> LogInterval:
        return self.target.neg_exp()


def nonramsey_probability_bound(ps: ParamSet, container_ln: LogInterval | None = None) -> NonRamseyBound:
    """Union bound on P(G(n,p) is not Ramsey) and whether it beats ``exp(-b p binom(n,2))``.

    ``container_ln`` overrides the bound on ``r ln|C|`` (pass ``LogInterval.zero()``
    for a single container).
    """
    edges = binomial(ps.n, 2)
    if container_ln is None:
        container_ln = container_count_bound(ps.k, ps.eps, ps.tau, ps.n, r=ps.r)
    density = ps.p * edges / ps.R**2
    target = ps.b * ps.p * edges
    verdict, margin = certify_le(container_ln + target, density)
    try:
        exponent = density - container_ln
    except DomainError:
        exponent = None
    return NonRamseyBound(container_ln, density, target, exponent, verdict, margin)
