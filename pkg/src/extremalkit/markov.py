"""Sharp Markov factors sup ||D^alpha P||_E / ||P||_E and Markov-type inequalities."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .extremal import ExtremalEngine, engine_for
from .parallel import pmap
from .polynomials import MultiIndex, format_alpha, multi_factorial, multi_indices, order

DRIFT_TOL = 0.005


def _scan(engine: ExtremalEngine, alpha: MultiIndex) -> tuple[float, float, int]:
    """Max over eval nodes of the certified factor, by branch and bound.

    Every eval node first gets the LP value on the base nodes, which bounds the
    true factor at that node from above.  Nodes are then refined in decreasing
    order of that bound until no remaining bound can beat the best certified
    value, so the result equals a full scan of all eval nodes.
    """
    F = engine.space.values(engine.disc.eval_nodes, alpha)
    screens = [engine.screen(f) for f in F]
    bounds = np.array([r.optimum for r in screens])
    best, upper, refined = 0.0, 0.0, 0
    for i in np.argsort(-bounds, kind="stable"):
        if bounds[i] <= best * (1 + 1e-9):
            break
        res = engine.maximize(F[i], first=screens[i])
        refined += 1
        best = max(best, res.value)
        upper = max(upper, min(res.lp_value, bounds[i]))
    return best, max(upper, best), refined


@dataclass(frozen=True)
class MarkovEntry:
    n: int
    alpha: MultiIndex
    factor: float
    upper: float
    factor_check: float
    drift: float
    stable: bool


def markov_factor(s, n: int, alpha, density: int = 4, phase_count: int = 32,
                  stability_check: bool = True) -> MarkovEntry:
    """Sharp factor sup ||D^alpha P||_E / ||P||_E over deg P <= n.

    The density-doubled rerun flags entries whose value moves by more than 0.5%.
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != s.ambient_dim:
        raise ValueError(f"alpha has {len(alpha)} components, set lives in C^{s.ambient_dim}")
    k = order(alpha)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= |alpha| <= n, got |alpha|={k}, n={n}")
    value, upper, _ = _scan(engine_for(s, n, density, phase_count), alpha)
    check, drift = value, 0.0
    if stability_check:
        check, _, _ = _scan(engine_for(s, n, 2 * density, phase_count), alpha)
        drift = abs(check - value) / value if value > 0 else 0.0
    return MarkovEntry(n, alpha, value, upper, check, drift, drift <= DRIFT_TOL)


@dataclass(frozen=True)
class MarkovTable:
    set_id: str
    nvars: int
    entries: tuple[MarkovEntry, ...]
    density: int
    phase_count: int
    metadata: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return all(e.stable for e in self.entries)

    @property
    def max_degree(self) -> int:
        return max(e.n for e in self.entries)

    @property
    def slack(self) -> float:
        """Worst relative gap between LP upper estimates and certified factors."""
        return max((e.upper / e.factor - 1 for e in self.entries if e.factor > 0), default=0.0)

    def factor(self, n: int, alpha) -> float:
        alpha = tuple(np.atleast_1d(alpha))
        if order(alpha) == 0:
            return 1.0
        for e in self.entries:
            if e.n == n and e.alpha == alpha:
                return e.factor
        raise KeyError((n, alpha))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set_id", "n", "alpha", "factor", "stability_flag", "density", "K"])
        for e in self.entries:
            w.writerow([self.set_id, e.n, format_alpha(e.alpha), repr(float(e.factor)),
                        "stable" if e.stable else "unstable", self.density, self.phase_count])
        return buf.getvalue()


def _entry_job(args):
    s, n, alpha, density, K, check = args
    return markov_factor(s, n, alpha, density, K, check)


def markov_table(s, n_max: int, k_max: int | None = None, density: int = 4, phase_count: int = 32,
                 set_id: str = "set", stability_check: bool = True, jobs: int | None = None,
                 n_min: int = 1) -> MarkovTable:
    """Factors for n_min <= n <= n_max and 1 <= |alpha| <= min(n, k_max), graded lex order."""
    k_max = n_max if k_max is None else k_max
    jobs_list = []
    for n in range(n_min, n_max + 1):
        for alpha in multi_indices(s.ambient_dim, min(n, k_max), min_order=1):
            jobs_list.append((s, n, alpha, density, phase_count, stability_check))
    entries = pmap(_entry_job, jobs_list, jobs)
    return MarkovTable(set_id, s.ambient_dim, tuple(entries), density, phase_count)


# ---------------------------------------------------------------------------
# Exponent fits and inequality checks


@dataclass(frozen=True)
class MarkovFit:
    m: float
    M: float
    order: int
    degrees: tuple[int, ...]
    residual: float  # rms of the log-log fit


def fit_markov_exponent(table: MarkovTable, k: int = 1, n_min: int | None = None) -> MarkovFit:
    """Least-squares exponent from log factor ~ m k log n, then the smallest M for that m."""
    n_min = k if n_min is None else n_min
    per_n: dict[int, float] = {}
    for e in table.entries:
        if order(e.alpha) == k and e.stable and e.n >= n_min:
            per_n[e.n] = max(per_n.get(e.n, 0.0), e.factor)
    if len(per_n) < 4:
        raise ValueError(f"need at least 4 degrees with |alpha| = {k}, have {len(per_n)}")
    ns = np.array(sorted(per_n), dtype=float)
    logs = np.log([per_n[int(n)] for n in ns])
    X = np.log(ns)
    slope, icpt = np.polyfit(X, logs, 1)
    resid = logs - (slope * X + icpt)
    m = float(slope / k)
    if abs(m) < 1e-12:
        m = 0.0
    M = smallest_vmi_constant(table, m)
    return MarkovFit(m, M, k, tuple(int(n) for n in ns), float(np.sqrt(np.mean(resid ** 2))))


def smallest_vmi_constant(table: MarkovTable, m: float) -> float:
    """Smallest M with factor <= M^|a| n^(m|a|) / (|a|!)^(m-1) over stable entries."""
    best = 0.0
    for e in table.entries:
        if not e.stable:
            continue
        k = order(e.alpha)
        log_ratio = math.log(e.factor) + (m - 1) * math.lgamma(k + 1) - m * k * math.log(e.n)
        best = max(best, math.exp(log_ratio / k))
    return best


@dataclass(frozen=True)
class VmiCertificate:
    m: float
    M: float
    max_degree: int
    residual: float
    tolerance: float
    passed: bool


def vmi_residual(table: MarkovTable, m: float, M: float, orders: set[int] | None = None) -> float:
    worst = 0.0
    for e in table.entries:
        k = order(e.alpha)
        if orders is not None and k not in orders:
            continue
        bound = k * math.log(M) + m * k * math.log(e.n) - (m - 1) * math.lgamma(k + 1)
        worst = max(worst, math.exp(math.log(e.factor) - bound))
    return worst


def check_vmi(table: MarkovTable, m: float, M: float) -> VmiCertificate:
    """Does VMI(m, M) hold on every entry of the table?"""
    if m < 1 or M <= 0:
        raise ValueError("need m >= 1 and M > 0")
    tol = 1e-6 + table.slack
    res = vmi_residual(table, m, M)
    return VmiCertificate(m, M, table.max_degree, res, tol, res <= 1 + tol)


@dataclass(frozen=True)
class AmiResult:
    m: float
    M: float
    residual: float
    passed: bool


def check_ami(table: MarkovTable, m: float, M: float) -> AmiResult:
    """||grad P|| <= M n^m ||P||, with the gradient bounded by sqrt(N) max_j factor(n, e_j)."""
    if M <= 0:
        raise ValueError("M must be positive")
    per_n: dict[int, float] = {}
    for e in table.entries:
        if order(e.alpha) == 1:
            per_n[e.n] = max(per_n.get(e.n, 0.0), e.factor)
    root = math.sqrt(table.nvars)
    res = max(root * f / (M * n ** m) for n, f in per_n.items())
    return AmiResult(m, M, res, res <= 1 + 1e-6 + table.slack)


@dataclass(frozen=True)
class LowerBoundCheck:
    holds: bool
    B: float
    constants: dict  # k -> M_k
    ratios: dict     # k -> (M_k (k!)^(m-1))^(1/k)


def vmi_lower_bound_check(table: MarkovTable, m: float) -> LowerBoundCheck:
    """Check M_k >= B^k / (k!)^(m-1) with M_k = sup_n factor(n, k) / n^(mk).

    B is the largest constant compatible with every order present, i.e. the
    minimum over k of (M_k (k!)^(m-1))^(1/k); the check holds when it is
    positive.
    """
    Mk: dict[int, float] = {}
    for e in table.entries:
        k = order(e.alpha)
        Mk[k] = max(Mk.get(k, 0.0), e.factor / e.n ** (m * k))
    ratios = {k: (v * math.factorial(k) ** (m - 1)) ** (1.0 / k) for k, v in sorted(Mk.items())}
    B = min(ratios.values())
    return LowerBoundCheck(B > 0 and math.isfinite(B), B, dict(sorted(Mk.items())), ratios)
