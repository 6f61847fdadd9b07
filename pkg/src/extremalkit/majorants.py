"""Fit majorants rho(r) and the derivative bounds they induce.

Every family is evaluated in the variable t = log r, where the fit-majorant
conditions live (t -> rho(e^t) increasing and strictly convex on (-inf, 0]),
so nothing underflows as r -> 0.  psi(t) = d/dt rho(e^t) is inverted by
bisection for every family; closed forms serve only as cross-checks.
Large products of factorials and exponentials are carried as logarithms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("power", "log-power", "power-log")
LIMIT_T = -1e300  # probe point for rho(0+), r = exp(LIMIT_T)
LIMIT_TOL = 1e-6


@dataclass(frozen=True)
class LogValue:
    """A positive quantity kept as its logarithm; `value` is None on overflow."""

    log: float

    @property
    def value(self) -> float | None:
        return math.exp(self.log) if self.log < 709.0 else None

    def __float__(self) -> float:
        return math.exp(self.log) if self.log < 709.0 else math.inf


@dataclass(frozen=True)
class MajorantSpec:
    """rho(r) from one of three families.

    power(A, sigma):      A r^sigma
    log-power(s):         (1/s) (1 / log(e/r))^s
    power-log(A, sigma):  A r^sigma (log(1/r) + 2/sigma)
    """

    family: str
    A: float = 1.0
    sigma: float = 1.0
    s: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "log-power":
            if not self.s > 0:
                raise ValueError("log-power needs s > 0")
        elif not (self.A > 0 and 0 < self.sigma <= 1):
            raise ValueError("need A > 0 and sigma in (0, 1]")

    @classmethod
    def power(cls, A: float, sigma: float) -> "MajorantSpec":
        return cls("power", A=A, sigma=sigma)

    @classmethod
    def log_power(cls, s: float) -> "MajorantSpec":
        return cls("log-power", s=s)

    @classmethod
    def power_log(cls, A: float, sigma: float) -> "MajorantSpec":
        return cls("power-log", A=A, sigma=sigma)

    # t-space evaluators -----------------------------------------------------
    def rho_t(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "power":
            return self.A * np.exp(self.sigma * t)
        if self.family == "log-power":
            return (1.0 / self.s) * (1.0 - t) ** (-self.s)
        return self.A * np.exp(self.sigma * t) * (2.0 / self.sigma - t)

    def psi(self, t):
        """psi(t) = d/dt rho(e^t)."""
        t = np.asarray(t, dtype=float)
        if self.family == "power":
            return self.A * self.sigma * np.exp(self.sigma * t)
        if self.family == "log-power":
            return (1.0 - t) ** (-self.s - 1.0)
        return self.A * np.exp(self.sigma * t) * (1.0 - self.sigma * t)

    # r-space ----------------------------------------------------------------
    def rho(self, r):
        return self.rho_t(np.log(r))

    def derivative(self, r):
        """rho'(r) = psi(log r) / r."""
        r = np.asarray(r, dtype=float)
        return self.psi(np.log(r)) / r

    @property
    def slope_at_one(self) -> float:
        return float(self.psi(0.0))

    def to_dict(self) -> dict:
        if self.family == "log-power":
            return {"family": self.family, "s": self.s}
        return {"family": self.family, "A": self.A, "sigma": self.sigma}


# ---------------------------------------------------------------------------
# Conditions


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    witness: str


def validate_majorant(spec: MajorantSpec) -> tuple[ConditionResult, ...]:
    """Both fit-majorant conditions, each with a witness value."""
    t = np.linspace(-20.0, 0.0, 64)
    f = spec.rho_t(t)
    d1 = np.diff(f)
    d2 = np.diff(f, 2)
    inc = bool(np.all(d1 > 0))
    convex = bool(np.all(d2 > 0))
    out = [
        ConditionResult("increasing", inc, f"min first difference {d1.min():.3e}"),
        ConditionResult("strictly convex", convex, f"min second difference {d2.min():.3e}"),
    ]
    slope = spec.slope_at_one
    out.append(ConditionResult("rho'(1) >= 1", slope >= 1.0, f"rho'(1) = {slope:.12g}"))
    lim = float(spec.rho_t(LIMIT_T))
    out.append(ConditionResult("rho(0+) = 0", lim < LIMIT_TOL, f"rho(exp({LIMIT_T:g})) = {lim:.3e}"))
    return tuple(out)


def is_fit_majorant(spec: MajorantSpec) -> bool:
    return all(c.passed for c in validate_majorant(spec))


def psi_inverse(spec: MajorantSpec, y: float) -> float:
    """t <= 0 with psi(t) = y, for y in (0, rho'(1)], by bisection."""
    top = spec.slope_at_one
    if not 0 < y <= top * (1 + 1e-15):
        raise ValueError(f"y = {y} outside (0, rho'(1)] = (0, {top}]")
    if y >= top:
        return 0.0
    lo = -1.0
    while spec.psi(lo) > y:
        lo *= 2.0
        if lo < -1e300:
            raise ValueError(f"no bracket for y = {y}")
    hi = 0.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        v = float(spec.psi(mid))
        if abs(v - y) <= 1e-12 * y:
            return mid
        if v < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def psi_inverse_closed_form(spec: MajorantSpec, y: float) -> float | None:
    """Closed-form inverse where one exists (power and log-power)."""
    if spec.family == "power":
        return math.log(y / (spec.A * spec.sigma)) / spec.sigma
    if spec.family == "log-power":
        return 1.0 - y ** (-1.0 / (spec.s + 1.0))
    return None


def _exponent(spec: MajorantSpec, k: float, n: int, c: float = 1.0) -> float:
    """-k psi^{-1}(ck/n) + n rho(exp psi^{-1}(ck/n))."""
    t = psi_inverse(spec, c * k / n)
    return -k * t + n * float(spec.rho_t(t))


def _log_multi_factorial(alpha) -> float:
    return sum(math.lgamma(a + 1) for a in alpha)


def derivative_bound(spec: MajorantSpec, N: int, n: int, alpha) -> LogValue:
    """alpha! N^(|a|/2) exp(-|a| psi^{-1}(|a|/n) + n rho(exp psi^{-1}(|a|/n)))."""
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    k = sum(alpha)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= |alpha| <= n, got |alpha|={k}, n={n}")
    if k / n > spec.slope_at_one:
        raise ValueError(f"|alpha|/n = {k / n} exceeds rho'(1) = {spec.slope_at_one}")
    return LogValue(_log_multi_factorial(alpha) + 0.5 * k * math.log(N) + _exponent(spec, k, n))


def corollary_bound(case: str, N: int, n: int, alpha, A: float = 1.0, sigma: float = 1.0,
                    s: float = 1.0) -> LogValue:
    """Closed-form derivative bounds for the three majorant families.

    a: alpha! (A sigma sqrt(N)^sigma e)^(|a|/sigma) (n/|a|)^(|a|/sigma), rho = A r^sigma
    b: alpha! (sqrt(N)/e)^|a| exp((1+1/s) |a|^(s/(1+s)) n^(1/(1+s))), log-power(s)
    c: alpha! N^(|a|/2) (e/(e-1) e^(2m))^|a| (n/|a|)^(m|a|) (1+log(n/|a|))^(m|a|),
       rho = r^sigma (log(1/r) + 2/sigma), m = 1/sigma
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    k = sum(alpha)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= |alpha| <= n, got |alpha|={k}, n={n}")
    lf = _log_multi_factorial(alpha)
    if case == "a":
        if not (0 < sigma <= 1 and A >= 1 / sigma):
            raise ValueError("case a needs sigma in (0, 1] and A >= 1/sigma")
        base = math.log(A * sigma) + 0.5 * sigma * math.log(N) + 1.0
        return LogValue(lf + (k / sigma) * (base + math.log(n / k)))
    if case == "b":
        if not s > 0:
            raise ValueError("case b needs s > 0")
        return LogValue(lf + k * (0.5 * math.log(N) - 1.0)
                        + (1 + 1 / s) * k ** (s / (1 + s)) * n ** (1 / (1 + s)))
    if case == "c":
        if not 0 < sigma <= 1:
            raise ValueError("case c needs sigma in (0, 1]")
        m = 1 / sigma
        return LogValue(lf + 0.5 * k * math.log(N) + k * (math.log(math.e / (math.e - 1)) + 2 * m)
                        + m * k * math.log(n / k) + m * k * math.log1p(math.log(n / k)))
    raise ValueError(f"unknown case {case!r}; expected 'a', 'b' or 'c'")


def ball_derivative_bound(capacity: float, N: int, n: int, alpha) -> LogValue:
    """Derivative bound on a unit ball of capacity C from rho(r) = max(1, 1/C) r.

    Case a with sigma = 1 and A = max(1, 1/C), after alpha! (n/|a|)^|a| <= n^|a|:
    (max(1, 1/C) sqrt(N) e)^|a| n^|a|.
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    k = sum(alpha)
    if capacity <= 0 or not 1 <= k <= n:
        raise ValueError("need capacity > 0 and 1 <= |alpha| <= n")
    A = max(1.0, 1.0 / capacity)
    return LogValue(k * (math.log(A) + 0.5 * math.log(N) + 1.0 + math.log(n)))


# ---------------------------------------------------------------------------
# Series and probes


@dataclass(frozen=True)
class SeriesValue:
    value: float
    terms: int
    tail_bound: float
    bound: float   # exp(m x)
    holds: bool    # value <= exp(m x)


def g_m_series(m: float, x: float, terms: int = 1) -> SeriesValue:
    """sum_k (x^k / k!)^m, summed until the ratio-test tail bound is below 1e-12.

    `terms` is the minimum number of terms; more are added as needed.
    """
    if m < 1 or x < 0 or terms < 1:
        raise ValueError("need m >= 1, x >= 0, terms >= 1")
    bound = math.exp(m * x)
    if x == 0:
        return SeriesValue(1.0, 1, 0.0, bound, True)
    total, k = 0.0, 0
    logx = math.log(x)
    while True:
        a = math.exp(m * (k * logx - math.lgamma(k + 1)))
        total += a
        k += 1
        q = (x / k) ** m  # ratio a_k / a_{k-1}, decreasing from here on
        if k >= terms and q < 1:
            tail = a * q / (1 - q)
            if tail < 1e-12:
                break
    return SeriesValue(total, k, tail, bound, total <= bound * (1 + 1e-12))


@dataclass(frozen=True)
class ProbeValue:
    value: float
    skipped: tuple[int, ...]  # k with c k / n > rho'(1)


def m_bounded_probe(spec: MajorantSpec, c: float, r: float, n: int) -> ProbeValue:
    """(1/n) log(1 + sum_k exp(-k psi^{-1}(ck/n) + n rho(exp psi^{-1}(ck/n))) r^k)."""
    if not (0 < c <= 1 and 0 <= r <= 1 and n >= 1):
        raise ValueError("need c in (0, 1], r in [0, 1], n >= 1")
    if r == 0:
        return ProbeValue(0.0, ())
    top = spec.slope_at_one
    logs, skipped = [0.0], []
    for k in range(1, n + 1):
        if c * k / n > top:
            skipped.append(k)
            continue
        logs.append(_exponent(spec, k, n, c) + k * math.log(r))
    logs = np.array(logs)
    big = logs.max()
    return ProbeValue(float((big + math.log(np.exp(logs - big).sum())) / n), tuple(skipped))


PROBE_C = (0.25, 0.5, 1.0)
PROBE_R = (1e-3, 1e-2, 1e-1, 1.0)
PROBE_N = (50, 100, 200, 400)


@dataclass(frozen=True)
class ProbeRow:
    c: float
    r: float
    values: tuple[float, ...]  # over PROBE_N
    worst: float               # max over n, standing in for the limsup
    monotone: bool             # values nondecreasing in n
    bound: float | None        # (e/c) rho(r) for power families


def m_bounded_grid(spec: MajorantSpec, cs=PROBE_C, rs=PROBE_R, ns=PROBE_N) -> list[ProbeRow]:
    rows = []
    for c in cs:
        for r in rs:
            vals = tuple(m_bounded_probe(spec, c, r, n).value for n in ns)
            bound = math.e / c * float(spec.rho(r)) if spec.family == "power" else None
            mono = all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            rows.append(ProbeRow(c, r, vals, max(vals), mono, bound))
    return rows


def doubling_ratio(spec: MajorantSpec, lo: float = 1e-8, hi: float = 0.5, count: int = 64) -> float:
    """max of rho(2r)/rho(r) over a log grid; finite means doubly bounded on the grid."""
    r = np.geomspace(lo, hi, count)
    return float(np.max(spec.rho(2 * r) / spec.rho(r)))


def mb_bounded_sample(spec: MajorantSpec, s: int, c_s: float, C_s: float, n: int) -> float:
    """Largest excess of the mb-boundedness inequality over all (k_1..k_s), sum <= n.

    Nonpositive means the inequality held on every sampled tuple.
    """
    if s < 1 or n < 1 or not 0 < c_s <= 1 or C_s < 0:
        raise ValueError("need s >= 1, n >= 1, c_s in (0, 1], C_s >= 0")
    worst = -math.inf
    for ks in itertools.product(range(n + 1), repeat=s):
        total = sum(ks)
        if not 1 <= total <= n:
            continue
        left = 0.0
        for k in ks:
            if k:
                t = psi_inverse(spec, k / n)
                left += -k * t + n * float(spec.rho_t(t))
        right = _exponent(spec, total, n, c_s) + C_s * total
        worst = max(worst, left - right)
    return worst


def laplace_sum_probe(p: float, s_values=None) -> tuple[float, list[tuple[float, float]]]:
    """Empirical constant B(p) with sum_k exp(q k^(1/q) - k s) <= exp(B s^-(p-1)).

    Returns the smallest B that works on the sampled s values, plus the
    samples (s, log of the sum).  This only fits a constant; it proves nothing.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    q = p / (p - 1)
    s_values = np.geomspace(0.05, 5.0, 24) if s_values is None else np.asarray(s_values, float)
    samples, B = [], 0.0
    for s in s_values:
        # the summand peaks near k ~ s^-q; sum well past it
        kmax = int(50 + 40 * s ** (-q))
        k = np.arange(kmax + 1, dtype=float)
        logs = q * k ** (1 / q) - k * s
        big = logs.max()
        total = big + math.log(np.exp(logs - big).sum())
        samples.append((float(s), float(total)))
        B = max(B, total * s ** (p - 1))
    return B, samples


# ---------------------------------------------------------------------------
# From Markov-type bounds back to the profile


@dataclass(frozen=True)
class ProfileBound:
    A: float  # m-boundedness constant
    c: float
    C: float

    def rho_bound(self, spec: MajorantSpec, r: float) -> float:
        """Upper bound for rho_E(r) implied by a majorant-type Markov inequality."""
        if r <= 1 / self.C:
            return self.A / self.c * float(spec.rho(self.C * r))
        return self.A / self.c * float(spec.rho(1.0)) + math.log(self.C * r)

    def capacity_bound(self, spec: MajorantSpec) -> float:
        return math.exp(-self.A * float(spec.rho(1.0)) / self.c) / self.C


def fitted_power_majorant(gamma: float, B: float, profile_radii=None, profile_rho=None) -> MajorantSpec:
    """Power majorant A r^gamma dominating a fitted profile on (0, 1].

    A is the largest of B, 1/gamma (so rho'(1) = A gamma >= 1) and the sampled
    ratios rho_hat(r)/r^gamma for r <= 1.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    A = max(B, 1.0 / gamma)
    if profile_radii is not None:
        r = np.asarray(profile_radii, float)
        v = np.asarray(profile_rho, float)
        sel = r <= 1
        if sel.any():
            A = max(A, float(np.max(v[sel] / r[sel] ** gamma)))
    return MajorantSpec.power(A, gamma)


def bound_table(spec: MajorantSpec, N: int, entries) -> list[tuple[int, tuple, float, float]]:
    """(n, alpha, factor, log bound) for entries with |alpha|/n <= rho'(1)."""
    out = []
    for e in entries:
        k = sum(e.alpha)
        if k / e.n > spec.slope_at_one:
            continue
        out.append((e.n, e.alpha, e.factor, derivative_bound(spec, N, e.n, e.alpha).log))
    return out

