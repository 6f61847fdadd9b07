"""Siciak extremal function, radial Green profile, capacity and Hoelder fits.

Degree-n values come from the extremal LP engine: for a point z,

    log sup{|P(z)| : deg P <= n, ||P||_E <= 1} / n

is a lower estimate of V_E(z) that converges as n grows.  The error of the
degree-n value behaves like c(z)/n (for [-1,1], log|T_n(z)|/n = V(z) -
log(2)/n + tiny), so profiles use the Richardson combination

    V_hat = max(v_n, 2 v_n - v_{n/2}),

which removes the 1/n term.  Product sets are handled factor by factor
through V_{E x F}(z, w) = max(V_E(z), V_F(w)).
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import sets as S
from .extremal import engine_for
from .parallel import pmap

WITNESSES = 8
REFINE_TOP = 6
BASE_SAMPLES = 65
DIRECTIONS = 64
BALL_RADII = 8
PRUNE = 0.9
INVARIANT_TOL = 1e-6
BALL_TOL = 1e-9


# ---------------------------------------------------------------------------
# Point values


def _factors(s):
    """1-D factor sets when the Green function splits, else None."""
    if s.ambient_dim == 1:
        return None
    if isinstance(s, (S.RealBox, S.Polydisc)):
        return s.factors()
    if isinstance(s, S.Product):
        return s.factors
    raise S.SetDescriptionError(
        "Green values in several variables are supported for product sets only")


def degree_value(s, z, n: int, density: int = 4, phase_count: int = 32) -> float:
    """log of the certified sup |P(z)| / ||P||_E over deg P <= n, divided by n."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if float(S.distance(s, z if s.ambient_dim > 1 else z[0])) == 0.0:
        return 0.0
    eng = engine_for(s, n, density, phase_count)
    res = eng.maximize(eng.functional(z))
    return max(math.log(res.value), 0.0) / n if res.value > 0 else 0.0


def extremal_value(s, z, n: int, density: int = 4, phase_count: int = 32) -> float:
    """Phi_hat_n(z) = max over degrees d <= n of sup(|P(z)| / ||P||_E)^(1/d).

    Nondecreasing in n by construction and at least 1, since constants are
    admissible.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != s.ambient_dim:
        raise ValueError(f"point has {z.size} coordinates, set lives in C^{s.ambient_dim}")
    best = 0.0
    for d in range(1, n + 1):
        best = max(best, degree_value(s, z, d, density, phase_count))
    return math.exp(best)


def _canonical(s, w: complex) -> complex:
    # V is symmetric under conjugation for real sets
    w = complex(w)
    if s.is_real:
        w = complex(w.real, abs(w.imag))
    return complex(round(w.real, 14), round(w.imag, 14))


class GreenEvaluator:
    """Cached V estimates of one set at a fixed degree.

    `screen` ranks many points at once with witness polynomials: certified
    unit-norm maximizers of |P(z0)| for a few seeds z0 far from E.  Each gives
    the lower bound log|P(z)|/n everywhere, and like Chebyshev polynomials of
    E they track V away from E up to a nearly constant offset.  `values`
    returns the extrapolated and the plain degree-n estimates.  Points are
    arrays of shape (count, N).
    """

    def __init__(self, s, n: int, density: int = 4, phase_count: int = 32):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.set = s
        self.n = int(n)
        self.density = density
        self.phase_count = phase_count
        facs = _factors(s)
        self.factors = facs
        if facs is not None:
            self.parts = [GreenEvaluator(f, n, density, phase_count) for f in facs]
        self._witness = None
        self._raw: dict = {}

    # 1-D kernels ------------------------------------------------------------
    def _witnesses(self) -> np.ndarray:
        if self._witness is None:
            eng = engine_for(self.set, self.n, self.density, self.phase_count)
            center, scale, _ = eng.space.axes[0]
            seeds = center + 2 * scale * np.exp(2j * np.pi * (np.arange(WITNESSES) + 0.5) / WITNESSES)
            cols = [eng.maximize(eng.functional(z0)).coefficients for z0 in seeds]
            self._witness = (eng.space, np.stack(cols, axis=1))
        return self._witness

    def _screen_1d(self, w: np.ndarray) -> np.ndarray:
        space, W = self._witnesses()
        with np.errstate(divide="ignore"):
            v = np.log(np.abs(space.values(w.reshape(-1, 1)) @ W).max(axis=1)) / self.n
        return np.maximum(v, 0.0)

    def _raw_1d(self, w: complex, n: int) -> float:
        key = (_canonical(self.set, w), n)
        if key not in self._raw:
            self._raw[key] = degree_value(self.set, key[0], n, self.density, self.phase_count)
        return self._raw[key]

    def _value_1d(self, w: complex) -> tuple[float, float]:
        hi = self._raw_1d(w, self.n)
        lo = self._raw_1d(w, self.n // 2)
        return max(hi, 2 * hi - lo), hi

    # public -----------------------------------------------------------------
    def screen(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex).reshape(-1, self.set.ambient_dim)
        if self.factors is None:
            return self._screen_1d(Z[:, 0])
        return np.max([p.screen(Z[:, [j]]) for j, p in enumerate(self.parts)], axis=0)

    def values(self, Z) -> tuple[np.ndarray, np.ndarray]:
        """(extrapolated, raw degree-n) estimates at each point."""
        Z = np.asarray(Z, dtype=complex).reshape(-1, self.set.ambient_dim)
        if self.factors is None:
            out = np.array([self._value_1d(w) for w in Z[:, 0]]).reshape(-1, 2)
            return out[:, 0], out[:, 1]
        parts = [p.values(Z[:, [j]]) for j, p in enumerate(self.parts)]
        return (np.max([v for v, _ in parts], axis=0), np.max([r for _, r in parts], axis=0))


def green_estimate(s, z, n: int, density: int = 4, phase_count: int = 32) -> float:
    """Extrapolated estimate V_hat(z) from degrees n and n/2."""
    return float(GreenEvaluator(s, n, density, phase_count).values(z)[0][0])


# ---------------------------------------------------------------------------
# Closed forms used as oracles


def closed_form_green(s, z) -> float | None:
    """Exact V_E(z) for intervals, discs and their products, else None."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    facs = _factors(s) if s.ambient_dim > 1 else None
    if facs is not None:
        vals = [closed_form_green(f, z[j]) for j, f in enumerate(facs)]
        return None if any(v is None for v in vals) else max(vals)
    w = complex(z[0])
    if isinstance(s, S.RealInterval):
        u = (w - 0.5 * (s.a + s.b)) / (0.5 * (s.b - s.a))
        return float(np.log(np.abs(u + np.sqrt(u - 1) * np.sqrt(u + 1))))
    if isinstance(s, S.Disc):
        return max(0.0, math.log(abs(w - s.center) / s.radius))
    return None


def closed_form_rho(s, r: float) -> float | None:
    """Exact rho_E(r): log h(1 + 2r/(b-a)) for [a,b], log(1 + r/R) for discs."""
    facs = _factors(s) if s.ambient_dim > 1 else None
    if facs is not None:
        vals = [closed_form_rho(f, r) for f in facs]
        return None if any(v is None for v in vals) else max(vals)
    if isinstance(s, S.RealInterval):
        t = 1 + 2 * r / (s.b - s.a)
        return math.log(t + math.sqrt(t * t - 1))
    if isinstance(s, S.Disc):
        return math.log1p(r / s.radius)
    return None


# ---------------------------------------------------------------------------
# Radial profile


@dataclass(frozen=True)
class GreenProfile:
    set_id: str
    radii: np.ndarray
    rho: np.ndarray          # extrapolated estimate per radius
    rho_raw: np.ndarray      # plain degree-n estimate at the same maximizer
    degree: int
    samples: np.ndarray      # candidate points per radius after pruning
    ball_excess: np.ndarray  # interior-ball sup minus sphere sup (reported if > 1e-9)
    violations: tuple[str, ...] = ()
    oracle: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set_id", "r", "rho", "n", "samples", "rho_raw", "oracle"])
        for i, r in enumerate(self.radii):
            orc = "" if self.oracle is None else repr(float(self.oracle[i]))
            w.writerow([self.set_id, repr(float(r)), repr(float(self.rho[i])), self.degree,
                        int(self.samples[i]), repr(float(self.rho_raw[i])), orc])
        return buf.getvalue()


def _directions(count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def _base_points(s, per_curve: int) -> np.ndarray:
    """x in E: equally spaced parameter samples of every boundary piece."""
    return S.sample_pieces(s, per_curve)


def _candidates(s, base: np.ndarray, r: float, count: int, axes):
    """Points z = x - w with |w| = r along the given coordinate lines, pruned.

    Only points at distance >= 0.9 r from E are kept: the maximum of V over
    the r-neighborhood of E lies on the level set {dist = r}.  Returns the
    points and their base points x.
    """
    dirs = r * _directions(count)
    blocks, anchors = [], []
    for j in axes:
        Z = np.repeat(base, count, axis=0)
        Z[:, j] -= np.tile(dirs, base.shape[0])
        blocks.append(Z)
        anchors.append(np.repeat(base, count, axis=0))
    Z = np.concatenate(blocks, axis=0)
    X = np.concatenate(anchors, axis=0)
    d = np.atleast_1d(S.distance(s, Z if s.ambient_dim > 1 else Z[:, 0]))
    keep = d >= PRUNE * r
    Z, X = Z[keep], X[keep]
    if s.is_real:
        # V is symmetric under conjugation; fold onto the upper half
        Z = Z.real + 1j * np.abs(Z.imag)
    Z = np.round(Z.real, 14) + 1j * np.round(Z.imag, 14)
    _, idx = np.unique(np.column_stack([Z.real, Z.imag]), axis=0, return_index=True)
    idx = np.sort(idx)
    return Z[idx], X[idx]


def _radius_job(args):
    s, r, n, count, density, K, axes = args
    ev = _evaluator(s, n, density, K)
    Z, X = _candidates(s, _base_points(s, BASE_SAMPLES), r, count, axes)
    if Z.shape[0] == 0:
        return 0.0, 0.0, 0, 0.0
    top = np.argsort(-ev.screen(Z), kind="stable")[:REFINE_TOP]
    vals, raws = ev.values(Z[top])
    i = int(np.argmax(vals))
    best, raw = float(vals[i]), float(raws[i])
    # sparse interior-ball check along the maximizing segment from x*
    z, x = Z[top][i], X[top][i]
    ts = np.arange(1, BALL_RADII) / BALL_RADII
    ball = x[None, :] + ts[:, None] * (z - x)[None, :]
    bvals, _ = ev.values(ball)
    excess = max(0.0, float(bvals.max()) - best)
    return best, raw, int(Z.shape[0]), excess


@functools.lru_cache(maxsize=32)
def _evaluator(s, n, density, K):
    return GreenEvaluator(s, n, density, K)


def _check_invariants(radii, rho, tol=INVARIANT_TOL) -> list[str]:
    out = []
    for i in range(1, len(radii)):
        if rho[i] < rho[i - 1] - tol:
            out.append(f"monotonicity: rho({radii[i]:.6g}) < rho({radii[i - 1]:.6g}) by {rho[i - 1] - rho[i]:.3g}")
    t = np.log(radii)
    for i in range(1, len(radii) - 1):
        lam = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1])
        chord = (1 - lam) * rho[i - 1] + lam * rho[i + 1]
        if rho[i] > chord + tol:
            out.append(f"log-convexity: rho({radii[i]:.6g}) exceeds chord by {rho[i] - chord:.3g}")
    for i in range(len(radii)):
        for k in range(i):
            gap = radii[i] - radii[k]
            if gap < radii[0]:
                continue
            # rho(gap) between samples: linear in log r (the chord, by convexity)
            at_gap = float(np.interp(math.log(gap), t, rho))
            if rho[i] - rho[k] > at_gap + tol:
                out.append(f"subadditivity: rho({radii[i]:.6g}) - rho({radii[k]:.6g}) "
                           f"> rho({gap:.6g}) by {rho[i] - rho[k] - at_gap:.3g}")
    return out


def rho_profile(s, radii, n: int, samples_per_radius: int = DIRECTIONS, density: int = 4,
                phase_count: int = 32, set_id: str = "set", jobs: int | None = None,
                direction: int | None = None) -> GreenProfile:
    """rho_hat(r) = max over x in E and |w| = r of V_hat(x - w), for each radius.

    Candidates are ranked by a cheap low-degree screen and the best few are
    evaluated at degrees n and n/2.  `direction` (1-based) restricts w to one
    coordinate line, which gives the directional profile.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("radius grid is empty")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be positive and increasing")
    if n < 4:
        raise ValueError("n must be >= 4")
    N = s.ambient_dim
    if direction is None:
        axes = tuple(range(N))
    else:
        if not 1 <= direction <= N:
            raise ValueError(f"direction must be in 1..{N}")
        axes = (direction - 1,)
    if N > 1:
        _factors(s)
    jobs_list = [(s, float(r), n, samples_per_radius, density, phase_count, axes) for r in radii]
    out = pmap(_radius_job, jobs_list, jobs)
    rho = np.array([o[0] for o in out])
    raw = np.array([o[1] for o in out])
    samples = np.array([o[2] for o in out])
    excess = np.array([o[3] for o in out])
    violations = _check_invariants(radii, rho)
    violations += [f"interior ball exceeds sphere at r={r:.6g} by {e:.3g}"
                   for r, e in zip(radii, excess) if e > BALL_TOL]
    orc = [closed_form_rho(s, r) for r in radii]
    oracle = None if any(v is None for v in orc) else np.array(orc)
    meta = {"density": density, "K": phase_count, "directions": samples_per_radius,
            "direction": direction, "witnesses": WITNESSES, "refined": REFINE_TOP}
    return GreenProfile(set_id, radii, rho, raw, n, samples, excess, tuple(violations), oracle, meta)


def directional_profile(s, direction: int, radii, n: int, **kw) -> GreenProfile:
    """rho_hat_j(r) = max over z0 in E and |zeta| = r of V_hat(z0 + zeta e_j)."""
    return rho_profile(s, radii, n, direction=direction, **kw)


def log_radii(lo: float = 1e-3, hi: float = 10.0, count: int = 40) -> np.ndarray:
    if count < 1 or lo <= 0 or hi <= lo:
        raise ValueError("need count >= 1 and 0 < lo < hi")
    return np.geomspace(lo, hi, count)


def capacity_radii(r_max: float = 1e3, count: int = 4) -> np.ndarray:
    """Tail grid ending at r_max and containing r_max/2 for the Richardson check."""
    return r_max * 2.0 ** -np.arange(count - 1, -1, -1)


# ---------------------------------------------------------------------------
# Capacity and Hoelder fits


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    at_half: float
    residual: float  # |C(r_max) - C(r_max/2)| / C(r_max)
    r_max: float


def _rho_at(profile: GreenProfile, r: float) -> float:
    """rho_hat at r, linear in log r between samples."""
    return float(np.interp(math.log(r), np.log(profile.radii), profile.rho))


def capacity_estimate(profile: GreenProfile) -> CapacityEstimate:
    """C_hat = exp(log r_max - rho_hat(r_max)), checked against r_max/2."""
    r_max = float(profile.radii[-1])
    if r_max < 10:
        raise ValueError("capacity needs radii up to at least 10")
    c1 = math.exp(math.log(r_max) - profile.rho[-1])
    c2 = math.exp(math.log(r_max / 2) - _rho_at(profile, r_max / 2))
    return CapacityEstimate(c1, c2, abs(c1 - c2) / c1, r_max)


@dataclass(frozen=True)
class HolderCertificate:
    gamma: float
    B: float
    window: tuple[float, float]
    degree: int
    violation: float      # max of rho_hat(r) - B r^gamma on the window
    residual: float       # rms of the log-log fit
    samples: int

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "B": self.B, "window": list(self.window),
                "degree": self.degree, "residuals": {"fit_rms": self.residual,
                                                     "max_violation": self.violation},
                "samples": self.samples}


def fit_holder(profile: GreenProfile, window: tuple[float, float] = (1e-3, 1e-1)) -> HolderCertificate:
    """Least-squares slope of log rho_hat against log r, B = max rho_hat / r^gamma."""
    lo, hi = window
    if not 0 < lo < hi <= 1:
        raise ValueError("window must satisfy 0 < r_lo < r_hi <= 1")
    r = profile.radii
    sel = (r >= lo * (1 - 1e-12)) & (r <= hi * (1 + 1e-12)) & (profile.rho > 0)
    if sel.sum() < 4:
        raise ValueError(f"window {window} holds {int(sel.sum())} positive samples, need 4")
    x = np.log(r[sel])
    y = np.log(profile.rho[sel])
    gamma, icpt = np.polyfit(x, y, 1)
    resid = y - (gamma * x + icpt)
    B = float(np.max(profile.rho[sel] / r[sel] ** gamma))
    viol = float(np.max(profile.rho[sel] - B * r[sel] ** gamma))
    return HolderCertificate(float(gamma), B, (float(lo), float(hi)), profile.degree,
                             viol, float(np.sqrt(np.mean(resid ** 2))), int(sel.sum()))


# ---------------------------------------------------------------------------
# Integral representation on real sets


@dataclass(frozen=True)
class LiftCheck:
    lhs: float
    rhs: float
    difference: float
    points: int


def _gauss_panels(edges: np.ndarray, total: int):
    """Gauss-Legendre nodes and weights spread over panels, `total` nodes overall."""
    panels = len(edges) - 1
    per = max(2, total // panels)
    x, w = np.polynomial.legendre.leggauss(per)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def integral_lift_check(s, z: complex, n: int, points: int = 200, density: int = 4,
                        phase_count: int = 32) -> LiftCheck:
    """Compare V_hat(x + iy) with (1/pi) int V_hat(x + t y) dt / (1 + t^2).

    The integral is taken in theta with t = tan(theta).  Panel edges are
    placed where x + t y crosses an end of the set (kinks of V) and graded
    geometrically towards theta = +-pi/2, where V grows like log|t|.
    """
    if s.ambient_dim != 1 or not s.is_real:
        raise ValueError("the integral representation needs a real set in one variable")
    z = complex(z)
    ev = GreenEvaluator(s, n, density, phase_count)

    def V(w):
        return float(ev.values(np.array([[w]]))[0][0])

    lhs = V(z)
    x, y = z.real, z.imag
    if y == 0:
        return LiftCheck(lhs, lhs, 0.0, 1)
    ends = []
    for p in S.primitives(s):
        if isinstance(p, S.RealInterval):
            ends += [p.a, p.b]
        elif isinstance(p, S.Point):
            ends.append(p.location[0].real)
    half = math.pi / 2
    grade = half - half * 2.0 ** -np.arange(1, 9)
    edges = set(np.concatenate([-grade, grade, [-half, 0.0, half]]).tolist())
    for e in ends:
        edges.add(math.atan((e - x) / y))
    edges = np.array(sorted(edges))
    th, wt = _gauss_panels(edges, points)
    vals = np.array([V(complex(x + math.tan(t) * y, 0.0)) for t in th])
    rhs = float(wt @ vals) / math.pi
    return LiftCheck(lhs, rhs, abs(lhs - rhs), int(th.size))
