"""Declarative compact sets in C^N, their discretizations and distance queries.

Every descriptor is an immutable value.  Sets in the complex plane are
interval, disc, arc, point and finite unions of those; in C^N we support
boxes, polydiscs, products of one-dimensional sets, points and unions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class SetDescriptionError(ValueError):
    """Raised for malformed or inconsistent set descriptions."""


def _as_complex_tuple(values) -> tuple[complex, ...]:
    if np.isscalar(values):
        values = [values]
    return tuple(complex(v) for v in values)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


# ---------------------------------------------------------------------------
# Descriptors


@dataclass(frozen=True)
class RealInterval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise SetDescriptionError(f"interval needs finite a < b, got [{self.a}, {self.b}]")

    ambient_dim = 1
    is_real = True


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise SetDescriptionError(f"disc radius must be positive, got {self.radius}")

    ambient_dim = 1
    is_real = False


@dataclass(frozen=True)
class Arc:
    """The curve center + radius*e^{it}, t in [theta_start, theta_end]."""

    center: complex
    radius: float
    theta_start: float
    theta_end: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise SetDescriptionError(f"arc radius must be positive, got {self.radius}")
        span = self.theta_end - self.theta_start
        if not 0 < span <= 2 * math.pi + 1e-12:
            raise SetDescriptionError("arc needs theta_start < theta_end <= theta_start + 2*pi")

    ambient_dim = 1
    is_real = False


@dataclass(frozen=True)
class Point:
    location: tuple[complex, ...]

    def __post_init__(self):
        loc = _as_complex_tuple(self.location)
        if not loc:
            raise SetDescriptionError("point needs at least one coordinate")
        object.__setattr__(self, "location", loc)

    @property
    def ambient_dim(self) -> int:
        return len(self.location)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.location)


@dataclass(frozen=True)
class RealBox:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not lo:
            raise SetDescriptionError("box bounds must have equal, nonzero length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise SetDescriptionError("box needs lo_j < hi_j componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def ambient_dim(self) -> int:
        return len(self.lo)

    is_real = True

    def factors(self) -> tuple[RealInterval, ...]:
        return tuple(RealInterval(a, b) for a, b in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Polydisc:
    center: tuple[complex, ...]
    polyradius: tuple[float, ...]

    def __post_init__(self):
        center = _as_complex_tuple(self.center)
        radii = tuple(float(r) for r in np.atleast_1d(self.polyradius))
        if len(center) != len(radii) or not radii:
            raise SetDescriptionError("polydisc center and polyradius lengths differ")
        if not all(r > 0 for r in radii):
            raise SetDescriptionError("polyradius entries must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "polyradius", radii)

    @property
    def ambient_dim(self) -> int:
        return len(self.center)

    is_real = False

    def factors(self) -> tuple[Disc, ...]:
        return tuple(Disc(c, r) for c, r in zip(self.center, self.polyradius))


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise SetDescriptionError("product needs at least one factor")
        for f in factors:
            if f.ambient_dim != 1:
                raise SetDescriptionError("product factors must be one-dimensional")
        object.__setattr__(self, "factors", factors)

    @property
    def ambient_dim(self) -> int:
        return len(self.factors)

    @property
    def is_real(self) -> bool:
        return all(f.is_real for f in self.factors)


@dataclass(frozen=True)
class Union:
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise SetDescriptionError("union needs at least one member")
        dims = {m.ambient_dim for m in members}
        if len(dims) != 1:
            raise SetDescriptionError("union members must share the ambient dimension")
        object.__setattr__(self, "members", members)

    @property
    def ambient_dim(self) -> int:
        return self.members[0].ambient_dim

    @property
    def is_real(self) -> bool:
        return all(m.is_real for m in self.members)


CompactSet = RealInterval | Disc | Arc | Point | RealBox | Polydisc | Product | Union


def as_product(s):
    """Boxes and polydiscs as explicit products; other sets unchanged."""
    if isinstance(s, (RealBox, Polydisc)):
        return Product(s.factors())
    return s


def primitives(s) -> list:
    """Flatten unions into their non-union members."""
    if isinstance(s, Union):
        out = []
        for m in s.members:
            out.extend(primitives(m))
        return out
    return [as_product(s)]


# ---------------------------------------------------------------------------
# Parametrized boundary pieces
#
# A piece is a curve (1-D) or a torus-like tensor of curves (N-D) through which
# the maximum modulus of a polynomial on the set is attained.  Pieces drive both
# node placement and the fine sup-norm search.


@dataclass(frozen=True)
class Curve:
    """t -> point, t in [t0, t1]; closed curves are periodic."""

    kind: str  # "segment", "circle", "arc", "point"
    center: complex
    scale: float
    t0: float
    t1: float

    @property
    def periodic(self) -> bool:
        return self.kind == "circle"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "segment":
            return self.center + self.scale * np.cos(t) + 0j
        if self.kind in ("circle", "arc"):
            return self.center + self.scale * np.exp(1j * t)
        return np.full(t.shape, self.center, dtype=complex)

    def nodes(self, count: int) -> np.ndarray:
        """Parameter values of `count` nodes (Chebyshev-Lobatto on segments)."""
        if self.kind == "point":
            return np.zeros(1)
        if self.periodic:
            return self.t0 + (self.t1 - self.t0) * np.arange(count) / count
        if count == 1:
            return np.array([0.5 * (self.t0 + self.t1)])
        return self.t0 + (self.t1 - self.t0) * np.arange(count) / (count - 1)


def curve_of(s) -> Curve:
    if isinstance(s, RealInterval):
        # cos maps [0, pi] onto [b, a]; we reverse to get ascending nodes
        return Curve("segment", complex(0.5 * (s.a + s.b)), -0.5 * (s.b - s.a), 0.0, math.pi)
    if isinstance(s, Disc):
        return Curve("circle", s.center, s.radius, 0.0, 2 * math.pi)
    if isinstance(s, Arc):
        return Curve("arc", s.center, s.radius, s.theta_start, s.theta_end)
    if isinstance(s, Point) and s.ambient_dim == 1:
        return Curve("point", s.location[0], 0.0, 0.0, 0.0)
    raise SetDescriptionError(f"no boundary curve for {type(s).__name__}")


def pieces(s) -> list[tuple[Curve, ...]]:
    """Boundary pieces as tuples of curves, one curve per coordinate."""
    out = []
    for p in primitives(s):
        if isinstance(p, Product):
            out.append(tuple(curve_of(f) for f in p.factors))
        elif isinstance(p, Point):
            out.append(tuple(Curve("point", c, 0.0, 0.0, 0.0) for c in p.location))
        else:
            out.append((curve_of(p),))
    return out


def sample_pieces(s, per_curve: int) -> np.ndarray:
    """Tensor samples of every piece, shape (count, N)."""
    blocks = []
    for piece in pieces(s):
        axes = [c(c.nodes(per_curve)) for c in piece]
        grids = np.meshgrid(*axes, indexing="ij")
        blocks.append(np.stack([g.ravel() for g in grids], axis=1))
    return np.concatenate(blocks, axis=0)


# ---------------------------------------------------------------------------
# Discretization


@dataclass(frozen=True)
class Discretization:
    constraint_nodes: np.ndarray  # (count, N) complex
    eval_nodes: np.ndarray
    density: int
    phase_count: int
    degree_cap: int


def discretize(s, degree_cap: int, density: int = 4, phase_count: int = 32,
               eval_nodes: np.ndarray | None = None) -> Discretization:
    """Place density*(degree_cap+1) nodes per boundary curve of the set.

    Intervals get Chebyshev-Lobatto nodes (endpoints included), circles equally
    spaced angles, arcs equally spaced angles including both ends, points a
    single node.  Products take tensor grids of their factors.
    """
    if degree_cap < 1:
        raise ValueError("degree_cap must be >= 1")
    if density < 2:
        raise ValueError("density must be >= 2")
    if phase_count < 8:
        raise ValueError("phase_count must be >= 8")
    nodes = sample_pieces(s, density * (degree_cap + 1))
    nodes = _frozen(np.ascontiguousarray(nodes))
    if eval_nodes is None:
        evals = nodes
    else:
        evals = _frozen(np.array(eval_nodes, dtype=complex).reshape(-1, s.ambient_dim))
    return Discretization(nodes, evals, density, phase_count, degree_cap)


# ---------------------------------------------------------------------------
# Distance


def _as_points(s, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    n = s.ambient_dim
    if z.ndim == 0:
        z = z.reshape(1, 1)
    elif z.ndim == 1:
        z = z.reshape(-1, 1) if n == 1 else z.reshape(1, -1)
    if z.shape[-1] != n:
        raise ValueError(f"point has {z.shape[-1]} coordinates, set lives in C^{n}")
    return z


def _distance_1d(s, w: np.ndarray) -> np.ndarray:
    if isinstance(s, RealInterval):
        dx = np.maximum(np.maximum(s.a - w.real, w.real - s.b), 0.0)
        return np.hypot(dx, w.imag)
    if isinstance(s, Disc):
        return np.maximum(np.abs(w - s.center) - s.radius, 0.0)
    if isinstance(s, Arc):
        u = w - s.center
        ang = np.mod(np.angle(u) - s.theta_start, 2 * math.pi)
        inside = (ang <= s.theta_end - s.theta_start + 1e-15) | (np.abs(u) == 0)
        radial = np.abs(np.abs(u) - s.radius)
        e0 = s.center + s.radius * np.exp(1j * s.theta_start)
        e1 = s.center + s.radius * np.exp(1j * s.theta_end)
        ends = np.minimum(np.abs(w - e0), np.abs(w - e1))
        return np.where(inside, np.minimum(radial, ends), ends)
    if isinstance(s, Point):
        return np.abs(w - s.location[0])
    raise SetDescriptionError(f"unsupported factor {type(s).__name__}")


def distance(s, z) -> np.ndarray | float:
    """Euclidean distance from z (a point or an array of points) to the set."""
    scalar = np.ndim(z) == 0 or (np.ndim(z) == 1 and s.ambient_dim > 1)
    pts = _as_points(s, z)
    best = np.full(pts.shape[0], np.inf)
    for p in primitives(s):
        if isinstance(p, Product):
            sq = sum(_distance_1d(f, pts[:, j]) ** 2 for j, f in enumerate(p.factors))
            d = np.sqrt(sq)
        elif isinstance(p, Point):
            d = np.sqrt(np.sum(np.abs(pts - np.array(p.location)) ** 2, axis=1))
        else:
            d = _distance_1d(p, pts[:, 0])
        best = np.minimum(best, d)
    return float(best[0]) if scalar else best


def bounding_data(s) -> list[tuple[complex, float, bool]]:
    """Per-axis (center, scale, real) used to normalize polynomial variables."""
    n = s.ambient_dim
    pts = sample_pieces(s, 65)
    out = []
    for j in range(n):
        col = pts[:, j]
        re_mid = 0.5 * (col.real.min() + col.real.max())
        im_mid = 0.5 * (col.imag.min() + col.imag.max())
        real_axis = bool(np.all(col.imag == 0))
        c = complex(re_mid, 0.0 if real_axis else im_mid)
        scale = float(np.max(np.abs(col - c)))
        out.append((c, scale if scale > 0 else 1.0, real_axis))
    return out


# ---------------------------------------------------------------------------
# Parametric constructions


@dataclass(frozen=True)
class Construction:
    """A truncated parametric family together with its admissibility report."""

    set: Union
    truncation: int
    parameters: dict = field(default_factory=dict)
    violations: tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return not self.violations


def build_onion_set(radii: Sequence[float], angles: Sequence[float], truncation: int) -> Construction:
    """Arcs a_j e^{it}, t in [phi_j, 2 pi], for j <= J, plus the origin.

    Admissibility requires |1 - e^{i phi_j}| = 2 sin(phi_j / 2) <= a_{j+1};
    violations are reported, not raised.
    """
    J = int(truncation)
    if J < 1:
        raise SetDescriptionError("truncation must be >= 1")
    if len(radii) < J or len(angles) < J:
        raise SetDescriptionError("radii and angles must have at least J entries")
    a = [float(v) for v in radii]
    phi = [float(v) for v in angles]
    if a[0] != 1.0:
        raise SetDescriptionError("the first radius must be 1")
    if any(not a[i + 1] < a[i] for i in range(len(a) - 1)) or a[-1] <= 0:
        raise SetDescriptionError("radii must be positive and strictly decreasing")
    if any(not 0 < p < math.pi / 2 for p in phi[:J]):
        raise SetDescriptionError("angles must lie in (0, pi/2)")
    violations = []
    for j in range(J - 1):
        chord = 2 * math.sin(phi[j] / 2)
        if chord > a[j + 1]:
            violations.append(f"j={j + 1}: 2 sin(phi/2) = {chord:.6g} > a_(j+1) = {a[j + 1]:.6g}")
    members = [Arc(0j, a[j], phi[j], 2 * math.pi) for j in range(J)] + [Point((0j,))]
    params = {"radii": a[:J], "angles": phi[:J]}
    return Construction(Union(tuple(members)), J, params, tuple(violations))


def chain_radii(mu: float, b: float, truncation: int) -> tuple[list[float], list[float]]:
    """Radii r_j and centers a_j = r_j + r_j^2 of the chain family (r_1 = 1, a_1 = 2)."""
    r = [1.0]
    for _ in range(truncation - 1):
        r.append(b * r[-1] ** mu)
    a = [2.0] + [x + x * x for x in r[1:]]
    return r, a


def build_chain_set(mu: float, b: float, N: int, truncation: int) -> Construction:
    """Polydiscs centered at (a_j, 0, ..., 0) with equal polyradius r_j, plus the origin."""
    if not mu >= 2:
        raise SetDescriptionError(f"mu must be >= 2, got {mu}")
    if not 0 < b < math.sqrt(2) - 1:
        raise SetDescriptionError(f"b must lie in (0, sqrt(2) - 1), got {b}")
    if N < 1 or truncation < 1:
        raise SetDescriptionError("N and truncation must be >= 1")
    r, a = chain_radii(mu, b, truncation)
    if not r[-1] > 0:
        raise SetDescriptionError(f"truncation {truncation} is too deep: radius r_{truncation} underflows")
    members = []
    for rj, aj in zip(r, a):
        if N == 1:
            members.append(Disc(aj, rj))
        else:
            members.append(Polydisc((aj,) + (0.0,) * (N - 1), (rj,) * N))
    members.append(Point((0j,) * N))
    violations = []
    # left edge a_j - r_j is 1 for j = 1 and r_j^2 after; subtracting cancels for tiny r_j
    left = [1.0] + [x * x for x in r[1:]]
    for j in range(truncation - 1):
        if not left[j] > a[j + 1] + r[j + 1]:
            violations.append(f"members {j + 1} and {j + 2} overlap")
    params = {"mu": mu, "b": b, "N": N, "radii": r, "centers": a}
    return Construction(Union(tuple(members)), truncation, params, tuple(violations))
