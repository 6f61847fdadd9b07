"""Extremal problems sup |L(P)| / ||P||_E over polynomials of bounded degree.

`PolynomialSpace` fixes a basis adapted to the set (Chebyshev on real axes,
monomials otherwise, in affinely normalized variables).  `ExtremalEngine`
solves the discretized LP, measures the true sup-norm of the maximizer on a
fine parametrization of the set, adds the worst offending points as new
constraints and repeats.  The reported value |L(P*)| / ||P*||_E is attained by
an explicit polynomial, hence a certified lower bound for the exact extremal
value; the LP optimum is reported alongside as the matching upper estimate.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as npc
from numpy.polynomial import polynomial as npp

from . import sets as S
from .linprog import cut_rows, solve_ratio_extremal
from .polynomials import MultiIndex, multi_indices

# bracket zoom: each pass shrinks a bracket by a factor of (ZOOM_POINTS - 1) / 2
ZOOM_POINTS = 17
ZOOM_STEPS = np.linspace(0.0, 1.0, ZOOM_POINTS)


class PolynomialSpace:
    """Polynomials of total degree <= n in normalized per-axis bases."""

    def __init__(self, s, degree: int):
        self.set = s
        self.degree = int(degree)
        self.nvars = s.ambient_dim
        self.axes = S.bounding_data(s)
        self.kinds = ["chebyshev" if real else "monomial" for _, _, real in self.axes]
        self.indices: list[MultiIndex] = multi_indices(self.nvars, self.degree)
        self.index_array = np.array(self.indices, dtype=int).reshape(len(self.indices), self.nvars)
        self._cheb_der: dict[int, np.ndarray] = {}

    @property
    def size(self) -> int:
        return len(self.indices)

    def _cheb_derivative_matrix(self, a: int) -> np.ndarray:
        if a not in self._cheb_der:
            n = self.degree
            M = np.zeros((n + 1, n + 1))
            for k in range(n + 1):
                e = np.zeros(n + 1)
                e[k] = 1.0
                d = npc.chebder(e, m=a) if a else e
                M[: len(d), k] = d
            self._cheb_der[a] = M
        return self._cheb_der[a]

    def axis_table(self, axis: int, w: np.ndarray, a: int = 0) -> np.ndarray:
        """Values of the a-th derivative of the axis basis, shape (len(w), n+1)."""
        center, scale, _ = self.axes[axis]
        u = (np.asarray(w, dtype=complex) - center) / scale
        n = self.degree
        if self.kinds[axis] == "chebyshev":
            vals = npc.chebvander(u, n) @ self._cheb_derivative_matrix(a)
        else:
            vals = np.zeros((u.size, n + 1), dtype=complex)
            k = np.arange(a, n + 1)
            coef = np.array([math.perm(int(j), a) for j in k], dtype=float)
            vals[:, a:] = coef * u[:, None] ** (k - a)
        return vals * scale ** (-a)

    def values(self, Z, alpha: MultiIndex | None = None) -> np.ndarray:
        """Matrix of D^alpha (basis element) at the points Z, shape (len(Z), size)."""
        Z = np.asarray(Z, dtype=complex).reshape(-1, self.nvars)
        alpha = alpha or (0,) * self.nvars
        out = np.ones((Z.shape[0], self.size), dtype=complex)
        for j in range(self.nvars):
            table = self.axis_table(j, Z[:, j], alpha[j])
            out *= table[:, self.index_array[:, j]]
        return out


@dataclass(frozen=True)
class ExtremalValue:
    value: float           # certified |L(P*)| / ||P*||_E
    lp_value: float        # LP optimum of the final round
    norm: float            # ||P*||_E of the final LP maximizer
    rounds: int
    converged: bool
    relaxation: float
    coefficients: np.ndarray  # maximizer scaled to unit sup-norm


class _FineGrid:
    """Fine parametrization of the set used to measure true sup-norms."""

    def __init__(self, s, space: PolynomialSpace, per_curve: int):
        self.space = space
        self.blocks = []
        for piece in S.pieces(s):
            params = [c.nodes(per_curve) if c.kind != "point" else np.zeros(1) for c in piece]
            grids = np.meshgrid(*[c(t) for c, t in zip(piece, params)], indexing="ij")
            pts = np.stack([g.ravel() for g in grids], axis=1)
            self.blocks.append((piece, params, tuple(len(t) for t in params), space.values(pts)))

    def sup(self, coef: np.ndarray, iterations: int = 9):
        """Sup of |P| with refined local maxima: (sup, points, values)."""
        best_pts, best_vals = [], []
        for piece, params, shape, V in self.blocks:
            vals = np.abs(V @ coef).reshape(shape)
            t_lo, t_hi, t_best = _local_max_brackets(piece, params, vals)
            if t_best.shape[0] == 0:
                continue
            pts, v = self._refine(piece, t_lo, t_hi, t_best, coef, iterations)
            best_pts.append(pts)
            best_vals.append(v)
        pts = np.concatenate(best_pts, axis=0)
        vals = np.concatenate(best_vals)
        return float(vals.max()), pts, vals

    def _refine(self, piece, t_lo, t_hi, t_best, coef, iterations):
        """Coordinate-wise grid zoom inside each bracket."""
        space = self.space
        if space.nvars == 1:
            # one variable: evaluate the series directly instead of a basis matrix
            center, scale, _ = space.axes[0]
            curve = piece[0]
            series = npc.chebval if space.kinds[0] == "chebyshev" else npp.polyval

            def f(T):
                return np.abs(series((curve(T[:, 0]) - center) / scale, coef))
        else:
            def f(T):
                Z = np.stack([c(T[:, j]) for j, c in enumerate(piece)], axis=1)
                return np.abs(space.values(Z) @ coef)

        t = t_best.copy()
        fbest = f(t)
        sweeps = 1 if t.shape[1] == 1 else 3
        for _ in range(sweeps):
            for j, c in enumerate(piece):
                if c.kind == "point":
                    continue
                a, b = t_lo[:, j].copy(), t_hi[:, j].copy()
                T = np.repeat(t, ZOOM_POINTS, axis=0)
                for _ in range(iterations):
                    grid = a[:, None] + (b - a)[:, None] * ZOOM_STEPS
                    T[:, j] = grid.ravel()
                    fv = f(T).reshape(-1, ZOOM_POINTS)
                    k = np.argmax(fv, axis=1)
                    rows = np.arange(len(k))
                    a = grid[rows, np.maximum(k - 1, 0)]
                    b = grid[rows, np.minimum(k + 1, ZOOM_POINTS - 1)]
                    cand, fc = grid[rows, k], fv[rows, k]
                better = fc > fbest
                t[better, j] = cand[better]
                fbest = np.where(better, fc, fbest)
        Z = np.stack([c(t[:, j]) for j, c in enumerate(piece)], axis=1)
        return Z, fbest


def _local_max_brackets(piece, params, vals):
    """Grid local maxima and their parameter brackets (one row per maximum)."""
    ndim = vals.ndim
    is_max = np.ones(vals.shape, dtype=bool)
    for j, c in enumerate(piece):
        if vals.shape[j] == 1:
            continue
        if c.periodic:
            prev = np.roll(vals, 1, axis=j)
            nxt = np.roll(vals, -1, axis=j)
        else:
            pad = [(0, 0)] * ndim
            pad[j] = (1, 1)
            padded = np.pad(vals, pad, constant_values=-np.inf)
            sl_prev = [slice(None)] * ndim
            sl_next = [slice(None)] * ndim
            sl_prev[j] = slice(0, -2)
            sl_next[j] = slice(2, None)
            prev, nxt = padded[tuple(sl_prev)], padded[tuple(sl_next)]
        is_max &= (vals >= prev) & (vals >= nxt)
    idx = np.argwhere(is_max)
    top = vals[tuple(idx.T)]
    if ndim > 1 and idx.shape[0] > 64:
        keep = np.argsort(-top, kind="stable")[:64]
        idx = idx[np.sort(keep)]
    lo = np.empty(idx.shape)
    hi = np.empty(idx.shape)
    best = np.empty(idx.shape)
    for j, (c, t) in enumerate(zip(piece, params)):
        i = idx[:, j]
        best[:, j] = t[i]
        if len(t) == 1:
            lo[:, j] = hi[:, j] = t[i]
            continue
        h = t[1] - t[0]
        if c.periodic:
            lo[:, j], hi[:, j] = t[i] - h, t[i] + h
        else:
            lo[:, j] = t[np.maximum(i - 1, 0)]
            hi[:, j] = t[np.minimum(i + 1, len(t) - 1)]
    return lo, hi, best


class ExtremalEngine:
    """Cutting-plane solver for sup |L(P)| / ||P||_E at a fixed degree."""

    def __init__(self, s, degree: int, density: int = 4, phase_count: int = 32,
                 tol: float = 1e-7, max_rounds: int = 12, fine_per_curve: int | None = None):
        self.set = s
        self.degree = int(degree)
        self.disc = S.discretize(s, self.degree, density, phase_count)
        self.space = PolynomialSpace(s, self.degree)
        self.real = bool(s.is_real)
        self.phase_count = phase_count
        self.tol = tol
        self.max_rounds = max_rounds
        self.node_values = self.space.values(self.disc.constraint_nodes)
        if fine_per_curve is None:
            fine_per_curve = 8 * (self.degree + 1) + 1 if s.ambient_dim == 1 else 4 * (self.degree + 1) + 1
        self.fine = _FineGrid(s, self.space, fine_per_curve)

    def functional(self, z, alpha: MultiIndex | None = None) -> np.ndarray:
        return self.space.values(np.asarray(z, dtype=complex).reshape(1, -1), alpha)[0]

    def sup_norm(self, coef: np.ndarray) -> float:
        return self.fine.sup(coef)[0]

    def maximize(self, functional: np.ndarray, phases: np.ndarray | None = None,
                 rounds: int | None = None, first=None) -> ExtremalValue:
        """Certified sup |L(P)| / ||P||_E with cutting-plane refinement.

        `first` may carry the result of `screen` for the same functional and
        phases, which then serves as the first round.  Later rounds restart the
        simplex from the previous basis, since they only append rows.
        """
        functional = np.asarray(functional, dtype=complex)
        V = self.node_values
        cuts = np.zeros((0, V.shape[1] * (1 if self.real else 2)))
        fan = np.pi / self.phase_count * np.array([0.0, 0.5, -0.5, 0.25, -0.25, 0.125, -0.125])
        best = (-1.0, None)
        res = None
        converged = False
        rounds = self.max_rounds if rounds is None else rounds
        for rnd in range(1, rounds + 1):
            if rnd == 1 and first is not None:
                res = first
            else:
                start = res.basis if res is not None and len(phases) == 1 else None
                res = solve_ratio_extremal(functional, V, self.real, self.phase_count,
                                           extra_rows=cuts, phases=phases, start=start)
            if res.modulus == 0.0:
                return ExtremalValue(0.0, res.optimum, 0.0, rnd, True, res.relaxation,
                                     np.zeros(V.shape[1], dtype=complex))
            coef = res.coefficients
            norm, pts, vals = self.fine.sup(coef)
            node_vals = V @ coef
            norm = max(norm, float(np.abs(node_vals).max()))
            certified = res.modulus / norm
            if certified > best[0]:
                best = (certified, coef / norm, norm)
            if norm <= 1 + self.tol:
                converged = True
                break
            # later rounds only need the phase that produced the maximizer
            if phases is None or len(phases) > 1:
                phases = np.array([res.phase])
            new = pts[vals > 1 + self.tol]
            newvals = self.space.values(new)
            if self.real:
                V = np.concatenate([V, newvals.real], axis=0)
            else:
                over = np.abs(node_vals) > 1 + self.tol
                cut_vals = np.concatenate([newvals, V[over]], axis=0)
                ang = np.angle(cut_vals @ coef)
                # a small fan of phases around each violation saves rounds
                rows = [cut_rows(cut_vals, ang + d, False) for d in fan]
                cuts = np.concatenate([cuts] + rows, axis=0)
        return ExtremalValue(best[0], res.optimum, best[2], rnd, converged, res.relaxation, best[1])

    def screen(self, functional: np.ndarray, phases: np.ndarray | None = None):
        """LP on the base nodes only: an upper estimate, reusable as a first round."""
        return solve_ratio_extremal(functional, self.node_values, self.real, self.phase_count,
                                    phases=phases)


@functools.lru_cache(maxsize=128)
def engine_for(s, degree: int, density: int = 4, phase_count: int = 32) -> ExtremalEngine:
    """Shared engine per (set, degree, density, K); engines are read-only after construction."""
    return ExtremalEngine(s, degree, density, phase_count)
