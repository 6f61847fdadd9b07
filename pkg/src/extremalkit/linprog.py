"""Dense linear programming for problems of the form

    maximize c.x  subject to  lo <= A x <= hi,   x free.

The solver runs a revised primal simplex on the dual standard-form problem

    minimize hi.u - lo.v  subject to  A^T (u - v) = c,  u, v >= 0,

whose basis has one column per primal variable.  Extremal polynomial problems
have few variables and many constraint rows, so this keeps every basis small.
The primal solution is read off the simplex multipliers.

Pricing follows Dantzig's rule and falls back to Bland's smallest-index rule
as soon as a pivot is degenerate, until a pivot makes progress again.  Ties
always go to the smallest index, so runs are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
HARRIS_TOL = 1e-10
REFACTOR_EVERY = 50


@dataclass(frozen=True)
class LinearProgram:
    objective: np.ndarray
    A: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (A.shape[0],)).copy()
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (A.shape[0],)).copy()
        if A.shape[1] != c.size:
            raise ValueError(f"objective has {c.size} entries but A has {A.shape[1]} columns")
        if A.shape[0] == 0:
            raise ValueError("at least one constraint row is required")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
            raise ValueError("objective and constraint matrix must be finite")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ValueError("bounds must satisfy lo <= hi")
        for name, v in (("objective", c), ("A", A), ("lo", lo), ("hi", hi)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "unbounded" | "infeasible"
    optimum: float
    argument: np.ndarray
    iterations: int
    basis: tuple[int, ...] | None = None


class _Simplex:
    """Revised simplex for min cost.y s.t. D y = rhs, y >= 0 (explicit inverse)."""

    def __init__(self, D: np.ndarray, cost: np.ndarray, rhs: np.ndarray):
        self.D = D
        self.cost = cost
        self.rhs = rhs
        self.m = D.shape[0]
        self.iterations = 0

    def _refactor(self):
        self.Binv = np.linalg.inv(self.D[:, self.basis])

    def run(self, basis, allowed: np.ndarray, max_iter: int) -> str:
        """Pivot to optimality over columns flagged in `allowed`.

        Entering columns follow Dantzig's rule; after a degenerate pivot the
        smallest-index (Bland) rule takes over until progress resumes.  The
        leaving row uses a Harris two-pass test for numerical safety.  If the
        objective stalls for many pivots, the right-hand side is shifted by a
        small deterministic positive combination of the basic columns, which
        breaks ties that rounding noise keeps Bland's rule from seeing; the
        true right-hand side is restored at the end.  A second stall switches
        to the textbook Bland rule.
        """
        D, cost = self.D, self.cost
        self.basis = np.array(basis, dtype=int)
        self._refactor()
        xB = self.Binv @ self.rhs
        blocked = ~allowed
        inv_scale = 1.0 / (1.0 + np.abs(cost))
        bland = strict = perturbed = False
        since_refactor = stall = 0
        best_obj = math.inf
        rhs_true = self.rhs
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError("simplex iteration limit reached")
            pi = cost[self.basis] @ self.Binv
            reduced = (cost - pi @ D) * inv_scale
            reduced[blocked] = 0.0
            reduced[self.basis] = 0.0
            if bland or strict:
                neg = np.flatnonzero(reduced < -FEAS_TOL)
                if neg.size == 0:
                    break
                q = int(neg[0])
            else:
                q = int(np.argmin(reduced))
                if reduced[q] >= -FEAS_TOL:
                    break
            d = self.Binv @ D[:, q]
            rows = np.flatnonzero(d > PIVOT_TOL)
            if rows.size == 0:
                self.xB = xB
                return "unbounded"
            xr = np.maximum(xB[rows], 0.0)
            dr = d[rows]
            if strict:
                ok = dr >= 1e-7 * dr.max()
                rows, xr, dr = rows[ok], xr[ok], dr[ok]
                ratios = xr / dr
                near = rows[ratios <= ratios.min() * (1 + 1e-12)]
            else:
                # Harris: largest pivot among rows within the relaxed step
                limit = ((xr + HARRIS_TOL) / dr).min()
                pick = xr / dr <= limit
                near, dn = rows[pick], dr[pick]
                near = near[dn >= dn.max() * (1 - 1e-12)]
            r = int(near[np.argmin(self.basis[near])])
            theta = max(xB[r], 0.0) / d[r]
            bland = theta <= 1e-12
            piv = self.Binv[r] / d[r]
            self.Binv -= np.outer(d, piv)
            self.Binv[r] = piv
            xB = xB - theta * d
            xB[r] = theta
            self.basis[r] = q
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self._refactor()
                xB = self.Binv @ self.rhs
                since_refactor = 0
            obj = float(cost[self.basis] @ xB)
            if obj < best_obj - 1e-12 * (1.0 + abs(obj)):
                best_obj, stall = obj, 0
            else:
                stall += 1
                if stall > 2 * self.m + 20:
                    if perturbed:
                        strict = True
                    else:
                        perturbed, stall, best_obj = True, 0, math.inf
                        self.rhs = rhs_true + self.D[:, self.basis] @ _shift(self.m, rhs_true)
                        xB = self.Binv @ self.rhs
        if perturbed:
            self.rhs = rhs_true
            xB = self.Binv @ self.rhs
        self.xB = xB
        return "optimal"

    def multipliers(self) -> np.ndarray:
        self._refactor()
        return self.cost[self.basis] @ self.Binv


def _shift(m: int, rhs: np.ndarray) -> np.ndarray:
    scale = 1e-7 * max(1.0, float(np.max(np.abs(rhs))))
    return scale * (1.0 + np.sqrt(np.arange(1, m + 1)) % 1.0)


def _pow2_scale(v: np.ndarray) -> float:
    big = float(np.max(np.abs(v))) if v.size else 0.0
    if big == 0.0 or not math.isfinite(big):
        return 1.0
    return math.ldexp(1.0, -math.frexp(big)[1])


def _pow2_rows(A: np.ndarray) -> np.ndarray:
    big = np.max(np.abs(A), axis=1)
    exps = np.frexp(np.where(big > 0, big, 1.0))[1]
    return np.ldexp(1.0, -exps)


def solve(lp: LinearProgram, max_iter: int | None = None,
          start: tuple[int, ...] | None = None) -> LpSolution:
    """Maximize lp.objective . x subject to lp.lo <= lp.A x <= lp.hi.

    Dual columns are laid out as 2i (row i at its upper bound) and 2i+1 (row i
    at its lower bound), so a basis stays meaningful when rows are appended.
    `start` may pass such a basis from an earlier solve with the same
    objective and a prefix of the rows; it is used when still feasible.
    Rows and objective are rescaled by powers of two, which is exact.
    """
    A, c = lp.A, lp.objective
    n, R = lp.num_vars, lp.num_rows
    row_scale = _pow2_rows(A)
    As = A * row_scale[:, None]
    lo = lp.lo * row_scale
    hi = lp.hi * row_scale
    cs = c * _pow2_scale(c)

    D = np.empty((n, 2 * R))
    D[:, 0::2] = As.T
    D[:, 1::2] = -As.T
    allowed = np.empty(2 * R, dtype=bool)
    allowed[0::2] = np.isfinite(hi)
    allowed[1::2] = np.isfinite(lo)
    cost = np.empty(2 * R)
    cost[0::2] = np.where(allowed[0::2], hi, 0.0)
    cost[1::2] = np.where(allowed[1::2], -lo, 0.0)
    max_iter = max_iter or 50 * (2 * R + n) + 1000

    basis = _warm_basis(D, cs, allowed, start) if start is not None else None
    if basis is None:
        basis = _crash_basis(As, lo, hi, cs)
    if basis is not None:
        sx = _Simplex(D, cost, cs)
        if sx.run(basis, allowed, max_iter) == "unbounded":
            return LpSolution("infeasible", -math.inf, np.full(n, np.nan), sx.iterations)
        x = sx.multipliers()
        return LpSolution("optimal", float(c @ x), x, sx.iterations, tuple(int(b) for b in sx.basis))

    # general start: artificial phase 1
    sign = np.where(cs < 0, -1.0, 1.0)
    ncols = 2 * R
    Dp = np.concatenate([D * sign[:, None], np.eye(n)], axis=1)
    rhs = cs * sign
    phase1_cost = np.concatenate([np.zeros(ncols), np.ones(n)])
    sx = _Simplex(Dp, phase1_cost, rhs)
    sx.run(list(range(ncols, ncols + n)), np.concatenate([allowed, np.ones(n, dtype=bool)]), max_iter)
    infeas = float(phase1_cost[sx.basis] @ sx.xB)
    if infeas > FEAS_TOL * (1.0 + np.abs(rhs).sum()):
        # dual infeasible: the primal is unbounded when it has a feasible point
        status = "unbounded" if _primal_feasible(lp) else "infeasible"
        return LpSolution(status, math.inf if status == "unbounded" else -math.inf,
                          np.full(n, np.nan), sx.iterations)
    # drive zero-level artificials out of the basis where possible
    for r in range(n):
        if sx.basis[r] >= ncols:
            row = sx.Binv[r] @ Dp[:, :ncols]
            nz = [j for j in np.flatnonzero((np.abs(row) > 1e-9) & allowed) if j not in sx.basis]
            if nz:
                sx.basis[r] = int(nz[0])
                sx._refactor()
    sx.cost = np.concatenate([cost, np.zeros(n)])
    if sx.run(sx.basis, np.concatenate([allowed, np.zeros(n, dtype=bool)]), max_iter) == "unbounded":
        return LpSolution("infeasible", -math.inf, np.full(n, np.nan), sx.iterations)
    x = sx.multipliers() * sign
    return LpSolution("optimal", float(c @ x), x, sx.iterations)


def _warm_basis(D, cs, allowed, start):
    basis = list(start)
    if len(basis) != D.shape[0] or max(basis) >= D.shape[1] or not allowed[basis].all():
        return None
    B = D[:, basis]
    if np.linalg.cond(B) > 1e12:
        return None
    if np.any(np.linalg.solve(B, cs) < -1e-9):
        return None
    return basis


def _crash_basis(As, lo, hi, cs):
    """Feasible starting basis from independent two-sided rows, or None.

    For a row i with both bounds finite, the dual columns +A_i and -A_i are
    both available, so whatever the sign of the basic solution entry, one of
    the two columns carries it with a nonnegative value.
    """
    n = As.shape[1]
    two_sided = np.flatnonzero(np.isfinite(lo) & np.isfinite(hi))
    if two_sided.size < n:
        return None
    _, R, perm = qr(As[two_sided].T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size < n or diag[n - 1] <= 1e-10 * diag[0]:
        return None
    rows = np.sort(two_sided[perm[:n]])
    y = np.linalg.solve(As[rows].T, cs)
    return [int(2 * i + (0 if yi >= 0 else 1)) for i, yi in zip(rows, y)]


def _primal_feasible(lp: LinearProgram) -> bool:
    probe = solve(LinearProgram(np.zeros(lp.num_vars), lp.A, lp.lo, lp.hi))
    return probe.status == "optimal"


def dump(lp: LinearProgram) -> str:
    """Plain-text rendering: header line, objective line, then one row per line.

    Format::

        LP <rows> <vars>
        c <c_1> ... <c_n>
        r <lo> <hi> <a_1> ... <a_n>
    """
    fmt = lambda v: repr(float(v))
    lines = [f"LP {lp.num_rows} {lp.num_vars}", "c " + " ".join(map(fmt, lp.objective))]
    for lo, hi, row in zip(lp.lo, lp.hi, lp.A):
        lines.append("r " + " ".join(map(fmt, (lo, hi, *row))))
    return "\n".join(lines) + "\n"


def load(text: str) -> LinearProgram:
    lines = [ln.split() for ln in text.strip().splitlines()]
    head, cline, rows = lines[0], lines[1], lines[2:]
    if head[0] != "LP" or cline[0] != "c":
        raise ValueError("not an LP dump")
    c = [float(v) for v in cline[1:]]
    lo = [float(r[1]) for r in rows]
    hi = [float(r[2]) for r in rows]
    A = [[float(v) for v in r[3:]] for r in rows]
    return LinearProgram(np.array(c), np.array(A).reshape(len(rows), len(c)), np.array(lo), np.array(hi))


# ---------------------------------------------------------------------------
# Ratio extremal problems


@dataclass(frozen=True)
class RatioResult:
    """Outcome of maximizing |L(P)| over coefficient vectors with |P| <= 1 on nodes.

    `optimum` is the largest LP value over the objective phase grid, `modulus`
    the largest |L(P)| among the LP maximizers, `coefficients` the maximizer
    attaining `modulus`.  `relaxation` bounds how far the phase encoding of
    complex modulus constraints can inflate the norm (1/cos(pi/K), or 1 when
    everything is real).
    """

    optimum: float
    modulus: float
    coefficients: np.ndarray
    phase: float
    relaxation: float
    lp_count: int
    iterations: int = 0
    basis: tuple[int, ...] | None = None
    extras: dict = field(default_factory=dict)


def phase_rows(values: np.ndarray, real_coefficients: bool, phase_count: int) -> np.ndarray:
    """Rows Re(e^{i theta} v . x) for theta in a half grid of [0, pi).

    Two-sided bounds on these rows encode |v . x| <= 1 over the full K-gon.
    For real coefficients with real node values a single row per node suffices.
    """
    values = np.atleast_2d(values)
    if real_coefficients:
        if np.all(values.imag == 0):
            return values.real.copy()
        thetas = np.pi * np.arange(phase_count // 2) / (phase_count // 2)
        rot = np.exp(1j * thetas)
        return np.concatenate([(r * values).real for r in rot], axis=0)
    thetas = np.pi * np.arange(phase_count // 2) / (phase_count // 2)
    blocks = []
    for r in np.exp(1j * thetas):
        w = r * values
        blocks.append(np.concatenate([w.real, -w.imag], axis=1))
    return np.concatenate(blocks, axis=0)


def cut_rows(values: np.ndarray, phases: np.ndarray, real_coefficients: bool) -> np.ndarray:
    """Single half-plane rows Re(e^{-i phase} v . x) <= 1 (exact supporting cuts)."""
    w = np.exp(-1j * np.asarray(phases))[:, None] * np.atleast_2d(values)
    if real_coefficients:
        return w.real
    return np.concatenate([w.real, -w.imag], axis=1)


def objective_row(functional: np.ndarray, phi: float, real_coefficients: bool) -> np.ndarray:
    w = np.exp(-1j * phi) * np.asarray(functional)
    if real_coefficients:
        return w.real
    return np.concatenate([w.real, -w.imag])


def split_coefficients(x: np.ndarray, real_coefficients: bool) -> np.ndarray:
    if real_coefficients:
        return x.astype(complex)
    half = x.size // 2
    return x[:half] + 1j * x[half:]


def objective_phases(functional: np.ndarray, real_coefficients: bool, phase_count: int,
                     exploit_symmetry: bool = True) -> np.ndarray:
    """Objective phases needed for an exact maximum over the K-point phase grid.

    With real coefficients P -> -P is a symmetry, so half the grid suffices,
    and a real functional needs only phase 0.  With complex coefficients the
    K-gon constraints are invariant under rotation by 2 pi / K, so every grid
    phase yields the same optimum and phase 0 represents them all.
    """
    if real_coefficients:
        if np.all(np.imag(functional) == 0):
            return np.zeros(1)
        return np.pi * np.arange(phase_count // 2) / (phase_count // 2)
    if exploit_symmetry:
        return np.zeros(1)
    return 2 * np.pi * np.arange(phase_count) / phase_count


def solve_ratio_extremal(functional, node_values, real_coefficients: bool, phase_count: int = 32,
                         exploit_symmetry: bool = True, extra_rows: np.ndarray | None = None,
                         phases: np.ndarray | None = None,
                         start: tuple[int, ...] | None = None) -> RatioResult:
    """Maximize Re(e^{-i phi} L(P)) subject to |P(node)| <= 1 over a phase grid.

    `functional` holds L applied to each basis element, `node_values` the basis
    values at the constraint nodes (one row per node).  `extra_rows` are extra
    one-sided constraints (row . x <= 1) in the real variable layout.
    `start` is a simplex basis reused when a single phase is solved.
    """
    functional = np.asarray(functional, dtype=complex).ravel()
    node_values = np.atleast_2d(np.asarray(node_values, dtype=complex))
    if node_values.shape[0] == 0:
        raise ValueError("at least one constraint node is required")
    if node_values.shape[1] != functional.size:
        raise ValueError("functional and node values disagree on the basis size")
    if phase_count < 2 or phase_count % 2:
        raise ValueError("phase_count must be an even integer >= 2")
    A = phase_rows(node_values, real_coefficients, phase_count)
    lo = -np.ones(A.shape[0])
    hi = np.ones(A.shape[0])
    if extra_rows is not None and len(extra_rows):
        A = np.concatenate([A, extra_rows], axis=0)
        lo = np.concatenate([lo, np.full(len(extra_rows), -np.inf)])
        hi = np.concatenate([hi, np.ones(len(extra_rows))])
    all_real = real_coefficients and np.all(node_values.imag == 0)
    relaxation = 1.0 if all_real else 1.0 / math.cos(math.pi / phase_count)
    if phases is None:
        phases = objective_phases(functional, real_coefficients, phase_count, exploit_symmetry)
    optimum = -math.inf
    modulus, coef_best, phi_best, basis = -1.0, None, 0.0, None
    iterations = 0
    for phi in phases:
        lp = LinearProgram(objective_row(functional, phi, real_coefficients), A, lo, hi)
        sol = solve(lp, start=start if len(phases) == 1 else None)
        iterations += sol.iterations
        if sol.status != "optimal":
            raise RuntimeError(f"extremal LP ended {sol.status}")
        coef = split_coefficients(sol.argument, real_coefficients)
        optimum = max(optimum, sol.optimum)
        mod = abs(functional @ coef)
        if mod > modulus:
            modulus, coef_best, phi_best, basis = mod, coef, float(phi), sol.basis
    return RatioResult(max(optimum, 0.0), modulus, coef_best, phi_best, relaxation,
                       len(phases), iterations, basis)
