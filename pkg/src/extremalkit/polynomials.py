"""Multivariate polynomials in monomial or tensor-Chebyshev bases.

Coefficients are stored as a map from multi-indices to complex numbers and
expanded to a dense tensor for arithmetic.  Evaluation and differentiation
delegate to numpy's Horner and Clenshaw routines axis by axis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import chebyshev as npc
from numpy.polynomial import polynomial as npp

MultiIndex = tuple[int, ...]

BASES = ("monomial", "chebyshev")


def order(alpha: MultiIndex) -> int:
    return sum(alpha)


def multi_factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def multi_indices(nvars: int, max_order: int, min_order: int = 0) -> list[MultiIndex]:
    """Graded lexicographic enumeration of alpha with min_order <= |alpha| <= max_order.

    Within one order, indices are sorted in decreasing lexicographic order, so
    (2,0) < (1,1) < (0,2).
    """
    out = []
    for k in range(min_order, max_order + 1):
        level = [a for a in itertools.product(range(k + 1), repeat=nvars) if sum(a) == k]
        out.extend(sorted(level, reverse=True))
    return out


def format_alpha(alpha: MultiIndex) -> str:
    return "-".join(str(a) for a in alpha)


@dataclass(frozen=True)
class Polynomial:
    coefficients: Mapping[MultiIndex, complex]
    nvars: int = 1
    basis: str = "monomial"

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        clean = {}
        for alpha, c in self.coefficients.items():
            alpha = tuple(int(a) for a in (alpha if isinstance(alpha, tuple) else (alpha,)))
            if len(alpha) != self.nvars or min(alpha) < 0:
                raise ValueError(f"multi-index {alpha} does not fit {self.nvars} variables")
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + complex(c)
        object.__setattr__(self, "coefficients", {a: c for a, c in clean.items() if c != 0})

    @property
    def degree(self) -> int | None:
        """Total degree, or None for the zero polynomial."""
        if not self.coefficients:
            return None
        return max(order(a) for a in self.coefficients)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    # dense tensor round trip -------------------------------------------------
    def dense(self, size: int | None = None) -> np.ndarray:
        deg = self.degree or 0
        size = deg + 1 if size is None else size
        c = np.zeros((size,) * self.nvars, dtype=complex)
        for alpha, v in self.coefficients.items():
            c[alpha] = v
        return c

    @classmethod
    def from_dense(cls, c: np.ndarray, basis: str = "monomial", tol: float = 0.0) -> "Polynomial":
        c = np.asarray(c, dtype=complex)
        coeffs = {tuple(int(i) for i in idx): complex(v)
                  for idx, v in np.ndenumerate(c) if abs(v) > tol}
        return cls(coeffs, c.ndim, basis)

    @classmethod
    def chebyshev_t(cls, n: int) -> "Polynomial":
        return cls({(n,): 1.0}, 1, "chebyshev")

    # operations --------------------------------------------------------------
    def differentiate(self, alpha: MultiIndex) -> "Polynomial":
        return differentiate(self, alpha)

    def __call__(self, z) -> complex:
        return evaluate(self, z)

    def convert(self, basis: str) -> "Polynomial":
        return convert(self, basis)


def _check_dim(p: Polynomial, k: int):
    if k != p.nvars:
        raise ValueError(f"expected {p.nvars} components, got {k}")


def differentiate(p: Polynomial, alpha: MultiIndex) -> Polynomial:
    """Exact coefficient-level partial derivative D^alpha p."""
    alpha = tuple(alpha) if isinstance(alpha, Iterable) else (alpha,)
    _check_dim(p, len(alpha))
    if p.is_zero:
        return p
    der = npc.chebder if p.basis == "chebyshev" else npp.polyder
    c = p.dense()
    for axis, a in enumerate(alpha):
        if a == 0:
            continue
        if a >= c.shape[axis]:
            return Polynomial({}, p.nvars, p.basis)
        c = der(c, m=a, axis=axis)
    return Polynomial.from_dense(c, p.basis)


def evaluate(p: Polynomial, z) -> complex:
    """Value at one point (Horner for monomials, Clenshaw for Chebyshev)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_dim(p, z.shape[0])
    if p.is_zero:
        return 0j
    val = npc.chebval if p.basis == "chebyshev" else npp.polyval
    c = p.dense()
    for zj in z[::-1]:
        # contract the last axis
        c = val(zj, np.moveaxis(c, -1, 0))
    return complex(c)


def _convert_axis(c: np.ndarray, fn, axis: int) -> np.ndarray:
    c = np.moveaxis(c, axis, 0)
    flat = c.reshape(c.shape[0], -1)
    cols = [fn(flat[:, i].real) + 1j * fn(flat[:, i].imag) for i in range(flat.shape[1])]
    width = max(len(col) for col in cols)
    out = np.zeros((width, flat.shape[1]), dtype=complex)
    for i, col in enumerate(cols):
        out[: len(col), i] = col
    out = out.reshape((width,) + c.shape[1:])
    return np.moveaxis(out, 0, axis)


def convert(p: Polynomial, basis: str) -> Polynomial:
    """Change basis exactly (up to rounding) axis by axis."""
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    if basis == p.basis or p.is_zero:
        return Polynomial(p.coefficients, p.nvars, basis)
    fn = npc.poly2cheb if basis == "chebyshev" else npc.cheb2poly
    c = p.dense()
    for axis in range(p.nvars):
        c = _convert_axis(c, fn, axis)
    return Polynomial.from_dense(c, basis)


def chebyshev_derivative_at_one(n: int, k: int) -> float:
    """T_n^{(k)}(1) = prod_{j<k} (n^2 - j^2) / (2j + 1)."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    num = 1
    den = 1
    for j in range(k):
        num *= n * n - j * j
        den *= 2 * j + 1
    return num / den


def factorial_ratio(n: int, k: int) -> float:
    """n! / (n - k)! as a float."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    out = 1.0
    for j in range(n - k + 1, n + 1):
        out *= j
    return out


# -- JSON literal -------------------------------------------------------------

def to_literal(p: Polynomial) -> dict:
    terms = [{"alpha": list(a), "re": c.real, "im": c.imag}
             for a, c in sorted(p.coefficients.items())]
    return {"basis": p.basis, "nvars": p.nvars, "terms": terms}


def from_literal(obj: Mapping) -> Polynomial:
    terms = obj.get("terms", [])
    nvars = obj.get("nvars") or (len(terms[0]["alpha"]) if terms else 1)
    coeffs: dict[MultiIndex, complex] = {}
    for t in terms:
        alpha = tuple(int(a) for a in t["alpha"])
        coeffs[alpha] = coeffs.get(alpha, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
    return Polynomial(coeffs, int(nvars), obj.get("basis", "monomial"))
