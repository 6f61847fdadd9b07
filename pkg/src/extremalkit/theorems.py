"""Explicit constant transfers between Holder and Markov-type properties.

Also hosts the cross-module equivalence suite: fit both sides on one set and
check that each transfer formula maps the fitted constants of one side onto
a bound that the computed data of the other side respects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import green as gr
from .markov import MarkovTable, check_vmi, fit_markov_exponent, markov_table, smallest_vmi_constant
from .sets import Polydisc, Product, RealBox

EXPONENT_TOL = 0.15
DIRECTION_TOL = 0.1
CAPACITY_SLACK = 0.02
PROFILE_TOL = 0.02
CLAIM_M_MARGIN = 0.5
CLAIM_GAMMA_MARGIN = 0.03

# Lanczos approximation, g = 7 with nine coefficients.
LANCZOS_G = 7
LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(x: float) -> float:
    """Gamma(x) for real x, reflection formula below 1/2."""
    x = float(x)
    if x < 0.5:
        s = math.sin(math.pi * x)
        if s == 0:
            raise ValueError(f"Gamma has a pole at {x}")
        return math.pi / (s * lanczos_gamma(1 - x))
    x -= 1
    a = LANCZOS_COEF[0]
    t = x + LANCZOS_G + 0.5
    for i in range(1, len(LANCZOS_COEF)):
        a += LANCZOS_COEF[i] / (x + i)
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def _check_N(N) -> int:
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    return int(N)


# ---------------------------------------------------------------------------
# Constant transfers


@dataclass(frozen=True)
class ConstantTransfer:
    direction: str  # "hcp_to_vmi" or "vmi_to_hcp"
    inputs: dict
    outputs: dict
    N: int

    def to_dict(self) -> dict:
        return {"direction": self.direction, "inputs": self.inputs, "outputs": self.outputs, "N": self.N}


def hcp_to_vmi(gamma: float, B: float, N: int = 1) -> tuple[float, float]:
    """HCP(gamma, B) gives VMI(1/gamma, sqrt(N) (B gamma e)^(1/gamma))."""
    N = _check_N(N)
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if not B > 0:
        raise ValueError(f"B must be positive, got {B}")
    return 1.0 / gamma, math.sqrt(N) * (B * gamma * math.e) ** (1.0 / gamma)


def vmi_to_hcp(m: float, M: float, N: int = 1) -> tuple[float, float]:
    """VMI(m, M) gives HCP(1/m, M^(1/m) N^(1/m) m)."""
    N = _check_N(N)
    if not m >= 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not M > 0:
        raise ValueError(f"M must be positive, got {M}")
    g = 1.0 / m
    return g, M ** g * N ** g * m


def transfer(direction: str, first: float, second: float, N: int = 1) -> ConstantTransfer:
    if direction == "hcp_to_vmi":
        m, M = hcp_to_vmi(first, second, N)
        return ConstantTransfer(direction, {"gamma": first, "B": second}, {"m": m, "M": M}, N)
    if direction == "vmi_to_hcp":
        g, B = vmi_to_hcp(first, second, N)
        return ConstantTransfer(direction, {"m": first, "M": second}, {"gamma": g, "B": B}, N)
    raise ValueError(f"unknown direction {direction!r}")


def capacity_lower_bound(m: float, M: float, N: int = 1) -> float:
    """C(E) >= e^-m / (N M) for sets in VMI(m, M)."""
    N = _check_N(N)
    if not m >= 1 or not M > 0:
        raise ValueError("need m >= 1 and M > 0")
    return math.exp(-m) / (N * M)


def hcp_capacity_lower_bound(gamma: float, B: float, N: int = 1) -> float:
    """C(E) >= 1 / (N^(3/2) (B gamma e^2)^(1/gamma)) for sets in HCP(gamma, B)."""
    N = _check_N(N)
    if not 0 < gamma <= 1 or not B > 0:
        raise ValueError("need gamma in (0, 1] and B > 0")
    return 1.0 / (N ** 1.5 * (B * gamma * math.e ** 2) ** (1.0 / gamma))


def real_to_complex_lift(B: float, gamma: float) -> float:
    """Constant for the complex Holder bound from the real one.

    B / pi * int (1 + t^2)^(gamma/2 - 1) dt = B Gamma(1/2 - gamma/2) / (sqrt(pi) Gamma(1 - gamma/2)).
    The integral diverges at gamma = 1.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    return B * lanczos_gamma(0.5 - gamma / 2) / (math.sqrt(math.pi) * lanczos_gamma(1 - gamma / 2))


def real_to_complex_ratio_half() -> float:
    """The fixed ratio Gamma(1/4) / (sqrt(pi) Gamma(3/4)) used for gamma <= 1/2."""
    return lanczos_gamma(0.25) / (math.sqrt(math.pi) * lanczos_gamma(0.75))


@dataclass(frozen=True)
class UpcBound:
    s: float
    S: float
    d: int
    eps0: float
    r0: float
    L0: float
    B: float
    C0: float
    source: str = "proof-extracted"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("s", "S", "d", "eps0", "r0", "L0", "B", "C0", "source")}


def upc_bound(s: float, S: float, d: int, eps0: float) -> UpcBound:
    """Constants of V_E(x + zeta v) <= C0 |zeta|^(1/(2s)) for |zeta| <= r0 on cuspidal sets."""
    if not s >= 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not S > 0:
        raise ValueError(f"S must be positive, got {S}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be an integer >= 1, got {d}")
    if not 0 < eps0 < 1:
        raise ValueError(f"eps0 must lie in (0, 1), got {eps0}")
    r0 = S / math.sqrt(2) * (1 - eps0) ** s
    L0 = math.sqrt(2) / S
    e = 1.0 / (2 * s)
    B = 4.0 / eps0 * L0 ** e
    x = r0 ** e
    C0 = ((1 + B * x) ** int(d) - 1) / x
    return UpcBound(float(s), float(S), int(d), float(eps0), r0, L0, B, C0)


@dataclass(frozen=True)
class ConvexBodyHcp:
    gamma: float
    B: float
    B_capacity: float | None  # constant in front of (dist / C(E))^(1/2)


def convex_body_hcp(width: float, capacity: float | None = None) -> ConvexBodyHcp:
    """Holder constants of a convex body from its minimal width (and capacity)."""
    if not width > 0:
        raise ValueError(f"minimal width must be positive, got {width}")
    base = math.sqrt(2 + 2 * math.sqrt(3))
    Bc = None
    if capacity is not None:
        if not capacity > 0:
            raise ValueError("capacity must be positive")
        Bc = base / math.sqrt(capacity)
    return ConvexBodyHcp(0.5, base * math.sqrt(4.0 / width), Bc)


def interval_hcp_constant() -> float:
    """2 (1 + sqrt 3)^(1/2), the global Holder constant of [-1, 1]."""
    return 2 * math.sqrt(1 + math.sqrt(3))


@dataclass(frozen=True)
class ClaimedExponents:
    m: float
    gamma: float
    log_M: float
    log_B: float


def onion_constants(M_F: float) -> ClaimedExponents:
    """VMI(6, M) and HCP(1/6, 6 M^(1/6)) with M = 3 M_F exp(3 M_F (1 + e^(3 M_F))), in logs."""
    if not M_F > 0:
        raise ValueError("M_F must be positive")
    log_M = math.log(3 * M_F) + 3 * M_F * (1 + math.exp(3 * M_F))
    return ClaimedExponents(6.0, 1 / 6, log_M, math.log(6) + log_M / 6)


def chain_constants(mu: float, b: float, N: int = 1) -> ClaimedExponents:
    """VMI(2 + mu, e^(N + N sqrt(N+8) e^N / b) / b) and the matching HCP(1/(2+mu), B), in logs."""
    N = _check_N(N)
    if not mu >= 2 or not 0 < b < math.sqrt(2) - 1:
        raise ValueError("need mu >= 2 and b in (0, sqrt(2) - 1)")
    m = 2 + mu
    log_M = N + N * math.sqrt(N + 8) * math.exp(N) / b - math.log(b)
    log_B = (math.log(N) + log_M) / m + math.log(m)
    return ClaimedExponents(m, 1 / m, log_M, log_B)


# ---------------------------------------------------------------------------
# Equivalence suite


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    lhs: float
    rhs: float
    tol: float
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "lhs": _num(self.lhs),
                "rhs": _num(self.rhs), "tol": _num(self.tol), "note": self.note}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class EquivalenceReport:
    set_id: str
    markov: dict
    green: dict
    checks: tuple[Check, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"set": self.set_id, "markov": self.markov, "green": self.green,
                "checks": [c.to_dict() for c in self.checks], "metadata": self.metadata}


def suite_radii(window=(1e-3, 1e-1), count: int = 20) -> np.ndarray:
    """Fit window samples followed by the large radii used for the capacity."""
    return np.concatenate([gr.log_radii(window[0], window[1], count), gr.capacity_radii()])


def synthetic_profile(radii, gamma: float, B: float, set_id: str = "synthetic", degree: int = 0) -> gr.GreenProfile:
    """rho = B r^gamma up to r = 1, continued as B + log r (a wrong-exponent control)."""
    r = np.asarray(radii, dtype=float)
    rho = np.where(r <= 1, B * r ** gamma, B + np.log(np.maximum(r, 1.0)))
    return gr.GreenProfile(set_id, r, rho, rho.copy(), degree, np.zeros(len(r), dtype=int),
                           0.0, (), None, {"synthetic": {"gamma": gamma, "B": B}})


def _is_product(s) -> bool:
    return isinstance(s, (RealBox, Polydisc, Product))


def verify_equivalence_suite(s, n_max: int = 8, k_max: int | None = 3, green_degree: int | None = None,
                             radii=None, window=(1e-3, 1e-1), set_id: str = "set", density: int = 4,
                             phase_count: int = 32, jobs: int | None = None,
                             claim: tuple[float, float] | None = None,
                             profile: gr.GreenProfile | None = None,
                             table: MarkovTable | None = None) -> EquivalenceReport:
    """Fit Markov and Holder constants on one set and cross-check them through the transfers.

    claim = (m, gamma) switches step three to the one-sided bounds a
    construction is known to satisfy: m_hat <= m + 0.5, gamma_hat >= gamma - 0.03.
    profile and table replace the computed data (used by control fixtures).
    """
    N = s.ambient_dim
    n_green = green_degree or (32 if s.is_real else 16)
    radii = suite_radii(window) if radii is None else np.asarray(radii, dtype=float)
    checks: list[Check] = []

    # (1) Markov table and exponent fit; m < 1 is lifted to 1 (VMI(m) implies VMI(1) for n >= k)
    if table is None:
        table = markov_table(s, n_max, k_max, density, phase_count, set_id=set_id, jobs=jobs)
    mfit = fit_markov_exponent(table)
    m_hat = max(1.0, mfit.m)
    M_hat = smallest_vmi_constant(table, m_hat)
    checks.append(Check("markov_fit", table.stable and M_hat > 0, mfit.m, m_hat, 0.0,
                        f"fit residual {mfit.residual:.3g}; stable={table.stable}"))

    # (2) Green profile and Holder fit; gamma > 1 is capped at 1 on the window r <= 1
    if profile is None:
        profile = gr.rho_profile(s, radii, n_green, density=density, phase_count=phase_count,
                                 set_id=set_id, jobs=jobs)
    hfit = gr.fit_holder(profile, window)
    g_hat = min(1.0, hfit.gamma)
    B_hat = float(np.max(_window(profile, window)[1] / _window(profile, window)[0] ** g_hat))
    checks.append(Check("holder_fit", profile.ok and hfit.gamma > 0, hfit.gamma, g_hat, 0.0,
                        f"fit residual {hfit.residual:.3g}; profile violations {len(profile.violations)}"))

    # (3) exponents match
    if claim is None:
        d = abs(hfit.gamma * mfit.m - 1)
        checks.append(Check("exponent_match", d <= EXPONENT_TOL, d, 0.0, EXPONENT_TOL,
                            "|gamma_hat * m_hat - 1|"))
    else:
        cm, cg = claim
        ok = mfit.m <= cm + CLAIM_M_MARGIN and hfit.gamma >= cg - CLAIM_GAMMA_MARGIN
        checks.append(Check("exponent_match", ok, mfit.m, cm, CLAIM_M_MARGIN,
                            f"one-sided: m_hat <= {cm:g} + {CLAIM_M_MARGIN}, "
                            f"gamma_hat = {hfit.gamma:.4g} >= {cg:.4g} - {CLAIM_GAMMA_MARGIN}"))

    # (4) Markov bound transferred from the Holder constants dominates the table
    m_t, M_t = hcp_to_vmi(g_hat, B_hat, N)
    cert = check_vmi(table, m_t, M_t)
    checks.append(Check("hcp_to_vmi_dominates", cert.passed, cert.residual, 1.0, cert.tolerance,
                        f"VMI({m_t:.4g}, {M_t:.4g}): max factor / bound"))

    # (5) Holder bound transferred from the Markov constants lies above the profile
    g_t, B_t = vmi_to_hcp(m_hat, M_hat, N)
    r_w, rho_w = _window(profile, window)
    ratio = float(np.max(rho_w / (B_t * r_w ** g_t)))
    checks.append(Check("vmi_to_hcp_dominates", ratio <= 1 + PROFILE_TOL, ratio, 1.0, PROFILE_TOL,
                        f"HCP({g_t:.4g}, {B_t:.4g}): max rho_hat / bound on the window"))

    # (6) coordinate directions give the same exponent
    directional = {}
    if N == 1:
        checks.append(Check("directional_exponents", True, 0.0, 0.0, DIRECTION_TOL,
                            "N = 1: the coordinate direction is the profile itself"))
    elif _is_product(s):
        worst = 0.0
        for j in range(1, N + 1):
            pj = gr.directional_profile(s, j, _window(profile, window)[0], n_green, density=density,
                                        phase_count=phase_count, set_id=set_id, jobs=jobs)
            gj = gr.fit_holder(pj, window).gamma
            directional[j] = gj
            worst = max(worst, abs(gj - hfit.gamma))
        checks.append(Check("directional_exponents", worst <= DIRECTION_TOL, worst, 0.0, DIRECTION_TOL,
                            "max_j |gamma_j - gamma_hat|"))
    else:
        checks.append(Check("directional_exponents", True, 0.0, 0.0, DIRECTION_TOL,
                            "not a product set: skipped"))

    # (7) capacity above the Markov-side lower bound
    cap = gr.capacity_estimate(profile)
    lower = capacity_lower_bound(m_hat, M_hat, N)
    checks.append(Check("capacity_lower_bound", cap.value >= lower * (1 - CAPACITY_SLACK), cap.value, lower,
                        CAPACITY_SLACK, f"Richardson residual {cap.residual:.3g}"))

    markov = {"m_hat": mfit.m, "M_hat": M_hat, "m_used": m_hat, "n_max": table.max_degree,
              "k_max": max(sum(e.alpha) for e in table.entries), "stable": table.stable,
              "slack": table.slack, "transfer": {"gamma": g_t, "B": B_t}}
    green = {"gamma_hat": hfit.gamma, "B_hat": hfit.B, "gamma_used": g_hat, "B_used": B_hat,
             "degree": profile.degree, "window": list(window), "capacity": cap.value,
             "capacity_residual": cap.residual, "transfer": {"m": m_t, "M": M_t}}
    if directional:
        green["directional_gamma"] = {str(j): g for j, g in directional.items()}
    meta = {"N": N, "density": density, "K": phase_count}
    if claim is not None:
        meta["claim"] = {"m": claim[0], "gamma": claim[1]}
    return EquivalenceReport(set_id, markov, green, tuple(checks), meta)


def _window(profile: gr.GreenProfile, window):
    r = profile.radii
    sel = (r >= window[0] * (1 - 1e-12)) & (r <= window[1] * (1 + 1e-12)) & (profile.rho > 0)
    return r[sel], profile.rho[sel]
