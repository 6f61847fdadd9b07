import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from extremalkit.sets import RealInterval
from extremalkit.theorems import (Check, capacity_lower_bound, chain_constants, convex_body_hcp, hcp_to_vmi,
                                  interval_hcp_constant, lanczos_gamma, onion_constants, real_to_complex_lift,
                                  real_to_complex_ratio_half, suite_radii, synthetic_profile, transfer, upc_bound,
                                  verify_equivalence_suite, vmi_to_hcp)

CHECK_NAMES = ["markov_fit", "holder_fit", "exponent_match", "hcp_to_vmi_dominates", "vmi_to_hcp_dominates",
               "directional_exponents", "capacity_lower_bound"]


def test_hcp_to_vmi_examples():
    B = 2 * math.sqrt(1 + math.sqrt(3))
    m, M = hcp_to_vmi(0.5, B)
    assert m == 2 and M == pytest.approx((B * 0.5 * math.e) ** 2, rel=1e-14)
    assert M == pytest.approx(20.19, abs=0.01)
    assert hcp_to_vmi(1, 1) == (1, pytest.approx(math.e))
    assert hcp_to_vmi(1, 1 / math.e) == (1, pytest.approx(1))
    for bad in ((0, 1), (1.2, 1), (0.5, 0)):
        with pytest.raises(ValueError):
            hcp_to_vmi(*bad)
    with pytest.raises(ValueError):
        hcp_to_vmi(0.5, 1, N=0)


def test_vmi_to_hcp_examples():
    assert vmi_to_hcp(2, 1) == (0.5, 2)
    assert vmi_to_hcp(1, 1) == (1, 1)
    assert vmi_to_hcp(2, 4) == (0.5, 4)
    with pytest.raises(ValueError):
        vmi_to_hcp(0.5, 1)


@given(gamma=st.floats(0.05, 1), B=st.floats(0.01, 50), N=st.integers(1, 6))
def test_round_trip_composition(gamma, B, N):
    m, M = hcp_to_vmi(gamma, B, N)
    g2, B2 = vmi_to_hcp(m, M, N)
    assert g2 == pytest.approx(gamma, rel=1e-15)
    expected = (math.sqrt(N) * (B * gamma * math.e) ** (1 / gamma)) ** gamma * N ** gamma * (1 / gamma)
    assert B2 == pytest.approx(expected, rel=1e-12)
    assert gamma * m == pytest.approx(1, rel=1e-15)


def test_transfer_record():
    t = transfer("hcp_to_vmi", 0.5, 2, 2)
    assert t.outputs["m"] == 2 and t.to_dict()["N"] == 2
    with pytest.raises(ValueError):
        transfer("sideways", 1, 1)


def test_capacity_lower_bound_examples():
    assert capacity_lower_bound(2, 1) == pytest.approx(math.exp(-2))
    assert capacity_lower_bound(1, 1) == pytest.approx(math.exp(-1))
    vals = [capacity_lower_bound(m, 1) for m in range(1, 30)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_lift_examples():
    ref = math.gamma(0.25) / (math.sqrt(math.pi) * math.gamma(0.75))
    assert real_to_complex_lift(1, 0.5) == pytest.approx(1.66925, abs=1e-5)
    assert real_to_complex_lift(1, 0.5) == pytest.approx(ref, rel=1e-12)
    assert real_to_complex_ratio_half() == pytest.approx(ref, rel=1e-12)
    assert real_to_complex_lift(2, 0.5) == pytest.approx(2 * ref, rel=1e-12)
    assert real_to_complex_lift(3, 1e-9) == pytest.approx(3, rel=1e-8)
    for bad in (0, 1, 1.5):
        with pytest.raises(ValueError):
            real_to_complex_lift(1, bad)


@given(gamma=st.floats(0.01, 0.95))
def test_lift_matches_quadrature_and_exceeds_B(gamma):
    integral, _ = scipy.integrate.quad(lambda t: (1 + t * t) ** (gamma / 2 - 1), -np.inf, np.inf,
                                       epsabs=1e-13, epsrel=1e-12, limit=500)
    lift = real_to_complex_lift(1, gamma)
    assert lift == pytest.approx(integral / math.pi, rel=1e-7)
    assert lift >= 1


@given(x=st.floats(-7.5, 30).filter(lambda v: abs(v - round(v)) > 1e-3 or v > 0))
def test_lanczos_matches_math_gamma(x):
    assert lanczos_gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)


def test_upc_examples():
    u = upc_bound(1, math.sqrt(2), 1, 0.5)
    assert (u.L0, u.r0, u.B, u.C0) == (pytest.approx(1), pytest.approx(0.5), pytest.approx(8), pytest.approx(8))
    u2 = upc_bound(1, math.sqrt(2), 2, 0.5)
    assert u2.C0 == pytest.approx(((1 + 8 * math.sqrt(0.5)) ** 2 - 1) / math.sqrt(0.5), rel=1e-12)
    assert u2.C0 == pytest.approx(61.25, abs=0.01)
    assert u2.C0 > u.C0 and u.source == "proof-extracted"
    for bad in ((0.5, 1, 1, 0.5), (1, 0, 1, 0.5), (1, 1, 1.5, 0.5), (1, 1, 1, 1)):
        with pytest.raises(ValueError):
            upc_bound(*bad)


@given(s=st.floats(1, 4), S=st.floats(0.1, 5), eps=st.floats(0.05, 0.9), d=st.integers(1, 5))
def test_upc_monotonicity(s, S, eps, d):
    u = upc_bound(s, S, d, eps)
    assert upc_bound(s, S, d + 1, eps).C0 >= u.C0
    assert upc_bound(s, S * 1.5, d, eps).C0 <= u.C0 * (1 + 1e-12)
    assert upc_bound(s, S, d, min(0.95, eps * 1.2)).C0 <= u.C0 * (1 + 1e-12)


def test_convex_body_examples():
    c = convex_body_hcp(2)
    assert c.gamma == 0.5
    assert c.B == pytest.approx(interval_hcp_constant(), rel=1e-14)
    assert c.B == pytest.approx(3.306, abs=1e-3)
    assert convex_body_hcp(4).B == pytest.approx(c.B / math.sqrt(2))
    m, M = hcp_to_vmi(c.gamma, c.B)
    assert M == pytest.approx(c.B ** 2 * math.e ** 2 / 4)
    cap = convex_body_hcp(2, capacity=0.5)
    # width 2 and capacity 1/2 describe the same interval: both forms agree
    assert cap.B_capacity == pytest.approx(c.B, rel=1e-14)
    with pytest.raises(ValueError):
        convex_body_hcp(0)


def test_claimed_constants():
    o = onion_constants(1.0)
    assert o.m == 6 and o.gamma == pytest.approx(1 / 6)
    ch = chain_constants(2, 0.4)
    assert ch.m == 4 and ch.gamma == 0.25
    with pytest.raises(ValueError):
        chain_constants(1, 0.4)


def test_check_serialization():
    c = Check("x", np.bool_(True), math.inf, 1.0, 0.1, "")
    assert c.passed is True
    d = c.to_dict()
    assert d["pass"] is True and d["lhs"] is None


def test_suite_with_synthetic_profiles():
    I = RealInterval(-1, 1)
    r = suite_radii()
    good = verify_equivalence_suite(I, profile=synthetic_profile(r, 0.5, 1.5, "interval"), set_id="interval")
    assert [c.name for c in good.checks] == CHECK_NAMES
    assert good.passed, [c for c in good.checks if not c.passed]
    bad = verify_equivalence_suite(I, profile=synthetic_profile(r, 1.0, 1.0, "ctl"), set_id="ctl")
    step = bad.check("exponent_match")
    assert not step.passed and step.lhs >= 3 * step.tol
    assert not bad.passed
    doc = bad.to_dict()
    assert doc["set"] == "ctl" and len(doc["checks"]) == 7
