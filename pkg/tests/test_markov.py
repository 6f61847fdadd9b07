import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extremalkit.markov import (MarkovEntry, MarkovTable, check_ami, check_vmi, fit_markov_exponent,
                                markov_factor, markov_table, vmi_lower_bound_check)
from extremalkit.polynomials import chebyshev_derivative_at_one, factorial_ratio
from extremalkit.sets import Disc, Polydisc, RealBox, RealInterval

I = RealInterval(-1, 1)
D = Disc(0, 1)


@pytest.fixture(scope="module")
def interval_table():
    return markov_table(I, 8, set_id="interval")


@pytest.fixture(scope="module")
def disc_table():
    return markov_table(D, 6, 3, set_id="disc")


def test_factor_examples():
    assert markov_factor(I, 4, 2).factor == pytest.approx(80, rel=1e-4)
    assert markov_factor(D, 5, 1).factor == pytest.approx(5, rel=1 / math.cos(math.pi / 32) - 1 + 1e-6)
    assert markov_factor(I, 1, 1).factor == pytest.approx(1, rel=1e-9)


def test_factor_rejects_bad_orders():
    with pytest.raises(ValueError):
        markov_factor(I, 2, 3)
    with pytest.raises(ValueError):
        markov_factor(I, 2, (1, 0))


def test_interval_table_is_chebyshev(interval_table):
    for e in interval_table.entries:
        assert e.factor == pytest.approx(chebyshev_derivative_at_one(e.n, e.alpha[0]), rel=1e-4)
    assert interval_table.stable


def test_disc_table_is_bernstein(disc_table):
    slack = 1 / math.cos(math.pi / 32) + 0.01
    for e in disc_table.entries:
        exact = factorial_ratio(e.n, e.alpha[0])
        assert exact / slack <= e.factor <= exact * slack


def test_table_invariants(interval_table):
    assert interval_table.factor(3, (0,)) == 1.0
    for k in range(1, 9):
        vals = [interval_table.factor(n, (k,)) for n in range(k, 9)]
        assert all(a <= b * (1 + 1e-9) for a, b in zip(vals, vals[1:]))


def test_csv_layout(interval_table):
    lines = interval_table.to_csv().splitlines()
    assert lines[0] == "set_id,n,alpha,factor,stability_flag,density,K"
    assert len(lines) == 1 + 36
    assert lines[1].startswith("interval,1,1,")


def test_fit_examples(interval_table, disc_table):
    sub = MarkovTable("i", 1, tuple(e for e in interval_table.entries if e.n >= 4), 4, 32)
    assert 1.9 <= fit_markov_exponent(sub, 1).m <= 2.1
    assert 0.95 <= fit_markov_exponent(disc_table, 1).m <= 1.05
    flat = MarkovTable("c", 1, tuple(MarkovEntry(n, (1,), 1.0, 1.0, 1.0, 0.0, True) for n in range(1, 7)), 4, 32)
    f = fit_markov_exponent(flat, 1)
    assert f.m == 0 and f.residual == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_markov_exponent(MarkovTable("c", 1, flat.entries[:3], 4, 32), 1)


def test_vmi_examples(interval_table, disc_table):
    assert check_vmi(interval_table, 2, 1).passed
    assert check_vmi(disc_table, 1, 1).passed
    bad = check_vmi(interval_table, 2, 0.1)
    assert not bad.passed and bad.residual > 1
    with pytest.raises(ValueError):
        check_vmi(interval_table, 0.5, 1)


def test_ami_examples(interval_table, disc_table):
    assert check_ami(interval_table, 2, 1).passed
    assert check_ami(disc_table, 1, 1).passed
    assert not check_ami(disc_table, 0.5, 1).passed


def test_lower_bound_examples(interval_table, disc_table):
    r = vmi_lower_bound_check(interval_table, 2)
    assert r.holds and r.B > 0
    assert vmi_lower_bound_check(disc_table, 1).holds
    first = MarkovTable("k1", 1, tuple(e for e in interval_table.entries if e.alpha == (1,)), 4, 32)
    assert vmi_lower_bound_check(first, 2).holds


def test_real_and_complex_encodings_agree():
    # sup |P| on a real set via +-P rows equals the complex phase encoding for real P
    from numpy.polynomial import chebyshev as npc
    from extremalkit.linprog import solve_ratio_extremal
    x = np.cos(np.pi * np.arange(25) / 24)
    V = npc.chebvander(x, 5)
    L = npc.chebvander([1.7], 5)[0]
    real = solve_ratio_extremal(L, V, True).optimum
    cplx = solve_ratio_extremal(L, V, False, phase_count=64).optimum
    assert real <= cplx * (1 + 1e-9)
    assert cplx <= real / math.cos(math.pi / 64) + 1e-9


def test_polydisc_bound():
    P = Polydisc((0, 0), (1, 2))
    t = markov_table(P, 2, 2, stability_check=False)
    slack = 1 / math.cos(math.pi / 32) + 0.01
    for e in t.entries:
        a1, a2 = e.alpha
        assert e.factor <= 2.0 ** (-a2) * e.n ** (a1 + a2) * slack


def test_box_bound_and_iterated_composition():
    B = RealBox((-1, -1), (1, 1))
    t = markov_table(B, 3, 2, stability_check=False)
    # degree 4 used to stall the simplex on a degenerate vertex
    assert markov_factor(B, 4, (1, 0), stability_check=False).factor == pytest.approx(16, rel=1e-6)
    for e in t.entries:
        bound = math.prod(e.n ** (2 * a) / math.factorial(a) for a in e.alpha)
        assert e.factor <= bound * 1.01
    # D^(a+b) P = D^b (D^a P) with deg D^a P <= n - |a|
    for n in (2, 3):
        for a, b in (((1, 0), (0, 1)), ((1, 0), (1, 0)), ((0, 1), (0, 1))):
            ab = tuple(x + y for x, y in zip(a, b))
            assert t.factor(n, ab) <= t.factor(n, a) * t.factor(n - 1, b) * 1.01


@given(n=st.integers(1, 6), scale=st.floats(0.25, 4))
def test_factor_scales_with_interval_length(n, scale):
    # P(x) -> P(x / scale) maps [-1,1] factors to [-scale, scale] factors times scale^-k
    f = markov_factor(RealInterval(-scale, scale), n, 1, stability_check=False).factor
    assert f == pytest.approx(n * n / scale, rel=1e-6)
