import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extremalkit.sets import (Arc, Disc, Point, Polydisc, Product, RealBox, RealInterval, SetDescriptionError,
                              Union, build_chain_set, build_onion_set, discretize, distance, sample_pieces)


def test_distance_examples():
    I = RealInterval(-1, 1)
    assert distance(I, 2) == pytest.approx(1)
    assert distance(I, 1j) == pytest.approx(1)
    assert distance(Disc(0, 1), 0) == 0


def test_distance_arc_and_point():
    a = Arc(0, 1, 0, math.pi)
    assert distance(a, -1j) == pytest.approx(math.sqrt(2))
    assert distance(Point((1 + 1j,)), 1) == pytest.approx(1)


def test_box_distance_is_euclidean():
    B = RealBox((-1, -1), (1, 1))
    assert distance(B, np.array([2, 2])) == pytest.approx(math.sqrt(2))
    assert distance(B, np.array([0, 1j])) == pytest.approx(1)


def test_discretize_counts():
    d = discretize(RealInterval(-1, 1), 4, density=2, phase_count=16)
    assert d.constraint_nodes.shape == (10, 1)
    assert np.all(np.abs(d.constraint_nodes.real) <= 1)
    c = discretize(Disc(0, 1), 3, density=2, phase_count=16)
    assert c.constraint_nodes.shape == (8, 1)
    assert np.allclose(np.abs(c.constraint_nodes), 1)
    u = discretize(Union((RealInterval(-3, -2), RealInterval(2, 3))), 4, density=2, phase_count=16)
    assert u.constraint_nodes.shape == (20, 1)


def test_discretize_rejects_bad_parameters():
    with pytest.raises(ValueError):
        discretize(RealInterval(-1, 1), 0)
    with pytest.raises(ValueError):
        discretize(RealInterval(-1, 1), 4, density=1)
    with pytest.raises(ValueError):
        discretize(RealInterval(-1, 1), 4, phase_count=4)


def test_descriptor_validation():
    with pytest.raises(SetDescriptionError):
        RealInterval(1, -1)
    with pytest.raises(SetDescriptionError):
        Disc(0, 0)
    with pytest.raises(SetDescriptionError):
        RealBox((0, 0), (1, 0))
    with pytest.raises(SetDescriptionError):
        Union((RealInterval(-1, 1), RealBox((0, 0), (1, 1))))
    with pytest.raises(SetDescriptionError):
        Product((RealBox((0, 0), (1, 1)),))


def test_onion_examples():
    J = 3
    c = build_onion_set([2.0 ** (1 - j) for j in range(1, J + 1)], [2.0 ** (-j - 1) for j in range(1, J + 1)], J)
    assert c.admissible
    assert len(c.set.members) == J + 1
    bad = build_onion_set([1, 0.9], [math.pi / 3, 0.5], 2)
    assert not bad.admissible
    single = build_onion_set([1.0], [0.5], 1)
    assert single.admissible and len(single.set.members) == 2
    with pytest.raises(SetDescriptionError):
        build_onion_set([1, 1.2], [0.1, 0.1], 2)


def test_chain_examples():
    c = build_chain_set(2, 0.4, 1, 3)
    assert c.parameters["radii"] == pytest.approx([1, 0.4, 0.064])
    assert c.parameters["centers"] == pytest.approx([2, 0.56, 0.068096])
    one = build_chain_set(2, 0.4, 1, 1)
    assert one.set.members[0] == Disc(2, 1)
    with pytest.raises(SetDescriptionError):
        build_chain_set(2, 0.45, 1, 3)
    with pytest.raises(SetDescriptionError):
        build_chain_set(1.5, 0.3, 1, 3)


@given(mu=st.floats(2, 4), b=st.floats(0.01, 0.41), J=st.integers(1, 8))
def test_chain_members_are_disjoint(mu, b, J):
    try:
        c = build_chain_set(mu, b, 1, J)
    except SetDescriptionError as exc:
        assert "underflows" in str(exc)
        return
    r, a = c.parameters["radii"], c.parameters["centers"]
    assert all(r[j + 1] < r[j] for j in range(J - 1))
    left = [a[0] - r[0]] + [x * x for x in r[1:]]
    assert all(left[j] > a[j + 1] + r[j + 1] for j in range(J - 1))
    assert c.admissible


@given(cap=st.integers(1, 12), density=st.integers(2, 6))
def test_constraint_nodes_lie_on_the_set(cap, density):
    for s in (RealInterval(-1, 2), Disc(1j, 0.5), Arc(0, 2, 0.3, 2.0), RealBox((-1, 0), (1, 2)),
              Union((RealInterval(-3, -2), Disc(3, 1)))):
        d = discretize(s, cap, density)
        z = d.constraint_nodes
        dist = distance(s, z if s.ambient_dim > 1 else z[:, 0])
        assert np.max(dist) <= 1e-12


def test_discretize_is_deterministic():
    s = Union((Arc(0, 1, 0.2, 6.0), Point((0,))))
    a = discretize(s, 9).constraint_nodes
    b = discretize(s, 9).constraint_nodes
    assert a.tobytes() == b.tobytes()


@given(x=st.floats(-4, 4), y=st.floats(-4, 4))
def test_union_distance_is_min_over_members(x, y):
    members = (RealInterval(-1, 1), Disc(3j, 1), Arc(-2, 0.5, 0, math.pi))
    U = Union(members)
    z = complex(x, y)
    assert distance(U, z) == pytest.approx(min(distance(m, z) for m in members), abs=1e-12)
    dense = np.concatenate([sample_pieces(m, 4000)[:, 0] for m in members])
    assert distance(U, z) <= np.min(np.abs(dense - z)) + 1e-12


def test_polydisc_distance():
    P = Polydisc((0, 0), (1, 2))
    assert distance(P, np.array([2, 0])) == pytest.approx(1)
    assert distance(P, np.array([2, 3])) == pytest.approx(math.sqrt(2))
