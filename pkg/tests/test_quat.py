import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kkcollapse.exceptions import CutLocusError
from kkcollapse.quat import (
    IDENTITY,
    TangentVector,
    UnitQuaternion,
    exp_map,
    half_trace,
    log_map,
    multiply,
    pairwise_qdist,
    qdist,
    su2_distance,
)

from conftest import unit_quaternions

I = UnitQuaternion(0.0, 1.0, 0.0, 0.0)
J = UnitQuaternion(0.0, 0.0, 1.0, 0.0)
K = UnitQuaternion(0.0, 0.0, 0.0, 1.0)


def test_rejects_non_unit():
    with pytest.raises(ValueError):
        UnitQuaternion(1.0, 1.0, 0.0, 0.0)


def test_hamilton_relations():
    assert np.allclose((I * J).as_array(), K.as_array())
    assert np.allclose((J * K).as_array(), I.as_array())
    assert np.allclose((I * I).as_array(), (-IDENTITY).as_array())
    assert np.allclose((I * J * K).as_array(), (-IDENTITY).as_array())


@given(unit_quaternions())
def test_identity_and_inverse(q):
    assert np.allclose(multiply(IDENTITY, q).as_array(), q.as_array(), atol=1e-15)
    assert su2_distance(q * q.inverse(), IDENTITY) < 1e-7


@given(unit_quaternions(), unit_quaternions(), unit_quaternions())
def test_associative_and_unit(a, b, c):
    left, right = (a * b) * c, a * (b * c)
    assert np.allclose(left.as_array(), right.as_array(), atol=1e-12)
    assert abs(np.linalg.norm(left.as_array()) - 1) < 1e-14


def test_distance_examples():
    assert su2_distance(IDENTITY, -IDENTITY) == pytest.approx(math.pi)
    assert su2_distance(IDENTITY, I) == pytest.approx(math.pi / 2)
    assert su2_distance(IDENTITY, IDENTITY) == 0.0


@given(unit_quaternions(), unit_quaternions(), unit_quaternions())
def test_metric_axioms(a, b, c):
    ab, bc, ac = su2_distance(a, b), su2_distance(b, c), su2_distance(a, c)
    assert ab == pytest.approx(su2_distance(b, a), abs=1e-12)
    assert ac <= ab + bc + 1e-10
    assert 0.0 <= ab <= math.pi
    assert su2_distance(a, a) < 1e-10


@given(unit_quaternions(), unit_quaternions(), unit_quaternions())
def test_bi_invariance(g, a, b):
    d = su2_distance(a, b)
    assert su2_distance(g * a, g * b) == pytest.approx(d, abs=1e-12)
    assert su2_distance(a * g, b * g) == pytest.approx(d, abs=1e-12)


def test_distance_accurate_near_zero():
    tiny = UnitQuaternion.from_array([1.0, 1e-10, 0.0, 0.0])
    assert su2_distance(IDENTITY, tiny) == pytest.approx(1e-10, rel=1e-6)
    a = np.array([[1.0, 0, 0, 0]])
    assert pairwise_qdist(a, np.array([[1.0, 1e-10, 0, 0]]))[0, 0] == pytest.approx(1e-10, rel=1e-6)


@given(unit_quaternions(), unit_quaternions())
def test_half_trace_identity(a, b):
    assert half_trace(a, b) == pytest.approx(a.dot(b), abs=1e-12)


def test_exp_examples():
    assert exp_map(TangentVector(0.0, 0.0, 0.0)) == IDENTITY
    assert su2_distance(exp_map(TangentVector(math.pi, 0.0, 0.0)), -IDENTITY) < 1e-12


def test_log_cut_locus():
    with pytest.raises(CutLocusError):
        log_map(-IDENTITY)


_angle = st.floats(-1.0, 1.0, allow_nan=False)


@given(_angle, _angle, _angle, st.floats(0.0, math.pi - 0.01))
def test_exp_log_roundtrip(x, y, z, r):
    v = np.array([x, y, z])
    n = np.linalg.norm(v)
    v = v / n * r if n > 1e-6 else np.zeros(3)
    w = log_map(exp_map(TangentVector(*v))).as_array()
    assert np.allclose(w, v, atol=1e-10)


@given(unit_quaternions(), unit_quaternions())
def test_log_length_is_distance(a, b):
    d = su2_distance(a, b)
    if d < math.pi - 1e-3:
        assert log_map(a.inverse() * b).norm() == pytest.approx(d, abs=1e-9)


def test_tangent_inner_nonnegative():
    v = TangentVector(0.3, -0.2, 0.5)
    assert v.inner(v) >= 0
    assert TangentVector(0.0, 0.0, 0.0).norm() == 0.0


def test_array_distance_matches_scalar(rng):
    from kkcollapse.quat import random_unit_quaternions

    a, b = random_unit_quaternions(rng, 20), random_unit_quaternions(rng, 30)
    m = pairwise_qdist(a, b)
    assert np.allclose(m, qdist(a[:, None], b[None]), atol=1e-12)
