import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from kkcollapse.bounds import sys_upper
from kkcollapse.exceptions import ConvergenceError, DisconnectedGraphError
from kkcollapse.hyperbolic import (
    MobiusIsometry,
    base_edges,
    diameter_estimate,
    hyp_distance,
    reduce_to_domain,
    regular_polygon,
    sample_domain,
    systole_estimate,
    systole_search,
)

BOLZA_SYS = 2 * math.acosh(1 + math.sqrt(2))


@pytest.fixture(scope="module")
def bolza():
    return regular_polygon(2)


def _boundary_radius(poly, theta):
    """Euclidean distance from the origin to the polygon boundary along angle ``theta``."""
    u = np.exp(1j * theta)
    best = np.inf
    for c, r in zip(poly.side_centers, poly.side_radii):
        uc = (u.conjugate() * c).real
        disc = uc * uc - abs(c) ** 2 + r * r
        if disc >= 0:
            t = uc - math.sqrt(disc)
            if t > 0:
                best = min(best, t)
    return best


def _quadrature_area(poly):
    # integrate the radial part of 4/(1-|z|^2)^2 in closed form, then quad over the angle
    f = lambda th: 2 * _boundary_radius(poly, th) ** 2 / (1 - _boundary_radius(poly, th) ** 2)
    n = poly.n_sides
    brk = [2 * math.pi * k / n for k in range(n + 1)]
    return sum(quad(f, a, b, epsabs=1e-12, epsrel=1e-12)[0] for a, b in zip(brk, brk[1:]))


def _naive_systole(poly, max_len):
    gens = []
    for p in poly.pairings:
        m = p.isometry.matrix()
        gens += [(p.label, 1, m), (p.label, -1, np.linalg.inv(m))]
    best = np.inf

    def walk(mat, last, depth):
        nonlocal best
        if depth:
            tr = abs(np.trace(mat).real)
            if tr > 2 + 1e-12:
                best = min(best, 2 * math.acosh(tr / 2))
        if depth == max_len:
            return
        for label, e, g in gens:
            if last is not None and last == (label, -e):
                continue
            walk(mat @ g, (label, e), depth + 1)

    walk(np.eye(2, dtype=complex), None, 0)
    return best


def test_distance_examples():
    assert hyp_distance(0j, 0j) == 0.0
    r = 0.7
    assert hyp_distance(0j, r + 0j) == pytest.approx(math.log((1 + r) / (1 - r)), abs=1e-14)


_pt = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(lambda t: t[0] * complex(math.cos(t[1]), math.sin(t[1])))


@given(_pt, _pt, st.floats(0, 2 * math.pi), st.floats(0, 3), st.floats(0, 2 * math.pi))
def test_isometry_invariance(p, q, theta, length, rot):
    phi = MobiusIsometry.translation(theta, length) @ MobiusIsometry.rotation(rot)
    d = hyp_distance(p, q)
    assert hyp_distance(phi(p), phi(q)) == pytest.approx(d, rel=1e-9, abs=1e-9)


@given(_pt, _pt)
def test_pairing_generators_are_isometries(p, q):
    poly = regular_polygon(2)
    d = hyp_distance(p, q)
    for pair in poly.pairings:
        g = pair.isometry
        assert hyp_distance(g(p), g(q)) == pytest.approx(d, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("genus", [2, 3, 4])
def test_area_and_angles(genus):
    poly = regular_polygon(genus)
    expected = 4 * math.pi * (genus - 1)
    assert poly.area() == pytest.approx(expected, abs=1e-6)
    assert np.allclose(poly.interior_angles(), 2 * math.pi / (4 * genus), atol=1e-9)
    assert _quadrature_area(poly) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("genus", [2, 3, 4])
def test_pairings_and_relator(genus):
    poly = regular_polygon(genus)
    assert poly.pairing_defect() < 1e-8
    assert poly.relator_defect() < 1e-6
    for p in poly.pairings:
        assert p.isometry.is_hyperbolic()
        assert abs(abs(np.linalg.det(p.isometry.matrix())) - 1) < 1e-10


def test_bolza_pairing_traces(bolza):
    for p in bolza.pairings:
        assert abs(p.isometry.trace) == pytest.approx(2 * (1 + math.sqrt(2)), abs=1e-12)


def test_invalid_genus():
    with pytest.raises(ValueError):
        regular_polygon(1)


def test_systole_matches_naive_enumeration(bolza):
    naive = _naive_systole(bolza, 4)
    assert naive == pytest.approx(BOLZA_SYS, abs=1e-9)
    assert systole_estimate(bolza, 4) == pytest.approx(naive, abs=1e-9)


def test_systole_properties(bolza):
    s1, w = systole_search(bolza, 1)
    assert len(w) == 1
    assert s1 == pytest.approx(BOLZA_SYS, abs=1e-12)
    assert systole_estimate(bolza, 2) >= systole_estimate(bolza, 4) - 1e-12
    assert systole_estimate(bolza, 4) <= sys_upper(2)


def test_systole_genus3_below_upper_bound():
    poly = regular_polygon(3)
    assert systole_estimate(poly, 3) <= sys_upper(3)


def test_reduce_examples(bolza):
    z, w = reduce_to_domain(0.1 + 0.2j, bolza)
    assert z == 0.1 + 0.2j and len(w) == 0
    g = bolza.pairings[0]
    z, w = reduce_to_domain(g.isometry(0j), bolza)
    assert abs(z) < 1e-12
    assert str(w) == f"{g.label}^-1"


def test_reduce_roundtrip(bolza, rng):
    for _ in range(100):
        rho = rng.uniform(0, 6)
        p = math.tanh(rho / 2) * np.exp(2j * math.pi * rng.random())
        z, w = reduce_to_domain(p, bolza)
        assert bolza.contains(z, tol=1e-9)
        back = bolza.word_isometry(w).inverse()(z)
        assert abs(back - p) < 1e-8


def test_reduce_gives_up(bolza):
    p = math.tanh(12) + 0j
    with pytest.raises(ConvergenceError):
        reduce_to_domain(p, bolza, max_iter=1)


def test_sample_domain(bolza):
    one = sample_domain(bolza, 1)
    assert list(one.points) == [0j]
    small, big = sample_domain(bolza, 25), sample_domain(bolza, 100)
    assert big.covering_radius < small.covering_radius
    assert bolza.contains(big.points).all()
    assert np.array_equal(sample_domain(bolza, 100).points, big.points)


def test_diameter_estimate(bolza):
    small, big = sample_domain(bolza, 100), sample_domain(bolza, 400)
    d_small = diameter_estimate(bolza, small, 2.4 * small.covering_radius)
    d_big = diameter_estimate(bolza, big, 2.4 * big.covering_radius)
    assert d_big <= 4 * math.pi / BOLZA_SYS + 2 * big.covering_radius
    assert abs(d_big - d_small) <= 0.05 * d_big
    assert d_big >= hyp_distance(big.points[0], big.points[1])


def test_diameter_disconnected(bolza):
    s = sample_domain(bolza, 50)
    with pytest.raises(DisconnectedGraphError):
        diameter_estimate(bolza, s, 0.05)


def test_crossing_edge_lengths(bolza):
    s = sample_domain(bolza, 60)
    e = base_edges(bolza, s.points, 0.8)
    assert (e.crossing >= 0).any() and (e.crossing == -1).any()
    for i, j, length, k in zip(e.i, e.j, e.length, e.crossing):
        other = s.points[j] if k < 0 else bolza.crossings[k].isometry(s.points[j])
        assert hyp_distance(s.points[i], other) == pytest.approx(length, abs=1e-12)
