import itertools
import math

import numpy as np
import pytest

from kkcollapse.ade import (
    BINARY_DIHEDRAL,
    CYCLIC,
    FiniteSubgroup,
    GroupSpec,
    build_group,
    central_element,
    close,
    close_group,
    generators,
    lookup,
    presentation_defect,
    same_group,
)
from kkcollapse.exceptions import ClosureError, NotAMemberError
from kkcollapse.quat import IDENTITY, UnitQuaternion, exp_map, TangentVector, qmul, random_unit_quaternions, su2_distance

PHI = (1 + math.sqrt(5)) / 2
ALL_SPECS = ([GroupSpec(CYCLIC, n) for n in range(1, 9)] + [GroupSpec(BINARY_DIHEDRAL, n) for n in range(2, 9)]
             + [GroupSpec.parse(s) for s in ("2T", "2O", "2I")])


def _signed(vals):
    out = set()
    for signs in itertools.product((1, -1), repeat=len(vals)):
        out.add(tuple(s * v for s, v in zip(signs, vals)))
    return out


def _hurwitz():
    pts = set()
    for k in range(4):
        for s in (1, -1):
            v = [0.0] * 4
            v[k] = s
            pts.add(tuple(v))
    pts |= _signed((0.5, 0.5, 0.5, 0.5))
    return pts


def _octahedral_extra():
    pts = set()
    r = 1 / math.sqrt(2)
    for i, j in itertools.combinations(range(4), 2):
        for si, sj in itertools.product((r, -r), repeat=2):
            v = [0.0] * 4
            v[i], v[j] = si, sj
            pts.add(tuple(v))
    return pts


def _icosians():
    base = (0.0, 0.5, 0.5 / PHI, PHI / 2)
    even = [p for p in itertools.permutations(range(4))
            if sum(p[i] > p[j] for i in range(4) for j in range(i + 1, 4)) % 2 == 0]
    pts = set(_hurwitz())
    for p in even:
        for v in _signed(base):
            pts.add(tuple(v[p[k]] for k in range(4)))
    return pts


def _as_group(points) -> FiniteSubgroup:
    arr = np.array(sorted(points))
    return FiniteSubgroup(arr, int(np.argmax(arr[:, 0])), 0.1, None, ())


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name)
def test_orders_and_presentation(spec):
    g = build_group(spec)
    assert g.order == spec.order
    if spec.order > 1:
        assert presentation_defect(g) <= 1e-9
        assert g.separation > 1e-6


def test_table_orders():
    assert [GroupSpec(CYCLIC, n).order for n in (1, 5)] == [1, 5]
    assert GroupSpec(BINARY_DIHEDRAL, 3).order == 12
    assert [GroupSpec.parse(s).order for s in ("E6", "E7", "E8")] == [24, 48, 120]


@pytest.mark.parametrize("name,oracle", [("2T", _hurwitz), ("2O", lambda: _hurwitz() | _octahedral_extra()),
                                         ("2I", _icosians)])
def test_matches_explicit_element_list(name, oracle):
    pts = oracle()
    assert len(pts) == GroupSpec.parse(name).order
    assert same_group(build_group(GroupSpec.parse(name)), _as_group(pts))


def test_generator_relations_2t():
    a, b = generators(GroupSpec.parse("2T"))
    minus = -IDENTITY
    for w in (a ** 3, b ** 3, (a * b) ** 2):
        assert su2_distance(w, minus) < 1e-12
    assert np.allclose((a * b).as_array(), [0, 0, 1, 0])


def test_2i_ab_is_pure():
    a, b = generators(GroupSpec.parse("2I"))
    assert abs((a * b).w) < 1e-15
    assert su2_distance((a * b) ** 2, -IDENTITY) < 1e-12


def test_cyclic_generator():
    a, b = generators(GroupSpec(CYCLIC, 4))
    assert su2_distance(a ** 4, IDENTITY) < 1e-12
    assert b == IDENTITY


@pytest.mark.parametrize("name", ["2T", "2O", "2I", "BD5"])
def test_central_element_is_minus_identity(name):
    assert su2_distance(central_element(build_group(GroupSpec.parse(name))), -IDENTITY) < 1e-12


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name)
def test_closure_inverse_and_center(spec):
    g = build_group(spec)
    table = g.multiplication_table()
    # each row of a group table is a permutation
    assert all(len(set(row)) == g.order for row in table)
    for q in g:
        g.lookup(q.inverse())
    has_minus = g.nearest((-IDENTITY).as_array())[1] < 1e-9
    expected = not (spec.family == CYCLIC and spec.n % 2 == 1)
    assert has_minus == expected


def test_lookup():
    g = build_group(GroupSpec.parse("2I"))
    a, b = g.generators
    assert lookup(g, IDENTITY) == g.identity_index
    lookup(g, a * b)
    rng = np.random.default_rng(3)
    far = [q for q in random_unit_quaternions(rng, 200)
           if np.arccos(np.clip(np.abs(g.elements @ q).max(), -1, 1)) > g.tolerance + 1e-3]
    assert far
    with pytest.raises(NotAMemberError):
        lookup(g, UnitQuaternion.from_array(far[0]))


def test_close_rejects_infinite_order():
    irrational = exp_map(TangentVector(0.0, 0.0, 1.0))
    with pytest.raises(ClosureError):
        close(irrational, IDENTITY, cap=200)


def test_close_group_empty_is_trivial():
    g = close_group(())
    assert g.order == 1 and g.contains(IDENTITY)


@pytest.mark.parametrize("text,expected", [("E8", "2I"), ("A4", "C5"), ("D5", "BD3"), ("c7", "C7"), ("BD2", "BD2")])
def test_parse(text, expected):
    assert GroupSpec.parse(text).name == expected


@pytest.mark.parametrize("bad", ["Q8", "", "BD1", "C0"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        GroupSpec.parse(bad)


def test_same_group_detects_difference():
    assert not same_group(build_group(GroupSpec.parse("2T")), build_group(GroupSpec.parse("BD6")))
    assert same_group(build_group(GroupSpec.parse("2O")), build_group(GroupSpec.parse("E7")))
