import numpy as np
import pytest
from hypothesis import given, strategies as st

from kkcollapse.ade import GroupSpec, build_group, same_group
from kkcollapse.quat import IDENTITY, UnitQuaternion, random_unit_quaternions, su2_distance
from kkcollapse.surface_rep import Representation, build_ade_rep, conjugate, evaluate, holonomy_image, side_images
from kkcollapse.hyperbolic import regular_polygon
from kkcollapse.words import Word, commutator, surface_relator

FAMILIES = ["C5", "BD4", "2T", "2O", "2I"]


@pytest.mark.parametrize("name", FAMILIES + ["C7", "C1"])
@pytest.mark.parametrize("genus", [2, 3, 4])
def test_relator_and_image(name, genus):
    g = build_group(GroupSpec.parse(name))
    rep = build_ade_rep(genus, g)
    assert rep.relator_defect() <= 1e-12
    assert su2_distance(evaluate(rep, surface_relator(genus)), IDENTITY) <= 1e-10
    image = holonomy_image(rep)
    assert image.order == g.order
    assert same_group(image, g)


def test_assignment_pattern():
    g = build_group(GroupSpec.parse("2T"))
    a, b = g.generators
    rep = build_ade_rep(3, g)
    assert [rep.images[k] for k in ("a1", "b1", "a2", "b2")] == [a, b, b, a]
    assert rep.images["a3"] == IDENTITY and rep.images["b3"] == IDENTITY


def test_noncommuting_generators_2i():
    rep = build_ade_rep(2, build_group(GroupSpec.parse("2I")))
    c = evaluate(rep, commutator(Word.gen("a1"), Word.gen("b1")))
    assert su2_distance(c, IDENTITY) > 0.1


def test_errors():
    g = build_group(GroupSpec.parse("2T"))
    with pytest.raises(ValueError):
        build_ade_rep(1, g)
    with pytest.raises(ValueError):
        Representation(2, {"a1": IDENTITY})
    with pytest.raises(KeyError):
        evaluate(build_ade_rep(2, g), Word.gen("c9"))
    assert evaluate(build_ade_rep(2, g), Word()) == IDENTITY


def test_trivial_rep_image():
    rep = Representation(2, {k: IDENTITY for k in ("a1", "b1", "a2", "b2")})
    assert holonomy_image(rep).order == 1


_letter = st.tuples(st.sampled_from(["a1", "b1", "a2", "b2"]), st.sampled_from([1, -1]))


@given(st.lists(_letter, max_size=10), st.lists(_letter, max_size=10))
def test_evaluate_is_homomorphism(u, v):
    rep = build_ade_rep(2, build_group(GroupSpec.parse("2I")))
    wu, wv = Word(tuple(u)), Word(tuple(v))
    lhs = evaluate(rep, wu * wv)
    rhs = evaluate(rep, wu) * evaluate(rep, wv)
    assert su2_distance(lhs, rhs) < 1e-10


def test_conjugation(rng):
    g = build_group(GroupSpec.parse("2O"))
    rep = build_ade_rep(2, g)
    q = UnitQuaternion.from_array(random_unit_quaternions(rng, 1)[0])
    assert all(su2_distance(conjugate(rep, IDENTITY).images[k], v) < 1e-12 for k, v in rep.images.items())
    c = conjugate(rep, q)
    assert c.relator_defect() < 1e-10
    assert holonomy_image(c).order == g.order
    back = conjugate(c, q.inverse())
    assert all(su2_distance(back.images[k], v) < 1e-12 for k, v in rep.images.items())


def test_side_images_are_in_group():
    g = build_group(GroupSpec.parse("2T"))
    rep = build_ade_rep(2, g)
    imgs = side_images(rep, regular_polygon(2).side_words)
    assert set(imgs) == {"x1", "x2", "x3", "x4"}
    for v in imgs.values():
        g.lookup(UnitQuaternion.from_array(v))
