"""Representations of a genus-g surface group into SU(2)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ade import FiniteSubgroup, close_group
from .quat import IDENTITY, UnitQuaternion, su2_distance
from .words import Word, surface_labels, surface_relator

RELATOR_TOL = 1e-10

__all__ = [
    "Representation",
    "Word",
    "build_ade_rep",
    "conjugate",
    "evaluate",
    "holonomy_image",
]


@dataclass(frozen=True)
class Representation:
    """Images of ``a1, b1, ..., ag, bg`` in SU(2)."""

    genus: int
    images: dict[str, UnitQuaternion]

    def __post_init__(self):
        if self.genus < 2:
            raise ValueError("genus must be at least 2")
        missing = set(surface_labels(self.genus)) - set(self.images)
        if missing:
            raise ValueError(f"missing images for {sorted(missing)}")

    def relator_defect(self) -> float:
        return su2_distance(evaluate(self, surface_relator(self.genus)), IDENTITY)

    def check(self, tol: float = RELATOR_TOL) -> Representation:
        defect = self.relator_defect()
        if defect > tol:
            raise ValueError(f"relator defect {defect:.3g} exceeds {tol:.1g}")
        return self

    def __call__(self, word: Word) -> UnitQuaternion:
        return evaluate(self, word)


def build_ade_rep(genus: int, group: FiniteSubgroup) -> Representation:
    """``a1 -> A, b1 -> B, a2 -> B, b2 -> A`` and the identity on the remaining generators."""
    if genus < 2:
        raise ValueError("genus must be at least 2")
    if len(group.generators) == 2:
        a, b = group.generators
    elif len(group.generators) == 1:
        a, b = group.generators[0], IDENTITY
    else:
        raise ValueError("group must carry its generator pair (A, B)")
    images = {"a1": a, "b1": b, "a2": b, "b2": a}
    for i in range(3, genus + 1):
        images[f"a{i}"] = IDENTITY
        images[f"b{i}"] = IDENTITY
    return Representation(genus, images)


def evaluate(rep: Representation, w: Word) -> UnitQuaternion:
    out = IDENTITY
    for label, e in w:
        try:
            q = rep.images[label]
        except KeyError:
            raise KeyError(f"unknown generator {label!r}") from None
        out = out * (q if e == 1 else q.inverse())
    return out


def holonomy_image(rep: Representation, cap: int = 1000) -> FiniteSubgroup:
    """Closure of the image of the representation."""
    gens = []
    for label in surface_labels(rep.genus):
        q = rep.images[label]
        if su2_distance(q, IDENTITY) > 1e-12 and all(su2_distance(q, g) > 1e-12 for g in gens):
            gens.append(q)
    return close_group(tuple(gens), cap=cap)


def conjugate(rep: Representation, q: UnitQuaternion) -> Representation:
    """The representation ``g -> q rho(g) q^-1``."""
    qi = q.inverse()
    return Representation(rep.genus, {k: q * v * qi for k, v in rep.images.items()})


def side_images(rep: Representation, side_words: dict[str, Word]) -> dict[str, np.ndarray]:
    """Images of the polygon's side-pairing generators as quaternion arrays."""
    return {label: evaluate(rep, w).as_array() for label, w in side_words.items()}
