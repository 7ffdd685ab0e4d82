"""Binary polyhedral subgroups of SU(2).

Each group is built by closing an explicit pair of quaternion generators and
is then checked against its presentation ``<A, B | R(A, B)>``:

=================  ======  ==============================
family             order   relations
=================  ======  ==============================
cyclic C_n         n       A^n = 1
binary dihedral    4n      A^2 = B^2 = (AB)^n
binary tetra (E6)  24      A^3 = B^3 = (AB)^2
binary octa (E7)   48      A^3 = B^4 = (AB)^2
binary icosa (E8)  120     A^3 = B^5 = (AB)^2
=================  ======  ==============================
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ClosureError, NotAMemberError, PresentationError
from .quat import IDENTITY, UnitQuaternion, pairwise_qdist, qdist, qmul, su2_distance

DEDUP_TOL = 1e-9
MIN_SEPARATION = 1e-6
PRESENTATION_TOL = 1e-9

CYCLIC = "cyclic"
BINARY_DIHEDRAL = "binary_dihedral"
BINARY_TETRAHEDRAL = "binary_tetrahedral"
BINARY_OCTAHEDRAL = "binary_octahedral"
BINARY_ICOSAHEDRAL = "binary_icosahedral"
FAMILIES = (CYCLIC, BINARY_DIHEDRAL, BINARY_TETRAHEDRAL, BINARY_OCTAHEDRAL, BINARY_ICOSAHEDRAL)

_SHORT = {
    BINARY_TETRAHEDRAL: "2T",
    BINARY_OCTAHEDRAL: "2O",
    BINARY_ICOSAHEDRAL: "2I",
}
_EXPONENTS = {BINARY_TETRAHEDRAL: 3, BINARY_OCTAHEDRAL: 4, BINARY_ICOSAHEDRAL: 5}


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == CYCLIC:
            if self.n is None or self.n < 1:
                raise ValueError("cyclic group needs n >= 1")
        elif self.family == BINARY_DIHEDRAL:
            if self.n is None or self.n < 2:
                raise ValueError("binary dihedral group needs n >= 2")
        elif self.n is not None:
            raise ValueError(f"{self.family} takes no parameter")

    @property
    def order(self) -> int:
        if self.family == CYCLIC:
            return self.n
        if self.family == BINARY_DIHEDRAL:
            return 4 * self.n
        return {BINARY_TETRAHEDRAL: 24, BINARY_OCTAHEDRAL: 48, BINARY_ICOSAHEDRAL: 120}[self.family]

    @property
    def name(self) -> str:
        if self.family == CYCLIC:
            return f"C{self.n}"
        if self.family == BINARY_DIHEDRAL:
            return f"BD{self.n}"
        return _SHORT[self.family]

    @property
    def ade_label(self) -> str:
        if self.family == CYCLIC:
            return f"A{self.n - 1}"
        if self.family == BINARY_DIHEDRAL:
            return f"D{self.n + 2}"
        return {BINARY_TETRAHEDRAL: "E6", BINARY_OCTAHEDRAL: "E7", BINARY_ICOSAHEDRAL: "E8"}[self.family]

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        """Accepts ADE labels (``A4``, ``D5``, ``E8``) and group names (``C5``, ``BD3``, ``2I``)."""
        t = text.strip().upper()
        named = {"E6": BINARY_TETRAHEDRAL, "2T": BINARY_TETRAHEDRAL,
                 "E7": BINARY_OCTAHEDRAL, "2O": BINARY_OCTAHEDRAL,
                 "E8": BINARY_ICOSAHEDRAL, "2I": BINARY_ICOSAHEDRAL}
        if t in named:
            return cls(named[t])
        m = re.fullmatch(r"(A|D|C|BD)(\d+)", t)
        if not m:
            raise ValueError(f"cannot parse group spec {text!r}")
        kind, k = m.group(1), int(m.group(2))
        if kind == "A":
            return cls(CYCLIC, k + 1)
        if kind == "C":
            return cls(CYCLIC, k)
        if kind == "D":
            return cls(BINARY_DIHEDRAL, k - 2)
        return cls(BINARY_DIHEDRAL, k)


@dataclass(frozen=True, eq=False)
class FiniteSubgroup:
    """A finite subgroup of SU(2) stored as an ``(order, 4)`` array.

    Membership and products are resolved by nearest-element lookup at half
    the minimum pairwise separation.
    """

    elements: np.ndarray
    identity_index: int
    separation: float
    spec: GroupSpec | None = None
    generators: tuple[UnitQuaternion, ...] = field(default=())

    def __post_init__(self):
        self.elements.setflags(write=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return (UnitQuaternion.from_array(e) for e in self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element(self, index: int) -> UnitQuaternion:
        return UnitQuaternion.from_array(self.elements[index])

    def nearest(self, q) -> tuple[int, float]:
        d = qdist(self.elements, np.asarray(q, dtype=float))
        i = int(np.argmin(d))
        return i, float(d[i])

    def lookup(self, q: UnitQuaternion) -> int:
        arr = q.as_array() if isinstance(q, UnitQuaternion) else np.asarray(q, dtype=float)
        i, d = self.nearest(arr)
        if d > self.tolerance:
            raise NotAMemberError(f"no group element within {self.tolerance:.3g} (nearest {d:.3g})")
        return i

    @property
    def tolerance(self) -> float:
        # a trivial group has no finite separation
        return self.separation / 2 if np.isfinite(self.separation) else 1e-6

    def contains(self, q: UnitQuaternion) -> bool:
        try:
            self.lookup(q)
        except NotAMemberError:
            return False
        return True

    def multiplication_table(self) -> np.ndarray:
        prods = qmul(self.elements[:, None, :], self.elements[None, :, :])
        d = qdist(prods[:, :, None, :], self.elements[None, None, :, :])
        idx = np.argmin(d, axis=-1)
        if np.take_along_axis(d, idx[..., None], axis=-1).max() > self.tolerance:
            raise ClosureError("product fell outside the group")
        return idx


def generators(spec: GroupSpec) -> tuple[UnitQuaternion, UnitQuaternion]:
    """Standard quaternion generators ``(A, B)`` for ``spec``; ``B = I`` for cyclic groups."""
    if spec.family == CYCLIC:
        t = 2 * np.pi / spec.n
        return UnitQuaternion.from_array([np.cos(t), 0.0, 0.0, np.sin(t)]), IDENTITY
    if spec.family == BINARY_DIHEDRAL:
        t = np.pi / spec.n
        # B = A^-1 exp(t k), so AB is the rotation of order 2n about k
        return UnitQuaternion(0.0, 0.0, 1.0, 0.0), UnitQuaternion.from_array([0.0, -np.sin(t), -np.cos(t), 0.0])
    a = UnitQuaternion.from_array([0.5, 0.5, 0.5, 0.5])
    if spec.family == BINARY_TETRAHEDRAL:
        return a, UnitQuaternion.from_array([0.5, 0.5, 0.5, -0.5])
    if spec.family == BINARY_OCTAHEDRAL:
        return a, UnitQuaternion.from_array([1.0, 1.0, 0.0, 0.0])
    phi = (1 + np.sqrt(5)) / 2
    return a, UnitQuaternion.from_array([phi / 2, 1 / (2 * phi), 0.5, 0.0])


def close_group(gens, cap: int = 1000, spec: GroupSpec | None = None) -> FiniteSubgroup:
    """Breadth-first closure of ``gens`` under right multiplication."""
    gen_arr = np.array([g.as_array() for g in gens]) if len(gens) else np.zeros((0, 4))
    found = [IDENTITY.as_array()]
    frontier = [IDENTITY.as_array()]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gen_arr:
                p = qmul(e, g)
                p /= np.linalg.norm(p)
                if np.linalg.norm(np.asarray(found) - p, axis=1).min() > DEDUP_TOL:
                    found.append(p)
                    nxt.append(p)
                    if len(found) > cap:
                        raise ClosureError(f"closure exceeded cap {cap}; generators are not of finite order")
        frontier = nxt
    elements = np.asarray(found)
    if len(elements) > 1:
        d = pairwise_qdist(elements, elements)
        np.fill_diagonal(d, np.inf)
        separation = float(d.min())
        if separation < MIN_SEPARATION:
            raise ClosureError(f"elements collide numerically (separation {separation:.3g})")
    else:
        separation = float("inf")
    return FiniteSubgroup(elements, 0, separation, spec, tuple(gens))


def close(a: UnitQuaternion, b: UnitQuaternion, cap: int = 1000, spec: GroupSpec | None = None) -> FiniteSubgroup:
    return close_group((a, b), cap=cap, spec=spec)


def relator_sides(spec: GroupSpec, a: UnitQuaternion, b: UnitQuaternion) -> list[UnitQuaternion]:
    """The words that the presentation sets equal to each other."""
    if spec.family == CYCLIC:
        return [a ** spec.n, IDENTITY]
    if spec.family == BINARY_DIHEDRAL:
        return [a ** 2, b ** 2, (a * b) ** spec.n]
    return [a ** 3, b ** _EXPONENTS[spec.family], (a * b) ** 2]


def presentation_defect(group: FiniteSubgroup) -> float:
    """Largest violation of the defining relations; includes the centrality of ``Z``."""
    spec = group.spec
    if spec is None or len(group.generators) != 2:
        raise ValueError("group was not built from a GroupSpec and its generator pair")
    a, b = group.generators
    sides = relator_sides(spec, a, b)
    z = sides[0]
    defect = max(su2_distance(z, s) for s in sides[1:])
    if spec.family != CYCLIC:
        defect = max(defect, su2_distance(z * z, IDENTITY))
        zc = z.as_array()
        left = qmul(zc, group.elements)
        right = qmul(group.elements, zc)
        defect = max(defect, float(qdist(left, right).max()))
    return defect


def verify_presentation(group: FiniteSubgroup, tol: float = PRESENTATION_TOL) -> float:
    defect = presentation_defect(group)
    if defect > tol:
        raise PresentationError(f"presentation defect {defect:.3g} exceeds {tol:.1g}")
    return defect


def central_element(group: FiniteSubgroup) -> UnitQuaternion:
    a, b = group.generators
    return relator_sides(group.spec, a, b)[0]


def build_group(spec: GroupSpec, cap: int = 1000) -> FiniteSubgroup:
    """Close the standard generators, then gate on order and presentation."""
    a, b = generators(spec)
    group = close(a, b, cap=cap, spec=spec)
    if group.order != spec.order:
        raise PresentationError(f"{spec.name}: closure has {group.order} elements, expected {spec.order}")
    verify_presentation(group)
    return group


def lookup(group: FiniteSubgroup, q: UnitQuaternion) -> int:
    return group.lookup(q)


def same_group(g: FiniteSubgroup, h: FiniteSubgroup) -> bool:
    """Set equality by nearest-element lookup in both directions."""
    if g.order != h.order:
        return False
    for src, dst in ((g, h), (h, g)):
        d = pairwise_qdist(src.elements, dst.elements).min(axis=1)
        if d.max() > min(g.tolerance, h.tolerance):
            return False
    return True

