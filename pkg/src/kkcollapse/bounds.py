"""Closed-form bounds relating the collapse rate to surface and group invariants.

All lengths are in units of the curvature -1 metric on the base and the unit
3-sphere metric on the fibre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from sympy import isprime

FORMULAS = {
    "theorem": "groupOrder * 4*pi*(genus - 1) / (2 * sqrt(n) * sys)",
    "corollary-a": "2*pi * groupOrder * (genus - 1) / sysMax",
    "corollary-b": "6*pi * groupOrder * (genus - 1) / (4*log(genus) + 3*C)",
    "buser-sarnak": "genus = (p^3 - p)*nu + 1; sysLower = (4/3)*log(genus) + C",
    "sys-upper": "2*log(4*genus - 2)",
    "riemann-hurwitz": "chi' = n*(2 - 2*genus); genus' = n*(genus - 1) + 1",
    "diameter": "sheets * area / sys",
    "area": "4*pi*(genus - 1)",
}


@dataclass(frozen=True)
class BoundInputs:
    group_order: int = 1
    genus: float = 2
    sys: float | None = None
    sys_max: float | None = None
    n: int = 1
    p: int | None = None
    nu: int | None = None
    C: float | None = None


def _positive(name: str, value: float) -> None:
    if value is None or not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


def _surface_genus(genus) -> int:
    if int(genus) != genus or genus < 2:
        raise ValueError(f"genus must be an integer >= 2, got {genus!r}")
    return int(genus)


def hyperbolic_area(genus: int) -> float:
    return 4 * math.pi * (_surface_genus(genus) - 1)


def theorem_bound(group_order: int, genus: int, sys: float, n: int = 1) -> float:
    """Upper bound on the GH distance between the collapsed bundle and the spherical quotient."""
    _positive("sys", sys)
    _positive("group_order", group_order)
    _positive("n", n)
    return group_order * hyperbolic_area(genus) / (2 * math.sqrt(n) * sys)


def distortion_bound(group_order: int, genus: int, sys: float, n: int = 1) -> float:
    """Bound on the distortion of the submersion correspondence: twice :func:`theorem_bound`."""
    return 2 * theorem_bound(group_order, genus, sys, n)


def corollary_a(group_order: int, genus: int, sys_max: float) -> float:
    _positive("sys_max", sys_max)
    return 2 * math.pi * group_order * (_surface_genus(genus) - 1) / sys_max


def corollary_b(group_order: int, genus: float, C: float) -> float:
    """Bound along arithmetic surfaces; ``genus`` may be real-valued for exploration."""
    _positive("C", C)
    if genus < 2:
        raise ValueError("genus must be >= 2")
    denom = 4 * math.log(genus) + 3 * C
    return 6 * math.pi * group_order * (genus - 1) / denom


def buser_sarnak(p: int, nu: int, C: float) -> tuple[int, float]:
    """Genus of the arithmetic surface and its systole lower bound for constant ``C``."""
    if not (isinstance(p, int) and p > 2 and isprime(p)):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    genus = (p ** 3 - p) * nu + 1
    return genus, 4 / 3 * math.log(genus) + C


def sys_upper(genus: int) -> float:
    return 2 * math.log(4 * _surface_genus(genus) - 2)


def riemann_hurwitz(n: int, genus: int) -> tuple[int, int]:
    """Euler characteristic and genus of an unbranched ``n``-sheeted cover."""
    if n < 1 or genus < 1:
        raise ValueError("n and genus must be >= 1")
    return n * (2 - 2 * genus), n * (genus - 1) + 1


def diameter_bound(area: float, sys: float, sheets: int = 1) -> float:
    _positive("area", area)
    _positive("sys", sys)
    if sheets < 1:
        raise ValueError("sheets must be >= 1")
    return sheets * area / sys
