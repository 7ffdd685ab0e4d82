"""Quotient metrics on SU(2)/Gamma and Gromov-Hausdorff estimates for finite spaces."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ade import FiniteSubgroup
from .quat import UnitQuaternion, qdist, qmul

METRIC_TOL = 1e-9
EXACT_MAX_SIZE = 4


def quotient_distance(q1: UnitQuaternion, q2: UnitQuaternion, group: FiniteSubgroup) -> float:
    """``min_g d(q1, q2 g)``: the distance between cosets ``q1 G`` and ``q2 G``."""
    return float(quotient_distance_matrix(q1.as_array()[None], q2.as_array()[None], group)[0, 0])


def quotient_distance_matrix(p, q, group: FiniteSubgroup, side: str = "right") -> np.ndarray:
    """Pairwise coset distances between two quaternion stacks.

    ``side="right"`` compares cosets ``pG`` and ``qG``; ``side="left"`` compares
    ``Gp`` and ``Gq``. The two agree under ``q -> q^-1``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if side == "right":
        orbit = qmul(q[:, None, :], group.elements[None, :, :])
    elif side == "left":
        orbit = qmul(group.elements[None, :, :], q[:, None, :])
    else:
        raise ValueError("side must be 'left' or 'right'")
    # |Gamma| x len(p) x len(q) dot products; max over the orbit
    dots = np.einsum("ik,jgk->ijg", p, orbit)
    best = dots.argmax(axis=-1)
    top = np.take_along_axis(dots, best[..., None], axis=-1)[..., 0]
    out = np.arccos(np.clip(top, -1.0, 1.0))
    # recompute near-coincident pairs with the cancellation-free formula
    i, j = np.nonzero(top > 1 - 1e-4)
    out[i, j] = qdist(p[i], orbit[j, best[i, j]])
    return out


def quotient_distance_pairs(p, q, group: FiniteSubgroup) -> np.ndarray:
    """Row-wise ``min_g d(p_k, q_k g)`` for two equally long quaternion stacks."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    orbit = qmul(q[:, None, :], group.elements[None, :, :])
    best = np.einsum("nk,ngk->ng", p, orbit).argmax(axis=1)
    return qdist(p, orbit[np.arange(len(p)), best])


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    dist: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.abs(np.diag(d)).max(initial=0.0) > METRIC_TOL:
            raise ValueError("nonzero diagonal")
        if np.abs(d - d.T).max(initial=0.0) > METRIC_TOL:
            raise ValueError("distance matrix is not symmetric")
        if (d < -METRIC_TOL).any():
            raise ValueError("negative distance")
        if len(d) and (d[:, None, :] > d[:, :, None] + d[None, :, :] + METRIC_TOL).any():
            raise ValueError("triangle inequality fails")
        object.__setattr__(self, "dist", d)

    @property
    def size(self) -> int:
        return len(self.dist)

    @property
    def diameter(self) -> float:
        return float(self.dist.max(initial=0.0))


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple[tuple[int, int], ...]

    def check(self, x: FiniteMetricSpace, y: FiniteMetricSpace) -> Correspondence:
        xs = {i for i, _ in self.pairs}
        ys = {j for _, j in self.pairs}
        if xs != set(range(x.size)) or ys != set(range(y.size)):
            raise ValueError("correspondence projections are not surjective")
        return self

    @classmethod
    def identity(cls, size: int) -> Correspondence:
        return cls(tuple((i, i) for i in range(size)))

    @classmethod
    def full(cls, nx: int, ny: int) -> Correspondence:
        return cls(tuple(itertools.product(range(nx), range(ny))))


def distortion(corr: Correspondence, x: FiniteMetricSpace, y: FiniteMetricSpace) -> float:
    corr.check(x, y)
    ix = np.array([i for i, _ in corr.pairs])
    iy = np.array([j for _, j in corr.pairs])
    return float(np.abs(x.dist[np.ix_(ix, ix)] - y.dist[np.ix_(iy, iy)]).max())


def gh_upper_bound(corr: Correspondence, x: FiniteMetricSpace, y: FiniteMetricSpace) -> float:
    return distortion(corr, x, y) / 2


def gh_exact_small(x: FiniteMetricSpace, y: FiniteMetricSpace) -> float:
    """Half the minimum distortion over every correspondence, by exhaustion."""
    if max(x.size, y.size) > EXACT_MAX_SIZE:
        raise ValueError(f"exhaustive search is limited to {EXACT_MAX_SIZE}-point spaces")
    if x.size == 0 or y.size == 0:
        raise ValueError("spaces must be nonempty")
    cells = list(itertools.product(range(x.size), range(y.size)))
    ci = np.array([c[0] for c in cells])
    cj = np.array([c[1] for c in cells])
    cost = np.abs(x.dist[np.ix_(ci, ci)] - y.dist[np.ix_(cj, cj)])

    masks = np.arange(1, 1 << len(cells), dtype=np.int64)
    member = ((masks[:, None] >> np.arange(len(cells))) & 1).astype(bool)
    cover_x = np.stack([member[:, ci == i].any(axis=1) for i in range(x.size)], axis=1).all(axis=1)
    cover_y = np.stack([member[:, cj == j].any(axis=1) for j in range(y.size)], axis=1).all(axis=1)
    member = member[cover_x & cover_y]

    dis = np.zeros(len(member))
    for a in range(len(cells)):
        for b in range(a + 1, len(cells)):
            if cost[a, b] > 0:
                both = member[:, a] & member[:, b]
                dis = np.where(both, np.maximum(dis, cost[a, b]), dis)
    return float(dis.min()) / 2


def rate_fit(samples, floor=0.0) -> float:
    """Least-squares slope of ``log(dis)`` against ``log(n)`` over samples above ``floor``.

    ``floor`` is a scalar or one value per sample.
    """
    samples = [(float(n), float(d)) for n, d in samples]
    floors = np.broadcast_to(np.asarray(floor, dtype=float), (len(samples),))
    pts = [(n, d) for (n, d), f in zip(samples, floors) if d > f and d > 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 samples above the floor, got {len(pts)}")
    n, d = np.array(pts).T
    slope, _ = np.polyfit(np.log(n), np.log(d), 1)
    return float(slope)
