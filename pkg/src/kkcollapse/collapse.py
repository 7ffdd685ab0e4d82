"""Graph discretisation of a flat SU(2)-bundle with the metrics ``h/n + fibre``.

The bundle is ``P = H^2 x_rho SU(2)`` with ``[x, q] ~ [g x, rho(g) q]``. A node
is a pair (base sample in the fundamental domain, fibre-net point). Moving
horizontally across a side glued by ``g`` keeps the lift's fibre coordinate,
which in domain coordinates becomes ``rho(g)^-1 q``.

The submersion to the spherical quotient is ``Psi[x, q] = q^-1 G`` where
``G`` is the holonomy group. Two fibre points have the same image exactly
when they lie in one left orbit ``G q``, so fibre nets are built as unions of
such orbits.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .ade import FiniteSubgroup, GroupSpec, build_group
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bounds import distortion_bound
from .exceptions import DisconnectedGraphError
from .gh import quotient_distance_matrix, rate_fit
from .hyperbolic import DomainSample, FundamentalPolygon, base_edges, regular_polygon, sample_domain, systole_estimate
from .quat import UnitQuaternion, pairwise_qdist, qconj, qdist, qmul, random_unit_quaternions
from .surface_rep import Representation, build_ade_rep, conjugate, evaluate, holonomy_image

VERTICAL, HORIZONTAL, CROSSING, MIXED = 0, 1, 2, 3
ORBIT_TOL = 1e-6
# default edge radius as a multiple of the covering radius; 2 is the connectivity threshold
EDGE_RADIUS_FACTOR = 2.4


@dataclass(frozen=True, eq=False)
class FiberNet:
    points: np.ndarray
    covering_radius: float
    includes_group: bool = False
    orbit_size: int = 1

    def __len__(self) -> int:
        return len(self.points)

    def translated(self, q: UnitQuaternion) -> FiberNet:
        """Left translate by ``q``; distances and the covering radius are unchanged."""
        return FiberNet(qmul(q.as_array(), self.points), self.covering_radius, self.includes_group, self.orbit_size)


def _distance_to_net(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    best = np.full(len(x), -1.0)
    for start in range(0, len(points), 512):
        best = np.maximum(best, (x @ points[start:start + 512].T).max(axis=1))
    return np.arccos(np.clip(best, -1, 1))


def _covering_radius(points: np.ndarray, rng: np.random.Generator, probes: int, refine: int = 32) -> float:
    """Largest probe distance to the net, polished by local ascent from the worst probes."""
    probe = random_unit_quaternions(rng, probes)
    d = _distance_to_net(probe, points)
    if refine <= 0:
        return float(d.max())
    top = np.argsort(d)[-refine:]
    x, dx = probe[top], d[top]
    step = 0.1
    for _ in range(60):
        cand = x + step * rng.normal(size=x.shape)
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        dc = _distance_to_net(cand, points)
        better = dc > dx
        x[better], dx[better] = cand[better], dc[better]
        step *= 0.93
    return float(max(d.max(), dx.max()))


def build_fiber_net(count: int, seed: int = 0, group: FiniteSubgroup | None = None,
                    probe_factor: int = 10) -> FiberNet:
    """Quasi-uniform points on SU(2) by farthest-point selection.

    With ``group`` the net is a union of ``count // |G|`` full orbits ``G s``,
    representatives chosen far apart in the quotient, starting with ``s = I``.
    """
    rng = np.random.default_rng(seed)
    if group is None:
        pool = random_unit_quaternions(rng, max(4000, 20 * count))
        chosen = [np.array([1.0, 0.0, 0.0, 0.0])]
        mind = qdist(pool, chosen[0])
        for _ in range(count - 1):
            i = int(np.argmax(mind))
            chosen.append(pool[i])
            mind = np.minimum(mind, qdist(pool, pool[i]))
        points = np.array(chosen)
        orbit = 1
    else:
        if count < group.order:
            raise ValueError(f"count {count} is smaller than the group order {group.order}")
        k = count // group.order
        pool = random_unit_quaternions(rng, max(2000, 50 * k))
        reps = [np.array([1.0, 0.0, 0.0, 0.0])]
        mind = quotient_distance_matrix(pool, np.array(reps), group, side="left")[:, 0]
        for _ in range(k - 1):
            i = int(np.argmax(mind))
            reps.append(pool[i])
            mind = np.minimum(mind, quotient_distance_matrix(pool, pool[i:i + 1], group, side="left")[:, 0])
        points = qmul(group.elements[None, :, :], np.array(reps)[:, None, :]).reshape(-1, 4)
        orbit = group.order
    probes = max(probe_factor * len(points), 20000)
    cov = _covering_radius(points, np.random.default_rng([seed, 1]), probes)
    return FiberNet(points, cov, group is not None, orbit)


def orbit_labels(points: np.ndarray, group: FiniteSubgroup, tol: float = ORBIT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Label each point by its left orbit ``G q``; returns (labels, representative indices)."""
    labels = np.full(len(points), -1)
    reps = []
    for j in range(len(points)):
        if labels[j] >= 0:
            continue
        orbit = qmul(group.elements, points[j])
        d = pairwise_qdist(points, orbit).min(axis=1)
        members = (d <= tol) & (labels < 0)
        labels[members] = len(reps)
        reps.append(j)
    return labels, np.array(reps)


@dataclass(frozen=True)
class CollapseConfig:
    genus: int = 2
    group: str = "2T"
    n_values: tuple[int, ...] = (1, 4, 16, 64)
    base_count: int = 400
    fiber_count: int | None = None
    base_edge_radius: float | None = None
    fiber_edge_radius: float | None = None
    pair_budget: int = 2000
    seed: int = 0
    n_sources: int = 40
    mixed_edges: bool = False
    max_word_len: int = 4

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        nv = self.n_values
        if not nv or any(v < 1 for v in nv) or any(b <= a for a, b in zip(nv, nv[1:])):
            raise ValueError("n_values must be strictly increasing positive integers")
        for name in ("base_count", "pair_budget", "n_sources"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if any(r is not None and r <= 0 for r in (self.base_edge_radius, self.fiber_edge_radius)):
            raise ValueError("edge radii must be positive")
        if self.genus < 2:
            raise ValueError("genus must be >= 2")
        GroupSpec.parse(self.group)

        if self.fiber_count is not None and self.fiber_count < self.group_spec.order:
            raise ValueError("fiber_count must be at least the group order")

    @property
    def group_spec(self) -> GroupSpec:
        return GroupSpec.parse(self.group)

    @property
    def resolved_fiber_count(self) -> int:
        """``fiber_count``, defaulting to ten orbits of the group capped at 1500 points."""
        if self.fiber_count is not None:
            return self.fiber_count
        order = self.group_spec.order
        return max(order, min(10, 1500 // order) * order)

    def quick(self) -> CollapseConfig:
        """About 10x fewer nodes; explicit edge radii are dropped so they rescale with the nets."""
        order = self.group_spec.order
        orbits = max(1, round(0.4 * self.resolved_fiber_count / order))
        return replace(self, base_count=max(25, self.base_count // 4), fiber_count=orbits * order,
                       base_edge_radius=None, fiber_edge_radius=None)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CollapseConfig:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)


class NodeGraphEdges(NamedTuple):
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    kind: np.ndarray
    twist: np.ndarray  # index into polygon crossings, -1 for none


@dataclass(frozen=True, eq=False)
class TotalSpaceGraph:
    """Weighted graph on ``base samples x fibre net``; node ``(i, j)`` has index ``i * len(net) + j``."""

    base: DomainSample
    fiber_net: FiberNet
    n: int
    edges: NodeGraphEdges
    adjacency: object
    orbit_of: np.ndarray
    orbit_distance: np.ndarray
    discretization_slack: float
    group: FiniteSubgroup

    @property
    def n_nodes(self) -> int:
        return len(self.base.points) * len(self.fiber_net)

    @property
    def n_edges(self) -> int:
        return len(self.edges.weight)

    def node(self, base_index: int, fiber_index: int) -> int:
        return base_index * len(self.fiber_net) + fiber_index

    def split(self, node):
        return np.divmod(node, len(self.fiber_net))


@dataclass(eq=False)
class CollapseGeometry:
    """Everything about the discretised bundle that does not depend on ``n``."""

    polygon: FundamentalPolygon
    representation: Representation
    group: FiniteSubgroup
    base: DomainSample
    fiber_net: FiberNet
    base_edge_radius: float | None = None
    fiber_edge_radius: float | None = None
    mixed_edges: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.representation.genus != self.polygon.genus:
            raise ValueError("representation genus does not match the polygon genus")
        if self.base_edge_radius is None:
            self.base_edge_radius = EDGE_RADIUS_FACTOR * self.base.covering_radius
        if self.fiber_edge_radius is None:
            self.fiber_edge_radius = EDGE_RADIUS_FACTOR * self.fiber_net.covering_radius
        pts = self.fiber_net.points
        self.base_pairs = base_edges(self.polygon, self.base.points, self.base_edge_radius)
        d = pairwise_qdist(pts, pts)
        fi, fj = np.nonzero(np.triu(d <= self.fiber_edge_radius, k=1))
        self.fiber_pairs = (fi, fj, d[fi, fj])
        self.fiber_dist = d
        # fibre permutation and snapping error for each side crossing
        self.twists = []
        for c in self.polygon.crossings:
            g = evaluate(self.representation, self.polygon.side_words[c.label])
            g = g if c.exponent == 1 else g.inverse()
            moved = qmul(g.inverse().as_array(), pts)
            dd = pairwise_qdist(moved, pts)
            sigma = dd.argmin(axis=1)
            self.twists.append((sigma, dd[np.arange(len(pts)), sigma]))
        self.orbit_of, reps = orbit_labels(pts, self.group)
        inv = qconj(pts[reps])
        self.orbit_distance = quotient_distance_matrix(inv, inv, self.group, side="right")

    def graph(self, n: int) -> TotalSpaceGraph:
        if n < 1:
            raise ValueError("n must be a positive integer")
        m = len(self.fiber_net)
        nb = len(self.base.points)
        scale = 1 / math.sqrt(n)
        src, dst, w, kind, twist = [], [], [], [], []

        fi, fj, fd = self.fiber_pairs
        offs = (np.arange(nb) * m)[:, None]
        src.append((offs + fi).ravel()), dst.append((offs + fj).ravel())
        w.append(np.tile(fd, nb)), kind.append(np.full(nb * len(fi), VERTICAL)), twist.append(np.full(nb * len(fi), -1))

        f = np.arange(m)
        e = self.base_pairs
        for bi, bj, length, k in zip(e.i, e.j, e.length, e.crossing):
            h = length * scale
            if k < 0:
                sigma, snap, kd = f, np.zeros(m), HORIZONTAL
            else:
                sigma, snap = self.twists[k]
                kd = CROSSING
            src.append(bi * m + f), dst.append(bj * m + sigma), w.append(h + snap)
            kind.append(np.full(m, kd)), twist.append(np.full(m, k))
            if self.mixed_edges:
                for a, b in ((fi, fj), (fj, fi)):
                    src.append(bi * m + a), dst.append(bj * m + sigma[b])
                    w.append(np.sqrt(h * h + self.fiber_dist[a, b] ** 2) + snap[b])
                    kind.append(np.full(len(a), MIXED)), twist.append(np.full(len(a), k))

        src, dst, w, kind, twist = (np.concatenate(x) for x in (src, dst, w, kind, twist))
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        keep = lo != hi
        lo, hi, w, kind, twist = lo[keep], hi[keep], w[keep], kind[keep], twist[keep]
        order = np.lexsort((w, hi, lo))
        lo, hi, w, kind, twist = lo[order], hi[order], w[order], kind[order], twist[order]
        first = np.ones(len(lo), dtype=bool)
        first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        edges = NodeGraphEdges(lo[first], hi[first], w[first], kind[first], twist[first])
        if (edges.weight <= 0).any():
            raise ValueError("nonpositive edge weight")

        size = nb * m
        adj = coo_matrix((edges.weight, (edges.src, edges.dst)), shape=(size, size)).tocsr()
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp > 1:
            raise DisconnectedGraphError(f"total-space graph has {ncomp} components; increase the edge radii")
        slack = 2 * self.base.covering_radius * scale + 2 * self.fiber_net.covering_radius
        return TotalSpaceGraph(self.base, self.fiber_net, n, edges, adj, self.orbit_of,
                               self.orbit_distance, slack, self.group)


def prepare_geometry(config: CollapseConfig, conjugator: UnitQuaternion | None = None) -> CollapseGeometry:
    """Build base samples, group, representation and fibre net from a config.

    With ``conjugator`` the representation is replaced by ``q rho q^-1`` and the
    fibre net by its left translate ``q * net`` (an isomorphic flat bundle).
    """
    poly = regular_polygon(config.genus)
    source = build_group(config.group_spec)
    rep = build_ade_rep(config.genus, source).check()
    base = sample_domain(poly, config.base_count, seed=config.seed)
    net = build_fiber_net(config.resolved_fiber_count, seed=config.seed, group=source)
    if conjugator is not None:
        rep = conjugate(rep, conjugator)
        net = net.translated(conjugator)
    group = holonomy_image(rep)
    return CollapseGeometry(poly, rep, group, base, net, config.base_edge_radius,
                            config.fiber_edge_radius, config.mixed_edges)


def build_graph(config: CollapseConfig, poly: FundamentalPolygon, rep: Representation, n: int,
                group: FiniteSubgroup | None = None) -> TotalSpaceGraph:
    if rep.genus != poly.genus:
        raise ValueError("representation genus does not match the polygon genus")
    group = group or holonomy_image(rep)
    base = sample_domain(poly, config.base_count, seed=config.seed)
    net = build_fiber_net(config.resolved_fiber_count, seed=config.seed, group=group)
    geo = CollapseGeometry(poly, rep, group, base, net, config.base_edge_radius,
                           config.fiber_edge_radius, config.mixed_edges)
    return geo.graph(n)


def shortest_paths(graph: TotalSpaceGraph, sources) -> np.ndarray:
    """Exact graph distances from each source to every node, shape ``(len(sources), n_nodes)``."""
    d = dijkstra(graph.adjacency, directed=False, indices=np.asarray(sources, dtype=int))
    if not np.isfinite(d).all():
        raise DisconnectedGraphError("unreachable node")
    return d


def psi(node, graph: TotalSpaceGraph, group: FiniteSubgroup | None = None):
    """Index of the coset ``q^-1 G`` for node ``(x, q)``; orbit 0 contains the identity."""
    return graph.orbit_of[np.asarray(node) % len(graph.fiber_net)]


@dataclass(frozen=True)
class DistortionResult:
    dis: float
    submersion_gap: float
    pairs: int
    sources: int


def sample_pairs(n_nodes: int, pair_budget: int, n_sources: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded node pairs drawn as ``n_sources`` random sources with random partners each."""
    rng = np.random.default_rng(seed)
    s = min(n_sources, pair_budget, n_nodes)
    sources = np.sort(rng.choice(n_nodes, size=s, replace=False))
    per = -(-pair_budget // s)
    targets = rng.integers(0, n_nodes, size=(s, per))
    row = np.repeat(np.arange(s), per)[:pair_budget]
    return sources, np.stack([row, targets.ravel()[:pair_budget]], axis=1)


def measure_distortion(graph: TotalSpaceGraph, group: FiniteSubgroup | None = None, pair_budget: int = 2000,
                       seed: int = 0, n_sources: int = 40) -> DistortionResult:
    """Sup of ``|d_graph(a, b) - d_quotient(Psi a, Psi b)|`` over seeded pairs.

    ``submersion_gap`` is the smallest ``d_graph - d_quotient`` seen; the
    submersion inequality says it should not fall below ``-slack``.
    """
    if pair_budget < 1:
        raise ValueError("pair_budget must be >= 1")
    sources, pairs = sample_pairs(graph.n_nodes, pair_budget, n_sources, seed)
    d = shortest_paths(graph, sources)
    a = sources[pairs[:, 0]]
    b = pairs[:, 1]
    dg = d[pairs[:, 0], b]
    dq = graph.orbit_distance[psi(a, graph), psi(b, graph)]
    gap = dg - dq
    return DistortionResult(float(np.abs(gap).max()), float(gap.min()), len(pairs), len(sources))


class CollapseRow(NamedTuple):
    n: int
    dis: float
    bound: float
    slack: float
    nodes: int
    edges: int
    seconds: float
    submersion_gap: float


def run_collapse_experiment(config: CollapseConfig, conjugator: UnitQuaternion | None = None,
                            geometry: CollapseGeometry | None = None) -> list[CollapseRow]:
    """Measure the distortion of the submersion correspondence for each ``n``."""
    geo = geometry or prepare_geometry(config, conjugator)
    sys = systole_estimate(geo.polygon, config.max_word_len)
    rows = []
    for n in config.n_values:
        t0 = time.perf_counter()
        graph = geo.graph(n)
        res = measure_distortion(graph, geo.group, config.pair_budget, config.seed, config.n_sources)
        seconds = time.perf_counter() - t0
        bound = distortion_bound(geo.group.order, config.genus, sys, n)
        rows.append(CollapseRow(n, res.dis, bound, graph.discretization_slack, graph.n_nodes,
                                graph.n_edges, seconds, res.submersion_gap))
    return rows


def collapse_checks(rows, slope_max: float = -0.35) -> dict:
    """Pass/fail for bound compliance, monotone collapse, rate and the submersion inequality.

    The rate is fitted on rows whose distortion exceeds their own slack.
    """
    bound_ok = all(r.dis <= r.bound + r.slack for r in rows)
    mono_ok = all(b.dis <= a.dis + b.slack for a, b in zip(rows, rows[1:]))
    sub_ok = all(r.submersion_gap >= -r.slack for r in rows)
    usable = sum(r.dis > r.slack for r in rows)
    slope = rate_fit([(r.n, r.dis) for r in rows], [r.slack for r in rows]) if usable >= 3 else float("nan")
    return {
        "bound": bound_ok,
        "monotone": mono_ok,
        "submersion": sub_ok,
        "slope": slope,
        "slope_max": slope_max,
        "rate": bool(slope <= slope_max),
        "pre_floor_points": usable,
    }


class CollapseExperiment(BaseEstimator):
    """Estimator-style wrapper: ``fit`` builds the discretised bundle and measures every ``n``.

    ``transform`` maps an array of ``n`` values to rows ``(dis, bound, slack)``
    on the fitted geometry.
    """

    def __init__(self, genus=2, group="2T", n_values=(1, 4, 16, 64), base_count=400, fiber_count=None,
                 base_edge_radius=None, fiber_edge_radius=None, pair_budget=2000, seed=0, n_sources=40,
                 mixed_edges=False, max_word_len=4, conjugator=None):
        self.genus = genus
        self.group = group
        self.n_values = n_values
        self.base_count = base_count
        self.fiber_count = fiber_count
        self.base_edge_radius = base_edge_radius
        self.fiber_edge_radius = fiber_edge_radius
        self.pair_budget = pair_budget
        self.seed = seed
        self.n_sources = n_sources
        self.mixed_edges = mixed_edges
        self.max_word_len = max_word_len
        self.conjugator = conjugator

    @classmethod
    def from_config(cls, config: CollapseConfig, **kwargs) -> CollapseExperiment:
        return cls(**config.to_dict(), **kwargs)

    def to_config(self) -> CollapseConfig:
        params = self.get_params()
        params.pop("conjugator")
        return CollapseConfig(**params)

    def fit(self, X=None, y=None):
        config = self.to_config()
        conj = None if self.conjugator is None else UnitQuaternion.from_array(self.conjugator)
        self.geometry_ = prepare_geometry(config, conj)
        self.results_ = run_collapse_experiment(config, geometry=self.geometry_)
        self.systole_ = systole_estimate(self.geometry_.polygon, config.max_word_len)
        self.checks_ = collapse_checks(self.results_)
        self.rate_ = self.checks_["slope"]
        return self

    def transform(self, X):
        check_is_fitted(self, "geometry_")
        ns = np.asarray(X).reshape(-1)
        out = np.empty((len(ns), 3))
        for row, n in enumerate(ns):
            if n < 1 or int(n) != n:
                raise ValueError(f"n must be a positive integer, got {n!r}")
            graph = self.geometry_.graph(int(n))
            res = measure_distortion(graph, self.geometry_.group, self.pair_budget, self.seed, self.n_sources)
            bound = distortion_bound(self.geometry_.group.order, self.genus, self.systole_, int(n))
            out[row] = res.dis, bound, graph.discretization_slack
        return out
