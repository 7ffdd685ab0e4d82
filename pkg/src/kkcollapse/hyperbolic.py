"""Poincare-disk geometry and the regular 4g-gon fundamental domain.

Points are complex numbers (or complex arrays) with ``|z| < 1``. Isometries
are SU(1,1) matrices ``[[a, b], [conj(b), conj(a)]]`` acting by Moebius
transformations.

The genus-g domain is the regular 4g-gon centred at 0 with interior angles
``2*pi/(4g)`` whose opposite sides are glued by hyperbolic translations
(the Bolza pattern at g = 2). With ``x_k`` the translation gluing side
``k-1+2g`` onto side ``k-1`` (inverted for even k) the gluings satisfy

    x_1 x_2 ... x_2g x_1^-1 x_2^-1 ... x_2g^-1 = 1.

The standard generators are obtained by the substitution ``a_1 = x_1``,
``b_1 = x_2``, ``u = x_2 x_1`` and, for i >= 2,
``a_i = u x_(2i-1)``, ``b_i = x_2i u^-1``, ``u <- x_2i x_(2i-1) u``,
which turns the relation above into ``prod_i [a_i, b_i] = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .exceptions import ConvergenceError, DisconnectedGraphError
from .words import Word, surface_relator

ISOMETRY_TOL = 1e-10
BOUNDARY_TOL = 1e-12
MAX_WORD_LEN = 8


def hyp_distance(p, q):
    """Hyperbolic distance in the disk (curvature -1), broadcasting."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    ratio = np.abs(p - q) / np.abs(1 - np.conj(p) * q)
    out = 2 * np.arctanh(np.minimum(ratio, 1.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MobiusIsometry:
    a: complex
    b: complex

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if abs(det - 1.0) > ISOMETRY_TOL * max(1.0, abs(self.a) ** 2):
            raise ValueError(f"|a|^2 - |b|^2 = {det!r}, not 1")

    @classmethod
    def identity(cls) -> MobiusIsometry:
        return cls(1 + 0j, 0j)

    @classmethod
    def rotation(cls, theta: float) -> MobiusIsometry:
        return cls(complex(np.exp(0.5j * theta)), 0j)

    @classmethod
    def translation(cls, theta: float, length: float) -> MobiusIsometry:
        """Translation by ``length`` along the diameter at angle ``theta``."""
        return cls(complex(np.cosh(length / 2)), complex(np.sinh(length / 2) * np.exp(1j * theta)))

    @classmethod
    def from_matrix(cls, m) -> MobiusIsometry:
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]))

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), np.conj(self.a)]])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.a * z + self.b) / (np.conj(self.b) * z + np.conj(self.a))
        return complex(out) if out.ndim == 0 else out

    def __matmul__(self, other: MobiusIsometry) -> MobiusIsometry:
        return MobiusIsometry.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> MobiusIsometry:
        return MobiusIsometry(np.conj(self.a), -self.b)

    @property
    def trace(self) -> float:
        return 2 * self.a.real

    def is_hyperbolic(self) -> bool:
        return abs(self.trace) > 2

    def translation_length(self) -> float:
        t = abs(self.trace)
        if t <= 2:
            return 0.0
        return 2 * float(np.arccosh(t / 2))


class SidePairing(NamedTuple):
    source: int
    target: int
    isometry: MobiusIsometry
    label: str


class Crossing(NamedTuple):
    """Isometry carrying the domain onto its neighbour across one side."""

    isometry: MobiusIsometry
    label: str
    exponent: int


@dataclass(frozen=True, eq=False)
class FundamentalPolygon:
    genus: int
    vertices: np.ndarray
    pairings: tuple[SidePairing, ...]
    side_centers: np.ndarray
    side_radii: np.ndarray
    crossings: tuple[Crossing, ...]
    label_words: dict[str, Word] = field(default_factory=dict)
    side_words: dict[str, Word] = field(default_factory=dict)

    @property
    def n_sides(self) -> int:
        return len(self.vertices)

    @property
    def circumradius(self) -> float:
        return hyp_distance(0j, self.vertices[0])

    @property
    def inradius(self) -> float:
        m = self.side_centers[0] / abs(self.side_centers[0]) * (abs(self.side_centers[0]) - self.side_radii[0])
        return hyp_distance(0j, m)

    def generator(self, label: str) -> MobiusIsometry:
        for p in self.pairings:
            if p.label == label:
                return p.isometry
        raise KeyError(label)

    def word_isometry(self, word: Word) -> MobiusIsometry:
        """Product of side-pairing generators in written order."""
        m = np.eye(2, dtype=complex)
        for label, e in word:
            g = self.generator(label)
            m = m @ (g if e == 1 else g.inverse()).matrix()
        return MobiusIsometry.from_matrix(m)

    def contains(self, z, tol: float = BOUNDARY_TOL):
        """Inside-or-on test against every side's geodesic arc."""
        z = np.asarray(z, dtype=complex)
        d = np.abs(z[..., None] - self.side_centers) - self.side_radii
        inside = np.all(d >= -tol, axis=-1) & (np.abs(z) < 1)
        return bool(inside) if inside.ndim == 0 else inside

    def interior_angles(self) -> np.ndarray:
        n = self.n_sides
        angles = np.empty(n)
        for k in range(n):
            v = self.vertices[k]
            dirs = []
            for side, other in ((k - 1, self.vertices[k - 1]), (k, self.vertices[(k + 1) % n])):
                radial = v - self.side_centers[side]
                t = 1j * radial
                if (np.conj(t) * (other - v)).real < 0:
                    t = -t
                dirs.append(t / abs(t))
            angles[k] = np.arccos(np.clip((np.conj(dirs[0]) * dirs[1]).real, -1, 1))
        return angles

    def area(self) -> float:
        """Gauss-Bonnet: ``(N - 2) pi`` minus the measured angle sum."""
        return float((self.n_sides - 2) * np.pi - self.interior_angles().sum())

    def relator_isometry(self) -> MobiusIsometry:
        w = surface_relator(self.genus).substitute(self.label_words)
        return self.word_isometry(w)

    def relator_defect(self) -> float:
        """Distance of the surface relator from +-identity in SU(1,1)."""
        m = self.relator_isometry().matrix()
        eye = np.eye(2)
        return float(min(np.abs(m - eye).max(), np.abs(m + eye).max()))

    def pairing_defect(self) -> float:
        """Largest distance from the image of a source side to the target side's arc."""
        t = np.linspace(0, 1, 9)
        worst = 0.0
        for p in self.pairings:
            pts = self._side_points(p.source, t)
            img = p.isometry(pts)
            on_arc = np.abs(np.abs(img - self.side_centers[p.target]) - self.side_radii[p.target])
            ends = img[[0, -1]]
            want = self._side_points(p.target, np.array([0.0, 1.0]))
            end_gap = np.abs(ends[:, None] - want[None, :]).min(axis=1).max()
            worst = max(worst, float(on_arc.max()), float(end_gap))
        return worst

    def _side_points(self, k: int, t) -> np.ndarray:
        """Points along side ``k`` parametrised by hyperbolic arclength fraction."""
        v0 = self.vertices[k]
        v1 = self.vertices[(k + 1) % self.n_sides]
        # move v0 to the origin, walk along a diameter, move back
        to0 = MobiusIsometry(1 / np.sqrt(1 - abs(v0) ** 2) + 0j, -v0 / np.sqrt(1 - abs(v0) ** 2))
        w1 = to0(v1)
        length = hyp_distance(0j, w1)
        r = np.tanh(np.asarray(t) * length / 2)
        return to0.inverse()(r * w1 / abs(w1))


def regular_polygon(genus: int) -> FundamentalPolygon:
    """Regular 4g-gon with opposite sides paired, centred at the origin."""
    if genus < 2:
        raise ValueError("genus must be at least 2")
    n = 4 * genus
    # right triangle (centre, edge midpoint, vertex) has acute angles pi/n and pi/n
    circum = float(np.arccosh(1 / np.tan(np.pi / n) ** 2))
    inrad = float(np.arccosh(1 / np.tan(np.pi / n)))
    rv = np.tanh(circum / 2)
    vertices = rv * np.exp(2j * np.pi * np.arange(n) / n)
    mids = (2 * np.arange(n) + 1) * np.pi / n
    m = np.tanh(inrad / 2)
    c = (1 + m * m) / (2 * m)
    centers = c * np.exp(1j * mids)
    radii = np.full(n, c - m)

    half = 2 * genus
    pairings = []
    crossings: list[Crossing | None] = [None] * n
    for j in range(half):
        t = MobiusIsometry.translation(mids[j], 2 * inrad)
        label = f"x{j + 1}"
        if j % 2 == 0:
            pairings.append(SidePairing(j + half, j, t, label))
            crossings[j] = Crossing(t, label, 1)
            crossings[j + half] = Crossing(t.inverse(), label, -1)
        else:
            pairings.append(SidePairing(j, j + half, t.inverse(), label))
            crossings[j] = Crossing(t, label, -1)
            crossings[j + half] = Crossing(t.inverse(), label, 1)

    label_words, side_words = _standard_generators(genus)
    return FundamentalPolygon(
        genus=genus,
        vertices=vertices,
        pairings=tuple(pairings),
        side_centers=centers,
        side_radii=radii,
        crossings=tuple(crossings),
        label_words=label_words,
        side_words=side_words,
    )


def _standard_generators(genus: int) -> tuple[dict[str, Word], dict[str, Word]]:
    x = {k: Word.gen(f"x{k}") for k in range(1, 2 * genus + 1)}
    ab = {f"{c}{i}": Word.gen(f"{c}{i}") for i in range(1, genus + 1) for c in "ab"}
    label_words = {"a1": x[1], "b1": x[2]}
    side_words = {"x1": ab["a1"], "x2": ab["b1"]}
    u_x = x[2] * x[1]
    u_ab = ab["b1"] * ab["a1"]
    for i in range(2, genus + 1):
        label_words[f"a{i}"] = u_x * x[2 * i - 1]
        label_words[f"b{i}"] = x[2 * i] * u_x.inverse()
        odd = u_ab.inverse() * ab[f"a{i}"]
        even = ab[f"b{i}"] * u_ab
        side_words[f"x{2 * i - 1}"] = odd
        side_words[f"x{2 * i}"] = even
        u_x = x[2 * i] * x[2 * i - 1] * u_x
        u_ab = even * odd * u_ab
    return label_words, side_words


def reduce_to_domain(p: complex, poly: FundamentalPolygon, max_iter: int = 200) -> tuple[complex, Word]:
    """Move ``p`` into the domain by side-pairing generators.

    Returns ``(z, w)`` with ``z = poly.word_isometry(w)(p)``. Each step applies
    the crossing that brings the point closest to the origin, so ``|z|``
    decreases strictly along the orbit.
    """
    z = complex(p)
    if abs(z) >= 1:
        raise ValueError("point is not inside the disk")
    word = Word()
    for _ in range(max_iter):
        if poly.contains(z):
            return z, word
        best = None
        for c in poly.crossings:
            back = c.isometry.inverse()
            cand = back(z)
            if best is None or abs(cand) < abs(best[0]):
                best = (cand, Word.gen(c.label, -c.exponent))
        z = best[0]
        word = best[1] * word
    raise ConvergenceError(f"point not reduced within {max_iter} steps; raise max_iter")


def systole_estimate(poly: FundamentalPolygon, max_word_len: int = 4) -> float:
    return systole_search(poly, max_word_len)[0]


def systole_search(poly: FundamentalPolygon, max_word_len: int = 4) -> tuple[float, Word]:
    """Shortest translation length over group elements of word length <= max_word_len.

    Elements are enumerated breadth-first over reduced words with duplicate
    group elements (up to sign) dropped, so each layer only extends new
    elements.
    """
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    if max_word_len > MAX_WORD_LEN:
        raise ValueError(f"max_word_len is capped at {MAX_WORD_LEN}")
    letters = []
    for p in poly.pairings:
        letters.append((p.label, 1, p.isometry.matrix()))
        letters.append((p.label, -1, p.isometry.inverse().matrix()))
    gen = np.array([m for _, _, m in letters])
    inverse_of = np.array([i ^ 1 for i in range(len(letters))])

    mats = gen.copy()
    last = np.arange(len(letters))
    words = [((letters[i][0], letters[i][1]),) for i in range(len(letters))]
    seen: set[tuple] = set()
    mats, last, words = _dedupe(mats, last, words, seen)
    best_len, best_word = np.inf, None
    for length in range(1, max_word_len + 1):
        if length > 1:
            ext_m, ext_last, ext_words = [], [], []
            for k in range(len(letters)):
                keep = last != inverse_of[k]
                ext_m.append(mats[keep] @ gen[k])
                ext_last.append(np.full(int(keep.sum()), k))
                ext_words.extend(w + ((letters[k][0], letters[k][1]),) for w, ok in zip(words, keep) if ok)
            mats, last, words = _dedupe(np.concatenate(ext_m), np.concatenate(ext_last), ext_words, seen)
        if len(mats) == 0:
            break
        tr = np.abs(2 * mats[:, 0, 0].real)
        hyp = tr > 2 + 1e-12
        if hyp.any():
            i = int(np.argmin(np.where(hyp, tr, np.inf)))
            ell = 2 * float(np.arccosh(tr[i] / 2))
            if ell < best_len - 1e-9:
                best_len, best_word = ell, Word(words[i])
    if best_word is None:
        raise RuntimeError("no hyperbolic element found; Fuchsian data is inconsistent")
    return best_len, best_word


def _dedupe(mats, last, words, seen):
    sign = np.where(mats[:, 0, 0].real < 0, -1.0, 1.0)
    norm = mats * sign[:, None, None]
    scale = np.maximum(1.0, np.abs(norm[:, 0, 0]))
    flat = np.stack([norm[:, 0, 0].real, norm[:, 0, 0].imag, norm[:, 0, 1].real, norm[:, 0, 1].imag], axis=1)
    keys = np.round(flat / (scale[:, None] * 1e-8)).astype(np.int64)
    keep = np.zeros(len(mats), dtype=bool)
    for i, key in enumerate(map(tuple, keys)):
        if key not in seen:
            seen.add(key)
            keep[i] = True
    return mats[keep], last[keep], [w for w, k in zip(words, keep) if k]


class DomainSample(NamedTuple):
    points: np.ndarray
    covering_radius: float


def _images(poly: FundamentalPolygon, z: np.ndarray) -> np.ndarray:
    """``z`` together with its images in the neighbouring tiles, shape (1 + N, len(z))."""
    return np.stack([z] + [c.isometry(z) for c in poly.crossings])


def surface_distance_upper(poly: FundamentalPolygon, p, q) -> np.ndarray:
    """Pairwise distances ``p x q`` allowing one side crossing; bounds the surface distance above."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    imgs = _images(poly, np.atleast_1d(np.asarray(q, dtype=complex)))
    return hyp_distance(p[None, :, None], imgs[:, None, :]).min(axis=0)


def _uniform_candidates(poly: FundamentalPolygon, size: int, rng: np.random.Generator) -> np.ndarray:
    """Hyperbolic-area-uniform points in the polygon by rejection from a disk."""
    big_r = poly.circumradius
    out = []
    have = 0
    while have < size:
        m = 2 * (size - have) + 64
        rho = np.arccosh(1 + rng.random(m) * (np.cosh(big_r) - 1))
        z = np.tanh(rho / 2) * np.exp(2j * np.pi * rng.random(m))
        z = z[poly.contains(z)]
        out.append(z)
        have += len(z)
    return np.concatenate(out)[:size]


def sample_domain(poly: FundamentalPolygon, count: int, seed: int = 0, pool_size: int | None = None,
                  probe_count: int = 4000) -> DomainSample:
    """Farthest-point sample of the domain, starting at the origin.

    The candidate pool depends only on ``seed`` and ``pool_size`` so samples of
    different sizes drawn from the same pool are nested.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if pool_size is None:
        pool_size = max(8000, 20 * count)
    rng = np.random.default_rng(seed)
    pool = _uniform_candidates(poly, pool_size, rng)
    chosen = [0j]
    mind = surface_distance_upper(poly, pool, np.array([0j]))[:, 0]
    for _ in range(count - 1):
        i = int(np.argmax(mind))
        chosen.append(pool[i])
        mind = np.minimum(mind, surface_distance_upper(poly, pool, pool[i:i + 1])[:, 0])
    points = np.array(chosen)
    probes = np.concatenate([
        _uniform_candidates(poly, probe_count, np.random.default_rng([seed, 1])),
        poly.vertices * (1 - 1e-9),
        poly.side_centers / np.abs(poly.side_centers) * (np.abs(poly.side_centers) - poly.side_radii),
    ])
    cov = float(surface_distance_upper(poly, probes, points).min(axis=1).max())
    return DomainSample(points, cov)


class BaseEdges(NamedTuple):
    """Undirected neighbour pairs of base samples.

    ``crossing`` is -1 for pairs joined inside the domain, otherwise the index
    ``k`` of ``poly.crossings`` such that ``hyp_distance(x_i, C_k(x_j))`` is the
    edge length.
    """

    i: np.ndarray
    j: np.ndarray
    length: np.ndarray
    crossing: np.ndarray


def base_edges(poly: FundamentalPolygon, points, radius: float) -> BaseEdges:
    points = np.asarray(points, dtype=complex)
    ii, jj, ll, cc = [], [], [], []
    d = hyp_distance(points[:, None], points[None, :])
    iu, ju = np.nonzero(np.triu(d <= radius, k=1))
    ii.append(iu), jj.append(ju), ll.append(d[iu, ju]), cc.append(np.full(len(iu), -1))
    for k, c in enumerate(poly.crossings):
        d = hyp_distance(points[:, None], c.isometry(points)[None, :])
        a, b = np.nonzero(d <= radius)
        ii.append(a), jj.append(b), ll.append(d[a, b]), cc.append(np.full(len(a), k))
    # each crossing pair appears twice (via C_k and its inverse); keep one orientation
    i, j, length, crossing = (np.concatenate(x) for x in (ii, jj, ll, cc))
    keep = (crossing == -1) | (i < j)
    return BaseEdges(i[keep], j[keep], length[keep], crossing[keep].astype(int))


def base_graph(poly: FundamentalPolygon, points, radius: float):
    """Sparse symmetric distance graph on base samples, shortest edge per pair."""
    e = base_edges(poly, points, radius)
    m = len(points)
    lo = np.minimum(e.i, e.j)
    hi = np.maximum(e.i, e.j)
    mask = lo != hi
    order = np.lexsort((e.length[mask], hi[mask], lo[mask]))
    lo, hi, w = lo[mask][order], hi[mask][order], e.length[mask][order]
    first = np.ones(len(lo), dtype=bool)
    first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    return coo_matrix((w[first], (lo[first], hi[first])), shape=(m, m)).tocsr()


def diameter_estimate(poly: FundamentalPolygon, samples, edge_radius: float) -> float:
    """Largest graph shortest-path distance between base samples."""
    pts = samples.points if isinstance(samples, DomainSample) else np.asarray(samples, dtype=complex)
    g = base_graph(poly, pts, edge_radius)
    ncomp, _ = connected_components(g, directed=False)
    if ncomp > 1:
        raise DisconnectedGraphError(f"base graph has {ncomp} components at radius {edge_radius}")
    d = shortest_path(g, method="D", directed=False)
    return float(d.max())
