"""Covers of polyhedra with exact membership, and the constructions built on them.

Three kinds of cover elements appear:

* unions of closed simplices of a fixed reference complex, optionally dilated
  by an l1 radius (``SimplexUnion``);
* dilations of zero-loss simplices ``sigma_g`` of Delta (``ZeroLoss``), where
  the distance has the closed form 2 loss;
* elements given by a membership rule (vertex stars, pullbacks, dual cells).

Closed subcomplex covers get an exact order.  Everything else gets a witness
order: a lower bound read off a finite witness set, flagged as such.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .complexes import (OutsideComplexError, Point, SimplicialComplex, as_point, barycentric, cubes_of,
                        delta_complex, fmt_rational, l1, l1_dist, normalize, subdivide, unnormalize)
from .concepts import ConceptClass, Partial, concept_str, is_extremal, is_realizable, max_strongly_shattered
from .exact_lp import l1_distance_simplices
from .collapse import CollapseSequence, build_contraction, collapse_search  # noqa: F401
from .retraction import IdentityRetraction, Retraction, build_retraction, h_of  # noqa: F401
from .starcover import StarCover, build_star_cover, loss_of

ZERO = Fraction(0)
ONE = Fraction(1)
INF = math.inf


class IncomparableError(ValueError):
    """Containment between two cover elements cannot be decided exactly."""


# ---------------------------------------------------------------------------
# elements


class Element:
    label: object
    is_open: bool

    def contains(self, p: Point) -> bool:
        raise NotImplementedError

    def contains_simplex(self, verts: Sequence[Point]) -> bool | None:
        """True if the closed simplex lies inside; None if undecided."""
        return None

    def describe(self) -> dict:
        return {"label": str(self.label), "open": self.is_open}


@dataclass
class ZeroLoss(Element):
    """``sigma_g`` dilated by ``radius`` (closed when the radius is 0)."""

    label: object
    concept: int
    n: int
    radius: Fraction = ZERO

    @property
    def is_open(self) -> bool:
        return self.radius > 0

    def distance(self, p: Point) -> Fraction:
        return 2 * loss_of(p, self.concept)

    def contains(self, p: Point) -> bool:
        if self.radius > 0:
            return self.distance(p) < self.radius
        return l1(p) == 1 and self.distance(p) == 0

    def contains_simplex(self, verts):
        # distance to a convex set is convex, so vertices decide
        if self.radius > 0:
            return all(self.distance(v) < self.radius for v in verts)
        return all(self.contains(v) for v in verts)

    def describe(self):
        return {"label": str(self.label), "open": self.is_open, "zero_loss": concept_str(self.concept, self.n),
                "radius": fmt_rational(self.radius)}


@dataclass
class UnionOf(Element):
    """Union of several elements; a simplex counts as inside when one part holds it."""

    label: object
    parts: tuple

    @property
    def is_open(self) -> bool:
        return all(p.is_open for p in self.parts)

    def contains(self, p):
        return any(e.contains(p) for e in self.parts)

    def contains_simplex(self, verts):
        for e in self.parts:
            if e.contains_simplex(verts):
                return True
        return None

    def describe(self):
        return {"label": str(self.label), "open": self.is_open, "parts": [e.describe() for e in self.parts]}


@dataclass
class Everything(Element):
    label: object
    is_open: bool = True

    def contains(self, p):
        return True

    def contains_simplex(self, verts):
        return True

    def describe(self):
        return {"label": str(self.label), "open": True, "everything": True}


@dataclass
class SimplexUnion(Element):
    """Union of closed simplices (vertex lists), optionally dilated."""

    label: object
    simplices: tuple
    radius: Fraction = ZERO
    faces: frozenset | None = None  # vertex-index faces in a reference complex
    ref: object = None

    @property
    def is_open(self) -> bool:
        return self.radius > 0

    def distance(self, p: Point) -> Fraction:
        best = None
        for S in self.simplices:
            d = l1_distance_simplices([p], S)
            if best is None or d < best:
                best = d
        return best if best is not None else Fraction(10**9)

    def contains(self, p):
        p = as_point(p)
        if self.radius > 0:
            return self.distance(p) < self.radius
        return any(barycentric(p, S) is not None for S in self.simplices)

    def contains_simplex(self, verts):
        verts = [as_point(v) for v in verts]
        for S in self.simplices:
            if self.radius > 0:
                if all(l1_distance_simplices([v], S) < self.radius for v in verts):
                    return True
            elif all(barycentric(v, S) is not None for v in verts):
                return True
        return None

    def describe(self):
        return {"label": str(self.label), "open": self.is_open, "radius": fmt_rational(self.radius),
                "simplices": [[[fmt_rational(c) for c in v] for v in S] for S in self.simplices]}


@dataclass
class RuleElement(Element):
    label: object
    rule: Callable[[Point], bool]
    is_open: bool
    note: str = ""

    def contains(self, p):
        return self.rule(as_point(p))

    def describe(self):
        return {"label": str(self.label), "open": self.is_open, "rule": self.note}


# ---------------------------------------------------------------------------
# covers


@dataclass
class Cover:
    labels: tuple
    elements: tuple
    space: object = None  # a SimplicialComplex or a ConceptClass (its Delta)
    reference: SimplicialComplex | None = None  # for closed subcomplex covers
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def members(self, p: Sequence[Fraction]) -> list:
        p = as_point(p)
        return [e.label for e in self.elements if e.contains(p)]

    def element(self, label) -> Element:
        return self.elements[self.labels.index(label)]

    def first_member(self, p):
        p = as_point(p)
        for e in self.elements:
            if e.contains(p):
                return e.label
        return None


def closed_subcomplex_cover(K: SimplicialComplex, labels: Sequence, faces: Sequence[Iterable[Iterable[int]]],
                            space=None) -> "SubcomplexCover":
    """Cover by unions of closed simplices of K (given as vertex-index tuples)."""
    return SubcomplexCover(K, labels, [[tuple(f) for f in fs] for fs in faces], space)


def facet_cover(C: ConceptClass) -> Cover:
    """{sigma_g} over g in C as a closed subcomplex cover of Delta_C."""
    K = delta_complex(C, 0)
    faces = [[f] for f in (tuple(K.index[Partial(C.n, 1 << i, c & (1 << i))] for i in range(C.n))
                           for c in C.concepts)]
    return closed_subcomplex_cover(K, C.concepts, faces, space=C)


def zero_loss_set(h: int, n: int, radius: Fraction = ZERO) -> ZeroLoss:
    return ZeroLoss(h, h, n, Fraction(radius))


def zero_loss_cover(C: ConceptClass, radius: Fraction, over: str = "class") -> Cover:
    """{B_h^(radius)} over h in C (or over the whole cube)."""
    hs = C.concepts if over == "class" else tuple(range(1 << C.n))
    els = tuple(zero_loss_set(h, C.n, radius) for h in hs)
    return Cover(tuple(hs), els, C)


def random_open_cover(C: ConceptClass, seed: int, extra: int = 3) -> Cover:
    """Seeded open cover of Delta_C by dilated zero-loss sets and unions of them.

    Every concept of C appears with a positive radius in some element, so the
    family covers; the elements come in shuffled order.
    """
    rng = random.Random(seed)
    radii = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2)]
    parts = [[ZeroLoss(None, h, C.n, rng.choice(radii))] for h in C.concepts]
    for _ in range(extra):
        g = rng.randrange(1 << C.n)
        z = ZeroLoss(None, g, C.n, rng.choice(radii))
        if parts and rng.random() < 0.5:
            rng.choice(parts).append(z)
        else:
            parts.append([z])
    rng.shuffle(parts)
    els = []
    for k, ps in enumerate(parts):
        if len(ps) == 1:
            z = ps[0]
            els.append(ZeroLoss(k, z.concept, z.n, z.radius))
        else:
            els.append(UnionOf(k, tuple(ZeroLoss((k, j), z.concept, z.n, z.radius) for j, z in enumerate(ps))))
    return Cover(tuple(range(len(els))), tuple(els), C)


# ---------------------------------------------------------------------------
# witness points


def random_delta_point(C: ConceptClass, rng: random.Random, scale: int = 1000) -> Point:
    c = rng.choice(C.concepts)
    w = [rng.randint(0, scale) for _ in range(C.n)]
    if not any(w):
        w[rng.randrange(C.n)] = 1
    s = sum(w)
    return tuple(Fraction(a, s) * (1 if (c >> i) & 1 else -1) for i, a in enumerate(w))


def space_class(space) -> ConceptClass | None:
    if isinstance(space, ConceptClass):
        return space
    if isinstance(space, SimplicialComplex):
        return space.klass
    return None


def witness_points(space, level: int = 2, n_random: int = 10000, seed: int = 0) -> list[Point]:
    """Vertices and face barycenters of a subdivision plus seeded random points."""
    pts = []
    if isinstance(space, ConceptClass):
        K = delta_complex(space, level)
    else:
        K = space
    for f in K.faces():
        pts.append(K.barycenter(f))
    rng = random.Random(seed)
    C = space_class(space)
    if n_random:
        for _ in range(n_random):
            if C is not None and (isinstance(space, ConceptClass) or K.kind == "delta"):
                pts.append(random_delta_point(C, rng))
            else:
                f = rng.choice(K.facets)
                w = [rng.randint(1, 1000) for _ in f]
                s = sum(w)
                pts.append(K.point([(i, Fraction(a, s)) for i, a in zip(f, w)]))
    return pts


@dataclass(frozen=True)
class OrderReport:
    order: int
    exact: bool
    witnesses: int = 0

    @property
    def kind(self) -> str:
        return "exact" if self.exact else "witness"


def cover_order(cov, witnesses: Sequence[Point] | None = None, **kw) -> OrderReport:
    """Order of a cover: exact for closed subcomplex covers, else a witness bound."""
    if len(cov.elements) == 1:
        return OrderReport(0, True)
    exact = getattr(cov, "exact_order", None)
    if callable(exact):
        return OrderReport(exact(), True)
    if witnesses is None:
        witnesses = witness_points(cov.space, **kw)
    best = 0
    for p in witnesses:
        k = len(cov.members(p))
        best = max(best, k)
    return OrderReport(best - 1, False, len(witnesses))


def union_audit(cov, witnesses: Iterable[Point]) -> list[Point]:
    """Witness points lying in no element (empty list means the audit passed)."""
    return [p for p in witnesses if not cov.members(p)]


# ---------------------------------------------------------------------------
# refinement


def _simplex_vertices(g: int, n: int) -> list[Point]:
    return [tuple(Fraction(1 if (g >> i) & 1 else -1) if i == j else ZERO for i in range(n)) for j in range(n)]


def _inside(b: Element, a: Element) -> bool:
    if isinstance(a, Everything):
        return True
    if isinstance(b, ZeroLoss) and isinstance(a, ZeroLoss):
        if b.concept == a.concept:
            return b.radius <= a.radius
        far = max(a.distance(v) for v in _simplex_vertices(b.concept, b.n))
        # the farthest vertex of sigma_b is a point of b
        if (a.radius > 0 and far >= a.radius) or (a.radius == 0 and far > 0):
            return False
        if b.radius == 0 or far + b.radius <= a.radius:
            return True
        raise IncomparableError("dilated zero-loss sets with different labels")
    if isinstance(b, SimplexUnion) and b.radius == 0:
        if isinstance(a, SimplexUnion) and a.radius == 0 and a.ref is not None and a.ref is b.ref:
            return all(any(fb <= fa for fa in a.faces) for fb in b.faces)
        ok = True
        for S in b.simplices:
            r = a.contains_simplex(S)
            if r is None:
                if not a.contains(tuple(sum(v[k] for v in S) / len(S) for k in range(len(S[0])))):
                    return False
                raise IncomparableError("simplex containment not decidable")
            ok = ok and r
        return ok
    if isinstance(b, ZeroLoss) and b.radius == 0:
        r = a.contains_simplex(_simplex_vertices(b.concept, b.n))
        if r is None:
            raise IncomparableError("containment not decidable")
        return r
    raise IncomparableError(f"cannot compare {type(b).__name__} with {type(a).__name__}")


def is_refinement(A: Cover, B: Cover) -> bool:
    """True iff every element of B lies in some element of A."""
    for b in B.elements:
        found = False
        undecided = False
        for a in A.elements:
            try:
                if _inside(b, a):
                    found = True
                    break
            except IncomparableError:
                undecided = True
        if not found:
            if undecided:
                raise IncomparableError(f"could not decide containment of element {b.label}")
            return False
    return True


def is_shrinkage(A: Cover, B: Cover) -> bool:
    """Same index set and B_i inside A_i for every i."""
    if tuple(A.labels) != tuple(B.labels):
        return False
    return all(_inside(b, a) for a, b in zip(A.elements, B.elements))


# ---------------------------------------------------------------------------
# refinement radius, closed shrinkage, rounding


def metric_refinement_radius(A: Cover, B: Cover) -> Fraction | float:
    """alpha > 0 such that dilating each B_j by alpha still refines A.

    For B_j inside sigma_h^(rho) and A_i = sigma_h'^(r), the triangle
    inequality gives d(complement of A_i, B_j) >= r - rho - max over the
    vertices of sigma_h of d(., sigma_h').  The result is half the smallest
    such gap, using for each j the best i.
    """
    best: Fraction | float = INF
    for b in B.elements:
        if isinstance(b, SimplexUnion) and not b.simplices:
            continue
        gap_j: Fraction | float = -ONE
        for a in A.elements:
            if isinstance(a, Everything):
                gap_j = INF
                break
            if not isinstance(a, ZeroLoss) or not a.is_open:
                raise IncomparableError("A must consist of open dilations")
            if isinstance(b, ZeroLoss):
                verts = _simplex_vertices(b.concept, b.n)
                rho = b.radius
            elif isinstance(b, SimplexUnion):
                verts = [v for S in b.simplices for v in S]
                rho = b.radius
            else:
                raise IncomparableError("B elements must be compact simplex unions")
            if a.radius > 2:
                gap_j = INF
                break
            g = a.radius - rho - max(a.distance(v) for v in verts)
            if gap_j != INF and g > gap_j:
                gap_j = g
        if gap_j != INF and gap_j <= 0:
            raise ValueError(f"element {b.label} does not refine A")
        if gap_j < best:
            best = gap_j
    return best / 2 if best != INF else INF


@functools.lru_cache(maxsize=32)
def _delta(C: ConceptClass, level: int) -> SimplicialComplex:
    # shared so that a level and its refinement are built once and linked
    if level == 0:
        return delta_complex(C, 0)
    return subdivide(_delta(C, level - 1))


@functools.lru_cache(maxsize=32)
def _refined(K: SimplicialComplex) -> SimplicialComplex:
    if K.kind == "delta" and K.klass is not None and K is _delta(K.klass, K.level):
        return _delta(K.klass, K.level + 1)
    return subdivide(K)


def closed_shrinkage(U: Cover, max_level: int = 3, start_level: int = 1) -> Cover:
    """A closed shrinkage of an open cover with order no larger.

    Delta is subdivided until each closed facet fits in some element; a facet
    goes to the first such element.  A point only lies in F_i for labels of
    facets through it, and each of those facets sits inside its U_i, so the
    order cannot go up.
    """
    if isinstance(U, PullbackCover):
        return U.dual()
    C = space_class(U.space)
    if C is None:
        raise ValueError("closed_shrinkage needs a Delta space")
    level = start_level
    while True:
        T = _delta(C, level)
        assigned: dict = {lab: [] for lab in U.labels}
        complete = True
        for f in T.facets:
            verts = [T.coords[i] for i in f]
            for el in U.elements:
                if el.contains_simplex(verts):
                    assigned[el.label].append(f)
                    break
            else:
                complete = False
                break
        if complete:
            cov = closed_subcomplex_cover(T, U.labels, [assigned[lab] for lab in U.labels], space=C)
            cov.meta["level"] = level
            return cov
        if level >= max_level:
            raise ValueError(f"subdivision level {max_level} is not fine enough for this cover")
        level += 1


class _SignBounds:
    """Exact integer lower bounds on l1 distances between hulls of points.

    For s with entries in [-1, 1], |s.x - s.y| <= |x - y|_1, so
    min_P s.x - max_Q s.y bounds d(P, Q) from below.  Points are scaled to
    integers by a common denominator so numpy arithmetic stays exact.
    """

    def __init__(self, points: Sequence[Point]):
        n = len(points[0])
        den = 1
        for p in points:
            for c in p:
                den = math.lcm(den, c.denominator)
        # halves are affordable in low dimension and tighten the bound a lot
        grid = (-2, -1, 0, 1, 2) if n <= 4 else (-2, 0, 2)
        S = np.array([s for s in itertools.product(grid, repeat=n) if any(s) and max(map(abs, s)) == 2],
                     dtype=np.int64)
        V = np.array([[int(c * den) for c in p] for p in points], dtype=np.int64)
        self.den = 2 * den
        self.vals = V @ S.T

    def maxima(self, sets: Sequence[Sequence[int]]) -> np.ndarray:
        return np.array([self.vals[list(q)].max(axis=0) for q in sets])

    def lower(self, P: Sequence[int], Qmax: np.ndarray) -> np.ndarray:
        """Scaled lower bounds from the hull of P to each set summarized in Qmax."""
        return (self.vals[list(P)].min(axis=0)[None, :] - Qmax).max(axis=1)


def _min_distance(K: SimplicialComplex, sb: _SignBounds, pairs_from: Sequence[tuple[int, ...]],
                  targets: Sequence[tuple[int, ...]], best: Fraction | float = INF) -> Fraction | float:
    """Smallest l1 distance between a simplex of ``pairs_from`` and one of ``targets``."""
    if not pairs_from or not targets:
        return best
    qmax = sb.maxima(targets)
    for A in pairs_from:
        lb = sb.lower(A, qmax)
        PA = [K.coords[i] for i in A]
        for j in np.argsort(lb, kind="stable"):
            low = Fraction(int(lb[j]), sb.den)
            if best != INF and low >= best:
                break
            Q = [K.coords[i] for i in targets[j]]
            up = min(l1_dist(a, b) for a in PA for b in Q)
            d = up if up == low else l1_distance_simplices(PA, Q)
            if d < best:
                best = d
    return best


def rounding_radius(F: Cover) -> Fraction | float:
    """beta > 0 such that every open l1 ball of radius beta meets at most order + 1 elements."""
    if len([e for e in F.elements if not (isinstance(e, SimplexUnion) and not e.simplices)]) <= 1:
        return INF
    rr = getattr(F, "rounding_radius", None)
    if callable(rr):
        return rr()
    raise ValueError("rounding radius needs a closed cover on a reference complex")


class SubcomplexCover(Cover):
    """Closed cover whose elements are unions of closed simplices of K."""

    def __init__(self, K: SimplicialComplex, labels: Sequence, faces: Sequence[Sequence[tuple[int, ...]]],
                 space=None):
        self.K = K
        self.facesets = tuple(tuple(tuple(sorted(f)) for f in fs) for fs in faces)
        elements = tuple(SimplexUnion(lab, tuple(tuple(K.coords[i] for i in f) for f in fs), ZERO,
                                      frozenset(frozenset(f) for f in fs), K)
                         for lab, fs in zip(labels, self.facesets))
        super().__init__(tuple(labels), elements, space if space is not None else K, reference=K)
        self._closure = [self._faces_of(fs) for fs in self.facesets]
        self._beta = None

    @staticmethod
    def _faces_of(fs) -> frozenset:
        out = set()
        for f in fs:
            for k in range(1, len(f) + 1):
                out.update(frozenset(c) for c in itertools.combinations(f, k))
        return frozenset(out)

    def members(self, p):
        loc = self.K.locate(as_point(p))
        car = frozenset(i for i, w in loc if w > 0)
        return [lab for lab, cl in zip(self.labels, self._closure) if car in cl]

    def first_member(self, p):
        m = self.members(p)
        return m[0] if m else None

    def exact_order(self) -> int:
        best = 0
        for v in range(len(self.K.vertices)):
            key = frozenset((v,))
            best = max(best, sum(1 for cl in self._closure if key in cl))
        return best - 1

    def rounding_radius(self) -> Fraction | float:
        """Larger of two sound radii.

        Fine pair rule: half the least gap between an element and a simplex of
        the once-finer subdivision it misses.  A ball that reaches F_i then
        meets the carrier of its center in a vertex of F_i, i.e. the barycenter
        of a face of the center's chain; all such F_i contain the smallest
        face of that chain and so share a point.

        Clique rule: half the least gap between disjoint elements.  The
        elements reached by one ball then meet pairwise, which bounds their
        number when no pairwise-meeting family is larger than order + 1.
        """
        if self._beta is not None:
            return self._beta
        K = self.K
        order = self.exact_order()
        live = [i for i, fs in enumerate(self.facesets) if fs]
        if len(live) <= 1:
            self._beta = INF
            return INF
        sbK = _SignBounds(K.coords)
        # clique rule
        verts = {i: {v for f in self.facesets[i] for v in f} for i in live}
        meets = {(i, j): bool(verts[i] & verts[j]) for i in live for j in live}
        gap: Fraction | float = INF
        for i, j in itertools.combinations(live, 2):
            if not meets[(i, j)]:
                gap = _min_distance(K, sbK, self.facesets[i], self.facesets[j], gap)
        clique = _max_clique(live, lambda a, b: meets[(a, b)])
        beta_clique = gap / 2 if clique <= order + 1 else ZERO
        # fine pair rule
        Kf = _refined(K)
        sbF = _SignBounds(Kf.coords)
        to_fine = {v: Kf._parent_index[frozenset((v,))] for v in range(len(K.vertices))}
        gap_f: Fraction | float = INF
        for i in live:
            cl = self._closure[i]
            inside = [Kf.parent_faces[u] in cl for u in range(len(Kf.vertices))]
            targets = set()
            for f in Kf.facets:
                rest = tuple(u for u in f if not inside[u])
                if rest:
                    targets.add(rest)
            pieces = [tuple(to_fine[v] for v in f) for f in self.facesets[i]]
            gap_f = _min_distance(Kf, sbF, pieces, sorted(targets), gap_f)
        beta_fine = gap_f / 2 if gap_f != INF else INF
        self._beta = max(beta_clique, beta_fine)
        self.meta["rounding_rule"] = "clique" if beta_clique >= beta_fine else "fine pair"
        return self._beta


def _max_clique(nodes: Sequence[int], adj: Callable[[int, int], bool]) -> int:
    best = 0

    def grow(chosen: int, cand: list[int]):
        nonlocal best
        if chosen + len(cand) <= best:
            return
        if not cand:
            best = max(best, chosen)
            return
        for k, v in enumerate(cand):
            grow(chosen + 1, [u for u in cand[k + 1:] if adj(v, u)])

    grow(0, list(nodes))
    return best


def _random_near(K: SimplicialComplex, face: Sequence[int], rng: random.Random, reach: Fraction) -> Point:
    """A point of a random facet through ``face``, within ``reach`` of its barycenter (in weight)."""
    facets = [f for f in K.facets if set(face) <= set(f)]
    f = rng.choice(facets)
    w = [rng.randint(1, 1000) for _ in f]
    s = sum(w)
    x = K.point([(i, Fraction(a, s)) for i, a in zip(f, w)])
    b = K.barycenter(face)
    a = reach * Fraction(rng.randint(0, 1000), 1000)
    return tuple((1 - a) * u + a * v for u, v in zip(b, x))


def rounding_audit(F: Cover, beta: Fraction, probes: int = 10000, seed: int = 0, per_center: int = 8,
                   order: int | None = None) -> dict:
    """Monte-Carlo check that no ball of radius beta meets more than order + 1 elements.

    Centers sit near barycenters of faces of the reference complex, where
    elements meet; probes are drawn around the same face and kept when they
    fall inside the open ball.
    """
    K = F.reference if F.reference is not None else getattr(F, "K", None)
    if order is None:
        order = cover_order(F).order
    rng = random.Random(seed)
    faces = list(K.faces())
    diam = max(l1_dist(K.coords[f[0]], K.coords[f[1]]) for f in K.facets if len(f) > 1) if K.dim > 0 else ONE
    reach = min(ONE, Fraction(beta) / (diam or ONE)) if beta != INF else ONE
    used = 0
    violations = 0
    worst = 0
    while used < probes:
        face = sorted(rng.choice(faces))
        p = _random_near(K, face, rng, reach)
        labs = set(F.members(p))
        for _ in range(per_center):
            q = _random_near(K, face, rng, reach)
            used += 1
            if beta == INF or l1_dist(p, q) < beta:
                labs.update(F.members(q))
        worst = max(worst, len(labs))
        if len(labs) > order + 1:
            violations += 1
    return {"probes": used, "violations": violations, "max_met": worst, "order": order}


# ---------------------------------------------------------------------------
# star cover, retraction and pullback


class StarCoverCover(Cover):
    """Cover of the cubical complex (cube coordinates) by labelled open stars."""

    def __init__(self, sc: StarCover):
        self.sc = sc
        els = tuple(RuleElement(g, (lambda g: lambda y: sc.contains(g, y))(g), True, "open vertex stars")
                    for g in sc.labels)
        super().__init__(sc.labels, els, space=sc)

    def members(self, y):
        labs = self.sc.labels_at(y)
        return [g for g in self.labels if g in labs]

    def exact_order(self) -> int:
        return self.sc.exact_order()


def vertex_star_cover(E: ConceptClass, eps: Fraction, N: int | None = None,
                      boundary_for_cube: bool = False) -> StarCoverCover:
    """Open cover of Gamma_E indexed by E of order at most vc_dim(E).

    ``N`` is accepted for interface compatibility; the grid is fixed by eps.
    """
    if not is_extremal(E):
        raise ValueError("class is not extremal")
    if E.is_cube():
        if not boundary_for_cube:
            raise ValueError("the full cube needs the boundary construction")
        cubes = [h for h in cubes_of(E) if h.size > 0]
    else:
        cubes = cubes_of(E)
    sc = build_star_cover(E, Fraction(eps), cubes)
    ok, worst = sc.verify()
    if not ok:
        raise RuntimeError(f"star cover check failed: worst distance {worst}")
    return StarCoverCover(sc)


class PullbackCover(Cover):
    """f^{-1}(U_g): evaluate the retraction, rescale to cube coordinates, test U_g."""

    def __init__(self, f, U: StarCoverCover, E: ConceptClass, eps0: Fraction):
        self.f = f
        self.U = U
        self.eps0 = Fraction(eps0)
        els = tuple(RuleElement(g, (lambda g: lambda mu: g in self._labels(mu))(g), True, "pullback of open stars")
                    for g in E.concepts)
        super().__init__(E.concepts, els, space=E)

    def _labels(self, mu) -> set:
        return self.U.sc.labels_at(unnormalize(self.f(mu)))

    def members(self, mu):
        labs = self._labels(as_point(mu))
        return [g for g in self.labels if g in labs]

    def order_bound(self) -> int:
        # preimages preserve intersections, so the order cannot exceed U's
        return self.U.exact_order()

    def dual(self) -> "PullbackDualCover":
        return PullbackDualCover(self)


class PullbackDualCover(Cover):
    """Closed shrinkage of a pullback cover: preimages of closed dual cells."""

    def __init__(self, P: PullbackCover):
        self.P = P
        els = tuple(RuleElement(g, (lambda g: lambda mu: g in self._labels(mu))(g), False,
                                "pullback of closed dual cells") for g in P.labels)
        super().__init__(P.labels, els, space=P.space)
        self.K = _delta(P.space, 1)
        self.meta["certified_radius"] = False

    def _labels(self, mu) -> set:
        return self.P.U.sc.dual_labels_at(unnormalize(self.P.f(mu)))

    def members(self, mu):
        labs = self._labels(as_point(mu))
        return [g for g in self.labels if g in labs]

    def first_member(self, mu):
        labs = self._labels(as_point(mu))
        for g in self.labels:
            if g in labs:
                return g
        return None

    def order_bound(self) -> int:
        return self.P.order_bound()

    def rounding_radius(self, samples: int = 400, seed: int = 0) -> Fraction:
        return pullback_rounding_radius(self, samples, seed)


def grid_rounding_radius(sc: StarCover) -> Fraction:
    """Radius in cube coordinates for the closed dual cells of the star grid.

    The smallest cell has half-width t/2; a weight change of w needs a move of
    at least w t / 2 in sup norm (hence in l1), and a dual cell forces weight
    at least 1/(dim+1).
    """
    d = max(sc.dim, 1)
    return sc.t / (4 * (d + 1))


def pullback_rounding_radius(F: PullbackDualCover, samples: int = 400, seed: int = 0) -> Fraction:
    """Estimated radius on Delta: the grid radius divided by a sampled Lipschitz bound.

    Not a certified value: the Lipschitz constant of the retraction composed
    with the rescaling is estimated from nearby sample pairs (times 4).
    """
    sc = F.P.U.sc
    C = F.space
    f = F.P.f
    rng = random.Random(seed)
    n = C.n
    lip = Fraction(1)
    h = Fraction(1, 10**5)
    for _ in range(samples):
        mu = random_delta_point(C, rng)
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j or mu[i] == 0:
            continue
        step = min(h, abs(mu[i]))
        mu2 = list(mu)
        mu2[i] -= step if mu[i] > 0 else -step
        s = 1 if mu[j] > 0 else -1 if mu[j] < 0 else (1 if rng.random() < 0.5 else -1)
        mu2[j] += s * step
        mu2 = tuple(mu2)
        try:
            y1 = unnormalize(f(mu))
            y2 = unnormalize(f(mu2))
        except OutsideComplexError:
            continue
        ratio = sum(abs(a - b) for a, b in zip(y1, y2)) / (2 * step)
        if ratio > lip:
            lip = ratio
    lip = Fraction(math.ceil(lip * 4))
    return grid_rounding_radius(sc) / lip


def star_witnesses(sc: StarCover) -> list[Point]:
    """Normalized barycenters of one simplex under each top cell of the star grid.

    Such a point lies in the open star of every vertex of its simplex.  The
    simplex steps each free coordinate toward zero, where the labels change,
    so near the origin of a cube it meets dim + 1 labels.  The retraction
    fixes these points, so the pullback meets the same labels.
    """
    out = []
    for top in sc.maximal_cells:
        pts = [sc.barycenter(c) for c in sc.toward_zero_chain(top)]
        y = tuple(sum(p[k] for p in pts) / len(pts) for k in range(sc.n))
        out.append(normalize(y))
    return out


def pullback_cover(f, U: StarCoverCover, E: ConceptClass, eps0: Fraction) -> PullbackCover:
    return PullbackCover(f, U, E, eps0)


# ---------------------------------------------------------------------------
# lower bound certificate


@dataclass
class Certificate:
    cube: str
    dim: int
    alpha: Fraction
    checks: int
    min_gap: Fraction
    ok: bool

    def as_dict(self) -> dict:
        return {"cube": self.cube, "dim": self.dim, "alpha": fmt_rational(self.alpha), "checks": self.checks,
                "min_gap": fmt_rational(self.min_gap), "ok": self.ok, "scdim_lower": self.dim}


class CertificateError(RuntimeError):
    pass


def lower_bound_certificate(E: ConceptClass) -> Certificate:
    """Certify SCdim(E) >= dim of a largest cube (one less for the full cube).

    For every face {y_x = s} of the chosen cube and every concept h with
    h(x) = -s, the normalized face points keep l1 distance >= 1/|X| from B_h,
    which exceeds alpha = 1/(|X|+1).  Distances are 2 loss, a ratio of linear
    forms on each orthant piece of the face, so the piece vertices (other free
    coordinates in {-1, 0, 1}) decide the minimum exactly.
    """
    if not is_extremal(E):
        raise ValueError("class is not extremal")
    n = E.n
    size, S = max_strongly_shattered(E)
    if E.is_cube():
        S = tuple(range(n - 1))
        support = 1 << (n - 1)
        signs = support
    else:
        free = 0
        for i in S:
            free |= 1 << i
        support = ((1 << n) - 1) & ~free
        from .concepts import strong_witness
        signs = strong_witness(E, S) & support
    cube = Partial(n, support, signs)
    if not all(c in E for c in cube.completions_in_cube()):
        raise CertificateError("selected cube is not in the class")
    alpha = Fraction(1, n + 1)
    bound = Fraction(1, n)
    checks = 0
    gap = None
    free = list(S)
    for x in free:
        for s in (1, -1):
            others = [z for z in free if z != x]
            for vals in itertools.product((-1, 0, 1), repeat=len(others)):
                y = [Fraction(cube.value(i)) for i in range(n)]
                y[x] = Fraction(s)
                for z, v in zip(others, vals):
                    y[z] = Fraction(v)
                mu = normalize(y)
                for h in range(1 << n):
                    hx = 1 if (h >> x) & 1 else -1
                    if hx != -s:
                        continue
                    d = 2 * loss_of(mu, h)
                    checks += 1
                    if gap is None or d < gap:
                        gap = d
                    if d < bound:
                        raise CertificateError(f"face point {y} is within {d} of B_{concept_str(h, n)}")
    ok = gap is None or (gap >= bound > alpha)
    return Certificate(str(cube), len(free), alpha, checks, gap if gap is not None else Fraction(2), ok)


# ---------------------------------------------------------------------------
# putting it together


def certify(E: ConceptClass, eps0: Fraction = Fraction(1, 4), audit_points: int = 200, seed: int = 0) -> dict:
    """Lower certificate, upper cover bound and the resulting SCdim/LR verdict."""
    from .concepts import vc_dim
    vc = vc_dim(E)
    extremal = is_extremal(E)
    report = {"vc_dim": vc, "extremal": extremal, "is_cube": E.is_cube(), "size": len(E)}
    if not extremal:
        report["verdict"] = "not extremal: no certificate"
        return report
    cert = lower_bound_certificate(E)
    f, sc = build_retraction(E, eps0, boundary_for_cube=True)
    U = StarCoverCover(sc)
    ok, worst = sc.verify()
    upper = U.exact_order()
    report.update({
        "lower": cert.dim, "certificate": cert.as_dict(), "upper": upper, "star_check": ok,
        "star_worst": fmt_rational(worst), "eps": fmt_rational(f.eps), "eps0": fmt_rational(Fraction(eps0)),
    })
    P = PullbackCover(f, U, E, eps0)
    rng = random.Random(seed)
    pts = [random_delta_point(E, rng) for _ in range(audit_points)] + star_witnesses(sc)
    witness = 0
    uncovered = 0
    outside = 0
    for mu in pts:
        labs = P.members(mu)
        witness = max(witness, len(labs))
        if not labs:
            uncovered += 1
        for g in labs:
            if 2 * loss_of(mu, g) >= P.eps0:
                outside += 1
    report["pullback_witness_order"] = witness - 1
    report["pullback_uncovered"] = uncovered
    report["pullback_outside"] = outside
    if cert.dim == upper and ok and uncovered == 0 and outside == 0:
        report["scdim"] = upper
        report["lr"] = upper + 1
    return report


def cover_report(cov: Cover, order: OrderReport | None = None) -> dict:
    doc = {"labels": [str(l) for l in cov.labels], "elements": [e.describe() for e in cov.elements]}
    if order is not None:
        doc["order"] = order.order
        doc["order_kind"] = order.kind
    doc.update({k: v for k, v in cov.meta.items()})
    return doc


def dumps_report(doc: dict) -> str:
    def conv(o):
        if isinstance(o, Fraction):
            return fmt_rational(o)
        raise TypeError(type(o).__name__)
    return json.dumps(doc, indent=1, sort_keys=True, default=conv)
