"""Simplicial and cubical complexes of a concept class.

``Delta_C`` lives in the unit l1 sphere of R^X: its faces are the realizable
partial concepts, the face of ``h`` being the convex hull of ``h(x) e_x`` over
``x`` in the support.  ``Gamma_C`` lives in the cube [-1, 1]^X and has one cube
per partial concept all of whose completions lie in the class.

Everything geometric is exact: points are tuples of ``Fraction``.
"""
from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Sequence

from .concepts import ConceptClass, Partial, completions, indices_of, is_realizable
from .exact_lp import l1_distance_simplices

Point = tuple[Fraction, ...]
ZERO = Fraction(0)
ONE = Fraction(1)


class OutsideComplexError(ValueError):
    """A query point is not in the polyhedron of a complex."""


def as_point(values: Iterable) -> Point:
    return tuple(Fraction(v) for v in values)


def l1(p: Sequence[Fraction]) -> Fraction:
    return sum((abs(v) for v in p), ZERO)


def l1_dist(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return sum((abs(a - b) for a, b in zip(p, q)), ZERO)


def fmt_rational(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# partial concept enumeration


def all_partials(n: int) -> Iterator[Partial]:
    full = (1 << n) - 1
    for support in range(full + 1):
        sub = support
        while True:
            yield Partial(n, support, sub)
            if sub == 0:
                break
            sub = (sub - 1) & support


def realizable_partials(C: ConceptClass) -> list[Partial]:
    """All partial concepts with a completion in C, including the empty one."""
    out = set()
    full = (1 << C.n) - 1
    for c in C.concepts:
        for support in range(full + 1):
            out.add(Partial(C.n, support, c & support))
    return sorted(out, key=lambda h: (h.size, h.support, h.signs))


def cubes_of(C: ConceptClass) -> list[Partial]:
    """Partial concepts all of whose completions lie in C."""
    members = set(C.concepts)
    out = []
    for h in realizable_partials(C):
        if all(c in members for c in h.completions_in_cube()):
            out.append(h)
    return out


def delta_point(h: Partial) -> Point:
    if h.size == 0:
        raise ValueError("the empty partial concept has no vertex")
    s = Fraction(1, h.size)
    return tuple(s * h.value(i) for i in range(h.n))


def gamma_point(h: Partial) -> Point:
    return tuple(Fraction(h.value(i)) for i in range(h.n))


def coordinates(v: Partial, kind: str) -> Point:
    if kind == "delta":
        return delta_point(v)
    if kind == "gamma":
        if v.size == 0:
            raise ValueError("the empty partial concept has no vertex")
        return gamma_point(v)
    raise ValueError(f"unknown kind {kind!r}")


def sign_partial(p: Sequence[Fraction]) -> Partial:
    n = len(p)
    support = signs = 0
    for i, v in enumerate(p):
        if v:
            support |= 1 << i
            if v > 0:
                signs |= 1 << i
    return Partial(n, support, signs)


# ---------------------------------------------------------------------------
# simplicial complexes


class SimplicialComplex:
    """A finite geometric simplicial complex given by its facets.

    ``vertices`` are hashable keys, ``coords`` their positions.  Faces are
    enumerated lazily from the facets.  A complex obtained by subdivision
    keeps a link to its parent so points can be located level by level.
    """

    def __init__(self, vertices: Sequence[Hashable], coords: Sequence[Point] | None,
                 facets: Iterable[Iterable[int]], *, kind: str = "generic", level: int = 0,
                 parent: "SimplicialComplex | None" = None,
                 parent_faces: Sequence[frozenset] | None = None,
                 klass: ConceptClass | None = None):
        self.vertices = tuple(vertices)
        self.coords = tuple(coords) if coords is not None else None
        fs = {tuple(sorted(set(f))) for f in facets}
        self.facets = tuple(sorted(fs, key=lambda f: (len(f), f)))
        self.kind = kind
        self.level = level
        self.parent = parent
        self.parent_faces = tuple(parent_faces) if parent_faces is not None else None
        self.klass = klass
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex keys")
        self._parent_index = None
        if self.parent_faces is not None:
            self._parent_index = {f: i for i, f in enumerate(self.parent_faces)}

    @property
    def ambient_dim(self) -> int:
        return len(self.coords[0]) if self.coords else 0

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def faces(self) -> Iterator[frozenset]:
        """Every nonempty face exactly once."""
        seen = set()
        for f in self.facets:
            for k in range(1, len(f) + 1):
                for sub in itertools.combinations(f, k):
                    fs = frozenset(sub)
                    if fs not in seen:
                        seen.add(fs)
                        yield fs

    def is_face(self, verts: Iterable[int]) -> bool:
        s = set(verts)
        return any(s.issubset(f) for f in self.facets)

    def face_key(self, face: frozenset) -> Hashable:
        if self.kind == "delta" and self.level == 0:
            h = None
            for i in face:
                v = self.vertices[i]
                h = v if h is None else h.join(v)
            return h
        return frozenset(self.vertices[i] for i in face)

    def point(self, weights: Sequence[tuple[int, Fraction]]) -> Point:
        d = self.ambient_dim
        out = [ZERO] * d
        for i, w in weights:
            c = self.coords[i]
            for k in range(d):
                out[k] += w * c[k]
        return tuple(out)

    def barycenter(self, face: Iterable[int]) -> Point:
        face = list(face)
        w = Fraction(1, len(face))
        return self.point([(i, w) for i in face])

    # -- locating points ------------------------------------------------
    def locate(self, p: Sequence[Fraction]) -> list[tuple[int, Fraction]]:
        """Carrier of ``p``: vertices with positive barycentric weights.

        The list is ordered from the smallest parent face upward, so for a
        chain complex the first entry is the minimal element of the chain.
        """
        p = as_point(p)
        if self.parent is not None:
            outer = self.parent.locate(p)
            return self._refine(outer)
        if self.kind == "delta" and self.level == 0:
            return self._locate_delta(p)
        return self._locate_generic(p)

    def _refine(self, outer: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
        ordered = sorted(outer, key=lambda t: -t[1])
        out = []
        face = set()
        k = 0
        while k < len(ordered):
            a = ordered[k][1]
            while k < len(ordered) and ordered[k][1] == a:
                face.add(ordered[k][0])
                k += 1
            nxt = ordered[k][1] if k < len(ordered) else ZERO
            idx = self._parent_index.get(frozenset(face))
            if idx is None:
                raise OutsideComplexError("refined face missing from subdivision")
            out.append((idx, len(face) * (a - nxt)))
        return out

    def _locate_delta(self, p: Point) -> list[tuple[int, Fraction]]:
        if l1(p) != 1:
            raise OutsideComplexError("point does not have unit l1 norm")
        h = sign_partial(p)
        if self.klass is not None and not is_realizable(h, self.klass):
            raise OutsideComplexError(f"sign pattern {h} is not realizable")
        out = []
        for i, v in enumerate(p):
            if v:
                key = Partial(len(p), 1 << i, (1 << i) if v > 0 else 0)
                out.append((self.index[key], abs(v)))
        return out

    def _locate_generic(self, p: Point) -> list[tuple[int, Fraction]]:
        for f in self.facets:
            lam = barycentric(p, [self.coords[i] for i in f])
            if lam is not None:
                return [(i, w) for i, w in zip(f, lam) if w > 0]
        raise OutsideComplexError("point lies in no facet")

    def contains(self, p: Sequence[Fraction]) -> bool:
        try:
            self.locate(p)
        except OutsideComplexError:
            return False
        return True

    def carrier(self, p: Sequence[Fraction]):
        """(chain of vertex keys from minimal upward, weights, minimal key)."""
        loc = self.locate(p)
        keys = [self.vertices[i] for i, _ in loc]
        return keys, [w for _, w in loc], keys[0]


def barycentric(p: Point, verts: Sequence[Point]) -> list[Fraction] | None:
    """Exact barycentric coordinates of p in the simplex, or None if outside."""
    k = len(verts)
    d = len(p)
    # least structure: solve [v_1..v_k; 1..1] lam = [p; 1] by elimination
    rows = [[Fraction(verts[j][i]) for j in range(k)] + [Fraction(p[i])] for i in range(d)]
    rows.append([ONE] * k + [ONE])
    lam = _solve(rows, k)
    if lam is None or any(v < 0 for v in lam):
        return None
    return lam


def _solve(rows: list[list[Fraction]], k: int) -> list[Fraction] | None:
    rows = [r[:] for r in rows]
    piv_cols = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][k] != 0:
            return None
    if len(piv_cols) < k:
        raise ValueError("degenerate simplex")
    out = [ZERO] * k
    for i, c in enumerate(piv_cols):
        out[c] = rows[i][k]
    return out


# ---------------------------------------------------------------------------
# cubical complexes


class CubicalComplex:
    """Cubes are partial concepts; the cube of h is the set of its completions."""

    def __init__(self, n: int, cubes: Iterable[Partial], klass: ConceptClass | None = None):
        self.n = n
        self.cubes = frozenset(cubes)
        self.klass = klass

    @property
    def dim(self) -> int:
        return max((h.free for h in self.cubes), default=-1)

    def vertices(self) -> list[Partial]:
        return sorted((h for h in self.cubes if h.is_total), key=lambda h: h.signs)

    def of_dim(self, k: int) -> list[Partial]:
        return sorted((h for h in self.cubes if h.free == k), key=lambda h: (h.support, h.signs))

    def maximal(self) -> list[Partial]:
        out = []
        for h in self.cubes:
            if not any(g != h and h.extends(g) for g in self.cubes):
                out.append(h)
        return sorted(out, key=lambda h: (-h.free, h.support, h.signs))

    def contains_point(self, y: Sequence[Fraction]) -> bool:
        if any(abs(v) > 1 for v in y):
            return False
        return carrier_cube(y) in self.cubes


def cube_faces(h: Partial) -> list[Partial]:
    """All faces of the cube h: extensions fixing some free coordinates."""
    free = indices_of(((1 << h.n) - 1) & ~h.support)
    out = []
    for choice in itertools.product((0, 1, -1), repeat=len(free)):
        g = h
        for i, s in zip(free, choice):
            if s:
                g = g.fix(i, s)
        out.append(g)
    return out


def carrier_cube(y: Sequence[Fraction]) -> Partial:
    """Smallest cube containing y: coordinates at +-1 are fixed."""
    n = len(y)
    support = signs = 0
    for i, v in enumerate(y):
        if abs(v) == 1:
            support |= 1 << i
            if v > 0:
                signs |= 1 << i
    return Partial(n, support, signs)


# ---------------------------------------------------------------------------
# builders


def build_simplicial(C: ConceptClass) -> SimplicialComplex:
    n = C.n
    verts = [Partial(n, 1 << i, s << i) for i in range(n) for s in (1, 0)]
    verts = [v for v in verts if is_realizable(v, C)]
    coords = [delta_point(v) for v in verts]
    index = {v: i for i, v in enumerate(verts)}
    facets = []
    for c in C.concepts:
        facets.append([index[Partial(n, 1 << i, c & (1 << i))] for i in range(n)])
    return SimplicialComplex(verts, coords, facets, kind="delta", level=0, klass=C)


def build_cubical(C: ConceptClass) -> CubicalComplex:
    return CubicalComplex(C.n, cubes_of(C), klass=C)


def subdivide(K: "SimplicialComplex | CubicalComplex") -> SimplicialComplex:
    if isinstance(K, CubicalComplex):
        return _subdivide_cubical(K)
    faces = sorted(K.faces(), key=lambda f: (len(f), sorted(f)))
    keys = [K.face_key(f) for f in faces]
    coords = [K.barycenter(f) for f in faces]
    index = {f: i for i, f in enumerate(faces)}
    facets = []
    for F in K.facets:
        for perm in itertools.permutations(F):
            chain = []
            for j in range(len(perm)):
                chain.append(index[frozenset(perm[j:])])
            facets.append(chain)
    return SimplicialComplex(keys, coords, facets, kind=K.kind, level=K.level + 1,
                             parent=K, parent_faces=faces, klass=K.klass)


class GammaSubdivision(SimplicialComplex):
    """First barycentric subdivision of a cubical complex, in cube coordinates."""

    def __init__(self, Q: CubicalComplex, vertices, coords, facets):
        super().__init__(vertices, coords, facets, kind="gamma", level=1, klass=Q.klass)
        self.cubical = Q

    def locate(self, p):
        p = as_point(p)
        if any(abs(v) > 1 for v in p):
            raise OutsideComplexError("point outside [-1, 1]^X")
        base = carrier_cube(p)
        if base not in self.cubical.cubes:
            raise OutsideComplexError(f"carrier cube {base} is not in the complex")
        levels = sorted({abs(v) for v in p if 0 < abs(v) < 1}, reverse=True)
        bounds = [ONE] + levels + [ZERO]
        chain = []
        for j in range(len(bounds) - 1):
            a = bounds[j]
            support = signs = 0
            for i, v in enumerate(p):
                if abs(v) >= a:
                    support |= 1 << i
                    if v > 0:
                        signs |= 1 << i
            h = Partial(len(p), support, signs)
            w = a - bounds[j + 1]
            if h.size == 0 and w and h not in self.index:
                raise OutsideComplexError("the empty cube is not a vertex here")
            chain.append((self.index[h], w))
        return [(i, w) for i, w in chain if w > 0]


def _subdivide_cubical(Q: CubicalComplex) -> GammaSubdivision:
    cubes = sorted(Q.cubes, key=lambda h: (-h.free, h.support, h.signs))
    index = {h: i for i, h in enumerate(cubes)}
    coords = [gamma_point(h) for h in cubes]
    facets = []
    for top in Q.maximal():
        free = indices_of(((1 << Q.n) - 1) & ~top.support)
        for order in itertools.permutations(free):
            for signs in itertools.product((1, -1), repeat=len(order)):
                chain = [index[top]]
                h = top
                for i, s in zip(order, signs):
                    h = h.fix(i, s)
                    chain.append(index[h])
                facets.append(chain)
    return GammaSubdivision(Q, cubes, coords, facets)


def delta_complex(C: ConceptClass, level: int = 1) -> SimplicialComplex:
    K = build_simplicial(C)
    for _ in range(level):
        K = subdivide(K)
    return K


def gamma_complex(C: ConceptClass) -> GammaSubdivision:
    return _subdivide_cubical(build_cubical(C))


def refine(K: SimplicialComplex, times: int = 1) -> SimplicialComplex:
    for _ in range(times):
        K = subdivide(K)
    return K


# ---------------------------------------------------------------------------
# the normalization embedding


def embed_f(C: ConceptClass, y: Sequence[Fraction]) -> Point:
    if C.is_cube():
        raise ValueError("the full cube does not embed: the empty cube would map to 0")
    y = as_point(y)
    if not build_cubical(C).contains_point(y):
        raise OutsideComplexError("point is not in the cubical complex")
    return normalize(y)


def normalize(y: Sequence[Fraction]) -> Point:
    s = l1(y)
    if s == 0:
        raise ValueError("cannot normalize the zero vector")
    return tuple(Fraction(v) / s for v in y)


def unnormalize(mu: Sequence[Fraction]) -> Point:
    """Inverse of the embedding on its image: scale so the sup norm is 1."""
    m = max(abs(v) for v in mu)
    return tuple(Fraction(v) / m for v in mu)


def in_gamma_tilde(mu: Sequence[Fraction], cubes: frozenset) -> bool:
    """Membership of mu in the image of the cubical complex."""
    m = max(abs(v) for v in mu)
    if m == 0 or l1(mu) != 1:
        return False
    support = signs = 0
    for i, v in enumerate(mu):
        if abs(v) == m:
            support |= 1 << i
            if v > 0:
                signs |= 1 << i
    return Partial(len(mu), support, signs) in cubes


# ---------------------------------------------------------------------------
# combinatorics on chain complexes


def star_link(K: SimplicialComplex, W: Iterable[Hashable], w: Hashable):
    """Star and link of ``w`` in the full subcomplex of K spanned by W.

    Faces are returned as frozensets of vertex keys.
    """
    W = set(W)
    if w not in W:
        raise ValueError("w must belong to W")
    if all(isinstance(v, Partial) for v in W):
        for v in W:
            for u in K.vertices:
                if u.extends(v) and u not in W:
                    raise ValueError("W is not upwards closed")
    wi = K.index[w]
    Wi = {K.index[v] for v in W}
    star = set()
    for f in K.facets:
        if wi in f:
            top = [i for i in f if i in Wi]
            for k in range(0, len(top) + 1):
                for sub in itertools.combinations(top, k):
                    star.add(frozenset(K.vertices[i] for i in sub))
    link = {s for s in star if w not in s}
    return star, link


def is_full_subcomplex(Q1: SimplicialComplex, D1: SimplicialComplex) -> bool:
    if Q1.klass is not None and Q1.klass.is_cube():
        raise ValueError("the full cube has no embedding into its simplicial complex")
    qverts = set(Q1.vertices)
    qfaces = {frozenset(Q1.vertices[i] for i in f) for f in Q1.faces()}
    for f in D1.faces():
        keys = frozenset(D1.vertices[i] for i in f)
        if keys <= qverts and keys not in qfaces:
            return False
    return True


def complex_dim(K) -> int:
    return K.dim


def _bbox(points: Sequence[Point]):
    d = len(points[0])
    lo = [min(p[k] for p in points) for k in range(d)]
    hi = [max(p[k] for p in points) for k in range(d)]
    return lo, hi


def _bbox_gap(a, b) -> Fraction:
    (alo, ahi), (blo, bhi) = a, b
    g = ZERO
    for k in range(len(alo)):
        if ahi[k] < blo[k]:
            g += blo[k] - ahi[k]
        elif bhi[k] < alo[k]:
            g += alo[k] - bhi[k]
    return g


def disjoint_simplex_pairs(K: SimplicialComplex) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Maximal pairs of vertex-disjoint simplices, up to order."""
    seen = set()
    facets = K.facets
    for a in range(len(facets)):
        P = set(facets[a])
        for b in range(a, len(facets)):
            Q = set(facets[b])
            S = sorted(P & Q)
            for mask in range(1 << len(S)):
                SA = {S[i] for i in range(len(S)) if (mask >> i) & 1}
                SB = set(S) - SA
                A = tuple(sorted((P - set(S)) | SA))
                B = tuple(sorted((Q - set(S)) | SB))
                if not A or not B:
                    continue
                key = (A, B) if A <= B else (B, A)
                if key in seen:
                    continue
                seen.add(key)
                yield key


def min_separation(K: SimplicialComplex) -> Fraction | float:
    """Minimum l1 distance between two vertex-disjoint closed simplices.

    Returns ``math.inf`` when every pair of simplices shares a vertex.
    """
    best: Fraction | float = math.inf
    pairs = list(disjoint_simplex_pairs(K))
    boxes = {}

    def box(s):
        if s not in boxes:
            boxes[s] = _bbox([K.coords[i] for i in s])
        return boxes[s]

    scored = sorted(pairs, key=lambda ab: _bbox_gap(box(ab[0]), box(ab[1])))
    for A, B in scored:
        if best != math.inf and _bbox_gap(box(A), box(B)) >= best:
            break
        d = l1_distance_simplices([K.coords[i] for i in A], [K.coords[i] for i in B])
        if d < best:
            best = d
    return best


# ---------------------------------------------------------------------------
# export


def _key_str(k) -> str:
    if isinstance(k, Partial):
        return str(k)
    if isinstance(k, frozenset):
        return "{" + ",".join(sorted(_key_str(x) for x in k)) + "}"
    return str(k)


def to_json(K: "SimplicialComplex | CubicalComplex") -> str:
    if isinstance(K, CubicalComplex):
        cubes = sorted(K.cubes, key=lambda h: (-h.free, str(h)))
        doc = {"type": "cubical", "n": K.n, "dim": K.dim,
               "cubes": [{"cube": str(h), "dim": h.free} for h in cubes]}
        return json.dumps(doc, indent=1)
    doc = {
        "type": "simplicial",
        "kind": K.kind,
        "level": K.level,
        "dim": K.dim,
        "vertices": [
            {"key": _key_str(k), "coords": [fmt_rational(c) for c in K.coords[i]]}
            for i, k in enumerate(K.vertices)
        ],
        "facets": [list(f) for f in K.facets],
    }
    return json.dumps(doc, indent=1)


def to_off(K: SimplicialComplex) -> str:
    """OFF export of a complex living in R^3 (triangles and lower faces)."""
    if K.ambient_dim != 3:
        raise ValueError("OFF export needs three ambient coordinates")
    polys = []
    for f in K.facets:
        if len(f) <= 3:
            polys.append(f)
        else:
            polys.extend(itertools.combinations(f, 3))
    lines = ["OFF", f"{len(K.vertices)} {len(polys)} 0"]
    for c in K.coords:
        lines.append(" ".join(repr(float(v)) for v in c))
    for f in polys:
        lines.append(f"{len(f)} " + " ".join(str(i) for i in f))
    return "\n".join(lines) + "\n"
