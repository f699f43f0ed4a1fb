"""Elementary collapses of cubical complexes and the homotopies they induce.

A collapse removes a cube ``c`` together with a codimension-one face ``tau``
that lies in no other cube.  Geometrically ``c`` retracts onto the rest of its
boundary by pushing radially away from an apex placed just outside ``tau``.
Running the steps one after another contracts the whole complex to a vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .concepts import Partial, indices_of
from .complexes import CubicalComplex, Point, as_point

ONE = Fraction(1)


@dataclass(frozen=True)
class CollapseSequence:
    steps: tuple[tuple[Partial, Partial], ...]  # (cube, free face)
    ok: bool
    remaining: frozenset = field(default_factory=frozenset)
    nodes: int = 0

    @property
    def base(self) -> Partial | None:
        if self.ok and len(self.remaining) == 1:
            return next(iter(self.remaining))
        return None

    def __len__(self) -> int:
        return len(self.steps)


def _free_pairs(cubes: frozenset) -> list[tuple[Partial, Partial]]:
    cofaces: dict[Partial, list[Partial]] = {}
    for c in cubes:
        for i in indices_of(((1 << c.n) - 1) & ~c.support):
            for s in (1, -1):
                cofaces.setdefault(c.fix(i, s), []).append(c)
    out = []
    for tau, cs in cofaces.items():
        if len(cs) == 1 and tau in cubes:
            c = cs[0]
            # tau must not be a face of any other cube of higher dimension
            out.append((c, tau))
    out.sort(key=lambda p: (-p[0].free, str(p[0]), str(p[1])))
    return [p for p in out if _only_coface(cubes, p[1], p[0])]


def _only_coface(cubes: frozenset, tau: Partial, c: Partial) -> bool:
    return all(g == c or g == tau or not tau.extends(g) for g in cubes)


def collapse_search(Q: CubicalComplex | Iterable[Partial], budget: int = 20000) -> CollapseSequence:
    """Find a collapse of Q down to a single vertex.

    Greedy choice of free pairs (largest cube first) with depth-first
    backtracking bounded by ``budget`` visited states.  Failure is returned,
    not raised, together with the complex where the search got stuck.
    """
    cubes = frozenset(Q.cubes if isinstance(Q, CubicalComplex) else Q)
    if not cubes:
        return CollapseSequence((), False, cubes, 0)
    nodes = 0
    seen: set[frozenset] = set()
    stack = [(cubes, ())]
    stuck = cubes
    while stack:
        cur, steps = stack.pop()
        nodes += 1
        if len(cur) == 1:
            return CollapseSequence(tuple(steps), True, cur, nodes)
        if nodes > budget:
            break
        pairs = _free_pairs(cur)
        if not pairs:
            if len(cur) < len(stuck) or stuck is cubes:
                stuck = cur
            continue
        for c, tau in reversed(pairs):
            nxt = cur - {c, tau}
            if nxt in seen:
                continue
            seen.add(nxt)
            stack.append((nxt, steps + ((c, tau),)))
    return CollapseSequence((), False, stuck, nodes)


# ---------------------------------------------------------------------------
# geometry of a single collapse


def _in_cube(y: Sequence[Fraction], c: Partial) -> bool:
    for i in indices_of(c.support):
        if y[i] != c.value(i):
            return False
    return True


def collapse_retraction(c: Partial, tau: Partial, y: Point) -> Point:
    """Push y in c away from the apex beyond tau onto the rest of the boundary."""
    if not _in_cube(y, c):
        return y
    (x,) = indices_of(tau.support & ~c.support)
    s = tau.value(x)
    free = indices_of(((1 << c.n) - 1) & ~c.support)
    # apex: center of tau moved outward to 2s along x
    t = Fraction(3) / (2 - s * y[x])
    for z in free:
        if z != x and y[z] != 0:
            t = min(t, ONE / abs(y[z]))
    out = list(y)
    for z in free:
        p = 2 * s if z == x else Fraction(0)
        out[z] = p + t * (y[z] - p)
    return tuple(out)


@dataclass
class Contraction:
    """Straight-line homotopy through the collapse steps, ending at ``base``."""

    steps: tuple[tuple[Partial, Partial], ...]
    base: Partial

    @property
    def base_point(self) -> Point:
        return tuple(Fraction(self.base.value(i)) for i in range(self.base.n))

    def at(self, y: Sequence[Fraction], u: Fraction) -> Point:
        """H(y, u) for u in [0, 1]; H(., 0) = id and H(., 1) = base."""
        y = as_point(y)
        u = Fraction(u)
        m = len(self.steps)
        if m == 0:
            return self.base_point if u == 1 else y
        if u >= 1:
            k, frac = m - 1, ONE
        else:
            k = int(u * m)
            frac = u * m - k
        for c, tau in self.steps[:k]:
            y = collapse_retraction(c, tau, y)
        c, tau = self.steps[k]
        r = collapse_retraction(c, tau, y)
        if frac == 1:
            return r
        return tuple((1 - frac) * a + frac * b for a, b in zip(y, r))


def build_contraction(seq: CollapseSequence, eps: Fraction) -> "ModifiedContraction":
    if not seq.ok:
        raise ValueError("collapse sequence did not reach a vertex")
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    return ModifiedContraction(Contraction(seq.steps, seq.base), eps)


@dataclass
class ModifiedContraction:
    """Identity for t <= 1 - eps, then the full contraction on [1 - eps, 1]."""

    contraction: Contraction
    eps: Fraction

    def __call__(self, y: Sequence[Fraction], t: Fraction) -> Point:
        t = Fraction(t)
        if t <= 1 - self.eps:
            return as_point(y)
        return self.contraction.at(y, (t - 1 + self.eps) / self.eps)

    @property
    def base_point(self) -> Point:
        return self.contraction.base_point
