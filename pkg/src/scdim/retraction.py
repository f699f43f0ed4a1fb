"""Retraction of the simplicial complex of an extremal class onto its cubes.

Points of Delta_{E,1} are peeled one chain element at a time.  If the minimal
element ``w`` of the carrier chain is a cube the point already lies in the
embedded cubical complex.  Otherwise the point is a cone point
``alpha u_w + (1 - alpha) mu'`` over the link; ``mu'`` is retracted first and
the result is then moved by the contraction of the cubes extending ``w``,
which only acts once ``alpha`` exceeds ``1 - eps``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .collapse import ModifiedContraction, build_contraction, collapse_search
from .complexes import (OutsideComplexError, Point, as_point, cubes_of, delta_point,
                        in_gamma_tilde, l1, normalize, realizable_partials, unnormalize)
from .concepts import ConceptClass, Partial, is_extremal, is_realizable
from .starcover import StarCover, build_star_cover, loss_of

ZERO = Fraction(0)
ONE = Fraction(1)


class RetractionError(RuntimeError):
    def __init__(self, message: str, w: Partial | None = None):
        super().__init__(message if w is None else f"{message} (at {w})")
        self.w = w


def delta_chain(mu: Sequence[Fraction]) -> list[tuple[Partial, Fraction]]:
    """Carrier chain of mu in Delta_{C,1}, minimal element first.

    The element for level a fixes every coordinate with |mu_x| >= a; its
    weight is (size of its support) times the gap to the next level.
    """
    n = len(mu)
    levels = sorted({abs(v) for v in mu if v}, reverse=True)
    out = []
    for j, a in enumerate(levels):
        nxt = levels[j + 1] if j + 1 < len(levels) else ZERO
        support = signs = 0
        for i, v in enumerate(mu):
            if abs(v) >= a:
                support |= 1 << i
                if v > 0:
                    signs |= 1 << i
        h = Partial(n, support, signs)
        out.append((h, h.size * (a - nxt)))
    return out


def h_of(mu: Sequence[Fraction]) -> Partial:
    return delta_chain(mu)[0][0]


def claim_separation(E: ConceptClass, cubes: frozenset | None = None) -> Fraction:
    """Smallest l1 gap between sigma_g and the embedded cubes extending w,
    over realizable non-cube w and concepts g that do not extend w.

    On each embedded simplex d(., sigma_g) = 2 loss(., g) is linear, so the
    minimum sits at a vertex u_h with h a cube extending w.
    """
    cubes = cubes if cubes is not None else frozenset(cubes_of(E))
    best = None
    for w in realizable_partials(E):
        if w.size == 0 or w in cubes:
            continue
        above = [h for h in cubes if h.extends(w) and h.size > 0]
        for g in E.concepts:
            if w.matches(g):
                continue
            for h in above:
                v = 2 * loss_of(delta_point(h), g)
                if best is None or v < best:
                    best = v
    return best if best is not None else Fraction(2)


@dataclass
class Retraction:
    klass: ConceptClass
    eps0: Fraction
    eps: Fraction
    gamma: Fraction
    cubes: frozenset
    contractions: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.klass.n

    def contraction(self, w: Partial) -> ModifiedContraction:
        H = self.contractions.get(w)
        if H is None:
            sub = [h for h in self.cubes if h.extends(w)]
            seq = collapse_search(sub)
            if not seq.ok:
                raise RetractionError("collapse search failed", w)
            H = build_contraction(seq, self.eps)
            self.contractions[w] = H
        return H

    def __call__(self, mu: Sequence[Fraction]) -> Point:
        return self._apply(as_point(mu), None)

    def _apply(self, mu: Point, trace: list | None) -> Point:
        if l1(mu) != 1:
            raise OutsideComplexError("point does not have unit l1 norm")
        chain = delta_chain(mu)
        w, alpha = chain[0]
        if w in self.cubes:
            if trace is not None:
                trace.append({"w": str(w), "cube": True})
            return mu
        if not is_realizable(w, self.klass):
            raise OutsideComplexError(f"sign pattern {w} is not realizable")
        H = self.contraction(w)
        if trace is not None:
            trace.append({"w": str(w), "alpha": alpha})
        if alpha == 1:
            return normalize(H.base_point)
        uw = delta_point(w)
        rest = tuple((m - alpha * u) / (1 - alpha) for m, u in zip(mu, uw))
        nu = self._apply(rest, trace)
        if alpha <= 1 - self.eps:
            return nu
        return normalize(H(unnormalize(nu), alpha))

    def trace(self, mu: Sequence[Fraction]) -> list[dict]:
        steps: list[dict] = []
        self._apply(as_point(mu), steps)
        return steps

    def in_image(self, mu: Sequence[Fraction]) -> bool:
        return in_gamma_tilde(as_point(mu), self.cubes)

    def property1(self, mu: Sequence[Fraction]) -> bool:
        """f(mu) lies in the embedded cubes extending h[mu]."""
        mu = as_point(mu)
        out = self(mu)
        hm = h_of(mu)
        low = h_of(out)
        return low in self.cubes and low.extends(hm)


class IdentityRetraction:
    """For the full cube: Delta is the boundary sphere and every nonempty
    partial concept is a cube of the boundary, so the retraction is trivial."""

    def __init__(self, E: ConceptClass, eps0: Fraction):
        self.klass = E
        self.eps0 = Fraction(eps0)
        self.eps = self.eps0 / 4
        self.gamma = Fraction(2)
        self.cubes = frozenset(h for h in cubes_of(E) if h.size > 0)

    @property
    def n(self) -> int:
        return self.klass.n

    def __call__(self, mu):
        mu = as_point(mu)
        if l1(mu) != 1:
            raise OutsideComplexError("point does not have unit l1 norm")
        return mu

    def trace(self, mu):
        return [{"w": str(h_of(as_point(mu))), "cube": True}]

    def in_image(self, mu):
        return l1(as_point(mu)) == 1

    def property1(self, mu):
        return True


def build_retraction(E: ConceptClass, eps0: Fraction, eps: Fraction | None = None,
                     boundary_for_cube: bool = False, eager: bool = True):
    """Return (f, star cover) for an extremal class.

    ``eps`` defaults to half of min(separation, eps0 / 2).  The full cube is
    rejected unless ``boundary_for_cube`` asks for the boundary construction.
    """
    eps0 = Fraction(eps0)
    if not is_extremal(E):
        raise ValueError("class is not extremal")
    if E.is_cube():
        if not boundary_for_cube:
            raise ValueError("the full cube has no retraction onto its cubes")
        f = IdentityRetraction(E, eps0)
        return f, build_star_cover(E, f.eps, f.cubes)
    cubes = frozenset(cubes_of(E))
    gamma = claim_separation(E, cubes)
    bound = min(gamma, eps0 / 2)
    if eps is None:
        eps = bound / 2
    eps = Fraction(eps)
    if not 0 < eps < bound:
        raise ValueError("eps must be below min(separation, eps0 / 2)")
    f = Retraction(E, eps0, eps, gamma, cubes)
    if eager:
        for w in realizable_partials(E):
            if w.size and w not in cubes:
                f.contraction(w)
    return f, build_star_cover(E, eps, cubes)
