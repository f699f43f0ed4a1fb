"""An open cover of the cubical complex by labelled vertex stars.

Every cube of the complex is cut by the hyperplanes y_x in {-1, -t, 0, t, 1}
along its free coordinates.  The cells of this grid are then barycentrically
subdivided.  Each vertex of the subdivision is the barycenter of a cell and
receives the concept that completes the cell's carrier cube by the signs of
the barycenter (zero counts as +1).  ``U_g`` is the union of the open stars of
the vertices labelled ``g``.

A point lies in the open stars of its carrier vertices only, and a carrier has
at most dim + 1 vertices, so the order is at most the dimension.  Taking t
small against eps keeps every star inside the eps-dilation of the simplex of
its label once mapped to the l1 sphere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .concepts import ConceptClass, Partial, indices_of
from .complexes import OutsideComplexError, Point, as_point, carrier_cube, normalize

ZERO = Fraction(0)
ONE = Fraction(1)

Cell = tuple[int, ...]  # one code in 0..8 per coordinate


def loss_of(mu: Sequence[Fraction], g: int) -> Fraction:
    """Mass of mu on coordinates where its sign disagrees with concept g."""
    out = ZERO
    for i, v in enumerate(mu):
        if v > 0 and not (g >> i) & 1:
            out += v
        elif v < 0 and (g >> i) & 1:
            out -= v
    return out


@dataclass
class StarCover:
    klass: ConceptClass
    cubes: frozenset
    eps: Fraction
    t: Fraction
    cells: dict  # cell -> label index
    maximal_cells: tuple

    @property
    def labels(self) -> tuple[int, ...]:
        return self.klass.concepts

    @property
    def n(self) -> int:
        return self.klass.n

    @property
    def dim(self) -> int:
        return max(h.free for h in self.cubes)

    # -- grid geometry --------------------------------------------------
    def breakpoints(self) -> tuple[Fraction, ...]:
        return (-ONE, -self.t, ZERO, self.t, ONE)

    def code_of(self, v: Fraction) -> int:
        b = self.breakpoints()
        for j, bj in enumerate(b):
            if v == bj:
                return 2 * j
            if v < bj:
                return 2 * j - 1
        raise OutsideComplexError("coordinate exceeds 1")

    def interval(self, code: int) -> tuple[Fraction, Fraction]:
        b = self.breakpoints()
        if code % 2 == 0:
            return b[code // 2], b[code // 2]
        return b[code // 2], b[code // 2 + 1]

    def barycenter(self, cell: Cell) -> Point:
        return tuple((lo + hi) / 2 for lo, hi in (self.interval(c) for c in cell))

    def label_of(self, cell: Cell) -> int:
        g = 0
        for i, c in enumerate(cell):
            if c == 8 or (c != 0 and c >= 4):
                g |= 1 << i
        return g

    # -- carriers -------------------------------------------------------
    def carrier(self, y: Sequence[Fraction]) -> list[tuple[Cell, Fraction]]:
        """Vertices (cells) of the subdivision carrying y, with weights."""
        y = as_point(y)
        if carrier_cube(y) not in self.cubes:
            raise OutsideComplexError("point is not in the cubical complex")
        cell = tuple(self.code_of(v) for v in y)
        tn = {}
        for i, c in enumerate(cell):
            if c % 2:
                lo, hi = self.interval(c)
                mid, half = (lo + hi) / 2, (hi - lo) / 2
                tn[i] = (y[i] - mid) / half
        levels = sorted({abs(v) for v in tn.values() if v}, reverse=True)
        out = []
        top = ONE - (levels[0] if levels else ZERO)
        if top > 0:
            out.append((cell, top))
        bounds = levels + [ZERO]
        for j, a in enumerate(levels):
            face = list(cell)
            for i, v in tn.items():
                if abs(v) >= a:
                    face[i] = cell[i] + (1 if v > 0 else -1)
            out.append((tuple(face), a - bounds[j + 1]))
        return out

    def labels_at(self, y: Sequence[Fraction]) -> set[int]:
        return {self.cells[c] for c, _ in self.carrier(y)}

    def dual_labels_at(self, y: Sequence[Fraction]) -> set[int]:
        car = self.carrier(y)
        m = max(w for _, w in car)
        return {self.cells[c] for c, w in car if w == m}

    def contains(self, g: int, y: Sequence[Fraction]) -> bool:
        return g in self.labels_at(y)

    # -- combinatorics --------------------------------------------------
    def chains(self) -> Iterable[list[Cell]]:
        """Maximal simplices of the subdivision as chains of cells, top first."""
        for top in self.maximal_cells:
            odd = [i for i, c in enumerate(top) if c % 2]
            for order in itertools.permutations(odd):
                for dirs in itertools.product((1, -1), repeat=len(order)):
                    cell = list(top)
                    chain = [top]
                    for i, s in zip(order, dirs):
                        cell[i] += s
                        chain.append(tuple(cell))
                    yield chain

    def exact_order(self) -> int:
        best = 0
        cap = self.dim + 1
        for chain in self.chains():
            k = len({self.cells[c] for c in chain})
            if k > best:
                best = k
                if best >= cap:
                    break
        return best - 1

    def faces_of(self, cell: Cell) -> Iterable[Cell]:
        """The cell and all its faces: odd codes may drop to either neighbour."""
        opts = [(c,) if c % 2 == 0 else (c, c - 1, c + 1) for c in cell]
        return itertools.product(*opts)

    def verify(self) -> tuple[bool, Fraction]:
        """Check that each star maps into the eps-dilation of its label's simplex.

        d(mu, sigma_g) = 2 loss(mu, g) on the sphere, and on a grid cell this
        is a ratio of linear forms, so the vertices of each star decide it.
        Two cells share a simplex exactly when one is a face of the other.
        """
        worst = ZERO
        point = {}

        def at(c):
            if c not in point:
                point[c] = normalize(self.barycenter(c))
            return point[c]

        for Q in self.cells:
            gq = self.cells[Q]
            for P in self.faces_of(Q):
                worst = max(worst, 2 * loss_of(at(Q), self.cells[P]), 2 * loss_of(at(P), gq))
        return worst < self.eps, worst

    def toward_zero_chain(self, top: Cell) -> list[Cell]:
        """One chain below a top cell, stepping every free code toward 0."""
        chain = [top]
        cell = list(top)
        for i, c in enumerate(top):
            if c % 2:
                cell[i] = c + 1 if c < 4 else c - 1
                chain.append(tuple(cell))
        return chain


def _cells_of_cube(c: Partial) -> list[Cell]:
    n = c.n
    free = indices_of(((1 << n) - 1) & ~c.support)
    out = []
    for codes in itertools.product(range(1, 8), repeat=len(free)):
        cell = [0] * n
        for i in range(n):
            if (c.support >> i) & 1:
                cell[i] = 8 if c.value(i) > 0 else 0
        for i, k in zip(free, codes):
            cell[i] = k
        out.append(tuple(cell))
    return out


def build_star_cover(E: ConceptClass, eps: Fraction, cubes: Iterable[Partial]) -> StarCover:
    """Star cover for the cube set ``cubes`` (a subcomplex of the class's cubes)."""
    cubes = frozenset(cubes)
    eps = Fraction(eps)
    d = max(h.free for h in cubes)
    t = eps / (4 * max(d, 1))
    cells: dict[Cell, int] = {}
    tops = []
    for c in sorted(cubes, key=lambda h: (-h.free, h.support, h.signs)):
        maximal = not any(g != c and c.extends(g) for g in cubes)
        for cell in _cells_of_cube(c):
            if cell not in cells:
                cells[cell] = 0
                if maximal and all(k % 2 for i, k in enumerate(cell) if not (c.support >> i) & 1):
                    tops.append(cell)
    sc = StarCover(E, cubes, eps, t, {}, tuple(tops))
    index = {g: k for k, g in enumerate(E.concepts)}
    for cell in cells:
        g = sc.label_of(cell)
        if g not in index:
            raise ValueError(f"label of cell {cell} is not in the class")
        cells[cell] = g
    sc.cells = cells
    return sc
