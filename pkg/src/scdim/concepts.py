"""Finite concept classes over an indexed domain.

Concepts are stored as bitmasks: bit ``i`` is set when the concept labels
domain element ``i`` with +1.  A partial concept is a pair of masks
``(support, signs)`` with ``signs`` a subset of ``support``.  String forms use
one character per domain element, ``'+'``, ``'-'`` and ``'*'``.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class ClassFormatError(ValueError):
    """Raised for malformed class files, with a location when one is known."""

    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}, offset {offset})"
        super().__init__(message + loc)
        self.line = line
        self.offset = offset


def _popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Domain:
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("domain must have at least one element")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("domain labels must be unique")

    @property
    def size(self) -> int:
        return len(self.labels)

    @classmethod
    def standard(cls, n: int) -> "Domain":
        return cls(tuple(f"x{i + 1}" for i in range(n)))


@dataclass(frozen=True, order=True)
class Partial:
    """A labeling in {+1, -1, *}^X, stored as (support, signs) masks."""

    n: int
    support: int
    signs: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.support & ~full or self.signs & ~self.support:
            raise ValueError("signs must lie inside the support")

    @classmethod
    def parse(cls, text: str) -> "Partial":
        support = signs = 0
        for i, ch in enumerate(text):
            if ch == "+":
                support |= 1 << i
                signs |= 1 << i
            elif ch == "-":
                support |= 1 << i
            elif ch != "*":
                raise ValueError(f"bad character {ch!r} at offset {i}")
        return cls(len(text), support, signs)

    @classmethod
    def total(cls, n: int, concept: int) -> "Partial":
        return cls(n, (1 << n) - 1, concept)

    @classmethod
    def empty(cls, n: int) -> "Partial":
        return cls(n, 0, 0)

    def __str__(self) -> str:
        out = []
        for i in range(self.n):
            if not (self.support >> i) & 1:
                out.append("*")
            else:
                out.append("+" if (self.signs >> i) & 1 else "-")
        return "".join(out)

    def value(self, i: int) -> int:
        if not (self.support >> i) & 1:
            return 0
        return 1 if (self.signs >> i) & 1 else -1

    @property
    def size(self) -> int:
        return _popcount(self.support)

    @property
    def free(self) -> int:
        return self.n - self.size

    @property
    def is_total(self) -> bool:
        return self.support == (1 << self.n) - 1

    def extends(self, other: "Partial") -> bool:
        return extends(self, other)

    def matches(self, concept: int) -> bool:
        return (concept ^ self.signs) & self.support == 0

    def join(self, other: "Partial") -> "Partial":
        if (self.signs ^ other.signs) & self.support & other.support:
            raise ValueError("partial concepts conflict")
        return Partial(self.n, self.support | other.support, self.signs | other.signs)

    def fix(self, i: int, sign: int) -> "Partial":
        bit = 1 << i
        return Partial(self.n, self.support | bit, (self.signs | bit) if sign > 0 else (self.signs & ~bit))

    def unfix(self, i: int) -> "Partial":
        bit = 1 << i
        return Partial(self.n, self.support & ~bit, self.signs & ~bit)

    def completions_in_cube(self) -> list[int]:
        free = indices_of(((1 << self.n) - 1) & ~self.support)
        out = []
        for bits in range(1 << len(free)):
            c = self.signs
            for k, i in enumerate(free):
                if (bits >> k) & 1:
                    c |= 1 << i
            out.append(c)
        return out


def extends(h1: Partial, h2: Partial) -> bool:
    """True when h1 agrees with h2 on supp(h2) and supp(h2) is inside supp(h1)."""
    if h1.n != h2.n:
        raise ValueError("domain mismatch")
    if h2.support & ~h1.support:
        return False
    return (h1.signs ^ h2.signs) & h2.support == 0


def concept_str(c: int, n: int) -> str:
    return "".join("+" if (c >> i) & 1 else "-" for i in range(n))


def parse_concept(text: str) -> int:
    c = 0
    for i, ch in enumerate(text):
        if ch == "+":
            c |= 1 << i
        elif ch != "-":
            raise ValueError(f"bad character {ch!r} at offset {i}")
    return c


@dataclass(frozen=True)
class ConceptClass:
    domain: Domain
    concepts: tuple[int, ...]

    def __post_init__(self):
        if not self.concepts:
            raise ValueError("a concept class must be nonempty")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("duplicate concepts")
        full = (1 << self.domain.size) - 1
        for c in self.concepts:
            if c & ~full:
                raise ValueError("concept does not fit the domain")

    @property
    def n(self) -> int:
        return self.domain.size

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    def __contains__(self, c: int) -> bool:
        return c in self._set

    @property
    def _set(self) -> frozenset[int]:
        s = self.__dict__.get("_cset")
        if s is None:
            s = frozenset(self.concepts)
            object.__setattr__(self, "_cset", s)
        return s

    @classmethod
    def from_strings(cls, words: Sequence[str], labels: Sequence[str] | None = None) -> "ConceptClass":
        if not words:
            raise ValueError("a concept class must be nonempty")
        n = len(words[0])
        dom = Domain(tuple(labels)) if labels is not None else Domain.standard(n)
        cs = []
        for w in words:
            if len(w) != n:
                raise ValueError("concepts must share the domain")
            cs.append(parse_concept(w))
        return cls(dom, tuple(cs))

    def strings(self) -> list[str]:
        return [concept_str(c, self.n) for c in self.concepts]

    def is_cube(self) -> bool:
        return len(self.concepts) == 1 << self.n

    def __str__(self) -> str:
        return "{" + ", ".join(self.strings()) + "}"


def _check_index_set(C: ConceptClass, S: Iterable[int]) -> int:
    m = mask_of(S)
    if m & ~((1 << C.n) - 1):
        raise ValueError("index set is not inside the domain")
    return m


def completions(h: Partial, C: ConceptClass) -> list[int]:
    if h.n != C.n:
        raise ValueError("domain mismatch")
    return [c for c in C.concepts if h.matches(c)]


def is_realizable(h: Partial, C: ConceptClass) -> bool:
    return any(h.matches(c) for c in C.concepts)


def shatters(C: ConceptClass, S: Iterable[int]) -> bool:
    m = _check_index_set(C, S)
    return len({c & m for c in C.concepts}) == 1 << _popcount(m)


def strong_witness(C: ConceptClass, S: Iterable[int]) -> int | None:
    """Outside labeling (as a mask on X minus S) that fixes a full copy of {+-}^S, or None."""
    m = _check_index_set(C, S)
    need = 1 << _popcount(m)
    groups: dict[int, int] = {}
    for c in C.concepts:
        key = c & ~m
        groups[key] = groups.get(key, 0) + 1
    best = [k for k, v in groups.items() if v == need]
    return min(best) if best else None


def strongly_shatters(C: ConceptClass, S: Iterable[int]) -> bool:
    return strong_witness(C, S) is not None


def _subsets_by_size(n: int):
    for k in range(n, -1, -1):
        for combo in itertools.combinations(range(n), k):
            yield combo


def vc_dim(C: ConceptClass) -> int:
    for S in _subsets_by_size(C.n):
        if 1 << len(S) <= len(C) and shatters(C, S):
            return len(S)
    return 0


def max_strongly_shattered(C: ConceptClass) -> tuple[int, tuple[int, ...]]:
    """Size of the largest strongly shattered set and the lexicographically first witness."""
    for S in _subsets_by_size(C.n):
        if 1 << len(S) <= len(C) and strongly_shatters(C, S):
            return len(S), S
    return 0, ()


def shattered_sets(C: ConceptClass) -> list[int]:
    return [m for m in range(1 << C.n) if shatters(C, indices_of(m))]


def strongly_shattered_sets(C: ConceptClass) -> list[int]:
    return [m for m in range(1 << C.n) if strongly_shatters(C, indices_of(m))]


def is_extremal(C: ConceptClass) -> bool:
    for m in range(1 << C.n):
        S = indices_of(m)
        if shatters(C, S) and not strongly_shatters(C, S):
            return False
    return True


def restrict_class(C: ConceptClass, S: Iterable[int]) -> ConceptClass:
    idx = sorted(set(S))
    if not idx:
        raise ValueError("restriction to the empty set is not a concept class")
    _check_index_set(C, idx)
    seen: dict[int, None] = {}
    for c in C.concepts:
        r = 0
        for k, i in enumerate(idx):
            if (c >> i) & 1:
                r |= 1 << k
        seen.setdefault(r, None)
    labels = tuple(C.domain.labels[i] for i in idx)
    return ConceptClass(Domain(labels), tuple(seen))


def h_restriction(E: ConceptClass, h: Partial) -> ConceptClass:
    sub = completions(h, E)
    if not sub:
        raise ValueError(f"partial concept {h} is not realizable by the class")
    return ConceptClass(E.domain, tuple(sub))


def dual_class(C: ConceptClass) -> ConceptClass:
    """Transpose of the sign matrix; the new domain is indexed by the concepts of C."""
    rows: dict[int, None] = {}
    for i in range(C.n):
        r = 0
        for j, c in enumerate(C.concepts):
            if (c >> i) & 1:
                r |= 1 << j
        rows.setdefault(r, None)
    labels = tuple(concept_str(c, C.n) for c in C.concepts)
    return ConceptClass(Domain(labels), tuple(rows))


# ---------------------------------------------------------------- generators

def cube(n: int) -> ConceptClass:
    if n < 1:
        raise ValueError("cube needs n >= 1")
    return ConceptClass(Domain.standard(n), tuple(range(1 << n)))


def thresholds(t: int) -> ConceptClass:
    """T_t over the domain {1, ..., t-1}; h_j labels x with +1 iff x <= j."""
    if t < 2:
        raise ValueError("thresholds need t >= 2")
    n = t - 1
    cs = tuple((1 << j) - 1 for j in range(t))
    return ConceptClass(Domain(tuple(str(i + 1) for i in range(n))), cs)


def _as_fraction(v) -> Fraction:
    if isinstance(v, bool):
        raise ValueError("booleans are not coordinates")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return parse_rational(v)
    raise ValueError(f"coordinate {v!r} must be an integer or a 'p/q' string")


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or an integer literal.  Decimal points are refused."""
    s = text.strip()
    if not s or any(ch in s for ch in ".eE"):
        raise ValueError(f"{text!r} is not a rational of the form p/q")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{text!r} is not a rational of the form p/q") from exc


def _points(points, d: int) -> list[tuple[Fraction, ...]]:
    pts = []
    for p in points:
        q = tuple(_as_fraction(v) for v in p)
        if len(q) != d:
            raise ValueError(f"point {p!r} does not have dimension {d}")
        pts.append(q)
    if not pts:
        raise ValueError("need at least one point")
    return pts


def boxes(points, d: int) -> ConceptClass:
    """In/out patterns of axis-parallel boxes on generic points."""
    pts = _points(points, d)
    for a in range(d):
        vals = [p[a] for p in pts]
        if len(set(vals)) != len(vals):
            raise ValueError(f"two points share coordinate {a}")
    m = len(pts)
    ranks = []
    for a in range(d):
        order = sorted(range(m), key=lambda i: pts[i][a])
        r = [0] * m
        for k, i in enumerate(order):
            r[i] = k
        ranks.append(r)
    found = {0}
    intervals = [(lo, hi) for lo in range(m) for hi in range(lo, m)]
    for choice in itertools.product(intervals, repeat=d):
        c = 0
        for i in range(m):
            if all(choice[a][0] <= ranks[a][i] <= choice[a][1] for a in range(d)):
                c |= 1 << i
        found.add(c)
    return ConceptClass(Domain.standard(m), tuple(sorted(found)))


def strict_feasible(rows: Sequence[Sequence[Fraction]]) -> bool:
    """Decide whether {v : a.v > 0 for every row a} is nonempty (Fourier-Motzkin)."""
    cur = []
    for r in rows:
        r = tuple(Fraction(x) for x in r)
        cur.append(r)
    if not cur:
        return True
    d = len(cur[0])
    for k in range(d):
        pos, neg, zero = [], [], []
        for r in cur:
            (pos if r[k] > 0 else neg if r[k] < 0 else zero).append(r)
        nxt = set(_normalize(r) for r in zero)
        for p in pos:
            for q in neg:
                comb = tuple(p[j] * (-q[k]) + q[j] * p[k] for j in range(d))
                nxt.add(_normalize(comb))
        cur = list(nxt)
        if any(all(x == 0 for x in r) for r in cur):
            return False
    return True


def _normalize(r: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    for x in r:
        if x != 0:
            s = abs(x)
            return tuple(y / s for y in r)
    return r


def halfspaces(points, d: int) -> ConceptClass:
    """Sign vectors of homogeneous halfspaces, v -> sign(<v, p_i>)."""
    pts = _points(points, d)
    for p in pts:
        if all(x == 0 for x in p):
            raise ValueError("a point at the origin has no sign")
    m = len(pts)
    found = []
    for c in range(1 << m):
        rows = []
        for i, p in enumerate(pts):
            s = 1 if (c >> i) & 1 else -1
            rows.append(tuple(s * x for x in p))
        if strict_feasible(rows):
            found.append(c)
    return ConceptClass(Domain.standard(m), tuple(found))


def downward_closed(seeds: Iterable[int], n: int) -> ConceptClass:
    """Close the seed under lowering any +1 to -1."""
    out: set[int] = set()
    for s in seeds:
        sub = s
        while True:
            out.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & s
    if not out:
        raise ValueError("need at least one seed concept")
    return ConceptClass(Domain.standard(n), tuple(sorted(out)))


def majority(a: int, b: int, c: int) -> int:
    return (a & b) | (a & c) | (b & c)


def median_closure(C: ConceptClass) -> ConceptClass:
    cur = set(C.concepts)
    while True:
        items = sorted(cur)
        new = set(cur)
        for a, b, c in itertools.combinations(items, 3):
            new.add(majority(a, b, c))
        if new == cur:
            break
        cur = new
    order = list(C.concepts) + sorted(cur - set(C.concepts))
    return ConceptClass(C.domain, tuple(order))


def random_class(n: int, size: int, seed: int) -> ConceptClass:
    rng = random.Random(seed)
    size = max(1, min(size, 1 << n))
    return ConceptClass(Domain.standard(n), tuple(sorted(rng.sample(range(1 << n), size))))


def seeded_downward_closed(n: int, seed: int, k: int = 2) -> ConceptClass:
    """Downward closure of k random seeds; the all-plus seed is skipped so the result is never the cube."""
    rng = random.Random(seed)
    full = (1 << n) - 1
    seeds = [rng.randrange(full) for _ in range(k)]
    return downward_closed(seeds, n)


def seeded_median(n: int, seed: int, size: int = 3) -> ConceptClass:
    """Median closure of a random class, redrawn until the closure is not the cube."""
    rng = random.Random(seed)
    while True:
        base = random_class(n, size, rng.randrange(1 << 30))
        M = median_closure(base)
        if not M.is_cube():
            return M


def generate(descriptor: str, base_dir: str | None = None) -> ConceptClass:
    """Build a class from an inline descriptor such as ``thresholds:5`` or ``cube:3``.

    Recognised forms: ``cube:n``, ``thresholds:t``, ``boxes:FILE``,
    ``halfspaces:FILE``, ``downward:n:seed``, ``median:n:seed``, ``f5``.
    Point files hold ``{"d": 2, "points": [[1, "1/2"], ...]}``.
    """
    parts = descriptor.strip().split(":")
    kind = parts[0].lower()
    try:
        if kind == "cube" and len(parts) == 2:
            return cube(int(parts[1]))
        if kind == "thresholds" and len(parts) == 2:
            return thresholds(int(parts[1]))
        if kind == "f5" and len(parts) == 1:
            return F5()
        if kind in ("boxes", "halfspaces") and len(parts) == 2:
            path = parts[1]
            if base_dir is not None:
                import os
                path = os.path.join(base_dir, path)
            with open(path) as fh:
                doc = json.load(fh)
            fn = boxes if kind == "boxes" else halfspaces
            return fn(doc["points"], int(doc["d"]))
        if kind == "downward" and len(parts) == 3:
            return seeded_downward_closed(int(parts[1]), int(parts[2]))
        if kind == "median" and len(parts) == 3:
            return seeded_median(int(parts[1]), int(parts[2]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad generator input for {descriptor!r}: {exc}") from exc
    raise ValueError(f"unknown generator descriptor {descriptor!r}")


def F5() -> ConceptClass:
    """The five-concept class used throughout the figures."""
    return ConceptClass.from_strings(["++-", "+++", "+-+", "--+", "-++"])


# ---------------------------------------------------------------- file format

def _locate(text: str, needle: str, start: int = 0) -> tuple[int, int]:
    pos = text.find(needle, start)
    if pos < 0:
        return 1, 0
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1)
    return line, col


def loads_class(text: str) -> ConceptClass:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ClassFormatError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict) or "domain" not in data or "concepts" not in data:
        raise ClassFormatError("expected an object with 'domain' and 'concepts'", 1, 0)
    dom = data["domain"]
    words = data["concepts"]
    if not isinstance(dom, list) or not all(isinstance(x, str) for x in dom) or not dom:
        raise ClassFormatError("'domain' must be a nonempty list of names", *_locate(text, '"domain"'))
    if len(set(dom)) != len(dom):
        raise ClassFormatError("domain names must be unique", *_locate(text, '"domain"'))
    if not isinstance(words, list) or not words:
        raise ClassFormatError("'concepts' must be a nonempty list", *_locate(text, '"concepts"'))
    seen: set[str] = set()
    cursor = text.find('"concepts"')
    out = []
    for k, w in enumerate(words):
        if not isinstance(w, str):
            raise ClassFormatError(f"concept #{k} is not a string", *_locate(text, '"concepts"'))
        line, col = _locate(text, '"' + w + '"', max(cursor, 0))
        for j, ch in enumerate(w):
            if ch not in "+-":
                raise ClassFormatError(f"concept #{k} has character {ch!r}; only '+' and '-' allowed",
                                       line, col + 1 + j)
        if len(w) != len(dom):
            raise ClassFormatError(f"concept #{k} has length {len(w)}, domain has {len(dom)}", line, col)
        if w in seen:
            raise ClassFormatError(f"duplicate concept {w!r}", line, col)
        seen.add(w)
        out.append(parse_concept(w))
    return ConceptClass(Domain(tuple(dom)), tuple(out))


def load_class(path: str) -> ConceptClass:
    with open(path) as fh:
        return loads_class(fh.read())


def dumps_class(C: ConceptClass) -> str:
    return json.dumps({"domain": list(C.domain.labels), "concepts": C.strings()})
