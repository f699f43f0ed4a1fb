"""Independent oracle runs whose results are frozen into tests/golden.

Nothing here calls the library's geometry: inventories come from brute force
over sign words, distances from scipy's floating LP solver.  The library's
exact values are then checked against these in the test suite.
"""
import argparse
import itertools
import json
import os
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

F5 = ["++-", "+++", "+-+", "--+", "-++"]


def thresholds(t):
    n = t - 1
    return ["".join("+" if x <= j else "-" for x in range(1, n + 1)) for j in range(t)]


def matches(word, c):
    return all(a == "*" or a == b for a, b in zip(word, c))


def realizable(C):
    n = len(C[0])
    return [w for w in map("".join, itertools.product("+-*", repeat=n)) if any(matches(w, c) for c in C)]


def cubes(C):
    n = len(C[0])
    out = []
    for w in map("".join, itertools.product("+-*", repeat=n)):
        free = [i for i, a in enumerate(w) if a == "*"]
        ok = True
        for bits in itertools.product("+-", repeat=len(free)):
            c = list(w)
            for i, b in zip(free, bits):
                c[i] = b
            if "".join(c) not in C:
                ok = False
                break
        if ok:
            out.append(w)
    return out


def delta_point(w):
    k = sum(a != "*" for a in w)
    return [0.0 if a == "*" else (1.0 if a == "+" else -1.0) / k for a in w]


def extends(a, b):
    return all(y == "*" or x == y for x, y in zip(a, b))


def delta1(C):
    """Vertices and facets of the first subdivision: maximal chains of realizable partials."""
    n = len(C[0])
    verts = [w for w in realizable(C) if w != "*" * n]
    index = {w: i for i, w in enumerate(verts)}
    facets = set()
    for c in C:
        for perm in itertools.permutations(range(n)):
            chain = []
            w = ["*"] * n
            for i in perm:
                w[i] = c[i]
                chain.append(index["".join(w)])
            facets.add(tuple(sorted(chain)))
    return verts, [list(f) for f in sorted(facets)], [delta_point(v) for v in verts]


def delta0(C):
    n = len(C[0])
    verts = [w for w in realizable(C) if sum(a != "*" for a in w) == 1]
    index = {w: i for i, w in enumerate(verts)}
    facets = []
    for c in C:
        facets.append(sorted(index["*" * i + c[i] + "*" * (n - i - 1)] for i in range(n)))
    return verts, facets, [delta_point(v) for v in verts]


def l1_lp(P, Q):
    P, Q = np.array(P, float), np.array(Q, float)
    a, b, d = len(P), len(Q), P.shape[1]
    nv = a + b + d
    c = np.zeros(nv)
    c[a + b:] = 1
    A_ub, b_ub = [], []
    for k in range(d):
        row = np.zeros(nv)
        row[:a] = P[:, k]
        row[a:a + b] = -Q[:, k]
        r1 = row.copy()
        r1[a + b + k] = -1
        r2 = -row
        r2[a + b + k] = -1
        A_ub += [r1, r2]
        b_ub += [0, 0]
    A_eq = np.zeros((2, nv))
    A_eq[0, :a] = 1
    A_eq[1, a:a + b] = 1
    res = linprog(c, A_ub=np.array(A_ub), b_ub=b_ub, A_eq=A_eq, b_eq=[1, 1], bounds=(0, None), method="highs")
    return res.fun


def faces_of(facets):
    out = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            out.update(itertools.combinations(f, k))
    return out


def min_separation(facets, coords):
    fs = sorted(faces_of(facets))
    best = float("inf")
    for A, B in itertools.combinations(fs, 2):
        if set(A) & set(B):
            continue
        best = min(best, l1_lp([coords[i] for i in A], [coords[i] for i in B]))
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "golden"))
    args = ap.parse_args()
    inv = {
        "realizable_partials": sorted(realizable(F5)),
        "delta_vertices": sorted(w for w in realizable(F5) if sum(a != "*" for a in w) == 1),
        "delta_maximal_faces": sorted(F5),
        "cubes": sorted(cubes(F5)),
        "cube_vertices": sorted(w for w in cubes(F5) if "*" not in w),
        "cube_edges": sorted(w for w in cubes(F5) if w.count("*") == 1),
        "cube_squares": sorted(w for w in cubes(F5) if w.count("*") == 2),
        "delta1_vertex_count": len(delta1(F5)[0]),
        "delta1_facet_count": len(delta1(F5)[1]),
        "gamma1_vertex_count": len(cubes(F5)),
    }
    seps = {}
    for name, (verts, facets, coords) in {
        "delta1_f5": delta1(F5),
        "delta1_t4": delta1(thresholds(4)),
        "delta0_cube2": delta0(["++", "+-", "-+", "--"]),
    }.items():
        v = min_separation(facets, coords)
        seps[name] = {"float": v, "rational": str(Fraction(v).limit_denominator(10000))}
    with open(os.path.join(args.out, "f5_inventory.json"), "w") as fh:
        json.dump(inv, fh, indent=1, sort_keys=True)
    with open(os.path.join(args.out, "separations.json"), "w") as fh:
        json.dump(seps, fh, indent=1, sort_keys=True)
    print(json.dumps({"inventory": {k: v for k, v in inv.items() if "count" in k}, "separations": seps}, indent=1))


if __name__ == "__main__":
    main()
