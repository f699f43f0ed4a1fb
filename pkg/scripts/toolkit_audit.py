"""Closed shrinkage and rounding radius on seeded random open covers."""
import argparse

from scdim.concepts import generate
from scdim.covers import (closed_shrinkage, cover_order, is_shrinkage, random_open_cover, rounding_audit,
                          rounding_radius, witness_points)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gen", default="f5")
    ap.add_argument("--covers", type=int, default=10)
    ap.add_argument("--probes", type=int, default=10000)
    args = ap.parse_args()
    C = generate(args.gen)
    for seed in range(args.covers):
        U = random_open_cover(C, seed)
        F = closed_shrinkage(U)
        W = witness_points(C, F.meta["level"] + 1, 10000, seed)
        beta = rounding_radius(F)
        audit = rounding_audit(F, beta, probes=args.probes, seed=seed)
        print(f"seed {seed:>2}: |U|={len(U)} order U>={cover_order(U, W).order} F={cover_order(F).order} "
              f"shrinkage={is_shrinkage(U, F)} beta={beta} ({F.meta.get('rounding_rule')}) "
              f"violations={audit['violations']} max_met={audit['max_met']}")


if __name__ == "__main__":
    main()
