"""List sizes of the cover learner on a few extremal classes."""
import argparse
from fractions import Fraction

from scdim.concepts import generate
from scdim.learner import run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("classes", nargs="*", default=["thresholds:5", "f5", "cube:3", "downward:4:1"])
    ap.add_argument("--eps", default="1/20")
    ap.add_argument("--delta", default="1/20")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--calibrate", action="store_true")
    args = ap.parse_args()
    for desc in args.classes:
        rep = run_experiment(generate(desc), Fraction(args.eps), Fraction(args.delta), args.trials, args.runs,
                             args.seed, args.calibrate)
        a = rep.aggregate
        print(f"{desc:<14} n={rep.config['sample_size']:.3e} list {a['max_list_size']}/{a['list_bound']} "
              f"loss viol {a['loss_violations']} delta viol {a['delta_violations']} ok={rep.ok}")


if __name__ == "__main__":
    main()
