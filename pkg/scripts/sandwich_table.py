"""Certificate lower bound, cover upper bound and VC for the generator families."""
import argparse
import sys
import time

sys.path.insert(0, "tests")
from test_acceptance import (box_classes, downward_classes, halfspace_classes,  # noqa: E402
                             median_classes, threshold_classes)

from scdim.concepts import is_extremal, vc_dim  # noqa: E402
from scdim.covers import certify  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--audit", type=int, default=50)
    args = ap.parse_args()
    fams = {"thresholds": threshold_classes, "boxes": box_classes, "downward": downward_classes,
            "median": median_classes, "halfspaces": halfspace_classes}
    print(f"{'family':<11} {'#':>2} {'|X|':>3} {'|C|':>4} {'VC':>3} {'ext':>4} {'low':>4} {'up':>3} {'sec':>6}")
    for name, fam in fams.items():
        for k, E in enumerate(fam()):
            t = time.time()
            ext = is_extremal(E)
            r = certify(E, audit_points=args.audit) if ext else {}
            print(f"{name:<11} {k:>2} {E.n:>3} {len(E):>4} {vc_dim(E):>3} {'yes' if ext else 'no':>4} "
                  f"{str(r.get('lower', '-')):>4} {str(r.get('upper', '-')):>3} {time.time() - t:>6.2f}")


if __name__ == "__main__":
    main()
