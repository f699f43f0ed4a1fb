"""Regenerate regression pins (seeded outputs) in tests/golden."""
import json
import os

from scdim.concepts import F5, thresholds
from scdim.learner import draw_sample, empirical_estimate, random_realizable

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "golden")


def main():
    doc = {}
    for name, C in (("f5", F5()), ("thresholds5", thresholds(5))):
        doc[name] = [random_realizable(C, seed).as_dict() for seed in range(6)]
    mu = random_realizable(thresholds(5), 7)
    S = draw_sample(mu, 10000, 11)
    doc["sample_thresholds5_seed7_n10000_seed11"] = {
        "mu": mu.as_dict(), "mu_hat": empirical_estimate(S).as_dict(),
    }
    with open(os.path.join(OUT, "random_realizable.json"), "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
    print(json.dumps(doc, indent=1)[:600])


if __name__ == "__main__":
    main()
