"""Step counts of CRM, product-space CRM, MAP and DR on generated instances.

Usage: python3 scripts/compare_methods.py [--count 200] [--max-iters 10000] [--out results.csv]
"""
import argparse
import csv
import sys
from collections import Counter

import numpy as np

from circumfeas.crm import RUNNERS
from circumfeas.errors import OperatorUndefined
from circumfeas.scenarios import GENERATORS


def run_one(method, scn, x, max_iters):
    try:
        t = RUNNERS[method](scn.set_a, scn.set_b, x, scn.tol, max_iters)
        return t.terminated.value, t.iterations_used
    except OperatorUndefined as exc:
        return "OperatorUndefined", exc.trace.iterations_used if exc.trace else 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--out", default=None)
    args = p.parse_args(argv)

    rows = []
    for gen in ("random_cone_pair_r2", "random_polyhedra_r2", "random_proper_cone_pair_r3"):
        for method in RUNNERS:
            outcomes, steps = Counter(), []
            for seed in range(args.count):
                scn = GENERATORS[gen](seed)
                for x in scn.initial_points:
                    term, used = run_one(method, scn, x, args.max_iters)
                    outcomes[term] += 1
                    if term == "Feasible":
                        steps.append(used)
            s = np.array(steps) if steps else np.zeros(1)
            rows.append([gen, method, sum(outcomes.values()), outcomes["Feasible"], outcomes["MaxIters"],
                         outcomes["OperatorUndefined"], int(np.median(s)), int(s.max())])
    header = ["generator", "method", "runs", "feasible", "max_iters", "undefined", "median_steps", "max_steps"]
    w = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


if __name__ == "__main__":
    main()
