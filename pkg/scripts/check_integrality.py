"""Desk-scale integrality checks for the three relief models.

Prints TU verdicts for the model matrices and scans seeded k-medoid
instances for fractional LP optima, writing any it finds as JSON.

    python scripts/check_integrality.py [--seeds 200] [--max-n 25] [--out results/kmedoid_gaps.json]
"""

import argparse
import json

import numpy as np

from relieflp.fileio import instance_to_dict
from relieflp.harness import gen_kmedoid_instance
from relieflp.lp import solve_simplex
from relieflp.models import (build_expendable_matrix, build_kmedoid, build_kmedoid_reduced_matrix,
                             build_nonexpendable_matrix, kmedoid_reduced_b)
from relieflp.oracle import oracle_kmedoid
from relieflp.tu import is_tu_exhaustive, is_tu_ghouila_houri


def tu_table():
    for name, build in (("expendable", build_expendable_matrix), ("non-expendable", build_nonexpendable_matrix)):
        for m in range(1, 4):
            for n in range(1, 4):
                print(f"{name:>15} {m}x{n}: {'TU' if is_tu_exhaustive(build(m, n)).is_tu else 'NOT TU'}")
    for n in (2, 3):
        print(f"reduced k-medoid n={n}: {'TU' if is_tu_exhaustive(build_kmedoid_reduced_matrix(n)).is_tu else 'NOT TU'}")
    rep = is_tu_ghouila_houri(build_kmedoid_reduced_matrix(4), "sampled", trials=100_000)
    print(f"reduced k-medoid n=4 (sampled): {'no violation seen' if rep.is_tu else f'violation at columns {rep.witness.cols}'}")
    rep = is_tu_ghouila_houri(kmedoid_reduced_b(4), "all")
    print(f"folded [I C] n=4 (all {rep.examined} subsets): {'TU' if rep.is_tu else 'NOT TU'}")


def gap_scan(seeds, max_n, out):
    rng = np.random.default_rng(0)
    gaps = []
    for seed in range(seeds):
        n = int(rng.integers(4, max_n + 1))
        k = int(rng.integers(2, min(5, n - 1) + 1))
        inst = gen_kmedoid_instance(n, seed, k)
        lp = solve_simplex(build_kmedoid(inst))
        if lp.integrality().is_integral:
            continue
        ref, medoids = oracle_kmedoid(inst)
        gaps.append({"seed": seed, "n": n, "k": k, "lp": lp.objective, "integer": ref,
                     "medoids": list(medoids), "instance": instance_to_dict(inst)})
        print(f"seed {seed}: n={n} k={k} LP {lp.objective:.6f} < integer {ref:.6f}")
    print(f"{len(gaps)}/{seeds} instances with a fractional LP optimum")
    with open(out, "w") as fh:
        json.dump(gaps, fh, indent=1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=25)
    ap.add_argument("--out", default="results/kmedoid_gaps.json")
    args = ap.parse_args()
    tu_table()
    gap_scan(args.seeds, args.max_n, args.out)


if __name__ == "__main__":
    main()
