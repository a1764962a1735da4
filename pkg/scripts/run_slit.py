"""Slit law: Q(1, centre of R) against 1/delta, plus a time sweep for the crossover."""

from __future__ import annotations

import argparse

import numpy as np

from heatloc import export
from heatloc.analysis import slit_experiment, slit_time_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.025)
    ap.add_argument("--gaps", type=float, nargs="+", default=[0.2, 0.1, 0.05])
    ap.add_argument("--walkers", type=int, default=20_000, help="walkers for the stay probability")
    ap.add_argument("--sweep", action="store_true", help="also sweep t at the smallest gap")
    ap.add_argument("--out", default="out/slit")
    args = ap.parse_args()
    table = slit_experiment(args.gaps, h=args.h, stay_walkers=args.walkers, keep_runs=True)
    report = {"table": table.summary()}
    if args.sweep:
        report["time_sweep"] = slit_time_sweep(min(args.gaps), np.geomspace(0.01, 2.0, 12), h=args.h)
    export.write_bundle(args.out, export.experiment_files(table, report))
    q = table.column("measured")
    for r, sw, ss in zip(table.rows, table.extras["stay_probability_walker"], table.extras["stay_probability_spectral"]):
        print(f"delta={r.parameter:g}  Q={r.measured:.4f}  stay(walker)={sw:.3f}  stay(spectral)={ss:.3f}")
    print("per-halving factors", np.round(q[:-1] / q[1:], 3).tolist())
    if args.sweep:
        print("crossover t", report["time_sweep"]["crossover_t"])


if __name__ == "__main__":
    main()
