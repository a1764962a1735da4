"""Cone law at h and h/2: apex/interior ratios, fitted slopes, Richardson agreement."""

from __future__ import annotations

import argparse
import math

from heatloc import export
from heatloc.analysis import cone_experiment, richardson_agreement


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=1 / 80)
    ap.add_argument("--t", type=float, default=0.01)
    ap.add_argument("--out", default="out/cone")
    args = ap.parse_args()
    angles = [math.pi, math.pi / 2, math.pi / 3, math.pi / 4]
    coarse = cone_experiment(angles, t=args.t, h=args.h, keep_runs=True)
    fine = cone_experiment(angles, t=args.t, h=args.h / 2)
    report = {
        "coarse": coarse.summary(),
        "fine": fine.summary(),
        "fine_ratios": list(fine.column("ratio")),
        "richardson_agreement": richardson_agreement(coarse, fine),
    }
    files = export.experiment_files(coarse, report)
    files.update({f"fine/{k}": v for k, v in export.table_files(fine).items()})
    export.write_bundle(args.out, files)
    for r in fine.rows:
        print(f"alpha={r.parameter:.4f}  ratio={r.measured:.4f}  predicted={r.predicted:.4f}")
    print(f"slopes {coarse.slope:.4f} / {fine.slope:.4f}  Richardson {report['richardson_agreement']:.4f}")


if __name__ == "__main__":
    main()
