"""Participation areas of the lowest eigenfunctions and the first localized index."""

from __future__ import annotations

import argparse

from heatloc import PRESETS, assemble_neumann_laplacian, build_domain, export, lowest_eigenpairs, rasterize
from heatloc.analysis import localization_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="spiked_square", choices=sorted(PRESETS))
    ap.add_argument("--h", type=float, default=1 / 32)
    ap.add_argument("--K", type=int, default=30)
    ap.add_argument("--threshold", type=float, default=0.1)
    ap.add_argument("--out", default="out/localization")
    args = ap.parse_args()
    dom = build_domain(PRESETS[args.preset])
    mask = rasterize(dom, args.h)
    s = lowest_eigenpairs(assemble_neumann_laplacian(mask), args.K)
    rep = localization_report(s, args.threshold)
    files = {"report.json": export.to_json(rep.as_dict()), "mu.csv": export.eigenvalues_csv(s)}
    if rep.lowest_localized is not None:
        files.update(export.eigenfunction_files(s, [rep.lowest_localized]))
    export.write_bundle(args.out, files)
    for k in range(s.K):
        flag = "*" if rep.localized[k] else " "
        print(f"{flag} k={k:3d}  mu={s.mu[k]:10.3f}  PA/|Omega|={rep.participation_area[k] / rep.area:.3f}")
    print("lowest localized:", rep.lowest_localized)


if __name__ == "__main__":
    main()
