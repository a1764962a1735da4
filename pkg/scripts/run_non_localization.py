"""Free-space check of 8 pi t Q on interior cells of a domain over several times."""

from __future__ import annotations

import argparse
import warnings

from heatloc import PRESETS, assemble_neumann_laplacian, build_domain, export, rasterize, spectrum_for_time
from heatloc.analysis import non_localization_check


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="square", choices=sorted(PRESETS))
    ap.add_argument("--h", type=float, default=1 / 96)
    ap.add_argument("--margin", type=float, default=0.25)
    ap.add_argument("--roots", type=float, nargs="+", default=None, help="values of sqrt(t); default 4h 8h 0.05 0.1")
    ap.add_argument("--out", default="out/non_localization")
    args = ap.parse_args()
    roots = args.roots or [4 * args.h, 8 * args.h, 0.05, 0.1]
    dom = build_domain(PRESETS[args.preset])
    mask = rasterize(dom, args.h)
    s = spectrum_for_time(assemble_neumann_laplacian(mask), min(roots) ** 2, perimeter=dom.perimeter())
    reports = []
    for r in roots:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = non_localization_check(s, r**2, args.margin, dom)
        d = rep.as_dict()
        d["sqrt_t"] = r
        d["warnings"] = [str(w.message) for w in caught]
        reports.append(d)
        print(f"sqrt(t)={r:.4f}  8 pi t Q in [{d['min_normalized_q']:.3f}, {d['max_normalized_q']:.3f}]  passed={d['passed']}")
    export.write_bundle(args.out, {"report.json": export.to_json(reports), "mu.csv": export.eigenvalues_csv(s)})


if __name__ == "__main__":
    main()
