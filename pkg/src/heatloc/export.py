"""Plain-text file formats.

Every writer returns text; :func:`write_bundle` puts a set of named texts
on disk at once, staging them in a temporary directory first so that a
failed run leaves nothing behind under the output directory.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
import shutil
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .discretization import GridMask, NeumannOperator
from .eigensolver import Spectrum
from .geometry import PolygonDomain, domain_from_rows, polygon_rows
from .spectral_heat import ScalarField
from .walker import CollisionEstimate


def _csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_plain(v) for v in r])
    return buf.getvalue()


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def to_json(doc: Any) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _jsonable(v):
    if isinstance(v, Mapping):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return v


def polygon_csv(domain: PolygonDomain) -> str:
    return _csv(["ring_id", "vertex_index", "x", "y"], polygon_rows(domain))


def read_polygon_csv(text: str) -> PolygonDomain:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    return domain_from_rows([(int(a), int(b), float(x), float(y)) for a, b, x, y in rows])


def mask_csv(mask: GridMask) -> str:
    return _csv(["i", "j", "dof_index"], mask.csv_rows())


def mask_summary(mask: GridMask) -> dict[str, Any]:
    return {
        "origin": list(mask.origin),
        "h": mask.h,
        "nx": mask.nx,
        "ny": mask.ny,
        "N": mask.N,
        "area": mask.area,
        "discarded_cells": mask.discarded,
        "feature_cells": dict(mask.feature_widths),
    }


def operator_coo(op: NeumannOperator) -> str:
    return "".join(f"{r} {c} {v!r}\n" for r, c, v in op.coo_rows())


def eigenvalues_csv(spectrum: Spectrum) -> str:
    return _csv(["k", "mu", "residual"], spectrum.csv_rows())


def field_csv(field: ScalarField, mask: GridMask, clip_negative: bool = False) -> str:
    """One row per included cell. ``clip_negative`` is for visualization
    files only; computations always use raw values."""
    if field.N != mask.N:
        raise ValueError("field and mask sizes differ")
    vals = np.maximum(field.values, 0.0) if clip_negative else field.values
    xy = mask.centers()
    return _csv(
        ["i", "j", "x", "y", "value"],
        ((int(i), int(j), float(x), float(y), float(v)) for (i, j), (x, y), v in zip(mask.cells, xy, vals)),
    )


def field_sidecar(field: ScalarField) -> str:
    p = field.params
    return to_json(
        {
            "t": None if p is None else p.t,
            "K_used": None if p is None else p.K_used,
            "tail_bound": field.tail_bound,
            "mass": field.mass(),
        }
    )


def field_files(name: str, field: ScalarField, mask: GridMask, clip_negative: bool = False) -> dict[str, str]:
    return {f"{name}.csv": field_csv(field, mask, clip_negative), f"{name}.json": field_sidecar(field)}


def eigenfunction_files(spectrum: Spectrum, ks: Iterable[int]) -> dict[str, str]:
    mask = spectrum.mask
    out = {}
    for k in ks:
        f = ScalarField(spectrum.phi[:, k], spectrum.cell_area, mask)
        out.update(field_files(f"phi_{k}", f, mask))
    return out


def estimate_json(est: CollisionEstimate) -> str:
    return est.to_json() + "\n"


def versions() -> dict[str, str]:
    import numba
    import scipy
    import shapely

    from . import __version__

    return {
        "heatloc": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "shapely": shapely.__version__,
    }


def manifest(command: str, config: Mapping[str, Any], seeds: Mapping[str, Any], files: Iterable[str]) -> str:
    return to_json(
        {"command": command, "config": dict(config), "seeds": dict(seeds), "versions": versions(), "files": sorted(files)}
    )


def table_files(table) -> dict[str, str]:
    return {
        "table.csv": _csv(table.header(), table.csv_rows()),
        "table.json": to_json(table.summary()),
    }


def experiment_files(table, report: Mapping[str, Any] | None = None) -> dict[str, str]:
    """Self-contained experiment directory: per-run spec, mask summary,
    spectrum and fields, plus the table and a report."""
    files = table_files(table)
    for run in table.runs:
        d = f"{run.label}/"
        files[d + "spec.json"] = run.spec.to_json() + "\n"
        files[d + "mask.json"] = to_json(mask_summary(run.mask))
        files[d + "mu.csv"] = eigenvalues_csv(run.spectrum)
        for name, f in run.fields.items():
            for k, v in field_files(name, f, run.mask, clip_negative=name.startswith("p_")).items():
                files[d + k] = v
    files["report.json"] = to_json(report if report is not None else table.summary())
    return files


def write_bundle(out: str | os.PathLike, files: Mapping[str, str]) -> list[Path]:
    """Write all files under ``out`` or none of them."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".stage-", dir=out))
    try:
        for rel, text in files.items():
            p = stage / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(text)
        written = []
        for rel in files:
            dst = out / rel
            dst.parent.mkdir(parents=True, exist_ok=True)
            os.replace(stage / rel, dst)
            written.append(dst)
        return written
    finally:
        shutil.rmtree(stage, ignore_errors=True)
