"""Neumann heat-kernel concentration on planar domains.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
All outputs are computed in memory and written together, so a failing run
leaves no files behind.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import analysis, export
from .discretization import assemble_neumann_laplacian, rasterize
from .eigensolver import lowest_eigenpairs, weyl_fit
from .errors import HeatlocError, InsufficientModes, InvalidSpec, NoConvergence, NumericalFailure
from .geometry import PRESETS, DomainSpec, PolygonDomain, build_domain, distance_to_boundary
from .spectral_heat import HeatParams, concentration_field, heat_kernel_row, spectrum_for_time
from .walker import WalkConfig, collision_estimate

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
EXPERIMENTS = ("cone", "slit", "disk_chain", "non_localization")
N_FIELDS = 8

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``pi/2`` or ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(text)

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def parse_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return [parse_number(s) for s in items]


@dataclass
class RunConfig:
    subcommand: str
    experiment: str | None = None
    preset: str | None = None
    spec: str | None = None
    h: float | None = None
    t: float | None = None
    K: int | None = None
    tol: float = 1e-8
    seed: int = 0
    n_pairs: int = 100_000
    x: str | None = None
    angles: list[float] | None = None
    gaps: list[float] | None = None
    n_disks: int | None = None
    neck_floor: float | None = None
    threads: int | None = None
    out: str = "."
    resolved_spec: dict | None = field(default=None)

    def validate(self) -> None:
        positive = {"h": self.h, "t": self.t, "tol": self.tol, "neck_floor": self.neck_floor}
        for name, v in positive.items():
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise InvalidSpec(name, f"must be positive, got {v}")
        for name, v, lo in (("K", self.K, 1), ("n_pairs", self.n_pairs, 1), ("threads", self.threads, 1), ("n_disks", self.n_disks, 3)):
            if v is not None and v < lo:
                raise InvalidSpec(name, f"must be at least {lo}, got {v}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed", "must fit in an unsigned 64-bit integer")
        if self.subcommand in ("concentrate", "walk") and self.t is None:
            raise InvalidSpec("t", "required")
        if self.preset is not None and self.spec is not None:
            raise InvalidSpec("spec", "give either --preset or --spec, not both")
        if self.preset is not None and self.preset not in PRESETS:
            raise InvalidSpec("preset", f"unknown preset {self.preset!r}; expected one of {sorted(PRESETS)}")
        for name, vals in (("angles", self.angles), ("gaps", self.gaps)):
            if vals is not None and any(not v > 0 for v in vals):
                raise InvalidSpec(name, "values must be positive")
        if self.angles is not None and any(v > math.pi for v in self.angles):
            raise InvalidSpec("angles", "opening angles must lie in (0, pi]")


def _domain_spec(cfg: RunConfig) -> DomainSpec:
    if cfg.spec is not None:
        text = Path(cfg.spec).read_text()
        return DomainSpec.from_json(text)
    return PRESETS[cfg.preset or "square"]


def _resolve_x(x: str | None, mask, domain: PolygonDomain) -> int:
    if x is None:
        return int(np.argmax(distance_to_boundary(domain, mask.centers())))
    x = x.strip()
    if x in domain.landmarks:
        return mask.dof_at(domain.landmarks[x])
    if "," in x:
        try:
            pt = [parse_number(s) for s in x.split(",")]
        except argparse.ArgumentTypeError as exc:
            raise InvalidSpec("x", str(exc)) from exc
        if len(pt) != 2:
            raise InvalidSpec("x", "a point needs two coordinates")
        return mask.dof_at(pt)
    try:
        dof = int(x)
    except ValueError:
        raise InvalidSpec("x", f"expected a dof, a point 'x,y' or one of {sorted(domain.landmarks)}") from None
    if not 0 <= dof < mask.N:
        raise InvalidSpec("x", f"dof {dof} out of range 0..{mask.N - 1}")
    return dof


def _grid(cfg: RunConfig):
    spec = _domain_spec(cfg)
    dom = build_domain(spec)
    h = cfg.h if cfg.h is not None else 1 / 64
    mask = rasterize(dom, h)
    cfg.resolved_spec = {"variant": spec.variant, "params": dict(spec.params)}
    return spec, dom, mask


def cmd_build(cfg: RunConfig) -> dict[str, str]:
    spec = _domain_spec(cfg)
    dom = build_domain(spec)
    cfg.resolved_spec = {"variant": spec.variant, "params": dict(spec.params)}
    return {"polygon.csv": export.polygon_csv(dom), "spec.json": spec.to_json() + "\n"}


def cmd_spectrum(cfg: RunConfig) -> dict[str, str]:
    spec, dom, mask = _grid(cfg)
    op = assemble_neumann_laplacian(mask)
    K = cfg.K if cfg.K is not None else 20
    s = lowest_eigenpairs(op, K, tol=cfg.tol, seed=cfg.seed)
    files = {
        "spec.json": spec.to_json() + "\n",
        "mask.json": export.to_json(export.mask_summary(mask)),
        "mu.csv": export.eigenvalues_csv(s),
    }
    files.update(export.eigenfunction_files(s, range(min(K, N_FIELDS))))
    try:
        files["weyl.json"] = export.to_json(weyl_fit(s, mask.area).as_dict())
    except InsufficientModes as exc:
        files["weyl.json"] = export.to_json({"skipped": str(exc)})
    return files


def cmd_concentrate(cfg: RunConfig) -> dict[str, str]:
    spec, dom, mask = _grid(cfg)
    op = assemble_neumann_laplacian(mask)
    if cfg.K is not None:
        s = lowest_eigenpairs(op, min(cfg.K, op.N), tol=cfg.tol, seed=cfg.seed)
    else:
        s = spectrum_for_time(op, cfg.t, perimeter=dom.perimeter(), tol=cfg.tol, seed=cfg.seed)
    p = HeatParams(cfg.t)
    files = {"spec.json": spec.to_json() + "\n", "mu.csv": export.eigenvalues_csv(s)}
    files.update(export.field_files("Q", concentration_field(s, p), mask))
    if cfg.x is not None:
        x = _resolve_x(cfg.x, mask, dom)
        files.update(export.field_files("p_row", heat_kernel_row(s, x, p), mask, clip_negative=True))
    return files


def cmd_walk(cfg: RunConfig) -> dict[str, str]:
    spec, dom, mask = _grid(cfg)
    x = _resolve_x(cfg.x, mask, dom)
    est = collision_estimate(mask, WalkConfig(cfg.t, cfg.n_pairs, cfg.seed, x), threads=cfg.threads)
    return {"estimate.json": export.estimate_json(est)}


def cmd_experiment(cfg: RunConfig) -> dict[str, str]:
    name = cfg.experiment
    if name == "cone":
        angles = cfg.angles or [math.pi, math.pi / 2, math.pi / 3, math.pi / 4]
        table = analysis.cone_experiment(
            angles, t=cfg.t or 0.01, h=cfg.h or 1 / 80, tol=cfg.tol, seed=cfg.seed, keep_runs=True
        )
        return export.experiment_files(table)
    if name == "slit":
        table = analysis.slit_experiment(
            cfg.gaps or [0.2, 0.1, 0.05], h=cfg.h or 0.025, t=cfg.t or 1.0, tol=cfg.tol, seed=cfg.seed, keep_runs=True
        )
        return export.experiment_files(table)
    if name == "disk_chain":
        table = analysis.disk_chain_experiment(
            cfg.n_disks or 5,
            h=cfg.h or 1 / 32,
            neck_floor=cfg.neck_floor,
            t=cfg.t or 1.0,
            tol=cfg.tol,
            seed=cfg.seed,
            keep_runs=True,
        )
        return export.experiment_files(table)
    if name == "non_localization":
        spec, dom, mask = _grid(cfg)
        t = cfg.t or 0.005
        s = spectrum_for_time(assemble_neumann_laplacian(mask), t, perimeter=dom.perimeter(), tol=cfg.tol, seed=cfg.seed)
        rep = analysis.non_localization_check(s, t, 0.25, dom)
        files = {"spec.json": spec.to_json() + "\n", "mu.csv": export.eigenvalues_csv(s)}
        files.update(export.field_files("Q", concentration_field(s, HeatParams(t)), mask))
        files["report.json"] = export.to_json(rep.as_dict())
        return files
    raise InvalidSpec("experiment", f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")


COMMANDS = {
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "concentrate": cmd_concentrate,
    "walk": cmd_walk,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help=f"one of {', '.join(PRESETS)}")
    common.add_argument("--spec", help="domain spec JSON file")
    common.add_argument("--h", type=parse_number, help="grid spacing, e.g. 1/64")
    common.add_argument("--t", type=parse_number, help="diffusion time")
    common.add_argument("--K", type=int, help="number of eigenpairs")
    common.add_argument("--tol", type=parse_number, default=1e-8, help="eigen residual tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n-pairs", dest="n_pairs", type=int, default=100_000)
    common.add_argument("--x", help="dof index, point 'x,y' or landmark name")
    common.add_argument("--angles", type=parse_list, help="comma list, e.g. pi/2,pi/3")
    common.add_argument("--gaps", type=parse_list, help="comma list of slit gaps")
    common.add_argument("--n-disks", dest="n_disks", type=int)
    common.add_argument("--neck-floor", dest="neck_floor", type=parse_number)
    common.add_argument("--threads", type=int, help="cap on worker threads")
    common.add_argument("--out", default=".", help="output directory")

    p = argparse.ArgumentParser(prog="heatloc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("build", parents=[common], help="write polygon CSV for a domain")
    sub.add_parser("spectrum", parents=[common], help="lowest Neumann eigenpairs")
    sub.add_parser("concentrate", parents=[common], help="Q(t, x) field")
    sub.add_parser("walk", parents=[common], help="random-walk collision estimate")
    e = sub.add_parser("experiment", parents=[common], help="scaling experiments")
    e.add_argument("experiment", choices=EXPERIMENTS)
    return p


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        cfg.validate()
        _set_threads(cfg.threads)
        files = COMMANDS[cfg.subcommand](cfg)
        config = asdict(cfg)
        files["manifest.json"] = export.manifest(
            cfg.subcommand, config, {"seed": cfg.seed}, list(files) + ["manifest.json"]
        )
        export.write_bundle(cfg.out, files)
    except InvalidSpec as exc:
        print(f"error: invalid parameter '{exc.param}': {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergence as exc:
        res = None if exc.residuals is None else [float(r) for r in np.asarray(exc.residuals)]
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps({"residuals": res, "iterations": exc.iterations}), file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HeatlocError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
