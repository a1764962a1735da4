"""Scaling experiments for heat-kernel concentration and localization diagnostics.

Each experiment builds its domains, solves for a spectrum that meets the
truncation rule at the requested time and tabulates a measured quantity
against the predicted law. Everything is deterministic given the table's
metadata (h, t, K, seeds).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .discretization import GridMask, assemble_neumann_laplacian, rasterize
from .eigensolver import Spectrum
from .errors import InvalidSpec, NoInteriorCells
from .geometry import (
    DomainSpec,
    PolygonDomain,
    build_domain,
    contains_points,
    disk_chain_balls,
    distance_to_boundary,
    regular_polygon,
)
from .spectral_heat import (
    HeatParams,
    ScalarField,
    concentration,
    concentration_field,
    heat_apply,
    heat_kernel_row,
    indicator,
    spectrum_for_time,
    weighted_abs_sum,
)
from .walker import sample_endpoints


class InteriorMarginWarning(UserWarning):
    """The interior margin is smaller than three diffusion lengths."""


@dataclass(frozen=True)
class ScalingRow:
    parameter: float
    measured: float
    predicted: float
    ratio: float


@dataclass(frozen=True)
class ExperimentRun:
    """Artifacts of one parameter value, kept for export."""

    label: str
    spec: DomainSpec
    mask: GridMask
    spectrum: Spectrum
    fields: dict[str, ScalarField] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ScalingTable:
    name: str
    parameter: str
    quantity: str
    rows: tuple[ScalingRow, ...]
    slope: float
    intercept: float
    residual: float
    fit: str
    metadata: dict[str, Any] = field(default_factory=dict)
    # per-row auxiliary columns, aligned with ``rows``
    extras: dict[str, list] = field(default_factory=dict)
    runs: tuple[ExperimentRun, ...] = ()

    def __post_init__(self):
        p = [r.parameter for r in self.rows]
        if p != sorted(p):
            raise ValueError("rows must be sorted by parameter")
        for key, col in self.extras.items():
            if len(col) != len(self.rows):
                raise ValueError(f"extra column {key!r} has the wrong length")

    def column(self, name: str) -> np.ndarray:
        if name in ScalingRow.__dataclass_fields__:
            return np.array([getattr(r, name) for r in self.rows], dtype=float)
        return np.asarray(self.extras[name])

    def header(self) -> list[str]:
        return ["parameter", "measured", "predicted", "ratio", *self.extras]

    def csv_rows(self) -> list[list]:
        out = []
        for k, r in enumerate(self.rows):
            out.append([r.parameter, r.measured, r.predicted, r.ratio, *(self.extras[c][k] for c in self.extras)])
        return out

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "parameter": self.parameter,
            "quantity": self.quantity,
            "fit": self.fit,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "metadata": self.metadata,
        }


def _fit(x, y) -> tuple[float, float, float]:
    """Least-squares line; residual is the RMS deviation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        return math.nan, math.nan, math.nan
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), resid


def _sorted_table(name, parameter, quantity, params, measured, predicted, fit, metadata, extras, runs):
    order = np.argsort(np.asarray(params, dtype=float), kind="stable")
    rows = tuple(
        ScalingRow(float(params[i]), float(measured[i]), float(predicted[i]), float(measured[i] / predicted[i]))
        for i in order
    )
    extras = {k: [v[i] for i in order] for k, v in extras.items()}
    slope, intercept, resid = fit(rows, extras)
    return ScalingTable(
        name, parameter, quantity, rows, slope, intercept, resid, fit.__doc__ or "", metadata, extras, tuple(runs)
    )


def richardson_agreement(coarse: ScalingTable, fine: ScalingTable) -> float:
    """Relative difference of the fitted slopes at h and h/2."""
    return abs(coarse.slope - fine.slope) / abs(fine.slope)


def deep_interior_dof(mask: GridMask, domain: PolygonDomain) -> int:
    """Included cell farthest from the boundary; ties go to the lowest dof."""
    return int(np.argmax(distance_to_boundary(domain, mask.centers())))


def _spectrum(mask: GridMask, domain: PolygonDomain, t: float, kind: str, tol: float, seed: int) -> Spectrum:
    op = assemble_neumann_laplacian(mask)
    return spectrum_for_time(op, t, kind, perimeter=domain.perimeter(), tol=tol, seed=seed)


# ---------------------------------------------------------------------------
# cone


def cone_experiment(
    angles: Sequence[float],
    t: float = 0.01,
    h: float = 1 / 80,
    radius_factor: float = 12.0,
    tol: float = 1e-8,
    seed: int = 0,
    keep_runs: bool = False,
) -> ScalingTable:
    """Apex-to-interior concentration ratio on single wedges, against 2 pi/alpha."""
    if not angles:
        raise InvalidSpec("angles", "need at least one opening angle")
    if not (t > 0 and math.isfinite(t)):
        raise InvalidSpec("t", f"must be positive, got {t}")
    if radius_factor < 3:
        raise InvalidSpec("radius_factor", "wedge sides must be at least 3 sqrt(t)")
    for a in angles:
        if not 0 < a <= math.pi:
            raise InvalidSpec("angles", f"opening angle {a} outside (0, pi]")
    radius = radius_factor * math.sqrt(t)
    q_apex, q_int, ks, ns, d_apex, tails, runs = [], [], [], [], [], [], []
    for alpha in angles:
        spec = DomainSpec("wedge", {"alpha": float(alpha), "radius": radius})
        dom = build_domain(spec)
        mask = rasterize(dom, h)
        spec_ = _spectrum(mask, dom, t, "concentration", tol, seed)
        apex = mask.dof_at(dom.landmarks["apex"])
        deep = deep_interior_dof(mask, dom)
        p = HeatParams(t)
        qa = concentration(spec_, apex, p)
        qi = concentration(spec_, deep, p)
        q_apex.append(qa.value)
        q_int.append(qi.value)
        tails.append(max(qa.tail_bound, qi.tail_bound))
        ks.append(spec_.K)
        ns.append(mask.N)
        d_apex.append(float(np.hypot(*mask.centers()[apex])))
        if keep_runs:
            runs.append(ExperimentRun(f"alpha_{alpha:.6f}", spec, mask, spec_, {"Q": concentration_field(spec_, p)}))

    def fit(rows, extras):
        """least squares log(Q_apex) against log(alpha); predicted slope -1"""
        return _fit(np.log([r.parameter for r in rows]), np.log(extras["q_apex"]))

    ratio = np.array(q_apex) / np.array(q_int)
    return _sorted_table(
        "cone",
        "alpha",
        "Q(t, apex) / Q(t, deep interior)",
        list(angles),
        ratio,
        [2 * math.pi / a for a in angles],
        fit,
        {"h": h, "t": t, "radius": radius, "tol": tol, "seed": seed, "K": ks, "predicted_slope": -1.0},
        {
            "q_apex": q_apex,
            "q_interior": q_int,
            "K": ks,
            "N": ns,
            "apex_cell_distance": d_apex,
            "tail_bound": tails,
        },
        runs,
    )


# ---------------------------------------------------------------------------
# slit

SLIT_BOX = {"width": 6.0, "height": 3.0, "slit_length": 4.0, "slit_thickness": 0.05}


def slit_region(spec: DomainSpec) -> PolygonDomain:
    """The channel R between the two slits."""
    p = {**SLIT_BOX, **spec.params}
    w, hh, length, gap = p["width"], p["height"], p["slit_length"], p["gap"]
    cx, cy = w / 2, hh / 2
    x0, x1 = cx - length / 2, cx + length / 2
    y0, y1 = cy - gap / 2, cy + gap / 2
    return PolygonDomain(np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]))


def slit_experiment(
    gaps: Sequence[float],
    h: float = 0.025,
    t: float = 1.0,
    box: dict | None = None,
    stay_walkers: int = 20_000,
    tol: float = 1e-8,
    seed: int = 0,
    keep_runs: bool = False,
) -> ScalingTable:
    """Q(t, gap centre) against 1/delta for a box with two parallel slits."""
    if not gaps:
        raise InvalidSpec("gaps", "need at least one gap")
    if any(not g > 0 for g in gaps):
        raise InvalidSpec("gaps", "gaps must be positive")
    geo = {**SLIT_BOX, **(box or {})}
    if geo["slit_thickness"] < h:
        raise InvalidSpec("h", f"slit thickness {geo['slit_thickness']} is not resolved at h={h}")
    qs, tails, ks, stay_w, stay_s, runs = [], [], [], [], [], []
    for gap in gaps:
        spec = DomainSpec("slit_box", {**geo, "gap": float(gap)})
        dom = build_domain(spec)
        mask = rasterize(dom, h)
        spec_ = _spectrum(mask, dom, t, "concentration", tol, seed)
        x = mask.dof_at(dom.landmarks["gap_center"])
        p = HeatParams(t)
        q = concentration(spec_, x, p)
        qs.append(q.value)
        tails.append(q.tail_bound)
        ks.append(spec_.K)
        in_r = contains_points(slit_region(spec), mask.centers())
        row = heat_kernel_row(spec_, x, p)
        stay_s.append(float(row.values[in_r].sum() * mask.cell_area))
        if stay_walkers > 0:
            ends = sample_endpoints(mask, x, t, stay_walkers, seed)
            stay_w.append(float(in_r[ends].mean()))
        else:
            stay_w.append(math.nan)
        if keep_runs:
            runs.append(ExperimentRun(f"gap_{gap:g}", spec, mask, spec_, {"Q": concentration_field(spec_, p), "p_row": row}))

    def fit(rows, extras):
        """least squares Q against 1/delta"""
        return _fit(1.0 / np.array([r.parameter for r in rows]), [r.measured for r in rows])

    inv = 1.0 / np.asarray(gaps, dtype=float)
    slope, intercept, _ = _fit(inv, qs)
    return _sorted_table(
        "slit",
        "delta",
        "Q(t, centre of R)",
        list(gaps),
        qs,
        slope * inv + intercept,
        fit,
        {"h": h, "t": t, "box": geo, "tol": tol, "seed": seed, "K": ks, "stay_walkers": stay_walkers},
        {
            "inv_delta": list(inv),
            "tail_bound": tails,
            "K": ks,
            "stay_probability_walker": stay_w,
            "stay_probability_spectral": stay_s,
        },
        runs,
    )


def slit_time_sweep(
    gap: float, ts: Sequence[float], h: float = 0.025, box: dict | None = None, tol: float = 1e-8, seed: int = 0
) -> dict[str, Any]:
    """Log 8 pi t Q(t, gap centre) over a time sweep.

    The reported crossover is the smallest t at which the normalized
    concentration reaches twice its free-space value. No tolerance is
    attached to it.
    """
    ts = sorted(float(s) for s in ts)
    geo = {**SLIT_BOX, **(box or {})}
    spec = DomainSpec("slit_box", {**geo, "gap": float(gap)})
    dom = build_domain(spec)
    mask = rasterize(dom, h)
    spec_ = _spectrum(mask, dom, ts[0], "concentration", tol, seed)
    x = mask.dof_at(dom.landmarks["gap_center"])
    norm = [8 * math.pi * s * concentration(spec_, x, HeatParams(s)).value for s in ts]
    cross = next((s for s, v in zip(ts, norm) if v >= 2.0), None)
    return {
        "gap": gap,
        "t": ts,
        "normalized_Q": norm,
        "crossover_t": cross,
        "crossover_over_gap_squared": None if cross is None else cross / gap**2,
        "K": spec_.K,
        "h": h,
    }


# ---------------------------------------------------------------------------
# disk chain

DISK_CHAIN = {"r0": 4.0, "neck_length": 3.0, "m_poly": 128}


def disk_chain_experiment(
    n_disks: int = 5,
    h: float = 1 / 32,
    neck_floor: float | None = None,
    t: float = 1.0,
    chain: dict | None = None,
    tol: float = 1e-8,
    seed: int = 0,
    keep_runs: bool = False,
) -> ScalingTable:
    """Weighted absolute eigenfunction sums at the ball centres of a disk chain.

    For ball n, ``S_n = sum_k exp(-mu_k t) |phi_k(x_n)|``. Since
    ``(e^{-tL} chi_n)(x_n) <= ||chi_n|| S_n``, the minimum of
    ``e^{-tL} chi_n`` over the ball divided by ``||chi_n||`` is a lower bound
    for ``S_n``; the table reports it as the predicted value.
    """
    if n_disks < 3:
        raise InvalidSpec("n_disks", f"need at least 3 disks, got {n_disks}")
    geo = {**DISK_CHAIN, **(chain or {})}
    floor = 4 * h if neck_floor is None else float(neck_floor)
    r_min = geo["r0"] * 2.0 ** -(n_disks - 1)
    if 2 * r_min < 8 * h:
        raise InvalidSpec("h", f"smallest disk (radius {r_min:g}) spans fewer than 8 cells at h={h}")
    spec = DomainSpec("disk_chain", {**geo, "n_disks": int(n_disks), "neck_floor": floor})
    dom = build_domain(spec)
    mask = rasterize(dom, h, neck_floor=floor)
    spec_ = _spectrum(mask, dom, t, "weighted_abs_sum", tol, seed)
    S, tails, norms, mins, bounds = [], [], [], [], []
    fields = {}
    for n, (c, r) in enumerate(disk_chain_balls(spec)):
        ball = PolygonDomain(regular_polygon(c, r, int(geo["m_poly"])))
        chi = indicator(mask, ball)
        smooth = heat_apply(spec_, chi, t)
        inside = chi.values > 0
        x = mask.dof_at(c)
        s = weighted_abs_sum(spec_, x, t)
        S.append(s.value)
        tails.append(s.tail_bound)
        norms.append(chi.l2_norm())
        mins.append(float(smooth.values[inside].min()))
        bounds.append(mins[-1] / norms[-1])
        if keep_runs:
            fields[f"heat_chi_{n}"] = smooth

    def fit(rows, extras):
        """least squares log2(S_n) against n for n >= 1"""
        sel = [r for r in rows if r.parameter >= 1]
        return _fit([r.parameter for r in sel], np.log2([r.measured for r in sel]))

    ns = list(range(n_disks))
    runs = [ExperimentRun("chain", spec, mask, spec_, fields)] if keep_runs else []
    return _sorted_table(
        "disk_chain",
        "n",
        "S_n = sum_k exp(-mu_k t)|phi_k(x_n)|",
        ns,
        S,
        bounds,
        fit,
        {
            "h": h,
            "t": t,
            "n_disks": n_disks,
            "neck_floor": floor,
            "chain": geo,
            "tol": tol,
            "seed": seed,
            "K": spec_.K,
            "N": mask.N,
            "neck_cells": dict(mask.feature_widths),
        },
        {
            "log2_S": list(np.log2(S)),
            "chi_norm": norms,
            "min_heat_chi": mins,
            "tail_bound": tails,
        },
        runs,
    )


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True, eq=False)
class NonLocalizationReport:
    t: float
    interior_margin: float
    eps: float
    interior_dofs: np.ndarray
    normalized_q: np.ndarray  # 8 pi t Q(t, x) on interior_dofs
    tail_bound: float
    # per k with mu_k <= 1/t: (k, mu_k, max interior phi_k^2, cap at that cell)
    eigen_caps: list[tuple[int, float, float, float]]

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.normalized_q - 1.0) <= self.eps))

    @property
    def failing_dofs(self) -> np.ndarray:
        return self.interior_dofs[np.abs(self.normalized_q - 1.0) > self.eps]

    def as_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "interior_margin": self.interior_margin,
            "eps": self.eps,
            "n_interior": int(len(self.interior_dofs)),
            "min_normalized_q": float(self.normalized_q.min()),
            "max_normalized_q": float(self.normalized_q.max()),
            "passed": self.passed,
            "n_failing": int(len(self.failing_dofs)),
            "tail_bound": self.tail_bound,
            "eigen_caps": [
                {"k": k, "mu": mu, "max_phi_sq": peak, "cap": cap} for k, mu, peak, cap in self.eigen_caps
            ],
        }


def non_localization_check(
    spectrum: Spectrum, t: float, interior_margin: float, domain: PolygonDomain, eps: float = 0.15
) -> NonLocalizationReport:
    """Free-space behaviour of Q(t, .) away from the boundary.

    Every cell at distance at least ``interior_margin`` from the boundary is
    tested for ``|8 pi t Q(t, x) - 1| <= eps``. A margin below ``3 sqrt(t)``
    only warns.
    """
    if spectrum.mask is None:
        raise InvalidSpec("spectrum", "spectrum carries no grid mask")
    if interior_margin < 3 * math.sqrt(t):
        warnings.warn(
            f"interior margin {interior_margin:g} is below 3 sqrt(t) = {3 * math.sqrt(t):.4g}",
            InteriorMarginWarning,
            stacklevel=2,
        )
    centers = spectrum.mask.centers()
    interior = np.flatnonzero(distance_to_boundary(domain, centers) >= interior_margin)
    if len(interior) == 0:
        raise NoInteriorCells(f"no cell lies {interior_margin:g} away from the boundary")
    field_ = concentration_field(spectrum, HeatParams(t))
    q = field_.values[interior]
    caps = []
    for k in np.flatnonzero(spectrum.mu <= 1.0 / t):
        sq = spectrum.phi[interior, k] ** 2
        i = int(np.argmax(sq))
        caps.append((int(k), float(spectrum.mu[k]), float(sq[i]), float(math.exp(2 * spectrum.mu[k] * t) * q[i])))
    return NonLocalizationReport(
        t, interior_margin, eps, interior, 8 * math.pi * t * q, field_.tail_bound, caps
    )


@dataclass(frozen=True, eq=False)
class LocalizationReport:
    threshold: float
    area: float
    participation_area: np.ndarray
    sup_norm: np.ndarray
    argmax_dof: np.ndarray
    argmax_point: np.ndarray  # (K, 2)

    @property
    def localized(self) -> np.ndarray:
        return self.participation_area < self.threshold * self.area

    @property
    def lowest_localized(self) -> int | None:
        idx = np.flatnonzero(self.localized)
        return int(idx[0]) if len(idx) else None

    def as_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.threshold,
            "area": self.area,
            "lowest_localized": self.lowest_localized,
            "modes": [
                {
                    "k": k,
                    "participation_area": float(self.participation_area[k]),
                    "sup_norm": float(self.sup_norm[k]),
                    "argmax_dof": int(self.argmax_dof[k]),
                    "argmax_point": [float(v) for v in self.argmax_point[k]],
                    "localized": bool(self.localized[k]),
                }
                for k in range(len(self.participation_area))
            ],
        }


def participation_area(phi: np.ndarray, cell_area: float) -> np.ndarray:
    """1 / sum(phi^4 h^2) for unit-norm columns."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float).T).T
    return 1.0 / (np.sum(phi**4, axis=0) * cell_area)


def localization_report(spectrum: Spectrum, threshold: float = 0.1) -> LocalizationReport:
    a = np.abs(spectrum.phi)
    arg = np.argmax(a, axis=0)
    if spectrum.mask is not None:
        pts = spectrum.mask.centers()[arg]
    else:
        pts = np.full((spectrum.K, 2), np.nan)
    return LocalizationReport(
        float(threshold),
        spectrum.area,
        participation_area(spectrum.phi, spectrum.cell_area),
        a.max(axis=0),
        arg,
        pts,
    )
