"""Heat-kernel quantities evaluated from a truncated Neumann spectrum.

Truncation bounds use completeness of the full discrete eigenbasis,
``sum_k phi_k(x)**2 == 1/h**2`` over all N modes, so the mass left for the
unresolved modes at ``x`` is known exactly:
``R(x) = 1/h**2 - sum_{k<K} phi_k(x)**2``. Every omitted mode has
``mu_k >= mu_{K-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .discretization import GridMask, NeumannOperator
from .eigensolver import Spectrum, lowest_eigenpairs
from .errors import EmptyIndicator, MaskMismatch, NonPositiveTime, TruncationTooSevere
from .geometry import PolygonDomain, contains_points

# truncation targets: exp(-2 mu t) for squared sums, exp(-mu t) sqrt(N) for S
CONCENTRATION_CUTOFF = 1e-12
WEIGHTED_SUM_CUTOFF = 1e-6


@dataclass(frozen=True)
class HeatParams:
    t: float
    K_used: int | None = None
    tail_bound: float = 0.0
    budget: float | None = None

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise NonPositiveTime(f"t must be positive, got {self.t}")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray
    cell_area: float
    mask: GridMask | None = None
    params: HeatParams | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("field has non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return len(self.values)

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def l2_norm(self) -> float:
        return math.sqrt(float(self.values @ self.values) * self.cell_area)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    @property
    def tail_bound(self) -> float:
        return 0.0 if self.params is None else self.params.tail_bound


@dataclass(frozen=True)
class HeatEstimate:
    """A scalar spectral sum together with its truncation parameters."""

    value: float
    params: HeatParams

    @property
    def tail_bound(self) -> float:
        return self.params.tail_bound

    def __float__(self) -> float:
        return self.value


def _check_t(t: float) -> None:
    if not (t > 0 and math.isfinite(t)):
        raise NonPositiveTime(f"t must be positive, got {t}")


def _use(spectrum: Spectrum, params: HeatParams) -> Spectrum:
    _check_t(params.t)
    if params.K_used is not None and params.K_used < spectrum.K:
        return spectrum.truncated(params.K_used)
    return spectrum


def _remaining(spectrum: Spectrum, rows) -> np.ndarray:
    """R(x) for the given dof rows, clipped at zero."""
    phi = spectrum.phi[rows]
    got = np.einsum("...k,...k->...", phi, phi)
    if spectrum.K >= spectrum.N:
        return np.zeros_like(got)
    return np.maximum(1.0 / spectrum.cell_area - got, 0.0)


def _finish(params: HeatParams, K: int, tail: float) -> HeatParams:
    tail = float(tail)
    if params.budget is not None and tail > params.budget:
        raise TruncationTooSevere(f"tail bound {tail:.3e} exceeds budget {params.budget:.3e}")
    return replace(params, K_used=K, tail_bound=tail)


def _decay(spectrum: Spectrum, t: float) -> float:
    if spectrum.K >= spectrum.N:
        return 0.0
    return math.exp(-spectrum.mu[-1] * t)


def heat_kernel_row(spectrum: Spectrum, x: int, params: HeatParams) -> ScalarField:
    """y -> sum_k exp(-mu_k t) phi_k(x) phi_k(y)."""
    s = _use(spectrum, params)
    w = np.exp(-s.mu * params.t)
    # e_k * (phi_k(x) phi_k(y)) summed in ascending k: bitwise symmetric in x, y
    values = np.zeros(s.N)
    px = s.phi[x]
    for k in range(s.K):
        values += w[k] * (px[k] * s.phi[:, k])
    Rx = _remaining(s, x)
    tail = _decay(s, params.t) * math.sqrt(Rx * float(_remaining(s, slice(None)).max(initial=0.0)))
    return ScalarField(values, s.cell_area, s.mask, _finish(params, s.K, tail))


def _ascending_k_sum(weights: np.ndarray, cols: np.ndarray, square: bool) -> np.ndarray:
    # fixed summation order (ascending k) so every dof is evaluated identically
    acc = np.zeros(cols.shape[0])
    for k in range(cols.shape[1]):
        c = cols[:, k]
        acc += weights[k] * (c * c if square else np.abs(c))
    return acc


def concentration(spectrum: Spectrum, x: int, params: HeatParams) -> HeatEstimate:
    """Q(t, x) = sum_k exp(-2 mu_k t) phi_k(x)^2 = sum_y p(t,x,y)^2 h^2."""
    s = _use(spectrum, params)
    w = np.exp(-2.0 * s.mu * params.t)
    q = float(_ascending_k_sum(w, s.phi[x : x + 1], square=True)[0])
    tail = _decay(s, params.t) ** 2 * float(_remaining(s, x))
    return HeatEstimate(q, _finish(params, s.K, tail))


def concentration_field(spectrum: Spectrum, params: HeatParams) -> ScalarField:
    s = _use(spectrum, params)
    w = np.exp(-2.0 * s.mu * params.t)
    q = _ascending_k_sum(w, s.phi, square=True)
    tail = _decay(s, params.t) ** 2 * float(_remaining(s, slice(None)).max(initial=0.0))
    return ScalarField(q, s.cell_area, s.mask, _finish(params, s.K, tail))


def heat_trace(spectrum: Spectrum, t: float) -> float:
    """sum_k exp(-2 mu_k t) over the truncated spectrum."""
    _check_t(t)
    return float(np.exp(-2.0 * spectrum.mu * t).sum())


def weighted_abs_sum(spectrum: Spectrum, x: int, t: float) -> HeatEstimate:
    """S(x) = sum_k exp(-mu_k t) |phi_k(x)|."""
    params = HeatParams(t)
    s = spectrum
    w = np.exp(-s.mu * t)
    val = float(_ascending_k_sum(w, s.phi[x : x + 1], square=False)[0])
    # Cauchy-Schwarz over the N - K omitted modes
    tail = _decay(s, t) * math.sqrt(max(s.N - s.K, 0) * float(_remaining(s, x)))
    return HeatEstimate(val, _finish(params, s.K, tail))


def heat_apply(spectrum: Spectrum, field: ScalarField, t: float) -> ScalarField:
    """sum_k exp(-mu_k t) <f, phi_k> phi_k with the area-weighted inner product."""
    _check_t(t)
    if field.N != spectrum.N or (
        field.mask is not None and spectrum.mask is not None and not field.mask.same_grid(spectrum.mask)
    ):
        raise MaskMismatch("field and spectrum live on different masks")
    s = spectrum
    coef = (s.phi.T @ field.values) * s.cell_area
    out = s.phi @ (np.exp(-s.mu * t) * coef)
    tail = _decay(s, t) * field.l2_norm() * math.sqrt(float(_remaining(s, slice(None)).max(initial=0.0)))
    return ScalarField(out, s.cell_area, field.mask or s.mask, HeatParams(t, s.K, tail))


def indicator(mask: GridMask, region: PolygonDomain) -> ScalarField:
    """1 on dofs whose cell centre lies in ``region``; ``l2_norm()`` gives
    sqrt(count * h^2)."""
    inside = contains_points(region, mask.centers())
    if not inside.any():
        raise EmptyIndicator("region covers no cell centre of the mask")
    return ScalarField(inside.astype(float), mask.cell_area, mask)


# ---------------------------------------------------------------------------
# truncation rule


def cutoff_eigenvalue(t: float, kind: str = "concentration", N: int = 1) -> float:
    """Smallest mu_{K-1} meeting the truncation rule for ``kind``."""
    _check_t(t)
    if kind == "concentration":
        return math.log(1.0 / CONCENTRATION_CUTOFF) / (2.0 * t)
    if kind == "weighted_abs_sum":
        return (math.log(1.0 / WEIGHTED_SUM_CUTOFF) + 0.5 * math.log(max(N, 1))) / t
    raise ValueError(f"unknown truncation kind {kind!r}")


def truncation_met(spectrum: Spectrum, t: float, kind: str = "concentration") -> bool:
    return spectrum.K >= spectrum.N or spectrum.mu[-1] >= cutoff_eigenvalue(t, kind, spectrum.N)


def weyl_mode_estimate(area: float, perimeter: float, mu: float) -> float:
    """Two-term Neumann Weyl count |Omega| mu/(4 pi) + |dOmega| sqrt(mu)/(4 pi)."""
    return area * mu / (4 * math.pi) + perimeter * math.sqrt(max(mu, 0.0)) / (4 * math.pi)


def spectrum_for_time(
    op: NeumannOperator,
    t: float,
    kind: str = "concentration",
    perimeter: float | None = None,
    tol: float = 1e-8,
    seed: int = 0,
    max_iter: int = 200,
) -> Spectrum:
    """Solve for enough modes that the truncation rule holds at time ``t``.

    K is predicted from the two-term Weyl count; if the computed spectrum
    still falls short of the cutoff, K grows by 30% and the solve repeats.
    """
    N = op.N
    area = N * op.cell_area
    if perimeter is None:
        perimeter = 4 * math.sqrt(area)
    target = cutoff_eigenvalue(t, kind, N)
    K = int(math.ceil(1.05 * weyl_mode_estimate(area, perimeter, target))) + 8
    while True:
        K = min(max(K, 2), N)
        spec = lowest_eigenpairs(op, K, tol=tol, seed=seed, max_iter=max_iter)
        if K >= N or spec.mu[-1] >= target:
            return spec
        K = int(math.ceil(K * 1.3))
