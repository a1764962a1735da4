"""Lowest Neumann eigenpairs: thick-restart Lanczos and a dense oracle.

Eigenvectors are returned as grid functions with unit area-weighted norm,
``sum(phi_k**2) * h**2 == 1``, so ``phi = u / h`` for a Euclidean unit
vector ``u``. Residuals ``||L phi - mu phi||`` in the same weighted norm
therefore equal the Euclidean residuals of ``u``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .discretization import GridMask, NeumannOperator
from .errors import InsufficientModes, KExceedsN, NoConvergence, TooLargeForDense

log = logging.getLogger(__name__)

DENSE_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class Spectrum:
    mu: np.ndarray  # (K,) ascending
    phi: np.ndarray  # (N, K), column k is phi_k
    cell_area: float
    residual_norms: np.ndarray
    mask: GridMask | None = None

    @property
    def K(self) -> int:
        return len(self.mu)

    @property
    def N(self) -> int:
        return self.phi.shape[0]

    @property
    def h(self) -> float:
        return math.sqrt(self.cell_area)

    @property
    def area(self) -> float:
        return self.N * self.cell_area

    def truncated(self, K: int) -> "Spectrum":
        return Spectrum(self.mu[:K], self.phi[:, :K], self.cell_area, self.residual_norms[:K], self.mask)

    def rayleigh_quotients(self, op: NeumannOperator) -> np.ndarray:
        Lphi = op.stencil @ self.phi * op.scale
        return np.einsum("ik,ik->k", self.phi, Lphi) * self.cell_area

    def csv_rows(self) -> list[tuple[int, float, float]]:
        return [(k, float(m), float(r)) for k, (m, r) in enumerate(zip(self.mu, self.residual_norms))]


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Largest-magnitude entry positive; ties go to the lowest index."""
    if U.size == 0:
        return U
    A = np.abs(U)
    # treat entries within rounding of the maximum as tied
    near = A >= A.max(axis=0) * (1 - 1e-9)
    first = np.argmax(near, axis=0)
    s = np.sign(U[first, np.arange(U.shape[1])])
    s[s == 0] = 1.0
    return U * s


def _residuals(op: NeumannOperator, mu: np.ndarray, U: np.ndarray) -> np.ndarray:
    R = op.stencil @ U * op.scale - U * mu
    return np.linalg.norm(R, axis=0)


def dense_oracle(op: NeumannOperator) -> Spectrum:
    """Full spectrum from a dense symmetric eigendecomposition."""
    if op.N > DENSE_LIMIT:
        raise TooLargeForDense(f"N={op.N} exceeds the dense limit {DENSE_LIMIT}")
    mu, U = np.linalg.eigh(op.to_dense())
    # the kernel is known exactly; snap rounding noise to it
    zero = np.abs(mu) <= 1e-12 * max(float(np.abs(mu).max()), 1.0)
    mu[zero] = 0.0
    if zero.sum() == 1:
        U[:, 0] = 1.0 / math.sqrt(op.N)
    U = _fix_signs(U)
    res = _residuals(op, mu, U)
    return Spectrum(mu, U / op.h, op.cell_area, res, op.mask)


class _ShiftInvert:
    """w -> (L + sigma I)^{-1} w restricted to the complement of a locked set."""

    def __init__(self, op: NeumannOperator, sigma: float):
        M = (op.matrix + sigma * sp.identity(op.N, format="csr")).tocsc()
        self.lu = splu(M, permc_spec="MMD_AT_PLUS_A")
        self.sigma = sigma
        self.calls = 0

    def __call__(self, v: np.ndarray) -> np.ndarray:
        self.calls += 1
        return self.lu.solve(v)


def _orthogonalize(w: np.ndarray, *bases: np.ndarray) -> np.ndarray:
    # two passes of classical Gram-Schmidt ("twice is enough")
    for _ in range(2):
        for B in bases:
            if B.shape[1]:
                w = w - B @ (B.T @ w)
    return w


def _random_unit(n: int, rng: np.random.Generator, *bases: np.ndarray) -> np.ndarray:
    for _ in range(10):
        w = _orthogonalize(rng.standard_normal(n), *bases)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            return w / nrm
    raise NoConvergence("could not draw a start vector outside the locked subspace")


def _thick_restart_lanczos(
    apply,
    op: NeumannOperator,
    nev: int,
    locked: np.ndarray,
    rng: np.random.Generator,
    tol: float,
    max_restarts: int,
):
    """Largest ``nev`` eigenpairs of the shift-inverted operator on the
    orthogonal complement of ``locked``; returns ``(mu, U, residuals)``."""
    n = op.N
    avail = n - locked.shape[1]
    nev = min(nev, avail)
    m = min(avail, max(2 * nev + 10, nev + 30))
    sigma = apply.sigma
    V = np.zeros((n, m + 1), order="F")
    T = np.zeros((m, m))
    V[:, 0] = _random_unit(n, rng, locked)
    k = 0
    beta = 0.0
    res = np.full(nev, np.inf)
    for restart in range(max_restarts):
        for j in range(k, m):
            w = _orthogonalize(apply(V[:, j]), locked)
            Vj = V[:, : j + 1]
            coef = Vj.T @ w
            w -= Vj @ coef
            c2 = Vj.T @ w
            w -= Vj @ c2
            coef += c2
            T[: j + 1, j] = coef
            T[j, : j + 1] = coef
            beta = float(np.linalg.norm(w))
            if j + 1 < m + 1:
                if beta <= 1e-12 * max(1.0, abs(coef[j])):
                    # invariant subspace: continue with a fresh direction
                    V[:, j + 1] = _random_unit(n, rng, locked, V[:, : j + 1])
                    beta = 0.0
                else:
                    V[:, j + 1] = w / beta
            if j + 1 < m:
                T[j + 1, j] = T[j, j + 1] = beta
        theta, S = np.linalg.eigh(T)
        order = np.argsort(theta)[::-1]
        theta, S = theta[order], S[:, order]
        keep = min(m - 1, nev + max((m - nev) // 2, 1))
        Y = V[:, :m] @ S[:, :keep]
        U = Y[:, :nev]
        mu = np.einsum("ik,ik->k", U, op.stencil @ U) * op.scale
        res = _residuals(op, mu, U)
        if np.all(res <= tol * (1.0 + np.abs(mu))):
            log.debug("lanczos: nev=%d converged after %d restarts", nev, restart + 1)
            return mu, U, res
        # restart from the kept Ritz vectors plus the residual direction
        tail = V[:, m].copy()
        V[:, :keep] = Y
        V[:, keep] = tail
        T[:] = 0.0
        T[np.arange(keep), np.arange(keep)] = theta[:keep]
        arrow = beta * S[m - 1, :keep]
        T[keep, :keep] = arrow
        T[:keep, keep] = arrow
        k = keep
    raise NoConvergence(
        f"Lanczos did not converge within {max_restarts} restarts "
        f"(max residual {float(np.max(res)):.3e})",
        residuals=res,
        iterations=max_restarts,
    )


def lowest_eigenpairs(
    op: NeumannOperator,
    K: int,
    tol: float = 1e-8,
    max_iter: int = 200,
    seed: int = 0,
    sigma: float | None = None,
) -> Spectrum:
    """Lowest ``K`` eigenpairs of the Neumann operator.

    The constant vector (exact kernel) is deflated explicitly. Lanczos with
    block size one finds a single vector per degenerate eigenspace, so after
    the main sweep further deflated sweeps are run until one of them finds
    no eigenvalue below the current largest; this recovers multiplicities.
    """
    N = op.N
    if K < 1:
        raise KExceedsN(f"K must be at least 1, got {K}")
    if K > N:
        raise KExceedsN(f"K={K} exceeds N={N}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    h = op.h
    const = np.full((N, 1), 1.0 / math.sqrt(N))
    if K == 1:
        U = const
        return Spectrum(np.zeros(1), U / h, op.cell_area, _residuals(op, np.zeros(1), U), op.mask)
    if sigma is None:
        # Weyl slope 4 pi / |Omega| sets the natural eigenvalue spacing
        sigma = 4 * math.pi / (N * op.cell_area)
    apply = _ShiftInvert(op, sigma)
    rng = np.random.default_rng(seed)

    mu, U, res = _thick_restart_lanczos(apply, op, K - 1, const, rng, tol, max_iter)
    nev_check = 4
    while U.shape[1] + 1 < N:
        locked = np.hstack([const, U])
        mu_c, U_c, res_c = _thick_restart_lanczos(
            apply, op, min(nev_check, N - locked.shape[1]), locked, rng, tol, max_iter
        )
        top = mu.max()
        new = mu_c < top * (1 - 1e-10)
        if not new.any():
            break
        log.debug("deflated sweep recovered %d missing eigenpairs", int(new.sum()))
        mu = np.concatenate([mu, mu_c[new]])
        U = np.hstack([U, U_c[:, new]])
        res = np.concatenate([res, res_c[new]])
        order = np.argsort(mu, kind="stable")[: K - 1]
        mu, U, res = mu[order], U[:, order], res[order]
        if new.sum() == len(mu_c):
            nev_check *= 2

    order = np.argsort(mu, kind="stable")
    mu = np.concatenate([[0.0], mu[order]])
    U = np.hstack([const, _fix_signs(U[:, order])])
    res = np.concatenate([_residuals(op, np.zeros(1), const), res[order]])
    return Spectrum(mu, U / h, op.cell_area, res, op.mask)


@dataclass(frozen=True)
class WeylReport:
    fitted: float
    predicted: float
    relative_deviation: float
    intercept: float
    k_range: tuple[int, int]

    def as_dict(self) -> dict:
        return {
            "fitted_slope": self.fitted,
            "predicted_slope": self.predicted,
            "relative_deviation": self.relative_deviation,
            "intercept": self.intercept,
            "k_range": list(self.k_range),
        }


def weyl_fit(spectrum: Spectrum, domain_area: float) -> WeylReport:
    """Least-squares slope of mu_k against k over the upper half of the
    computed range, compared with the two-dimensional Weyl slope 4 pi/|Omega|."""
    K = spectrum.K
    if K < 20:
        raise InsufficientModes(f"need at least 20 modes for a Weyl fit, got {K}")
    k = np.arange(K // 2, K)
    slope, intercept = np.polyfit(k, spectrum.mu[K // 2 :], 1)
    predicted = 4 * math.pi / domain_area
    return WeylReport(float(slope), predicted, float(slope / predicted - 1), float(intercept), (K // 2, K))
