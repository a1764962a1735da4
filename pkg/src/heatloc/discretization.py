"""Cell-centred rasterization and the finite-volume Neumann Laplacian."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .errors import NeckPinchOff, NeckPinchOffWarning, ThinFeatureWarning, TooCoarse
from .geometry import PolygonDomain, contains_points


@dataclass(frozen=True, eq=False)
class GridMask:
    """Included cells of a regular grid.

    ``included[i, j]`` refers to the cell with centre
    ``origin + ((i + 1/2) h, (j + 1/2) h)``. Degrees of freedom are numbered
    row by row (``j`` major, ``i`` fastest).
    """

    origin: tuple[float, float]
    h: float
    nx: int
    ny: int
    included: np.ndarray
    discarded: int = 0
    feature_widths: dict = field(default_factory=dict)

    def __post_init__(self):
        inc = np.asarray(self.included, dtype=bool)
        inc.setflags(write=False)
        object.__setattr__(self, "included", inc)
        jj, ii = np.nonzero(inc.T)
        idx = np.full(inc.shape, -1, dtype=np.int64)
        idx[ii, jj] = np.arange(len(ii))
        idx.setflags(write=False)
        object.__setattr__(self, "_cells", np.column_stack([ii, jj]))
        object.__setattr__(self, "_dof", idx)

    @property
    def N(self) -> int:
        return len(self._cells)

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def area(self) -> float:
        """|Omega_h| = N h^2."""
        return self.N * self.cell_area

    @property
    def cells(self) -> np.ndarray:
        """(N, 2) integer cell coordinates ``(i, j)`` in dof order."""
        return self._cells

    @property
    def dof_index(self) -> np.ndarray:
        """(nx, ny) array of dof numbers, ``-1`` for excluded cells."""
        return self._dof

    def centers(self) -> np.ndarray:
        return np.asarray(self.origin) + (self._cells + 0.5) * self.h

    def dof_at(self, point) -> int:
        """Dof of the included cell whose centre is nearest to ``point``."""
        d = np.hypot(*(self.centers() - np.asarray(point, dtype=float)).T)
        return int(np.argmin(d))

    def same_grid(self, other: "GridMask") -> bool:
        return (
            self is other
            or (
                self.h == other.h
                and tuple(self.origin) == tuple(other.origin)
                and self.included.shape == other.included.shape
                and np.array_equal(self.included, other.included)
            )
        )

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return [(int(i), int(j), k) for k, (i, j) in enumerate(self._cells)]

    @classmethod
    def from_array(cls, included, h: float = 1.0, origin=(0.0, 0.0)) -> "GridMask":
        inc = np.asarray(included, dtype=bool)
        return cls(tuple(map(float, origin)), float(h), inc.shape[0], inc.shape[1], inc)


def _measure_feature(mask_inc: np.ndarray, origin, h, feature) -> int:
    """Cells spanned by a feature along its axis, through its centre."""
    cx, cy = feature.center
    i = int(math.floor((cx - origin[0]) / h))
    j = int(math.floor((cy - origin[1]) / h))
    nx, ny = mask_inc.shape
    if feature.axis == "x":
        line, pos = (mask_inc[:, j] if 0 <= j < ny else None), i
    else:
        line, pos = (mask_inc[i, :] if 0 <= i < nx else None), j
    if line is None or not 0 <= pos < len(line):
        return 0
    want = feature.kind == "channel"
    # a thin feature may sit between two cell centres; start from the nearer one
    if line[pos] != want:
        frac = ((cy - origin[1]) / h if feature.axis == "y" else (cx - origin[0]) / h) - pos
        alt = pos + (1 if frac >= 0.5 else -1)
        if 0 <= alt < len(line) and line[alt] == want:
            pos = alt
        else:
            return 0
    lo = pos
    while lo - 1 >= 0 and line[lo - 1] == want:
        lo -= 1
    hi = pos
    while hi + 1 < len(line) and line[hi + 1] == want:
        hi += 1
    return hi - lo + 1


def rasterize(domain: PolygonDomain, h: float, neck_floor: float | None = None) -> GridMask:
    """Include every cell whose centre lies in ``domain``; keep the largest
    4-connected component."""
    if not h > 0:
        raise TooCoarse(f"grid spacing must be positive, got {h}")
    xmin, ymin, xmax, ymax = domain.bbox
    nx = max(1, int(math.ceil((xmax - xmin) / h - 1e-9)))
    ny = max(1, int(math.ceil((ymax - ymin) / h - 1e-9)))
    origin = (xmin, ymin)
    gx = xmin + (np.arange(nx) + 0.5) * h
    gy = ymin + (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    inside = contains_points(domain, np.column_stack([X.ravel(), Y.ravel()])).reshape(nx, ny)

    labels, ncomp = ndimage.label(inside)
    discarded = 0
    if ncomp > 1:
        sizes = np.bincount(labels.ravel())[1:]
        keep = 1 + int(np.argmax(sizes))
        discarded = int(sizes.sum() - sizes.max())
        inside = labels == keep
    if inside.sum() < 4:
        raise TooCoarse(f"only {int(inside.sum())} cells included at h={h}")

    widths = {}
    floor = 4 * h if neck_floor is None else neck_floor
    for feat in domain.features:
        cells = _measure_feature(inside, origin, h, feat)
        widths[feat.name] = cells
        if feat.name.startswith("neck_") and cells == 0:
            msg = f"{feat.name} (width {feat.width:.3g}) pinched off at h={h:.4g}"
            if floor < 2 * h:
                raise NeckPinchOff(msg)
            warnings.warn(msg, NeckPinchOffWarning, stacklevel=2)
        elif cells < 2:
            warnings.warn(
                f"{feat.name} spans {cells} cell(s) at h={h:.4g} (width {feat.width:.3g})",
                ThinFeatureWarning,
                stacklevel=2,
            )
    return GridMask(origin, float(h), nx, ny, inside, discarded, widths)


@dataclass(frozen=True, eq=False)
class NeumannOperator:
    """L = S / h^2 with S the integer graph-Laplacian stencil of the mask."""

    stencil: sp.csr_matrix
    h: float
    mask: GridMask | None = None

    @property
    def N(self) -> int:
        return self.stencil.shape[0]

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def scale(self) -> float:
        return 1.0 / (self.h * self.h)

    @property
    def matrix(self) -> sp.csr_matrix:
        return (self.stencil * self.scale).tocsr()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        # integer stencil first keeps L @ 1 == 0 exact
        return (self.stencil @ v) * self.scale

    def quadratic_form(self, v: np.ndarray) -> float:
        return float(v @ self.matvec(v))

    def degrees(self) -> np.ndarray:
        return np.asarray(self.stencil.diagonal()).astype(np.int64)

    def edges(self) -> np.ndarray:
        """(E, 2) array of neighbour pairs ``i < j``."""
        coo = sp.triu(self.stencil, k=1).tocoo()
        return np.column_stack([coo.row, coo.col]).astype(np.int64)

    def to_dense(self) -> np.ndarray:
        return self.stencil.toarray() * self.scale

    def coo_rows(self) -> list[tuple[int, int, float]]:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]


def assemble_neumann_laplacian(mask: GridMask) -> NeumannOperator:
    N = mask.N
    idx = mask.dof_index
    rows, cols = [], []
    # right and up neighbours, both included
    for di, dj in ((1, 0), (0, 1)):
        a = idx[: idx.shape[0] - di, : idx.shape[1] - dj]
        b = idx[di:, dj:]
        ok = (a >= 0) & (b >= 0)
        rows.append(a[ok])
        cols.append(b[ok])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    off = sp.coo_matrix((np.ones(len(r)), (r, c)), shape=(N, N))
    adj = (off + off.T).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    stencil = (sp.diags(deg) - adj).tocsr()
    stencil.sort_indices()
    return NeumannOperator(stencil, mask.h, mask)
