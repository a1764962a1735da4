from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import ndimage

from heatloc.discretization import GridMask, assemble_neumann_laplacian, rasterize
from heatloc.errors import NeckPinchOff, ThinFeatureWarning, TooCoarse
from heatloc.geometry import DomainSpec, area, build_domain, contains_points, unit_square

from conftest import random_mask


def test_unit_square_half():
    m = rasterize(unit_square(), 0.5)
    assert (m.nx, m.ny, m.N) == (2, 2, 4)


def test_unit_square_counting():
    assert rasterize(unit_square(), 1 / 128).N == 128 * 128


def test_too_coarse():
    with pytest.raises(TooCoarse):
        rasterize(unit_square(), 0.9)


def test_slit_rows_excluded_and_area():
    dom = build_domain(DomainSpec("slit_box", {"width": 2.0, "height": 1.0, "slit_length": 0.6, "slit_thickness": 0.01, "gap": 0.1}))
    h = 1 / 256
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = rasterize(dom, h)
    # thickness 0.01 spans 2.56 cells: resolved, no warning
    assert not any(issubclass(w.category, ThinFeatureWarning) for w in caught)
    assert m.feature_widths["upper_slit"] >= 2
    assert m.N * h * h == pytest.approx(area(dom), rel=0.02)
    for name in ("upper_slit_center", "lower_slit_center"):
        centre = np.asarray(dom.landmarks[name])
        ij = np.floor((centre - m.origin) / h).astype(int)
        assert not m.included[ij[0], ij[1]]


def test_thin_slit_warns_at_coarse_h():
    dom = build_domain(DomainSpec("slit_box", {"slit_thickness": 0.01}))
    with pytest.warns(ThinFeatureWarning, match="slit"):
        rasterize(dom, 1 / 64)


def test_mask_invariants_on_disk_chain():
    spec = DomainSpec("disk_chain", {"n_disks": 3, "r0": 1.0, "neck_floor": 0.1})
    dom = build_domain(spec)
    m = rasterize(dom, 1 / 32, neck_floor=0.1)
    assert contains_points(dom, m.centers()).all()
    _, ncomp = ndimage.label(m.included)
    assert ncomp == 1
    assert sorted(m.dof_index[m.included]) == list(range(m.N))


def test_neck_pinch_off_is_fatal_below_two_cells():
    spec = DomainSpec("disk_chain", {"n_disks": 3, "r0": 4.0, "neck_length": 3.0, "neck_floor": 0.01})
    dom = build_domain(spec)
    with pytest.raises(NeckPinchOff, match="neck_2"):
        rasterize(dom, 1 / 16, neck_floor=0.01)


def test_single_cell_and_pairs():
    one = assemble_neumann_laplacian(GridMask.from_array(np.ones((1, 1), bool)))
    assert one.to_dense().tolist() == [[0.0]]
    two = assemble_neumann_laplacian(GridMask.from_array(np.ones((1, 2), bool), h=1.0))
    assert two.to_dense().tolist() == [[1.0, -1.0], [-1.0, 1.0]]


def test_path_of_three():
    op = assemble_neumann_laplacian(GridMask.from_array(np.ones((3, 1), bool), h=1.0))
    np.testing.assert_allclose(np.linalg.eigvalsh(op.to_dense()), [0, 1, 3], atol=1e-14)


@given(st.integers(0, 10_000))
def test_operator_invariants(seed):
    rng = np.random.default_rng(seed)
    m = random_mask(rng, 600)
    op = assemble_neumann_laplacian(m)
    L = op.matrix
    assert (L != L.T).nnz == 0
    assert np.all(op.stencil @ np.ones(op.N) == 0)
    assert np.all(op.matvec(np.ones(op.N)) == 0)
    v = rng.standard_normal(op.N)
    e = op.edges()
    direct = np.sum((v[e[:, 0]] - v[e[:, 1]]) ** 2) / op.cell_area
    assert op.quadratic_form(v) == pytest.approx(direct, rel=1e-12)
    assert op.quadratic_form(v) >= 0


def test_stencil_entries_match_neighbour_counts():
    inc = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    m = GridMask.from_array(inc, h=0.5)
    op = assemble_neumann_laplacian(m)
    for (i, j), k in zip(m.cells, range(m.N)):
        nb = sum(
            0 <= i + di < 3 and 0 <= j + dj < 3 and inc[i + di, j + dj]
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1))
        )
        assert op.to_dense()[k, k] == nb / 0.25


def test_assembly_is_deterministic():
    m = random_mask(np.random.default_rng(5))
    a = assemble_neumann_laplacian(m).stencil
    b = assemble_neumann_laplacian(m).stencil
    assert (a != b).nnz == 0
    assert np.array_equal(a.indices, b.indices)


def test_dof_numbering_row_major_in_j():
    m = rasterize(unit_square(), 0.25)
    assert m.cells[:5].tolist() == [[0, 0], [1, 0], [2, 0], [3, 0], [0, 1]]
    assert m.dof_at((0.9, 0.1)) == 3


def test_csv_rows_and_coo():
    m = rasterize(unit_square(), 0.5)
    assert m.csv_rows() == [(0, 0, 0), (1, 0, 1), (0, 1, 2), (1, 1, 3)]
    rows = assemble_neumann_laplacian(m).coo_rows()
    assert rows[0] == (0, 0, 8.0)
    assert len(rows) == 4 + 8
