import math

import mpmath
import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rimeig.pencil import Pencil, diagonal_pencil, example3_pencil
from rimeig.projector import (QuadratureNode, Rectangle, edge_quadrature, indicator, project,
                              rational_filter)

# 3/pi: value of the two-point-per-edge filter at the centre of any square,
# evaluated independently below with mpmath
CENTER_FILTER = 0.954929658551372


def oracle_filter(rect, lam):
    """Rational filter from hard-coded Gauss points, in 30-digit arithmetic."""
    mpmath.mp.dps = 30
    cs = [mpmath.mpc(rect.re_min, rect.im_min), mpmath.mpc(rect.re_max, rect.im_min),
          mpmath.mpc(rect.re_max, rect.im_max), mpmath.mpc(rect.re_min, rect.im_max)]
    g = 1 / mpmath.sqrt(3)
    total = 0
    for a, b in zip(cs, cs[1:] + cs[:1]):
        for t in (-g, g):
            total += (b - a) / 2 / ((a + b) / 2 + (b - a) / 2 * t - lam)
    return complex(total / (2j * mpmath.pi))


UNIT = Rectangle(0, 1, 0, 1)
WIDE = Rectangle(0, 2, -1, 1)


def test_rectangle_validation():
    with pytest.raises(ValueError):
        Rectangle(1, 1, 0, 1)
    with pytest.raises(ValueError):
        Rectangle(0, 1, 2, 1)
    assert Rectangle.parse("0,0.5,-1,1") == Rectangle(0, 0.5, -1, 1)


def test_unit_square_nodes():
    nodes = edge_quadrature(UNIT)
    assert len(nodes) == 8
    assert abs(sum(n.w for n in nodes)) <= 1e-15
    g = 1 / math.sqrt(3)
    expected = [0.5 - 0.5 * g, 0.5 + 0.5 * g]
    np.testing.assert_allclose([nodes[0].z.real, nodes[1].z.real], expected, rtol=1e-15)
    assert nodes[0].w == 0.5 and nodes[2].w == 0.5j and nodes[4].w == -0.5 and nodes[6].w == -0.5j


def test_nodes_on_boundary_counterclockwise():
    r = Rectangle(-1.5, 2.0, 0.25, 3.0)
    nodes = edge_quadrature(r)
    for nd in nodes:
        on_edge = (nd.z.real in (r.re_min, r.re_max)) or (nd.z.imag in (r.im_min, r.im_max))
        assert on_edge and r.contains(nd.z)
    # counterclockwise: winding number of the centre is +1
    assert rational_filter(nodes, r.center).real > 0


def test_center_filter_value():
    f = rational_filter(edge_quadrature(UNIT), 0.5 + 0.5j)
    assert f == pytest.approx(CENTER_FILTER, abs=1e-14)
    assert oracle_filter(UNIT, 0.5 + 0.5j) == pytest.approx(CENTER_FILTER, abs=1e-15)


def test_far_pole_filter():
    assert abs(rational_filter(edge_quadrature(UNIT), 10 + 10j)) <= 1e-2


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(1e-3, 10), st.floats(1e-3, 10),
       st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=200, deadline=None)
def test_closed_contour_weights_sum_to_zero(x, y, w, h, lx, ly):
    r = Rectangle(x, x + w, y, y + h)
    total = sum(n.w for n in edge_quadrature(r))
    assert abs(total) <= 8 * np.finfo(float).eps * (w + h)
    lam = complex(lx, ly)
    if min(abs(n.z - lam) for n in edge_quadrature(r)) > 1e-3 * (w + h):
        assert rational_filter(edge_quadrature(r), lam) == pytest.approx(oracle_filter(r, lam),
                                                                          rel=1e-9, abs=1e-12)


@given(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False),
       st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=6))
@settings(max_examples=100, deadline=None)
def test_translation_equivariance(shift, eigs):
    r = Rectangle(-1, 1, -1, 1)
    rs = Rectangle(-1 + shift.real, 1 + shift.real, -1 + shift.imag, 1 + shift.imag)
    base = rational_filter(edge_quadrature(r), np.array(eigs))
    moved = rational_filter(edge_quadrature(rs), np.array(eigs) + shift)
    if np.min(np.abs(np.subtract.outer([n.z for n in edge_quadrature(r)], eigs))) > 1e-2:
        np.testing.assert_allclose(moved, base, rtol=0, atol=1e-12 * max(1, abs(shift)) * np.abs(base).max())


def test_project_diagonal_inside_outside():
    p = diagonal_pencil([1, 10])
    out = project(p, edge_quadrature(WIDE), np.array([1.0, 1.0]))
    np.testing.assert_allclose(out, [1, 0], atol=0.05)
    np.testing.assert_allclose(out, [CENTER_FILTER, oracle_filter(WIDE, 10)], rtol=1e-10, atol=1e-16)


def test_project_zero():
    p = example3_pencil(20, 5)
    np.testing.assert_array_equal(project(p, edge_quadrature(UNIT), np.zeros(20)), np.zeros(20))


def test_project_empty_region_small():
    rng = np.random.default_rng(5)
    diam = UNIT.diameter
    eigs = UNIT.center + (2 * diam + rng.uniform(0, 3, 8)) * np.exp(2j * np.pi * rng.uniform(size=8))
    y = rng.standard_normal(8)
    out = project(diagonal_pencil(eigs), edge_quadrature(UNIT), y)
    assert np.linalg.norm(out) <= 0.05 * np.linalg.norm(y)


@pytest.mark.parametrize("seed", range(5))
def test_filter_consistency_diagonal(seed):
    rng = np.random.default_rng(seed)
    eigs = rng.uniform(-1, 3, 7) + 1j * rng.uniform(-2, 2, 7)
    y = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    nodes = edge_quadrature(WIDE)
    out = project(diagonal_pencil(eigs), nodes, y)
    np.testing.assert_allclose(out, rational_filter(nodes, eigs) * y, rtol=1e-10)


def test_linearity():
    rng = np.random.default_rng(11)
    p = example3_pencil(40, 10)
    nodes = edge_quadrature(Rectangle(0.005, 0.05, -0.01, 0.01))
    y1, y2 = rng.standard_normal(40), rng.standard_normal(40)
    alpha, beta = 2 - 1j, 0.3 + 4j
    lhs = project(p, nodes, alpha * y1 + beta * y2)
    rhs = alpha * project(p, nodes, y1) + beta * project(p, nodes, y2)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)


def test_sparse_matches_dense():
    p = example3_pencil(40, 10)
    q = Pencil(sp.csr_matrix(p.a), sp.csr_matrix(p.b))
    nodes = edge_quadrature(Rectangle(0.005, 0.05, -0.01, 0.01))
    y = np.random.default_rng(2).standard_normal(40)
    np.testing.assert_allclose(project(q, nodes, y), project(p, nodes, y), rtol=1e-10)


def test_node_on_eigenvalue_is_perturbed():
    nodes = edge_quadrature(UNIT)
    lam = nodes[3].z
    res = indicator(diagonal_pencil([lam, 5.0]), UNIT, np.array([[1.0], [1.0]]), 10)
    assert res.degenerate_nodes == 1
    assert res.chi > 1  # the eigenvalue sits on the contour and is picked up


def test_indicator_inside():
    res = indicator(diagonal_pencil([1.0]), WIDE, np.array([1.0]), 10)
    assert res.chi == pytest.approx(10, rel=0.2)
    assert res.chi == pytest.approx(10 * CENTER_FILTER, rel=1e-12)


def test_indicator_outside():
    res = indicator(diagonal_pencil([10.0]), WIDE, np.array([1.0]), 10)
    assert res.chi <= 1


def test_indicator_exact_zero_projection():
    # y has no component along the only eigenvector inside the region
    res = indicator(diagonal_pencil([1.0, 50.0]), WIDE, [np.array([0.0, 1.0])], 10)
    assert res.chi < 1e-6
    res = indicator(diagonal_pencil([1.0]), WIDE, [np.zeros(1)], 10)
    assert res.chi == 0.0 and res.per_vector == [(0.0, 0.0)]


def test_indicator_takes_max_over_vectors():
    p = diagonal_pencil([1.0, 50.0])
    ys = [np.array([0.0, 1.0]), np.array([1.0, 0.0])]
    res = indicator(p, WIDE, ys, 10)
    assert len(res.per_vector) == 2
    assert res.chi == pytest.approx(10 * CENTER_FILTER, rel=1e-10)


def test_indicator_rejects_bad_amplifier():
    with pytest.raises(ValueError):
        indicator(diagonal_pencil([1.0]), WIDE, [np.ones(1)], 0)


def test_quadrature_node_type():
    n = QuadratureNode(1 + 1j, 0.5)
    assert n.z == 1 + 1j and n.w == 0.5
