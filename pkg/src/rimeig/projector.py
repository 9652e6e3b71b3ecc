"""Quadrature approximation of the spectral projection over a rectangle.

For a closed contour with nodes ``z_q`` and weights ``w_q`` (the weights carry
``dz``), the projection of ``y`` is approximated by ``sum_q r_q`` with

    (z_q B - A) r_q = w_q / (2 pi i) * B y.

On an eigencomponent with eigenvalue ``lam`` this acts as multiplication by the
scalar rational filter ``f(lam) = 1/(2 pi i) sum_q w_q / (z_q - lam)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linsolve import ShiftedFactorization, SingularShift, factor, solve
from .pencil import Pencil

logger = logging.getLogger(__name__)

_ULP = np.finfo(float).eps
GAUSS_POINTS = 2
PERTURBATION = 1e-8  # inward node shift on a singular solve, relative to diam(rect)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle ``[re_min, re_max] x [im_min, im_max]``."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"rectangle coordinates must be finite: {vals}")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate rectangle {vals}")

    @classmethod
    def parse(cls, text: str) -> "Rectangle":
        """Parse ``"re_min,re_max,im_min,im_max"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected re_min,re_max,im_min,im_max, got {text!r}")
        return cls(*parts)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> list[complex]:
        """Corners in counterclockwise order starting at the lower left."""
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= z.real <= self.re_max + pad
                and self.im_min - pad <= z.imag <= self.im_max + pad)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.re_min, self.re_max, self.im_min, self.im_max)


@dataclass(frozen=True)
class QuadratureNode:
    z: complex
    w: complex


@dataclass
class IndicatorResult:
    """Outcome of the admissibility test on one rectangle.

    ``per_vector`` holds ``(||P y_j||, ||P(K P y_j)||)`` for each test vector.
    """

    chi: float
    per_vector: list[tuple[float, float]] = field(default_factory=list)
    degenerate_nodes: int = 0
    factorizations: int = 0
    solves: int = 0


def edge_quadrature(rect: Rectangle, order: int = GAUSS_POINTS) -> list[QuadratureNode]:
    """Gauss-Legendre nodes on each edge of ``rect``, counterclockwise.

    Each edge ``z0 -> z1`` is parametrised as ``(z0+z1)/2 + (z1-z0)/2 * t`` for
    ``t`` in [-1, 1], so a node with Gauss weight ``g`` gets weight ``g (z1-z0)/2``.
    """
    t, g = np.polynomial.legendre.leggauss(order)
    corners = rect.corners()
    nodes = []
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        mid, half = 0.5 * (z0 + z1), 0.5 * (z1 - z0)
        nodes.extend(QuadratureNode(mid + half * tk, half * gk) for tk, gk in zip(t, g))
    return nodes


def rational_filter(nodes: Sequence[QuadratureNode], lam: complex | np.ndarray) -> complex | np.ndarray:
    """``f(lam) = 1/(2 pi i) sum_q w_q / (z_q - lam)``, the scalar filter induced by ``nodes``."""
    lam = np.asarray(lam, dtype=complex)
    total = np.zeros(lam.shape, dtype=complex)
    for node in nodes:
        total = total + node.w / (node.z - lam)
    total = total / (2j * np.pi)
    return complex(total) if total.ndim == 0 else total


def _bounding_center(nodes: Sequence[QuadratureNode]) -> tuple[complex, float]:
    zs = np.array([nd.z for nd in nodes])
    lo = complex(zs.real.min(), zs.imag.min())
    hi = complex(zs.real.max(), zs.imag.max())
    return 0.5 * (lo + hi), abs(hi - lo)


class ContourProjector:
    """Factorizations of ``z_q B - A`` for one set of nodes, applied repeatedly.

    A node on which the factorization is singular is moved toward the contour's
    center by ``PERTURBATION * diam`` and refactored once.
    """

    def __init__(self, pencil: Pencil, nodes: Sequence[QuadratureNode]):
        self.pencil = pencil
        self.nodes = list(nodes)
        self.degenerate_nodes = 0
        self.solves = 0
        center, diam = _bounding_center(self.nodes)
        self.factors: list[ShiftedFactorization] = []
        for node in self.nodes:
            try:
                fact = factor(pencil, node.z)
            except SingularShift:
                z = node.z + PERTURBATION * diam * (center - node.z) / abs(center - node.z)
                logger.debug("node %s singular, retrying at %s", node.z, z)
                fact = factor(pencil, z)
                self.degenerate_nodes += 1
            self.factors.append(fact)

    @property
    def factorizations(self) -> int:
        return len(self.factors) + self.degenerate_nodes

    def apply(self, y: np.ndarray) -> np.ndarray:
        """Projected vector(s) for ``y`` of shape ``(n,)`` or ``(n, J)``."""
        y = np.asarray(y)
        if y.shape[0] != self.pencil.n:
            raise ValueError(f"vector length {y.shape[0]} != pencil dimension {self.pencil.n}")
        by = self.pencil.b @ y
        out = np.zeros(y.shape, dtype=complex)
        # fixed node order keeps the sum reproducible
        for node, fact in zip(self.nodes, self.factors):
            out += solve(fact, (node.w / (2j * np.pi)) * by)
            self.solves += 1 if y.ndim == 1 else y.shape[1]
        return out


def project(pencil: Pencil, nodes: Sequence[QuadratureNode], y: np.ndarray) -> np.ndarray:
    """Approximate spectral projection of ``y`` onto the eigenvalues enclosed by ``nodes``."""
    return ContourProjector(pencil, nodes).apply(y)


def indicator(pencil: Pencil, rect: Rectangle, ys: Sequence[np.ndarray] | np.ndarray,
              K: float = 10.0, order: int = GAUSS_POINTS) -> IndicatorResult:
    """``chi = max_j ||P(K P y_j)|| / ||P y_j||`` over the test vectors.

    A projection with ``||P y_j|| <= n ulp ||y_j||`` counts as ratio 0.
    """
    if K <= 0:
        raise ValueError("amplifier K must be positive")
    Y = np.asarray(ys)
    if Y.ndim == 1:
        Y = Y[:, None]
    elif not isinstance(ys, np.ndarray):
        Y = Y.T  # list of vectors -> columns
    if Y.shape[1] < 1:
        raise ValueError("need at least one test vector")
    proj = ContourProjector(pencil, edge_quadrature(rect, order))
    U = proj.apply(Y)
    V = proj.apply(K * U)
    n = pencil.n
    per_vector = []
    chi = 0.0
    for j in range(Y.shape[1]):
        nu = float(np.linalg.norm(U[:, j]))
        nv = float(np.linalg.norm(V[:, j]))
        per_vector.append((nu, nv))
        if nu > n * _ULP * np.linalg.norm(Y[:, j]):
            chi = max(chi, nv / nu)
    return IndicatorResult(chi, per_vector, proj.degenerate_nodes,
                           proj.factorizations, proj.solves)
