"""Linear Lagrange finite elements on triangles.

Builds the block pencil of the interior transmission eigenvalue problem

    div grad w + k^2 n w = 0,  lap v + k^2 v = 0  in D,
    w = v,  dw/dnu = dv/dnu                      on dD,

with unknowns ``[w_0; v_0; w_B]`` (interior values of w and v, then the shared
boundary values), and the Neumann Laplacian pencil ``S x = lambda M x``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .pencil import Pencil


class MeshError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangle mesh with counterclockwise triangles.

    ``mesh_size_h`` is the longest edge.
    """

    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3) int
    boundary_flags: np.ndarray  # (nv,) bool

    @property
    def mesh_size_h(self) -> float:
        edges = self.edges()
        return float(np.linalg.norm(self.vertices[edges[:, 0]] - self.vertices[edges[:, 1]], axis=1).max())

    @property
    def num_interior(self) -> int:
        return int((~self.boundary_flags).sum())

    @property
    def num_boundary(self) -> int:
        return int(self.boundary_flags.sum())

    def areas(self) -> np.ndarray:
        """Signed triangle areas."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.sort(np.r_[t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
        return np.unique(e, axis=0)

    def dof_order(self) -> np.ndarray:
        """Vertex indices, interior first then boundary, each in ascending order."""
        return np.r_[np.nonzero(~self.boundary_flags)[0], np.nonzero(self.boundary_flags)[0]]

    def save(self, path: str | os.PathLike) -> None:
        """Plain text: ``vertices N`` + ``x y is_boundary`` lines, ``triangles M`` + index triples."""
        with open(path, "w") as fh:
            fh.write(f"vertices {len(self.vertices)}\n")
            for (x, y), b in zip(self.vertices, self.boundary_flags):
                fh.write(f"{float(x)!r} {float(y)!r} {int(b)}\n")
            fh.write(f"triangles {len(self.triangles)}\n")
            for i, j, k in self.triangles:
                fh.write(f"{i} {j} {k}\n")


def load_mesh(path: str | os.PathLike) -> Mesh:
    with open(path) as fh:
        tag, nv = fh.readline().split()
        if tag != "vertices":
            raise MeshError(f"{path}: expected 'vertices' header")
        rows = [fh.readline().split() for _ in range(int(nv))]
        tag, nt = fh.readline().split()
        if tag != "triangles":
            raise MeshError(f"{path}: expected 'triangles' header")
        tris = [fh.readline().split() for _ in range(int(nt))]
    verts = np.array([[float(r[0]), float(r[1])] for r in rows])
    flags = np.array([r[2] == "1" for r in rows])
    return Mesh(verts, np.array(tris, dtype=int).reshape(-1, 3), flags)


def square_mesh(h_target: float, jitter: float = 0.0, seed: int = 0) -> Mesh:
    """Unit square split into ``ceil(1/h_target)^2`` cells, each cut along its
    lower-left to upper-right diagonal.

    Interior vertices are displaced by independent uniform offsets of at most
    ``jitter * cell`` per coordinate; boundary vertices stay put.
    """
    if not 0 < h_target < 1:
        raise ValueError("h_target must lie in (0, 1)")
    if not 0 <= jitter < 0.5:
        raise ValueError("jitter must lie in [0, 0.5)")
    m = math.ceil(1.0 / h_target - 1e-9)
    xs = np.arange(m + 1) / m
    X, Y = np.meshgrid(xs, xs)
    verts = np.c_[X.ravel(), Y.ravel()]
    ii, jj = np.meshgrid(np.arange(m), np.arange(m))
    ll = (jj * (m + 1) + ii).ravel()
    lr, ul = ll + 1, ll + m + 1
    ur = ul + 1
    tris = np.empty((2 * m * m, 3), dtype=int)
    tris[0::2] = np.c_[ll, lr, ur]
    tris[1::2] = np.c_[ll, ur, ul]
    ix, iy = np.divmod(np.arange((m + 1) ** 2), m + 1)[::-1]
    boundary = (ix == 0) | (ix == m) | (iy == 0) | (iy == m)
    if jitter > 0:
        rng = np.random.default_rng(seed)
        offsets = rng.uniform(-jitter / m, jitter / m, size=verts.shape)
        verts = verts + np.where(boundary[:, None], 0.0, offsets)
    return Mesh(verts, tris, boundary)


def disc_mesh(radius: float, h_target: float) -> Mesh:
    """Disc centred at the origin meshed ring by ring.

    ``ceil(radius/h_target)`` equally spaced rings; ring ``i`` carries
    ``round(2 pi i)`` vertices so neighbouring vertices sit about one ring
    spacing apart. Each ring is rotated by a golden-ratio offset, so the mesh
    has no rotational symmetry that would keep angular eigenpairs exactly
    degenerate. Consecutive rings are zipped together by angle.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if not 0 < h_target < radius:
        raise ValueError("h_target must lie in (0, radius)")
    rings = math.ceil(radius / h_target - 1e-9)
    golden = 0.5 * (math.sqrt(5.0) - 1.0)
    verts = [np.zeros((1, 2))]
    angles = [np.zeros(1)]
    start = 1
    ring_ids = [np.array([0])]
    for i in range(1, rings + 1):
        rho = radius * i / rings
        count = max(3, round(2 * math.pi * i))
        theta = 2 * math.pi * ((i * golden) % 1.0 + np.arange(count)) / count
        theta = np.mod(theta, 2 * math.pi)
        order = np.argsort(theta)
        theta = theta[order]
        pts = rho * np.c_[np.cos(theta), np.sin(theta)]
        if i == rings:
            # exact |x| = radius up to the last rounding of cos/sin
            pts *= radius / np.linalg.norm(pts, axis=1)[:, None]
        verts.append(pts)
        angles.append(theta)
        ring_ids.append(start + np.arange(count))
        start += count
    tris = []
    first = ring_ids[1]
    for k in range(len(first)):
        tris.append((0, first[k], first[(k + 1) % len(first)]))
    for r in range(1, rings):
        a_ids, b_ids = ring_ids[r], ring_ids[r + 1]
        ta = np.r_[angles[r], angles[r][0] + 2 * math.pi]
        tb = np.r_[angles[r + 1], angles[r + 1][0] + 2 * math.pi]
        na, nb = len(a_ids), len(b_ids)
        i = j = 0
        while i < na or j < nb:
            if j >= nb or (i < na and ta[i + 1] <= tb[j + 1]):
                tris.append((a_ids[i % na], b_ids[j % nb], a_ids[(i + 1) % na]))
                i += 1
            else:
                tris.append((a_ids[i % na], b_ids[j % nb], b_ids[(j + 1) % nb]))
                j += 1
    vertices = np.vstack(verts)
    tris = np.array(tris, dtype=int)
    boundary = np.zeros(len(vertices), dtype=bool)
    boundary[ring_ids[-1]] = True
    mesh = Mesh(vertices, tris, boundary)
    if np.any(mesh.areas() <= 0):
        raise MeshError("ring zipping produced a misoriented triangle")
    return mesh


@dataclass(frozen=True)
class RefractionIndex:
    """Piecewise constant index of refraction, evaluated at triangle centroids.

    ``value`` is either a constant or a vectorised function of ``(k, 2)`` points.
    """

    value: float | Callable[[np.ndarray], np.ndarray] = 16.0

    def on_elements(self, mesh: Mesh) -> np.ndarray:
        if callable(self.value):
            centroids = mesh.vertices[mesh.triangles].mean(axis=1)
            n = np.asarray(self.value(centroids), dtype=float)
        else:
            n = np.full(len(mesh.triangles), float(self.value))
        if np.any(n <= 0) or np.any(n == 1):
            raise ValueError("index of refraction must be positive and different from 1")
        return n


@dataclass(frozen=True, eq=False)
class FemMatrices:
    """Stiffness ``s``, mass ``m`` and weighted mass ``m_n``, DoFs interior first."""

    s: sp.csr_matrix
    m: sp.csr_matrix
    m_n: sp.csr_matrix
    num_interior: int
    num_boundary: int
    dof_to_vertex: np.ndarray

    @property
    def split(self) -> tuple[slice, slice]:
        return slice(0, self.num_interior), slice(self.num_interior, None)


def element_matrices(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local stiffness and mass matrices for triangles ``points`` of shape (nt, 3, 2).

    Returns ``(stiffness, mass, area)``; the mass uses ``area/12 * (1 + delta_ab)``.
    """
    x, y = points[..., 0], points[..., 1]
    # gradients of barycentric coordinates: grad l_a = (y_b - y_c, x_c - x_b) / (2 area)
    by = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    bx = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (bx[:, 2] * by[:, 1] - bx[:, 1] * by[:, 2])
    stiff = (by[:, :, None] * by[:, None, :] + bx[:, :, None] * bx[:, None, :]) / (4 * area)[:, None, None]
    mass = (area / 12)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    return stiff, mass, area


def assemble(mesh: Mesh, n: RefractionIndex | float = 16.0) -> FemMatrices:
    """Exact P1 stiffness, mass and n-weighted mass matrices."""
    if not isinstance(n, RefractionIndex):
        n = RefractionIndex(n)
    tris = mesh.triangles
    bad = np.nonzero(mesh.areas() <= 0)[0]
    if len(bad):
        raise MeshError(f"{len(bad)} triangles with non-positive area, first {int(bad[0])}")
    stiff, mass, area = element_matrices(mesh.vertices[tris])
    n_el = n.on_elements(mesh)
    order = mesh.dof_order()
    dof = np.empty(len(order), dtype=int)
    dof[order] = np.arange(len(order))
    t = dof[tris]
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    shape = (len(order),) * 2

    def build(vals):
        mat = sp.coo_matrix((vals.ravel(), (rows, cols)), shape=shape).tocsr()
        return ((mat + mat.T) * 0.5).tocsr()

    return FemMatrices(build(stiff), build(mass), build(mass * n_el[:, None, None]),
                       mesh.num_interior, mesh.num_boundary, order)


def te_pencil(fem: FemMatrices) -> Pencil:
    """Transmission eigenvalue pencil ``A x = k^2 B x`` of dimension ``2 N0 + NB``.

    Row blocks: the w equation tested with interior functions, the v equation
    tested with interior functions, and the difference of both tested with
    boundary functions.
    """
    i, b = fem.split
    S, M, Mn = fem.s, fem.m, fem.m_n
    s_ii, s_ib = S[i, i], S[i, b]
    m_ii, m_ib, m_bb = M[i, i], M[i, b], M[b, b]
    mn_ii, mn_ib, mn_bb = Mn[i, i], Mn[i, b], Mn[b, b]
    a = sp.bmat([[s_ii, None, s_ib],
                 [None, s_ii, s_ib],
                 [s_ib.T, -s_ib.T, None]], format="csr")
    bmat = sp.bmat([[mn_ii, None, mn_ib],
                    [None, m_ii, m_ib],
                    [mn_ib.T, -m_ib.T, mn_bb - m_bb]], format="csr")
    return Pencil(a, bmat)


def neumann_pencil(fem: FemMatrices) -> Pencil:
    """``S x = lambda M x`` over all DoFs (natural boundary condition)."""
    return Pencil(fem.s, fem.m)
