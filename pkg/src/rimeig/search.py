"""Recursive subdivision search for all eigenvalues of a pencil in a rectangle."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import IO, Iterator

import numpy as np

from .linsolve import SingularShift
from .pencil import Pencil
from .projector import GAUSS_POINTS, IndicatorResult, Rectangle, indicator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    """Tunable constants of the search.

    ``threshold`` defaults to ``amplifier / 10``; a region is admissible when
    its indicator exceeds it.
    """

    epsilon: float
    num_vectors: int = 3
    amplifier: float = 10.0
    threshold: float | None = None
    seed: int = 0
    max_depth: int = 60
    quadrature_order: int = GAUSS_POINTS

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.num_vectors < 1:
            raise ValueError("num_vectors must be >= 1")
        if not self.amplifier > 0:
            raise ValueError("amplifier must be positive")
        if self.threshold is None:
            object.__setattr__(self, "threshold", self.amplifier / 10.0)
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


@dataclass
class RegionNode:
    rect: Rectangle
    chi: float
    admissible: bool
    depth: int
    per_vector: list[tuple[float, float]] = field(default_factory=list)
    children: list["RegionNode"] = field(default_factory=list)

    def walk(self) -> Iterator["RegionNode"]:
        """Pre-order traversal (the order regions were visited)."""
        yield self
        for child in self.children:
            yield from child.walk()

    def record(self) -> dict:
        r = self.rect
        return {"re_min": r.re_min, "re_max": r.re_max, "im_min": r.im_min, "im_max": r.im_max,
                "depth": self.depth, "chi": self.chi, "admissible": self.admissible,
                "per_vector": [list(p) for p in self.per_vector]}


@dataclass
class SearchStats:
    regions: int = 0
    factorizations: int = 0
    solves: int = 0
    degenerate_nodes: int = 0


@dataclass
class EigenReport:
    eigenvalues: list[complex]
    cluster_sizes: list[int]
    boxes: list[Rectangle]
    tree: RegionNode | None
    stats: SearchStats
    complete: bool = True

    def write_region_log(self, fh: IO[str]) -> None:
        """One JSON record per visited region, in visiting order."""
        if self.tree is None:
            return
        for node in self.tree.walk():
            fh.write(json.dumps(node.record()) + "\n")


class MaxDepthExceeded(RuntimeError):
    """The refinement hit ``max_depth``; ``report`` holds what was found so far."""

    def __init__(self, report: EigenReport, rect: Rectangle):
        super().__init__(f"max_depth exceeded while refining {rect.as_tuple()}")
        self.report = report
        self.rect = rect


class RegionSolveError(RuntimeError):
    """A linear solve failed while testing ``rect``."""

    def __init__(self, rect: Rectangle, cause: Exception):
        super().__init__(f"solver failure on region {rect.as_tuple()}: {cause}")
        self.rect = rect


def size(rect: Rectangle) -> float:
    """Largest side length."""
    return max(rect.width, rect.height)


def subdivide(rect: Rectangle) -> list[Rectangle]:
    """The four quadrants: lower-left, lower-right, upper-left, upper-right."""
    xm = 0.5 * (rect.re_min + rect.re_max)
    ym = 0.5 * (rect.im_min + rect.im_max)
    return [Rectangle(rect.re_min, xm, rect.im_min, ym),
            Rectangle(xm, rect.re_max, rect.im_min, ym),
            Rectangle(rect.re_min, xm, ym, rect.im_max),
            Rectangle(xm, rect.re_max, ym, rect.im_max)]


def cluster_radius(epsilon: float) -> float:
    return 2.0 * epsilon * math.sqrt(2.0)


def _clusters(centers: list[complex], epsilon: float) -> list[list[int]]:
    """Connected components of the graph joining points closer than the cluster radius."""
    m = len(centers)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    radius = cluster_radius(epsilon)
    pts = np.asarray(centers, dtype=complex)
    for i in range(m):
        close = np.nonzero(np.abs(pts[i + 1:] - pts[i]) <= radius)[0] + i + 1
        for j in close:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _centroids(centers, epsilon):
    out = []
    for members in _clusters(centers, epsilon):
        pts = [centers[i] for i in members]
        out.append((complex(sum(pts) / len(pts)), len(pts)))
    out.sort(key=lambda c: (c[0].real, c[0].imag))
    return out


def cluster_boxes(centers: list[complex], epsilon: float) -> list[complex]:
    """Merge box centers within ``2 eps sqrt(2)`` of each other (transitively).

    Returns the cluster centroids sorted by real then imaginary part.
    """
    return [c for c, _ in _centroids(list(centers), epsilon)]


def random_vectors(n: int, count: int, seed: int) -> np.ndarray:
    """``count`` unit-norm columns with i.i.d. uniform [-1, 1] entries."""
    rng = np.random.default_rng(seed)
    Y = rng.uniform(-1.0, 1.0, size=(n, count))
    return Y / np.linalg.norm(Y, axis=0)


def rim(pencil: Pencil, region: Rectangle, config: SearchConfig) -> EigenReport:
    """Locate the eigenvalues of ``pencil`` inside ``region`` to within ``config.epsilon``.

    Depth-first: a region whose indicator exceeds the threshold is split into
    quadrants until its size is at most epsilon, at which point it is kept as a
    terminal box. Terminal box centers are then clustered into eigenvalues.

    Raises
    ------
    MaxDepthExceeded
        An admissible region larger than epsilon at ``config.max_depth``.
    RegionSolveError
        A shifted solve failed even after perturbing the offending node.
    """
    Y = random_vectors(pencil.n, config.num_vectors, config.seed)
    stats = SearchStats()
    terminal: list[tuple[int, Rectangle]] = []
    overflow: list[Rectangle] = []

    def visit(rect: Rectangle, depth: int) -> RegionNode:
        try:
            res: IndicatorResult = indicator(pencil, rect, Y, config.amplifier,
                                             config.quadrature_order)
        except (SingularShift, np.linalg.LinAlgError) as exc:
            raise RegionSolveError(rect, exc) from exc
        stats.regions += 1
        stats.factorizations += res.factorizations
        stats.solves += res.solves
        stats.degenerate_nodes += res.degenerate_nodes
        admissible = res.chi > config.threshold
        node = RegionNode(rect, res.chi, admissible, depth, res.per_vector)
        logger.debug("depth %d rect %s chi %.4g", depth, rect.as_tuple(), res.chi)
        if not admissible:
            return node
        if size(rect) <= config.epsilon:
            terminal.append((depth, rect))
        elif depth >= config.max_depth:
            overflow.append(rect)
        else:
            node.children = [visit(child, depth + 1) for child in subdivide(rect)]
        return node

    root = visit(region, 0)
    terminal.sort(key=lambda t: (t[0], t[1].re_min, t[1].im_min))
    boxes = [r for _, r in terminal]
    found = _centroids([r.center for r in boxes], config.epsilon)
    report = EigenReport([c for c, _ in found], [k for _, k in found], boxes, root, stats,
                         complete=not overflow)
    logger.info("rim: %d regions, %d factorizations, %d eigenvalues",
                stats.regions, stats.factorizations, len(report.eigenvalues))
    if overflow:
        raise MaxDepthExceeded(report, overflow[0])
    return report


def stats_dict(stats: SearchStats) -> dict:
    return asdict(stats)
