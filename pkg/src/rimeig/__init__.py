"""Recursive integral method for eigenvalues of matrix pencils in a region of the complex plane."""

from .linsolve import ShiftedFactorization, SingularShift, factor, solve
from .pencil import (MatrixMarketError, Pencil, PencilError, diagonal_pencil, example3_pencil,
                     load_matrix_market, save_matrix_market, wilkinson_pencil)
from .projector import IndicatorResult, QuadratureNode, Rectangle, edge_quadrature, indicator, project
from .search import (EigenReport, MaxDepthExceeded, RegionNode, RegionSolveError, SearchConfig,
                     cluster_boxes, rim, size, subdivide)

__version__ = "0.1.0"
