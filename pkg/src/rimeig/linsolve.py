"""Shifted linear solves ``(z B - A) r = f``.

Dense pencils are factored with LAPACK's partially pivoted LU, sparse ones
with SuperLU. Either way the factorization is checked for a vanishing pivot,
which is how a shift that sits on an eigenvalue is detected.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .pencil import Pencil

logger = logging.getLogger(__name__)

_ULP = np.finfo(float).eps


class SingularShift(ArithmeticError):
    """``z B - A`` is numerically singular, i.e. ``z`` is (close to) an eigenvalue."""

    def __init__(self, z: complex, pivot: float, threshold: float):
        super().__init__(f"shift z={z!r} is numerically an eigenvalue "
                         f"(|pivot|={pivot:.3e} <= {threshold:.3e})")
        self.z = z
        self.pivot = pivot
        self.threshold = threshold


@dataclass(frozen=True, eq=False)
class ShiftedFactorization:
    """LU factors of ``z B - A``; read-only after construction."""

    shift: complex
    factors: Any
    dimension: int
    sparse: bool
    matrix: Any = None  # kept only for residual diagnostics

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return solve(self, rhs)


def shifted_matrix(pencil: Pencil, z: complex):
    """Form ``z B - A`` in complex arithmetic (the pencil itself stays real)."""
    z = complex(z)
    if pencil.is_sparse:
        return (z * pencil.b - pencil.a).astype(complex).tocsc()
    return z * np.asarray(pencil.b, dtype=complex) - pencil.a


def _inf_norm(mat) -> float:
    if sp.issparse(mat):
        return float(abs(mat).sum(axis=1).max())
    return float(np.abs(mat).sum(axis=1).max())


def factor(pencil: Pencil, z: complex) -> ShiftedFactorization:
    """Factor ``z B - A`` with pivoting.

    Raises
    ------
    SingularShift
        If some pivot magnitude is at most ``n * ulp * ||z B - A||_inf``.
    """
    z = complex(z)
    n = pencil.n
    mat = shifted_matrix(pencil, z)
    norm = _inf_norm(mat)
    threshold = n * _ULP * norm
    if pencil.is_sparse:
        try:
            lu = spla.splu(mat)
        except RuntimeError:  # SuperLU: "Factor is exactly singular"
            raise SingularShift(z, 0.0, threshold) from None
        pivots = np.abs(lu.U.diagonal())
        factors = lu
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(mat, check_finite=False)
        pivots = np.abs(np.diagonal(lu))
        factors = (lu, piv)
    smallest = float(pivots.min()) if pivots.size else 0.0
    if not smallest > threshold:
        raise SingularShift(z, smallest, threshold)
    keep = mat if logger.isEnabledFor(logging.DEBUG) else None
    return ShiftedFactorization(z, factors, n, pencil.is_sparse, keep)


def solve(fact: ShiftedFactorization, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(z B - A) r = rhs`` for a vector or an ``n x J`` block of columns."""
    rhs = np.asarray(rhs)
    if rhs.shape[0] != fact.dimension or rhs.ndim > 2:
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({fact.dimension},) or "
                         f"({fact.dimension}, J)")
    rhs = rhs.astype(complex, copy=False)
    if fact.sparse:
        out = fact.factors.solve(np.ascontiguousarray(rhs))
    else:
        out = sla.lu_solve(fact.factors, rhs, check_finite=False)
    if fact.matrix is not None:
        res = np.linalg.norm(fact.matrix @ out - rhs)
        scale = np.linalg.norm(rhs)
        logger.debug("solve z=%s relative residual %.3e", fact.shift, res / scale if scale else res)
    return out
