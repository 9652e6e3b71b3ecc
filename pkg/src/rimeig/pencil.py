"""Matrix pencils ``A x = lambda B x``, built-in test problems and Matrix Market I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp


class PencilError(ValueError):
    """Invalid pencil construction (shape, dimension or non-finite entries)."""


class MatrixMarketError(PencilError):
    """A Matrix Market file could not be parsed."""


@dataclass(frozen=True, eq=False)
class Pencil:
    """A pair of square matrices of equal dimension.

    ``a`` and ``b`` are either dense ``numpy`` arrays or ``scipy.sparse``
    matrices; real input stays real. ``storage_hint`` records which one.
    """

    a: np.ndarray | sp.spmatrix
    b: np.ndarray | sp.spmatrix
    storage_hint: str = field(default="dense")

    def __post_init__(self):
        a, b = self.a, self.b
        if sp.issparse(a) or sp.issparse(b):
            a = sp.csr_matrix(a)
            b = sp.csr_matrix(b)
            hint = "sparse"
            data = (a.data, b.data)
        else:
            a = np.asarray(a)
            b = np.asarray(b)
            hint = "dense"
            data = (a, b)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise PencilError(f"A must be square, got shape {a.shape}")
        if b.shape != a.shape:
            raise PencilError(f"dimension mismatch: A is {a.shape}, B is {b.shape}")
        if a.shape[0] < 1:
            raise PencilError("pencil dimension must be >= 1")
        for arr in data:
            if not np.all(np.isfinite(arr)):
                raise PencilError("pencil entries must be finite")
        if hint == "dense":
            a.setflags(write=False)
            b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "storage_hint", hint)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def is_sparse(self) -> bool:
        return self.storage_hint == "sparse"

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(A, B)`` as dense arrays."""
        if self.is_sparse:
            return self.a.toarray(), self.b.toarray()
        return np.array(self.a), np.array(self.b)


def example3_pencil(size: int = 100, num_ones: int = 20) -> Pencil:
    """Upper bidiagonal A with diagonal (size-1)/100, ..., 0/100 and superdiagonal
    1/100; B diagonal with ``size - num_ones`` zeros followed by ``num_ones`` ones.

    The finite eigenvalues are the last ``num_ones`` diagonal entries of A,
    i.e. ``{0, 0.01, ..., (num_ones-1)/100}``; the rest are infinite.
    """
    if size < 1 or num_ones < 1 or num_ones > size:
        raise PencilError(f"need 1 <= num_ones <= size, got size={size}, num_ones={num_ones}")
    diag = np.arange(size - 1, -1, -1, dtype=float) / 100.0
    a = np.diag(diag) + np.diag(np.full(size - 1, 0.01), 1)
    b = np.diag(np.r_[np.zeros(size - num_ones), np.ones(num_ones)])
    return Pencil(a, b)


def wilkinson_pencil(n: int = 40) -> Pencil:
    """Wilkinson-type symmetric tridiagonal matrix of even order ``n`` with B = I.

    Off-diagonals are -1 and the diagonal is ``|i - (n/2 - 1)|`` for
    ``i = 0..n-1``, i.e. ``n/2-1, ..., 1, 0, 1, ..., n/2``. For n = 40 this is
    19, ..., 1, 0, 1, ..., 20, whose close eigenvalue pairs near the integers
    are the classic hard case for eigenvalue separation.
    """
    if n < 2 or n % 2:
        raise PencilError(f"n must be a positive even integer, got {n}")
    diag = np.abs(np.arange(n) - (n // 2 - 1)).astype(float)
    off = -np.ones(n - 1)
    a = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    return Pencil(a, np.eye(n))


def diagonal_pencil(eigs: Sequence[complex]) -> Pencil:
    """``A = diag(eigs)``, ``B = I``; the spectrum is exactly ``eigs``."""
    eigs = np.asarray(eigs)
    if eigs.ndim != 1 or eigs.size == 0:
        raise PencilError("eigs must be a non-empty 1-D sequence")
    if not np.iscomplexobj(eigs):
        eigs = eigs.astype(float)
    return Pencil(np.diag(eigs), np.eye(eigs.size))


def _read_mtx(path: str | os.PathLike):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    try:
        m = scipy.io.mmread(path)
    except Exception as exc:  # mmread raises a zoo of types on bad input
        raise MatrixMarketError(f"{path}: {exc}") from exc
    if sp.issparse(m):
        return m.tocsr()
    return np.asarray(m)


def load_matrix_market(path_a: str | os.PathLike, path_b: str | os.PathLike) -> Pencil:
    """Read a pencil from two Matrix Market files (coordinate or array format).

    Coordinate files load as sparse matrices, array files as dense ones.
    """
    a = _read_mtx(path_a)
    b = _read_mtx(path_b)
    if a.shape != b.shape:
        raise PencilError(f"dimension mismatch: {path_a} is {a.shape}, {path_b} is {b.shape}")
    if sp.issparse(a) != sp.issparse(b):
        a, b = sp.csr_matrix(a), sp.csr_matrix(b)
    return Pencil(a, b)


def save_matrix_market(pencil: Pencil, path_a: str | os.PathLike, path_b: str | os.PathLike) -> None:
    """Write A and B in full precision; sparse pencils use coordinate format."""
    for mat, path in ((pencil.a, path_a), (pencil.b, path_b)):
        if sp.issparse(mat):
            mat = sp.coo_matrix(mat)
        scipy.io.mmwrite(path, mat, precision=17)
