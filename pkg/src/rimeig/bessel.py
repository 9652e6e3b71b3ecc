"""Bessel functions of the first kind and the real transmission eigenvalues of a disc.

For the disc of radius 1/2 with index of refraction 16, ``k`` is a
transmission eigenvalue when, for some angular order ``m``,

    m = 0:   J1(k/2) J0(2k) - 4 J0(k/2) J1(2k) = 0
    m >= 1:  J_{m-1}(k/2) J_m(2k) - 4 J_m(k/2) J_{m-1}(2k) = 0

(``2k = sqrt(16) * k/2``). Roots are reported as ``lambda = k^2``, the
eigenvalue of the finite element pencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

M_MAX = 60
X_MAX = 60.0
SERIES_CUTOFF = 5.0


def _series(m: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    term = half ** m / math.factorial(m)
    total = term.copy()
    q = -half * half
    for k in range(1, 60):
        term = term * q / (k * (k + m))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller(m: int, x: np.ndarray) -> np.ndarray:
    # downward recurrence from well above max(m, x), normalised by J0 + 2 sum J_2k = 1
    top = max(m, float(x.max()))
    start = 2 * ((int(top) + 16 + int(math.sqrt(40.0 * top))) // 2)
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    result = np.zeros_like(x)
    for k in range(start, 0, -1):
        j_next, j_cur = j_cur, (2.0 * k / x) * j_cur - j_next
        order = k - 1
        if order == m:
            result = j_cur.copy()
        if order > 0 and order % 2 == 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if big.any():
            scale = np.where(big, 1e-250, 1.0)
            j_cur, j_next, norm, result = j_cur * scale, j_next * scale, norm * scale, result * scale
    return result / (norm + j_cur)


def bessel_j(m: int, x):
    """``J_m(x)`` for integer ``0 <= m <= 60`` and ``0 <= x <= 60``.

    Ascending series for ``x < 5``, normalised Miller recurrence above; the
    absolute error stays below 1e-12 on the whole range. ``x`` may be an array.
    """
    if int(m) != m or not 0 <= m <= M_MAX:
        raise ValueError(f"order m must be an integer in [0, {M_MAX}], got {m}")
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa >= 0.0)) or np.any(xa > X_MAX):
        raise ValueError(f"argument x must lie in [0, {X_MAX}]")
    m = int(m)
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = 1.0 if m == 0 else 0.0
    small = ~zero & (flat < SERIES_CUTOFF)
    if small.any():
        out[small] = _series(m, flat[small])
    large = flat >= SERIES_CUTOFF
    if large.any():
        out[large] = _miller(m, flat[large])
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def disc_te_function(m: int, k):
    """Dispersion function whose positive roots are the order-``m`` disc eigenvalues."""
    if m == 0:
        return bessel_j(1, k / 2) * bessel_j(0, 2 * k) - 4 * bessel_j(0, k / 2) * bessel_j(1, 2 * k)
    return (bessel_j(m - 1, k / 2) * bessel_j(m, 2 * k)
            - 4 * bessel_j(m, k / 2) * bessel_j(m - 1, 2 * k))


@dataclass(frozen=True)
class DetectedRoot:
    k: float
    order_m: int

    @property
    def lam(self) -> float:
        return self.k * self.k


def bisect(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisection on a bracket ``[lo, hi]`` with a sign change, down to ``tol`` or float resolution."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # bracket is down to adjacent floats
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(f, x_max: float, step: float, tol: float = 1e-12, limit: int | None = None) -> list[float]:
    """Roots of ``f`` on ``(0, x_max]``: sign changes on the grid ``step, 2 step, ...``
    refined by bisection. ``f`` must accept arrays.
    """
    count = int(math.floor(x_max / step + 1e-9))
    grid = step * np.arange(1, count + 1)
    vals = np.asarray(f(grid))
    scalar = lambda t: float(f(np.array([t]))[0])
    roots = []
    for i in range(len(grid)):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif i + 1 < len(grid) and vals[i + 1] != 0.0 and (vals[i] > 0) != (vals[i + 1] > 0):
            roots.append(bisect(scalar, float(grid[i]), float(grid[i + 1]), tol))
        if limit is not None and len(roots) >= limit:
            break
    return roots


def disc_te_roots(k_max: float = 6.0, m_max: int = 20, step: float = 1e-3) -> list[DetectedRoot]:
    """All real roots ``0 < k <= k_max`` for orders ``0..m_max``, sorted by ``k``.

    Roots of order ``m >= 1`` are listed twice, once for each of the angular
    modes ``cos(m theta)`` and ``sin(m theta)`` (orders ``+m`` and ``-m`` share
    the dispersion relation), so the list counts eigenvalues with multiplicity.
    """
    if not k_max > 0 or m_max < 0:
        raise ValueError("need k_max > 0 and m_max >= 0")
    if 2 * k_max > X_MAX or m_max > M_MAX:
        raise ValueError(f"k_max must be <= {X_MAX / 2} and m_max <= {M_MAX}")
    found = []
    for m in range(m_max + 1):
        for k in scan_roots(lambda kk: disc_te_function(m, kk), k_max, step):
            found.extend([DetectedRoot(k, m)] * (1 if m == 0 else 2))
    found.sort(key=lambda r: (r.k, r.order_m))
    return found


def bessel_zero(m: int, index: int = 1, step: float = 1e-3) -> float:
    """The ``index``-th positive zero of ``J_m``."""
    if index < 1:
        raise ValueError("index must be >= 1")
    roots = scan_roots(lambda x: bessel_j(m, x), X_MAX, step, tol=1e-15, limit=index)
    if len(roots) < index:
        raise ValueError(f"J_{m} has only {len(roots)} zeros below {X_MAX}")
    return roots[index - 1]
