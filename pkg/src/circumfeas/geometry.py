"""Dense vector helpers, a full-pivoting Gram solver and the circumcenter.

Points are plain float64 numpy arrays. Every public entry point runs its
inputs through :func:`as_vec`, which rejects NaN/Inf.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateConfiguration, DimensionMismatch, RankDeficient

# relative size of accumulated rounding in the small dense kernels below;
# tolerance tests never demand more accuracy than this times the data scale
ROUNDOFF = 1e3 * np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    eps_feas: float = 1e-10
    eps_degen: float = 1e-12

    def __post_init__(self):
        if not (self.eps_feas > 0 and self.eps_degen > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.eps_degen > self.eps_feas:
            raise ValueError("eps_degen must not exceed eps_feas")

    def to_dict(self) -> dict:
        return {"eps_feas": self.eps_feas, "eps_degen": self.eps_degen}

    @classmethod
    def from_dict(cls, d: dict) -> "Tolerance":
        return cls(float(d["eps_feas"]), float(d["eps_degen"]))


DEFAULT_TOL = Tolerance()


def as_vec(x, dim: int | None = None) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("vectors must have dimension >= 1")
    if not np.isfinite(v).all():
        raise ValueError(f"non-finite coordinates: {v}")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    return v


def norm(x: np.ndarray) -> float:
    s = float(np.dot(x, x))
    if 1e-300 < s < 1e300:
        return math.sqrt(s)
    m = float(np.max(np.abs(x)))
    if m == 0.0:
        return 0.0
    y = np.asarray(x) / m  # rescaled against under/overflow
    return m * math.sqrt(float(np.dot(y, y)))


def _close(p, q, np_, nq, tol: Tolerance) -> bool:
    return norm(p - q) <= tol.eps_degen * max(1.0, np_) + ROUNDOFF * max(np_, nq)


def coincide(p: np.ndarray, q: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Point-coincidence test used for the cardinality case split.

    Relative to ``max(1, |p|)`` at ``eps_degen``, never finer than rounding.
    """
    return _close(p, q, norm(p), norm(q), tol)


def distinct_points(points: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Greedy deduplication that keeps the first representative of each cluster."""
    kept: list[tuple[np.ndarray, float]] = []
    for p in points:
        n_p = norm(p)
        if not any(_close(q, p, nq, n_p, tol) for q, nq in kept):
            kept.append((p, n_p))
    return [p for p, _ in kept]


class FullPivotLU:
    """Gaussian elimination with complete pivoting for small dense systems.

    Raises RankDeficient when a pivot falls to ``threshold`` times the largest
    entry of the original matrix. Works on Python floats: the systems here are
    at most a few rows, where numpy call overhead dominates.
    """

    def __init__(self, mat, threshold: float):
        a = np.asarray(mat, dtype=float).tolist()
        n = len(a)
        if any(len(row) != n for row in a):
            raise ValueError("square matrix required")
        self.n = n
        rows = list(range(n))
        cols = list(range(n))
        scale = max((abs(v) for row in a for v in row), default=0.0)
        if scale == 0.0:
            raise RankDeficient("zero matrix")
        for k in range(n):
            best, bi, bj = -1.0, k, k
            for i in range(k, n):
                ri = a[i]
                for j in range(k, n):
                    v = abs(ri[j])
                    if v > best:
                        best, bi, bj = v, i, j
            if best <= threshold * scale:
                raise RankDeficient(f"pivot {best:.3e} at step {k} below threshold")
            if bi != k:
                a[k], a[bi] = a[bi], a[k]
                rows[k], rows[bi] = rows[bi], rows[k]
            if bj != k:
                for row in a:
                    row[k], row[bj] = row[bj], row[k]
                cols[k], cols[bj] = cols[bj], cols[k]
            piv = a[k][k]
            rk = a[k]
            for i in range(k + 1, n):
                ri = a[i]
                f = ri[k] / piv
                ri[k] = f
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
        self.lu = a
        self.rows = rows
        self.cols = cols

    def solve(self, rhs) -> np.ndarray:
        lu, n = self.lu, self.n
        b = [float(rhs[i]) for i in self.rows]
        for k in range(n):
            bk = b[k]
            for i in range(k + 1, n):
                b[i] -= lu[i][k] * bk
        for k in range(n - 1, -1, -1):
            rk = lu[k]
            s = b[k]
            for j in range(k + 1, n):
                s -= rk[j] * b[j]
            b[k] = s / rk[k]
        out = np.empty(n)
        out[self.cols] = b
        return out


def gram_factor(basis: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Factor the Jacobi-scaled Gram matrix of the rows of ``basis``.

    Returns ``(lu, d)`` with ``d`` the row norms, so that the Gram system
    ``G t = r`` is solved by ``lu.solve(r / d) / d``. Scaling makes the rank
    test measure angles between basis vectors rather than their lengths.
    """
    b = np.atleast_2d(np.asarray(basis, dtype=float))
    g = b @ b.T
    d = np.sqrt(np.diag(g))
    if not d.all():
        raise RankDeficient("zero basis vector")
    return FullPivotLU(g / np.outer(d, d), tol.eps_degen), d


def solve_gram(basis: Sequence, rhs: Sequence[float], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Coefficients ``t`` with ``sum_i t_i <b_i, b_j> = rhs_j``."""
    b = np.array([as_vec(v) for v in basis])
    r = np.asarray(rhs, dtype=float)
    if len(r) != len(b):
        raise ValueError("rhs length must match the number of basis vectors")
    lu, d = gram_factor(b, tol)
    return lu.solve(r / d) / d


def circumcenter(points: Sequence, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Point of aff(points) equidistant to every distinct input point.

    Coincident inputs are merged first, so one distinct point is returned as
    is and two give their midpoint.
    """
    pts = [as_vec(p) for p in points]
    if not pts:
        raise ValueError("at least one point required")
    if any(p.size != pts[0].size for p in pts):
        raise DimensionMismatch("points of mixed dimension")
    return _circumcenter(distinct_points(pts, tol), tol)


def _circumcenter(uniq: list[np.ndarray], tol: Tolerance) -> np.ndarray:
    if len(uniq) == 1:
        return uniq[0].copy()
    if len(uniq) == 2:
        return 0.5 * (uniq[0] + uniq[1])
    dim = uniq[0].size
    if len(uniq) > dim + 1:
        raise DegenerateConfiguration(f"{len(uniq)} distinct points cannot be affinely independent in R^{dim}")
    p0 = uniq[0]
    v = np.array(uniq[1:]) - p0
    try:
        lu, d = gram_factor(v, tol)
    except RankDeficient as exc:
        raise DegenerateConfiguration(f"distinct points are affinely dependent: {exc}") from None
    t = lu.solve(0.5 * d) / d
    return p0 + t @ v
