"""Closed convex sets with exact projections.

Polyhedra (H-representation) and finitely generated cones (V-representation)
are projected by enumerating candidate active faces: every linearly
independent subset of constraints/generators induces an affine set or a
linear span, the projection onto it is a candidate, and the candidate that
passes the KKT certificate (feasible, nonnegative multipliers) is the answer.
Per-face matrices are built once per set and evaluated in a single batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleSet,
    NumericalFailure,
    PointNotInSet,
    RankDeficient,
)
from .geometry import DEFAULT_TOL, ROUNDOFF, Tolerance, as_vec, gram_factor, norm, solve_gram


def _independent_subsets(rows: np.ndarray, max_size: int, tol: Tolerance):
    """Yield ``(subset, inverse_gram)`` for every independent row subset."""
    yield (), np.zeros((0, 0))
    k = len(rows)
    for size in range(1, min(k, max_size) + 1):
        eye = np.eye(size)
        for sub in combinations(range(k), size):
            try:
                lu, d = gram_factor(rows[list(sub)], tol)
            except RankDeficient:
                continue
            inv = np.column_stack([lu.solve(eye[:, j] / d[j]) for j in range(size)]) / d[:, None]
            yield sub, inv


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The set ``{x : <a, x> <= b}``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = as_vec(self.a)
        if norm(a) == 0.0:
            raise ValueError("half-space normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return self.a.size

    def project(self, x: np.ndarray, tol: Tolerance) -> np.ndarray:
        viol = float(np.dot(self.a, x)) - self.b
        if viol <= 0.0:
            return x.copy()
        return x - viol / float(np.dot(self.a, self.a)) * self.a

    def to_dict(self) -> dict:
        return {"kind": "halfspace", "data": {"a": self.a.tolist(), "b": self.b}}


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Finite intersection of half-spaces."""

    halfspaces: tuple

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValueError("a polyhedron needs at least one half-space")
        if len({h.dim for h in hs}) != 1:
            raise DimensionMismatch("half-spaces of mixed dimension")
        object.__setattr__(self, "halfspaces", hs)

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    @cached_property
    def normals(self) -> np.ndarray:
        return np.array([h.a for h in self.halfspaces])

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.array([h.b for h in self.halfspaces])

    @cached_property
    def _faces(self):
        a = self.normals
        m, n = a.shape
        anorm = np.sqrt(np.einsum("ij,ij->i", a, a))
        q_list, l_list = [], []
        for sub, inv in _independent_subsets(a, n, DEFAULT_TOL):
            lam = np.zeros((m, m))
            q = np.zeros((n, m))
            if sub:
                idx = list(sub)
                lam[np.ix_(idx, idx)] = inv
                q[:, idx] = a[idx].T @ inv
            q_list.append(q)
            l_list.append(lam)
        q = np.array(q_list)
        # with r = A x - b: candidate = x - q r, its scaled constraint
        # residuals are feas_map r, its scaled multipliers are lam_map r
        feas_map = (np.eye(m)[None] - np.einsum("im,fmj->fij", a, q)) / anorm[None, :, None]
        lam_map = np.array(l_list) * anorm[None, :, None]
        return q, feas_map, lam_map, float(np.max(np.abs(self.offsets) / anorm))

    def project(self, x: np.ndarray, tol: Tolerance) -> np.ndarray:
        q, feas_map, lam_map, offset_scale = self._faces
        r = self.normals @ x - self.offsets
        slack = tol.eps_feas + ROUNDOFF * (norm(x) + offset_scale)
        feas = (feas_map @ r).max(axis=1) <= slack
        if not feas.any():
            raise InfeasibleSet("polyhedron is empty (no face candidate is feasible)")
        hits = np.flatnonzero(feas & ((lam_map @ r).min(axis=1) >= -slack))
        if hits.size == 0:
            raise NumericalFailure("no projection candidate passed the KKT certificate")
        cand = x - q[hits] @ r
        resid = cand - x
        return cand[int(np.argmin(np.einsum("ij,ij->i", resid, resid)))]

    def to_dict(self) -> dict:
        return {"kind": "polyhedron",
                "data": {"halfspaces": [h.to_dict()["data"] for h in self.halfspaces]}}


@dataclass(frozen=True, eq=False)
class ConeV:
    """Conic hull of finitely many nonzero generators."""

    generators: np.ndarray

    def __post_init__(self):
        g = np.array([as_vec(v) for v in self.generators])
        if g.ndim != 2 or len(g) == 0:
            raise ValueError("a cone needs at least one generator")
        if np.any(np.sqrt(np.einsum("ij,ij->i", g, g)) == 0.0):
            raise ValueError("zero generator")
        object.__setattr__(self, "generators", g)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @cached_property
    def _faces(self):
        g = self.generators
        k, n = g.shape
        gnorm = np.sqrt(np.einsum("ij,ij->i", g, g))
        gn = g / gnorm[:, None]
        c_list = []
        for sub, inv in _independent_subsets(g, n, DEFAULT_TOL):
            c = np.zeros((k, n))
            if sub:
                idx = list(sub)
                c[idx] = inv @ g[idx]
            c_list.append(c)
        coef = np.array(c_list)
        # per face: scaled coefficients, candidate map, and polar-test map
        scaled = coef * gnorm[None, :, None]
        cand_map = np.einsum("fkn,km->fmn", coef, g)
        # a spanning face reproduces x exactly; drop its rounding noise
        full = np.array([int(np.count_nonzero(np.abs(c).sum(axis=1))) == n for c in c_list])
        cand_map[full] = np.eye(n)
        polar_map = gn[None, :, :] - np.einsum("jm,fmn->fjn", gn, cand_map)
        return scaled, cand_map, polar_map

    def project(self, x: np.ndarray, tol: Tolerance) -> np.ndarray:
        scaled, cand_map, polar_map = self._faces
        # every test is homogeneous in x, so the slack scales with it
        slack = (tol.eps_feas + ROUNDOFF) * norm(x)
        kkt = ((scaled @ x).min(axis=1) >= -slack) & ((polar_map @ x).max(axis=1) <= slack)
        hits = np.flatnonzero(kkt)
        if hits.size == 0:
            raise NumericalFailure("no projection candidate passed the KKT certificate")
        if hits.size == 1:
            return cand_map[hits[0]] @ x
        cand = cand_map[hits] @ x
        resid = cand - x
        return cand[int(np.argmin(np.einsum("ij,ij->i", resid, resid)))]

    def to_dict(self) -> dict:
        return {"kind": "cone", "data": {"generators": self.generators.tolist()}}


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """Span of ``basis``; an empty basis is the zero subspace of R^dim."""

    basis: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        rows = [as_vec(v) for v in self.basis]
        dim = rows[0].size if rows else int(self.dim)
        if dim < 1:
            raise ValueError("dimension required for an empty basis")
        if rows and any(r.size != dim for r in rows):
            raise DimensionMismatch("basis vectors of mixed dimension")
        b = np.array(rows).reshape(len(rows), dim)
        if len(b):
            gram_factor(b, DEFAULT_TOL)  # raises RankDeficient on dependence
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "dim", dim)

    def project(self, x: np.ndarray, tol: Tolerance) -> np.ndarray:
        if len(self.basis) == 0:
            return np.zeros_like(x)
        t = solve_gram(self.basis, self.basis @ x, tol)
        return t @ self.basis

    def to_dict(self) -> dict:
        return {"kind": "subspace", "data": {"basis": self.basis.tolist(), "dim": self.dim}}


@dataclass(frozen=True, eq=False)
class Ray:
    """The ray ``{t d : t >= 0}``."""

    direction: np.ndarray

    def __post_init__(self):
        d = as_vec(self.direction)
        if norm(d) == 0.0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", d)

    @property
    def dim(self) -> int:
        return self.direction.size

    def project(self, x: np.ndarray, tol: Tolerance) -> np.ndarray:
        d = self.direction
        return max(0.0, float(np.dot(x, d)) / float(np.dot(d, d))) * d

    def to_dict(self) -> dict:
        return {"kind": "ray", "data": {"direction": self.direction.tolist()}}


ConvexSet = Union[HalfSpace, Polyhedron, ConeV, LinearSubspace, Ray]


def set_from_dict(d: dict) -> ConvexSet:
    kind, data = d["kind"], d["data"]
    if kind == "halfspace":
        return HalfSpace(data["a"], data["b"])
    if kind == "polyhedron":
        return Polyhedron(tuple(HalfSpace(h["a"], h["b"]) for h in data["halfspaces"]))
    if kind == "cone":
        return ConeV(data["generators"])
    if kind == "subspace":
        return LinearSubspace(data["basis"], data.get("dim", 0))
    if kind == "ray":
        return Ray(data["direction"])
    raise ValueError(f"unknown set kind {kind!r}")


def _checked(s: ConvexSet, x) -> np.ndarray:
    return as_vec(x, s.dim)


def project(s: ConvexSet, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Nearest point of ``s`` to ``x``."""
    return s.project(_checked(s, x), tol)


def reflect(s: ConvexSet, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    x = _checked(s, x)
    return 2.0 * s.project(x, tol) - x


def distance(s: ConvexSet, x, tol: Tolerance = DEFAULT_TOL) -> float:
    x = _checked(s, x)
    return norm(x - s.project(x, tol))


def membership(s: ConvexSet, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return distance(s, x, tol) <= tol.eps_feas


def in_polar_cone(cone: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    x = _checked(cone, x)
    return bool(np.all(cone.generators @ x <= tol.eps_feas))


def local_cone_radius(poly: Polyhedron, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """An admissible radius for local conicity of ``poly`` at ``x``.

    Half the smallest distance from ``x`` to an inactive constraint
    hyperplane; infinity when every constraint is active.
    """
    x = _checked(poly, x)
    if not membership(poly, x, tol):
        raise PointNotInSet("local_cone_radius needs a point of the polyhedron")
    a, b = poly.normals, poly.offsets
    gaps = np.abs(a @ x - b) / np.sqrt(np.einsum("ij,ij->i", a, a))
    inactive = gaps[gaps > tol.eps_feas]
    if inactive.size == 0:
        return math.inf
    return 0.5 * float(np.min(inactive))
