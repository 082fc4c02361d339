"""Geometry on the unit sphere S^2 induced by proper polyhedral cones in R^3.

Spherical projection and reflection come from the cone operators: the
projection is the normalized Euclidean projection, the reflection is the
Euclidean reflection (cone reflections preserve norms). The sphere-centered
reflection operator replaces the circumcenter by the point of S^2 that is
geodesically equidistant to x, y, z and nearest to x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .crm import Case, CrmStep, IterationTrace, Termination, classify, in_kernel_ct
from .errors import (
    AntipodalPair,
    CommonGreatCircle,
    DimensionMismatch,
    EmptyIntersection,
    InPolarCone,
    NotProper,
    OperatorUndefined,
)
from .geometry import DEFAULT_TOL, ROUNDOFF, Tolerance, as_vec, norm
from .sets import ConeV, in_polar_cone


def cross3(x, y) -> np.ndarray:
    """Cross product of two 3-vectors (np.cross is slow for single pairs)."""
    x0, x1, x2 = float(x[0]), float(x[1]), float(x[2])
    y0, y1, y2 = float(y[0]), float(y[1]), float(y[2])
    return np.array([x1 * y2 - x2 * y1, x2 * y0 - x0 * y2, x0 * y1 - x1 * y0])


def normalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = norm(x)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return x / n


def as_unit(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    u = as_vec(x, 3)
    if abs(norm(u) - 1.0) > max(tol.eps_degen, 1e-12):
        raise ValueError(f"not a unit vector: |x| = {norm(u)!r}")
    return u


def geodesic_distance(x, y) -> float:
    """Arc length between unit vectors.

    Evaluated as atan2(|x cross y|, <x, y>), which equals arccos<x, y> on S^2
    but keeps full precision for nearly equal or nearly antipodal points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = max(-1.0, min(1.0, float(np.dot(x, y))))
    return math.atan2(norm(cross3(x, y)), c)


def slerp(p: np.ndarray, q: np.ndarray, t) -> np.ndarray:
    """Points along the shorter arc from p to q at fractions ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega = geodesic_distance(p, q)
    if omega == 0.0:
        return np.repeat(p[None, :], t.size, axis=0)
    s = math.sin(omega)
    return (np.sin((1 - t) * omega)[:, None] * p + np.sin(t * omega)[:, None] * q) / s


@dataclass(frozen=True, eq=False)
class GreatArc:
    """Shorter great-circle arc between two non-antipodal unit vectors."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if norm(cross3(self.p, self.q)) == 0.0 and float(np.dot(self.p, self.q)) < 0:
            raise AntipodalPair("arc endpoints are antipodal")

    @property
    def plane_normal(self) -> np.ndarray:
        c = cross3(self.p, self.q)
        n = norm(c)
        return c / n if n > 0 else c

    @property
    def length(self) -> float:
        return geodesic_distance(self.p, self.q)

    def distance(self, x: np.ndarray) -> float:
        """Geodesic distance from ``x`` to the arc."""
        n = self.plane_normal
        endpoint = min(geodesic_distance(x, self.p), geodesic_distance(x, self.q))
        if not n.any():
            return endpoint
        h = float(np.dot(x, n))
        foot = x - h * n
        fn = norm(foot)
        if fn == 0.0:
            return endpoint
        f = foot / fn
        # foot lies on the arc iff it is between p and q in the plane's orientation
        if np.dot(cross3(self.p, f), n) >= 0 and np.dot(cross3(f, self.q), n) >= 0:
            return math.atan2(abs(h), fn)
        return endpoint

    def sample(self, count: int) -> np.ndarray:
        return slerp(self.p, self.q, np.linspace(0.0, 1.0, count))


@dataclass(frozen=True, eq=False)
class SphericalPolytope:
    """``{u in S^2 : <a_i, u> <= 0 for all i}`` with its vertices and edges."""

    halfsphere_normals: np.ndarray
    vertices: np.ndarray
    edges: tuple

    def contains(self, u: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(np.all(self.halfsphere_normals @ u <= _geo_eps(tol)))

    def distance(self, u, tol: Tolerance = DEFAULT_TOL) -> float:
        """Geodesic distance from a unit vector to the polytope.

        Exact as long as the polytope lies in an open hemisphere: outside
        points are nearest to the boundary, which is the union of the edges
        (or the vertices, for a degenerate polytope).
        """
        u = np.asarray(u, dtype=float)
        if self.contains(u, tol):
            return 0.0
        cands = [e.distance(u) for e in self.edges]
        cands += [geodesic_distance(u, v) for v in self.vertices]
        return min(cands) if cands else math.inf


def _geo_eps(tol: Tolerance) -> float:
    # unit-scale data: never test finer than rounding
    return max(tol.eps_feas, ROUNDOFF)


def _polytope_from_normals(normals: np.ndarray, tol: Tolerance) -> SphericalPolytope:
    normals = np.array([normalize(a) for a in normals])
    eps = _geo_eps(tol)
    verts: list[np.ndarray] = []
    for i, j in combinations(range(len(normals)), 2):
        c = cross3(normals[i], normals[j])
        if norm(c) <= eps:
            continue
        c = c / norm(c)
        for u in (c, -c):
            if np.all(normals @ u <= eps) and not any(norm(u - v) <= 1e3 * eps for v in verts):
                verts.append(u)
    edges: list[GreatArc] = []
    seen: set[tuple[int, int]] = set()
    for a in normals:
        on = [k for k, v in enumerate(verts) if abs(float(np.dot(a, v))) <= eps]
        if len(on) < 2:
            continue
        # the two vertices farthest apart on this boundary circle span the edge
        pair = max(combinations(on, 2), key=lambda ij: geodesic_distance(verts[ij[0]], verts[ij[1]]))
        if pair not in seen:
            seen.add(pair)
            edges.append(GreatArc(verts[pair[0]], verts[pair[1]]))
    vert_arr = np.array(verts).reshape(len(verts), 3)
    return SphericalPolytope(normals, vert_arr, tuple(edges))


def build_spherical_polytope(cone: ConeV, tol: Tolerance = DEFAULT_TOL) -> SphericalPolytope:
    """H-representation, vertices and edges of ``cone`` intersected with S^2."""
    if cone.dim != 3:
        raise DimensionMismatch("spherical polytopes need a cone in R^3")
    g = np.array([normalize(v) for v in cone.generators])
    if np.linalg.matrix_rank(g, tol=1e-9) < 3:
        raise NotProper("cone is not solid (generators do not span R^3)")
    eps = _geo_eps(tol)
    inward: list[np.ndarray] = []
    for i, j in combinations(range(len(g)), 2):
        c = cross3(g[i], g[j])
        if norm(c) <= eps:
            continue
        c = c / norm(c)
        s = g @ c
        for n in ((c,) if np.all(s >= -eps) else ()) + ((-c,) if np.all(s <= eps) else ()):
            if not any(norm(n - m) <= 1e-9 for m in inward):
                inward.append(n)
    if not inward or np.linalg.matrix_rank(np.array(inward), tol=1e-9) < 3:
        raise NotProper("cone is not pointed (facet normals do not span R^3)")
    return _polytope_from_normals(-np.array(inward), tol)


@lru_cache(maxsize=256)
def _cached_polytope(cone: ConeV, tol: Tolerance) -> SphericalPolytope:
    return build_spherical_polytope(cone, tol)


def intersect_polytopes(ap: SphericalPolytope, bp: SphericalPolytope,
                        tol: Tolerance = DEFAULT_TOL) -> SphericalPolytope:
    inter = _polytope_from_normals(np.vstack([ap.halfsphere_normals, bp.halfsphere_normals]), tol)
    if len(inter.vertices) == 0:
        raise EmptyIntersection("the two spherical polytopes do not meet")
    return inter


@lru_cache(maxsize=256)
def _zone_data(a: ConeV, b: ConeV, tol: Tolerance) -> tuple[SphericalPolytope, float]:
    ap, bp = _cached_polytope(a, tol), _cached_polytope(b, tol)
    return intersect_polytopes(ap, bp, tol), zone_radius(ap, bp, tol)


def spherical_project(cone: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Nearest point of the cone's spherical trace to the unit vector ``x``."""
    x = as_unit(x, tol)
    if in_polar_cone(cone, x, tol):
        raise InPolarCone("x lies in the polar cone; its projection is the apex")
    return normalize(cone.project(x, tol))


def spherical_reflect(cone: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    x = as_unit(x, tol)
    if in_polar_cone(cone, x, tol):
        raise InPolarCone("x lies in the polar cone; the spherical reflection is undefined")
    return 2.0 * cone.project(x, tol) - x


def sphere_center(x, y, z, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Point of S^2 geodesically equidistant to x, y, z and nearest to x.

    Coincident inputs are merged: two distinct points give their geodesic
    midpoint and one point is returned unchanged.
    """
    x, y, z = (as_unit(v, tol) for v in (x, y, z))
    return _sphere_center(x, y, z, classify(x, y, z, tol), tol)


def _sphere_center(x, y, z, case: Case, tol: Tolerance) -> np.ndarray:
    if case is Case.ONE:
        return x.copy()
    if case is not Case.THREE:
        u, v = (x, z) if case is Case.TWO_XY else (x, y)
        s = u + v
        if norm(s) <= tol.eps_degen:
            raise AntipodalPair("the two distinct points are antipodal")
        return s / norm(s)
    if abs(float(np.linalg.det(np.array([x, y, z])))) <= tol.eps_degen:
        raise CommonGreatCircle("x, y, z lie on one great circle")
    n = normalize(cross3(x - y, y - z))
    return n if float(np.dot(n, x)) >= 0.0 else -n


def srm_step(a: ConeV, b: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> CrmStep:
    x = as_unit(x, tol)
    if in_kernel_ct(a, b, x, tol):
        raise OperatorUndefined("x lies in the kernel of the CRM operator")
    y = spherical_reflect(a, x, tol)
    z = spherical_reflect(b, normalize(y), tol)
    case = classify(x, y, z, tol)
    nxt = _sphere_center(x, y, z, case, tol)
    return CrmStep(x, y, z, nxt, case, _sphere_dist(a, x, tol), _sphere_dist(b, x, tol))


def _sphere_dist(cone: ConeV, x: np.ndarray, tol: Tolerance) -> float:
    if in_polar_cone(cone, x, tol):
        return math.pi / 2  # lower bound; the spherical projection is undefined here
    return geodesic_distance(x, normalize(cone.project(x, tol)))


def srm_operator(a: ConeV, b: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The sphere-centered reflection operator."""
    return srm_step(a, b, x, tol).next


def run_srm(a: ConeV, b: ConeV, x0, tol: Tolerance = DEFAULT_TOL, max_iters: int = 10_000) -> IterationTrace:
    """Iterate the sphere-centered reflection operator from ``x0 / |x0|``."""
    if a.dim != 3 or b.dim != 3:
        raise DimensionMismatch("the sphere-centered method works in R^3")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    x = normalize(as_vec(x0, 3))
    trace = IterationTrace(method="srm")
    while True:
        da, db = norm(x - a.project(x, tol)), norm(x - b.project(x, tol))
        if (da <= tol.eps_feas and db <= tol.eps_feas) or len(trace.steps) == max_iters:
            trace.final_point, trace.final_dist_a, trace.final_dist_b = x, da, db
            if da <= tol.eps_feas and db <= tol.eps_feas:
                trace.terminated = Termination.FEASIBLE
            return trace
        step = srm_step(a, b, x, tol)
        trace.steps.append(step)
        x = step.next


def zone_radius(ap: SphericalPolytope, bp: SphericalPolytope, tol: Tolerance = DEFAULT_TOL) -> float:
    """Radius of the finite-convergence zone around the intersection.

    For each vertex of the intersection, the smallest geodesic distance to an
    edge of either polytope that does not pass through it; the minimum over
    vertices.
    """
    inter = intersect_polytopes(ap, bp, tol)
    arcs = ap.edges + bp.edges
    active_eps = 1e3 * _geo_eps(tol)
    r = math.inf
    for v in inter.vertices:
        d = [arc.distance(v) for arc in arcs]
        inactive = [x for x in d if x > active_eps]
        if inactive:
            r = min(r, min(inactive))
    return r


def in_zone(a: ConeV, b: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``x`` is in Ker C_T or in the cone over the zone around A' n B'."""
    x = as_vec(x, 3)
    if norm(x) <= tol.eps_feas:
        return True
    if in_kernel_ct(a, b, x, tol):
        return True
    inter, r = _zone_data(a, b, tol)
    return inter.distance(normalize(x), tol) <= r
