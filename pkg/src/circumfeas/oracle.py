"""Brute-force reference computations for the test suite.

Nothing in the library imports this module. Projections are found by
iterative coordinate methods followed by an active-set least-squares polish,
then certified through the variational inequality
``<y - p, x - p> <= 0`` over the extreme points of the set truncated to a box
around ``x``; the inequality is linear in ``y``, so checking extreme points
covers the whole truncated set.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import CertificationFailed
from .sets import ConeV, HalfSpace, LinearSubspace, Polyhedron, Ray
from .sphere import SphericalPolytope

CERT_TOL = 1e-9


def _hildreth(a: np.ndarray, b: np.ndarray, x: np.ndarray, mu: np.ndarray, sweeps: int):
    """Dual coordinate ascent for min |z - x|^2 s.t. a z <= b."""
    sq = np.einsum("ij,ij->i", a, a)
    z = x - mu @ a
    for _ in range(sweeps):
        for i in range(len(b)):
            new = max(0.0, mu[i] + (a[i] @ z - b[i]) / sq[i])
            if new != mu[i]:
                z = z - (new - mu[i]) * a[i]
                mu[i] = new
    return z, mu


def _subsets(idx: np.ndarray, max_size: int):
    for k in range(1, min(len(idx), max_size) + 1):
        yield from (list(c) for c in itertools.combinations(idx.tolist(), k))


def _polish_polyhedron(a, b, x, z, mu):
    """Best exact projection onto the affine set of a subset of the
    constraints that look active at ``z``."""
    scale = 1.0 + np.abs(x).max() + np.abs(b).max() + np.abs(z).max()
    act = np.flatnonzero((mu > 0) | (np.abs(a @ z - b) <= 1e-6 * scale))
    best, best_d = (z, mu), np.inf
    for sub in _subsets(act, x.size):
        rows = a[sub]
        gram = rows @ rows.T
        if np.linalg.matrix_rank(gram, tol=1e-10 * np.abs(gram).max()) < len(sub):
            continue
        lam = np.linalg.solve(gram, rows @ x - b[sub])
        cand = x - lam @ rows
        tol = 1e-12 * (scale + np.abs(cand).max())
        d = float(np.linalg.norm(cand - x))
        if np.all(lam >= -tol) and np.all(a @ cand - b <= tol) and d < best_d:
            m = np.zeros_like(mu)
            m[sub] = np.maximum(lam, 0.0)
            best, best_d = (cand, m), d
    return best


def _cone_cd(g: np.ndarray, x: np.ndarray, lam: np.ndarray, sweeps: int):
    """Cyclic coordinate descent on min |g^T lam - x|^2, lam >= 0."""
    sq = np.einsum("ij,ij->i", g, g)
    r = x - lam @ g
    for _ in range(sweeps):
        for i in range(len(g)):
            new = max(0.0, lam[i] + (g[i] @ r) / sq[i])
            if new != lam[i]:
                r = r - (new - lam[i]) * g[i]
                lam[i] = new
    return lam


def _polish_cone(g, x, lam):
    """Best nonnegative least-squares fit on subsets of the current support."""
    sup = np.flatnonzero(lam > 1e-9 * (1.0 + lam.max(initial=0.0)))
    best, best_d = lam, float(np.linalg.norm(x - lam @ g))
    for sub in _subsets(sup, x.size):
        coef, *_ = np.linalg.lstsq(g[sub].T, x, rcond=None)
        if np.any(coef < 0):
            continue
        d = float(np.linalg.norm(x - coef @ g[sub]))
        if d < best_d:
            best = np.zeros_like(lam)
            best[sub] = coef
            best_d = d
    return best


def _box_vertices(a: np.ndarray, b: np.ndarray, centre: np.ndarray, radius: float) -> np.ndarray:
    """Extreme points of {a z <= b} intersected with the box |z - centre|_inf <= radius."""
    n = centre.size
    eye = np.eye(n)
    rows = np.vstack([a, eye, -eye])
    rhs = np.concatenate([b, centre + radius, -(centre - radius)])
    scale = 1.0 + np.abs(rhs).max()
    out = []
    for sub in itertools.combinations(range(len(rows)), n):
        m = rows[list(sub)]
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        v = np.linalg.solve(m, rhs[list(sub)])
        if np.all(rows @ v - rhs <= 1e-9 * scale):
            out.append(v)
    return np.array(out)


def _certify(samples: np.ndarray, x: np.ndarray, p: np.ndarray) -> None:
    d = x - p
    gap = (samples - p) @ d
    bound = CERT_TOL * (1.0 + np.linalg.norm(d)) * (1.0 + np.abs(samples).max(initial=0.0) + np.linalg.norm(p))
    if gap.size and gap.max() > bound:
        raise CertificationFailed(f"variational inequality violated by {gap.max():.3e}")


def _as_polyhedron(s):
    if isinstance(s, HalfSpace):
        return s.a[None, :], np.array([s.b])
    return s.normals, s.offsets


def oracle_project(s, x, grid: int = 8, refine_rounds: int = 4) -> np.ndarray:
    """Reference projection of ``x`` onto ``s`` for dimension at most 3.

    ``refine_rounds`` alternates ``50 * grid`` coordinate sweeps with an
    active-set polish. ``grid`` also sets how many random conic combinations
    (``grid ** 2``) join the extreme points in the certificate.
    """
    x = np.asarray(x, dtype=float)
    if x.size > 3:
        raise ValueError("the oracle is limited to dimension 3")
    sweeps = 50 * grid
    rng = np.random.default_rng(grid)
    if isinstance(s, (HalfSpace, Polyhedron)):
        a, b = _as_polyhedron(s)
        mu = np.zeros(len(b))
        z = x.copy()
        for _ in range(refine_rounds):
            z, mu = _hildreth(a, b, x, mu, sweeps)
            z, mu = _polish_polyhedron(a, b, x, z, mu)
        if np.any(a @ z - b > CERT_TOL * (1.0 + np.abs(z).max() + np.abs(b).max())):
            raise CertificationFailed("reference point violates a constraint")
        radius = 2.0 * np.linalg.norm(x - z) + 1.0
        verts = _box_vertices(a, b, x, radius)
        if verts.size == 0:
            raise CertificationFailed("truncated polyhedron has no extreme points")
        _certify(verts, x, z)
        return z
    if isinstance(s, LinearSubspace):
        if len(s.basis) == 0:
            return np.zeros_like(x)
        coef, *_ = np.linalg.lstsq(s.basis.T, x, rcond=None)
        p = coef @ s.basis
        span = np.vstack([s.basis, -s.basis]) * (2.0 * np.linalg.norm(x) + 1.0)
        _certify(np.vstack([span, np.zeros_like(x)]) + 0.0, x, p)
        return p
    if isinstance(s, (Ray, ConeV)):
        g = s.direction[None, :] if isinstance(s, Ray) else s.generators
        lam = np.zeros(len(g))
        for _ in range(refine_rounds):
            lam = _cone_cd(g, x, lam, sweeps)
            lam = _polish_cone(g, x, lam)
        if np.any(lam < 0):
            raise CertificationFailed("negative conic coefficient")
        p = lam @ g
        # cone truncated at radius 2|x|: the projection never has larger norm
        radius = 2.0 * np.linalg.norm(x) + 1.0
        unit = g / np.linalg.norm(g, axis=1)[:, None]
        combos = rng.random((grid * grid, len(g))) @ unit
        samples = np.vstack([np.zeros_like(x), radius * unit, radius * combos / max(1.0, len(g))])
        _certify(samples, x, p)
        return p
    raise TypeError(f"unsupported set type {type(s).__name__}")


def _arc_points(p: np.ndarray, q: np.ndarray, level: int) -> np.ndarray:
    omega = math.atan2(np.linalg.norm(np.cross(p, q)), float(p @ q))
    t = np.arange(2**level + 1) / 2**level
    if omega < 1e-15:
        return p[None, :]
    s = math.sin(omega)
    return (np.sin((1 - t) * omega)[:, None] * p + np.sin(t * omega)[:, None] * q) / s


def oracle_geodesic_distance_to_set(poly: SphericalPolytope, x, samples: int = 10_000) -> float:
    """Sampled geodesic distance from unit ``x`` to a spherical polytope.

    Each edge carries ``2**L + 1`` dyadic points with ``2**L >= samples``, so
    a larger ``samples`` refines a superset of points and the result never
    increases. The value is an upper bound on the true distance.
    """
    if samples < 10_000:
        raise ValueError("at least 1e4 samples per edge")
    x = np.asarray(x, dtype=float)
    if np.all(poly.halfsphere_normals @ x <= 1e-12):
        return 0.0
    level = math.ceil(math.log2(samples))
    pts = [poly.vertices]
    for e in poly.edges:
        pts.append(_arc_points(e.p, e.q, level))
    allp = np.vstack(pts)
    return float(np.arccos(np.clip(allp @ x, -1.0, 1.0)).min())
