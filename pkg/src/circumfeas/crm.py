"""Circumcentered-reflection operator, iteration drivers and baselines."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfiguration, DimensionMismatch, OperatorUndefined
from .geometry import DEFAULT_TOL, Tolerance, _circumcenter, _close, as_vec, norm
from .sets import ConeV, ConvexSet

DEFAULT_MAX_ITERS = 10_000


class Case(str, enum.Enum):
    """Which of x, y = R_A x, z = R_B y coincide."""

    ONE = "One"
    TWO_XY = "TwoXY"
    TWO_YZ = "TwoYZ"
    TWO_XZ = "TwoXZ"
    THREE = "Three"


class Termination(str, enum.Enum):
    FEASIBLE = "Feasible"
    MAX_ITERS = "MaxIters"
    OPERATOR_UNDEFINED = "OperatorUndefined"


@dataclass(frozen=True, eq=False)
class CrmStep:
    """One application of an operator.

    For CRM ``y = R_A x``, ``z = R_B y``. Baselines reuse the record: MAP has
    ``y = P_A x``, ``z = next = P_B y``; DR has the CRM ``y, z`` and
    ``next = (x + z) / 2``. In the product-space driver ``x`` and ``next`` are
    diagonal components while ``y, z`` are the lifted 2n-vectors.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    next: np.ndarray
    cardinality_case: Case | None
    dist_a: float
    dist_b: float

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(), "y": self.y.tolist(), "z": self.z.tolist(),
            "next": self.next.tolist(),
            "cardinality_case": None if self.cardinality_case is None else self.cardinality_case.value,
            "dist_a": self.dist_a, "dist_b": self.dist_b,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CrmStep":
        case = d.get("cardinality_case")
        return cls(np.array(d["x"], float), np.array(d["y"], float), np.array(d["z"], float),
                   np.array(d["next"], float), None if case is None else Case(case),
                   float(d["dist_a"]), float(d["dist_b"]))


@dataclass(eq=False)
class IterationTrace:
    """Ordered steps plus the point the run ended on.

    ``final_point`` is what feasibility is judged on: the last iterate, or
    the shadow P_A x_k for Douglas-Rachford.
    """

    steps: list[CrmStep] = field(default_factory=list)
    terminated: Termination = Termination.MAX_ITERS
    final_point: np.ndarray | None = None
    final_dist_a: float = float("nan")
    final_dist_b: float = float("nan")
    method: str = "crm"

    @property
    def iterations_used(self) -> int:
        return len(self.steps)

    def rows(self) -> list[tuple[np.ndarray, float, float, Case | None]]:
        """``(point, dist_a, dist_b, case)`` for x_0, ..., x_k.

        For Douglas-Rachford the point is the shadow P_A x_k, so its
        ``dist_a`` is zero and ``dist_b`` is the shadow's distance to B.
        """
        out = []
        for s in self.steps:
            if self.method == "dr":
                out.append((0.5 * (s.x + s.y), 0.0, s.dist_b, None))
            else:
                out.append((s.x, s.dist_a, s.dist_b, s.cardinality_case))
        out.append((self.final_point, self.final_dist_a, self.final_dist_b, None))
        return out

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "terminated": self.terminated.value,
            "iterations_used": self.iterations_used,
            "final_point": None if self.final_point is None else self.final_point.tolist(),
            "final_dist_a": self.final_dist_a,
            "final_dist_b": self.final_dist_b,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IterationTrace":
        fp = d.get("final_point")
        return cls(
            steps=[CrmStep.from_dict(s) for s in d["steps"]],
            terminated=Termination(d["terminated"]),
            final_point=None if fp is None else np.array(fp, float),
            final_dist_a=float(d["final_dist_a"]),
            final_dist_b=float(d["final_dist_b"]),
            method=d.get("method", "crm"),
        )


def classify(x: np.ndarray, y: np.ndarray, z: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Case:
    nx, ny, nz = norm(x), norm(y), norm(z)
    xy = _close(x, y, nx, ny, tol)
    yz = _close(y, z, ny, nz, tol)
    xz = _close(x, z, nx, nz, tol)
    if xy and (yz or xz):
        return Case.ONE
    if xy:
        return Case.TWO_XY
    if yz:
        return Case.TWO_YZ
    if xz:
        return Case.TWO_XZ
    return Case.THREE


def _distinct(x, y, z, case: Case) -> list[np.ndarray]:
    if case is Case.ONE:
        return [x]
    if case is Case.TWO_XY:
        return [x, z]
    if case in (Case.TWO_YZ, Case.TWO_XZ):
        return [x, y]
    return [x, y, z]


def _circ_step(x, y, z, tol: Tolerance) -> tuple[np.ndarray, Case]:
    case = classify(x, y, z, tol)
    try:
        nxt = _circumcenter(_distinct(x, y, z, case), tol)
    except DegenerateConfiguration as exc:
        raise OperatorUndefined(f"x, R_A x, R_B R_A x are distinct and collinear: {exc}") from None
    return nxt, case


def crm_operator(a: ConvexSet, b: ConvexSet, x, tol: Tolerance = DEFAULT_TOL) -> CrmStep:
    """Evaluate the circumcentered-reflection operator at ``x``."""
    x = as_vec(x, a.dim)
    pa = a.project(x, tol)
    pb = b.project(x, tol)
    return _crm_from(a, b, x, pa, pb, tol)


def _crm_from(a, b, x, pa, pb, tol):
    y = 2.0 * pa - x
    z = 2.0 * b.project(y, tol) - y
    nxt, case = _circ_step(x, y, z, tol)
    return CrmStep(x, y, z, nxt, case, norm(x - pa), norm(x - pb))


def _finish(trace: IterationTrace, point, da, db, tol: Tolerance) -> IterationTrace:
    trace.final_point = point
    trace.final_dist_a = da
    trace.final_dist_b = db
    if da <= tol.eps_feas and db <= tol.eps_feas:
        trace.terminated = Termination.FEASIBLE
    return trace


def _check(a: ConvexSet, b: ConvexSet, max_iters: int):
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if a.dim != b.dim:
        raise DimensionMismatch(f"sets live in R^{a.dim} and R^{b.dim}")


def run_crm(a: ConvexSet, b: ConvexSet, x0, tol: Tolerance = DEFAULT_TOL,
            max_iters: int = DEFAULT_MAX_ITERS) -> IterationTrace:
    """Iterate the CRM operator until the iterate lies in both sets."""
    _check(a, b, max_iters)
    x = as_vec(x0, a.dim)
    trace = IterationTrace(method="crm")
    for _ in range(max_iters + 1):
        pa = a.project(x, tol)
        pb = b.project(x, tol)
        da, db = norm(x - pa), norm(x - pb)
        if (da <= tol.eps_feas and db <= tol.eps_feas) or len(trace.steps) == max_iters:
            return _finish(trace, x, da, db, tol)
        try:
            step = _crm_from(a, b, x, pa, pb, tol)
        except OperatorUndefined as exc:
            _finish(trace, x, da, db, tol)
            trace.terminated = Termination.OPERATOR_UNDEFINED
            exc.trace = trace
            raise
        trace.steps.append(step)
        x = step.next
    raise AssertionError("unreachable")


def _pair_avg(w: np.ndarray, n: int) -> np.ndarray:
    return 0.5 * (w[:n] + w[n:])


def run_crm_product_space(a: ConvexSet, b: ConvexSet, x0, tol: Tolerance = DEFAULT_TOL,
                          max_iters: int = DEFAULT_MAX_ITERS) -> IterationTrace:
    """CRM on the lifted pair X = {(x, x)}, Y = A x B in R^(2n).

    Each step reflects through Y first and then through the subspace X,
    starting on X, which is the ordering under which the lifted operator is
    always defined. Reported iterates are the diagonal components.
    """
    _check(a, b, max_iters)
    n = a.dim
    x = as_vec(x0, n)
    w = np.concatenate([x, x])
    trace = IterationTrace(method="crm_product")
    for _ in range(max_iters + 1):
        comp = _pair_avg(w, n)
        pa = a.project(comp, tol)
        pb = b.project(comp, tol)
        da, db = norm(comp - pa), norm(comp - pb)
        if (da <= tol.eps_feas and db <= tol.eps_feas) or len(trace.steps) == max_iters:
            return _finish(trace, comp, da, db, tol)
        # R_Y then R_X
        py = np.concatenate([a.project(w[:n], tol), b.project(w[n:], tol)])
        y = 2.0 * py - w
        avg = _pair_avg(y, n)
        z = 2.0 * np.concatenate([avg, avg]) - y
        try:
            w_next, case = _circ_step(w, y, z, tol)
        except OperatorUndefined as exc:
            _finish(trace, comp, da, db, tol)
            trace.terminated = Termination.OPERATOR_UNDEFINED
            exc.trace = trace
            raise
        trace.steps.append(CrmStep(comp, y, z, _pair_avg(w_next, n), case, da, db))
        w = w_next
    raise AssertionError("unreachable")


def run_map(a: ConvexSet, b: ConvexSet, x0, tol: Tolerance = DEFAULT_TOL,
            max_iters: int = DEFAULT_MAX_ITERS) -> IterationTrace:
    """Alternating projections x_{k+1} = P_B P_A x_k."""
    _check(a, b, max_iters)
    x = as_vec(x0, a.dim)
    trace = IterationTrace(method="map")
    for _ in range(max_iters + 1):
        pa = a.project(x, tol)
        pb = b.project(x, tol)
        da, db = norm(x - pa), norm(x - pb)
        if (da <= tol.eps_feas and db <= tol.eps_feas) or len(trace.steps) == max_iters:
            return _finish(trace, x, da, db, tol)
        nxt = b.project(pa, tol)
        trace.steps.append(CrmStep(x, pa, nxt, nxt, None, da, db))
        x = nxt
    raise AssertionError("unreachable")


def run_dr(a: ConvexSet, b: ConvexSet, x0, tol: Tolerance = DEFAULT_TOL,
           max_iters: int = DEFAULT_MAX_ITERS) -> IterationTrace:
    """Douglas-Rachford x_{k+1} = (x_k + R_B R_A x_k) / 2, judged on P_A x_k."""
    _check(a, b, max_iters)
    x = as_vec(x0, a.dim)
    trace = IterationTrace(method="dr")
    for _ in range(max_iters + 1):
        pa = a.project(x, tol)
        shadow_b = b.project(pa, tol)
        db = norm(pa - shadow_b)
        if db <= tol.eps_feas or len(trace.steps) == max_iters:
            return _finish(trace, pa, 0.0, db, tol)
        y = 2.0 * pa - x
        z = 2.0 * b.project(y, tol) - y
        trace.steps.append(CrmStep(x, y, z, 0.5 * (x + z), None, norm(x - pa), db))
        x = 0.5 * (x + z)
    raise AssertionError("unreachable")


def in_kernel_ct(a: ConeV, b: ConeV, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether the CRM operator maps ``x`` to the origin."""
    return norm(crm_operator(a, b, x, tol).next) <= tol.eps_feas


RUNNERS = {
    "crm": run_crm,
    "crm_product": run_crm_product_space,
    "map": run_map,
    "dr": run_dr,
}
