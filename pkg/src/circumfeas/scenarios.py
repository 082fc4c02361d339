"""Named feasibility instances, wedge lifting and seeded instance generators."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .geometry import DEFAULT_TOL, Tolerance, as_vec
from .sets import ConeV, ConvexSet, HalfSpace, Polyhedron, Ray, set_from_dict

SCENARIO_DIR_ENV = "CIRCUMFEAS_SCENARIO_DIR"


@dataclass(frozen=True)
class Expectation:
    finite: bool
    max_steps: int | None = None

    def to_dict(self) -> dict:
        return {"finite": self.finite, "max_steps": self.max_steps}


@dataclass(eq=False)
class Scenario:
    name: str
    set_a: ConvexSet
    set_b: ConvexSet
    initial_points: list[np.ndarray]
    tol: Tolerance = DEFAULT_TOL
    max_iters: int = 10_000
    expected: Expectation | None = None
    seed: int | None = field(default=None)

    def __post_init__(self):
        if self.set_a.dim != self.set_b.dim:
            raise DimensionMismatch(f"{self.name}: sets in R^{self.set_a.dim} and R^{self.set_b.dim}")
        self.initial_points = [as_vec(p, self.set_a.dim) for p in self.initial_points]
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    @property
    def dim(self) -> int:
        return self.set_a.dim

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "dim": self.dim,
            "set_a": self.set_a.to_dict(),
            "set_b": self.set_b.to_dict(),
            "initial_points": [p.tolist() for p in self.initial_points],
            "tol": self.tol.to_dict(),
            "max_iters": self.max_iters,
        }
        if self.expected is not None:
            d["expected"] = self.expected.to_dict()
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        exp = d.get("expected")
        scn = cls(
            name=d["name"],
            set_a=set_from_dict(d["set_a"]),
            set_b=set_from_dict(d["set_b"]),
            initial_points=d["initial_points"],
            tol=Tolerance.from_dict(d["tol"]) if "tol" in d else DEFAULT_TOL,
            max_iters=int(d.get("max_iters", 10_000)),
            expected=None if exp is None else Expectation(bool(exp["finite"]), exp.get("max_steps")),
            seed=d.get("seed"),
        )
        if "dim" in d and int(d["dim"]) != scn.dim:
            raise DimensionMismatch(f"{scn.name}: declared dim {d['dim']} but sets live in R^{scn.dim}")
        return scn

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


def make_wedge_direct_sum(poly2d: Polyhedron, subspace_dim: int, ambient_dim: int) -> Polyhedron:
    """Embed a planar polyhedron as A0 + span{e3, ..., e_n} in R^ambient_dim."""
    if poly2d.dim != 2:
        raise DimensionMismatch("the base polyhedron must be planar")
    if ambient_dim < 3 or subspace_dim != ambient_dim - 2:
        raise DimensionMismatch(f"need ambient_dim >= 3 and subspace_dim = ambient_dim - 2, "
                                f"got {subspace_dim}, {ambient_dim}")
    pad = np.zeros(subspace_dim)
    return Polyhedron(tuple(HalfSpace(np.concatenate([h.a, pad]), h.b) for h in poly2d.halfspaces))


def lift_scenario(scn: Scenario, ambient_dim: int, seed: int = 0) -> Scenario:
    """Lift a planar polyhedral scenario to a wedge pair in R^ambient_dim.

    Starting points keep their planar part and get seeded coordinates in the
    added block.
    """
    if not isinstance(scn.set_a, Polyhedron) or not isinstance(scn.set_b, Polyhedron):
        raise TypeError("only polyhedral scenarios can be lifted")
    m = ambient_dim - 2
    rng = np.random.default_rng([seed, ambient_dim])
    pts = [np.concatenate([p, rng.normal(size=m)]) for p in scn.initial_points]
    return Scenario(
        name=f"{scn.name}@R{ambient_dim}",
        set_a=make_wedge_direct_sum(scn.set_a, m, ambient_dim),
        set_b=make_wedge_direct_sum(scn.set_b, m, ambient_dim),
        initial_points=pts,
        tol=scn.tol,
        max_iters=scn.max_iters,
        expected=scn.expected,
        seed=scn.seed,
    )


COUNTEREXAMPLE_A = ((3, 0, 3), (0, 1, 3), (0, -1, 3), (-3, 0, -2))
COUNTEREXAMPLE_B = ((1, 3, 0), (1, -3, 0), (-3, 0, -1))
# The iterates from this instance shrink geometrically towards the origin
# (about 1e-39 after 100 steps), so a meaningful membership test needs an
# absolute tolerance far below that scale.
COUNTEREXAMPLE_TOL = Tolerance(eps_feas=1e-60, eps_degen=1e-62)


def example_counterexample(x1: float = 1.0, x2: float = 0.5) -> Scenario:
    """Two proper cones in R^3 with starts from which CRM never lands in A n B."""
    if not 0 < abs(x2) < x1:
        raise ValueError("starts need 0 < |x2| < x1")
    return Scenario(
        name="counterexample",
        set_a=ConeV(COUNTEREXAMPLE_A),
        set_b=ConeV(COUNTEREXAMPLE_B),
        initial_points=[np.array([x1, x2, 0.0])],
        tol=COUNTEREXAMPLE_TOL,
        max_iters=100,
        expected=Expectation(finite=False),
    )


def counterexample_ct_closed_form(x1: float, x2: float) -> np.ndarray:
    d = 4 * x2**2 + x1**2
    return np.array([2 * x1 * x2**2 / d, -x2 * x1**2 / d, 0.0])


def _unit2(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def _r2_cone(rng: np.random.Generator, start: float) -> ConeV | Ray:
    kind = rng.random()
    if kind < 0.1:
        return Ray(_unit2(start))
    if kind < 0.2:
        # half-plane
        return ConeV([_unit2(start), _unit2(start + math.pi / 2), _unit2(start + math.pi)])
    width = rng.uniform(0.02, math.pi - 0.02)
    return ConeV([_unit2(start), _unit2(start + width)])


def random_cone_pair_r2(seed: int, starts: int = 10) -> Scenario:
    """Two closed convex cones in the plane (rays, wedges, half-planes)."""
    rng = np.random.default_rng(seed)
    ta = rng.uniform(0, 2 * math.pi)
    a = _r2_cone(rng, ta)
    # half the pairs overlap beyond the origin, half are placed freely
    tb = ta + rng.uniform(-0.5, 1.0) if rng.random() < 0.5 else rng.uniform(0, 2 * math.pi)
    b = _r2_cone(rng, tb)
    pts = [rng.normal(size=2) * rng.uniform(0.1, 10.0) for _ in range(starts)]
    return Scenario(f"random_cone_pair_r2:{seed}", a, b, pts, DEFAULT_TOL, 10_000,
                    Expectation(True, 3), seed)


def _random_polyhedron(rng: np.random.Generator, anchor: np.ndarray) -> Polyhedron:
    hs = []
    for _ in range(int(rng.integers(1, 5))):
        a = _unit2(rng.uniform(0, 2 * math.pi))
        slack = 0.0 if rng.random() < 0.4 else rng.uniform(0.0, 1.5)
        hs.append(HalfSpace(a, float(a @ anchor) + slack))
    return Polyhedron(tuple(hs))


def random_polyhedra_r2(seed: int, starts: int = 4) -> Scenario:
    """Two planar polyhedra sharing a feasible point (often on both boundaries)."""
    rng = np.random.default_rng(seed)
    anchor = rng.normal(size=2)
    a = _random_polyhedron(rng, anchor)
    b = _random_polyhedron(rng, anchor)
    pts = [anchor + rng.normal(size=2) * rng.uniform(0.5, 5.0) for _ in range(starts)]
    return Scenario(f"random_polyhedra_r2:{seed}", a, b, pts, DEFAULT_TOL, 10_000,
                    Expectation(True), seed)


def _tangent_basis(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[int(np.argmin(np.abs(w)))]
    e1 = np.cross(w, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(w, e1)


def _random_proper_cone(rng: np.random.Generator, w: np.ndarray) -> ConeV:
    e1, e2 = _tangent_basis(w)
    k = int(rng.integers(3, 7))
    while True:
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=k))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
        if gaps.max() < 0.9 * math.pi:
            break
    gens = []
    for t in angles:
        g = w + rng.uniform(0.3, 1.5) * (math.cos(t) * e1 + math.sin(t) * e2)
        gens.append(g / np.linalg.norm(g))
    return ConeV(gens)


def random_proper_cone_pair_r3(seed: int, starts: int = 10) -> Scenario:
    """Two proper polyhedral cones in R^3 around a shared interior ray.

    Generators sit strictly inside the open half-space {<w, .> > 0} and wind
    around w with gaps below pi, so each cone is pointed, solid and contains
    w in its interior.
    """
    rng = np.random.default_rng(seed)
    w = rng.normal(size=3)
    w /= np.linalg.norm(w)
    a = _random_proper_cone(rng, w)
    b = _random_proper_cone(rng, w)
    pts = [rng.normal(size=3) * rng.uniform(0.1, 10.0) for _ in range(starts)]
    return Scenario(f"random_proper_cone_pair_r3:{seed}", a, b, pts, DEFAULT_TOL, 10_000, None, seed)


GENERATORS = {
    "random_cone_pair_r2": random_cone_pair_r2,
    "random_polyhedra_r2": random_polyhedra_r2,
    "random_proper_cone_pair_r3": random_proper_cone_pair_r3,
}


def _r2_cones() -> Scenario:
    return Scenario("r2_cones", ConeV([(1, 0), (1, 1)]), ConeV([(0, 1), (1, 1)]),
                    [(3.0, -1.0), (-2.0, 0.5), (0.0, -1.0), (-1.0, -1.0)],
                    expected=Expectation(True, 3))


def _r2_rays() -> Scenario:
    return Scenario("r2_rays", Ray((1, 0)), Ray((0, 1)), [(0.0, -1.0), (2.0, 1.0)],
                    expected=Expectation(True, 3))


def _r2_polyhedra() -> Scenario:
    a = Polyhedron((HalfSpace((1, 1), 1), HalfSpace((-1, 2), 2), HalfSpace((0, -1), 1)))
    b = Polyhedron((HalfSpace((-1, 0), -0.5), HalfSpace((1, -3), 0)))
    return Scenario("r2_polyhedra", a, b, [(4.0, 3.0), (-3.0, -2.0)], expected=Expectation(True))


def _wedge_r4() -> Scenario:
    return lift_scenario(_r2_polyhedra(), 4)


def _r3_cones() -> Scenario:
    a = ConeV(np.eye(3))
    b = ConeV([(1, 1, 0.2), (0.2, 1, 1), (1, 0.2, 1)])
    return Scenario("r3_cones", a, b, [(1.0, -0.2, 0.3), (0.2, 1.0, -0.1), (0.9, 0.8, 1.0)])


REGISTRY = {
    "counterexample": example_counterexample,
    "r2_cones": _r2_cones,
    "r2_rays": _r2_rays,
    "r2_polyhedra": _r2_polyhedra,
    "wedge_r4": _wedge_r4,
    "r3_cones": _r3_cones,
}


def save_scenario(scn: Scenario, path: str | os.PathLike) -> None:
    Path(path).write_text(scn.to_json() + "\n")


def load_scenario(ref: str) -> Scenario:
    """Resolve a JSON path, a registry name, ``generator:seed``, or a file in
    one of the directories listed in ``CIRCUMFEAS_SCENARIO_DIR``."""
    p = Path(ref)
    if p.suffix == ".json" and p.is_file():
        return Scenario.from_json(p.read_text())
    if ref in REGISTRY:
        return REGISTRY[ref]()
    gen, _, seed = ref.partition(":")
    if gen in GENERATORS and seed.lstrip("-").isdigit():
        return GENERATORS[gen](int(seed))
    for d in filter(None, os.environ.get(SCENARIO_DIR_ENV, "").split(os.pathsep)):
        cand = Path(d) / f"{ref}.json"
        if cand.is_file():
            return Scenario.from_json(cand.read_text())
    raise KeyError(f"unknown scenario {ref!r}")


def zone_starts(a: ConeV, b: ConeV, count: int, seed: int, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Starting points in cone(D): points of A' n B' moved by a geodesic
    distance below the zone radius, then rescaled."""
    from .sphere import _cached_polytope, intersect_polytopes, zone_radius

    ap, bp = _cached_polytope(a, tol), _cached_polytope(b, tol)
    inter = intersect_polytopes(ap, bp, tol)
    r = min(zone_radius(ap, bp, tol), math.pi / 2)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(len(inter.vertices))) @ inter.vertices
        u = w / np.linalg.norm(w)
        t = rng.normal(size=3)
        t -= (t @ u) * u
        t /= np.linalg.norm(t)
        delta = rng.uniform(0.0, 0.999) * r
        moved = math.cos(delta) * u + math.sin(delta) * t
        out.append(moved * rng.uniform(0.1, 10.0))
    return out
