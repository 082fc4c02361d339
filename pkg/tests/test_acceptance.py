"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints, then
asserts, so a failing criterion is visible both ways.
"""
import math
import time

import numpy as np
import pytest

from circumfeas.cli import main
from circumfeas.crm import Termination, crm_operator, run_crm, run_crm_product_space
from circumfeas.errors import OperatorUndefined
from circumfeas.geometry import DEFAULT_TOL
from circumfeas.oracle import oracle_geodesic_distance_to_set, oracle_project
from circumfeas.scenarios import (
    COUNTEREXAMPLE_A,
    COUNTEREXAMPLE_B,
    COUNTEREXAMPLE_TOL,
    example_counterexample,
    lift_scenario,
    random_cone_pair_r2,
    random_polyhedra_r2,
    random_proper_cone_pair_r3,
    zone_starts,
)
from circumfeas.sets import ConeV, HalfSpace, LinearSubspace, Polyhedron, Ray, membership, project, reflect
from circumfeas.sphere import (
    build_spherical_polytope,
    geodesic_distance,
    in_polar_cone,
    intersect_polytopes,
    normalize,
    spherical_project,
    spherical_reflect,
    srm_operator,
)

from conftest import record

MAX_ITERS = 10_000


def _run_polyhedra(scenarios, runner):
    """Outcome counts, worst step count among feasible runs, failing runs."""
    counts, worst, bad = {}, 0, []
    for scn in scenarios:
        for i, x in enumerate(scn.initial_points):
            try:
                t = runner(scn.set_a, scn.set_b, x, scn.tol, MAX_ITERS)
                term, used = t.terminated, t.iterations_used
            except OperatorUndefined as exc:
                term, used, t = Termination.OPERATOR_UNDEFINED, exc.trace.iterations_used, exc.trace
            counts[term.value] = counts.get(term.value, 0) + 1
            if term is Termination.FEASIBLE:
                worst = max(worst, used)
            else:
                bad.append((scn.seed, i, term.value))
            yield scn, t
    _run_polyhedra.result = counts, worst, bad


def _summarize(counts, worst):
    total = sum(counts.values())
    parts = ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
    return f"{counts.get('Feasible', 0)}/{total} feasible ({parts}); max steps {worst}"


# --- 1 ------------------------------------------------------------------------

def test_criterion_1_planar_cones_three_steps():
    t0 = time.perf_counter()
    runs, fails, worst = 0, [], 0
    for seed in range(1000):
        scn = random_cone_pair_r2(seed, starts=10)
        for i, x in enumerate(scn.initial_points):
            t = run_crm(scn.set_a, scn.set_b, x, DEFAULT_TOL, 3)
            runs += 1
            worst = max(worst, t.iterations_used)
            if t.terminated is not Termination.FEASIBLE:
                fails.append((seed, i))
    elapsed = time.perf_counter() - t0
    ok = not fails and elapsed < 5.0
    record(1, ok, f"{runs - len(fails)}/{runs} feasible in <= 3 steps (max {worst}), {elapsed:.2f} s")
    assert not fails, fails[:10]
    assert elapsed < 5.0


# --- 2 ------------------------------------------------------------------------

POLY_PAIRS = [random_polyhedra_r2(seed) for seed in range(500)]


def test_criterion_2_planar_polyhedra_finite():
    for _ in _run_polyhedra(POLY_PAIRS, run_crm):
        pass
    counts, worst, bad = _run_polyhedra.result
    for _ in _run_polyhedra(POLY_PAIRS, run_crm_product_space):
        pass
    pcounts, pworst, _ = _run_polyhedra.result
    ok = not bad
    record(2, ok, f"CRM: {_summarize(counts, worst)} | product-space CRM: {_summarize(pcounts, pworst)}")
    assert not bad, bad[:10]


# --- 3 ------------------------------------------------------------------------

def test_criterion_3_wedge_lifts():
    details, all_bad, drift = [], [], 0.0
    for n in (4, 5):
        lifted = [lift_scenario(s, n, seed=s.seed) for s in POLY_PAIRS]
        for scn, t in _run_polyhedra(lifted, run_crm):
            block = np.array([p[2:] for p, *_ in t.rows()])
            drift = max(drift, float(np.abs(block - block[0]).max()))
        counts, worst, bad = _run_polyhedra.result
        all_bad += [(n, *b) for b in bad]
        details.append(f"R^{n}: {_summarize(counts, worst)}")
    ok = not all_bad and drift <= 1e-10
    record(3, ok, "; ".join(details) + f"; max M-block drift {drift:.1e}")
    assert drift <= 1e-10
    assert not all_bad, all_bad[:10]


# --- 4 ------------------------------------------------------------------------

def _closed_forms(x1, x2):
    d = 4 * x2**2 + x1**2
    return {
        "P_A": (x1 / 2, 0, x1 / 2),
        "R_A": (0, -x2, x1),
        "P_B(R_A)": (0, -x2, 0),
        "R_B(R_A)": (0, -x2, -x1),
        "C_T": (2 * x1 * x2**2 / d, -x2 * x1**2 / d, 0),
    }


def test_criterion_4_counterexample_algebra():
    a, b = ConeV(COUNTEREXAMPLE_A), ConeV(COUNTEREXAMPLE_B)
    rng = np.random.default_rng(2024)
    errors = {k: 0.0 for k in _closed_forms(1, 0.5)}
    for _ in range(20):
        x1 = rng.uniform(0.1, 10)
        x2 = rng.uniform(0.05, 0.95) * x1 * rng.choice([-1, 1])
        x = np.array([x1, x2, 0.0])
        ra = reflect(a, x)
        got = {
            "P_A": project(a, x),
            "R_A": ra,
            "P_B(R_A)": project(b, ra),
            "R_B(R_A)": reflect(b, ra),
            "C_T": crm_operator(a, b, x).next,
        }
        for k, v in _closed_forms(x1, x2).items():
            errors[k] = max(errors[k], float(np.abs(got[k] - np.array(v)).max()))
    failed = [k for k, e in errors.items() if e > 1e-10]
    detail = ", ".join(f"{k} {e:.1e}" for k, e in errors.items())
    record(4, not failed, f"max error per map: {detail}")
    assert not failed, f"maps off their closed forms: {failed}"


# --- 5 ------------------------------------------------------------------------

def test_criterion_5_counterexample_not_finite():
    scn = example_counterexample()
    t = run_crm(scn.set_a, scn.set_b, scn.initial_points[0], COUNTEREXAMPLE_TOL, 100)
    rows = t.rows()
    eps = COUNTEREXAMPLE_TOL.eps_feas
    members = [k for k, (_, da, db, _) in enumerate(rows) if da <= eps and db <= eps]
    norms = [float(np.linalg.norm(p)) for p, *_ in rows]
    decreasing = all(n1 < n0 for n0, n1 in zip(norms, norms[1:]))
    ok = t.iterations_used == 100 and not members and decreasing
    record(5, ok, f"{t.iterations_used} steps, {len(members)} iterates in A n B, "
                  f"norm strictly decreasing: {decreasing} ({norms[0]:.2f} -> {norms[-1]:.1e})")
    assert t.iterations_used == 100
    assert not members
    assert decreasing


# --- 6 ------------------------------------------------------------------------

def test_criterion_6_zone_three_steps():
    runs, fails, worst = 0, [], 0
    for seed in range(200):
        scn = random_proper_cone_pair_r3(seed)
        for i, x in enumerate(zone_starts(scn.set_a, scn.set_b, 10, seed)):
            t = run_crm(scn.set_a, scn.set_b, x, DEFAULT_TOL, 3)
            runs += 1
            worst = max(worst, t.iterations_used)
            if t.terminated is not Termination.FEASIBLE:
                fails.append((seed, i))
    record(6, not fails, f"{runs - len(fails)}/{runs} zone starts feasible in <= 3 steps (max {worst})")
    assert not fails, fails[:10]


# --- 7 ------------------------------------------------------------------------

def _valid_unit_points(cone, rng, count):
    out = []
    while len(out) < count:
        u = normalize(rng.normal(size=3))
        if not in_polar_cone(cone, u):
            out.append(u)
    return out


def test_criterion_7_projection_reflection_symmetry():
    rng = np.random.default_rng(7)
    sym, gap, cases = 0.0, 0.0, 0
    for seed in range(1000):
        cone = random_proper_cone_pair_r3(seed).set_a
        poly = build_spherical_polytope(cone)
        for x in _valid_unit_points(cone, rng, 10):
            p, r = spherical_project(cone, x), spherical_reflect(cone, x)
            d = geodesic_distance(x, p)
            sym = max(sym, abs(geodesic_distance(p, r) - d))
            gap = max(gap, abs(d - oracle_geodesic_distance_to_set(poly, x, 10_000)))
            cases += 1
    ok = sym <= 1e-9 and gap <= 1e-4
    record(7, ok, f"{cases} cases: max |d(P,R) - d(x,P)| {sym:.1e}, max oracle gap {gap:.1e}")
    assert sym <= 1e-9
    assert gap <= 1e-4


# --- 8 ------------------------------------------------------------------------

def test_criterion_8_operator_invariants():
    rng = np.random.default_rng(8)
    worst = {"orthogonality": 0.0, "norm": 0.0, "fixed": 0.0, "crm/srm": 0.0}
    n = {k: 0 for k in worst}
    moved = math.inf
    for seed in range(1000):
        scn = random_proper_cone_pair_r3(seed)
        a, b = scn.set_a, scn.set_b
        x = rng.normal(size=3) * rng.uniform(0.1, 10)
        scale = max(1.0, float(x @ x))
        p = project(a, x)
        worst["orthogonality"] = max(worst["orthogonality"], abs(float(p @ (x - p))) / scale)
        worst["norm"] = max(worst["norm"], abs(np.linalg.norm(reflect(a, x)) - np.linalg.norm(x)) / math.sqrt(scale))
        n["orthogonality"] += 1
        n["norm"] += 1

        inter = intersect_polytopes(build_spherical_polytope(a), build_spherical_polytope(b))
        w = rng.dirichlet(np.ones(len(inter.vertices))) @ inter.vertices
        f = w * rng.uniform(0.1, 10)
        worst["fixed"] = max(worst["fixed"], float(np.linalg.norm(crm_operator(a, b, f).next - f))
                             / max(1.0, float(np.linalg.norm(f))))
        n["fixed"] += 1
        # the converse: a point outside A n B is moved
        if not (membership(a, x) and membership(b, x)):
            try:
                moved = min(moved, float(np.linalg.norm(crm_operator(a, b, x).next - x)))
            except OperatorUndefined:
                pass

        z = zone_starts(a, b, 1, seed)[0]
        worst["crm/srm"] = max(worst["crm/srm"], float(np.linalg.norm(
            normalize(crm_operator(a, b, z).next) - srm_operator(a, b, normalize(z)))))
        n["crm/srm"] += 1
    ok = all(v <= 1e-9 for v in worst.values()) and moved > 1e-9
    detail = ", ".join(f"{k} {worst[k]:.1e} ({n[k]})" for k in worst)
    record(8, ok, f"{detail}; smallest move off A n B {moved:.1e}")
    assert all(v <= 1e-9 for v in worst.values()), worst
    assert moved > 1e-9


# --- 9 ------------------------------------------------------------------------

def _random_set(rng, dim):
    kind = rng.integers(5)
    if kind == 0:
        return HalfSpace(rng.normal(size=dim), rng.normal())
    if kind == 1:
        anchor = rng.normal(size=dim)
        hs = []
        for _ in range(rng.integers(2, 6)):
            a = rng.normal(size=dim)
            hs.append(HalfSpace(a, float(a @ anchor) + rng.uniform(0, 1)))
        return Polyhedron(tuple(hs))
    if kind == 2:
        return ConeV(rng.normal(size=(int(rng.integers(1, 6)), dim)))
    if kind == 3:
        return Ray(rng.normal(size=dim))
    return LinearSubspace(rng.normal(size=(int(rng.integers(1, dim)), dim)))


def test_criterion_9_oracle_equivalence():
    rng = np.random.default_rng(9)
    dev = 0.0
    for i in range(500):
        s = _random_set(rng, 2 + i % 2)
        x = rng.normal(size=s.dim) * rng.uniform(0.1, 10)
        dev = max(dev, float(np.abs(project(s, x) - oracle_project(s, x)).max()))
    record(9, dev <= 1e-8, f"500 pairs in R^2/R^3, max deviation {dev:.1e}")
    assert dev <= 1e-8


# --- 10 -----------------------------------------------------------------------

@pytest.mark.parametrize("scenario, method, style", [
    ("r2_cones", "crm", "plane"),
    ("r2_polyhedra", "crm_product", "plane"),
    ("r3_cones", "srm", "sphere_orthographic"),
    ("counterexample", "crm", "sphere_orthographic"),
])
def test_criterion_10_determinism(tmp_path, scenario, method, style):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        main(["run", "--scenario", scenario, "--method", method, "--out", str(out)])
        svg = tmp_path / f"fig{k}.svg"
        assert main(["plot", "--trace", str(out), "--style", style, "--out", str(svg)]) == 0
        outputs.append(((out / "trace.csv").read_bytes(), svg.read_bytes()))
    same = outputs[0] == outputs[1]
    prior = _DETERMINISM.setdefault("ok", True)
    _DETERMINISM["ok"] = prior and same
    _DETERMINISM["runs"] = _DETERMINISM.get("runs", 0) + 1
    record(10, _DETERMINISM["ok"], f"{_DETERMINISM['runs']} scenario/method pairs, trace.csv and SVG "
                                   f"byte-identical: {_DETERMINISM['ok']}")
    assert same


_DETERMINISM: dict = {}
