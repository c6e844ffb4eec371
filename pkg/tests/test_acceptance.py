"""End-to-end acceptance suite.

Ten numbered criteria, each asserted at its stated tolerance and time
budget; every test records one PASS/FAIL line that the conftest hook prints
in the run summary.  The two heavyweight planner batches (10 matched seeds
across all five algorithms) are session fixtures shared by criteria 3-6.
"""

import math
import random
import time
from dataclasses import dataclass

import numpy as np
import pytest

from conftest import record_criterion
from rrtsharp import bench
from rrtsharp.cli import run_cli
from rrtsharp.planner import (
    AlgorithmVariant,
    VertexCategory,
    classify_values,
    compute_key,
    run_planner,
)
from rrtsharp.pqueue import INFINITE_KEY, IndexedQueue, Key, key_lt
from rrtsharp.space import AxisBox, CostZone, Scenario, load_scenario, validate_scenario
from rrtsharp.scenarios import BUNDLED, scenario_path

INF = math.inf
SHARP_VARIANTS = (
    AlgorithmVariant.RRTSHARP_V0,
    AlgorithmVariant.RRTSHARP_V1,
    AlgorithmVariant.RRTSHARP_V2,
    AlgorithmVariant.RRTSHARP_V3,
)
ALL_VARIANTS = SHARP_VARIANTS + (AlgorithmVariant.RRTSTAR_BASELINE,)
SEEDS = tuple(range(10))
DIJKSTRA_TOL = 1e-9


def check(number, ok, detail):
    record_criterion(number, ok, detail)
    assert ok, f"criterion {number}: {detail}"


def max_promising_deviation(state, scenario):
    """Largest |g - dijkstra| over vertices whose key precedes the goal key."""
    dist = bench.dijkstra(state.graph, scenario, 0)
    gk = state.goal_key()
    worst = 0.0
    count = 0
    for vid in range(len(state.graph)):
        if key_lt(compute_key(state, vid), gk):
            dev = abs(state.graph.g[vid] - dist[vid])
            if dev > worst:
                worst = dev
            count += 1
    return worst, count


# ------------------------------------------------------------- batch runs


@dataclass
class RunSummary:
    vertices: int
    best_cost: float
    history: list
    elapsed: float
    consistent_infinite: int
    inclusions_all_promising: bool


def _summarize(result, elapsed):
    graph = result.graph
    black = sum(
        1
        for vid in range(len(graph))
        if classify_values(graph.g[vid], graph.lmc[vid])
        is VertexCategory.CONSISTENT_INFINITE
    )
    log = getattr(result.state, "inclusion_log", None)
    all_promising = (
        all(key_lt(key, gk) for _, key, gk in log) if log is not None else True
    )
    return RunSummary(
        vertices=len(graph),
        best_cost=result.best_cost,
        history=[(it, cost) for it, _, cost in result.cost_history.samples],
        elapsed=elapsed,
        consistent_infinite=black,
        inclusions_all_promising=all_promising,
    )


def _run_batch(scenario_name, iters, stride, eta):
    scenario = load_scenario(scenario_path(scenario_name))
    out = {}
    for variant in ALL_VARIANTS:
        rows = []
        for t in SEEDS:
            t0 = time.perf_counter()
            result = run_planner(
                scenario, variant, iters, bench.trial_seed(0, t), stride, eta=eta
            )
            rows.append(_summarize(result, time.perf_counter() - t0))
        out[variant] = rows
    return out


@pytest.fixture(scope="session")
def batch_empty():
    """d2_empty, 25k iterations, all five algorithms x 10 matched seeds."""
    return _run_batch("d2_empty", 25_000, 5_000, eta=0.15)


@pytest.fixture(scope="session")
def batch_boxes():
    """d2_boxes, 10k iterations, all five algorithms x 10 matched seeds."""
    return _run_batch("d2_boxes", 10_000, 250, eta=0.15)


# -------------------------------------------------- 1: dijkstra equivalence


def _random_scenario(rng, dim):
    side_goal = 0.12 if dim == 2 else 0.2
    for _ in range(200):
        x_init = tuple(float(c) for c in rng.uniform(0.02, 0.98, dim))
        goal_lo = rng.uniform(0.0, 1.0 - side_goal, dim)
        goal = AxisBox(
            tuple(float(c) for c in goal_lo),
            tuple(float(c) for c in goal_lo + side_goal),
        )
        if goal.contains(x_init):
            continue
        obstacles = []
        want_obs = int(rng.integers(2, 7)) if dim == 2 else int(rng.integers(1, 5))
        for _ in range(40):
            if len(obstacles) == want_obs:
                break
            side = rng.uniform(0.06, 0.22, dim) if dim == 2 else rng.uniform(0.15, 0.4, dim)
            lo = rng.uniform(0.0, 1.0 - side, dim)
            ob = AxisBox(
                tuple(float(c) for c in lo), tuple(float(c) for c in lo + side)
            )
            if ob.contains_interior(x_init) or ob.overlaps_interior(goal):
                continue
            obstacles.append(ob)
        zones = []
        want_zones = int(rng.integers(0, 4))
        for _ in range(40):
            if len(zones) == want_zones:
                break
            side = rng.uniform(0.1, 0.35, dim)
            lo = rng.uniform(0.0, 1.0 - side, dim)
            zb = AxisBox(
                tuple(float(c) for c in lo), tuple(float(c) for c in lo + side)
            )
            if any(zb.overlaps_interior(z.box) for z in zones):
                continue
            coef = float(rng.choice([0.5, 0.75, 1.5, 2.5, 4.0]))
            zones.append(CostZone(zb, coef))
        sc = Scenario(
            bounds=AxisBox((0.0,) * dim, (1.0,) * dim),
            obstacles=tuple(obstacles),
            zones=tuple(zones),
            x_init=x_init,
            goal=goal,
        )
        try:
            return validate_scenario(sc)
        except Exception:
            continue
    raise RuntimeError("scenario generator exhausted its attempts")


def test_a01_committed_costs_match_dijkstra_on_random_scenarios():
    t_start = time.perf_counter()
    worst = 0.0
    scenarios = 25
    checked_total = 0
    for i in range(scenarios):
        dim = 2 if i < 18 else 5
        rng = np.random.default_rng(1234 + i)
        sc = _random_scenario(rng, dim)
        variant = SHARP_VARIANTS[i % 4]
        eta = 0.15 if dim == 2 else 0.25
        result = run_planner(
            sc, variant, 2_000, bench.trial_seed(100, i), 1_000, eta=eta
        )
        state = result.state
        dist = bench.dijkstra(result.graph, sc, 0)
        gk = state.goal_key()
        promising = [
            vid
            for vid in range(len(result.graph))
            if key_lt(compute_key(state, vid), gk)
        ]
        picks = random.Random(9000 + i).sample(promising, min(50, len(promising)))
        for vid in picks:
            dev = abs(result.graph.g[vid] - dist[vid])
            if dev > worst:
                worst = dev
        checked_total += len(picks)
    elapsed = time.perf_counter() - t_start
    ok = worst <= DIJKSTRA_TOL and elapsed <= 300.0
    check(
        1,
        ok,
        f"g matches dijkstra on {checked_total} sampled promising vertices over "
        f"{scenarios} random scenarios (max dev {worst:.3e}, {elapsed:.1f}s)",
    )


# ------------------------------------------------------- 2: self-check CLI


def test_a02_check_subcommand_clean_on_bundled_scenarios(tmp_path):
    timings = []
    ok = True
    for name in BUNDLED:
        t0 = time.perf_counter()
        code = run_cli(
            [
                "check",
                "--scenario", str(scenario_path(name)),
                "--algo", "v0",
                "--iters", "5000",
                "--stride", "100",
                "--seed", "0",
                "--out", str(tmp_path / name),
            ]
        )
        dt = time.perf_counter() - t0
        timings.append((name, code, dt))
        if code != 0 or dt > 120.0:
            ok = False
    summary = ", ".join(f"{n} {dt:.0f}s" for n, _, dt in timings)
    check(2, ok, f"check exits 0 in under 120s on all six worlds ({summary})")


# ------------------------------------------------ 3: convergence to optimum


def test_a03_convergence_within_tolerance_of_straight_line(batch_empty):
    optimum = 1.0606601717798212  # straight-line start -> goal box corner
    details = []
    ok = True
    for variant in ALL_VARIANTS:
        rows = batch_empty[variant]
        if any(math.isinf(r.best_cost) for r in rows):
            ok = False
            details.append(f"{variant.value} unsolved")
            continue
        mean = sum(r.best_cost for r in rows) / len(rows)
        gap = (mean - optimum) / optimum
        budget = sum(r.elapsed for r in rows)
        limit = 0.08 if variant is AlgorithmVariant.RRTSTAR_BASELINE else 0.03
        if gap > limit or budget > 180.0:
            ok = False
        details.append(f"{variant.value} +{100 * gap:.2f}% {budget:.0f}s")
    check(3, ok, "25k-iteration costs near optimum: " + "; ".join(details))


# ------------------------------------- 4: anytime dominance over the baseline


def _grid_means(rows, min_iteration):
    grid = {}
    for it, _ in rows[0].history:
        if it >= min_iteration:
            grid[it] = []
    for r in rows:
        for it, cost in r.history:
            if it in grid and math.isfinite(cost):
                grid[it].append(cost)
    return {
        it: (sum(v) / len(v) if v else INF) for it, v in grid.items()
    }


def test_a04_v0_anytime_mean_dominates_baseline(batch_boxes):
    v0 = _grid_means(batch_boxes[AlgorithmVariant.RRTSHARP_V0], 2_500)
    star = _grid_means(batch_boxes[AlgorithmVariant.RRTSTAR_BASELINE], 2_500)
    points = sorted(v0)
    violations = [
        it
        for it in points
        if not (
            v0[it] <= star[it] + 1e-9
            or (math.isinf(v0[it]) and math.isinf(star[it]))
        )
    ]
    frac = len(violations) / len(points)
    ok = frac <= 0.05
    check(
        4,
        ok,
        f"mean cost of the propagating planner at/below the baseline on "
        f"{len(points) - len(violations)}/{len(points)} grid points past 2500",
    )


# ----------------------------- 5: variant bookkeeping (V1 black, V3 gating)


def test_a05_v1_never_black_and_v3_inclusions_promising(batch_empty, batch_boxes):
    v1_black = sum(
        r.consistent_infinite
        for batch in (batch_empty, batch_boxes)
        for r in batch[AlgorithmVariant.RRTSHARP_V1]
    )
    v3_bad = sum(
        0 if r.inclusions_all_promising else 1
        for batch in (batch_empty, batch_boxes)
        for r in batch[AlgorithmVariant.RRTSHARP_V3]
    )
    ok = v1_black == 0 and v3_bad == 0
    check(
        5,
        ok,
        f"across 40 runs: {v1_black} consistent-infinite vertices under V1, "
        f"{v3_bad} V3 runs with a non-promising inclusion",
    )


# ------------------------------------------------ 6: vertex-count ordering


def test_a06_vertex_counts_shrink_with_stricter_gates(batch_empty, batch_boxes):
    bad = []
    for name, batch in (("empty", batch_empty), ("boxes", batch_boxes)):
        for idx, t in enumerate(SEEDS):
            n = {
                v: batch[v][idx].vertices
                for v in SHARP_VARIANTS
            }
            if not (
                n[AlgorithmVariant.RRTSHARP_V3]
                <= n[AlgorithmVariant.RRTSHARP_V2]
                <= n[AlgorithmVariant.RRTSHARP_V1]
                <= n[AlgorithmVariant.RRTSHARP_V0]
            ):
                bad.append((name, t, n))
    ok = not bad
    check(
        6,
        ok,
        "final |V| ordered V3 <= V2 <= V1 <= V0 on all 20 matched seeds"
        + (f"; broken at {bad[:3]}" if bad else ""),
    )


# ----------------------------------------- 7: cheap-zone usage on type 4


def _clip_fraction(a, b, zbox):
    t0, t1 = 0.0, 1.0
    for i in range(len(a)):
        d = b[i] - a[i]
        if d == 0.0:
            if not (zbox.lo[i] <= a[i] <= zbox.hi[i]):
                return 0.0
            continue
        u = (zbox.lo[i] - a[i]) / d
        v = (zbox.hi[i] - a[i]) / d
        if u > v:
            u, v = v, u
        t0 = max(t0, u)
        t1 = min(t1, v)
        if t0 >= t1:
            return 0.0
    return t1 - t0


def _cheap_fraction(points, zones):
    total = 0.0
    cheap = 0.0
    for a, b in zip(points, points[1:]):
        length = math.dist(a, b)
        total += length
        for z in zones:
            if z.coefficient == 0.75:
                cheap += _clip_fraction(a, b, z.box) * length
    return cheap / total


def test_a07_zone_world_path_prefers_cheap_bands():
    sc = load_scenario(scenario_path("d2_zones"))
    result = run_planner(
        sc, AlgorithmVariant.RRTSHARP_V2, 10_000, bench.trial_seed(0, 0), 2_500,
        eta=0.15,
    )
    ok = math.isfinite(result.best_cost)
    frac_path = frac_line = 0.0
    if ok:
        points = [result.graph.positions[vid] for vid in result.best_path]
        frac_path = _cheap_fraction(points, sc.zones)
        frac_line = _cheap_fraction([tuple(sc.x_init), points[-1]], sc.zones)
        ok = frac_path > frac_line
    check(
        7,
        ok,
        f"path spends {100 * frac_path:.1f}% of its length in 0.75 bands vs "
        f"{100 * frac_line:.1f}% for the straight line",
    )


# ------------------------------------------------ 8: queue reference fuzz


def test_a08_queue_agrees_with_reference_over_1e5_operations():
    rng = random.Random(20_24)
    q = IndexedQueue()
    ref = {}
    next_vid = 0
    ops = 100_000
    mismatches = 0
    for op in range(ops):
        roll = rng.random()
        if ref and (len(ref) > 3_000 or roll > 0.7):
            vid = rng.choice(list(ref))
            del ref[vid]
            q.remove(vid)
        elif ref and roll > 0.4:
            vid = rng.choice(list(ref))
            key = Key(rng.uniform(0, 100), rng.uniform(0, 100))
            ref[vid] = key
            q.update(vid, key)
        else:
            key = Key(rng.uniform(0, 100), rng.uniform(0, 100))
            ref[next_vid] = key
            q.insert(next_vid, key)
            next_vid += 1
        if op % 20 == 0:
            got_vid, got_key = q.findmin()
            if ref:
                want = min(ref.items(), key=lambda kv: (kv[1].k1, kv[1].k2, kv[0]))
                if got_key != want[1] or ref.get(got_vid) != got_key:
                    mismatches += 1
            elif got_vid is not None or got_key != INFINITE_KEY:
                mismatches += 1
    # Drain and verify the full pop order against the reference.
    order = []
    while len(q):
        vid, key = q.findmin()
        order.append((vid, key))
        q.remove(vid)
    want_keys = sorted((k.k1, k.k2) for k in ref.values())
    got_keys = [(k.k1, k.k2) for _, k in order]
    if sorted(got_keys) != want_keys or got_keys != sorted(got_keys):
        mismatches += 1
    ok = mismatches == 0
    check(8, ok, f"indexed heap matched the reference over {ops} operations")


# --------------------------------------------------- 9: reproducible output


def test_a09_run_artifacts_byte_identical_across_reruns(tmp_path):
    configs = [
        ("d2_zones", ["--iters", "2000", "--seed", "7", "--stride", "100",
                      "--snapshot", "1500"]),
        ("d5_empty", ["--iters", "800", "--seed", "3", "--stride", "100"]),
    ]
    ok = True
    compared = 0
    for name, extra in configs:
        outs = []
        for tag in ("first", "second"):
            out = tmp_path / f"{name}_{tag}"
            code = run_cli(
                ["run", "--scenario", str(scenario_path(name)), "--algo", "v1",
                 "--out", str(out)] + extra
            )
            if code != 0:
                ok = False
            outs.append(out)
        for f in sorted(outs[0].iterdir()):
            twin = outs[1] / f.name
            compared += 1
            if not twin.exists() or f.read_bytes() != twin.read_bytes():
                ok = False
    check(
        9,
        ok,
        f"rerun artifacts byte-identical ({compared} files across two worlds)",
    )


# ------------------------------------------------------- 10: scaled smoke


def test_a10_five_dimensional_smoke_with_live_invariants():
    scenario = load_scenario(scenario_path("d5_boxes"))
    t_start = time.perf_counter()
    failures = []
    worst_dev = 0.0
    for variant in (AlgorithmVariant.RRTSHARP_V2, AlgorithmVariant.RRTSHARP_V3):
        for t in range(5):

            def observer(state, iteration):
                nonlocal worst_dev
                if iteration % 10_000 != 0:
                    return
                report = bench.verify_consistency(state)
                if not report.ok:
                    failures.append((variant.value, t, iteration, report.violations[:3]))
                if iteration == 10_000:
                    dev, _ = max_promising_deviation(state, scenario)
                    worst_dev = max(worst_dev, dev)
                    if dev > DIJKSTRA_TOL:
                        failures.append((variant.value, t, iteration, f"dev {dev:.2e}"))

            result = run_planner(
                scenario, variant, 100_000, bench.trial_seed(0, t), 20_000,
                eta=0.2, on_iteration=observer,
            )
            if math.isinf(result.best_cost):
                failures.append((variant.value, t, "unsolved"))
            dev, _ = max_promising_deviation(result.state, scenario)
            worst_dev = max(worst_dev, dev)
            if dev > DIJKSTRA_TOL:
                failures.append((variant.value, t, "final", f"dev {dev:.2e}"))
    elapsed = time.perf_counter() - t_start
    ok = not failures and elapsed <= 900.0
    check(
        10,
        ok,
        f"10 runs of 100k iterations in 5-D kept every checkpoint invariant "
        f"(max dijkstra dev {worst_dev:.2e}, {elapsed:.0f}s)"
        + (f"; failures {failures[:2]}" if failures else ""),
    )
