"""Sampling-based motion planning with consistent spanning trees.

Public surface: scenario geometry (space), the growing graph (nngraph), the
key queue (pqueue), the planners (planner), the trial harness (bench) and the
CLI (cli).
"""

from .bench import TrialStats, dijkstra, run_trials, time_ratio, verify_consistency
from .nngraph import Graph, dump_graph, parse_graph_dump, steer
from .planner import (
    AlgorithmVariant,
    CostHistory,
    ExtendStatus,
    InvariantViolation,
    PlannerState,
    PlanResult,
    VertexCategory,
    classify_values,
    compute_key,
    extend,
    gamma_rrg,
    plan,
    plan_rrtstar,
    reduce_inconsistency,
    run_planner,
    update_queue,
)
from .pqueue import INFINITE_KEY, IndexedQueue, Key, key_leq, key_lt
from .space import (
    AxisBox,
    CostZone,
    SamplingBudgetError,
    Scenario,
    ScenarioError,
    SeededRng,
    edge_cost,
    heuristic,
    load_scenario,
    sample_free,
    segment_obstacle_free,
)

__version__ = "0.1.0"
