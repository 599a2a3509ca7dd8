"""Uphill simplex search over measurement parameters with seeded restarts."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .belloperator import quantum_value, stacked_bell_matrix, top_eigenvalue
from .inequality import BellInequality, violation_of
from .measurements import (
    Field,
    ScenarioShape,
    ShapeError,
    build_projector,
    build_scenario,
    enumerate_kind_combinations,
    parameter_count,
    setting_layout,
    validate_shape,
)

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = {2: 200, 3: 1000, 4: 5000}
TIE_TOL = 1e-9
MONOTONE_TOL = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int | None = None  # None: per-dimension default
    max_iterations: int = 2000
    simplex_tolerance: float = 1e-10
    initial_step: float = 0.5
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1 or self.simplex_tolerance <= 0 or self.initial_step <= 0:
            raise ValueError("iteration limit, tolerance and step must be positive")

    def restarts_for(self, dim: int) -> int:
        return self.restarts if self.restarts is not None else DEFAULT_RESTARTS[dim]


@dataclass(eq=False)
class ViolationResult:
    value: float
    violation: float
    shape: ScenarioShape
    params: np.ndarray | None
    projectors_A: list
    projectors_B: list
    state: np.ndarray
    combination_index: int = 0
    restart_histogram: dict = field(default_factory=dict)
    restarts: int = 0
    evaluations: int = 0


def nelder_mead_maximize(
    objective,
    x0,
    config: OptimizerConfig | None = None,
    *,
    reflect: float = 1.0,
    expand: float = 2.0,
    contract: float = 0.5,
    shrink: float = 0.5,
) -> tuple[np.ndarray, float]:
    """Maximise ``objective`` by the downhill simplex method run uphill.

    Stops when the spread of function values over the simplex drops below
    ``config.simplex_tolerance`` or after ``config.max_iterations`` iterations.
    """
    x, f, _ = _nelder_mead(objective, x0, config or OptimizerConfig(), reflect, expand, contract, shrink)
    return x, f


def _nelder_mead(objective, x0, config, reflect=1.0, expand=2.0, contract=0.5, shrink=0.5):
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    n = x0.size
    if n == 0:
        return x0.copy(), float(objective(x0)), 1
    pts = np.vstack([x0, x0 + config.initial_step * np.eye(n)])
    vals = np.array([objective(p) for p in pts], dtype=float)
    nfev = n + 1
    for _ in range(config.max_iterations):
        order = np.argsort(-vals, kind="stable")
        pts, vals = pts[order], vals[order]
        if vals[0] - vals[-1] < config.simplex_tolerance:
            break
        centroid = pts[:-1].mean(axis=0)
        worst = pts[-1]
        xr = centroid + reflect * (centroid - worst)
        fr = objective(xr)
        nfev += 1
        if fr > vals[0]:
            xe = centroid + expand * (xr - centroid)
            fe = objective(xe)
            nfev += 1
            if fe > fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
            continue
        if fr > vals[-2]:
            pts[-1], vals[-1] = xr, fr
            continue
        if fr > vals[-1]:
            xc = centroid + contract * (xr - centroid)
            fc = objective(xc)
            nfev += 1
            accepted = fc >= fr
        else:
            xc = centroid + contract * (worst - centroid)
            fc = objective(xc)
            nfev += 1
            accepted = fc > vals[-1]
        if accepted:
            pts[-1], vals[-1] = xc, fc
            continue
        pts[1:] = pts[0] + shrink * (pts[1:] - pts[0])
        vals[1:] = [objective(p) for p in pts[1:]]
        nfev += n
    best = int(np.argmax(vals))
    return pts[best].copy(), float(vals[best]), nfev


def make_objective(ineq: BellInequality, shape: ScenarioShape):
    """Parameters -> largest Bell-operator eigenvalue, with degenerate settings prebuilt."""
    entries, count = setting_layout(shape)
    stacks = (
        np.zeros((ineq.m_A, shape.dim_A, shape.dim_A), dtype=complex),
        np.zeros((ineq.m_B, shape.dim_B, shape.dim_B), dtype=complex),
    )
    live = []
    slot = [0, 0]
    for party, dim, kind, position, offset, n in entries:
        i = slot[party]
        slot[party] += 1
        if kind.degenerate:
            stacks[party][i] = build_projector(shape.field, dim, kind)
        else:
            live.append((stacks[party], i, dim, kind, position, offset, n))
    field = shape.field

    def objective(params):
        params = np.asarray(params, dtype=float)
        if params.size != count:
            raise ShapeError(f"shape takes {count} parameters, got {params.size}")
        for stack, i, dim, kind, position, offset, n in live:
            stack[i] = build_projector(field, dim, kind, params[offset:offset + n], position)
        return top_eigenvalue(stacked_bell_matrix(ineq, *stacks))

    return objective


def restart_rng(master_seed: int, combination_index: int, restart_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, combination_index, restart_index])


def _cluster_key(value: float) -> str:
    return f"{value:.6f}"


def _search_combination(args):
    ineq, shape, config, combination_index, restarts = args
    n = parameter_count(shape)
    objective = make_objective(ineq, shape)
    if n == 0:
        f = objective(np.zeros(0))
        return combination_index, np.zeros(0), f, {_cluster_key(f): 1}, 1, 1
    best_x, best_f = None, -math.inf
    histogram = Counter()
    nfev = 0
    for r in range(restarts):
        x0 = restart_rng(config.master_seed, combination_index, r).uniform(0.0, 2 * np.pi, n)
        x, f, k = _nelder_mead(objective, x0, config)
        nfev += k
        histogram[_cluster_key(f)] += 1
        if f > best_f:
            best_x, best_f = x, f
    return combination_index, best_x, best_f, dict(histogram), restarts, nfev


def _check_request(ineq: BellInequality, field: Field, dim: int, allow_degenerate: bool) -> None:
    if dim not in (2, 3, 4):
        raise ShapeError(f"unsupported local dimension {dim}")
    if allow_degenerate and dim != 2:
        raise ShapeError("degenerate settings are only supported for qubits")
    validate_shape(ScenarioShape(Field(field), dim, dim, (), ()))


def finalize(ineq: BellInequality, shape: ScenarioShape, params, **extra) -> ViolationResult:
    """Re-assemble the operator at ``params`` and package the top eigenpair."""
    projs_A, projs_B = build_scenario(shape, params)
    value, state = quantum_value(ineq, projs_A, projs_B)
    return ViolationResult(
        value=value,
        violation=violation_of(ineq, value),
        shape=shape,
        params=np.asarray(params, dtype=float),
        projectors_A=projs_A,
        projectors_B=projs_B,
        state=state,
        **extra,
    )


def maximize_violation(
    ineq: BellInequality,
    field: Field | str = Field.REAL,
    dim: int = 2,
    allow_degenerate: bool = False,
    config: OptimizerConfig | None = None,
) -> ViolationResult:
    """Best value over every kind combination for the local dimension and all restarts."""
    config = config or OptimizerConfig()
    field = Field(field)
    _check_request(ineq, field, dim, allow_degenerate)
    combos = enumerate_kind_combinations(dim, ineq.m_A, ineq.m_B, allow_degenerate)
    shapes = [ScenarioShape(field, dim, dim, ka, kb) for ka, kb in combos]
    restarts = config.restarts_for(dim)
    tasks = [(ineq, s, config, i, restarts) for i, s in enumerate(shapes)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_search_combination, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    else:
        outcomes = [_search_combination(t) for t in tasks]

    top = max(o[2] for o in outcomes)
    winner = min(
        (o for o in outcomes if o[2] >= top - TIE_TOL),
        key=lambda o: (shapes[o[0]].n_degenerate, o[0]),
    )
    index, x, _, histogram, _, _ = winner
    result = finalize(
        ineq,
        shapes[index],
        x,
        combination_index=index,
        restart_histogram=histogram,
        restarts=sum(o[4] for o in outcomes),
        evaluations=sum(o[5] for o in outcomes),
    )
    log.info("%s %s d=%d deg=%s: %.6f", ineq.name, field.value, dim, allow_degenerate, result.value)
    return result


# columns of a results table row, in display order
SWEEP_COLUMNS = (
    (Field.REAL, 2, False),
    (Field.COMPLEX, 2, False),
    (Field.REAL, 2, True),
    (Field.COMPLEX, 2, True),
    (Field.REAL, 3, False),
    (Field.COMPLEX, 3, False),
    (Field.REAL, 4, False),
    (Field.COMPLEX, 4, False),
)

# (smaller, larger): the larger search space contains the smaller one, up to
# an embedding (real d in complex d, qubit in qutrit, degenerate qubit
# settings via rank-2 ququart projectors, complex qubit in real ququart)
MONOTONE_PAIRS = (
    ((Field.REAL, 2, False), (Field.COMPLEX, 2, False)),
    ((Field.REAL, 2, True), (Field.COMPLEX, 2, True)),
    ((Field.REAL, 3, False), (Field.COMPLEX, 3, False)),
    ((Field.REAL, 4, False), (Field.COMPLEX, 4, False)),
    ((Field.REAL, 2, False), (Field.REAL, 2, True)),
    ((Field.COMPLEX, 2, False), (Field.COMPLEX, 2, True)),
    ((Field.REAL, 2, False), (Field.REAL, 3, False)),
    ((Field.COMPLEX, 2, False), (Field.COMPLEX, 3, False)),
    ((Field.REAL, 2, True), (Field.REAL, 4, False)),
    ((Field.COMPLEX, 2, True), (Field.COMPLEX, 4, False)),
    ((Field.COMPLEX, 2, False), (Field.REAL, 4, False)),
)


def column_name(key) -> str:
    field, dim, deg = key
    name = {2: "qubit", 3: "qutrit", 4: "ququart"}[dim]
    return f"{field.value}_{name}" + ("_deg" if deg else "")


@dataclass
class SweepResult:
    entries: dict
    monotonicity_violations: list

    @property
    def consistent(self) -> bool:
        return not self.monotonicity_violations


def monotonicity_report(entries: dict, tol: float = MONOTONE_TOL) -> list[tuple]:
    """Pairs (smaller, larger, deficit) where the larger space scored lower."""
    out = []
    for lo, hi in MONOTONE_PAIRS:
        if lo in entries and hi in entries:
            deficit = entries[lo].value - entries[hi].value
            if deficit > tol:
                out.append((lo, hi, deficit))
    return out


def cross_dimension_sweep(
    ineq: BellInequality,
    config: OptimizerConfig | None = None,
    columns=SWEEP_COLUMNS,
) -> SweepResult:
    entries = {}
    for key in columns:
        field, dim, deg = key
        entries[key] = maximize_violation(ineq, field, dim, deg, config)
    return SweepResult(entries, monotonicity_report(entries))


def workers_from_env(default: int | None = None) -> int:
    cap = os.environ.get("BELLMAX_THREADS")
    n = default or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer BELLMAX_THREADS=%r", cap)
    return n
