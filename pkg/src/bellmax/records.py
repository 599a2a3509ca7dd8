"""JSON run records: everything needed to re-evaluate a stored optimum."""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import inequality as ineq_io
from .analysis import analyze
from .measurements import ScenarioShape, build_scenario
from .belloperator import quantum_value
from .optimizer import OptimizerConfig, ViolationResult

RECORD_VERSION = 1


class RecordError(ValueError):
    """A run record is missing data or fails its own consistency checks."""


def fmt6(x: float) -> str:
    return f"{x:.6f}"


def make_record(ineq, result: ViolationResult, config: OptimizerConfig, allow_degenerate: bool, wall_time: float) -> dict:
    report = analyze(result)
    return {
        "version": RECORD_VERSION,
        "inequality": {"digest": ineq.digest(), **ineq_io.to_dict(ineq)},
        "shape": result.shape.to_dict(),
        "allow_degenerate": allow_degenerate,
        "config": {k: v for k, v in asdict(config).items() if k != "workers"},
        "value": result.value,
        "violation": result.violation,
        "table": {
            "value": fmt6(result.value),
            "violation": fmt6(result.violation),
            "star": report.is_maximally_entangled,
        },
        "schmidt_coefficients": report.coefficients.tolist(),
        "verdicts_A": report.verdicts_A,
        "verdicts_B": report.verdicts_B,
        "combination_index": result.combination_index,
        "restart_histogram": dict(sorted(result.restart_histogram.items(), reverse=True)),
        "restarts": result.restarts,
        "evaluations": result.evaluations,
        "params": None if result.params is None else result.params.tolist(),
        "state": [[z.real, z.imag] for z in np.asarray(result.state, dtype=complex)],
        "timing": {"wall_time_s": wall_time},
    }


def dumps(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


def write(record: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(record), encoding="utf-8")


def read(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RecordError(f"cannot read record {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise RecordError("record must be a JSON object")
    return doc


def numeric_fields(record: dict) -> dict:
    """The record minus wall-clock timing (reproducible part)."""
    return {k: v for k, v in record.items() if k != "timing"}


def restore(record: dict):
    """Inequality, shape, projectors and state from a record; raises RecordError."""
    for key in ("inequality", "shape", "params", "state", "value"):
        if record.get(key) is None:
            raise RecordError(f"record is missing {key!r}")
    doc = dict(record["inequality"])
    doc.pop("digest", None)
    try:
        ineq = ineq_io.from_dict(doc)
        shape = ScenarioShape.from_dict(record["shape"])
        projs_A, projs_B = build_scenario(shape, record["params"])
        state = np.array([complex(re, im) for re, im in record["state"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordError(f"malformed record: {exc}") from None
    if state.size != shape.dim_A * shape.dim_B:
        raise RecordError(f"state length {state.size} does not fit {shape.dim_A}x{shape.dim_B}")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-9:
        raise RecordError(f"stored state is not normalised (norm {norm:.12g})")
    return ineq, shape, projs_A, projs_B, state


def reevaluate(record: dict) -> float:
    """Quantum value re-computed from the stored parameters."""
    ineq, _, projs_A, projs_B, _ = restore(record)
    return quantum_value(ineq, projs_A, projs_B)[0]


def result_from_record(record: dict) -> tuple:
    ineq, shape, projs_A, projs_B, state = restore(record)
    value = float(record["value"])
    result = ViolationResult(
        value=value,
        violation=value - ineq.classical_bound,
        shape=shape,
        params=np.asarray(record["params"], dtype=float),
        projectors_A=projs_A,
        projectors_B=projs_B,
        state=state,
        combination_index=int(record.get("combination_index", 0)),
    )
    return ineq, result
