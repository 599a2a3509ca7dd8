"""Command-line interface: ``bellmax optimize|sweep|embed-check|classical|verify``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from . import inequality as ineq_io
from . import records
from .analysis import analyze
from .belloperator import expectation
from .embedding import embed_scenario
from .inequality import InequalityError
from .measurements import Field, ShapeError
from .optimizer import (
    SWEEP_COLUMNS,
    OptimizerConfig,
    column_name,
    maximize_violation,
    monotonicity_report,
    workers_from_env,
)

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_VERIFY = 0, 2, 3, 4
VERIFY_TOL = 1e-9

log = logging.getLogger("bellmax")


class CliError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


def load_inequality(spec: str):
    path = Path(spec)
    try:
        if path.exists():
            return ineq_io.load_file(path)
        if path.stem.lower() in ineq_io.BUNDLED and path.parent == Path("."):
            return ineq_io.bundled(path.stem)
    except (InequalityError, OSError) as exc:
        raise CliError(f"{spec}: {exc}", EXIT_USAGE) from None
    raise CliError(f"{spec}: no such inequality file", EXIT_USAGE)


def make_config(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            restarts=args.restarts,
            max_iterations=args.max_iterations,
            simplex_tolerance=args.tolerance,
            master_seed=args.seed,
            workers=workers_from_env(),
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def cmd_optimize(args) -> int:
    ineq = load_inequality(args.ineq)
    config = make_config(args)
    start = time.perf_counter()
    try:
        result = maximize_violation(ineq, Field(args.field), args.dim, args.allow_degenerate, config)
    except ShapeError as exc:
        raise CliError(str(exc), EXIT_UNSUPPORTED) from None
    record = records.make_record(ineq, result, config, args.allow_degenerate, time.perf_counter() - start)
    if args.out:
        records.write(record, args.out)
    star = " *" if record["table"]["star"] else ""
    print(f"{ineq.name} {args.field} d={args.dim}{' deg' if args.allow_degenerate else ''}: "
          f"value {record['table']['value']} violation {record['table']['violation']}{star}")
    return EXIT_OK


def cmd_verify(args) -> int:
    record = records.read(args.record)
    value = records.reevaluate(record)
    delta = abs(value - float(record["value"]))
    print(f"stored {float(record['value']):.12f} recomputed {value:.12f} delta {delta:.3e}")
    return EXIT_OK if delta <= VERIFY_TOL else EXIT_VERIFY


def cmd_embed_check(args) -> int:
    record = records.read(args.record)
    ineq, solution = records.result_from_record(record)
    complex_value = expectation(ineq, solution.projectors_A, solution.projectors_B, solution.state)
    certificate = embed_scenario(ineq, solution)
    delta = abs(certificate.value - complex_value)
    report = {
        "inequality": ineq.name,
        "source_field": solution.shape.field.value,
        "source_dim": [solution.shape.dim_A, solution.shape.dim_B],
        "target_dim": [certificate.shape.dim_A, certificate.shape.dim_B],
        "source_value": complex_value,
        "embedded_value": certificate.value,
        "delta": delta,
        "embedded_schmidt": analyze(certificate).coefficients.tolist(),
        "ok": delta <= VERIFY_TOL,
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK if report["ok"] else EXIT_VERIFY


def cmd_classical(args) -> int:
    ineq = load_inequality(args.ineq)
    print(f"{ineq.name} ({ineq.type_tag}): classical bound {records.fmt6(ineq.classical_bound)}")
    return EXIT_OK


def _selected_columns(args):
    dims = {int(d) for d in args.dims.split(",")} if args.dims else {2, 3, 4}
    bad = dims - {2, 3, 4}
    if bad:
        raise CliError(f"unsupported dimensions {sorted(bad)}", EXIT_UNSUPPORTED)
    return [c for c in SWEEP_COLUMNS if c[1] in dims and not (c[2] and args.no_degenerate)]


def sweep_row(path: Path, columns, config) -> dict:
    row = {"file": path.name, "name": path.stem, "type": "", "classical_bound": None,
           "status": "ok", "error": "", "values": {}, "stars": {}, "monotonicity": []}
    try:
        ineq = ineq_io.load_file(path)
        row.update(name=ineq.name, type=ineq.type_tag, classical_bound=ineq.classical_bound)
        entries = {}
        for key in columns:
            result = maximize_violation(ineq, key[0], key[1], key[2], config)
            entries[key] = result
            row["values"][column_name(key)] = result.violation
            row["stars"][column_name(key)] = analyze(result).is_maximally_entangled
        row["monotonicity"] = [
            {"smaller": column_name(lo), "larger": column_name(hi), "deficit": d}
            for lo, hi, d in monotonicity_report(entries)
        ]
    except (InequalityError, ShapeError, OSError, ValueError) as exc:
        row.update(status="failed", error=str(exc))
        log.error("%s: %s", path.name, exc)
    return row


def sweep_csv(rows, columns) -> str:
    buf = io.StringIO()
    names = [column_name(c) for c in columns]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "type", "classical_bound", *names, "monotone", "status"])
    for row in rows:
        cells = []
        for n in names:
            if n in row["values"]:
                cells.append(records.fmt6(row["values"][n]) + (" *" if row["stars"][n] else ""))
            else:
                cells.append("")
        bound = "" if row["classical_bound"] is None else records.fmt6(row["classical_bound"])
        monotone = "ok" if not row["monotonicity"] else ";".join(
            f"{m['smaller']}>{m['larger']}" for m in row["monotonicity"])
        writer.writerow([row["name"], row["type"], bound, *cells, monotone,
                         row["status"] if not row["error"] else f"failed: {row['error']}"])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise CliError(f"{corpus}: not a directory", EXIT_USAGE)
    columns = _selected_columns(args)
    config = make_config(args)
    rows = [sweep_row(p, columns, config) for p in sorted(corpus.glob("*.json"))]
    if args.format == "csv":
        text = sweep_csv(rows, columns)
    else:
        text = json.dumps({"columns": [column_name(c) for c in columns], "rows": rows}, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellmax", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p):
        p.add_argument("--restarts", type=int, default=None, help="restarts per kind combination")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iterations", type=int, default=2000)
        p.add_argument("--tolerance", type=float, default=1e-10, help="simplex value spread")

    p = sub.add_parser("optimize", help="maximise the quantum value for one (field, dim)")
    p.add_argument("--ineq", required=True)
    p.add_argument("--field", choices=[f.value for f in Field], default="real")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--allow-degenerate", action="store_true")
    p.add_argument("--out")
    search_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="table of values over fields and dimensions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--dims", help="comma-separated subset of 2,3,4")
    p.add_argument("--no-degenerate", action="store_true", help="skip degenerate qubit columns")
    p.add_argument("--out")
    search_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("embed-check", help="real 2n-dimensional certificate for a stored run")
    p.add_argument("--record", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed_check)

    p = sub.add_parser("classical", help="classical bound by enumeration")
    p.add_argument("--ineq", required=True)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("verify", help="re-evaluate a stored run")
    p.add_argument("--record", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"bellmax: {exc}", file=sys.stderr)
        return exc.status
    except records.RecordError as exc:
        print(f"bellmax: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
