"""Command-line entry point: ``topoloom <command> ...``.

Primary output goes to stdout; areas, timings and errors go to stderr.
Exit status is 0 on success, 1 when a verification fails and 2 for usage
or input errors. A file argument of ``-`` reads standard input.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .bench import (
    DESK_GRID,
    REFERENCE_TABLE,
    BenchError,
    BenchParams,
    format_json,
    format_table,
    random_circuit,
    run_bench,
)
from .bounded import synth_bounded
from .circuit import parse_circuit, serialize_circuit
from .extract import ExtractionError, extract
from .field import area, parse_field, serialize_field, validate
from .geometry import (
    GeometryError,
    estimate_resources,
    field_to_geometry,
    render_ascii,
    render_geometry,
    render_svg,
)
from .gf2 import equivalent
from .junction import format_correction, run_suite
from .unbounded import synth_unbounded


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_gen(args) -> int:
    p = BenchParams(args.qubits, args.gates, args.max_targets, trials=1, seed=args.seed)
    sys.stdout.write(serialize_circuit(random_circuit(p, args.trial)))
    return 0


def cmd_synth(args) -> int:
    circuit = parse_circuit(_read(args.circuit))
    start = time.perf_counter()
    if args.algo == "bounded":
        field = synth_bounded(circuit, heuristic=not args.no_heuristic)
    else:
        field = synth_unbounded(circuit)
    elapsed = time.perf_counter() - start
    sys.stdout.write(serialize_field(field))
    _err(f"{args.algo}: {field.rows} x {field.cols} = {area(field)} cells ({elapsed:.3f}s)")
    return 0


def cmd_verify(args) -> int:
    if args.circuit == "-" and args.field == "-":
        raise UsageError("only one of the inputs can be read from stdin")
    circuit = parse_circuit(_read(args.circuit))
    field = parse_field(_read(args.field))
    problems = validate(field)
    if problems:
        for v in problems[:20]:
            _err(f"invalid: {v}")
        if len(problems) > 20:
            _err(f"... {len(problems) - 20} more")
        return 1
    try:
        got = extract(field, circuit.qubit_count)
    except ExtractionError as exc:
        _err(f"extraction failed: {exc}")
        return 1
    except ValueError as exc:
        _err(f"extracted gates do not fit the circuit: {exc}")
        return 1
    if not equivalent(got, circuit):
        _err("field is valid but not equivalent to the circuit")
        return 1
    print(f"ok: {len(got)} gates, {field.rows} x {field.cols} = {area(field)} cells")
    return 0


def _grid(args) -> list[tuple[int, int, int]]:
    if args.preset == "desk":
        return list(DESK_GRID)
    if args.preset == "full":
        return sorted(REFERENCE_TABLE)
    if args.qubits is None or args.gates is None or args.max_targets is None:
        raise UsageError("bench needs --qubits, --gates and --max-targets (or --preset)")
    return [(args.qubits, g, mt) for g in args.gates for mt in args.max_targets]


def _comparison(reports) -> str:
    lines = ["", "reference comparison (bounded area ratio, Red ratio):"]
    for r in reports:
        ref = r.reference()
        p = r.params
        if ref is None:
            continue
        lines.append(
            f"  Q={p.qubits} G={p.gates} MT={p.max_targets}: "
            f"{r.mean('bounded_area') / ref[4]:.2f}  {r.red / ref[5]:.2f}"
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    params = [BenchParams(q, g, mt, trials=args.trials, seed=args.seed) for q, g, mt in _grid(args)]
    reports = []
    for p in params:
        start = time.perf_counter()
        try:
            reports.append(run_bench(p, workers=args.workers, heuristic=not args.no_heuristic))
        except BenchError as exc:
            _err(str(exc))
            return 1
        _err(f"Q={p.qubits} G={p.gates} MT={p.max_targets}: {p.trials} trials "
             f"in {time.perf_counter() - start:.1f}s")
    sys.stdout.write(format_table(reports))
    if args.compare:
        sys.stdout.write(_comparison(reports))
    if args.json:
        text = format_json(reports)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text)
    return 0


def cmd_render(args) -> int:
    field = parse_field(_read(args.field))
    if args.format == "ascii":
        sys.stdout.write(render_ascii(field))
    elif args.format == "svg":
        sys.stdout.write(render_svg(field))
    else:
        geometry = field_to_geometry(field, args.pitch)
        sys.stdout.write(render_geometry(geometry))
        est = estimate_resources(field, args.pitch, args.depth)
        x, y, z = est.extent
        _err(f"lattice {x} x {y} x {z} = {est.unit_cell_count} unit cells, "
             f"at most {est.physical_qubit_count} physical qubits")
    return 0


def cmd_verify_junctions(args) -> int:
    status = 0
    for result in run_suite(args.random, args.seed):
        mark = "ok" if result.passed else "FAIL"
        print(f"{result.name}: {mark} ({result.checked} inputs, both outcomes); "
              f"corrections {format_correction(result.corrections)}")
        if not result.passed:
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoloom",
        description="Compile CNOT circuits into fields of topological primitives.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="print a random circuit netlist")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--gates", type=int, required=True)
    p.add_argument("--max-targets", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("synth", help="synthesize a field from a netlist")
    p.add_argument("--algo", choices=("bounded", "unbounded"), required=True)
    p.add_argument("--no-heuristic", action="store_true",
                   help="bounded only: always use the full three-column weave")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check that a field implements a circuit")
    p.add_argument("circuit")
    p.add_argument("field")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="random-circuit area benchmark")
    p.add_argument("--qubits", type=int)
    p.add_argument("--gates", type=int, nargs="+")
    p.add_argument("--max-targets", type=int, nargs="+")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-heuristic", action="store_true")
    p.add_argument("--preset", choices=("desk", "full"),
                   help="desk: 10 qubits up to 1000 gates; full: every reference row (slow)")
    p.add_argument("--compare", action="store_true", help="append ratios to reference values")
    p.add_argument("--json", metavar="PATH", help="also write per-row records as JSON ('-' for stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="draw a field")
    p.add_argument("--format", choices=("ascii", "svg", "geometry"), default="ascii")
    p.add_argument("--pitch", type=int, default=2, help="unit cells per field cell")
    p.add_argument("--depth", type=int, default=1, help="field layers, for the resource estimate")
    p.add_argument("field")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify-junctions", help="state-vector check of the junction identities")
    p.add_argument("--random", type=int, default=100, help="random input states per identity")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_junctions)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GeometryError, ValueError) as exc:
        _err(f"{parser.prog} {args.command}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
