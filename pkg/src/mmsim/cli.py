"""Command-line interface: validate models, run them, and run the bone study.

Exit codes are uniform across subcommands: 0 success, 1 domain or model
error (syntax, lint findings, bad parameters, engine failures), 2 I/O
error.  Traces go to files as JSON Lines; the ``bone`` subcommand prints a
density-per-cycle CSV on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .bone import BoneParams, build_bone_model, density_series
from .coupling import FIRST_CYCLE_EXTRA_STEPS, carrier_cycle_length
from .engine import EngineError, EngineOptions, label_totals, run
from .parser import ParseError, lint, parse_model, serialize_model
from .tracefile import dump_trace, model_hash

__all__ = ["RunConfig", "cmd_validate", "cmd_run", "cmd_bone", "main"]

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_IO = 2


@dataclass(frozen=True)
class RunConfig:
    model_path: str
    seed: int = 0
    max_steps: int = 10_000
    trace_path: str | None = None
    snapshot_every: int = 1
    self_check: bool = True

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise ValueError("max-steps must be >= 0")
        if self.snapshot_every < 1:
            raise ValueError("snapshot-every must be >= 1")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must be an unsigned 64-bit integer")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; here 2 means I/O, so
    # remap usage problems to the domain-error status.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_MODEL)


def _read(path: str) -> bytes:
    with open(path, "rb") as fp:
        return fp.read()


def cmd_validate(path: str) -> int:
    """Parse and lint a model file; silent and 0 when clean."""
    try:
        data = _read(path)
    except OSError as exc:
        print(f"{path}: error: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        model = parse_model(data)
    except ParseError as exc:
        print(f"{path}:{exc.line}:{exc.column}: error: {exc.message}", file=sys.stderr)
        return EXIT_MODEL
    warnings = lint(model)
    for warning in warnings:
        print(f"{path}: warning: {warning}", file=sys.stderr)
    return EXIT_MODEL if warnings else EXIT_OK


def _write_trace_file(trace, model, path: str, snapshot_every: int) -> int:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(dump_trace(trace, model_hash(model), snapshot_every))
    except OSError as exc:
        print(f"{path}: error: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _state_summary(state: dict[str, dict[str, int]]) -> str:
    return json.dumps(state, sort_keys=True, separators=(",", ":"))


def cmd_run(config: RunConfig) -> int:
    """Run a model file and print a one-line summary."""
    try:
        data = _read(config.model_path)
    except OSError as exc:
        print(f"{config.model_path}: error: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        model = parse_model(data)
    except ParseError as exc:
        print(f"{config.model_path}:{exc.line}:{exc.column}: error: {exc.message}",
              file=sys.stderr)
        return EXIT_MODEL
    options = EngineOptions(seed=config.seed, self_check=config.self_check)
    try:
        trace = run(model, options, config.max_steps)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    if config.trace_path is not None:
        status = _write_trace_file(trace, model, config.trace_path, config.snapshot_every)
        if status != EXIT_OK:
            return status
    final_state = trace.steps[-1].state if trace.steps else label_totals(trace.final)
    print(f"steps={len(trace.steps)} halted={'true' if trace.halted else 'false'} "
          f"state={_state_summary(final_state)}")
    return EXIT_OK


def cmd_bone(params: BoneParams, seed: int = 0, emit_model: str | None = None,
             trace_path: str | None = None) -> int:
    """Build the bone model, run it to halt, print the density CSV."""
    model = build_bone_model(params)
    if emit_model is not None:
        try:
            with open(emit_model, "w", encoding="utf-8", newline="\n") as fp:
                fp.write(serialize_model(model))
        except OSError as exc:
            print(f"{emit_model}: error: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_IO
    # Enough steps for every cycle plus lead-in and the final settling tail.
    bound = FIRST_CYCLE_EXTRA_STEPS + carrier_cycle_length() * params.cycles + 16
    try:
        trace = run(model, EngineOptions(seed=seed), max_steps=bound)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    if trace_path is not None:
        status = _write_trace_file(trace, model, trace_path, 1)
        if status != EXIT_OK:
            return status
    print("unit,cycle,density")
    for unit in range(1, params.units + 1):
        for cycle, density in density_series(trace, unit, params.capacity):
            print(f"{unit},{cycle},{density}")
    return EXIT_OK


def _build_argparser() -> _Parser:
    parser = _Parser(prog="mmsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="parse and lint a model file")
    p_val.add_argument("file")

    p_run = sub.add_parser("run", help="run a model file")
    p_run.add_argument("file")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--max-steps", type=int, default=10_000)
    p_run.add_argument("--trace", metavar="FILE")
    p_run.add_argument("--snapshot-every", type=int, default=1)
    p_run.add_argument("--no-self-check", action="store_true")

    p_bone = sub.add_parser("bone", help="run the bone remodelling study")
    p_bone.add_argument("--units", type=int, default=1)
    p_bone.add_argument("--density", type=float, default=0.5)
    p_bone.add_argument("--capacity", type=int, default=20)
    p_bone.add_argument("--oc", type=int, default=0)
    p_bone.add_argument("--ob", type=int, default=0)
    p_bone.add_argument("--cycles", type=int, default=1)
    p_bone.add_argument("--seed", type=int, default=0)
    p_bone.add_argument("--emit-model", metavar="FILE")
    p_bone.add_argument("--trace", metavar="FILE")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_argparser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.file)
        if args.command == "run":
            config = RunConfig(args.file, seed=args.seed, max_steps=args.max_steps,
                               trace_path=args.trace, snapshot_every=args.snapshot_every,
                               self_check=not args.no_self_check)
            return cmd_run(config)
        config = BoneParams(capacity=args.capacity, density=args.density, oc=args.oc,
                            ob=args.ob, cycles=args.cycles, units=args.units)
        return cmd_bone(config, seed=args.seed, emit_model=args.emit_model,
                        trace_path=args.trace)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    raise SystemExit(main())
