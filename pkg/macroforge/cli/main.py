import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from macroforge.cli.bench import run_suite
from macroforge.planner.core.macro_engine import compute_macros
from macroforge.planner.core.state_space import ball, state_from_mapping
from macroforge.planner.domains.blocksworld import random_blocksworld
from macroforge.planner.domains.filters import FILTER_NAMES, state_filter_for
from macroforge.planner.domains.hanoi import HanoiConfig, gen_hanoi
from macroforge.planner.solver.expansion import expand_names, plan_length
from macroforge.planner.solver.solve import baseline_reach, solve_mph
from macroforge.planner.solver.validate import validate
from macroforge.planner.utils.errors import InputError, ResourceError
from macroforge.planner.utils.logging_config import configure_logging
from macroforge.planner.utils.serialization import (
    dump_instance,
    dump_macro_result,
    dump_plan,
    parse_instance,
    parse_plan,
    plan_from_document,
)
from macroforge.planner.utils.settings import DEFAULT_BALL_CAP, EngineSettings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNKNOWN = 2
EXIT_RESOURCE = 3


class ArgumentParser(argparse.ArgumentParser):
    """argparse with flag errors mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(out).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {out}")


def _settings(args: argparse.Namespace) -> EngineSettings:
    return EngineSettings(
        ball_cap=args.ball_cap,
        strict_scan=getattr(args, "strict_scan", False),
    )


def cmd_gen(args: argparse.Namespace) -> int:
    if args.domain == "blocksworld":
        instance = random_blocksworld(args.blocks, args.seed)
    else:
        instance = gen_hanoi(HanoiConfig(ndisks=args.disks, all_sources=args.all_sources))
    _write(dump_instance(instance), args.out)
    return EXIT_OK


def cmd_macros(args: argparse.Namespace) -> int:
    instance = parse_instance(_read(args.instance))
    if args.state is None:
        origin = instance.init
    else:
        try:
            mapping = json.loads(args.state)
        except json.JSONDecodeError as e:
            raise InputError(f"--state is not valid JSON: {e}", "$.state") from e
        if not isinstance(mapping, dict):
            raise InputError("--state must be a JSON object", "$.state")
        origin = state_from_mapping(instance.variables, mapping)
    settings = _settings(args)
    state_filter = state_filter_for(instance, args.filter)
    states = ball(instance, origin, args.width, state_filter, settings.ball_cap)
    result = compute_macros(states, instance.actions, settings=settings)
    _write(dump_macro_result(result, instance), args.out)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    instance = parse_instance(_read(args.instance))
    run = solve_mph if args.mode == "macro" else baseline_reach
    outcome = run(instance, args.width, state_filter_for(instance, args.filter), _settings(args))
    if not outcome.solved:
        logger.warning(f"No plan: {outcome.status}. {outcome.detail}".strip())
        _write("?\n", args.out)
        return outcome.exit_code
    _write(dump_plan(outcome.plan, instance), args.out)
    return EXIT_OK


def cmd_expand(args: argparse.Namespace) -> int:
    document = parse_plan(_read(args.plan))
    if args.count_only:
        _write(f"{plan_length(document.top, document)}\n", args.out)
        return EXIT_OK
    stream = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        for name in expand_names(document.top, document):
            stream.write(name + "\n")
    finally:
        if stream is not sys.stdout:
            stream.close()
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    if args.instance in (None, "-") and args.plan in (None, "-"):
        raise InputError("--instance and --plan cannot both come from stdin")
    instance = parse_instance(_read(args.instance))
    plan = plan_from_document(parse_plan(_read(args.plan)), instance)
    valid = validate(instance, plan, strict=args.strict)
    _write("valid\n" if valid else "invalid\n", None)
    return EXIT_OK if valid else EXIT_UNKNOWN


def cmd_bench(args: argparse.Namespace) -> int:
    return run_suite(_read(args.suite), args.out, args.jobs)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="macroforge",
        description="Macro computation and MPH-width planning over SAS+ instances",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def with_out(sub: argparse.ArgumentParser):
        sub.add_argument("--out", default=None, help="Output file (default stdout)")

    def with_engine(sub: argparse.ArgumentParser):
        sub.add_argument("--instance", default=None, help="Instance JSON ('-' or omitted: stdin)")
        sub.add_argument("--width", type=int, required=True, help="Hamming radius k")
        sub.add_argument("--filter", choices=FILTER_NAMES, default="none")
        sub.add_argument("--ball-cap", type=int, default=DEFAULT_BALL_CAP)

    gen = commands.add_parser("gen", help="Generate a benchmark instance")
    domains = gen.add_subparsers(dest="domain", required=True)
    blocks = domains.add_parser("blocksworld", help="Random consistent Blocksworld-arm instance")
    blocks.add_argument("--blocks", type=int, required=True)
    blocks.add_argument("--seed", type=int, default=0)
    with_out(blocks)
    hanoi = domains.add_parser("hanoi", help="Towers of Hanoi, all disks from p1 to p3")
    hanoi.add_argument("--disks", type=int, required=True)
    hanoi.add_argument(
        "--all-sources",
        action="store_true",
        help="Also generate moves from positions that can never hold the disk",
    )
    with_out(hanoi)
    gen.set_defaults(handler=cmd_gen)

    macros = commands.add_parser("macros", help="Compute the macro fixed point over one ball")
    with_engine(macros)
    macros.add_argument("--state", default=None, help="Ball centre as a JSON object (default init)")
    macros.add_argument("--strict-scan", action="store_true", help="Literal nested-loop rescans")
    with_out(macros)
    macros.set_defaults(handler=cmd_macros)

    solve = commands.add_parser("solve", help="Search for a succinct plan")
    with_engine(solve)
    solve.add_argument("--mode", choices=("macro", "baseline"), default="macro")
    solve.add_argument("--strict-scan", action="store_true")
    with_out(solve)
    solve.set_defaults(handler=cmd_solve)

    expand = commands.add_parser("expand", help="Stream the primitive actions of a plan")
    expand.add_argument("--plan", default=None, help="Plan JSON ('-' or omitted: stdin)")
    expand.add_argument("--count-only", action="store_true", help="Print the expanded length")
    with_out(expand)
    expand.set_defaults(handler=cmd_expand)

    check = commands.add_parser("validate", help="Replay a plan against an instance")
    check.add_argument("--instance", default=None)
    check.add_argument("--plan", default=None)
    check.add_argument("--strict", action="store_true", help="Fail on inapplicable steps")
    check.set_defaults(handler=cmd_validate)

    bench = commands.add_parser("bench", help="Run a benchmark suite into a CSV file")
    bench.add_argument("--suite", required=True, help="Suite JSON")
    bench.add_argument("--out", required=True, help="CSV file ('-' for stdout)")
    bench.add_argument("--jobs", type=int, default=1, help="Cells run in parallel")
    bench.set_defaults(handler=cmd_bench)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    for flag in ("width", "ball_cap", "jobs"):
        if getattr(args, flag, 1) < 1:
            logger.error(f"--{flag.replace('_', '-')} must be at least 1")
            return EXIT_INPUT
    try:
        return args.handler(args)
    except InputError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except ValidationError as e:
        logger.error(f"Invalid option: {e.errors()[0]['msg']}")
        return EXIT_INPUT
    except ResourceError as e:
        logger.error(str(e))
        return EXIT_RESOURCE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
