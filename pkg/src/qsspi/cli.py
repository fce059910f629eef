"""Command line entry point: ``qsspi run | presets | dump | analyze``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .scenario import (
    ConfigError,
    PRESETS,
    execute,
    list_presets,
    load_scenario,
    preset_dict,
    run_report_lines,
    write_outputs,
)
from .security import analyze
from .tallyio import read_tallies, write_tallies

EPILOG = """
Examples:
  qsspi presets
  qsspi run --preset partial-F8-1000 --out out/f8
  qsspi run --config scenario.json --mode stochastic --seed 7
  qsspi dump --preset no-attack --out tallies.txt
  qsspi analyze out/f8/tallies.txt
"""


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario file")
    p.add_argument("--preset", help="start from a named preset")
    p.add_argument("--mode", choices=("analytic", "stochastic"))
    p.add_argument("--seed", type=int)
    p.add_argument("--repetitions", type=int)


def _scenario(args, **extra):
    return load_scenario(
        args.config,
        args.preset,
        mode=args.mode,
        seed=args.seed,
        repetitions=args.repetitions,
        **extra,
    )


def _cmd_run(args) -> int:
    config = _scenario(args, output_dir=str(args.out) if args.out else None)
    result = execute(config)
    write_outputs(result, png=args.png)
    sys.stdout.write(result.report)
    return 0


def _cmd_presets(args) -> int:
    if args.show:
        print(json.dumps(preset_dict(args.show), indent=2, sort_keys=True))
        return 0
    for name in list_presets():
        attack = PRESETS[name]["attack"]
        print(f"{name}\tscene={PRESETS[name]['scene']}\tattack={attack['variant']}")
    return 0


def _cmd_dump(args) -> int:
    config = _scenario(args)
    if args.repetition >= config.repetitions:
        raise ConfigError("repetition", f"must be < repetitions ({config.repetitions})")
    result = execute(config)
    write_tallies(args.out, result.tallies[args.repetition])
    return 0


def _cmd_analyze(args) -> int:
    tallies = read_tallies(args.tallies)
    for line in run_report_lines(analyze(tallies)):
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsspi",
        description="Quantum-secured single-pixel imaging simulator and security analysis.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="simulate, reconstruct, analyze; write images and report")
    _add_scenario_args(p)
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--png", action="store_true", help="also write PNG copies of the images")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("presets", help="list built-in scenarios")
    p.add_argument("--show", metavar="NAME", help="print the JSON config of one preset")
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("dump", help="write the per-shot tally file of one repetition")
    _add_scenario_args(p)
    p.add_argument("--out", type=Path, required=True, help="tally file to write")
    p.add_argument("--repetition", type=int, default=0)
    p.set_defaults(func=_cmd_dump)

    p = sub.add_parser("analyze", help="recompute the security report from a tally file")
    p.add_argument("tallies", type=Path)
    p.set_defaults(func=_cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qsspi: invalid config: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"qsspi: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
