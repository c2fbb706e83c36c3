"""Command-line runner for scenario configs and builtin presets.

Exit codes: 0 when every trajectory in the batch completed, 2 when any
stopped early (the report is still written), 1 on configuration or I/O
errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ComplexTrajError, ConfigError
from .scenarios import PRESETS, load_config, preset, preset_names, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complextraj",
        description="Integrate complex quantum and classical trajectories "
        "from declarative scenario configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for artifacts")
    common.add_argument("--samples", type=int, default=None, help="override sample count")
    common.add_argument(
        "--tol", type=float, default=None,
        help="override both relative and absolute integrator tolerances",
    )
    common.add_argument(
        "--format", dest="formats", action="append", choices=["csv", "json", "svg"],
        default=None, help="output format (repeatable; default: csv json svg)",
    )

    p_run = sub.add_parser("run", parents=[common], help="run a scenario config file")
    p_run.add_argument("config_path", help="path to a JSON scenario config")

    p_preset = sub.add_parser("preset", parents=[common], help="run a builtin preset")
    p_preset.add_argument("name", help="preset name (see list-presets)")

    sub.add_parser("list-presets", help="list builtin presets")
    return parser


def _apply_overrides(cfg, args):
    if args.samples is not None:
        cfg = replace(cfg, samples=args.samples)
    if args.tol is not None:
        cfg = replace(
            cfg, integrator=replace(cfg.integrator, rel_tol=args.tol, abs_tol=args.tol)
        )
    if args.formats:
        cfg = replace(cfg, outputs=tuple(dict.fromkeys(args.formats)))
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-presets":
        for name in preset_names():
            print(f"{name:32s} {PRESETS[name].description}")
        return 0

    try:
        if args.command == "run":
            cfg = load_config(args.config_path)
        else:
            cfg = preset(args.name)
        cfg = _apply_overrides(cfg, args)
        report = run_scenario(cfg, out_dir=args.out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComplexTrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for i, kind in enumerate(report.stop_kinds):
        x0 = report.config_echo["initial_points"][i]
        print(f"trajectory {i:2d}  x0=({x0[0]:g}, {x0[1]:g})  {kind}")
    print(f"{report.name}: {len(report.artifacts)} artifacts in {args.out_dir} "
          f"({report.wall_time:.2f} s)")
    if any(kind != "completed" for kind in report.stop_kinds):
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
