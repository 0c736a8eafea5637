"""Command-line interface.

One subcommand per scenario; every run takes a YAML config and writes a
CSV. Exit codes: 0 on success, 1 when a run completes but a verification
or convergence check failed, 2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .reporting import plot_data_path, write_csv
from .scenarios import RUNNERS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eberhard",
        description=(
            "Bell-test parameter optimization: objective sweeps, count-level "
            "modeling, angle-fluctuation robustness, and spectral verification."
        ),
    )
    sub = parser.add_subparsers(dest="scenario", metavar="scenario")
    sub.required = True

    descriptions = {
        "sweep-eta": "optimal parameters across equal detector efficiencies",
        "sweep-eta-pair": "optimal parameters across unequal efficiency pairs",
        "vienna": "count-level objective at configured, optimized, and swapped detectors",
        "fluctuation": "designs compared under polarizer-angle fluctuations",
        "verify-eigen": "spectral optimality check of optimized states",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc, description=desc)
        p.add_argument("--config", required=True, help="YAML configuration file")
        p.add_argument("--out", default=None, help="output CSV path (default <scenario>.csv)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--precision", type=int, default=None,
            help="significant digits in the CSV (default from config, else 6)",
        )
        if name == "fluctuation":
            p.add_argument(
                "--quad-order", type=int, default=None,
                help="override the quadrature order",
            )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    overrides = {"seed": args.seed, "precision": args.precision}
    if getattr(args, "quad_order", None) is not None:
        overrides["quad_order"] = args.quad_order

    try:
        cfg = load_config(args.config, args.scenario, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outcome = RUNNERS[args.scenario](cfg)

    out_path = args.out if args.out is not None else f"{args.scenario}.csv"
    write_csv(outcome.table, out_path, cfg.output.precision)
    written = [out_path]
    if outcome.plot_data is not None:
        pd_path = plot_data_path(out_path)
        write_csv(outcome.plot_data, pd_path, cfg.output.precision)
        written.append(pd_path)

    print(f"{args.scenario}: {len(outcome.table.rows)} rows -> {', '.join(written)}")
    if outcome.failures:
        for failure in outcome.failures:
            print(f"check failed: {failure}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
