"""Command line entry point: ``crpcf {analytic,simulate,sweep,optimize-x}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .analytic import crpcf_throughput, optimal_payload, pcf_throughput
from .harness.config import ConfigError, load_config
from .harness.output import emit_csv, emit_plot_script
from .harness.sweep import FIGURE_VARIABLE, SweepSpec, preset_sweep, run_sweep
from .sim import Protocol, SimConfig, simulate

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("crpcf")


def _base_config(args):
    """SimConfig (and SweepSpec if the file has one) after CLI overrides."""
    try:
        loaded = load_config(args.config) if args.config else SimConfig()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
    sweep = loaded if isinstance(loaded, SweepSpec) else None
    config = sweep.base if sweep else loaded
    if args.seed is not None:
        try:
            config = dataclasses.replace(config, seed=args.seed)
        except ValueError as exc:
            raise ConfigError(f"--seed: {exc}", ["seed"]) from exc
    if getattr(args, "protocol", None):
        config = dataclasses.replace(config, protocol=Protocol(args.protocol))
    return config, sweep


def _print_fields(obj, skip=()):
    for f in dataclasses.fields(obj):
        if f.name in skip:
            continue
        value = getattr(obj, f.name)
        if value is None:
            continue
        print(f"{f.name}: {value:.10g}" if isinstance(value, float) else f"{f.name}: {value}")


def cmd_analytic(args):
    config, _ = _base_config(args)
    if config.protocol is Protocol.PCF:
        report = pcf_throughput(config.params)
    else:
        report = crpcf_throughput(config.params, config.pu)
    print(f"protocol: {config.protocol.value}")
    _print_fields(report)


def cmd_simulate(args):
    config, _ = _base_config(args)
    report = simulate(config)
    print(f"protocol: {config.protocol.value}")
    print(f"seed: {config.seed}")
    _print_fields(report, skip=("fairness_spread", "trace"))
    print(f"max_fairness_spread: {max(report.fairness_spread, default=0)}")


def cmd_sweep(args):
    config, sweep = _base_config(args)
    if args.figure is not None:
        num_seeds = args.seeds or (sweep.num_seeds if sweep else 20)
        spec = preset_sweep(args.figure, config, num_seeds)
    elif sweep is not None:
        spec = dataclasses.replace(sweep, base=config, num_seeds=args.seeds or sweep.num_seeds)
    else:
        raise ConfigError("sweep needs --figure or a config file with a sweep block",
                          ["sweep_variable"])

    table = run_sweep(spec, n_jobs=args.jobs)
    out = Path(args.out or f"sweep_{spec.variable}.csv")
    emit_csv(table, out)
    print(f"wrote {out}")
    figure = args.figure or {v: k for k, v in FIGURE_VARIABLE.items()}[spec.variable]
    script = emit_plot_script(table, figure, out.with_name(out.stem + "_plot.py"))
    print(f"wrote {script}")
    failed = [r for r in table.rows if r.error]
    for row in failed:
        print(f"point {spec.variable}={row.sweep_value} failed: {row.error}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_optimize_x(args):
    config, _ = _base_config(args)
    best = optimal_payload(config.params, config.pu, tuple(args.x_range))
    print(f"optimal_payload_bytes: {best.payload_len}")
    print(f"throughput: {best.throughput:.10g}")
    print(f"at_boundary: {str(best.at_boundary).lower()}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crpcf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file (defaults: reference operating point)")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="closed-form throughput for one configuration")
    p.add_argument("--protocol", choices=["pcf", "crpcf"])
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", parents=[common], help="one simulation run")
    p.add_argument("--protocol", choices=["pcf", "crpcf"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep, writes CSV and a plot script")
    p.add_argument("--figure", type=int, choices=sorted(FIGURE_VARIABLE))
    p.add_argument("--seeds", type=int, help="replications per sweep point")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (joblib n_jobs)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-x", parents=[common], help="payload length maximizing CR-PCF throughput")
    p.add_argument("--x-range", type=int, nargs=2, default=[64, 65536], metavar=("MIN", "MAX"))
    p.set_defaults(func=cmd_optimize_x)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
            raise ConfigError(f"--seed: {exc}", ["seed"]) from exc
    if getattr(args, "protocol", None):
        config = dataclasses.replace(config, protocol=Protocol(args.protocol))
    return config, sweep


def _print_fields(obj, skip=()):
    for f in dataclasses.fields(obj):
        if f.name in skip:
            continue
        value = getattr(obj, f.name)
        if value is None:
            continue
        print(f"{f.name}: {value:.10g}" if isinstance(value, float) else f"{f.name}: {value}")


def cmd_analytic(args):
    config, _ = _base_config(args)
    if config.protocol is Protocol.PCF:
        report = pcf_throughput(config.params)
    else:
        report = crpcf_throughput(config.params, config.pu)
    print(f"protocol: {config.protocol.value}")
    _print_fields(report)


def cmd_simulate(args):
    config, _ = _base_config(args)
    report = simulate(config)
    print(f"protocol: {config.protocol.value}")
    print(f"seed: {config.seed}")
    _print_fields(report, skip=("fairness_spread", "trace"))
    print(f"max_fairness_spread: {max(report.fairness_spread, default=0)}")


def cmd_sweep(args):
    config, sweep = _base_config(args)
    if args.figure is not None:
        num_seeds = args.seeds or (sweep.num_seeds if sweep else 20)
        spec = preset_sweep(args.figure, config, num_seeds)
    elif sweep is not None:
        spec = dataclasses.replace(sweep, base=config, num_seeds=args.seeds or sweep.num_seeds)
    else:
        raise ConfigError("sweep needs --figure or a config file with a sweep block",
                          ["sweep_variable"])

    table = run_sweep(spec, n_jobs=args.jobs)
    out = Path(args.out or f"sweep_{spec.variable}.csv")
    emit_csv(table, out)
    print(f"wrote {out}")
    figure = args.figure or {v: k for k, v in FIGURE_VARIABLE.items()}[spec.variable]
    script = emit_plot_script(table, figure, out.with_name(out.stem + "_plot.py"))
    print(f"wrote {script}")
    failed = [r for r in table.rows if r.error]
    for row in failed:
        print(f"point {spec.variable}={row.sweep_value} failed: {row.error}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_optimize_x(args):
    config, _ = _base_config(args)
    best = optimal_payload(config.params, config.pu, tuple(args.x_range))
    print(f"optimal_payload_bytes: {best.payload_len}")
    print(f"throughput: {best.throughput:.10g}")
    print(f"at_boundary: {str(best.at_boundary).lower()}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crpcf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file (defaults: reference operating point)")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="closed-form throughput for one configuration")
    p.add_argument("--protocol", choices=["pcf", "crpcf"])
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", parents=[common], help="one simulation run")
    p.add_argument("--protocol", choices=["pcf", "crpcf"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep, writes CSV and a plot script")
    p.add_argument("--figure", type=int, choices=sorted(FIGURE_VARIABLE))
    p.add_argument("--seeds", type=int, help="replications per sweep point")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (joblib n_jobs)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-x", parents=[common], help="payload length maximizing CR-PCF throughput")
    p.add_argument("--x-range", type=int, nargs=2, default=[64, 65536], metavar=("MIN", "MAX"))
    p.set_defaults(func=cmd_optimize_x)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or EXIT_OK
    except (ConfigError, OSError) as exc:
        if isinstance(exc, OSError) and args.command == "sweep" and not _is_config_path(exc, args):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
