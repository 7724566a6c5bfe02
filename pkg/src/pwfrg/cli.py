"""Command-line driver.

    pwfrg idmrg --config run.cfg [--set key=value ...]
    pwfrg ed --config run.cfg
    pwfrg compare-fidelity --config run.cfg --set compare_predictor=mcculloch

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, dump_config, load_config
from .engine import CSV_FIELDS, InfiniteDMRG, StepRecord
from .errors import ConfigParse, PwfrgError
from .model import ModelSpec
from .oracle import MAX_SITES, ed_ground

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("pwfrg")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def step_row(rec: StepRecord) -> list:
    return [fmt(getattr(rec, name)) for name in CSV_FIELDS]


def summary_path(output_path) -> Path:
    p = Path(output_path)
    return p.with_name(p.name + ".summary.txt")


def write_summary(path, config: RunConfig, extra: dict):
    with open(path, "w") as fh:
        for k, v in extra.items():
            fh.write(f"{k} = {fmt(v)}\n")
        fh.write(dump_config(config))


def cmd_idmrg(config: RunConfig) -> dict:
    out = Path(config.output_path)
    last = None
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        fh.flush()
        for rec in InfiniteDMRG(config, keep_history=False).grow():
            writer.writerow(step_row(rec))
            fh.flush()
            last = rec
            log.info("2N=%d E=%.12f fid=%s it=%d", rec.two_n, rec.energy,
                     fmt(rec.fidelity_error), rec.lanczos_iterations)
    summary = {"command": "idmrg", "final_two_n": last.two_n,
               "final_energy": last.energy,
               "final_energy_per_site_est": last.energy_per_site_est}
    write_summary(summary_path(out), config, summary)
    return summary


def cmd_ed(config: RunConfig) -> dict:
    spec = ModelSpec(config.J, config.delta)
    cap = min(config.two_n_max, MAX_SITES)
    out = Path(config.output_path)
    prev = None
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("two_n", "energy", "energy_per_site_est"))
        for two_n in range(4, cap + 1, 2):
            e0, _ = ed_ground(spec, two_n)
            est = e0 / two_n if prev is None else 0.5 * (e0 - prev)
            prev = e0
            writer.writerow((two_n, fmt(e0), fmt(est)))
            fh.flush()
    summary = {"command": "ed", "final_two_n": cap, "final_energy": prev}
    write_summary(summary_path(out), config, summary)
    return summary


COMPARE_FIELDS = ("two_n", "energy_a", "fidelity_error_a", "lanczos_iterations_a",
                  "energy_b", "fidelity_error_b", "lanczos_iterations_b")


def cmd_compare(config: RunConfig) -> dict:
    leg_a = config
    leg_b = config.replace(predictor=config.compare_predictor)
    runs = []
    for leg in (leg_a, leg_b):
        runs.append(list(InfiniteDMRG(leg, keep_history=False).grow()))
    out = Path(config.output_path)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARE_FIELDS)
        for a, b in zip(*runs):
            writer.writerow((a.two_n, fmt(a.energy), fmt(a.fidelity_error),
                             a.lanczos_iterations, fmt(b.energy),
                             fmt(b.fidelity_error), b.lanczos_iterations))
    summary = {
        "command": "compare-fidelity",
        "predictor_a": leg_a.predictor,
        "predictor_b": leg_b.predictor,
        "total_iterations_a": sum(r.lanczos_iterations for r in runs[0]),
        "total_iterations_b": sum(r.lanczos_iterations for r in runs[1]),
    }
    write_summary(summary_path(out), config, summary)
    return summary


COMMANDS = {"idmrg": cmd_idmrg, "ed": cmd_ed, "compare-fidelity": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwfrg",
        description="Infinite-system DMRG for the dimerized Heisenberg chain.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        dest="overrides", help="override a configuration key")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config, args.overrides)
    except ConfigParse as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = COMMANDS[args.command](config)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PwfrgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for k, v in summary.items():
        print(f"{k} = {fmt(v)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
