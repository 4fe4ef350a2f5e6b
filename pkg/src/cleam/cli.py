"""Command-line interface.

Subcommands::

    cleam estimate --config cfg.json [--out DIR] [--seed N] [--confidence C]
    cleam simulate --config cfg.json [--out DIR] [--seed N] [--confidence C]
    cleam validate --config cfg.json [--out DIR] [--seed N]
    cleam report   --input report.json [--out DIR]

Each run writes a canonical JSON report plus CSV tables into the output
directory (``--out``, else ``$CLEAM_OUTPUT_DIR``, else ``./cleam-reports``)
and prints the seed it used.  Exit codes: 0 success, 2 configuration error,
3 data error, 4 numeric or degenerate-input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import reporting
from .config import RunConfig, load_run_config
from .estimators import bbse_estimate, multiclass_estimate
from .exceptions import CleamError, ConfigError, DataError, InvalidInputError
from .ingest import BatchTable, ingest_labels
from .metrics import format_percent, interval_error, point_error
from .model import phat_distribution
from .simulator import evaluate_estimator, run_grid, simulate_phat_series, substream
from .types import ClassDistribution, EstimateReport, PhatSeries, PointEstimate
from .validation import compare_sample_vs_model, ks_test, qq_points, variance_oracle

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_HINTS = {
    "DegenerateClassifierError": (
        "use a classifier whose per-class accuracies do not sum to 1, or fall back to the baseline estimator"
    ),
    "SingularChannelError": "the confusion matrix must be invertible; re-measure it on more validation data",
    "InsufficientSamplesError": "provide at least two batches (five for the KS test)",
}


def _default_output_dir() -> Path:
    return Path(os.environ.get("CLEAM_OUTPUT_DIR", "cleam-reports"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cleam",
        description="Measure generative-model class bias through an error-aware classifier correction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
        if needs_config:
            p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: $CLEAM_OUTPUT_DIR or ./cleam-reports)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_est = sub.add_parser("estimate", help="estimate class prevalence from a label file")
    add_common(p_est)
    p_est.add_argument("--confidence", type=float, default=None, help="override the config confidence level")

    p_sim = sub.add_parser("simulate", help="run pseudo-generator scenario grids")
    add_common(p_sim)
    p_sim.add_argument("--confidence", type=float, default=None, help="override the config confidence level")

    p_val = sub.add_parser("validate", help="goodness-of-fit and variance-oracle checks")
    add_common(p_val)

    p_rep = sub.add_parser("report", help="re-render a JSON report as CSV tables")
    p_rep.add_argument("--input", required=True, help="path to an existing JSON report")
    p_rep.add_argument("--out", default=None, help="output directory for the CSV tables")
    return parser


def _load_config_for(command: str, args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config)
    if config.mode != command:
        raise ConfigError(f"config mode is {config.mode!r} but the {command!r} subcommand was invoked")
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        overrides["seed"] = args.seed
    if getattr(args, "confidence", None) is not None:
        if not 0.0 < args.confidence < 1.0:
            raise ConfigError("--confidence must lie in (0, 1)")
        overrides["confidence"] = args.confidence
    return dataclasses.replace(config, **overrides) if overrides else config


def _score(report: EstimateReport, p_star: ClassDistribution | None) -> EstimateReport:
    if p_star is None:
        return report
    p0 = float(p_star.probs[0])
    return dataclasses.replace(
        report,
        point_error=point_error(p0, report.point.value),
        interval_error=interval_error(p0, report.interval) if report.interval is not None else None,
    )


def _estimate_binary(config: RunConfig, table: BatchTable) -> list[EstimateReport]:
    series = table.phat_series()
    return [
        _score(evaluate_estimator(name, series, config.channel, config.confidence), config.p_star)
        for name in config.estimators
    ]


def _estimate_multiclass(config: RunConfig, table: BatchTable) -> list[EstimateReport]:
    mean_dist = table.mean_distribution()
    reports = []
    for name in config.estimators:
        if name == "baseline":
            reports.append(
                EstimateReport(
                    estimator=name,
                    point=PointEstimate.from_value(float(mean_dist.probs[0])),
                    distribution=tuple(float(v) for v in mean_dist.probs),
                )
            )
        elif name == "multiclass":
            solved = multiclass_estimate(mean_dist, config.channel)
            reports.append(
                EstimateReport(
                    estimator=name,
                    point=solved.point(0),
                    distribution=tuple(float(v) for v in solved.distribution.probs),
                    details={"condition_number": solved.condition_number, "out_of_range": solved.out_of_range},
                )
            )
        elif name == "bbse":
            solved = bbse_estimate(mean_dist, config.channel, config.source_prior)
            reports.append(
                EstimateReport(
                    estimator=name,
                    point=solved.point(0),
                    distribution=tuple(float(v) for v in solved.distribution.probs),
                    details={"condition_number": solved.condition_number, "out_of_range": solved.out_of_range},
                )
            )
        else:
            raise InvalidInputError(f"the {name!r} estimator needs a binary attribute; this data has more classes")
    return [_score(r, config.p_star) for r in reports]


def _run_estimate(config: RunConfig) -> dict[str, Any]:
    table = ingest_labels(config.data_path, config.n_classes)
    if config.channel is not None and config.channel.n_classes != table.n_classes:
        raise ConfigError(
            f"the channel has {config.channel.n_classes} classes but the data declares {table.n_classes}"
        )
    if table.n_classes == 2:
        reports = _estimate_binary(config, table)
    else:
        reports = _estimate_multiclass(config, table)
    inputs: dict[str, Any] = {
        "data_path": str(config.data_path),
        "n_classes": table.n_classes,
        "batches": table.s,
        "batch_size": table.n,
        "channel": reporting.channel_payload(config.channel),
    }
    if config.p_star is not None:
        inputs["p_star"] = [float(v) for v in config.p_star.probs]
    return reporting.estimate_payload(reports, seed=config.seed, confidence=config.confidence, inputs=inputs)


def _run_simulate(config: RunConfig) -> dict[str, Any]:
    scenario = config.scenario
    grids = []
    for n_index, n in enumerate(scenario.n_values):
        base_seed = config.seed + n_index * len(scenario.p_star_values)
        grids.append(
            (
                n,
                run_grid(
                    config.channel,
                    scenario.p_star_values,
                    n=n,
                    s=scenario.s,
                    repetitions=scenario.repetitions,
                    seed=base_seed,
                    estimators=config.estimators,
                    confidence=config.confidence,
                ),
            )
        )
    return reporting.simulate_payload(
        grids,
        seed=config.seed,
        confidence=config.confidence,
        channel=config.channel,
        s=scenario.s,
        repetitions=scenario.repetitions,
    )


def _validate_series(config: RunConfig) -> PhatSeries:
    if config.data_path is not None:
        table = ingest_labels(config.data_path, config.n_classes)
        if table.n_classes != 2:
            raise DataError("validate mode works on binary label data")
        return table.phat_series()
    scenario = config.scenario
    return simulate_phat_series(
        config.p_star,
        config.channel,
        scenario.n_values[0],
        scenario.s,
        substream(config.seed, 0),
    )


def _run_validate(config: RunConfig) -> dict[str, Any]:
    series = _validate_series(config)
    spec = phat_distribution(config.p_star, config.channel, series.n)
    ks = ks_test(series, spec, config.significance)
    qq = qq_points(series, spec)
    comparison = compare_sample_vs_model(series, config.p_star, config.channel)
    oracle = variance_oracle(
        config.p_star, config.channel, series.n, batches=config.oracle_batches, seed=config.seed
    )
    inputs: dict[str, Any] = {
        "batches": series.s,
        "batch_size": series.n,
        "p_star": [float(v) for v in config.p_star.probs],
        "channel": reporting.channel_payload(config.channel),
        "source": "data" if config.data_path is not None else "simulation",
    }
    if config.data_path is not None:
        inputs["data_path"] = str(config.data_path)
    return reporting.validate_payload(
        seed=config.seed,
        significance=config.significance,
        inputs=inputs,
        ks=ks,
        qq=[(float(a), float(b)) for a, b in qq],
        comparison=comparison,
        oracle=oracle,
    )


def _summarize(payload: dict[str, Any]) -> None:
    mode = payload["mode"]
    if mode == "estimate":
        for entry in payload["estimates"]:
            line = f"{entry['estimator']}: point {entry['point']['value']:.4f}"
            if entry.get("interval"):
                line += f", interval [{entry['interval']['lower']:.4f}, {entry['interval']['upper']:.4f}]"
            if entry.get("point_error") is not None:
                line += f", point error {format_percent(entry['point_error'])}"
            print(line)
    elif mode == "simulate":
        for avg in payload["averages"]:
            parts = ", ".join(
                f"{name} {format_percent(value)}" for name, value in avg["point_error"].items()
            )
            print(f"n={avg['n']} average point error: {parts}")
    elif mode == "validate":
        ks = payload["ks"]
        verdict = "rejected" if ks["reject"] else "not rejected"
        print(f"KS D={ks['d_statistic']:.4f} vs critical {ks['d_critical']:.4f}: fit {verdict}")
        if "variance_oracle" in payload:
            print(f"variance oracle: closer to {payload['variance_oracle']['closer_candidate']} form")


def _emit(payload: dict[str, Any], outdir: Path) -> None:
    mode = payload["mode"]
    json_path = reporting.write_json_report(payload, outdir / f"{mode}_report.json")
    written = reporting.write_csv_tables(payload, outdir)
    print(f"seed: {payload['seed']}")
    _summarize(payload)
    print(f"wrote {json_path}")
    for path in written:
        print(f"wrote {path}")


def _dispatch(args: argparse.Namespace) -> int:
    outdir = Path(args.out) if args.out else _default_output_dir()
    if args.command == "report":
        payload = reporting.load_report(args.input)
        written = reporting.write_csv_tables(payload, outdir)
        print(f"seed: {payload.get('seed', 'unknown')}")
        for path in written:
            print(f"wrote {path}")
        return EXIT_OK
    config = _load_config_for(args.command, args)
    if args.command == "estimate":
        payload = _run_estimate(config)
    elif args.command == "simulate":
        payload = _run_simulate(config)
    else:
        payload = _run_validate(config)
    _emit(payload, outdir)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        _print_error(exc)
        return EXIT_CONFIG
    except DataError as exc:
        _print_error(exc)
        return EXIT_DATA
    except CleamError as exc:
        _print_error(exc)
        return EXIT_NUMERIC


def _print_error(exc: CleamError) -> None:
    kind = type(exc).__name__
    payload = {"error": kind, "message": str(exc)}
    if kind in _HINTS:
        payload["hint"] = _HINTS[kind]
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
