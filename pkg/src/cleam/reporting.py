"""Canonical JSON reports and the CSV tables derived from them.

Every run emits one JSON document (the canonical record, validating against
the versioned schema shipped in ``cleam/schemas/``) and, on request, CSV
tables laid out for eyeballing and diffing.  The seed that produced a run is
recorded in every report.
"""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from .exceptions import DataError
from .simulator import GridResult, ScenarioResult
from .types import AccuracyProfile, ConfusionMatrix, EstimateReport
from .validation import KsResult, StatComparison, VarianceOracleResult

REPORT_VERSION = 1
SCHEMA_FILENAME = "report-v1.schema.json"


def schema_path() -> Path:
    """Filesystem path of the shipped report schema."""
    return Path(str(resources.files("cleam").joinpath("schemas", SCHEMA_FILENAME)))


def load_schema() -> dict[str, Any]:
    with schema_path().open(encoding="utf-8") as handle:
        return json.load(handle)


def channel_payload(channel: AccuracyProfile | ConfusionMatrix | None) -> dict[str, Any] | None:
    if channel is None:
        return None
    if isinstance(channel, AccuracyProfile):
        return {"alpha": [float(v) for v in channel.alpha]}
    return {"confusion": [[float(v) for v in row] for row in channel.entries]}


def estimate_payload(
    reports: Sequence[EstimateReport],
    *,
    seed: int,
    confidence: float,
    inputs: dict[str, Any],
) -> dict[str, Any]:
    return {
        "report_version": REPORT_VERSION,
        "mode": "estimate",
        "seed": int(seed),
        "confidence": float(confidence),
        "inputs": inputs,
        "estimates": [report.to_dict() for report in reports],
    }


def _repetition_payload(result: ScenarioResult) -> list[dict[str, Any]]:
    reps = []
    for rep in result.repetitions:
        reps.append(
            {
                "index": rep.index,
                "reports": [rep.reports[name].to_dict() for name in result.estimators if name in rep.reports],
                "failures": dict(rep.failures),
            }
        )
    return reps


def simulate_payload(
    grids: Sequence[tuple[int, GridResult]],
    *,
    seed: int,
    confidence: float,
    channel: AccuracyProfile | ConfusionMatrix,
    s: int,
    repetitions: int,
) -> dict[str, Any]:
    """Serialize grid results, one entry per batch size n."""
    cells = []
    averages = []
    for n, grid in grids:
        for result in grid.results:
            cells.append(
                {
                    "p_star_0": float(result.config.p_star.probs[0]),
                    "n": result.config.n,
                    "seed": result.config.seed,
                    "mean_point_error": dict(result.mean_point_error),
                    "mean_interval_error": dict(result.mean_interval_error),
                    "repetitions": _repetition_payload(result),
                }
            )
        averages.append(
            {
                "n": int(n),
                "point_error": dict(grid.average_point_error),
                "interval_error": dict(grid.average_interval_error),
            }
        )
    return {
        "report_version": REPORT_VERSION,
        "mode": "simulate",
        "seed": int(seed),
        "confidence": float(confidence),
        "channel": channel_payload(channel),
        "grid": {"s": int(s), "repetitions": int(repetitions)},
        "cells": cells,
        "averages": averages,
    }


def validate_payload(
    *,
    seed: int,
    significance: float,
    inputs: dict[str, Any],
    ks: KsResult,
    qq: Iterable[tuple[float, float]],
    comparison: StatComparison | None = None,
    oracle: VarianceOracleResult | None = None,
) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "report_version": REPORT_VERSION,
        "mode": "validate",
        "seed": int(seed),
        "significance": float(significance),
        "inputs": inputs,
        "ks": {
            "d_statistic": ks.d_statistic,
            "d_critical": ks.d_critical,
            "reject": ks.reject,
            "significance": ks.significance,
        },
        "qq_points": [[float(a), float(b)] for a, b in qq],
    }
    if comparison is not None:
        payload["sample_vs_model"] = comparison.to_dict()
    if oracle is not None:
        payload["variance_oracle"] = oracle.to_dict()
    return payload


def write_json_report(payload: dict[str, Any], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=False)
        handle.write("\n")
    return path


def load_report(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"report file not found: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("report_version") != REPORT_VERSION:
        raise DataError(f"{path}: expected a report with report_version {REPORT_VERSION}")
    if payload.get("mode") not in ("estimate", "simulate", "validate"):
        raise DataError(f"{path}: unknown report mode {payload.get('mode')!r}")
    return payload


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _estimate_rows(payload: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    header = [
        "estimator",
        "point_value",
        "point_clamped",
        "out_of_range",
        "interval_lower",
        "interval_upper",
        "confidence",
        "point_error",
        "interval_error",
    ]
    rows = []
    for entry in payload.get("estimates", []):
        interval = entry.get("interval") or {}
        rows.append(
            [
                entry["estimator"],
                entry["point"]["value"],
                entry["point"]["clamped_value"],
                entry["point"]["out_of_range"],
                interval.get("lower", ""),
                interval.get("upper", ""),
                interval.get("confidence", ""),
                entry.get("point_error", ""),
                entry.get("interval_error", ""),
            ]
        )
    return header, rows


def _estimator_names(payload: dict[str, Any]) -> list[str]:
    names: list[str] = []
    for cell in payload.get("cells", []):
        for rep in cell.get("repetitions", []):
            for report in rep.get("reports", []):
                if report["estimator"] not in names:
                    names.append(report["estimator"])
    return names


def _scenario_tables(payload: dict[str, Any], outdir: Path) -> list[Path]:
    names = _estimator_names(payload)
    written = []

    # Aggregate table shaped like the usual estimator-comparison tables: one row
    # per (ground truth, n) cell with each estimator's mean point estimate,
    # point error, interval bounds, and interval error.
    header = ["p_star_0", "n", "seed"]
    for name in names:
        header += [f"{name}_mu", f"{name}_e_mu", f"{name}_rho_lower", f"{name}_rho_upper", f"{name}_e_rho"]
    rows = []
    for cell in payload.get("cells", []):
        row: list[Any] = [cell["p_star_0"], cell["n"], cell["seed"]]
        per_name: dict[str, dict[str, list[float]]] = {name: {} for name in names}
        for rep in cell.get("repetitions", []):
            for report in rep.get("reports", []):
                slot = per_name[report["estimator"]]
                slot.setdefault("mu", []).append(report["point"]["value"])
                if report.get("interval"):
                    slot.setdefault("lower", []).append(report["interval"]["lower"])
                    slot.setdefault("upper", []).append(report["interval"]["upper"])
        for name in names:
            slot = per_name[name]
            mean = lambda key: (sum(slot[key]) / len(slot[key])) if slot.get(key) else ""
            row += [
                mean("mu"),
                cell["mean_point_error"].get(name, ""),
                mean("lower"),
                mean("upper"),
                cell["mean_interval_error"].get(name, ""),
            ]
        rows.append(row)
    written.append(_write_csv(outdir / "scenario_table.csv", header, rows))

    rep_rows = []
    for cell in payload.get("cells", []):
        for rep in cell.get("repetitions", []):
            for report in rep.get("reports", []):
                interval = report.get("interval") or {}
                rep_rows.append(
                    [
                        cell["p_star_0"],
                        cell["n"],
                        rep["index"],
                        report["estimator"],
                        report["point"]["value"],
                        interval.get("lower", ""),
                        interval.get("upper", ""),
                        report.get("point_error", ""),
                        report.get("interval_error", ""),
                    ]
                )
    written.append(
        _write_csv(
            outdir / "repetitions.csv",
            ["p_star_0", "n", "repetition", "estimator", "point", "lower", "upper", "e_mu", "e_rho"],
            rep_rows,
        )
    )

    avg_rows = []
    for entry in payload.get("averages", []):
        for name in names:
            avg_rows.append(
                [
                    entry["n"],
                    name,
                    entry["point_error"].get(name, ""),
                    entry["interval_error"].get(name, ""),
                ]
            )
    written.append(_write_csv(outdir / "averages.csv", ["n", "estimator", "avg_e_mu", "avg_e_rho"], avg_rows))
    return written


def _validate_tables(payload: dict[str, Any], outdir: Path) -> list[Path]:
    written = []
    ks = payload["ks"]
    written.append(
        _write_csv(
            outdir / "ks.csv",
            ["d_statistic", "d_critical", "reject", "significance"],
            [[ks["d_statistic"], ks["d_critical"], ks["reject"], ks["significance"]]],
        )
    )
    written.append(
        _write_csv(
            outdir / "qq_points.csv",
            ["theoretical_quantile", "sample_quantile"],
            payload.get("qq_points", []),
        )
    )
    if "sample_vs_model" in payload:
        row = payload["sample_vs_model"]
        written.append(
            _write_csv(
                outdir / "sample_vs_model.csv",
                ["sample_mean", "sample_std", "model_mean", "model_std"],
                [[row["sample_mean"], row["sample_std"], row["model_mean"], row["model_std"]]],
            )
        )
    if "variance_oracle" in payload:
        row = payload["variance_oracle"]
        written.append(
            _write_csv(
                outdir / "variance_oracle.csv",
                ["empirical_var", "binomial_var", "positive_cross_var", "batches", "n", "closer_candidate"],
                [
                    [
                        row["empirical_var"],
                        row["binomial_var"],
                        row["positive_cross_var"],
                        row["batches"],
                        row["n"],
                        row["closer_candidate"],
                    ]
                ],
            )
        )
    return written


def write_csv_tables(payload: dict[str, Any], outdir: str | Path) -> list[Path]:
    """Render a canonical JSON report into CSV tables; returns written paths."""
    outdir = Path(outdir)
    mode = payload.get("mode")
    if mode == "estimate":
        header, rows = _estimate_rows(payload)
        return [_write_csv(outdir / "estimates.csv", header, rows)]
    if mode == "simulate":
        return _scenario_tables(payload, outdir)
    if mode == "validate":
        return _validate_tables(payload, outdir)
    raise DataError(f"cannot render tables for report mode {mode!r}")
