import csv
import json

import jsonschema
import pytest

from cleam import (
    AccuracyProfile,
    ClassDistribution,
    DataError,
    run_grid,
    simulate_phat_series,
    substream,
    evaluate_estimator,
    phat_distribution,
    ks_test,
    qq_points,
    compare_sample_vs_model,
    variance_oracle,
)
from cleam.reporting import (
    estimate_payload,
    load_report,
    load_schema,
    simulate_payload,
    validate_payload,
    write_csv_tables,
    write_json_report,
)

GENDER = AccuracyProfile([0.976, 0.979])


@pytest.fixture(scope="module")
def schema():
    return load_schema()


def make_estimate_payload():
    series = simulate_phat_series(ClassDistribution.binary(0.7), GENDER, 400, 30, substream(1, 0))
    reports = [evaluate_estimator(name, series, GENDER) for name in ("baseline", "cleam")]
    return estimate_payload(
        reports,
        seed=1,
        confidence=0.95,
        inputs={"data_path": "x.csv", "n_classes": 2, "batches": 30, "batch_size": 400},
    )


def make_simulate_payload():
    grid = run_grid(GENDER, [0.9, 0.7], n=200, s=10, repetitions=2, seed=5)
    return simulate_payload(
        [(200, grid)], seed=5, confidence=0.95, channel=GENDER, s=10, repetitions=2
    )


def make_validate_payload():
    p_star = ClassDistribution.binary(0.8)
    series = simulate_phat_series(p_star, GENDER, 400, 30, substream(2, 0))
    spec = phat_distribution(p_star, GENDER, 400)
    return validate_payload(
        seed=2,
        significance=0.05,
        inputs={"batches": 30, "batch_size": 400},
        ks=ks_test(series, spec),
        qq=[(float(a), float(b)) for a, b in qq_points(series, spec)],
        comparison=compare_sample_vs_model(series, p_star, GENDER),
        oracle=variance_oracle(p_star, GENDER, 400, batches=10_000, seed=2),
    )


@pytest.mark.parametrize("builder", [make_estimate_payload, make_simulate_payload, make_validate_payload])
def test_payloads_validate_against_shipped_schema(schema, builder):
    jsonschema.validate(builder(), schema)


def test_every_payload_records_seed():
    for builder, seed in [(make_estimate_payload, 1), (make_simulate_payload, 5), (make_validate_payload, 2)]:
        assert builder()["seed"] == seed


def test_json_round_trip(tmp_path):
    payload = make_estimate_payload()
    path = write_json_report(payload, tmp_path / "estimate_report.json")
    assert load_report(path) == payload


def test_load_report_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("not json")
    with pytest.raises(DataError):
        load_report(path)
    path.write_text(json.dumps({"report_version": 99, "mode": "estimate", "seed": 0}))
    with pytest.raises(DataError):
        load_report(path)


def test_estimate_csv_table(tmp_path):
    payload = make_estimate_payload()
    (path,) = write_csv_tables(payload, tmp_path)
    with path.open() as handle:
        rows = list(csv.DictReader(handle))
    assert [row["estimator"] for row in rows] == ["baseline", "cleam"]
    assert float(rows[1]["point_value"]) == payload["estimates"][1]["point"]["value"]


def test_simulate_csv_tables(tmp_path):
    payload = make_simulate_payload()
    paths = {p.name: p for p in write_csv_tables(payload, tmp_path)}
    assert set(paths) == {"scenario_table.csv", "repetitions.csv", "averages.csv"}
    with paths["scenario_table.csv"].open() as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 2  # one row per grid cell
    assert {row["p_star_0"] for row in rows} == {"0.9", "0.7"}
    for column in ("baseline_mu", "baseline_e_mu", "cleam_mu", "cleam_e_mu", "cleam_rho_lower"):
        assert column in rows[0]
    with paths["averages.csv"].open() as handle:
        avg_rows = list(csv.DictReader(handle))
    assert {row["estimator"] for row in avg_rows} == {"baseline", "cleam"}


def test_validate_csv_tables(tmp_path):
    payload = make_validate_payload()
    paths = {p.name for p in write_csv_tables(payload, tmp_path)}
    assert paths == {"ks.csv", "qq_points.csv", "sample_vs_model.csv", "variance_oracle.csv"}
    with (tmp_path / "qq_points.csv").open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["theoretical_quantile", "sample_quantile"]
    assert len(rows) == 31  # header + one point per batch
