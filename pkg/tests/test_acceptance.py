"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they execute.
"""

import dataclasses
import time

import numpy as np

from cleam import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    DEFAULT_SCENARIO,
    IntervalEstimate,
    PhatSeries,
    ScenarioConfig,
    cleam_point,
    coverage_experiment,
    fairness_discrepancy,
    fd_to_class_prob,
    interval_error,
    ks_test,
    multiclass_estimate,
    multiclass_forward,
    phat_distribution,
    point_error,
    relative_improvement,
    run_grid,
    sample_stats,
    simulate_phat_series,
    substream,
    variance_oracle,
)

GENDER = AccuracyProfile([0.976, 0.979])
BLACKHAIR = AccuracyProfile([0.881, 0.887])
R18_GENDER = AccuracyProfile([0.947, 0.983])
CLIP = AccuracyProfile([0.998, 0.975])


def check(criterion, passed, detail):
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    assert passed, f"{criterion}: {detail}"


def constant_series(value, s=30, n=400):
    return PhatSeries(np.full(s, value), n=n)


def test_criterion_1_golden_point_estimates():
    gender_pe = cleam_point(constant_series(0.610), R18_GENDER).value
    clip_pe = cleam_point(constant_series(0.666), CLIP).value
    pe_err = point_error(0.642, 0.610)
    ie_err = interval_error(0.642, IntervalEstimate(0.602, 0.618))
    ok = (
        abs(gender_pe - 0.638) <= 1e-3
        and abs(clip_pe - 0.658) <= 1e-3
        and abs(pe_err - 0.0498) <= 1e-4
        and abs(ie_err - 0.0623) <= 1e-4
    )
    check(
        "criterion 1 (golden point estimates)",
        ok,
        f"corrected PEs {gender_pe:.4f}/{clip_pe:.4f}, errors {pe_err:.4%}/{ie_err:.4%}",
    )


def test_criterion_2_model_means():
    tabulated = [
        (GENDER, [(0.9, 0.881), (0.8, 0.785), (0.7, 0.690), (0.6, 0.594), (0.5, 0.499)]),
        (BLACKHAIR, [(0.9, 0.804), (0.8, 0.727), (0.7, 0.650), (0.6, 0.574), (0.5, 0.497)]),
    ]
    worst = 0.0
    for acc, rows in tabulated:
        for p0, expected in rows:
            mean = phat_distribution(ClassDistribution.binary(p0), acc, 400).mean
            worst = max(worst, abs(mean - expected))
    check("criterion 2 (model means, 10 rows)", worst <= 1e-3, f"worst |mean - table| = {worst:.2e}")


def test_criterion_3_variance_oracle():
    start = time.perf_counter()
    rng = substream(555, 0)
    worst_rel = 0.0
    all_closer = True
    for k in range(5):
        p0 = float(rng.uniform(0.4, 0.75))
        alpha = AccuracyProfile([float(rng.uniform(0.80, 0.92)), float(rng.uniform(0.80, 0.92))])
        n = int(rng.integers(200, 1001))
        result = variance_oracle(ClassDistribution.binary(p0), alpha, n, batches=100_000, seed=555 + k + 1)
        worst_rel = max(worst_rel, abs(result.empirical_var - result.binomial_var) / result.binomial_var)
        closer = abs(result.empirical_var - result.binomial_var) < abs(
            result.empirical_var - result.positive_cross_var
        )
        all_closer = all_closer and closer
    elapsed = time.perf_counter() - start
    ok = worst_rel < 0.05 and all_closer and elapsed < 30
    check(
        "criterion 3 (variance oracle, 5 configs)",
        ok,
        f"worst relative error {worst_rel:.3%}, binomial closer in all: {all_closer}, {elapsed:.1f}s",
    )


def test_criterion_4_pseudo_generator_grids():
    start = time.perf_counter()
    grid_values = [0.9, 0.8, 0.7, 0.6, 0.5]
    gender = run_grid(GENDER, grid_values, n=400, s=30, repetitions=5, seed=2024)
    blackhair = run_grid(BLACKHAIR, grid_values, n=400, s=30, repetitions=5, seed=2024)
    elapsed = time.perf_counter() - start
    ok = (
        abs(gender.average_point_error["baseline"] - 0.0143) <= 0.015
        and gender.average_point_error["cleam"] <= 0.01
        and abs(blackhair.average_point_error["baseline"] - 0.0623) <= 0.015
        and blackhair.average_point_error["cleam"] <= 0.01
        and elapsed < 60
    )
    check(
        "criterion 4 (pseudo-generator grids)",
        ok,
        "baseline/corrected avg errors: "
        f"gender {gender.average_point_error['baseline']:.2%}/{gender.average_point_error['cleam']:.2%}, "
        f"blackhair {blackhair.average_point_error['baseline']:.2%}/{blackhair.average_point_error['cleam']:.2%}, "
        f"{elapsed:.1f}s",
    )


def test_criterion_5_interval_coverage():
    start = time.perf_counter()
    cfg = dataclasses.replace(DEFAULT_SCENARIO, repetitions=1000, seed=12345)
    corrected = coverage_experiment(cfg, estimator="cleam")
    biased_cfg = ScenarioConfig(
        p_star=ClassDistribution.binary(0.9), channel=BLACKHAIR, n=400, s=30, repetitions=1000, seed=2024
    )
    uncorrected = coverage_experiment(biased_cfg, estimator="baseline")
    elapsed = time.perf_counter() - start
    ok = 0.92 <= corrected <= 0.98 and uncorrected < 0.10 and elapsed < 60
    check(
        "criterion 5 (interval coverage)",
        ok,
        f"corrected coverage {corrected:.3f}, uncorrected coverage under bias {uncorrected:.3f}, {elapsed:.1f}s",
    )


def test_criterion_6_goodness_of_fit():
    p_star = ClassDistribution.binary(0.642)
    spec = phat_distribution(p_star, R18_GENDER, 400)
    passes = 0
    for run in range(100):
        series = simulate_phat_series(p_star, R18_GENDER, 400, 30, substream(99, run))
        result = ks_test(series, spec, significance=0.05)
        if result.d_statistic < 0.248:
            passes += 1
    check("criterion 6 (KS goodness of fit)", passes >= 90, f"{passes}/100 runs below 0.248")


def test_criterion_7_multiclass_oracle():
    worst = 0.0
    rng = substream(777, 0)
    for k in (2, 3, 4):
        for _ in range(100):
            noise = rng.dirichlet(np.ones(k), size=k).T
            matrix = 0.7 * np.eye(k) + 0.3 * noise
            cm = ConfusionMatrix(matrix / matrix.sum(axis=0))
            p_star = ClassDistribution(rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k)
            recovered = multiclass_estimate(multiclass_forward(p_star, cm), cm)
            worst = max(worst, float(np.abs(recovered.raw - p_star.probs).max()))

    series = constant_series(0.610)
    scalar = cleam_point(series, R18_GENDER).value
    mean = ClassDistribution.binary(sample_stats(series).mean)
    matrix_form = float(multiclass_estimate(mean, ConfusionMatrix.from_accuracy(R18_GENDER)).raw[0])
    reduction_gap = abs(scalar - matrix_form)
    ok = worst <= 1e-9 and reduction_gap <= 1e-12
    check(
        "criterion 7 (multi-class oracle)",
        ok,
        f"worst round-trip {worst:.2e}, binary reduction gap {reduction_gap:.2e}",
    )


def test_criterion_8_metrics_table():
    uniform = ClassDistribution([0.5, 0.5])
    biased = ClassDistribution([0.9, 0.1])
    kl = fairness_discrepancy(uniform, biased, "KL")
    l1 = fairness_discrepancy(uniform, biased, "L1")
    l2 = fairness_discrepancy(uniform, biased, "L2")
    low, high = fd_to_class_prob(0.107)
    prev_low, prev_high = fd_to_class_prob(0.107)
    new_low, new_high = fd_to_class_prob(0.105)
    best = max(relative_improvement(prev_low, new_low), relative_improvement(prev_high, new_high))
    ok = (
        abs(kl - 0.531) <= 1e-3
        and abs(l1 - 0.8) <= 1e-3
        and abs(l2 - 0.566) <= 1e-3
        and abs(low - 0.4243) <= 1e-4
        and abs(high - 0.5757) <= 1e-4
        and abs(best - 0.0032) <= 5e-4
    )
    check(
        "criterion 8 (metrics table)",
        ok,
        f"KL {kl:.4f}, L1 {l1:.4f}, L2 {l2:.4f}, preimages ({low:.4f}, {high:.4f}), improvement {best:.4%}",
    )
