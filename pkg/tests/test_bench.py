import pytest

from zonalflow.bench import (
    bench_construction,
    bench_evaluation,
    loglog_slope,
    records_to_csv,
)
from zonalflow.kaula import build_mean_series
from zonalflow.poisson import expand_vi


def test_construction_records_shape(lunar):
    records = bench_construction(lunar, [3, 5, 8], repetitions=3)
    assert {r.method for r in records} == {"kaula", "brute_force"}
    assert all(r.construction_s > 0 for r in records)
    assert all(r.repetitions >= 5 for r in records)
    by_key = {(r.degree, r.method): r for r in records}
    assert len(by_key) == 6


def test_term_counts_deterministic(lunar):
    a = bench_construction(lunar, [4, 6], repetitions=2)
    b = bench_construction(lunar, [4, 6], repetitions=2)
    counts_a = [(r.degree, r.method, r.term_count) for r in a]
    counts_b = [(r.degree, r.method, r.term_count) for r in b]
    assert counts_a == counts_b


def test_kaula_term_count_formula(lunar):
    records = bench_construction(lunar, [4, 9, 12], methods=("kaula",), repetitions=2)
    for r in records:
        assert r.term_count == (r.degree - 2) // 2 + 1


def test_brute_counts_exceed_kaula(lunar):
    records = bench_construction(lunar, [4, 8, 12], repetitions=2)
    by_key = {(r.degree, r.method): r.term_count for r in records}
    for d in (4, 8, 12):
        assert by_key[(d, "brute_force")] > by_key[(d, "kaula")]


def test_evaluation_outputs_agree(lunar, rng):
    # the two representations must stay numerically interchangeable
    import math
    from zonalflow.poisson import PoissonSeries, brute_force_average
    degree = 10
    series = build_mean_series(lunar, degree)
    expanded = PoissonSeries.from_raw(
        (
            (t.coefficient_exact, t.exponents, t.k_f, t.k_w, t.selector)
            for d in range(2, degree + 1)
            for t in brute_force_average(expand_vi(lunar, d)).terms
        )
    )
    from conftest import random_geometry
    for _ in range(10):
        g = random_geometry(lunar, rng, e_max=0.8)
        w = rng.uniform(0, 2 * math.pi)
        a_val = series.evaluate(g, w)
        b_val = expanded.evaluate(g, lunar.reference_radius, w, 0.0)
        assert a_val == pytest.approx(b_val, rel=1e-12, abs=1e-300)


def test_evaluation_bench_records(lunar):
    rec_k, rec_b = bench_evaluation(lunar, degree=6, n_points=4, repetitions=2)
    assert rec_k.method == "kaula" and rec_b.method == "brute_force"
    assert rec_k.evaluation_s_per_point > 0 and rec_b.evaluation_s_per_point > 0


def test_csv_layout(lunar):
    records = bench_construction(lunar, [3], repetitions=2)
    text = records_to_csv(records)
    header, *rows = text.strip().split("\n")
    assert header.startswith("degree,method,construction_s")
    assert len(rows) == 2


def test_slope_requires_data(lunar):
    with pytest.raises(ValueError):
        loglog_slope([], "kaula")
