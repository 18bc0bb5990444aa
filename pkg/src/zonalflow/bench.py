"""Construction/evaluation benchmarks: recursion path vs expanded path.

Reproduces the performance story at desk scale: per-degree cost of
assembling the averaged term list through the closed-form kernel versus
fully expanding and averaging the trigonometric series. Absolute times
are machine-specific; the deliverables are ordinal claims (strictly
superlinear gap in construction, faster evaluation of the compact form)
over medians of repeated runs.
"""

from __future__ import annotations

import json
import math
import platform
import time
from dataclasses import dataclass, field

import numpy as np

from .gravity import GravityField
from .kaula import OrbitGeometry, _degree_terms, build_mean_series
from .poisson import PoissonSeries, brute_force_average, expand_vi

__all__ = ["BenchRecord", "bench_construction", "bench_evaluation", "records_to_csv"]

_CSV_HEADER = (
    "degree,method,construction_s,evaluation_s_per_point,term_count,repetitions,environment"
)


def _environment() -> str:
    return f"python-{platform.python_version()}-{platform.machine()}"


@dataclass(frozen=True)
class BenchRecord:
    degree: int
    method: str  # "kaula" | "brute_force"
    construction_s: float
    evaluation_s_per_point: float
    term_count: int
    repetitions: int
    environment: str = field(default_factory=_environment)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "method": self.method,
            "construction_s": self.construction_s,
            "evaluation_s_per_point": self.evaluation_s_per_point,
            "term_count": self.term_count,
            "repetitions": self.repetitions,
            "environment": self.environment,
        }

    def to_csv_row(self) -> str:
        return (
            f"{self.degree},{self.method},{self.construction_s!r},"
            f"{self.evaluation_s_per_point!r},{self.term_count},"
            f"{self.repetitions},{self.environment}"
        )


def records_to_csv(records) -> str:
    return "\n".join([_CSV_HEADER] + [r.to_csv_row() for r in records]) + "\n"


def _median_time(fn, min_repetitions: int) -> tuple[float, int]:
    """Median wall time of fn over >= min_repetitions runs.

    The repetition count is raised automatically until the accumulated
    time comfortably exceeds the timer resolution.
    """
    reps = max(5, min_repetitions)
    while True:
        times = []
        for _ in range(reps):
            t0 = time.perf_counter_ns()
            fn()
            times.append((time.perf_counter_ns() - t0) * 1e-9)
        total = sum(times)
        if total > 2e-3 or reps >= 2000:
            return float(np.median(times)), reps
        reps = min(2000, reps * 4)


def bench_construction(
    field: GravityField,
    degrees,
    methods=("kaula", "brute_force"),
    repetitions: int = 5,
) -> list[BenchRecord]:
    """Per-degree construction cost of each method (caches bypassed).

    The recursion path builds the structured term list for the single
    degree; the expanded path runs the full linearization plus the
    f-free selection for that degree.
    """
    degrees = sorted(int(d) for d in degrees)
    records = []
    for d in degrees:
        if not 2 <= d <= field.n_max:
            raise ValueError(f"degree {d} outside 2..{field.n_max}")
        if "kaula" in methods:
            t, reps = _median_time(lambda: _degree_terms(field, d), repetitions)
            records.append(
                BenchRecord(
                    degree=d,
                    method="kaula",
                    construction_s=t,
                    evaluation_s_per_point=0.0,
                    term_count=len(_degree_terms(field, d)),
                    repetitions=reps,
                )
            )
        if "brute_force" in methods:
            t, reps = _median_time(
                lambda: brute_force_average(expand_vi(field, d)), repetitions
            )
            records.append(
                BenchRecord(
                    degree=d,
                    method="brute_force",
                    construction_s=t,
                    evaluation_s_per_point=0.0,
                    term_count=len(expand_vi(field, d)),
                    repetitions=reps,
                )
            )
    return records


def bench_evaluation(
    field: GravityField,
    degree: int,
    n_points: int = 64,
    repetitions: int = 5,
    seed: int = 2024,
) -> tuple[BenchRecord, BenchRecord]:
    """Averaged-Hamiltonian evaluation cost over random states, both paths.

    Returns (kaula record, brute-force record); the numeric outputs of
    the two representations agree to the dual-provenance tolerance, so
    only timing differs.
    """
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(n_points):
        g = OrbitGeometry(
            a=field.reference_radius * rng.uniform(1.1, 2.5),
            e=rng.uniform(0.0, 0.6),
            inc=rng.uniform(0.1, math.pi - 0.1),
        )
        states.append((g, rng.uniform(0.0, 2.0 * math.pi)))

    series = build_mean_series(field, degree)
    def eval_kaula():
        for g, w in states:
            series.evaluate(g, w)

    expanded = PoissonSeries.from_raw(
        (
            (t.coefficient_exact, t.exponents, t.k_f, t.k_w, t.selector)
            for d in range(2, degree + 1)
            for t in brute_force_average(expand_vi(field, d)).terms
        )
    )
    def eval_brute():
        for g, w in states:
            expanded.evaluate(g, field.reference_radius, w, 0.0)

    t_k, reps_k = _median_time(eval_kaula, repetitions)
    t_b, reps_b = _median_time(eval_brute, repetitions)
    denom = max(1, n_points)
    rec_k = BenchRecord(
        degree=degree,
        method="kaula",
        construction_s=0.0,
        evaluation_s_per_point=t_k / denom,
        term_count=len(series.terms),
        repetitions=reps_k,
    )
    rec_b = BenchRecord(
        degree=degree,
        method="brute_force",
        construction_s=0.0,
        evaluation_s_per_point=t_b / denom,
        term_count=len(expanded),
        repetitions=reps_b,
    )
    return rec_k, rec_b


def loglog_slope(records, method: str) -> float:
    """Least-squares slope of log(construction time) vs log(degree)."""
    pts = [
        (r.degree, r.construction_s)
        for r in records
        if r.method == method and r.construction_s > 0
    ]
    if len(pts) < 2:
        raise ValueError(f"not enough {method} records for a slope")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])
