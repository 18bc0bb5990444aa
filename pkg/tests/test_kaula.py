import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_geometry
from zonalflow import oracle
from zonalflow.kaula import (
    OrbitGeometry,
    averaged_amplitude,
    averaged_vi,
    build_mean_series,
    cos_power_reduction,
    eccentricity_function,
    inclination_function,
    index_set,
    osculating_vi,
)


class TestIndexSet:
    def test_even(self):
        idx = index_set(2)
        assert idx.i_star == 0 and idx.i_pi == 0.0 and idx.i_m == 1

    def test_odd(self):
        idx = index_set(3)
        assert idx.i_star == 1
        assert idx.i_pi == pytest.approx(math.pi / 2)
        assert idx.i_m == 1 and idx.i_m_star == 2

    def test_offset(self):
        assert index_set(7, 2).i_m == 2

    def test_floor_division_negative(self):
        # j_1 at j = 0 starts at -1: integer division floors
        assert index_set(0, 1).i_m == -1


class TestInclinationFunction:
    @pytest.mark.parametrize("s", [0.0, 0.25, 0.7071, 0.894427, 1.0])
    def test_degree2_closed_forms(self, s):
        assert inclination_function(2, 0, s) == pytest.approx(-0.375 * s * s, abs=1e-16)
        assert inclination_function(2, 1, s) == pytest.approx(0.75 * s * s - 0.5, abs=1e-15)
        assert inclination_function(2, 2, s) == inclination_function(2, 0, s)

    def test_degree3(self):
        s = 0.6
        assert inclination_function(3, 2, s) == pytest.approx(
            0.75 * s - (15.0 / 16.0) * s**3, rel=1e-14
        )

    @pytest.mark.parametrize("i", [2, 3, 5, 10, 20, 35, 50])
    def test_against_fourier_oracle(self, i, rng):
        for _ in range(3):
            inc = rng.uniform(0.05, math.pi - 0.05)
            j = int(rng.integers(0, i + 1))
            direct = inclination_function(i, j, math.sin(inc))
            fitted = oracle.fourier_fit_inclination(i, j, inc)
            assert direct == pytest.approx(fitted, rel=1e-10, abs=1e-13)

    def test_high_degree_no_overflow(self):
        val = inclination_function(150, 75, 0.99)
        assert math.isfinite(val)

    def test_pointwise_legendre_reconstruction(self, rng):
        # definitional identity: sum_j F cos((i-2j)theta - i_pi) = P_i(s sin theta)
        for i in (4, 9, 17, 30):
            inc = rng.uniform(0.1, math.pi - 0.1)
            s = math.sin(inc)
            f_vals = [inclination_function(i, j, s) for j in range(i + 1)]
            i_pi = index_set(i).i_pi
            for theta in rng.uniform(0, 2 * math.pi, 4):
                recon = sum(
                    f_vals[j] * math.cos((i - 2 * j) * theta - i_pi)
                    for j in range(i + 1)
                )
                direct = oracle.legendre_p(i, s * math.sin(theta))
                assert recon == pytest.approx(direct, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            inclination_function(1, 0, 0.5)
        with pytest.raises(ValueError):
            inclination_function(4, 5, 0.5)
        with pytest.raises(ValueError):
            inclination_function(4, 2, 1.5)


class TestEccentricityFunction:
    @pytest.mark.parametrize("e", [0.0, 0.3, 0.75, 0.9])
    def test_g21_closed_form(self, e):
        eta = math.sqrt(1 - e * e)
        assert eccentricity_function(2, 1, e) == pytest.approx(eta**-3, rel=1e-14)

    def test_odd_degree_vanishes_at_circular(self):
        assert eccentricity_function(3, 1, 0.0) == 0.0

    def test_branch_consistency_at_i_equals_2j(self):
        # i = 2j sits on the branch boundary; both branch choices coincide
        for e in (0.1, 0.5):
            assert eccentricity_function(2, 1, e) == pytest.approx(
                math.sqrt(1 - e * e) ** -3, rel=1e-14
            )

    def test_empty_sum_is_zero(self):
        assert eccentricity_function(2, 0, 0.4) == 0.0
        assert eccentricity_function(2, 2, 0.4) == 0.0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            eccentricity_function(2, 1, 1.0)

    def test_against_quadrature_through_averaged_vi(self, lunar, rng):
        # G appears only through <V_i>; the averaged identity exercises it
        g = random_geometry(lunar, rng, e_max=0.85)
        w = rng.uniform(0, 2 * math.pi)
        for i in (5, 11, 24):
            av = averaged_vi(lunar, i, g, w)
            def integrand(fk, _i=i):
                r = g.p / (1 + g.e * np.cos(fk))
                return osculating_vi(lunar, _i, g, w, fk) * (g.a**2 * g.eta) / r**2
            quad = oracle.average_over_mean_anomaly(integrand, g, 2 * i)
            amp = averaged_amplitude(lunar, i, g)
            assert abs(av - quad) <= 1e-11 * max(amp, 1e-300)


class TestOsculatingVi:
    def test_v2_circular_closed_form(self, lunar, rng):
        g = OrbitGeometry(a=2500.0, e=0.0, inc=1.1)
        s2 = g.s**2
        c20 = lunar.zonal(2)
        scale = -c20 * (lunar.reference_radius / g.a) ** 2
        for f in rng.uniform(0, 2 * math.pi, 5):
            for w in rng.uniform(0, 2 * math.pi, 3):
                expected = scale * (
                    0.25 * (2 - 3 * s2) + 0.75 * s2 * math.cos(2 * f + 2 * w)
                )
                assert osculating_vi(lunar, 2, g, w, f) == pytest.approx(expected, rel=1e-13)

    def test_odd_degree_equatorial_zero(self, lunar, rng):
        g = OrbitGeometry(a=3000.0, e=0.3, inc=0.0)
        for i in (3, 5, 9):
            for f in rng.uniform(0, 2 * math.pi, 3):
                assert osculating_vi(lunar, i, g, 0.7, f) == pytest.approx(0.0, abs=1e-18)

    def test_full_potential_identity(self, lunar, rng):
        worst = 0.0
        for n_max in (5, 10, 30):
            trunc = lunar.truncated(n_max)
            for _ in range(6):
                g = random_geometry(trunc, rng, e_max=0.5)
                node, argp, f = rng.uniform(0, 2 * math.pi, 3)
                pt = oracle.keplerian_to_spherical(g, node, argp, f)
                u_direct = oracle.direct_potential(trunc, pt)
                r = g.p / (1 + g.e * math.cos(f))
                vsum = sum(
                    osculating_vi(trunc, i, g, argp, f) for i in range(2, n_max + 1)
                )
                u_el = -trunc.mu / r - (trunc.mu / g.a) * (g.a**2 * g.eta / r**2) * vsum
                worst = max(worst, abs(u_el - u_direct) / abs(u_direct))
        assert worst <= 1e-12

    def test_degree_bounds(self, lunar):
        g = OrbitGeometry(a=2500.0, e=0.1, inc=1.0)
        with pytest.raises(ValueError):
            osculating_vi(lunar, 51, g, 0.0, 0.0)


class TestAveragedVi:
    def test_degree2_is_omega_free_eq15(self, lunar, rng):
        g = random_geometry(lunar, rng, e_max=0.8)
        expected = (
            -lunar.zonal(2)
            * (lunar.reference_radius / g.p) ** 2
            * (g.eta / 4.0)
            * (2.0 - 3.0 * g.s**2)
        )
        vals = [averaged_vi(lunar, 2, g, w) for w in rng.uniform(0, 2 * math.pi, 6)]
        for v in vals:
            assert v == pytest.approx(expected, rel=1e-13)

    def test_odd_degree_vanishes_at_circular(self, lunar):
        g = OrbitGeometry(a=2500.0, e=0.0, inc=1.2)
        for i in (3, 5, 7):
            assert averaged_vi(lunar, i, g, 1.0) == 0.0

    def test_parity_under_omega_flip(self, lunar, rng):
        # flipping omega keeps even degrees, flips the sign of odd ones
        g = random_geometry(lunar, rng, e_max=0.7)
        w = rng.uniform(0, 2 * math.pi)
        for i in (4, 12):
            assert averaged_vi(lunar, i, g, -w) == pytest.approx(
                averaged_vi(lunar, i, g, w), rel=1e-12
            )
        for i in (3, 9):
            assert averaged_vi(lunar, i, g, -w) == pytest.approx(
                -averaged_vi(lunar, i, g, w), rel=1e-12, abs=1e-300
            )


class TestCosPowerReduction:
    def test_identity(self):
        assert cos_power_reduction(0, 1) == [(1, 1.0)]

    def test_product_to_sum(self):
        assert cos_power_reduction(1, 0) == [(-1, 0.5), (1, 0.5)]

    def test_weights_sum_to_one(self):
        for k in range(0, 9):
            weights = [w for _, w in cos_power_reduction(k, 3)]
            assert sum(weights) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("k,m", [(2, 2), (3, 1), (5, 4)])
    def test_pointwise_numeric_identity(self, k, m, rng):
        for f in rng.uniform(0, 2 * math.pi, 100):
            direct = math.cos(f) ** k * math.cos(m * f)
            expanded = sum(w * math.cos(mult * f) for mult, w in cos_power_reduction(k, m))
            assert expanded == pytest.approx(direct, abs=1e-14)
        # sine analogue
        for f in rng.uniform(0, 2 * math.pi, 20):
            direct = math.cos(f) ** k * math.sin(m * f)
            expanded = sum(w * math.sin(mult * f) for mult, w in cos_power_reduction(k, m))
            assert expanded == pytest.approx(direct, abs=1e-14)


class TestMeanSeries:
    def test_minimal_series(self, lunar):
        series = build_mean_series(lunar, 2)
        assert len(series.terms) == 1
        t = series.terms[0]
        assert t.degree == 2 and t.angle_multiplier == 0 and t.phase == 0.0

    def test_degree3_long_period_term(self, lunar):
        series = build_mean_series(lunar, 3)
        assert len(series.terms) == 2
        odd = series.terms[1]
        assert odd.angle_multiplier == 1
        assert odd.phase == pytest.approx(math.pi / 2)

    def test_term_count_formula(self, lunar):
        series = build_mean_series(lunar, 50)
        expected = sum((i - 2) // 2 + 1 for i in range(2, 51))
        assert expected == 625
        assert len(series.terms) == 625

    def test_evaluate_matches_averaged_sum(self, lunar, rng):
        series = build_mean_series(lunar, 20)
        for _ in range(5):
            g = random_geometry(lunar, rng, e_max=0.8)
            w = rng.uniform(0, 2 * math.pi)
            direct = sum(averaged_vi(lunar, i, g, w) for i in range(2, 21))
            assert series.evaluate(g, w) == pytest.approx(direct, rel=1e-13, abs=1e-300)

    def test_zero_degree_skipped(self, lunar):
        import dataclasses
        zonals = list(lunar.zonals)
        zonals[3] = 0.0
        f = dataclasses.replace(lunar, zonals=tuple(zonals))
        series = build_mean_series(f, 4)
        assert {t.degree for t in series.terms} == {2, 4}

    def test_json_dump_shape(self, lunar):
        payload = json.loads(build_mean_series(lunar, 5).to_json())
        assert payload["n_max"] == 5 and payload["provenance"] == "kaula"
        keys = {"degree", "j", "angle_multiplier", "phase", "prefactor"}
        assert all(set(t) == keys for t in payload["terms"])

    def test_method_and_bounds(self, lunar):
        with pytest.raises(ValueError):
            build_mean_series(lunar, 2, method="symbolic")
        with pytest.raises(ValueError):
            build_mean_series(lunar, 1)


@settings(max_examples=40, deadline=None)
@given(
    e=st.floats(min_value=0.0, max_value=0.9),
    inc=st.floats(min_value=0.05, max_value=math.pi - 0.05),
)
def test_geometry_invariants(e, inc):
    g = OrbitGeometry(a=2500.0, e=e, inc=inc)
    assert 0.0 < g.eta <= 1.0
    assert g.p > 0.0
    assert g.s**2 + g.c**2 == pytest.approx(1.0, abs=1e-15)
