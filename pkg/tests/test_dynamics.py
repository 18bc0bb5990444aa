import json
import math

import numpy as np
import pytest

from zonalflow.dynamics import (
    FrozenOrbit,
    PhaseMapSpec,
    ReducedFlow,
    frozen_2d,
    frozen_on_axis,
    impact_eccentricity,
    phase_map,
    ramp_models,
    reduced_hamiltonian,
)
from zonalflow.gravity import GravityField
from zonalflow.hamiltonian import MeanModelSpec, j2sq_correction, mean_hamiltonian
from zonalflow.kaula import OrbitGeometry
from zonalflow.svgplot import marching_squares


def make_spec(lunar, n_max=12, alt=600.0, inc_deg=63.45, resolution=48, **kw):
    return PhaseMapSpec(
        a=lunar.reference_radius + alt,
        i_circ=math.radians(inc_deg),
        model=MeanModelSpec(field=lunar, n_max=n_max, **kw),
        resolution=resolution,
    )


class TestImpactEccentricity:
    def test_values(self):
        assert impact_eccentricity(2.0, 1.0) == 0.5
        assert impact_eccentricity(1738.0 + 600.0, 1738.0) == pytest.approx(
            600.0 / 2338.0, rel=1e-15
        )

    def test_surface_limit(self):
        assert impact_eccentricity(1.0 + 1e-9, 1.0) == pytest.approx(1e-9, rel=1e-3)
        with pytest.raises(ValueError):
            impact_eccentricity(1.0, 1.0)
        with pytest.raises(ValueError):
            impact_eccentricity(0.9, 1.0)


class TestReducedHamiltonian:
    def test_matches_mean_hamiltonian_with_sigma_inclination(self, lunar, rng):
        spec = make_spec(lunar)
        for _ in range(10):
            e = rng.uniform(0, spec.e_feasible * 0.95)
            w = rng.uniform(0, 2 * math.pi)
            inc = math.acos(spec.sigma / math.sqrt(1 - e * e))
            assert reduced_hamiltonian(spec, e, w) == pytest.approx(
                mean_hamiltonian(spec.model, spec.a, e, inc, w), rel=1e-13
            )

    def test_circular_orbit_inclination(self, lunar):
        spec = make_spec(lunar)
        # e = 0 reproduces I_circ exactly; sigma = 0 keeps the orbit polar
        assert reduced_hamiltonian(spec, 0.0, 0.3) == pytest.approx(
            mean_hamiltonian(spec.model, spec.a, 0.0, spec.i_circ, 0.3), rel=1e-14
        )
        polar = PhaseMapSpec(
            a=spec.a, i_circ=math.pi / 2, model=spec.model, resolution=32
        )
        for e in (0.0, 0.3, 0.6):
            inc = math.acos(polar.sigma / math.sqrt(1 - e * e))
            assert inc == pytest.approx(math.pi / 2, abs=1e-12)

    def test_infeasible_is_nan_not_exception(self, lunar):
        spec = make_spec(lunar)
        assert math.isnan(reduced_hamiltonian(spec, spec.e_feasible + 0.01, 0.0))

    def test_on_axis_omega_derivative_vanishes(self, lunar, rng):
        spec = make_spec(lunar, n_max=20)
        flow = ReducedFlow(spec)
        probe = flow.k_pert_grid(
            np.linspace(0.05, spec.e_outer, 16), np.linspace(0, 2 * math.pi, 24)
        )
        k_scale = np.nanmax(probe) - np.nanmin(probe)
        es = rng.uniform(0.02, spec.e_outer, 12)
        for axis in (math.pi / 2, -math.pi / 2):
            dk = flow.k_domega_points(es, np.full(es.shape, axis))
            assert np.all(np.abs(dk) < 1e-12 * k_scale)

    def test_j2sq_rows_match_scalar_correction(self, lunar, rng):
        spec = make_spec(lunar, n_max=6, include_j2sq=True, include_centering=True)
        flow = ReducedFlow(spec)
        for _ in range(5):
            e = rng.uniform(0.0, spec.e_feasible * 0.9)
            w = rng.uniform(0, 2 * math.pi)
            eta = math.sqrt(1 - e * e)
            inc = math.acos(spec.sigma / eta)
            g = OrbitGeometry(a=spec.a, e=e, inc=inc)
            without = PhaseMapSpec(
                a=spec.a, i_circ=spec.i_circ, resolution=32,
                model=MeanModelSpec(field=lunar, n_max=6),
            )
            delta = ReducedFlow(spec).k_pert(e, w) - ReducedFlow(without).k_pert(e, w)
            assert delta == pytest.approx(
                j2sq_correction(lunar, g, w, True), rel=1e-11, abs=1e-20
            )


class TestPhaseMap:
    def test_kepler_field_constant_map(self, lunar):
        kepler = GravityField(
            "kepler", mu=lunar.mu, reference_radius=lunar.reference_radius,
            rotation_rate=0.0, zonals=(0.0, 0.0, 0.0),
        )
        spec = PhaseMapSpec(
            a=2338.0, i_circ=math.radians(63.45),
            model=MeanModelSpec(field=kepler, n_max=2), resolution=24,
        )
        pmap = phase_map(spec)
        vals = pmap.values[~pmap.mask]
        assert np.allclose(vals, -0.5 * kepler.mu / 2338.0, rtol=1e-15)

    def test_degree2_map_is_omega_independent(self, lunar):
        spec = make_spec(lunar, n_max=2, resolution=32)
        pmap = phase_map(spec)
        for row, masked in zip(pmap.values, pmap.mask):
            live = row[~masked]
            if live.size:
                assert np.ptp(live) <= 1e-14 * max(1.0, abs(live[0]))

    def test_degree3_odd_part_antisymmetric(self, lunar):
        spec = make_spec(lunar, n_max=3, resolution=64)
        flow = ReducedFlow(spec)
        es = np.linspace(0.02, spec.e_outer * 0.9, 8)
        for w in (0.4, 1.3, 2.9):
            plus = flow.k_pert_points(es, np.full(es.shape, w))
            minus = flow.k_pert_points(es, np.full(es.shape, -w))
            even = ReducedFlow(make_spec(lunar, n_max=2, resolution=16))
            base = even.k_pert_points(es, np.full(es.shape, w))
            np.testing.assert_allclose(plus + minus, 2 * base, rtol=1e-10)

    def test_mask_matches_feasibility(self, lunar):
        spec = PhaseMapSpec(
            a=lunar.reference_radius + 600.0,
            i_circ=math.radians(20.0),
            model=MeanModelSpec(field=lunar, n_max=5),
            resolution=32,
            e_max=0.6,
        )
        pmap = phase_map(spec)
        feas = spec.e_feasible
        for ie, e in enumerate(pmap.e_grid):
            assert bool(pmap.mask[ie, 0]) == (e >= feas * (1 - 1e-9))

    def test_resolution_floor(self, lunar):
        with pytest.raises(ValueError):
            make_spec(lunar, resolution=8)

    def test_json_round_trip_and_determinism(self, lunar):
        spec = make_spec(lunar, n_max=6, resolution=24)
        a = phase_map(spec).to_json()
        b = phase_map(spec).to_json()
        assert a == b
        payload = json.loads(a)
        assert payload["e_impact"] == pytest.approx(600.0 / 2338.0, rel=1e-12)
        assert len(payload["values"]) == 24

    def test_contour_points_re_evaluate_to_level(self, lunar):
        spec = make_spec(lunar, n_max=8, resolution=64)
        pmap = phase_map(spec)
        flow = ReducedFlow(spec)
        vals = pmap.values[~pmap.mask]
        level = float(np.percentile(vals, 40))
        segs = marching_squares(
            list(pmap.e_grid), list(pmap.omega_grid),
            pmap.values.tolist(),
            pmap.mask.tolist(), level,
        )
        assert segs
        de = pmap.e_grid[1] - pmap.e_grid[0]
        dw = pmap.omega_grid[1] - pmap.omega_grid[0]
        kepler = -0.5 * lunar.mu / spec.a
        for (e0, w0), (e1, w1) in segs[:40]:
            for e_pt, w_pt in ((e0, w0), (e1, w1)):
                val = kepler + flow.k_pert(e_pt, w_pt)
                # two-cell interpolation error bound from the local gradient
                g_e = abs(flow.k_pert(min(e_pt + de, spec.e_outer), w_pt) - flow.k_pert(max(e_pt - de, 0.0), w_pt)) / 2
                g_w = abs(flow.k_pert(e_pt, w_pt + dw) - flow.k_pert(e_pt, w_pt - dw)) / 2
                assert abs(val - level) <= 2.0 * (g_e + g_w) + 1e-13 * abs(level)


class TestFrozenOrbits:
    def test_kepler_field_empty(self, lunar):
        kepler = GravityField(
            "kepler", mu=lunar.mu, reference_radius=lunar.reference_radius,
            rotation_rate=0.0, zonals=(0.0, 0.0, 0.0),
        )
        spec = PhaseMapSpec(
            a=2338.0, i_circ=math.radians(63.45),
            model=MeanModelSpec(field=kepler, n_max=2), resolution=24,
        )
        assert frozen_on_axis(spec, -math.pi / 2) == []
        assert frozen_2d(spec) == []

    def test_residual_invariant(self, lunar):
        spec = make_spec(lunar, n_max=12)
        pmap = phase_map(spec)
        orbits = frozen_2d(spec)
        assert orbits
        for fo in orbits:
            assert fo.gradient_norm < 1e-10 * pmap.k_scale

    def test_classification_consistency(self, lunar):
        spec = make_spec(lunar, n_max=12)
        for fo in frozen_2d(spec):
            expected = "center" if fo.hessian_det > 0 else "saddle"
            assert fo.classification == expected

    def test_quintuple_structure_degree3(self, lunar):
        # degrees 2..3 near the critical inclination: three centers (two on
        # the south axis, one north) and two low-e saddles toward 0 and pi
        spec = make_spec(lunar, n_max=3, resolution=48)
        south = frozen_on_axis(spec, -math.pi / 2)
        north = frozen_on_axis(spec, math.pi / 2)
        assert len(south) == 2 and all(fo.classification == "center" for fo in south)
        assert len(north) == 1 and north[0].classification == "center"
        seeds = [(0.02 * math.cos(t), 0.02 * math.sin(t)) for t in np.linspace(0, 2 * math.pi, 24, endpoint=False)]
        seeds += [(0.04 * math.cos(t), 0.04 * math.sin(t)) for t in np.linspace(0, 2 * math.pi, 24, endpoint=False)]
        all_orbits = frozen_2d(spec, seeds=np.array(seeds))
        saddles = [fo for fo in all_orbits if fo.classification == "saddle"]
        assert len(saddles) >= 2
        for fo in saddles:
            dist_axis = min(abs(abs(fo.omega) - 0.0), abs(abs(fo.omega) - math.pi))
            assert dist_axis < 0.8  # arguments of perigee toward 0 / pi

    def test_axis_scan_matches_2d_solver(self, lunar):
        spec = make_spec(lunar, n_max=12)
        axis_orbits = frozen_on_axis(spec, -math.pi / 2)
        full = frozen_2d(spec)
        for fo in axis_orbits:
            best = min(full, key=lambda o: abs(o.e - fo.e) + abs(o.omega - fo.omega))
            assert best.e == pytest.approx(fo.e, abs=1e-6)

    def test_even_field_symmetric_pairs(self, lunar, rng):
        import dataclasses
        zonals = list(lunar.zonals[:13])
        for n in range(3, 13, 2):
            zonals[n] = 0.0
        evens = dataclasses.replace(lunar, zonals=tuple(zonals))
        spec = PhaseMapSpec(
            a=lunar.reference_radius + 600.0, i_circ=math.radians(63.45),
            model=MeanModelSpec(field=evens, n_max=12), resolution=32,
        )
        orbits = frozen_2d(spec)
        for fo in orbits:
            if abs(math.sin(fo.omega)) > 1e-6 and fo.e > 1e-4:
                mirrored = [
                    o for o in orbits
                    if abs(o.e - fo.e) < 1e-6 and abs(o.omega + fo.omega) % (2 * math.pi) < 1e-5
                ]
                assert mirrored, f"no (w, -w) partner for {fo}"


class TestRamp:
    def test_single_degree_equals_direct(self, lunar):
        spec = make_spec(lunar, n_max=12, resolution=24)
        [(d, pmap, frozen)] = ramp_models(spec, [5])
        direct_spec = make_spec(lunar, n_max=5, resolution=24)
        direct = phase_map(direct_spec)
        assert d == 5
        np.testing.assert_array_equal(pmap.values, direct.values)

    def test_incremental_equals_from_scratch(self, lunar):
        spec = make_spec(lunar, n_max=12, resolution=24)
        frames = ramp_models(spec, range(3, 8))
        for d, pmap, _ in frames:
            fresh = phase_map(make_spec(lunar, n_max=d, resolution=24))
            assert np.max(np.abs(pmap.values - fresh.values)) <= 1e-14 * max(
                1.0, np.max(np.abs(fresh.values))
            )

    def test_frozen_sets_change_across_ramp(self, lunar):
        spec = make_spec(lunar, n_max=12, resolution=24)
        frames = ramp_models(spec, [3, 4, 7, 12])
        counts = {d: len([fo for fo in fr if not fo.impact]) for d, _, fr in frames}
        # the qualitative sequence: populated, then extinguished, then reborn
        assert counts[3] == 3
        assert counts[7] == 0
        assert counts[12] == 1
