"""Reduced 1-DOF flow analysis over the eccentricity vector.

At fixed semi-major axis the mean-anomaly-averaged flow conserves the
Delaunay action, and the node momentum fixes sigma = cos I_circular, so
the mean Hamiltonian becomes a one-parameter family K(e, w). Phase maps
are level sets of K on a polar grid; frozen orbits are its stationary
points, classified by the Hessian in the Cartesian eccentricity-vector
chart (which is regular at e = 0).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ddmath import dd_horner, two_prod
from .hamiltonian import MeanModelSpec, q_coeff, qtilde_coeff
from .kaula import _ecc_coeffs, _incl_matrix, index_set

logger = logging.getLogger(__name__)

__all__ = [
    "PhaseMapSpec",
    "PhaseMap",
    "FrozenOrbit",
    "GridExtremum",
    "reduced_hamiltonian",
    "impact_eccentricity",
    "phase_map",
    "frozen_on_axis",
    "frozen_2d",
    "ramp_models",
]


def impact_eccentricity(a: float, reference_radius: float) -> float:
    """Eccentricity at which the periapsis a(1-e) touches the surface."""
    if a <= reference_radius:
        raise ValueError(f"semi-major axis {a} km not above the surface radius")
    return 1.0 - reference_radius / a


@dataclass(frozen=True)
class PhaseMapSpec:
    """Grid request for one point of the (a, I_circular) parameter plane."""

    a: float
    i_circ: float
    model: MeanModelSpec
    resolution: int = 128
    e_max: float | None = None

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError("grid resolution must be at least 16")
        if self.a <= self.model.field.reference_radius:
            raise ValueError("semi-major axis must exceed the reference radius")
        if self.e_max is not None and not 0.0 < self.e_max < 1.0:
            raise ValueError("e_max must lie in (0, 1)")

    @property
    def sigma(self) -> float:
        return math.cos(self.i_circ)

    @property
    def e_feasible(self) -> float:
        """Outer eccentricity where cos I = sigma/eta reaches the pole."""
        return math.sqrt(max(0.0, 1.0 - self.sigma * self.sigma))

    @property
    def e_impact(self) -> float:
        return impact_eccentricity(self.a, self.model.field.reference_radius)

    @property
    def e_outer(self) -> float:
        if self.e_max is not None:
            return min(self.e_max, 0.999)
        feas = 0.995 * self.e_feasible
        return min(max(1.5 * self.e_impact, 0.05), feas if feas > 0 else 0.05, 0.95)


@dataclass(frozen=True)
class FrozenOrbit:
    """Stationary point of the reduced flow with Hessian classification."""

    e: float
    omega: float
    classification: str  # "center" | "saddle"
    hessian_det: float
    hessian_trace: float
    impact: bool
    gradient_norm: float

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "omega": self.omega,
            "classification": self.classification,
            "hessian_det": self.hessian_det,
            "hessian_trace": self.hessian_trace,
            "impact": self.impact,
            "gradient_norm": self.gradient_norm,
        }


@dataclass(frozen=True)
class GridExtremum:
    e: float
    omega: float
    value: float
    kind: str  # "max" | "min"

    def to_dict(self) -> dict:
        return {"e": self.e, "omega": self.omega, "value": self.value, "kind": self.kind}


class ReducedFlow:
    """Vectorized evaluator of the reduced Hamiltonian at fixed (a, sigma).

    Per ring of constant eccentricity the inclination is constant, so the
    averaged series collapses to Fourier coefficients in omega that are
    built once per eccentricity batch.
    """

    def __init__(self, spec: PhaseMapSpec):
        self.spec = spec
        self.field = spec.model.field
        self.a = spec.a
        self.sigma = spec.sigma
        self.mu = self.field.mu
        self.degrees = tuple(
            i for i in spec.model.active_degrees if self.field.zonal(i) != 0.0
        )
        self.m_max = max((2 * index_set(i, 2).i_m + (i % 2) for i in self.degrees), default=0)
        self.m_max = max(self.m_max, 2)
        self.e_feasible = spec.e_feasible

    # -- geometry helpers ---------------------------------------------------

    def _geometry_arrays(self, e_arr: np.ndarray):
        eta = np.sqrt(1.0 - e_arr * e_arr)
        cos_i = self.sigma / eta
        s = np.sqrt(np.maximum(0.0, 1.0 - cos_i * cos_i))
        return eta, s

    def feasible(self, e_arr: np.ndarray) -> np.ndarray:
        return np.abs(e_arr) < self.e_feasible * (1.0 - 1e-9)

    # -- Fourier rows -------------------------------------------------------

    @cached_property
    def _pack(self):
        """All averaged terms packed for one shared Horner pass.

        Every F polynomial is in x = s^2 and every G polynomial in x =
        e^2, so the whole degree set evaluates in max-degree Horner steps
        on (n_points, n_rows) arrays instead of a per-degree Python loop.
        """
        rows = []
        for i in self.degrees:
            idx = index_set(i)
            i2 = index_set(i, 2).i_m
            j0 = idx.i_m_star
            for j_rel in range(i2 + 1):
                rows.append((i, j0 + j_rel, 2 * j_rel + idx.i_star, idx.i_star,
                             1.0 if (j_rel + idx.i_star) == 0 else 2.0))
        n_rows = len(rows)
        lf = max((r[0] // 2) for r in rows) + 1
        lg = max(len(_ecc_coeffs(r[0], r[1])[1]) for r in rows)
        f_hi = np.zeros((n_rows, lf))
        f_lo = np.zeros((n_rows, lf))
        g_coef = np.zeros((n_rows, max(lg, 1)))
        ra = self.field.reference_radius / self.a
        scale = np.empty(n_rows)
        m_mult = np.empty(n_rows, dtype=int)
        i_star = np.empty(n_rows, dtype=int)
        eta_pow = np.empty(n_rows)
        proj_a = np.zeros((n_rows, self.m_max + 1))
        proj_b = np.zeros((n_rows, self.m_max + 1))
        hi_full = {i: _incl_matrix(i) for i in self.degrees}
        for r, (i, j_abs, m, istar, weight) in enumerate(rows):
            mat_hi, mat_lo = hi_full[i]
            i0 = i // 2
            # align on descending powers of s^2, zero-padded at the front
            f_hi[r, lf - (i0 + 1):] = mat_hi[j_abs]
            f_lo[r, lf - (i0 + 1):] = mat_lo[j_abs]
            base, coeffs = _ecc_coeffs(i, j_abs)
            assert base == m  # averaged rows lead with e^multiplier
            g_coef[r, max(lg, 1) - len(coeffs):] = coeffs
            scale[r] = -(self.mu / self.a) * weight * self.field.zonal(i) * ra**i
            m_mult[r] = m
            i_star[r] = istar
            eta_pow[r] = 1 - 2 * i
            if istar == 0:
                proj_a[r, m] = 1.0
            else:
                proj_b[r, m] = -1.0  # cos(m w + pi/2) = -sin(m w)
        return {
            "f_hi": f_hi, "f_lo": f_lo, "f64": f_hi + f_lo, "g": g_coef,
            "scale": scale, "m": m_mult, "i_star": i_star, "eta_pow": eta_pow,
            "proj_a": proj_a, "proj_b": proj_b,
        }

    def fourier_rows(self, e_arr: np.ndarray, precise: bool = True):
        """Cos/sin coefficient tables of K_pert: (A, B) with shape (n_e, m_max+1).

        K_pert(e, w) = sum_m A[:, m] cos(m w) + B[:, m] sin(m w); includes
        the -(mu/a) front factor and, if enabled, the second-order block.
        ``precise=False`` evaluates the inclination polynomials in plain
        doubles (~1e-8 relative near s -> 1 at degree 30+), which is the
        cheap mode the stationary-point solvers iterate in before their
        compensated polish.
        """
        e_arr = np.asarray(e_arr, dtype=float)
        eta, s = self._geometry_arrays(e_arr)
        n_e = e_arr.size
        if not self.degrees:
            rows_a = np.zeros((n_e, self.m_max + 1))
            rows_b = np.zeros((n_e, self.m_max + 1))
        else:
            pack = self._pack
            if precise:
                xh, xl = two_prod(s, s)
                fh, flo = dd_horner(
                    pack["f_hi"], pack["f_lo"], xh[:, None], xl[:, None]
                )
                f_vals = fh + flo
            else:
                x_s = (s * s)[:, None]
                coefs = pack["f64"]
                f_vals = np.broadcast_to(coefs[None, :, 0], (n_e, coefs.shape[0])).copy()
                for k in range(1, coefs.shape[1]):
                    f_vals = f_vals * x_s + coefs[None, :, k]
            f_vals = np.where(pack["i_star"][None, :] == 1, f_vals * s[:, None], f_vals)
            x_e = e_arr * e_arr
            g_vals = np.zeros((n_e, pack["g"].shape[0]))
            for k in range(pack["g"].shape[1]):
                g_vals = g_vals * x_e[:, None] + pack["g"][None, :, k]
            # cumulative power tables beat per-element transcendental pow
            e_pows = np.empty((n_e, int(pack["m"].max()) + 1))
            e_pows[:, 0] = 1.0
            for k in range(1, e_pows.shape[1]):
                e_pows[:, k] = e_pows[:, k - 1] * e_arr
            inv_eta2 = 1.0 / (eta * eta)
            top = int((1 - pack["eta_pow"].min()) // 2)  # eta^(1-2i): i up to top
            eta_pows = np.empty((n_e, top + 1))
            eta_pows[:, 0] = eta  # eta^(1-2*0) would be eta; index by degree i
            for k in range(1, top + 1):
                eta_pows[:, k] = eta_pows[:, k - 1] * inv_eta2
            deg_index = ((1 - pack["eta_pow"]) // 2).astype(int)
            g_vals = g_vals * e_pows[:, pack["m"]]
            g_vals = g_vals * eta_pows[:, deg_index]
            contrib = pack["scale"][None, :] * f_vals * g_vals
            rows_a = contrib @ pack["proj_a"]
            rows_b = contrib @ pack["proj_b"]
        if self.spec.model.include_j2sq:
            sec, c2w = self._j2sq_rows(e_arr, eta, s)
            rows_a[:, 0] += sec
            rows_a[:, 2] += c2w
        return rows_a, rows_b

    def _j2sq_rows(self, e_arr, eta, s):
        """Secular and cos 2w coefficients of the second-order block."""
        sec = np.empty_like(e_arr)
        c2w = np.empty_like(e_arr)
        for k, (ek, etak, sk) in enumerate(zip(e_arr, eta, s)):
            g = _SyntheticGeometry(self.a, float(ek), float(etak), float(sk))
            q00 = q_coeff(0, 0, g)
            q01 = q_coeff(0, 1, g)
            front = (
                (self.mu / self.a)
                * self.field.zonal(2) ** 2
                * etak
                * (self.field.reference_radius / (self.a * etak * etak)) ** 4
            )
            sec[k] = front * (
                -((1.0 + 3.0 * etak) / 32.0) * (2.0 - 3.0 * sk * sk) ** 2 + 0.5 * q00
            )
            cos_coeff = q01
            if self.spec.model.include_centering:
                cos_coeff += (
                    ek * sk * sk / (1.0 + etak) ** 2
                ) * qtilde_coeff(0, 1, g)
            c2w[k] = front * cos_coeff
        return sec, c2w

    # -- evaluation ---------------------------------------------------------

    def k_pert_grid(
        self, e_arr: np.ndarray, w_arr: np.ndarray, precise: bool = True
    ) -> np.ndarray:
        """K_pert on the outer product grid (n_e, n_w); NaN where infeasible."""
        e_arr = np.asarray(e_arr, dtype=float)
        w_arr = np.asarray(w_arr, dtype=float)
        ok = self.feasible(e_arr)
        out = np.full((e_arr.size, w_arr.size), np.nan)
        if np.any(ok):
            rows_a, rows_b = self.fourier_rows(e_arr[ok], precise=precise)
            m = np.arange(self.m_max + 1)
            cosm = np.cos(np.outer(m, w_arr))
            sinm = np.sin(np.outer(m, w_arr))
            out[ok] = rows_a @ cosm + rows_b @ sinm
        return out

    def solver_scales(self) -> tuple[float, float]:
        """(value range, cheap-mode gradient noise floor) for solver tolerances."""
        e_probe = np.linspace(0.0, min(self.spec.e_outer, self.e_feasible * 0.99), 24)
        w_probe = np.arange(16) * (math.pi / 8.0)
        precise = self.k_pert_grid(e_probe, w_probe)
        cheap = self.k_pert_grid(e_probe, w_probe, precise=False)
        finite = np.isfinite(precise)
        if not np.any(finite):
            return 0.0, 0.0
        k_scale = float(np.max(precise[finite]) - np.min(precise[finite]))
        noise = float(np.max(np.abs((precise - cheap)[finite]), initial=0.0))
        grad_noise = 4.0 * noise / self._chart_step()
        return k_scale, grad_noise

    def k_pert_points(
        self, e_arr: np.ndarray, w_arr: np.ndarray, precise: bool = True
    ) -> np.ndarray:
        """K_pert at paired points (same-length arrays); NaN where infeasible."""
        e_arr = np.atleast_1d(np.asarray(e_arr, dtype=float))
        w_arr = np.atleast_1d(np.asarray(w_arr, dtype=float))
        ok = self.feasible(e_arr)
        out = np.full(e_arr.shape, np.nan)
        if np.any(ok):
            rows_a, rows_b = self.fourier_rows(e_arr[ok], precise=precise)
            m = np.arange(self.m_max + 1)
            phases = np.outer(w_arr[ok], m)
            out[ok] = np.sum(rows_a * np.cos(phases) + rows_b * np.sin(phases), axis=1)
        return out

    def k_pert(self, e: float, omega: float) -> float:
        return float(self.k_pert_points(np.array([e]), np.array([omega]))[0])

    def k_domega_points(self, e_arr, w_arr) -> np.ndarray:
        """Analytic dK/dw at paired points (no finite differences)."""
        e_arr = np.atleast_1d(np.asarray(e_arr, dtype=float))
        w_arr = np.atleast_1d(np.asarray(w_arr, dtype=float))
        ok = self.feasible(e_arr)
        out = np.full(e_arr.shape, np.nan)
        if np.any(ok):
            rows_a, rows_b = self.fourier_rows(e_arr[ok])
            m = np.arange(self.m_max + 1)
            phases = np.outer(w_arr[ok], m)
            out[ok] = np.sum(
                -rows_a * m * np.sin(phases) + rows_b * m * np.cos(phases), axis=1
            )
        return out

    # -- derivatives in the Cartesian chart ----------------------------------

    def _chart_step(self) -> float:
        # large enough that the FD noise floor eps*amплitude/h clears the
        # 1e-10 K_scale residual bound; truncation at stationary points is
        # h^4-level after Richardson
        return max(2e-7, 2.5e-4 * self.spec.e_outer)

    def k_pert_xy(self, xy: np.ndarray, precise: bool = True) -> np.ndarray:
        pts = np.atleast_2d(xy)
        e = np.hypot(pts[:, 0], pts[:, 1])
        w = np.arctan2(pts[:, 1], pts[:, 0])
        return self.k_pert_points(e, w, precise=precise)

    def gradient_batch(
        self, xy: np.ndarray, refine: bool = True, precise: bool = True
    ) -> np.ndarray:
        """Central-difference gradients for (N, 2) chart points.

        One Richardson level when ``refine``; the whole stencil goes
        through a single batched evaluation, so the cost is dominated by
        the per-call series setup, not by N.
        """
        pts = np.atleast_2d(xy)
        n = pts.shape[0]
        h = self._chart_step()
        offsets = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
        if refine:
            offsets += [(0.5 * h, 0.0), (-0.5 * h, 0.0), (0.0, 0.5 * h), (0.0, -0.5 * h)]
        stencil = np.concatenate([pts + np.array(o) for o in offsets])
        vals = self.k_pert_xy(stencil, precise=precise).reshape(len(offsets), n)
        d1 = np.stack(
            [(vals[0] - vals[1]) / (2 * h), (vals[2] - vals[3]) / (2 * h)], axis=1
        )
        if not refine:
            return d1
        d2 = np.stack([(vals[4] - vals[5]) / h, (vals[6] - vals[7]) / h], axis=1)
        return (4.0 * d2 - d1) / 3.0

    def gradient(self, x: float, y: float) -> np.ndarray:
        return self.gradient_batch(np.array([[x, y]]))[0]

    def hessian_batch(self, xy: np.ndarray, precise: bool = True) -> np.ndarray:
        """Second-difference Hessians for (N, 2) chart points -> (N, 2, 2)."""
        pts = np.atleast_2d(xy)
        n = pts.shape[0]
        h = self._chart_step() * 8.0
        offsets = [
            (0.0, 0.0),
            (h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h),
            (h, h), (h, -h), (-h, h), (-h, -h),
        ]
        stencil = np.concatenate([pts + np.array(o) for o in offsets])
        v = self.k_pert_xy(stencil, precise=precise).reshape(len(offsets), n)
        kxx = (v[1] - 2 * v[0] + v[2]) / (h * h)
        kyy = (v[3] - 2 * v[0] + v[4]) / (h * h)
        kxy = (v[5] - v[6] - v[7] + v[8]) / (4 * h * h)
        out = np.empty((n, 2, 2))
        out[:, 0, 0] = kxx
        out[:, 1, 1] = kyy
        out[:, 0, 1] = out[:, 1, 0] = kxy
        return out

    def hessian(self, x: float, y: float) -> np.ndarray:
        return self.hessian_batch(np.array([[x, y]]))[0]


@dataclass(frozen=True)
class _SyntheticGeometry:
    """Duck-typed OrbitGeometry carrier for precomputed (e, eta, s) arrays."""

    a: float
    e: float
    eta: float
    s: float

    @property
    def p(self) -> float:
        return self.a * self.eta * self.eta


def reduced_hamiltonian(spec: PhaseMapSpec, e: float, omega: float) -> float:
    """Mean Hamiltonian on the reduced manifold; NaN when e is infeasible."""
    flow = ReducedFlow(spec)
    k_pert = flow.k_pert(e, omega)
    return -0.5 * spec.model.field.mu / spec.a + k_pert


@dataclass
class PhaseMap:
    """Grid of mean-Hamiltonian values over the eccentricity vector."""

    spec: PhaseMapSpec
    e_grid: np.ndarray
    omega_grid: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    e_impact: float
    extrema: tuple[GridExtremum, ...] = ()
    frozen_orbits: tuple[FrozenOrbit, ...] = ()

    @property
    def k_scale(self) -> float:
        vals = self.values[~self.mask]
        if vals.size == 0:
            return 0.0
        return float(np.max(vals) - np.min(vals))

    def with_frozen(self, orbits) -> "PhaseMap":
        return PhaseMap(
            spec=self.spec,
            e_grid=self.e_grid,
            omega_grid=self.omega_grid,
            values=self.values,
            mask=self.mask,
            e_impact=self.e_impact,
            extrema=self.extrema,
            frozen_orbits=tuple(orbits),
        )

    def to_dict(self) -> dict:
        spec = self.spec
        values = [
            [None if m else v for v, m in zip(row_v, row_m)]
            for row_v, row_m in zip(self.values.tolist(), self.mask.tolist())
        ]
        return {
            "field": spec.model.field.name,
            "a_km": spec.a,
            "i_circ_deg": math.degrees(spec.i_circ),
            "sigma": spec.sigma,
            "n_max": spec.model.n_max,
            "degrees": list(spec.model.active_degrees),
            "include_j2sq": spec.model.include_j2sq,
            "include_centering": spec.model.include_centering,
            "resolution": spec.resolution,
            "e_impact": self.e_impact,
            "e_max": spec.e_outer,
            "k_scale": self.k_scale,
            "e_grid": self.e_grid.tolist(),
            "omega_grid": self.omega_grid.tolist(),
            "values": values,
            "mask": self.mask.astype(int).tolist(),
            "extrema": [x.to_dict() for x in self.extrema],
            "frozen": [fo.to_dict() for fo in self.frozen_orbits],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        lines = ["e,omega,value,masked"]
        for ie, e in enumerate(self.e_grid):
            for iw, w in enumerate(self.omega_grid):
                masked = bool(self.mask[ie, iw])
                val = "" if masked else repr(float(self.values[ie, iw]))
                lines.append(f"{e!r},{w!r},{val},{int(masked)}")
        return "\n".join(lines) + "\n"


def _grid_extrema(e_grid, w_grid, values, mask) -> tuple[GridExtremum, ...]:
    """Interior local extrema with omega wraparound."""
    out = []
    n_e, n_w = values.shape
    for ie in range(1, n_e - 1):
        for iw in range(n_w):
            if mask[ie, iw]:
                continue
            neigh = []
            for de in (-1, 0, 1):
                for dw in (-1, 0, 1):
                    if de == 0 and dw == 0:
                        continue
                    je, jw = ie + de, (iw + dw) % n_w
                    if mask[je, jw]:
                        neigh = None
                        break
                    neigh.append(values[je, jw])
                if neigh is None:
                    break
            if not neigh:
                continue
            v = values[ie, iw]
            if v > max(neigh):
                out.append(GridExtremum(float(e_grid[ie]), float(w_grid[iw]), float(v), "max"))
            elif v < min(neigh):
                out.append(GridExtremum(float(e_grid[ie]), float(w_grid[iw]), float(v), "min"))
    return tuple(out)


def phase_map(spec: PhaseMapSpec) -> PhaseMap:
    """Evaluate the reduced Hamiltonian on the polar (e, omega) grid.

    Cells beyond the geometric feasibility radius sqrt(1 - sigma^2) are
    masked; evaluation order is deterministic.
    """
    flow = ReducedFlow(spec)
    n = spec.resolution
    e_grid = np.linspace(0.0, spec.e_outer, n)
    w_grid = np.arange(n) * (2.0 * math.pi / n)
    k = flow.k_pert_grid(e_grid, w_grid)
    kepler = -0.5 * spec.model.field.mu / spec.a
    values = kepler + k
    mask = ~np.isfinite(values)
    values = np.where(mask, 0.0, values)
    extrema = _grid_extrema(e_grid, w_grid, values, mask)
    return PhaseMap(
        spec=spec,
        e_grid=e_grid,
        omega_grid=w_grid,
        values=values,
        mask=mask,
        e_impact=spec.e_impact,
        extrema=extrema,
    )


def _classify_batch(flow: ReducedFlow, xy: np.ndarray, spec: PhaseMapSpec) -> list[FrozenOrbit]:
    """FrozenOrbit records for (N, 2) chart points in two batched stencils."""
    pts = np.atleast_2d(xy)
    if pts.shape[0] == 0:
        return []
    hess = flow.hessian_batch(pts)
    grad = flow.gradient_batch(pts)
    e_imp = impact_eccentricity(spec.a, spec.model.field.reference_radius)
    out = []
    for (x, y), hw, gw in zip(pts, hess, grad):
        det = float(hw[0, 0] * hw[1, 1] - hw[0, 1] ** 2)
        e_star = math.hypot(x, y)
        out.append(
            FrozenOrbit(
                e=e_star,
                omega=math.atan2(y, x),
                classification="center" if det > 0 else "saddle",
                hessian_det=det,
                hessian_trace=float(hw[0, 0] + hw[1, 1]),
                impact=e_star >= e_imp,
                gradient_norm=float(math.hypot(gw[0], gw[1])),
            )
        )
    return out


def _classify(flow: ReducedFlow, x: float, y: float, spec: PhaseMapSpec) -> FrozenOrbit:
    return _classify_batch(flow, np.array([[x, y]]), spec)[0]


def _axis_rows(flow: ReducedFlow, scan_points: int):
    """Fourier rows on the axis-scan grid (axis independent).

    The rows depend only on eccentricity, so one compensated pass serves
    both axes. Returns (e_scan, rows A, rows B).
    """
    h = flow._chart_step()
    spec = flow.spec
    e_hi = min(spec.e_outer, spec.e_feasible * (1.0 - 1e-6)) - 4.0 * h
    if e_hi <= 8.0 * h:
        return None
    es = np.linspace(8.0 * h, e_hi, scan_points)
    rows_a, rows_b = flow.fourier_rows(es)
    return es, rows_a, rows_b


def frozen_on_axis(
    spec: PhaseMapSpec,
    axis: float = -0.5 * math.pi,
    scan_points: int = 400,
    _flow: ReducedFlow | None = None,
) -> list[FrozenOrbit]:
    """Roots of dK/de along omega = +-pi/2, bracketed on a fine scan.

    Brackets refine by a few bisection rounds and a batched Illinois
    iteration, all in compensated mode (the uncompensated noise floor
    would manufacture spurious brackets on flat stretches at high
    degree). An empty list is a valid outcome; dK/dw vanishes
    identically on the axis for zonal-only models.
    """
    if not math.isclose(abs(axis), 0.5 * math.pi, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError("axis must be +pi/2 or -pi/2")
    flow = _flow if _flow is not None else ReducedFlow(spec)
    h = flow._chart_step()
    if not hasattr(flow, "_axis_scan"):
        flow._axis_scan = _axis_rows(flow, scan_points)
    scan = flow._axis_scan
    if scan is None:
        return []
    es, rows_a, rows_b = scan
    m = np.arange(flow.m_max + 1)
    proj = np.cos(m * axis)
    proj_s = np.sin(m * axis)
    k_axis = rows_a @ proj + rows_b @ proj_s
    # grid-difference derivative is plenty to bracket isolated roots
    derivs = np.gradient(k_axis, es)

    def dk_de(e_vals):
        e_vals = np.atleast_1d(e_vals)
        n = e_vals.size
        stencil = np.concatenate(
            [e_vals + h, e_vals - h, e_vals + 0.5 * h, e_vals - 0.5 * h]
        )
        v = flow.k_pert_points(stencil, np.full(4 * n, axis)).reshape(4, n)
        dd1 = (v[0] - v[1]) / (2 * h)
        dd2 = (v[2] - v[3]) / h
        return (4.0 * dd2 - dd1) / 3.0

    finite = derivs[np.isfinite(derivs)]
    if finite.size == 0 or np.all(finite == 0.0):
        # flat flow (Kepler-only or all-zero zonals): no isolated equilibria
        return []
    lo_list, hi_list = [], []
    for k in range(len(es) - 1):
        d0, d1v = derivs[k], derivs[k + 1]
        if np.isfinite(d0) and np.isfinite(d1v) and d0 * d1v < 0.0:
            lo_list.append(es[k])
            hi_list.append(es[k + 1])
    if not lo_list:
        return []
    lo = np.array(lo_list)
    hi = np.array(hi_list)
    # re-derive bracket endpoint signs with the solver's own stencil
    both = dk_de(np.concatenate([lo, hi]))
    flo, fhi = both[: lo.size], both[lo.size:]
    straddle = np.isfinite(flo) & np.isfinite(fhi) & (flo * fhi < 0.0)
    if not np.any(straddle):
        return []
    lo, hi, flo, fhi = lo[straddle], hi[straddle], flo[straddle], fhi[straddle]
    # batched Illinois: one derivative evaluation per round for all roots
    side = np.zeros(lo.size, dtype=int)
    for _ in range(40):
        width = hi - lo
        if np.all(width < 1e-12):
            break
        denom = np.where(fhi != flo, fhi - flo, 1.0)
        mid = hi - fhi * width / denom
        mid = np.clip(mid, lo + 1e-3 * width, hi - 1e-3 * width)
        fmid = dk_de(mid)
        take_hi = flo * fmid < 0.0
        hi = np.where(take_hi, mid, hi)
        fhi = np.where(take_hi, fmid, fhi)
        lo = np.where(take_hi, lo, mid)
        flo = np.where(take_hi, flo, fmid)
        # halve the stale endpoint when the same side repeats (Illinois)
        flo = np.where(take_hi & (side == 1), 0.5 * flo, flo)
        fhi = np.where(~take_hi & (side == -1), 0.5 * fhi, fhi)
        side = np.where(take_hi, 1, -1)
    roots = 0.5 * (lo + hi)
    orbits = _classify_batch(
        flow,
        np.stack([roots * math.cos(axis), roots * math.sin(axis)], axis=1),
        spec,
    )
    orbits.sort(key=lambda fo: fo.e)
    return orbits


def _default_seeds(spec: PhaseMapSpec) -> np.ndarray:
    e_top = min(spec.e_outer, spec.e_feasible * (1 - 1e-6)) * 0.92
    # geometric inner spacing: near-circular equilibria cluster at small e
    radii = e_top * np.array([0.015, 0.05, 0.12, 0.3, 0.6, 0.9])
    angles = np.arange(8) * (math.pi / 4.0)
    seeds = [(0.0, 0.0)]
    for r in radii:
        for t in angles:
            seeds.append((r * math.cos(t), r * math.sin(t)))
    return np.array(seeds)


def _newton_batch(
    flow: ReducedFlow,
    seeds: np.ndarray,
    e_cap: float,
    gtol: float,
    precise: bool,
    max_rounds: int,
    refine: bool = False,
    stall_tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on the K gradient for all seeds at once.

    Returns (final points, converged mask). Each round costs a constant
    number of batched evaluations regardless of the seed count. The
    ``refine`` estimator must match whatever later certifies the
    residual, or converged points read as unconverged downstream.
    A seed whose line search stalls with |g| below ``stall_tol`` counts
    as converged: that is the evaluation-noise floor, not a failure.
    """
    pts = np.atleast_2d(np.asarray(seeds, dtype=float)).copy()
    n = pts.shape[0]
    active = np.hypot(pts[:, 0], pts[:, 1]) <= e_cap
    converged = np.zeros(n, dtype=bool)
    for _ in range(max_rounds):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        g = flow.gradient_batch(pts[idx], refine=refine, precise=precise)
        gnorm = np.hypot(g[:, 0], g[:, 1])
        bad = ~np.isfinite(gnorm)
        done = (gnorm < gtol) & ~bad
        converged[idx[done]] = True
        active[idx[done | bad]] = False
        work = idx[~(done | bad)]
        if work.size == 0:
            continue
        gw = g[~(done | bad)]
        hess = flow.hessian_batch(pts[work], precise=precise)
        det = hess[:, 0, 0] * hess[:, 1, 1] - hess[:, 0, 1] ** 2
        ok_h = np.isfinite(det) & (np.abs(det) > 1e-300)
        active[work[~ok_h]] = False
        work = work[ok_h]
        if work.size == 0:
            continue
        gw = gw[ok_h]
        hw = hess[ok_h]
        det = det[ok_h]
        step = np.empty_like(gw)
        step[:, 0] = -(hw[:, 1, 1] * gw[:, 0] - hw[:, 0, 1] * gw[:, 1]) / det
        step[:, 1] = -(-hw[:, 1, 0] * gw[:, 0] + hw[:, 0, 0] * gw[:, 1]) / det
        gnorm_w = np.hypot(gw[:, 0], gw[:, 1])
        lam = np.ones(work.size)
        accepted = np.zeros(work.size, dtype=bool)
        trial_pts = pts[work].copy()
        for _ in range(4):
            pending = np.flatnonzero(~accepted)
            if pending.size == 0:
                break
            cand = pts[work[pending]] + lam[pending, None] * step[pending]
            inside = np.hypot(cand[:, 0], cand[:, 1]) <= e_cap
            g_new = np.full((pending.size, 2), np.nan)
            if np.any(inside):
                g_new[inside] = flow.gradient_batch(
                    cand[inside], refine=refine, precise=precise
                )
            better = (
                np.isfinite(g_new).all(axis=1)
                & (np.hypot(g_new[:, 0], g_new[:, 1]) < gnorm_w[pending])
            )
            take = pending[better]
            trial_pts[take] = cand[better]
            accepted[take] = True
            lam[pending[~better]] *= 0.5
        pts[work[accepted]] = trial_pts[accepted]
        if stall_tol is not None:
            stalled = ~accepted & (gnorm_w < stall_tol)
            converged[work[stalled]] = True
        active[work[~accepted]] = False
    return pts, converged


def frozen_both_axes(spec: PhaseMapSpec) -> list[FrozenOrbit]:
    """Frozen orbits on both +-pi/2 axes sharing one evaluator and scan."""
    flow = ReducedFlow(spec)
    orbits = frozen_on_axis(spec, -0.5 * math.pi, _flow=flow) + frozen_on_axis(
        spec, 0.5 * math.pi, _flow=flow
    )
    orbits.sort(key=lambda fo: fo.e)
    return orbits


def frozen_2d(spec: PhaseMapSpec, seeds=None, gtol_scale: float = 1e-10) -> list[FrozenOrbit]:
    """Damped-Newton search for stationary points in the Cartesian chart.

    All seeds iterate together: each Newton round issues one batched
    stencil evaluation, so the search costs a few dozen series setups
    regardless of the seed count. Seeds default to a polar lattice plus
    the on-axis roots; failed seeds are skipped and counted in a log
    record; duplicates within 1e-6 in the chart are merged.
    """
    flow = ReducedFlow(spec)
    if seeds is None:
        seeds = _default_seeds(spec)
        for axis in (0.5 * math.pi, -0.5 * math.pi):
            for fo in frozen_on_axis(spec, axis, _flow=flow):
                seeds = np.vstack(
                    [seeds, [fo.e * math.cos(fo.omega), fo.e * math.sin(fo.omega)]]
                )
    else:
        seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    k_scale, grad_noise = flow.solver_scales()
    if k_scale == 0.0:
        # flat flow: every point is trivially stationary, none isolated
        return []
    gtol = max(gtol_scale * k_scale, 1e-18)
    e_cap = spec.e_feasible * (1.0 - 1e-6) - 6.0 * flow._chart_step()

    # phase 1: cheap double-precision iterations take each seed to the
    # basin floor (they stall at the uncompensated noise floor); phase 2
    # polishes the deduplicated survivors with the compensated evaluator
    # down to the certified residual
    gtol_1 = max(3.0 * grad_noise, 1e-5 * k_scale, gtol)
    pts1, conv1 = _newton_batch(
        flow, seeds, e_cap, gtol_1, precise=False, max_rounds=25
    )
    inside = np.hypot(pts1[:, 0], pts1[:, 1]) <= e_cap
    g_end = flow.gradient_batch(pts1, refine=False, precise=False)
    g_end_norm = np.hypot(g_end[:, 0], g_end[:, 1])
    screen = max(30.0 * grad_noise, 1e-3 * k_scale)
    plausible = (inside & np.isfinite(g_end_norm) & (g_end_norm < screen)) | conv1
    failures = int(len(seeds) - plausible.sum())
    if failures:
        logger.info(
            "frozen_2d: %d of %d seeds did not reach a stationary basin",
            failures, len(seeds),
        )
    # cluster the survivors (best gradient first) and cap the polish set
    order = np.flatnonzero(plausible)
    order = order[np.argsort(np.where(np.isfinite(g_end_norm[order]), g_end_norm[order], np.inf))]
    distinct: list[tuple[float, float]] = []
    for x, y in pts1[order]:
        if all((x - fx) ** 2 + (y - fy) ** 2 > 1e-8 for fx, fy in distinct):
            distinct.append((float(x), float(y)))
        if len(distinct) >= 12:
            break
    if not distinct:
        return []
    pts2, conv2 = _newton_batch(
        flow, np.array(distinct), e_cap, gtol, precise=True, max_rounds=15,
        refine=True, stall_tol=1e-7 * k_scale,
    )
    found: list[tuple[float, float]] = []
    for x, y in pts2[conv2]:
        if all((x - fx) ** 2 + (y - fy) ** 2 > 1e-12 for fx, fy in found):
            found.append((float(x), float(y)))
    orbits = _classify_batch(flow, np.array(found) if found else np.empty((0, 2)), spec)
    orbits.sort(key=lambda fo: fo.e)
    return orbits


def ramp_models(spec: PhaseMapSpec, degrees) -> list[tuple[int, PhaseMap, list[FrozenOrbit]]]:
    """Phase map and axis-frozen orbits for each truncation degree.

    Per-degree inclination/eccentricity tables are cached process-wide,
    so degree n only adds its own terms on top of already-built ones.
    """
    out = []
    for d in degrees:
        model = MeanModelSpec(
            field=spec.model.field,
            n_max=int(d),
            include_j2sq=spec.model.include_j2sq,
            include_centering=spec.model.include_centering,
        )
        sub = PhaseMapSpec(
            a=spec.a,
            i_circ=spec.i_circ,
            model=model,
            resolution=spec.resolution,
            e_max=spec.e_max,
        )
        pmap = phase_map(sub)
        frozen = frozen_on_axis(sub, -0.5 * math.pi) + frozen_on_axis(sub, 0.5 * math.pi)
        frozen.sort(key=lambda fo: fo.e)
        out.append((int(d), pmap.with_frozen(frozen), frozen))
    return out
