"""Independent numerical back-ends used to verify every closed form.

Nothing in here shares algebra with the Kaula kernel: potentials are
evaluated by Legendre recursion in spherical coordinates, averages by
spectrally-exact periodic quadrature, inclination functions by discrete
Fourier projection, and the second-order Hamiltonian chain by central
finite-difference Poisson brackets in Delaunay variables.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ddmath import neumaier_sum
from .gravity import GravityField
from .kaula import OrbitGeometry, index_set

__all__ = [
    "SphericalPoint",
    "AnomalySet",
    "OracleAccuracyWarning",
    "legendre_p",
    "direct_potential",
    "keplerian_to_spherical",
    "mean_to_ecc",
    "ecc_to_true",
    "true_to_ecc",
    "mean_to_true",
    "true_to_mean",
    "average_over_mean_anomaly",
    "finite_difference_poisson_bracket",
    "fourier_fit_inclination",
]


class OracleAccuracyWarning(UserWarning):
    """A finite-difference result may be less accurate than requested."""


@dataclass(frozen=True)
class SphericalPoint:
    """Radius (km), geocentric latitude and longitude (rad)."""

    r: float
    lat: float
    lon: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")
        if abs(self.lat) > 0.5 * math.pi + 1e-12:
            raise ValueError("latitude outside [-pi/2, pi/2]")


def legendre_p(n: int, x: float) -> float:
    """Legendre polynomial P_n(x) by the three-term recursion."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    if abs(x) > 1.0 + 1e-12:
        raise ValueError("|x| must not exceed 1")
    p_prev, p = 1.0, x
    if n == 0:
        return 1.0
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


def _legendre_all(n_max: int, x) -> np.ndarray:
    """P_0..P_n stacked along the first axis; x may be an array."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _assoc_legendre(n: int, m: int, x: float) -> float:
    """Unnormalized associated Legendre P_{n,m}(x) (no Condon-Shortley)."""
    if m == 0:
        return legendre_p(n, x)
    somx2 = math.sqrt(max(0.0, 1.0 - x * x))
    pmm = 1.0
    for k in range(1, m + 1):
        pmm *= (2 * k - 1) * somx2
    if n == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if n == m + 1:
        return pmmp1
    for k in range(m + 2, n + 1):
        pmm, pmmp1 = pmmp1, ((2 * k - 1) * x * pmmp1 - (k + m - 1) * pmm) / (k - m)
    return pmmp1


def direct_potential(
    field: GravityField,
    point: SphericalPoint,
    zonal_only: bool = True,
    r_floor: float = 0.0,
) -> float:
    """Truncated spherical-harmonic potential at a point (km^2/s^2).

    Includes the n = 0 central term (C_{0,0} = 1 convention). With
    ``zonal_only`` false the retained tesseral records contribute too.
    """
    if point.r <= r_floor:
        raise ValueError(f"radius {point.r} at or below the {r_floor} km floor")
    sin_lat = math.sin(point.lat)
    ratio = field.reference_radius / point.r
    p_all = _legendre_all(field.n_max, sin_lat)
    total = 1.0
    power = 1.0
    for n in range(1, field.n_max + 1):
        power *= ratio
        c = field.zonal(n)
        if c != 0.0:
            total += power * c * float(p_all[n])
    if not zonal_only:
        for rec in field.tesserals:
            pnm = _assoc_legendre(rec.degree, rec.order, sin_lat)
            arg = rec.order * point.lon
            total += (
                ratio**rec.degree
                * (rec.c * math.cos(arg) + rec.s * math.sin(arg))
                * pnm
            )
    return -(field.mu / point.r) * total


def _rot1(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def _rot3(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def keplerian_to_spherical(
    g: OrbitGeometry, node: float, argp: float, f: float
) -> SphericalPoint:
    """Position of the orbiter in spherical coordinates.

    Applies R3(-node) R1(-I) R3(-theta) to (r, 0, 0) with r from the
    conic equation; satisfies sin(lat) = sin(I) sin(theta).
    """
    r = g.p / (1.0 + g.e * math.cos(f))
    theta = f + argp
    vec = _rot3(-node) @ _rot1(-g.inc) @ _rot3(-theta) @ np.array([r, 0.0, 0.0])
    x, y, z = vec
    lat = math.asin(max(-1.0, min(1.0, z / r)))
    lon = math.atan2(y, x)
    return SphericalPoint(r=r, lat=lat, lon=lon)


# --- anomaly conversions --------------------------------------------------


def mean_to_ecc(e: float, mean: float) -> float:
    """Solve Kepler's equation E - e sin E = M by bracketed Newton.

    M is reduced to [-pi, pi] (the whole-revolution offset transfers to E
    unchanged), the root is bracketed inside [M - e, M + e], and Newton
    steps falling outside the bracket fall back to bisection. Smooth in M
    across revolutions; residual < 1e-13 for e <= 0.95.
    """
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity {e} outside [0, 1)")
    k = math.floor((mean + math.pi) / (2.0 * math.pi))
    m_r = mean - 2.0 * math.pi * k
    lo, hi = m_r - e, m_r + e
    ecc = m_r + 0.85 * e * (1.0 if math.sin(m_r) >= 0.0 else -1.0)
    for _ in range(80):
        resid = ecc - e * math.sin(ecc) - m_r
        if resid > 0.0:
            hi = min(hi, ecc)
        else:
            lo = max(lo, ecc)
        step = resid / (1.0 - e * math.cos(ecc))
        nxt = ecc - step
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - ecc) < 1e-16 * max(1.0, abs(ecc)):
            ecc = nxt
            break
        ecc = nxt
    return ecc + 2.0 * math.pi * k


def ecc_to_true(e: float, ecc: float) -> float:
    """True anomaly from eccentric anomaly, continuous in E (no atan2 cut)."""
    beta = e / (1.0 + math.sqrt(1.0 - e * e))
    return ecc + 2.0 * math.atan2(beta * math.sin(ecc), 1.0 - beta * math.cos(ecc))


def true_to_ecc(e: float, f: float) -> float:
    beta = e / (1.0 + math.sqrt(1.0 - e * e))
    return f - 2.0 * math.atan2(beta * math.sin(f), 1.0 + beta * math.cos(f))


def ecc_to_mean(e: float, ecc: float) -> float:
    return ecc - e * math.sin(ecc)


def mean_to_true(e: float, mean: float) -> float:
    return ecc_to_true(e, mean_to_ecc(e, mean))


def true_to_mean(e: float, f: float) -> float:
    return ecc_to_mean(e, true_to_ecc(e, f))


@dataclass(frozen=True)
class AnomalySet:
    """Consistent anomaly triple plus argument of latitude at a given argp."""

    f: float
    ecc_anomaly: float
    mean_anomaly: float
    theta: float
    center_eq: float

    @classmethod
    def from_mean(cls, e: float, mean: float, argp: float = 0.0) -> "AnomalySet":
        ecc = mean_to_ecc(e, mean)
        f = ecc_to_true(e, ecc)
        return cls(f=f, ecc_anomaly=ecc, mean_anomaly=mean, theta=f + argp, center_eq=f - mean)

    @classmethod
    def from_true(cls, e: float, f: float, argp: float = 0.0) -> "AnomalySet":
        ecc = true_to_ecc(e, f)
        mean = ecc_to_mean(e, ecc)
        return cls(f=f, ecc_anomaly=ecc, mean_anomaly=mean, theta=f + argp, center_eq=f - mean)


# --- averaging quadrature -------------------------------------------------


def average_over_mean_anomaly(
    integrand,
    g: OrbitGeometry,
    max_f_degree: int,
    rule: str = "trapezoid",
) -> float:
    """(1/2pi) closed integral of integrand(f) r^2/(a^2 eta) df.

    This is the mean-anomaly average computed through the angular-
    momentum relation a^2 eta dl = r^2 df, never by solving Kepler's
    equation inside the quadrature. The uniform-grid trapezoid rule is
    spectrally exact for trigonometric polynomials; Gauss-Legendre is
    retained as a cross-check mode. ``integrand`` may accept an ndarray.
    """
    n = 4 * max(1, max_f_degree) + 8
    e, eta = g.e, g.eta
    if rule == "trapezoid":
        f_nodes = np.arange(n) * (2.0 * math.pi / n)
        weights = np.full(n, 1.0 / n)
    elif rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(n)
        f_nodes = math.pi * (x + 1.0)
        weights = w * 0.5
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    jac = eta**3 / (1.0 + e * np.cos(f_nodes)) ** 2
    try:
        samples = np.asarray(integrand(f_nodes), dtype=float)
        if samples.shape != f_nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        samples = np.array([float(integrand(fk)) for fk in f_nodes])
    if not np.all(np.isfinite(samples)):
        raise ValueError("integrand produced a non-finite sample")
    # compensated sum: high-degree integrands oscillate orders of magnitude
    # above their mean, so naive accumulation loses digits of the average
    return neumaier_sum(weights * samples * jac)


# --- finite-difference Poisson brackets ------------------------------------

_PAIRS = (("ell", "L"), ("g", "G"), ("h", "H"))
_ANGLES = {"ell", "g", "h"}


def _partial(func, state, name: str, step: float, richardson: bool = True) -> float:
    def diff(h: float) -> float:
        plus = dataclasses.replace(state, **{name: getattr(state, name) + h})
        minus = dataclasses.replace(state, **{name: getattr(state, name) - h})
        return (func(plus) - func(minus)) / (2.0 * h)

    if not richardson:
        return diff(step)
    d1 = diff(step)
    d2 = diff(0.5 * step)
    return (4.0 * d2 - d1) / 3.0


def _steps_for(state, angle_step: float, action_rel_step: float) -> dict[str, float]:
    steps = {}
    for name in ("ell", "g", "h"):
        steps[name] = angle_step
    for name in ("L", "G", "H"):
        mag = max(abs(getattr(state, name)), abs(state.L))
        steps[name] = action_rel_step * mag
    return steps


def finite_difference_poisson_bracket(
    func_f,
    func_g,
    state,
    angle_step: float = 1e-6,
    action_rel_step: float = 1e-6,
    richardson: bool = True,
) -> float:
    """{F, G} via central differences over the conjugate Delaunay pairs.

    ``state`` is any dataclass carrying fields (ell, g, h, L, G, H).
    Steps: fixed for angles, scaled by the action magnitude otherwise;
    one Richardson level per partial. Emits OracleAccuracyWarning when a
    step underflows the state component.
    """
    steps = _steps_for(state, angle_step, action_rel_step)
    for name, h in steps.items():
        if getattr(state, name) != 0.0 and abs(h) < 1e-14 * abs(getattr(state, name)):
            warnings.warn(
                f"step for {name} underflows the state component", OracleAccuracyWarning
            )
    total = 0.0
    for q, p in _PAIRS:
        df_dq = _partial(func_f, state, q, steps[q], richardson)
        df_dp = _partial(func_f, state, p, steps[p], richardson)
        dg_dq = _partial(func_g, state, q, steps[q], richardson)
        dg_dp = _partial(func_g, state, p, steps[p], richardson)
        total += df_dq * dg_dp - df_dp * dg_dq
    return total


# --- Fourier-projection oracle for inclination functions -------------------


def fourier_fit_inclination(i: int, j: int, inc: float) -> float:
    """Extract F_{i,j} from sampled P_i(s sin theta) by discrete projection.

    The definitional identity P_i(s sin theta) = sum_j F_{i,j}
    cos[(i-2j) theta - i_pi] makes each F a Fourier coefficient; exact
    for a uniform grid with more than 2i+1 nodes.
    """
    if i < 2 or i > 60:
        raise ValueError("projection oracle supports 2 <= i <= 60")
    if not 0 <= j <= i:
        raise ValueError(f"index j = {j} outside 0..{i}")
    n = 4 * (i + 2)
    theta = np.arange(n) * (2.0 * math.pi / n)
    samples = _legendre_all(i, math.sin(inc) * np.sin(theta))[i]
    m = i - 2 * j
    if index_set(i).i_star == 0:
        basis = np.cos(m * theta)
    else:
        basis = np.sin(m * theta)
    return float(np.dot(samples, basis) / n)
