"""Mean-elements Hamiltonian assembly.

First-order model: Kepler term plus the Kaula-averaged zonal sum. For
earth-like scaling the compact second-order C_{2,0}^2 correction is
added from the encoded coefficient tables; the intermediate objects
(explicit V_2, the parallax generating function W_1 with its Kozai-like
constant, and the full second-order intermediate Hamiltonian) exist so
the tables can be verified against finite-difference Poisson brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gravity import GravityField
from .kaula import OrbitGeometry, averaged_vi, osculating_vi
from . import oracle

__all__ = [
    "DelaunayState",
    "MeanModelSpec",
    "q_coeff",
    "qtilde_coeff",
    "v2_explicit",
    "w1_parallax",
    "tilde_h02",
    "h02_parallax_mean",
    "mean_hamiltonian",
    "j2sq_correction",
    "h01_parallax",
    "h10_osculating",
    "h20_osculating",
    "w1_of_state",
    "tilde_h02_of_state",
]


@dataclass(frozen=True)
class DelaunayState:
    """Delaunay variables (rad, km^2/s) tied to a gravitational parameter."""

    ell: float
    g: float
    h: float
    L: float
    G: float
    H: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.G <= self.L * (1.0 + 1e-12):
            raise ValueError("actions must satisfy 0 < G <= L")
        if abs(self.H) > self.G * (1.0 + 1e-12):
            raise ValueError("|H| must not exceed G")

    @classmethod
    def from_elements(
        cls, mu: float, a: float, e: float, inc: float,
        ell: float = 0.0, g: float = 0.0, h: float = 0.0,
    ) -> "DelaunayState":
        big_l = math.sqrt(mu * a)
        big_g = big_l * math.sqrt(1.0 - e * e)
        return cls(ell=ell, g=g, h=h, L=big_l, G=big_g, H=big_g * math.cos(inc), mu=mu)

    @property
    def a(self) -> float:
        return self.L * self.L / self.mu

    @property
    def e(self) -> float:
        ratio = self.G / self.L
        return math.sqrt(max(0.0, 1.0 - ratio * ratio))

    @property
    def eta(self) -> float:
        return self.G / self.L

    @property
    def inc(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.H / self.G)))

    @property
    def mean_motion(self) -> float:
        return self.mu * self.mu / self.L**3

    def geometry(self) -> OrbitGeometry:
        return OrbitGeometry(a=self.a, e=self.e, inc=self.inc)

    def true_anomaly(self) -> float:
        return oracle.mean_to_true(self.e, self.ell)


@dataclass(frozen=True)
class MeanModelSpec:
    """Which degrees and which second-order terms enter the averaged model."""

    field: GravityField
    n_max: int
    include_j2sq: bool = False
    include_centering: bool = False
    degrees: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n_max < 2 or self.n_max > self.field.n_max:
            raise ValueError(f"n_max {self.n_max} outside 2..{self.field.n_max}")
        if self.include_centering and not self.include_j2sq:
            raise ValueError("include_centering requires include_j2sq")
        if self.degrees is not None:
            degs = tuple(sorted(set(int(d) for d in self.degrees)))
            if degs and (degs[0] < 2 or degs[-1] > self.n_max):
                raise ValueError("degree toggles outside 2..n_max")
            object.__setattr__(self, "degrees", degs)

    @property
    def active_degrees(self) -> tuple[int, ...]:
        if self.degrees is not None:
            return self.degrees
        return tuple(range(2, self.n_max + 1))

    @classmethod
    def for_field(
        cls,
        field: GravityField,
        n_max: int | None = None,
        include_j2sq: bool | None = None,
        include_centering: bool = False,
        degrees=None,
    ) -> "MeanModelSpec":
        """Spec with the earth-like/moon-like second-order default.

        Bodies where |C_30 / C_20^2| exceeds 10 have no dominant oblateness
        scaling (moon-like): second-order C_20 effects stay off by default.
        """
        n_max = field.n_max if n_max is None else n_max
        if include_j2sq is None:
            c20 = field.zonal(2)
            c30 = field.zonal(3)
            moon_like = c20 == 0.0 or abs(c30 / (c20 * c20)) > 10.0
            include_j2sq = not moon_like
        return cls(
            field=field,
            n_max=n_max,
            include_j2sq=include_j2sq,
            include_centering=include_centering and include_j2sq,
            degrees=tuple(degrees) if degrees is not None else None,
        )


# --- second-order coefficient tables --------------------------------------


def q_coeff(j: int, l: int, g: OrbitGeometry) -> float:
    """Closed-form q_{j,l}(e, s, eta); zero for any cell absent from the table."""
    e, s, eta = g.e, g.s, g.eta
    e2, s2 = e * e, s * s
    s4 = s2 * s2
    if j == 0:
        if l == 0:
            q20 = (3.0 / 64.0) * e2 * (5.0 * s4 + 8.0 * s2 - 8.0)
            return q20 - (21.0 * s4 - 42.0 * s2 + 20.0) / 16.0
        if abs(l) == 1:
            # the j = 0 row starts at l = -1 (index-convention lower limit);
            # the mirror cell equals the printed l = 1 value and is required
            # by the finite-difference bracket identity
            return (3.0 / 64.0) * e2 * s2 * (14.0 - 15.0 * s2)
    elif j == 1:
        if l == 0:
            return -(e / 32.0) * (27.0 * s4 - 108.0 * s2 + 64.0)
        if l == 1:
            return (7.0 / 16.0) * e * s2 * (11.0 - 12.0 * s2)
    elif j == 2:
        if l == 0:
            return (3.0 / 64.0) * e2 * (5.0 * s4 + 8.0 * s2 - 8.0)
        if l == 1:
            return (3.0 / 16.0) * e2 * s2 * (2.0 - s2) + (s2 / 8.0) * (20.0 - 21.0 * s2)
        if l == 2:
            return -(15.0 / 128.0) * e2 * s4
    elif j == 3:
        if l == 1:
            return (3.0 / 16.0) * e * s2 * (8.0 * s2 - 5.0)
        if l == 2:
            return -(9.0 / 64.0) * e * s4
    elif j == 4:
        if l == 1:
            return (3.0 / 32.0) * e2 * s2 * (13.0 * s2 - 10.0)
        if l == 2:
            return (3.0 / 64.0) * (4.0 - e2) * s4
    elif j == 5:
        if l == 2:
            return (15.0 / 64.0) * e * s4
    elif j == 6:
        if l == 2:
            return (9.0 / 128.0) * e2 * s4
    return 0.0


def qtilde_coeff(j: int, l: int, g: OrbitGeometry) -> float:
    """Closed-form q~_{j,l}(e, s, eta); zero for any cell absent from the table."""
    e, s, eta = g.e, g.s, g.eta
    e2, s2 = e * e, s * s
    chi_p = 1.0 + eta
    chi_m = 1.0 - eta
    if j == 0:
        if abs(l) == 1:
            return (3.0 / 16.0) * e * (1.0 + 2.0 * eta) * (4.0 - 5.0 * s2)
    elif j == 1:
        if l == -2:
            return -(3.0 / 256.0) * e2 * s2 * chi_m
        if l == -1:
            return (3.0 / 128.0) * (
                (9.0 - 42.0 * eta - 31.0 * eta * eta) * s2
                - (2.0 / 3.0) * (5.0 - 54.0 * eta - 39.0 * eta * eta)
            ) * chi_m
        if l == 0:
            return (3.0 / 128.0) * (2.0 + 23.0 * eta - 31.0 * eta * eta) * s2 * chi_p \
                - (3.0 / 16.0) * e2 * (1.0 + 2.0 * eta)
        if l == 1:
            return (3.0 / 128.0) * (
                (37.0 * eta * eta - 14.0 * eta - 83.0) * s2
                + (58.0 + 12.0 * eta - 30.0 * eta * eta)
            ) * chi_p
        if l == 2:
            return (3.0 / 256.0) * (21.0 + 18.0 * eta + eta * eta) * s2 * chi_m
    elif j == 2:
        if l == -1:
            return (e / 8.0) * (3.0 * s2 - 2.0) * chi_m
        if l == 0:
            return (3.0 / 32.0) * e * ((15.0 * s2 - 8.0) * eta - 4.0)
        if l == 1:
            return -(3.0 / 8.0) * e * (3.0 * s2 - 2.0) * chi_p
        if l == 2:
            return (15.0 / 32.0) * e * (eta + 2.0) * s2
    elif j == 3:
        if l == -1:
            return (3.0 / 16.0) * e * qtilde_coeff(2, -1, g)
        if l == 0:
            return (3.0 / 256.0) * (61.0 * eta * eta + 66.0 * eta - 23.0) * s2 * chi_m \
                - (3.0 / 16.0) * e2 * (1.0 + 2.0 * eta)
        if l == 1:
            return (3.0 / 16.0) * e * qtilde_coeff(2, 1, g)
        if l == 2:
            return (9.0 / 256.0) * (39.0 - 6.0 * eta - 5.0 * eta * eta) * s2 * chi_p
    elif j == 4:
        if l == 0:
            return -(9.0 / 32.0) * e * s2 * chi_m
        if l == 2:
            return (27.0 / 32.0) * e * s2 * chi_p
    elif j == 5:
        if l == 0:
            return (5.0 / 24.0) * e * qtilde_coeff(4, 0, g)
        if l == 2:
            return (5.0 / 24.0) * e * qtilde_coeff(4, 2, g)
    return 0.0


# --- intermediate objects of the parallax stage ----------------------------


def v2_explicit(field: GravityField, g: OrbitGeometry, omega: float, f: float) -> float:
    """The displayed degree-2 expansion of V_2 (five trigonometric terms)."""
    e, s, eta = g.e, g.s, g.eta
    s2 = s * s
    scale = -(field.reference_radius / g.a) ** 2 * field.zonal(2) / eta**3
    secular = 0.25 * (2.0 - 3.0 * s2) * (1.0 + e * math.cos(f))
    long_per = (3.0 / 8.0) * s2 * (
        e * math.cos(f + 2.0 * omega)
        + 2.0 * math.cos(2.0 * f + 2.0 * omega)
        + e * math.cos(3.0 * f + 2.0 * omega)
    )
    return scale * (secular + long_per)


_W1_Q_LABELS = ("Q0", "Q1", "Q2", "Q3")


def w1_q_factors(e: float) -> tuple[float, float, float, float]:
    """Q_0..Q_3 of the parallax generating function; Q_0 is the Kozai-like constant."""
    eta = math.sqrt(1.0 - e * e)
    return (e * e * (1.0 + 2.0 * eta) / (1.0 + eta) ** 2, 3.0 * e, 3.0, e)


def w1_parallax(field: GravityField, g: OrbitGeometry, omega: float, f: float) -> float:
    """First-order generating function of the elimination of the parallax (km^2/s).

    The f-free Q_0 summand is the integration constant that keeps W_1
    free of hidden long-period content: its mean-anomaly average is zero.
    """
    e, s, eta = g.e, g.s, g.eta
    action_g = math.sqrt(field.mu * g.a) * eta
    q = w1_q_factors(e)
    series = e * (4.0 - 6.0 * s * s) * math.sin(f)
    series += s * s * sum(q[i] * math.sin(i * f + 2.0 * omega) for i in range(4))
    return action_g * (field.reference_radius / g.p) ** 2 * (field.zonal(2) / 8.0) * series


def _vi_tail(field: GravityField, g: OrbitGeometry, omega: float, f: float) -> float:
    """sum_{i>=3} V_i over the field's table."""
    return sum(
        osculating_vi(field, i, g, omega, f) for i in range(3, field.n_max + 1)
    )


def tilde_h02(field: GravityField, state: DelaunayState, f: float) -> float:
    """Intermediate second-order Hamiltonian before its f-free selection.

    Full double sum over the coefficient tables (j = 0..6, l = -2..2)
    plus the -2 sum_{i>=3} V_i tail, times the (mu/a)(a^2 eta / r^2)
    front factor. Equals {H01, W1} + {H10, W1} + H20.
    """
    g = state.geometry()
    omega = state.g
    e, s, eta = g.e, g.s, g.eta
    r = g.p / (1.0 + e * math.cos(f))
    front = (field.mu / g.a) * (g.a * g.a * eta / (r * r))
    kappa = e * s * s / (1.0 + eta) ** 2
    double_sum = 0.0
    for j in range(0, 7):
        for l in range(-2, 3):
            coeff = q_coeff(j, l, g) + kappa * qtilde_coeff(j, l, g)
            if coeff != 0.0:
                double_sum += coeff * math.cos(j * f + 2 * l * omega)
    c20 = field.zonal(2)
    body = (
        c20 * c20 * (field.reference_radius / g.p) ** 4 * eta * double_sum
        - 2.0 * _vi_tail(field, g, omega, f)
    )
    return front * body


def h02_parallax_mean(field: GravityField, g: OrbitGeometry, omega: float) -> float:
    """f-free part of the second-order intermediate, as coefficient of (a^2 eta/r^2).

    The explicit r-dependence stays untouched by the parallax selection,
    so this returns X with H_{0,2} = (a^2 eta / r^2) X; averaging X over
    f with unit weight is the downstream Delaunay step.
    """
    e, s, eta = g.e, g.s, g.eta
    kappa = e * s * s / (1.0 + eta) ** 2
    q00 = q_coeff(0, 0, g)
    q01 = q_coeff(0, 1, g)
    qt01 = qtilde_coeff(0, 1, g)
    c20 = field.zonal(2)
    bracket = 0.5 * q00 + (q01 + kappa * qt01) * math.cos(2.0 * omega)
    tail = sum(averaged_vi(field, i, g, omega) for i in range(3, field.n_max + 1))
    return 2.0 * (field.mu / g.a) * (
        c20 * c20 * (field.reference_radius / g.p) ** 4 * eta * bracket - tail
    )


# --- state-function wrappers for the bracket oracle -------------------------


def h01_parallax(field: GravityField, state: DelaunayState) -> float:
    """H_{0,1} of the parallax stage: -(mu/a)(a^2 eta/r^2) <V_2>_f."""
    g = state.geometry()
    f = state.true_anomaly()
    r = g.p / (1.0 + g.e * math.cos(f))
    return -(field.mu / g.a) * (g.a * g.a * g.eta / (r * r)) * averaged_vi(
        field, 2, g, state.g
    )


def h10_osculating(field: GravityField, state: DelaunayState) -> float:
    """H_{1,0}: -(mu/a)(a^2 eta/r^2) V_2 at the state's anomaly."""
    g = state.geometry()
    f = state.true_anomaly()
    r = g.p / (1.0 + g.e * math.cos(f))
    return -(field.mu / g.a) * (g.a * g.a * g.eta / (r * r)) * osculating_vi(
        field, 2, g, state.g, f
    )


def h20_osculating(field: GravityField, state: DelaunayState) -> float:
    """H_{2,0}: -2 (mu/a)(a^2 eta/r^2) sum_{i>=3} V_i at the state's anomaly."""
    g = state.geometry()
    f = state.true_anomaly()
    r = g.p / (1.0 + g.e * math.cos(f))
    return -2.0 * (field.mu / g.a) * (g.a * g.a * g.eta / (r * r)) * _vi_tail(
        field, g, state.g, f
    )


def w1_of_state(field: GravityField, state: DelaunayState) -> float:
    return w1_parallax(field, state.geometry(), state.g, state.true_anomaly())


def tilde_h02_of_state(field: GravityField, state: DelaunayState) -> float:
    return tilde_h02(field, state, state.true_anomaly())


# --- the mean-elements Hamiltonian -----------------------------------------


def j2sq_correction(
    field: GravityField, g: OrbitGeometry, omega: float, include_centering: bool
) -> float:
    """Second-order C_20^2 contribution to the mean Hamiltonian (km^2/s^2)."""
    e, s, eta = g.e, g.s, g.eta
    s2 = s * s
    c20 = field.zonal(2)
    q00 = q_coeff(0, 0, g)
    q01 = q_coeff(0, 1, g)
    cos2w_coeff = q01
    if include_centering:
        cos2w_coeff += (e * s2 / (1.0 + eta) ** 2) * qtilde_coeff(0, 1, g)
    bracket = (
        -((1.0 + 3.0 * eta) / 32.0) * (2.0 - 3.0 * s2) ** 2
        + 0.5 * q00
        + cos2w_coeff * math.cos(2.0 * omega)
    )
    return (
        (field.mu / g.a)
        * c20 * c20
        * eta
        * (field.reference_radius / g.p) ** 4
        * bracket
    )


def mean_hamiltonian(
    spec: MeanModelSpec, a: float, e: float, inc: float, omega: float
) -> float:
    """Mean-elements Hamiltonian at mean elements (a, e, I, omega), km^2/s^2.

    Always: -mu/2a - (mu/a) sum over active degrees of <V_i>_f. With
    ``include_j2sq`` the compact second-order C_20^2 block (secular plus
    cos 2w) is added; ``include_centering`` retains the q~_{0,1} term
    inherited from the Kozai-like constant.
    """
    if e >= 1.0 or e < 0.0:
        raise ValueError(f"eccentricity {e} outside [0, 1)")
    field = spec.field
    g = OrbitGeometry(a=a, e=e, inc=inc)
    total = -0.5 * field.mu / a
    total -= (field.mu / a) * sum(
        averaged_vi(field, i, g, omega) for i in spec.active_degrees
    )
    if spec.include_j2sq:
        total += j2sq_correction(field, g, omega, spec.include_centering)
    return total
