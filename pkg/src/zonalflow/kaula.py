"""Closed-form Kaula kernel for the zonal problem.

Index conventions, inclination functions F_{i,j}, eccentricity functions
G_{i,j} (exact in e, no series expansion), the osculating V_i and its
mean-anomaly-free part <V_i>_f, and the structured averaged series.

The inclination polynomials are built once per (i, j) as exact rational
prefactors and evaluated with compensated (double-double) Horner steps:
by degree ~50 the alternating terms reach ~1e13 while the function value
stays O(1), so plain double evaluation would lose ~9 digits near s -> 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, cached_property
from math import comb, factorial

import numpy as np

from .ddmath import dd_from_fraction, dd_horner, dd_mul_f, two_prod
from .gravity import GravityField

__all__ = [
    "IndexSet",
    "index_set",
    "OrbitGeometry",
    "inclination_function",
    "eccentricity_function",
    "osculating_vi",
    "averaged_vi",
    "cos_power_reduction",
    "AveragedTerm",
    "AveragedSeries",
    "build_mean_series",
]


@dataclass(frozen=True)
class IndexSet:
    """Parity bookkeeping for a summation index i (and offset m)."""

    i_star: int
    i_pi: float
    i_m: int
    i_m_star: int


def index_set(i: int, m: int = 0) -> IndexSet:
    """i* = i mod 2, i_pi = (pi/2) i*, i_m = floor((i-m)/2), i_m* = i_m + i*."""
    if i < 0:
        raise ValueError("index i must be non-negative")
    i_star = i % 2
    i_m = (i - m) // 2
    return IndexSet(i_star=i_star, i_pi=0.5 * math.pi * i_star, i_m=i_m, i_m_star=i_m + i_star)


@dataclass(frozen=True)
class OrbitGeometry:
    """Semi-major axis (km), eccentricity, inclination (rad) with derived shorthands."""

    a: float
    e: float
    inc: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("semi-major axis must be positive")
        if not 0.0 <= self.e < 1.0:
            raise ValueError(f"eccentricity {self.e} outside [0, 1)")

    @property
    def eta(self) -> float:
        return math.sqrt(1.0 - self.e * self.e)

    @property
    def p(self) -> float:
        return self.a * (1.0 - self.e * self.e)

    @property
    def s(self) -> float:
        return math.sin(self.inc)

    @property
    def c(self) -> float:
        return math.cos(self.inc)


# --- inclination functions ---------------------------------------------------


@lru_cache(maxsize=None)
def _incl_fraction_terms(i: int, j: int) -> tuple[tuple[int, Fraction], ...]:
    """Exact rational terms of F_{i,j}: pairs (power of s^2, coefficient).

    F_{i,j}(s) = s^(i mod 2) * sum coef * (s^2)^power, from the direct
    summation l = 0..min(j, floor(i/2)); binomials with mismatched
    upper/lower index contribute zero.
    """
    i0 = i // 2
    terms = []
    for l in range(0, min(j, i0) + 1):
        b = comb(i - 2 * l, j - l) if j - l <= i - 2 * l else 0
        if b == 0:
            continue
        sign = -1 if (j - l - i0) % 2 else 1
        num = sign * factorial(2 * i - 2 * l) * b
        den = factorial(l) * factorial(i - l) * factorial(i - 2 * l) * (1 << (2 * i - 2 * l))
        terms.append((i0 - l, Fraction(num, den)))
    return tuple(terms)


@lru_cache(maxsize=None)
def _incl_matrix(i: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense dd coefficient matrix of F_{i,j} for all j = 0..i.

    Shape (i+1, i0+1), powers of x = s^2 in descending order for Horner.
    """
    i0 = i // 2
    hi = np.zeros((i + 1, i0 + 1))
    lo = np.zeros((i + 1, i0 + 1))
    for j in range(i + 1):
        for power, coef in _incl_fraction_terms(i, j):
            h, l = dd_from_fraction(coef)
            hi[j, i0 - power] = h
            lo[j, i0 - power] = l
    return hi, lo


def _incl_block(i: int, s) -> np.ndarray:
    """F_{i,j}(s) for all j = 0..i; s scalar or (N,) array -> (..., i+1)."""
    hi, lo = _incl_matrix(i)
    s_arr = np.asarray(s, dtype=float)
    xh, xl = two_prod(s_arr, s_arr)
    vh, vl = dd_horner(hi, lo, xh[..., None], xl[..., None])
    if i % 2:
        vh, vl = dd_mul_f(vh, vl, s_arr[..., None])
    return vh + vl


def inclination_function(i: int, j: int, s: float) -> float:
    """Kaula inclination function F_{i,j} for the zonal problem, at sin I = s."""
    if i < 2:
        raise ValueError("degree must be >= 2")
    if not 0 <= j <= i:
        raise ValueError(f"index j = {j} outside 0..{i}")
    if abs(s) > 1.0:
        raise ValueError("|sin I| must not exceed 1")
    return float(_incl_block(i, s)[j])


# --- eccentricity functions ---------------------------------------------------


@lru_cache(maxsize=None)
def _ecc_coeffs(i: int, j: int) -> tuple[int, tuple[float, ...]]:
    """(leading e power, Horner coefficients in e^2, descending) of G_{i,j} * eta^(2i-1).

    Rearranged Kaula form: jt = j for i >= 2j else i - j, summand l = 0..jt-1
    with q = 2l + i - 2jt; empty sum (jt <= 0) gives zero.
    """
    jt = j if i >= 2 * j else i - j
    if jt <= 0:
        return 0, ()
    base = i - 2 * jt
    coeffs = []
    for l in range(jt):
        q = 2 * l + base
        coeffs.append(float(Fraction(comb(i - 1, q) * comb(q, l), 1 << q)))
    return base, tuple(reversed(coeffs))


def eccentricity_function(i: int, j: int, e: float) -> float:
    """Kaula eccentricity function G_{i,j}, exact in e (zonal averaging case)."""
    if i < 2:
        raise ValueError("degree must be >= 2")
    if not 0 <= j <= i:
        raise ValueError(f"index j = {j} outside 0..{i}")
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity {e} outside [0, 1)")
    base, coeffs = _ecc_coeffs(i, j)
    if not coeffs:
        return 0.0
    x = e * e
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    eta = math.sqrt(1.0 - x)
    return acc * e**base * eta ** (1 - 2 * i)


# --- osculating and averaged potential coefficients ---------------------------


def osculating_vi(field: GravityField, i: int, g: OrbitGeometry, omega: float, f):
    """V_i of the orbital-element potential expansion at true anomaly f.

    Direct evaluation of the double sum: the inner binomial sum over
    cos^k f collapses to (1 + e cos f)^(i-1); the j sum runs over the
    inclination functions with argument (i-2j)(f+omega) - i_pi. ``f``
    may be a float or an ndarray.
    """
    if not 2 <= i <= field.n_max:
        raise ValueError(f"degree {i} outside 2..{field.n_max}")
    c_i = field.zonal(i)
    f_arr = np.asarray(f, dtype=float)
    if c_i == 0.0:
        out = np.zeros_like(f_arr)
        return float(out) if np.isscalar(f) or f_arr.ndim == 0 else out
    idx = index_set(i)
    e, eta, s = g.e, g.eta, g.s
    pref = (
        (field.reference_radius / g.a) ** i
        * c_i
        * eta ** (1 - 2 * i)
        * (1.0 + e * np.cos(f_arr)) ** (i - 1)
    )
    theta = f_arr + omega
    f_vals = _incl_block(i, s)  # (i+1,)
    multipliers = i - 2 * np.arange(i + 1)
    angles = np.multiply.outer(theta, multipliers) - idx.i_pi
    total = np.cos(angles) @ f_vals
    out = pref * total
    return float(out) if np.isscalar(f) or f_arr.ndim == 0 else out


def _averaged_fg(field: GravityField, i: int, e: float, eta: float, s: float) -> np.ndarray:
    """Per-term coefficients (2 - delta) F G (R/a-free) for degree i."""
    idx = index_set(i, 2)
    i2 = idx.i_m
    j0 = index_set(i).i_m_star  # i_0* = floor(i/2) + i*
    f_all = _incl_block(i, s)
    out = np.empty(i2 + 1)
    for j_rel in range(i2 + 1):
        j_abs = j0 + j_rel
        weight = 1.0 if (j_rel + idx.i_star) == 0 else 2.0
        out[j_rel] = weight * f_all[j_abs] * eccentricity_function(i, j_abs, e)
    return out


def averaged_vi(field: GravityField, i: int, g: OrbitGeometry, omega: float) -> float:
    """<V_i>_f: the f-free part of V_i, via the reorganized single sum.

    sum_{j=0..i_2} (2 - delta_{j+i*,0}) F_{i,i0*+j} G_{i,i0*+j}
    cos[(2j + i*) omega + i_pi], scaled by (R/a)^i C_{i,0}.
    """
    if not 2 <= i <= field.n_max:
        raise ValueError(f"degree {i} outside 2..{field.n_max}")
    c_i = field.zonal(i)
    if c_i == 0.0:
        return 0.0
    idx = index_set(i)
    coeffs = _averaged_fg(field, i, g.e, g.eta, g.s)
    mults = 2 * np.arange(coeffs.size) + idx.i_star
    angles = mults * omega + idx.i_pi
    scale = (field.reference_radius / g.a) ** i * c_i
    return float(scale * (coeffs @ np.cos(angles)))


def averaged_amplitude(field: GravityField, i: int, g: OrbitGeometry) -> float:
    """Harmonic amplitude bound of <V_i>_f over omega: sum of |term| coefficients."""
    if not 2 <= i <= field.n_max:
        raise ValueError(f"degree {i} outside 2..{field.n_max}")
    c_i = field.zonal(i)
    if c_i == 0.0:
        return 0.0
    coeffs = _averaged_fg(field, i, g.e, g.eta, g.s)
    return (field.reference_radius / g.a) ** i * abs(c_i) * float(np.sum(np.abs(coeffs)))


def cos_power_reduction(k: int, m: int) -> list[tuple[int, float]]:
    """Linearization cos^k f * cos(m f) = sum_l w_l cos((m - k + 2l) f).

    Returns (multiplier, weight) pairs for l = 0..k with weight
    binom(k, k-l)/2^k; the same table applies to the sine analogue.
    """
    if k < 0:
        raise ValueError("power k must be non-negative")
    scale = 1 << k
    return [(m - k + 2 * l, comb(k, k - l) / scale) for l in range(k + 1)]


# --- structured averaged series -----------------------------------------------


@dataclass(frozen=True)
class AveragedTerm:
    """One term of the averaged series: prefactor (R/a)^degree F G cos(mult w + phase).

    ``j`` indexes the inclination/eccentricity function pair F_{degree,j},
    G_{degree,j}; ``prefactor`` carries (2 - delta) C_{degree,0}.
    """

    degree: int
    j: int
    angle_multiplier: int
    phase: float
    prefactor: float

    def __post_init__(self):
        if self.angle_multiplier < 0:
            raise ValueError("angle multiplier must be non-negative")


@dataclass(frozen=True)
class AveragedSeries:
    """Ordered averaged-term list for degrees 2..n_max plus provenance."""

    terms: tuple[AveragedTerm, ...]
    provenance: str
    n_max: int
    reference_radius: float
    field_name: str

    @cached_property
    def _by_degree(self) -> dict[int, tuple[AveragedTerm, ...]]:
        groups: dict[int, list[AveragedTerm]] = {}
        for t in self.terms:
            groups.setdefault(t.degree, []).append(t)
        return {d: tuple(ts) for d, ts in groups.items()}

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_degree))

    def evaluate(self, g: OrbitGeometry, omega: float) -> float:
        """Sum of <V_i>_f over all degrees in the series at (g, omega)."""
        e, eta, s = g.e, g.eta, g.s
        ra = self.reference_radius / g.a
        total = 0.0
        for i, terms in self._by_degree.items():
            f_all = _incl_block(i, s)
            scale = ra**i
            for t in terms:
                total += (
                    scale
                    * t.prefactor
                    * f_all[t.j]
                    * eccentricity_function(i, t.j, e)
                    * math.cos(t.angle_multiplier * omega + t.phase)
                )
        return total

    def to_json(self) -> str:
        payload = {
            "field": self.field_name,
            "n_max": self.n_max,
            "provenance": self.provenance,
            "reference_radius": self.reference_radius,
            "terms": [
                {
                    "degree": t.degree,
                    "j": t.j,
                    "angle_multiplier": t.angle_multiplier,
                    "phase": t.phase,
                    "prefactor": t.prefactor,
                }
                for t in self.terms
            ],
        }
        return json.dumps(payload, sort_keys=True)


def _degree_terms(field: GravityField, i: int) -> list[AveragedTerm]:
    idx = index_set(i)
    i2 = index_set(i, 2).i_m
    c_i = field.zonal(i)
    terms = []
    for j_rel in range(i2 + 1):
        weight = 1.0 if (j_rel + idx.i_star) == 0 else 2.0
        terms.append(
            AveragedTerm(
                degree=i,
                j=idx.i_m_star + j_rel,
                angle_multiplier=2 * j_rel + idx.i_star,
                phase=idx.i_pi,
                prefactor=weight * c_i,
            )
        )
    return terms


def build_mean_series(
    field: GravityField,
    n_max: int,
    method: str = "kaula",
    degrees=None,
) -> AveragedSeries:
    """Assemble the averaged series as a structured term list (no evaluation).

    Degrees with a zero zonal coefficient contribute no terms but keep
    their table rows in the field, so toggling degrees never re-indexes.
    An explicit ``degrees`` list overrides the contiguous 2..n_max range.
    """
    if method != "kaula":
        raise ValueError(f"unknown construction method {method!r}")
    if not 2 <= n_max <= field.n_max:
        raise ValueError(f"n_max {n_max} outside 2..{field.n_max}")
    if degrees is None:
        degrees = range(2, n_max + 1)
    else:
        degrees = sorted(set(int(d) for d in degrees))
        if degrees and not 2 <= degrees[0] <= degrees[-1] <= n_max:
            raise ValueError("degree list outside 2..n_max")
    terms: list[AveragedTerm] = []
    for i in degrees:
        if field.zonal(i) == 0.0:
            continue
        terms.extend(_degree_terms(field, i))
    return AveragedSeries(
        terms=tuple(terms),
        provenance="kaula",
        n_max=n_max,
        reference_radius=field.reference_radius,
        field_name=field.name,
    )
