"""Canonical trigonometric-series engine: the brute-force baseline.

Expands each V_i into fully linearized Poisson terms over the monomial
basis (e, s, c, eta, eta^-1, R/a) x {cos, sin}(k_f f + k_w w) and
averages by dropping every f-dependent term. Serves both as the slow
contender of the construction benchmark and as an algebraically
independent oracle for the Kaula path.

Coefficients are exact dyadic rationals during construction (products of
factorials over powers of two) and are exposed as doubles; evaluation
groups terms per angle and accumulates in compensated double-double
arithmetic so the million-fold cancellations of the expanded form do not
eat into the 1e-12 dual-provenance budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np

from .ddmath import dd_add, dd_from_fraction, dd_mul, dd_sincos
from .gravity import GravityField
from .kaula import OrbitGeometry, _incl_fraction_terms, index_set

__all__ = [
    "PoissonTerm",
    "PoissonSeries",
    "series_add",
    "series_mul",
    "expand_vi",
    "brute_force_average",
    "canonicalize",
]

_BASIS = ("e", "s", "c", "eta", "etainv", "ra")
_E, _S, _C, _ETA, _ETAINV, _RA = range(6)


@dataclass(frozen=True)
class PoissonTerm:
    """coefficient * e^a s^b c^d eta^g etainv^h (R/a)^i * {cos|sin}(k_f f + k_w w)."""

    coefficient_exact: Fraction
    exponents: tuple[int, int, int, int, int, int]
    k_f: int
    k_w: int
    selector: str  # "cos" | "sin"

    @property
    def coefficient(self) -> float:
        return float(self.coefficient_exact)

    @property
    def key(self) -> tuple:
        return (self.exponents, self.k_f, self.k_w, self.selector)

    def format(self) -> str:
        mono = " ".join(
            f"{name}^{power}"
            for name, power in zip(("e", "s", "c", "eta", "etainv", "(R/a)"), self.exponents)
            if power
        )
        mono = mono or "1"
        return (
            f"{self.coefficient:.17g} * {mono} * "
            f"{self.selector}({self.k_f} f + {self.k_w} w)"
        )


def _unit_powers(angle: float, top: int) -> list[tuple]:
    """(cos, sin) double-double pairs of k*angle for k = 0..top."""
    sh, sl, ch, cl = dd_sincos(angle)
    table = [((1.0, 0.0), (0.0, 0.0)), ((ch, cl), (sh, sl))]
    for _ in range(2, top + 1):
        (ah, al), (bh, bl) = table[-1]
        re = dd_add(*dd_mul(ah, al, ch, cl), *(-x for x in dd_mul(bh, bl, sh, sl)))
        im = dd_add(*dd_mul(ah, al, sh, sl), *dd_mul(bh, bl, ch, cl))
        table.append((re, im))
    return table[: top + 1] if top >= 1 else table[:1]


def _angle_trig(zf, zw, k_f: int, k_w: int, selector: str) -> tuple[float, float]:
    """cos or sin of (k_f f + k_w w) from the unit-circle power tables."""
    (fa, fb), (fc, fd) = zf[abs(k_f)]
    if k_f < 0:
        fc, fd = -fc, -fd
    (wa, wb), (wc, wd) = zw[abs(k_w)]
    if k_w < 0:
        wc, wd = -wc, -wd
    # (fa + i fc)(wa + i wc): real = cos, imag = sin of the combined angle
    re = dd_add(*dd_mul(fa, fb, wa, wb), *(-x for x in dd_mul(fc, fd, wc, wd)))
    im = dd_add(*dd_mul(fa, fb, wc, wd), *dd_mul(fc, fd, wa, wb))
    return re if selector == "cos" else im


def _normalize_exponents(exps) -> tuple[int, ...]:
    e, s, c, eta, etainv, ra = exps
    cancel = min(eta, etainv)
    return (e, s, c, eta - cancel, etainv - cancel, ra)


def _canonical_entry(
    coef: Fraction, exps, k_f: int, k_w: int, selector: str
) -> tuple[tuple, Fraction] | None:
    """Normalize one raw term to the canonical angle convention, or drop it."""
    if coef == 0:
        return None
    if k_f < 0 or (k_f == 0 and k_w < 0):
        k_f, k_w = -k_f, -k_w
        if selector == "sin":
            coef = -coef
    if selector == "sin" and k_f == 0 and k_w == 0:
        return None
    exps = _normalize_exponents(exps)
    return (exps, k_f, k_w, selector), coef


@dataclass(frozen=True)
class PoissonSeries:
    """Immutable canonical term list; no duplicate keys, no zero terms."""

    terms: tuple[PoissonTerm, ...]
    source_degrees: tuple[int, ...] = ()

    @classmethod
    def from_raw(cls, entries, source_degrees=()) -> "PoissonSeries":
        """Merge raw (coef, exponents, k_f, k_w, selector) entries canonically."""
        acc: dict[tuple, Fraction] = {}
        for coef, exps, k_f, k_w, selector in entries:
            entry = _canonical_entry(coef, exps, k_f, k_w, selector)
            if entry is None:
                continue
            key, value = entry
            total = acc.get(key, Fraction(0)) + value
            if total == 0:
                acc.pop(key, None)
            else:
                acc[key] = total
        terms = tuple(
            PoissonTerm(acc[key], *key)
            for key in sorted(acc, key=lambda k: (k[1], k[2], k[3], k[0]))
        )
        return cls(terms=terms, source_degrees=tuple(source_degrees))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PoissonSeries") -> "PoissonSeries":
        return series_add(self, other)

    def __mul__(self, other: "PoissonSeries") -> "PoissonSeries":
        return series_mul(self, other)

    def scaled(self, factor) -> "PoissonSeries":
        factor = Fraction(factor)
        return PoissonSeries.from_raw(
            (
                (t.coefficient_exact * factor, t.exponents, t.k_f, t.k_w, t.selector)
                for t in self.terms
            ),
            self.source_degrees,
        )

    def dump(self) -> str:
        """One term per line in canonical order."""
        return "\n".join(t.format() for t in self.terms)

    @cached_property
    def _eval_groups(self):
        """Per-angle dd coefficient/power tables for compensated evaluation."""
        groups: dict[tuple[int, int, str], list[PoissonTerm]] = {}
        for t in self.terms:
            groups.setdefault((t.k_f, t.k_w, t.selector), []).append(t)
        packed = []
        for key, ts in groups.items():
            coefs = [dd_from_fraction(t.coefficient_exact) for t in ts]
            exps = np.array([t.exponents for t in ts], dtype=int)
            packed.append((key, np.array(coefs), exps))
        return packed

    def evaluate(
        self, g: OrbitGeometry, reference_radius: float, omega: float, f: float
    ) -> float:
        """Numeric value at (geometry, omega, f) for a given reference radius."""
        return self.evaluate_basis(
            g.e, g.s, g.c, g.eta, reference_radius / g.a, omega, f
        )

    def evaluate_basis(
        self, e: float, s: float, c: float, eta: float, ra: float, omega: float, f: float
    ) -> float:
        """Evaluate over explicit basis values (compensated arithmetic).

        Trigonometric factors come from compensated angle-addition tables:
        the expanded form reassembles (1 + e cos f)^(i-1) across thousands
        of angle groups, so double-rounded cosines alone would cost ~7
        digits at degree 30.
        """
        if not self.terms:
            return 0.0
        max_exp = np.zeros(6, dtype=int)
        max_kf = max_kw = 0
        for t in self.terms:
            max_exp = np.maximum(max_exp, t.exponents)
            max_kf = max(max_kf, abs(t.k_f))
            max_kw = max(max_kw, abs(t.k_w))
        bases = (e, s, c, eta, 1.0 / eta if eta != 0.0 else float("inf"), ra)
        pows = []
        for b, top in zip(bases, max_exp):
            table = [(1.0, 0.0)]
            for _ in range(top):
                table.append(dd_mul(table[-1][0], table[-1][1], b, 0.0))
            pows.append(table)
        zf = _unit_powers(f, max_kf)
        zw = _unit_powers(omega, max_kw)
        total_h, total_l = 0.0, 0.0
        for (k_f, k_w, selector), coefs, exps in self._eval_groups:
            gh, gl = 0.0, 0.0
            for (ch, cl), row in zip(coefs, exps):
                vh, vl = ch, cl
                for axis, power in enumerate(row):
                    if power:
                        ph, pl = pows[axis][power]
                        vh, vl = dd_mul(vh, vl, ph, pl)
                gh, gl = dd_add(gh, gl, vh, vl)
            trig_h, trig_l = _angle_trig(zf, zw, k_f, k_w, selector)
            gh, gl = dd_mul(gh, gl, trig_h, trig_l)
            total_h, total_l = dd_add(total_h, total_l, gh, gl)
        return total_h + total_l


def canonicalize(series: PoissonSeries) -> PoissonSeries:
    """Re-canonicalize (idempotent on canonical input)."""
    return PoissonSeries.from_raw(
        ((t.coefficient_exact, t.exponents, t.k_f, t.k_w, t.selector) for t in series.terms),
        series.source_degrees,
    )


def series_add(a: PoissonSeries, b: PoissonSeries) -> PoissonSeries:
    """Canonical merged sum; cancellations purge terms exactly."""
    return PoissonSeries.from_raw(
        (
            (t.coefficient_exact, t.exponents, t.k_f, t.k_w, t.selector)
            for t in a.terms + b.terms
        ),
        tuple(sorted(set(a.source_degrees) | set(b.source_degrees))),
    )


_PRODUCT_RULES = {
    # (sel_a, sel_b) -> ((sign_diff, sel_diff), (sign_sum, sel_sum)) halves
    ("cos", "cos"): ((1, "cos"), (1, "cos")),
    ("sin", "sin"): ((1, "cos"), (-1, "cos")),
    ("sin", "cos"): ((1, "sin"), (1, "sin")),
    ("cos", "sin"): ((-1, "sin"), (1, "sin")),
}


def series_mul(a: PoissonSeries, b: PoissonSeries) -> PoissonSeries:
    """Product with angles linearized by the product-to-sum identities."""
    half = Fraction(1, 2)
    raw = []
    for ta in a.terms:
        for tb in b.terms:
            coef = ta.coefficient_exact * tb.coefficient_exact * half
            exps = tuple(x + y for x, y in zip(ta.exponents, tb.exponents))
            (sign_d, sel_d), (sign_s, sel_s) = _PRODUCT_RULES[(ta.selector, tb.selector)]
            raw.append(
                (coef * sign_d, exps, ta.k_f - tb.k_f, ta.k_w - tb.k_w, sel_d)
            )
            raw.append(
                (coef * sign_s, exps, ta.k_f + tb.k_f, ta.k_w + tb.k_w, sel_s)
            )
    return PoissonSeries.from_raw(
        raw, tuple(sorted(set(a.source_degrees) | set(b.source_degrees)))
    )


def expand_vi(field: GravityField, i: int) -> PoissonSeries:
    """Fully linearized expansion of V_i in the canonical basis.

    Follows the customary reduction: the e^k cos^k f binomial layer is
    multiplied against cos[(i-2j)(f+w) - i_pi] term by term and every
    trigonometric power is reduced to combined arguments.
    """
    if not 2 <= i <= field.n_max:
        raise ValueError(f"degree {i} outside 2..{field.n_max}")
    c_i = Fraction(field.zonal(i))
    idx = index_set(i)
    selector = "cos" if idx.i_star == 0 else "sin"
    raw = []
    if c_i != 0:
        for j in range(i + 1):
            m = i - 2 * j
            for xpow, coef_f in _incl_fraction_terms(i, j):
                s_exp = 2 * xpow + idx.i_star
                base = c_i * coef_f
                for k in range(i):
                    layer = base * comb(i - 1, k) * Fraction(1, 1 << k)
                    for l in range(k + 1):
                        raw.append(
                            (
                                layer * comb(k, k - l),
                                (k, s_exp, 0, 0, 2 * i - 1, i),
                                m - k + 2 * l,
                                m,
                                selector,
                            )
                        )
    return PoissonSeries.from_raw(raw, source_degrees=(i,))


def brute_force_average(series: PoissonSeries) -> PoissonSeries:
    """Retain exactly the terms free of the true anomaly (k_f = 0)."""
    return PoissonSeries.from_raw(
        (
            (t.coefficient_exact, t.exponents, t.k_f, t.k_w, t.selector)
            for t in series.terms
            if t.k_f == 0
        ),
        series.source_degrees,
    )
