"""Compensated (double-double) arithmetic helpers.

High-degree inclination polynomials and expanded trigonometric series
suffer catastrophic cancellation: alternating coefficients grow to ~1e13
by degree 50 while the summed values stay O(1). Carrying an error word
alongside every double keeps the polynomial evaluations accurate to a
few ulps of the *result*, which is what the 1e-12-level oracle
agreements require.

All functions accept floats or numpy arrays interchangeably; a value is
represented as the unevaluated sum ``hi + lo`` with ``|lo| <= ulp(hi)``.

Reference: Dekker (1971); Hida, Li & Bailey, "Library for double-double
and quad-double arithmetic".
"""

from __future__ import annotations

from fractions import Fraction

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


def two_sum(a, b):
    """Error-free sum: returns (s, err) with s + err == a + b exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Error-free product: returns (p, err) with p + err == a * b exactly."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(xh, xl, yh, yl):
    """(xh, xl) + (yh, yl) as a normalized double-double."""
    s, e = two_sum(xh, yh)
    e = e + xl + yl
    hi, lo = two_sum(s, e)
    return hi, lo


def dd_mul(xh, xl, yh, yl):
    """(xh, xl) * (yh, yl) as a normalized double-double."""
    p, e = two_prod(xh, yh)
    e = e + xh * yl + xl * yh
    hi, lo = two_sum(p, e)
    return hi, lo


def dd_mul_f(xh, xl, y):
    """(xh, xl) * y for a plain double y."""
    p, e = two_prod(xh, y)
    e = e + xl * y
    hi, lo = two_sum(p, e)
    return hi, lo


def dd_from_fraction(value: Fraction) -> tuple[float, float]:
    """Split an exact rational into hi + lo doubles (error ~1e-32 relative)."""
    hi = float(value)
    lo = float(value - Fraction(hi))
    return hi, lo


def dd_horner(coeff_hi, coeff_lo, xh, xl):
    """Evaluate sum_k c_k x^k with dd coefficients along the last axis.

    ``coeff_hi``/``coeff_lo`` hold coefficients in *descending* power
    order along axis -1 (numpy arrays or sequences of floats); ``x`` is a
    double-double broadcastable against the leading axes. Returns the dd
    pair of the polynomial value.
    """
    acc_h = coeff_hi[..., 0]
    acc_l = coeff_lo[..., 0]
    n = coeff_hi.shape[-1]
    for k in range(1, n):
        acc_h, acc_l = dd_mul(acc_h, acc_l, xh, xl)
        acc_h, acc_l = dd_add(acc_h, acc_l, coeff_hi[..., k], coeff_lo[..., k])
    return acc_h, acc_l


def dd_sum(values_hi, values_lo):
    """Accumulate a sequence of dd values into one dd value."""
    acc_h, acc_l = 0.0, 0.0
    for h, l in zip(values_hi, values_lo):
        acc_h, acc_l = dd_add(acc_h, acc_l, h, l)
    return acc_h, acc_l


_PIO2_HI = 1.5707963267948966
_PIO2_LO = 6.123233995736766e-17

# 1/(2k+1)! and 1/(2k)! split to double-double, k = 0..14
_SIN_COEFF: list[tuple[float, float]] = []
_COS_COEFF: list[tuple[float, float]] = []


def _init_trig_tables():
    fact = Fraction(1)
    for n in range(0, 30):
        if n:
            fact *= n
        inv = Fraction((-1) ** (n // 2), 1) / fact if n else Fraction(1)
        pair = dd_from_fraction(inv)
        if n % 2:
            _SIN_COEFF.append(pair)
        else:
            _COS_COEFF.append(pair)


_init_trig_tables()


def dd_sincos(xh: float, xl: float = 0.0) -> tuple[float, float, float, float]:
    """sin and cos of a double-double angle to ~1e-32 relative.

    Range-reduces modulo pi/2 and sums the Taylor series in compensated
    arithmetic; adequate for |x| up to ~1e6 where the reduction keeps
    ~26 significant digits.

    Returns (sin_hi, sin_lo, cos_hi, cos_lo).
    """
    n = round((xh + xl) / _PIO2_HI)
    ph, pl = two_prod(float(n), _PIO2_HI)
    rh, rl = dd_add(xh, xl, -ph, -pl)
    rh, rl = dd_add(rh, rl, -float(n) * _PIO2_LO, 0.0)
    r2h, r2l = dd_mul(rh, rl, rh, rl)
    # sin(r) = r * P(r^2), cos(r) = Q(r^2)
    sh, sl = _SIN_COEFF[-1]
    for ch, cl in reversed(_SIN_COEFF[:-1]):
        sh, sl = dd_mul(sh, sl, r2h, r2l)
        sh, sl = dd_add(sh, sl, ch, cl)
    sh, sl = dd_mul(sh, sl, rh, rl)
    qh, ql = _COS_COEFF[-1]
    for ch, cl in reversed(_COS_COEFF[:-1]):
        qh, ql = dd_mul(qh, ql, r2h, r2l)
        qh, ql = dd_add(qh, ql, ch, cl)
    quadrant = n % 4
    if quadrant == 0:
        return sh, sl, qh, ql
    if quadrant == 1:
        return qh, ql, -sh, -sl
    if quadrant == 2:
        return -sh, -sl, -qh, -ql
    return -qh, -ql, sh, sl


def neumaier_sum(values) -> float:
    """Compensated sum of an iterable of floats (Neumaier variant)."""
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp
