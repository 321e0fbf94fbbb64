"""Certified base-2 logarithms of positive rationals.

Everything here returns dyadic rational bounds ``(lo, hi)`` with
``lo <= log2(x) <= hi``.  The work is done in fixed-point integer
arithmetic with outward rounding, so no machine float ever enters an
asserted comparison.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

Interval = tuple  # (lo: Fraction, hi: Fraction)

DEFAULT_BITS = 48

# bits kept from numerator/denominator of large rationals before taking logs
_GUARD = 24


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _atanh_fixed(zn: int, zd: int, g: int, upper: bool) -> int:
    """Bound atanh(zn/zd) * 2**g from below (or above), for 0 <= zn/zd <= 1/3."""
    if zn == 0:
        return 0
    # z rounded outward to g bits
    if upper:
        z = _ceil_div(zn << g, zd)
    else:
        z = (zn << g) // zd
    one = 1 << g
    z2 = (z * z) >> g if not upper else _ceil_div(z * z, one)
    total = 0
    term = z  # z^(2k+1) in fixed point
    k = 0
    while True:
        add = term // (2 * k + 1) if not upper else _ceil_div(term, 2 * k + 1)
        if add == 0 and not upper:
            break
        total += add
        if upper and term <= 1:
            break
        term = (term * z2) >> g if not upper else _ceil_div(term * z2, one)
        k += 1
        if upper and term == 0:
            break
    if upper:
        # tail of the series after the last added term:
        #   sum_{j>k} z^(2j+1)/(2j+1) <= z^(2k+3) / (1 - z^2) <= (9/8) z^(2k+3)
        tail = _ceil_div(9 * term * z2, 8 * one) + 1
        total += tail + k + 2
    return total


@lru_cache(maxsize=None)
def _ln2_fixed(g: int) -> tuple[int, int]:
    # ln 2 = 2 atanh(1/3)
    lo = 2 * _atanh_fixed(1, 3, g, upper=False)
    hi = 2 * _atanh_fixed(1, 3, g, upper=True)
    return lo, hi


def _ln_mantissa_fixed(mn: int, md: int, g: int, upper: bool) -> int:
    """Bound ln(mn/md) * 2**g where 1 <= mn/md < 2."""
    # ln m = 2 atanh((m-1)/(m+1)), and (m-1)/(m+1) lies in [0, 1/3)
    return 2 * _atanh_fixed(mn - md, mn + md, g, upper)


def _floor_log2_int_ratio(p: int, q: int) -> int:
    e = p.bit_length() - q.bit_length()
    if e >= 0:
        if p < (q << e):
            e -= 1
    else:
        if (p << -e) < q:
            e -= 1
    return e


def _log2_small(p: int, q: int, g: int, upper: bool) -> int:
    """Bound log2(p/q) * 2**g for positive integers of moderate size."""
    e = _floor_log2_int_ratio(p, q)
    if e >= 0:
        mn, md = p, q << e
    else:
        mn, md = p << -e, q
    ln_lo2, ln_hi2 = _ln2_fixed(g)
    if upper:
        ln_m = _ln_mantissa_fixed(mn, md, g, upper=True)
        frac = _ceil_div(ln_m << g, ln_lo2)
    else:
        ln_m = _ln_mantissa_fixed(mn, md, g, upper=False)
        frac = (ln_m << g) // ln_hi2
    return (e << g) + frac


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def floor_log2(x: Fraction) -> int:
    """Exact floor(log2 x) for x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    return _floor_log2_int_ratio(x.numerator, x.denominator)


def log2_bounds(x, bits: int = DEFAULT_BITS) -> Interval:
    """Dyadic bounds on log2(x) of width at most 2**-bits.

    Exact powers of two give a degenerate interval.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    p, q = x.numerator, x.denominator
    if _is_power_of_two(p) and _is_power_of_two(q):
        e = Fraction(p.bit_length() - q.bit_length())
        return e, e
    g = bits + 16  # series and division rounding cost a few hundred ulps at most
    keep = bits + _GUARD
    sp = max(0, p.bit_length() - keep)
    sq = max(0, q.bit_length() - keep)
    if sp == 0 and sq == 0:
        lo = _log2_small(p, q, g, upper=False)
        hi = _log2_small(p, q, g, upper=True)
    else:
        pt, qt = p >> sp, q >> sq
        # x lies in [pt/(qt+1), (pt+1)/qt] * 2^(sp-sq)
        shift = (sp - sq) << g
        lo = _log2_small(pt, qt + 1 if sq else qt, g, upper=False) + shift
        hi = _log2_small(pt + 1 if sp else pt, qt, g, upper=True) + shift
    return Fraction(lo, 1 << g), Fraction(hi, 1 << g)


def log2_midpoint(x, bits: int = DEFAULT_BITS) -> Fraction:
    lo, hi = log2_bounds(x, bits)
    return (lo + hi) / 2


# --------------------------------------------------------------------------
# interval helpers


def imul_scalar(c: Fraction, iv: Interval) -> Interval:
    lo, hi = iv
    return (c * lo, c * hi) if c >= 0 else (c * hi, c * lo)


def iadd(*ivs: Interval) -> Interval:
    return sum((a for a, _ in ivs), Fraction(0)), sum((b for _, b in ivs), Fraction(0))


def ineg(iv: Interval) -> Interval:
    return -iv[1], -iv[0]


def round_outward(iv: Interval, bits: int) -> Interval:
    """Widen an interval to dyadic endpoints with denominator 2**bits."""
    lo, hi = iv
    scale = 1 << bits
    return (
        Fraction((lo.numerator * scale) // lo.denominator, scale),
        Fraction(_ceil_div(hi.numerator * scale, hi.denominator), scale),
    )


def format_fixed(x: Fraction, places: int = 6) -> str:
    """Decimal rendering of a rational, rounded half away from zero (display only)."""
    x = Fraction(x)
    scale = 10**places
    n = abs(x) * scale
    r = int(n)
    if n - r >= Fraction(1, 2):
        r += 1
    sign = "-" if x < 0 and r != 0 else ""
    whole, frac = divmod(r, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"
