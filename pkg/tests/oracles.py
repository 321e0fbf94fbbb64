"""Independent reference computations used only by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import mpmath

mpmath.mp.prec = 256


def mp_log2(x: Fraction):
    x = Fraction(x)
    return mpmath.log(mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator), 2)


def mp_entropy(a: Fraction):
    a = Fraction(a)
    if a in (0, 1):
        return mpmath.mpf(0)
    return -(mp_mpf(a) * mp_log2(a) + mp_mpf(1 - a) * mp_log2(1 - a))


def mp_mpf(x: Fraction):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)


def straight_line_sizes(n: int, t_max: int) -> dict[int, int]:
    """Least gate count per truth table, by listing every straight-line program.

    Unlike the package, gates may read the constant wires, and every table
    value is tracked without any pruning argument.
    """
    full = (1 << (1 << n)) - 1
    inputs = []
    for j in range(1, n + 1):
        t = 0
        for i in range(1 << n):
            if (i >> (n - j)) & 1:
                t |= 1 << i
        inputs.append(t)
    wires0 = inputs + [0, full]
    best = {w: 0 for w in wires0}

    def grow(wires, used):
        if used == t_max:
            return
        outs = [full & ~a for a in wires]
        for a, b in combinations(wires, 2):
            outs.append(a & b)
            outs.append(a | b)
        for g in outs:
            if best.get(g, used + 2) > used + 1:
                best[g] = used + 1
            grow(wires + [g], used + 1)

    grow(wires0, 0)
    return best


def frequency_value(q: Fraction, y: Fraction, w: str) -> Fraction:
    """Step-by-step recurrence for the frequency gale."""
    v = Fraction(1)
    for b in w:
        v *= (y if b == "1" else 1 - y) * q
    return v
