"""Census of small Boolean circuits.

Model: gates NOT, AND2, OR2; the inputs x1..xn and the constants 0 and 1 are
free wires; size is the number of gates.  A truth table on n inputs is an int
whose bit i is the value on the i-th string of {0,1}^n in lexicographic order
(x1 is the most significant input).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

MAX_INPUTS = 3
# least t at which every table on n inputs is reached (n=3 takes ~40 s to confirm)
SATURATION = {0: 0, 1: 1, 2: 4, 3: 8}
MODEL = "basis={NOT,AND2,OR2}; free wires: inputs and constants 0,1; size=#gates"


def _check_n(n: int):
    if not 0 <= n <= MAX_INPUTS:
        raise ValueError(f"census supports 0 <= n <= {MAX_INPUTS}, got n={n}")


def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def input_table(n: int, j: int) -> int:
    """Truth table of x_j (1-based)."""
    t = 0
    for i in range(1 << n):
        if (i >> (n - j)) & 1:
            t |= 1 << i
    return t


def free_wires(n: int) -> tuple[int, ...]:
    return tuple(input_table(n, j) for j in range(1, n + 1)) + (0, full_mask(n))


def table_to_word(n: int, table: int) -> str:
    """Characteristic string: decision on s_0, s_1, ... in order."""
    return "".join("1" if (table >> i) & 1 else "0" for i in range(1 << n))


def word_to_table(word: str) -> int:
    return sum(1 << i for i, b in enumerate(word) if b == "1")


def table_to_hex(n: int, table: int) -> str:
    """Hex of the 2^n-bit word read as a big-endian bit string."""
    width = max(1, (1 << n) // 4 + (1 if (1 << n) % 4 else 0))
    return format(int(table_to_word(n, table), 2), f"0{width}x")


@dataclass
class CensusTable:
    n: int
    t_max: int
    # size[table] = least gate count that computes it (only tables reached)
    size: dict[int, int] = field(default_factory=dict)
    model: str = MODEL

    def reached(self, t: int) -> set[int]:
        return {f for f, s in self.size.items() if s <= t}

    def _check_t(self, t: int):
        if t > self.t_max and not self.saturated:
            raise ValueError(f"census for n={self.n} only computed up to t={self.t_max}")

    def novel_count(self, t: int) -> int:
        """N(n, t): one novel circuit per table computable with <= t gates."""
        self._check_t(t)
        return sum(1 for s in self.size.values() if s <= t)

    def conditional_count(self, t: int, u: str) -> int:
        """N(n, t, u): novel circuits whose tables begin with the bits of u."""
        self._check_t(t)
        if len(u) > (1 << self.n):
            raise ValueError(f"condition longer than 2^{self.n} bits")
        k = len(u)
        want = word_to_table(u)
        mask = (1 << k) - 1
        return sum(1 for f, s in self.size.items() if s <= t and f & mask == want)

    @property
    def saturated(self) -> bool:
        return len(self.size) == 1 << (1 << self.n)

    @property
    def saturation_point(self) -> int | None:
        return max(self.size.values()) if self.saturated else None

    def counts(self) -> list[tuple[int, int]]:
        return [(t, self.novel_count(t)) for t in range(self.t_max + 1)]

    def circuit_size(self, table: int) -> int:
        if table in self.size:
            return self.size[table]
        if self.saturated:
            raise ValueError("table out of range")
        raise LookupError(f"table needs more than {self.t_max} gates")


def _gate_outputs(avail, mask):
    fs = sorted(avail)
    for a in fs:
        yield mask & ~a
    for i, a in enumerate(fs):
        for b in fs[i + 1 :]:
            yield a & b
            yield a | b


def enumerate_circuits(n: int, t_max: int) -> CensusTable:
    """Reachable-function dynamic programming, size level by size level.

    A state is the set of functions available after some straight-line
    program; a function has size t iff it is first produced in a state
    reached with t gates.
    """
    _check_n(n)
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    mask = full_mask(n)
    base = frozenset(free_wires(n))
    sizes = {f: 0 for f in base}
    level = {base}
    for t in range(1, t_max + 1):
        if len(sizes) == 1 << (1 << n):
            break
        nxt = set()
        for state in level:
            for g in set(_gate_outputs(state, mask)) - state:
                if g not in sizes:
                    sizes[g] = t
                if t < t_max:
                    nxt.add(state | {g})
        level = nxt
    return CensusTable(n, t_max, sizes)


@lru_cache(maxsize=None)
def census(n: int, t_max: int) -> CensusTable:
    return enumerate_circuits(n, t_max)


def program_enumeration_sizes(n: int, t_max: int) -> dict[int, int]:
    """Independent oracle: literal depth-first enumeration of straight-line
    programs.

    Gate operands are inputs or earlier gates, binary gates take two
    different operands.  Gates fed by a constant or by one wire twice only
    reproduce free wires or their negations, so they never shorten a
    minimal circuit and are skipped.
    """
    _check_n(n)
    mask = full_mask(n)
    inputs = [input_table(n, j) for j in range(1, n + 1)]
    best = {f: 0 for f in free_wires(n)}

    def extend(wires: list[int], used: int):
        if used == t_max:
            return
        w = len(wires)
        cand = [mask & ~wires[i] for i in range(w)]
        for i in range(w):
            for j in range(i + 1, w):
                cand.append(wires[i] & wires[j])
                cand.append(wires[i] | wires[j])
        for g in cand:
            if best.get(g, t_max + 1) > used + 1:
                best[g] = used + 1
            wires.append(g)
            extend(wires, used + 1)
            wires.pop()

    extend(list(inputs), 0)
    return best


def closure_sizes(n: int, t_max: int) -> dict[int, int]:
    """Breadth-first search over sets of reached functions (same model)."""
    _check_n(n)
    mask = full_mask(n)
    start = frozenset(free_wires(n))
    best = {f: 0 for f in start}
    frontier = [start]
    seen = {start}
    for t in range(1, t_max + 1):
        new_frontier = []
        for state in frontier:
            fs = list(state)
            outs = {mask & ~a for a in fs}
            outs |= {a & b for a in fs for b in fs}
            outs |= {a | b for a in fs for b in fs}
            for g in outs:
                best.setdefault(g, t)
                nxt = state | {g}
                if nxt not in seen:
                    seen.add(nxt)
                    new_frontier.append(nxt)
        frontier = new_frontier
    return best


def circuit_size(n: int, table: int, t_max: int | None = None) -> int:
    """Least number of gates computing ``table`` on n inputs."""
    _check_n(n)
    if not 0 <= table <= full_mask(n):
        raise ValueError("table has wrong width")
    t = t_max if t_max is not None else default_t_max(n)
    return census(n, t).circuit_size(table)


def default_t_max(n: int) -> int:
    return {0: 0, 1: 1, 2: 4, 3: 6}[n]


def novel_count(n: int, t: int) -> int:
    return census(n, census_depth(n, t)).novel_count(t)


def conditional_count(n: int, t: int, u: str) -> int:
    return census(n, census_depth(n, t)).conditional_count(t, u)


def census_depth(n: int, t: int) -> int:
    _check_n(n)
    if t < 0:
        raise ValueError("t must be >= 0")
    # once the census saturates, deeper levels add nothing
    return min(t, SATURATION[n])


# --------------------------------------------------------------------------
# bounds


def e_upper_bound(terms: int = 20) -> Fraction:
    """Rational upper bound on e: partial sum of 1/k! plus a tail bound."""
    s = sum(Fraction(1, math.factorial(k)) for k in range(terms + 1))
    return s + Fraction(2, math.factorial(terms + 1))


def dyadic_ceil(x: Fraction, bits: int = 32) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


E_UPPER = dyadic_ceil(e_upper_bound())


@dataclass
class BoundCheck:
    n: int
    t: int
    count: int
    bound: Fraction
    passed: bool

    @property
    def margin_log2(self) -> Fraction:
        """floor(log2(bound / count)), a conservative headroom figure."""
        from .logs import floor_log2

        return Fraction(floor_log2(self.bound / self.count))


def shannon_bound_check(n: int, t: int, table: CensusTable | None = None) -> BoundCheck:
    """N(n,t) <= (48 e t)^t, with e replaced by a dyadic upper bound."""
    if t <= n:
        raise ValueError("the bound is stated for t > n")
    count = table.novel_count(t) if table is not None else novel_count(n, t)
    bound = (48 * E_UPPER * t) ** t
    return BoundCheck(n, t, count, bound, count <= bound)


def budget_below(alpha, n: int) -> int | None:
    """Largest gate count strictly below alpha * 2^n / n (None = unbounded for n = 0)."""
    alpha = Fraction(alpha)
    if n == 0:
        return None
    limit = alpha * 2**n / n
    t = math.ceil(limit) - 1
    return max(t, -1)


@dataclass
class DensityReport:
    n: int
    alpha: Fraction
    beta: Fraction
    budget: int | None
    count: int
    threshold: int
    passed: bool


def admissible_tables(n: int, alpha) -> list[int]:
    """Tables decided by circuits with fewer than alpha 2^n / n gates."""
    t = budget_below(alpha, n)
    if t is None:
        t = default_t_max(n)
    if t < 0:
        return []
    return sorted(census(n, census_depth(n, t)).reached(t))


def density_check(n: int, alpha, beta) -> DensityReport:
    """Are there at least 2^(beta 2^n) sets decided below the gate budget?

    The underlying statement is asymptotic, so failures at tiny n are data.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not 0 < beta < alpha <= 1:
        raise ValueError("need 0 < beta < alpha <= 1")
    _check_n(n)
    count = len(admissible_tables(n, alpha))
    L = 1 << n
    # count >= 2^(beta L)  <=>  count^den >= 2^(num L)
    passed = count > 0 and count**beta.denominator >= 2 ** (beta.numerator * L)
    threshold = _ceil_pow2(beta * L)
    return DensityReport(n, alpha, beta, budget_below(alpha, n), count, threshold, passed)


def _ceil_pow2(x: Fraction) -> int:
    """ceil(2^x) for rational x >= 0."""
    lo = 1 << math.floor(x)
    k = lo
    # smallest integer k with k^den >= 2^(num)
    num, den = x.numerator, x.denominator
    while k**den < 2**num:
        k += 1
    return k


def census_csv(table: CensusTable) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t", "N", "bound_check", "margin_log2"])
    for t, count in table.counts():
        if t > table.n and t > 0:
            chk = shannon_bound_check(table.n, t, table)
            wr.writerow([t, count, "pass" if chk.passed else "fail", chk.margin_log2])
        else:
            wr.writerow([t, count, "n/a", ""])
    return buf.getvalue()
