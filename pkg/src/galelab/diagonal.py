"""Constructors that steer a sequence so a given exact gale cannot win on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from . import circuits
from .core import Cursor, GaleRule, GaleValueTrace, TraceRow
from .logs import log2_bounds
from .words import EMPTY, Source, all_words
from .zoo import BlockAlphabet, segment_of

STRICT = "paper-constants"
DESK = "desk-scale"


class NoAdmissibleBlock(RuntimeError):
    """The constructor found no extension meeting its constraint."""


def _walk(c: Cursor, bits: str) -> Cursor:
    for b in bits:
        c = c.child(b)
    return c


class Constructor:
    """Deterministic proper extender w -> w u (u nonempty).

    Subclasses implement ``step(n, cursor)`` which, given |w| and a cursor
    for the captured gale at w, returns the appended bits and the cursor at
    the extension.
    """

    construction_id = "abstract"

    def __init__(self, d: GaleRule):
        self.d = d

    def step(self, n: int, cursor: Cursor) -> tuple[str, Cursor]:
        raise NotImplementedError

    def extend(self, w: str) -> str:
        u, _ = self.step(len(w), self.d.cursor_at(w))
        return w + u

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"constructor": self.construction_id, "gale": self.d.describe(), "params": self.params()}

    def iterate(self) -> Iterator[tuple[int, str, Cursor]]:
        """Yield (start, appended bits, cursor after) along delta^n(λ)."""
        n = 0
        c = self.d.root()
        while True:
            u, c = self.step(n, c)
            if not u:
                raise AssertionError("constructor made an improper extension")
            yield n, u, c
            n += len(u)


# --------------------------------------------------------------------------


class MinBranchConstructor(Constructor):
    """Append 1 exactly when d(w0) > d(w1)."""

    construction_id = "min_branch"

    def __init__(self, d: GaleRule):
        if d.q >= 2:
            raise ValueError("min-branch diagonalization needs s < 1 (q < 2)")
        super().__init__(d)

    def step(self, n, cursor):
        c0, c1 = cursor.child("0"), cursor.child("1")
        if c0.value > c1.value:
            return "1", c1
        return "0", c0


def min_branch_constructor(d: GaleRule) -> MinBranchConstructor:
    return MinBranchConstructor(d)


class BlockConstructor(Constructor):
    """At block boundaries append the lexicographically first block of S
    minimizing d(wu); elsewhere append 0."""

    construction_id = "block"

    def __init__(self, d: GaleRule, alphabet: BlockAlphabet):
        super().__init__(d)
        self.alphabet = alphabet

    def step(self, n, cursor):
        if n % self.alphabet.l:
            return "0", cursor.child("0")
        best_u, best_c = None, None
        for u in self.alphabet.S:  # already sorted
            c = _walk(cursor, u)
            if best_c is None or c.value < best_c.value:
                best_u, best_c = u, c
        return best_u, best_c

    def multiplier_bound(self) -> Fraction:
        """q^l / |S|: per-block growth allowed to the captured gale."""
        return self.d.q**self.alphabet.l / self.alphabet.size

    def defeats(self) -> bool:
        """True when q^l < |S|, i.e. the captured gale decays geometrically."""
        return self.multiplier_bound() < 1

    def params(self):
        return {"l": self.alphabet.l, "S": list(self.alphabet.S)}


def block_constructor(d: GaleRule, alphabet: BlockAlphabet) -> BlockConstructor:
    return BlockConstructor(d, alphabet)


# --------------------------------------------------------------------------
# frequency


@dataclass(frozen=True)
class FrequencyPlan:
    alpha: Fraction
    c: int
    epsilon: Fraction | None = None
    mode: str = DESK

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.mode not in (STRICT, DESK):
            raise ValueError(f"mode must be {STRICT!r} or {DESK!r}")
        if self.mode == DESK and self.c < 4:
            raise ValueError("desk-scale plans need c >= 4")

    def m(self, n: int) -> int:
        """floor(log2(n + c))"""
        return (n + self.c).bit_length() - 1

    def k(self, n: int) -> int:
        """floor(alpha * m(n)); the rational alpha is its own approximation."""
        return math.floor(self.alpha * self.m(n))

    def block_starts(self, upto: int) -> Iterator[int]:
        """n_0 = 0, n_{i+1} = n_i + m(n_i), while n_i <= upto."""
        n = 0
        while n <= upto:
            yield n
            n += self.m(n)


@dataclass
class PlanCheck:
    name: str
    passed: bool
    detail: str


def check_plan(plan: FrequencyPlan, q) -> list[PlanCheck]:
    """Certify the large-constant conditions for the given s (via q)."""
    from .dimension import entropy

    q = Fraction(q)
    a, eps, c = plan.alpha, plan.epsilon, plan.c
    out = []
    if eps is None or eps <= 0:
        return [PlanCheck("epsilon", False, "paper-constants mode needs epsilon > 0")]
    out.append(PlanCheck("epsilon-range", eps <= a and eps <= 1 - a, f"eps={eps}, alpha={a}"))
    bits = 64
    h = entropy(a, Fraction(1, 2**bits))
    s_lo, s_hi = log2_bounds(q, bits)
    gap_lo = h.lo - s_hi
    gap_hi = h.hi - s_lo
    out.append(PlanCheck("entropy-gap", gap_lo > 0, f"H(alpha)-s in [{float(gap_lo):.6g}, {float(gap_hi):.6g}]"))
    # sup over |x-alpha| < eps of |H(x)-H(alpha)|; H is concave, so the
    # sup sits at an endpoint or at 1/2
    pts = [a - eps, a + eps]
    if a - eps < Fraction(1, 2) < a + eps:
        pts.append(Fraction(1, 2))
    dev_hi = Fraction(0)
    for x in pts:
        hx = entropy(x, Fraction(1, 2**bits))
        dev_hi = max(dev_hi, hx.hi - h.lo, h.hi - hx.lo)
    out.append(PlanCheck("entropy-continuity", gap_lo > 0 and dev_hi < gap_lo / 2, f"max deviation <= {float(dev_hi):.6g}"))
    # c > 2^(1 + 2/eps)  <=>  c^den > 2^num
    x = 1 + 2 / eps
    out.append(PlanCheck("c-vs-epsilon", c**x.denominator > 2**x.numerator, f"c={c} vs 2^{x}"))
    # c > 1 + log2(1/eps)  <=>  2^(c-1) > 1/eps
    out.append(PlanCheck("c-vs-log-epsilon", Fraction(2) ** (c - 1) > 1 / eps, f"c={c}, eps={eps}"))
    # log c / log log c > 4 / (H(alpha) - s)
    lc_lo, lc_hi = log2_bounds(c, bits)
    ok55 = False
    detail = "log log c undefined"
    if lc_lo > 1:
        llc_lo, llc_hi = log2_bounds(lc_lo, bits)
        _, llc_hi = log2_bounds(lc_hi, bits)
        ratio_lo = lc_lo / llc_hi
        ok55 = gap_lo > 0 and ratio_lo > 4 / gap_lo
        detail = f"log c/log log c >= {float(ratio_lo):.6g}"
    out.append(PlanCheck("c-growth", ok55, detail))
    return out


class FrequencyConstructor(Constructor):
    """From a block start n, append the lexicographically first u of length
    m(n) with exactly k(n) ones along which d never rises above d(w)."""

    construction_id = "frequency"

    def __init__(self, d: GaleRule, plan: FrequencyPlan):
        super().__init__(d)
        self.plan = plan
        if plan.mode == STRICT:
            failed = [chk for chk in check_plan(plan, d.q) if not chk.passed]
            if failed:
                raise ValueError(
                    "plan violates the large-constant conditions: "
                    + "; ".join(f"({f.name}) {f.detail}" for f in failed)
                )

    def _reachable(self, n: int) -> bool:
        for start in self.plan.block_starts(n):
            if start == n:
                return True
        return False

    def extend(self, w: str) -> str:
        if not self._reachable(len(w)):
            raise ValueError(f"|w| = {len(w)} is not a block start of this constructor")
        return super().extend(w)

    def step(self, n, cursor):
        m, k = self.plan.m(n), self.plan.k(n)
        ceiling = cursor.value
        found = _first_quiet_block(cursor, ceiling, m, k)
        if found is None:
            size = math.comb(m, k)
            lo, hi = log2_bounds(self.d.q, 32)
            raise NoAdmissibleBlock(
                f"no admissible block at n={n}: m={m}, k={k}, |B_n|={size}, "
                f"2^(s m) in [2^{float(lo * m):.4f}, 2^{float(hi * m):.4f}]"
            )
        return found

    def params(self):
        p = {"alpha": str(self.plan.alpha), "c": self.plan.c, "mode": self.plan.mode}
        if self.plan.epsilon is not None:
            p["epsilon"] = str(self.plan.epsilon)
        return p


def _first_quiet_block(cursor: Cursor, ceiling: Fraction, m: int, k: int):
    """Depth-first, 0 before 1, pruning on d(wv) <= ceiling and on how many
    ones are still needed."""

    def dfs(c: Cursor, v: str, ones_left: int):
        if len(v) == m:
            return v, c
        room = m - len(v)
        for b in "01":
            need = ones_left - (b == "1")
            if need < 0 or need > room - 1:
                continue
            nc = c.child(b)
            if nc.value > ceiling:
                continue
            hit = dfs(nc, v + b, need)
            if hit:
                return hit
        return None

    return dfs(cursor, EMPTY, k)


def frequency_constructor(d: GaleRule, plan: FrequencyPlan) -> FrequencyConstructor:
    return FrequencyConstructor(d, plan)


# --------------------------------------------------------------------------
# circuits


@dataclass
class BoundaryRecord:
    n: int
    start: int
    block: str
    admissible: int
    exceeders: int | None
    base: Fraction
    running_max: Fraction

    @property
    def density_holds(self) -> bool:
        """More admissible blocks than blocks that push d above d(w)."""
        return self.exceeders is not None and self.admissible > self.exceeders

    @property
    def non_increasing(self) -> bool:
        return self.running_max <= self.base


class CircuitConstructor(Constructor):
    """At |w| = 2^n - 1 append the first characteristic string of a set
    decided with fewer than alpha 2^n / n gates that minimizes the running
    maximum of d over the block."""

    construction_id = "circuit"

    def __init__(self, d: GaleRule, alpha, n_max: int):
        super().__init__(d)
        self.alpha = Fraction(alpha)
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 <= n_max <= circuits.MAX_INPUTS:
            raise ValueError(f"census only covers n <= {circuits.MAX_INPUTS}")
        self.n_max = n_max
        self._blocks = {}
        for n in range(n_max + 1):
            if n == 0:
                tables = [0, 1]  # the budget alpha 2^0 / 0 is unbounded
            else:
                tables = circuits.admissible_tables(n, self.alpha)
            self._blocks[n] = sorted(circuits.table_to_word(n, f) for f in tables)
        self.records: list[BoundaryRecord] = []

    def params(self):
        return {"alpha": str(self.alpha), "n_max": self.n_max}

    def admissible_blocks(self, n: int) -> list[str]:
        return self._blocks[n]

    @property
    def depth_limit(self) -> int:
        return 2 ** (self.n_max + 1) - 1

    def step(self, pos, cursor):
        n, offset = segment_of(pos)
        if offset:
            return "0", cursor.child("0")
        if n > self.n_max:
            raise ValueError(f"input length {n} is beyond the census range n <= {self.n_max}")
        blocks = self._blocks[n]
        if not blocks:
            raise NoAdmissibleBlock(f"no set on {n} inputs fits below {self.alpha}*2^n/n gates")
        best = None
        for u in blocks:
            peak, c = _running_max(cursor, u)
            if best is None or peak < best[0]:
                best = (peak, u, c)
        peak, u, c = best
        self.records.append(
            BoundaryRecord(n, pos, u, len(blocks), _count_exceeders(cursor, 1 << n), cursor.value, peak)
        )
        return u, c


def _running_max(cursor: Cursor, u: str):
    peak = cursor.value
    c = cursor
    for b in u:
        c = c.child(b)
        if c.value > peak:
            peak = c.value
    return peak, c


def _count_exceeders(cursor: Cursor, length: int, limit: int = 8) -> int | None:
    """How many u in {0,1}^length push d strictly above d(w) somewhere."""
    if length > limit:
        return None
    base = cursor.value
    # leaves below a node already above base all count as exceeders
    count = 0
    stack = [(cursor, 0)]
    while stack:
        c, depth = stack.pop()
        if c.value > base:
            count += 1 << (length - depth)
            continue
        if depth < length:
            stack.append((c.child("0"), depth + 1))
            stack.append((c.child("1"), depth + 1))
    return count


def circuit_constructor(d: GaleRule, alpha, n_max: int) -> CircuitConstructor:
    return CircuitConstructor(d, alpha, n_max)


# --------------------------------------------------------------------------


@dataclass
class RunResult:
    prefix: str
    blocks: list[tuple[int, str]] = field(default_factory=list)
    trace: GaleValueTrace | None = None


def run_constructor(
    delta: Constructor,
    depth: int,
    observer: GaleRule | None = None,
    keep_blocks: bool = True,
) -> RunResult:
    """Iterate delta from λ until the prefix reaches ``depth`` bits."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    pieces: list[str] = []
    blocks = []
    total = 0
    if depth > 0:
        for start, u, _ in delta.iterate():
            pieces.append(u)
            if keep_blocks:
                blocks.append((start, u))
            total += len(u)
            if total >= depth:
                break
    prefix = "".join(pieces)[:depth]
    trace = None
    if observer is not None:
        rows = [TraceRow(0, "", observer.root().value)]
        c = observer.root()
        for i, b in enumerate(prefix, 1):
            c = c.child(b)
            rows.append(TraceRow(i, b, c.value))
        trace = GaleValueTrace(rows)
    return RunResult(prefix, blocks, trace)


class ConstructedSource(Source):
    """The sequence R(delta) as a pull-based source (grown on demand)."""

    name = "constructor"

    def __init__(self, delta: Constructor):
        self.delta = delta
        self._bits: list[str] = []
        self._it = delta.iterate()

    def _grow(self, n: int):
        while len(self._bits) < n:
            _, u, _ = next(self._it)
            self._bits.extend(u)

    def bit(self, i: int) -> str:
        self._grow(i + 1)
        return self._bits[i]

    def prefix(self, n: int) -> str:
        self._grow(n)
        return "".join(self._bits[:n])

    def describe(self) -> dict:
        return {"kind": "constructor", "constructor": self.delta.describe()}


__all__ = [
    "BlockConstructor",
    "BoundaryRecord",
    "CircuitConstructor",
    "ConstructedSource",
    "Constructor",
    "DESK",
    "FrequencyConstructor",
    "FrequencyPlan",
    "MinBranchConstructor",
    "NoAdmissibleBlock",
    "STRICT",
    "PlanCheck",
    "RunResult",
    "all_words",
    "block_constructor",
    "check_plan",
    "circuit_constructor",
    "frequency_constructor",
    "min_branch_constructor",
    "run_constructor",
]
