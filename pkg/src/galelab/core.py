"""Exact gales and supergales.

A rule ``d`` maps binary words to nonnegative rationals.  The exponent ``s``
is never stored; rules carry ``q = 2**s`` as an exact :class:`Fraction`, so
the s-gale condition reads ``q * d(w) == d(w0) + d(w1)`` and every check is an
exact rational comparison.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .logs import floor_log2, format_fixed, log2_bounds
from .words import EMPTY, PrefixSet, all_words, check_word, is_antichain, words_upto

GALE = "gale"
SUPERGALE = "supergale"
KINDS = (GALE, SUPERGALE)


class ContractError(ValueError):
    """An input broke the contract an operation relies on."""


def as_q(x) -> Fraction:
    """Coerce an exponent given as ``SExponent``, rational, int or ``"a/b"`` to q = 2**s."""
    if isinstance(x, SExponent):
        return x.q
    q = Fraction(x)
    if q <= 0:
        raise ValueError(f"q = 2^s must be positive, got {q}")
    return q


@dataclass(frozen=True)
class SExponent:
    """The exponent s, held through the exact rational q = 2**s."""

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 0:
            raise ValueError("q must be positive")

    @classmethod
    def from_log2_dyadic(cls, s: Fraction) -> "SExponent":
        """Only integer s have a rational q; anything else is rejected."""
        s = Fraction(s)
        if s.denominator != 1:
            raise ValueError("2^s is irrational for non-integer s; pass q directly")
        return cls(Fraction(2) ** int(s))

    def s_bounds(self, bits: int = 48):
        return log2_bounds(self.q, bits)

    def __str__(self):
        return f"q={self.q}"


def fmt_q(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# cursors: incremental evaluation along a path


class Cursor:
    """Position in the binary tree with the rule's value there."""

    __slots__ = ("value",)

    def child(self, bit: str) -> "Cursor":
        raise NotImplementedError


class WordCursor(Cursor):
    __slots__ = ("rule", "word")

    def __init__(self, rule: "GaleRule", word: str):
        self.rule = rule
        self.word = word
        self.value = rule(word)

    def child(self, bit):
        return WordCursor(self.rule, self.word + bit)


class GaleRule:
    """Base class for exact rules ``w -> d(w)``.

    Subclasses implement ``_eval``; rules with a cheap recurrence also
    override ``root`` so long paths can be walked in linear time.
    """

    rule_id = "abstract"
    memoize = True

    def __init__(self, q, kind: str = GALE):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.q = as_q(q)
        self.kind = kind
        self._memo: dict[str, Fraction] = {}

    def __call__(self, w: str) -> Fraction:
        if not self.memoize:
            return self._eval(w)
        try:
            return self._memo[w]
        except KeyError:
            v = self._eval(w)
            self._memo[w] = v  # single dict store; safe to share across threads
            return v

    def _eval(self, w: str) -> Fraction:
        raise NotImplementedError

    @property
    def s(self) -> SExponent:
        return SExponent(self.q)

    def root(self) -> Cursor:
        return WordCursor(self, EMPTY)

    def cursor_at(self, w: str) -> Cursor:
        c = self.root()
        for b in w:
            c = c.child(b)
        return c

    def path_values(self, bits: Iterable[str]) -> Iterator[Fraction]:
        """Values at the prefixes of ``bits``: d(λ), d(b0), d(b0 b1), ..."""
        c = self.root()
        yield c.value
        for b in bits:
            c = c.child(b)
            yield c.value

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"kind": self.kind, "q": fmt_q(self.q), "rule": self.rule_id, "params": self.params()}

    def clear_cache(self):
        self._memo.clear()

    def __repr__(self):
        return f"<{type(self).__name__} {self.kind} q={self.q}>"


class FunctionRule(GaleRule):
    """Wrap an arbitrary exact callable."""

    rule_id = "function"

    def __init__(self, fn: Callable[[str], Fraction], q, kind=GALE, name="function"):
        super().__init__(q, kind)
        self.fn = fn
        self.name = name

    def _eval(self, w):
        return Fraction(self.fn(w))

    def params(self):
        return {"name": self.name}


class TableRule(GaleRule):
    """Explicit values for words up to ``depth``; beyond that each node's
    budget ``q * d(w)`` is split evenly, so the extension is a gale."""

    rule_id = "table"

    def __init__(self, values: dict[str, Fraction], q, kind=GALE):
        super().__init__(q, kind)
        self.values = {check_word(w): Fraction(v) for w, v in values.items()}
        if EMPTY not in self.values:
            raise ValueError("table must define the empty word")
        self.depth = max(len(w) for w in self.values)
        for w in self.values:
            if w and w[:-1] not in self.values:
                raise ValueError(f"table defines {w!r} but not its parent")

    def _eval(self, w):
        if w in self.values:
            return self.values[w]
        # climb to the deepest defined ancestor, then split evenly downwards
        k = len(w)
        while w[:k] not in self.values:
            k -= 1
        return self.values[w[:k]] * (self.q / 2) ** (len(w) - k)

    def params(self):
        return {"values": {w: str(v) for w, v in sorted(self.values.items(), key=lambda t: (len(t[0]), t[0]))}}


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    valid: bool
    kind: str
    q: Fraction
    depth: int
    nodes_checked: int
    first_violation: str | None = None
    detail: str = ""

    def summary(self) -> str:
        head = f"{self.kind} q={fmt_q(self.q)} depth={self.depth} nodes={self.nodes_checked}"
        if self.valid:
            return f"VALID {head}"
        return f"INVALID {head} first violation at w={self.first_violation!r}: {self.detail}"


def validate(d: GaleRule, depth: int, kind: str | None = None) -> ValidationReport:
    """Check the (super)gale condition exactly at every word of length <= depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    kind = kind or d.kind
    q = d.q
    checked = 0
    for w in words_upto(depth):
        checked += 1
        v, v0, v1 = d(w), d(w + "0"), d(w + "1")
        for word, val in ((w, v), (w + "0", v0), (w + "1", v1)):
            if val < 0:
                return ValidationReport(False, kind, q, depth, checked, word, f"negative value {val}")
        lhs, rhs = q * v, v0 + v1
        if kind == GALE and lhs != rhs:
            return ValidationReport(
                False, kind, q, depth, checked, w, f"q*d(w) = {lhs} but d(w0)+d(w1) = {rhs}"
            )
        if kind == SUPERGALE and lhs < rhs:
            return ValidationReport(
                False, kind, q, depth, checked, w, f"q*d(w) = {lhs} < d(w0)+d(w1) = {rhs}"
            )
    return ValidationReport(True, kind, q, depth, checked)


# --------------------------------------------------------------------------
# the fundamental inequalities


@dataclass
class KraftResult:
    total: Fraction
    bound: Fraction
    holds: bool


def kraft_sum(d: GaleRule, w: str, B: Iterable[str]) -> KraftResult:
    """Sum of q^-|u| d(wu) over the prefix set B, checked against d(w)."""
    B = list(B)
    if not is_antichain(B):
        raise ValueError("B is not a prefix set")
    inv = 1 / d.q
    total = sum((inv ** len(u) * d(w + u) for u in B), Fraction(0))
    bound = d(w)
    return KraftResult(total, bound, total <= bound)


def max_kraft_sum(d: GaleRule, w: str, depth: int) -> Fraction:
    """Largest Kraft sum over *all* prefix sets inside {0,1}^{<=depth} below w.

    The optimum either takes the root alone or splits into the best sets
    below each child, which gives a recursion over the subtree.
    """
    q = d.q

    def best(v: str, room: int) -> Fraction:
        here = d(w + v) * q ** -len(v)
        if room == 0:
            return here
        return max(here, best(v + "0", room - 1) + best(v + "1", room - 1))

    return best(EMPTY, depth)


def antichains(depth: int) -> Iterator[frozenset]:
    """Every prefix set contained in {0,1}^{<=depth} (feasible for depth <= 3)."""

    def below(v: str, room: int) -> list[frozenset]:
        out = [frozenset(), frozenset([v])]
        if room > 0:
            left = below(v + "0", room - 1)
            right = below(v + "1", room - 1)
            for a in left:
                for b in right:
                    if a or b:
                        out.append(a | b)
        return out

    yield from below(EMPTY, depth)


@dataclass
class ExceederReport:
    count: int
    bound: Fraction
    holds: bool
    witness: str | None
    witness_ok: bool


def count_exceeders(d: GaleRule, w: str, l: int, alpha) -> ExceederReport:
    """Count u in {0,1}^l whose running capital, scaled by (2/q)^|v|,
    ever exceeds alpha * d(w); the count must stay below 2^l / alpha.

    Also finds the leftmost u along which d(wv) <= (q/2)^|v| d(w) for all v.
    """
    q = d.q
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if q > 2 or q < 1:
        raise ValueError("count_exceeders needs 0 <= s <= 1, i.e. 1 <= q <= 2")
    base = d(w)
    target = alpha * base
    count = _exceeders_dfs(d, w, l, Fraction(2) / q, target)
    bound = Fraction(2**l) / alpha
    witness = _quiet_path(d, w, l)
    return ExceederReport(count, bound, count < bound, witness, witness is not None)


def _exceeders_dfs(d: GaleRule, w: str, l: int, inflate: Fraction, target: Fraction) -> int:
    # once a prefix v exceeds, every extension of v to length l counts
    count = 0
    stack = [(EMPTY, Fraction(1))]
    while stack:
        v, scale = stack.pop()
        if scale * d(w + v) > target:
            count += 1 << (l - len(v))
        elif len(v) < l:
            stack.append((v + "1", scale * inflate))
            stack.append((v + "0", scale * inflate))
    return count


def _exceeders_brute(d: GaleRule, w: str, l: int, alpha) -> int:
    """Literal count over all u (test oracle for the pruned walk)."""
    inflate = Fraction(2) / d.q
    target = Fraction(alpha) * d(w)
    return sum(
        1
        for u in all_words(l)
        if any(inflate ** len(v) * d(w + v) > target for v in (u[:i] for i in range(l + 1)))
    )


def _quiet_path(d: GaleRule, w: str, l: int) -> str | None:
    """Leftmost u of length l with d(wv) <= (q/2)^|v| d(w) for every v ⊑ u."""
    base = d(w)
    half_q = d.q / 2

    def dfs(v: str) -> str | None:
        if d(w + v) > half_q ** len(v) * base:
            return None
        if len(v) == l:
            return v
        return dfs(v + "0") or dfs(v + "1")

    return dfs(EMPTY)


def slack_bound_check(d: GaleRule, w: str, u: str) -> bool:
    """d(wu) <= q^|u| d(w)."""
    return d(w + u) <= d.q ** len(u) * d(w)


# --------------------------------------------------------------------------
# transformations


class _SumCursor(Cursor):
    __slots__ = ("coeffs", "parts")

    def __init__(self, coeffs, parts):
        self.coeffs = coeffs
        self.parts = parts
        self.value = sum((a * c.value for a, c in zip(coeffs, parts)), Fraction(0))

    def child(self, bit):
        return _SumCursor(self.coeffs, [c.child(bit) for c in self.parts])


class CombinedRule(GaleRule):
    rule_id = "combine"
    memoize = False

    def __init__(self, gales: Sequence[GaleRule], coeffs: Sequence):
        if not gales:
            raise ValueError("combine needs at least one rule")
        if len(gales) != len(coeffs):
            raise ValueError("one coefficient per rule")
        q, kind = gales[0].q, gales[0].kind
        for g in gales:
            if g.q != q:
                raise ValueError(f"mismatched q: {g.q} vs {q}")
            if g.kind != kind:
                raise ValueError("mismatched kinds")
        coeffs = [Fraction(a) for a in coeffs]
        if any(a < 0 for a in coeffs):
            raise ValueError("coefficients must be nonnegative")
        super().__init__(q, kind)
        self.gales = list(gales)
        self.coeffs = coeffs

    def _eval(self, w):
        return sum((a * g(w) for a, g in zip(self.coeffs, self.gales)), Fraction(0))

    def root(self):
        return _SumCursor(self.coeffs, [g.root() for g in self.gales])

    def describe(self):
        out = super().describe()
        out["params"] = {
            "coeffs": [str(a) for a in self.coeffs],
            "gales": [g.describe() for g in self.gales],
        }
        return out


def combine(gales: Sequence[GaleRule], coeffs: Sequence) -> CombinedRule:
    """Pointwise nonnegative combination; closed under the (super)gale condition."""
    return CombinedRule(gales, coeffs)


class _ScaledCursor(Cursor):
    __slots__ = ("inner", "factor", "scale")

    def __init__(self, inner, factor, scale):
        self.inner, self.factor, self.scale = inner, factor, scale
        self.value = scale * inner.value

    def child(self, bit):
        return _ScaledCursor(self.inner.child(bit), self.factor, self.scale * self.factor)


class DilatedRule(GaleRule):
    rule_id = "dilate"
    memoize = False

    def __init__(self, base: GaleRule, q_new):
        super().__init__(q_new, base.kind)
        self.base = base
        self.factor = self.q / 2

    def _eval(self, w):
        return self.factor ** len(w) * self.base(w)

    def root(self):
        return _ScaledCursor(self.base.root(), self.factor, Fraction(1))

    def describe(self):
        out = super().describe()
        out["params"] = {"base": self.base.describe()}
        return out


def dilate(d: GaleRule, q_new) -> DilatedRule:
    """Turn a martingale into the gale w -> (q_new/2)^|w| d(w)."""
    if d.q != 2:
        raise ValueError("dilate expects a martingale (q = 2)")
    return DilatedRule(d, q_new)


class _ConvertedCursor(Cursor):
    __slots__ = ("inner", "q")

    def __init__(self, inner, value, q):
        self.inner, self.value, self.q = inner, value, q

    def child(self, bit):
        a, b = self.inner.child("0"), self.inner.child("1")
        diff = a.value - b.value if bit == "0" else b.value - a.value
        v = (self.q * self.value + diff) / 2
        if v < 0:
            raise ContractError("input is not a supergale: converted value went negative")
        return _ConvertedCursor(a if bit == "0" else b, v, self.q)


class ConvertedGale(GaleRule):
    """Gale dominating a supergale, built by sharing the discarded capital
    equally between the two children at every node."""

    rule_id = "supergale_to_gale"

    def __init__(self, base: GaleRule):
        super().__init__(base.q, GALE)
        self.base = base

    def _eval(self, w):
        if w == EMPTY:
            return self.base(EMPTY)
        parent = w[:-1]
        top = self(parent)  # memoized: each ancestor is computed once
        d0, d1 = self.base(parent + "0"), self.base(parent + "1")
        diff = d0 - d1 if w[-1] == "0" else d1 - d0
        v = (self.q * top + diff) / 2
        if v < 0:
            raise ContractError(f"input is not a supergale below {parent!r}")
        return v

    def __call__(self, w):
        # fill ancestors first so deep words never recurse deeply
        if w not in self._memo and len(w) > 200:
            for i in range(len(w)):
                super().__call__(w[:i])
        return super().__call__(w)

    def root(self):
        return _ConvertedCursor(self.base.root(), self.base(EMPTY), self.q)

    def describe(self):
        out = super().describe()
        out["params"] = {"base": self.base.describe()}
        return out


def supergale_to_gale(d: GaleRule) -> ConvertedGale:
    return ConvertedGale(d)


# --------------------------------------------------------------------------
# approximate evaluators


class ApproxEvaluator:
    """``evaluate(r, w)`` is within 2**-r of some target value d(w)."""

    def __init__(self, fn: Callable[[int, str], Fraction], q=None, name="approx"):
        self.fn = fn
        self.q = as_q(q) if q is not None else None
        self.name = name

    def __call__(self, r: int, w: str) -> Fraction:
        return Fraction(self.fn(r, w))


def exact_evaluator(d: GaleRule) -> ApproxEvaluator:
    return ApproxEvaluator(lambda r, w: d(w), d.q, name=f"exact:{d.rule_id}")


def noisy_evaluator(d: GaleRule, seed: int = 0) -> ApproxEvaluator:
    """Deterministic test harness: d(w) ± 2^-r with a pseudo-random sign,
    clamped at 0 (which keeps the error within 2^-r)."""

    def fn(r: int, w: str) -> Fraction:
        rng = random.Random(f"{seed}:{r}:{w}")
        v = d(w) + rng.choice((-1, 1)) * Fraction(1, 2**r)
        return max(v, Fraction(0))

    return ApproxEvaluator(fn, d.q, name=f"noisy:{seed}")


def exactify_offset(q) -> int:
    """Smallest integer a with 2^(1-a) <= 1 - 1/q."""
    q = as_q(q)
    if q <= 1:
        raise ValueError("exactify needs s > 0 (q > 1)")
    gap = 1 - 1 / q
    a = 1
    while Fraction(2) ** (1 - a) > gap:
        a += 1
    return a


class ExactifiedSupergale(GaleRule):
    rule_id = "exactify"

    def __init__(self, dhat: ApproxEvaluator, q):
        super().__init__(q, SUPERGALE)
        self.dhat = dhat
        self.a = exactify_offset(self.q)

    def _eval(self, w):
        n = len(w)
        return self.dhat(n + self.a, w) + Fraction(1, 2**n)

    def params(self):
        return {"a": self.a, "evaluator": self.dhat.name}


def exactify(dhat: ApproxEvaluator, q) -> ExactifiedSupergale:
    """Exact supergale from an approximable one: query at precision |w|+a
    and add 2^-|w| of headroom."""
    q = as_q(q)
    if q == 1:
        raise ValueError("s = 0: the success set is empty, nothing to exactify")
    return ExactifiedSupergale(dhat, q)


# --------------------------------------------------------------------------
# countable unions


def union_gale_eval(family, r: int, w: str) -> Fraction:
    """Approximate sum_k 2^-k d_k(w) to within 2^-r.

    ``family`` is a finite sequence (missing members count as zero) or a
    callable ``k -> member``; members are exact rules or approximate
    evaluators.  Terms past k = r + 2|w| + 1 are dropped.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    top = r + 2 * len(w) + 1
    total = Fraction(0)
    for k in range(top + 1):
        member = _member(family, k)
        if member is None:
            break
        q = member.q
        if q is not None and q >= 4:
            raise ValueError("union evaluation needs s < 2 (q < 4)")
        if isinstance(member, GaleRule):
            root = member(EMPTY)
            if root > 1:
                raise ValueError(f"member {k} has d_k(λ) = {root} > 1")
            val = member(w)
        else:
            val = member(r + 2, w)
        total += Fraction(1, 2**k) * val
    return total


def _member(family, k):
    if callable(family) and not isinstance(family, (list, tuple)):
        return family(k)
    return family[k] if k < len(family) else None


def union_evaluator(family) -> ApproxEvaluator:
    first = _member(family, 0)
    return ApproxEvaluator(lambda r, w: union_gale_eval(family, r, w), first.q, name="union")


# --------------------------------------------------------------------------
# random exact tables


def _dice(rng: random.Random, parts: int, zero_ok=True) -> list[Fraction]:
    while True:
        xs = [rng.randint(0, 6) for _ in range(parts)]
        if sum(xs) and (zero_ok or all(xs)):
            t = sum(xs)
            return [Fraction(x, t) for x in xs]


def random_table(rng: random.Random, q, depth: int, kind: str = SUPERGALE) -> TableRule:
    """Seeded random exact (super)gale table on {0,1}^{<=depth}.

    d(λ) is a rational in (0, 1]; each node's budget q*d(w) is split into
    d(w0) + d(w1) (+ slack for supergales) by rational dice.
    """
    q = as_q(q)
    values = {EMPTY: Fraction(rng.randint(1, 16), 16)}
    for n in range(depth):
        for w in all_words(n):
            budget = q * values[w]
            if kind == SUPERGALE:
                a, b, _slack = _dice(rng, 3)
            else:
                a, b = _dice(rng, 2)
            values[w + "0"] = budget * a
            values[w + "1"] = budget * b
    return TableRule(values, q, kind)


# --------------------------------------------------------------------------
# traces


@dataclass
class TraceRow:
    n: int
    bit: str
    value: Fraction

    def log2_text(self, places: int = 6) -> str:
        if self.value == 0:
            return "-inf"
        lo, hi = log2_bounds(self.value, 40)
        return format_fixed((lo + hi) / 2, places)


@dataclass
class GaleValueTrace:
    rows: list[TraceRow] = field(default_factory=list)

    HEADER = ("n", "bit", "value_num", "value_den", "log2_value")

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.HEADER)
        for row in self.rows:
            wr.writerow([row.n, row.bit, row.value.numerator, row.value.denominator, row.log2_text()])
        return buf.getvalue()

    def values(self) -> list[Fraction]:
        return [r.value for r in self.rows]


def trace_along(d: GaleRule, bits: str) -> GaleValueTrace:
    rows = []
    for n, v in enumerate(d.path_values(bits)):
        rows.append(TraceRow(n, bits[n - 1] if n else "", v))
    return GaleValueTrace(rows)


def exceeds_log2(value: Fraction, threshold_log2: int, base: Fraction = Fraction(1)) -> bool:
    """value >= 2^threshold * base, exactly (threshold an integer)."""
    t = int(threshold_log2)
    rhs = base * (Fraction(2) ** t)
    return value >= rhs


__all__ = [
    "GALE",
    "SUPERGALE",
    "ApproxEvaluator",
    "CombinedRule",
    "ContractError",
    "ConvertedGale",
    "Cursor",
    "DilatedRule",
    "ExactifiedSupergale",
    "ExceederReport",
    "FunctionRule",
    "GaleRule",
    "GaleValueTrace",
    "KraftResult",
    "PrefixSet",
    "SExponent",
    "TableRule",
    "TraceRow",
    "ValidationReport",
    "antichains",
    "as_q",
    "combine",
    "count_exceeders",
    "dilate",
    "exact_evaluator",
    "exactify",
    "exactify_offset",
    "floor_log2",
    "kraft_sum",
    "max_kraft_sum",
    "noisy_evaluator",
    "random_table",
    "slack_bound_check",
    "supergale_to_gale",
    "trace_along",
    "union_evaluator",
    "union_gale_eval",
    "validate",
]
