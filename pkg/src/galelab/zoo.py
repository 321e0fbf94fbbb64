"""Concrete gale constructions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import GALE, CombinedRule, Cursor, GaleRule, as_q, fmt_q
from .words import EMPTY, PrefixSet, Source, check_word


class _MulCursor(Cursor):
    """Multiplicative rule: each step multiplies by a per-bit factor."""

    __slots__ = ("f0", "f1")

    def __init__(self, value, f0, f1):
        self.value, self.f0, self.f1 = value, f0, f1

    def child(self, bit):
        return _MulCursor(self.value * (self.f0 if bit == "0" else self.f1), self.f0, self.f1)


class TrivialGale(GaleRule):
    """d(w) = (q/2)^|w|; for q > 2 it succeeds everywhere."""

    rule_id = "trivial"
    memoize = False

    def __init__(self, q):
        super().__init__(q, GALE)

    def _eval(self, w):
        return (self.q / 2) ** len(w)

    def root(self):
        half = self.q / 2
        return _MulCursor(Fraction(1), half, half)


def trivial_gale(q) -> TrivialGale:
    return TrivialGale(q)


class _SingletonCursor(Cursor):
    __slots__ = ("rule", "n")

    def __init__(self, rule, n, value):
        self.rule, self.n, self.value = rule, n, value

    def child(self, bit):
        if self.value and self.rule.target.bit(self.n) == bit:
            return _SingletonCursor(self.rule, self.n + 1, self.value * self.rule.q)
        return _SingletonCursor(self.rule, self.n + 1, Fraction(0))


class SingletonGale(GaleRule):
    """All capital on one target sequence: q^|w| on its prefixes, 0 elsewhere."""

    rule_id = "singleton"
    memoize = False

    def __init__(self, q, target: Source):
        super().__init__(q, GALE)
        self.target = target

    def _eval(self, w):
        if self.target.prefix(len(w)) == w:
            return self.q ** len(w)
        return Fraction(0)

    def root(self):
        return _SingletonCursor(self, 0, Fraction(1))

    def params(self):
        return {"target": self.target.describe()}


def singleton_gale(q, target: Source) -> SingletonGale:
    return SingletonGale(q, target)


class CoverGale(GaleRule):
    """Gale built from a prefix set A.

    Below a cover word v it decays like (q/2)^(|w|-|v|); above the cover it
    holds sum q^-|u| over the u with wu in A.  So d(λ) is the Kraft mass of
    A and d equals 1 on every cover word.
    """

    rule_id = "cover"

    def __init__(self, q, cover: Iterable[str]):
        super().__init__(q, GALE)
        self.cover = PrefixSet(cover)
        self.maxlen = max((len(a) for a in self.cover), default=0)
        above: dict[str, Fraction] = {}
        for a in self.cover:
            for i in range(len(a) + 1):
                above[a[:i]] = above.get(a[:i], Fraction(0)) + self.q ** (i - len(a))
        self._above = above

    def _eval(self, w):
        for i in range(min(len(w), self.maxlen) + 1):
            if w[:i] in self.cover:
                return (self.q / 2) ** (len(w) - i)
        return self._above.get(w, Fraction(0))

    def mass(self) -> Fraction:
        return self.cover.kraft_mass(self.q)

    def params(self):
        return {"cover": sorted(self.cover, key=lambda x: (len(x), x))}


def cover_gale(q, cover: Iterable[str]) -> CoverGale:
    return CoverGale(q, cover)


@dataclass(frozen=True)
class CoverSpec:
    cover: PrefixSet
    q: Fraction


def cover_sum_gale(q, covers: Sequence[Iterable[str]]) -> CombinedRule:
    """Finite truncation of sum_r 2^r d_r over the supplied covers.

    Cover r must have Kraft mass at most 2^-(2^r) so the weighted masses
    stay summable.
    """
    q = as_q(q)
    if not covers:
        raise ValueError("need at least one cover")
    members = []
    for r, cov in enumerate(covers):
        g = CoverGale(q, cov)
        limit = Fraction(1, 2 ** (2**r))
        if g.mass() > limit:
            raise ValueError(f"cover {r} has Kraft mass {g.mass()} > 2^-{2**r}")
        members.append(g)
    out = CombinedRule(members, [2**r for r in range(len(members))])
    out.rule_id = "cover_sum"
    return out


class FrequencyGale(GaleRule):
    """Bets a fraction y of the budget on 1: d(w1) = y q d(w), d(w0) = (1-y) q d(w)."""

    rule_id = "frequency"
    memoize = False

    def __init__(self, q, y):
        super().__init__(q, GALE)
        y = Fraction(y)
        if not 0 < y <= Fraction(1, 2):
            raise ValueError("frequency bias y must lie in (0, 1/2]")
        self.y = y

    def _eval(self, w):
        k = w.count("1")
        return self.y**k * (1 - self.y) ** (len(w) - k) * self.q ** len(w)

    def root(self):
        return _MulCursor(Fraction(1), (1 - self.y) * self.q, self.y * self.q)

    def params(self):
        return {"y": str(self.y)}


def frequency_gale(q, y) -> FrequencyGale:
    return FrequencyGale(q, y)


@dataclass(frozen=True)
class BlockAlphabet:
    l: int
    S: tuple

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("block length must be positive")
        words = tuple(sorted(set(check_word(u) for u in self.S)))
        if not words:
            raise ValueError("block alphabet must be nonempty")
        if any(len(u) != self.l for u in words):
            raise ValueError(f"every block must have length {self.l}")
        object.__setattr__(self, "S", words)

    @property
    def size(self) -> int:
        return len(self.S)

    def prefix_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.S:
            for i in range(self.l + 1):
                counts[v[:i]] = counts.get(v[:i], 0) + 1
        return counts


class _BlockCursor(Cursor):
    __slots__ = ("rule", "u", "anchor")

    def __init__(self, rule, u, anchor, value):
        self.rule, self.u, self.anchor, self.value = rule, u, anchor, value

    def child(self, bit):
        rule = self.rule
        u = self.u + bit
        f = rule._factor.get(u)
        v = f * self.anchor if f is not None else Fraction(0)
        if len(u) == rule.alphabet.l:
            return _BlockCursor(rule, EMPTY, v, v)
        return _BlockCursor(rule, u, self.anchor, v)


class BlockGale(GaleRule):
    """Inside each length-l block, d(wu) = q^|u| rho(u) d(w), where rho(u) is
    the fraction of blocks in S that extend u."""

    rule_id = "block"
    memoize = False

    def __init__(self, q, alphabet: BlockAlphabet):
        super().__init__(q, GALE)
        self.alphabet = alphabet
        self._counts = alphabet.prefix_counts()
        # q^|u| rho(u) for every live in-block prefix u
        self._factor = {u: self.q ** len(u) * self.rho(u) for u in self._counts if u}

    def rho(self, u: str) -> Fraction:
        return Fraction(self._counts.get(u, 0), self.alphabet.size)

    def _eval(self, w):
        l = self.alphabet.l
        v = Fraction(1)
        full, rest = divmod(len(w), l)
        per_block = self.q**l
        for k in range(full):
            c = self._counts.get(w[k * l : (k + 1) * l], 0)
            if c == 0:
                return Fraction(0)
            v *= per_block / self.alphabet.size
        u = w[full * l :]
        return v * self.q ** len(u) * self.rho(u)

    def root(self):
        return _BlockCursor(self, EMPTY, Fraction(1), Fraction(1))

    def params(self):
        return {"l": self.alphabet.l, "S": list(self.alphabet.S)}


def block_gale(q, alphabet: BlockAlphabet) -> BlockGale:
    return BlockGale(q, alphabet)


def segment_of(position: int) -> tuple[int, int]:
    """(n, offset): global position -> input length n and index in its block.

    The block for input length n occupies positions 2^n - 1 .. 2^(n+1) - 2.
    """
    n = (position + 1).bit_length() - 1
    return n, position - (2**n - 1)


class CircuitGale(GaleRule):
    """Within the block for input length n, bets in proportion to how many
    circuit-decidable sets (size <= t(n)) extend the bits seen so far."""

    rule_id = "circuit"

    def __init__(self, q, budget: Mapping[int, int], censuses=None):
        super().__init__(q, GALE)
        from .circuits import census, census_depth

        self.budget = {int(n): int(t) for n, t in budget.items()}
        self.n_max = max(self.budget)
        if sorted(self.budget) != list(range(self.n_max + 1)):
            raise ValueError("budget must cover every input length 0..n_max")
        self._census = censuses or {n: census(n, census_depth(n, t)) for n, t in self.budget.items()}

    @property
    def depth_limit(self) -> int:
        return 2 ** (self.n_max + 1) - 1

    def _segment_factor(self, n: int, u: str) -> Fraction:
        c = self._census[n]
        t = self.budget[n]
        return self.q ** len(u) * Fraction(c.conditional_count(t, u), c.novel_count(t))

    def _eval(self, w):
        if len(w) > self.depth_limit:
            raise ValueError(
                f"circuit gale only covers input lengths <= {self.n_max} "
                f"(words of length <= {self.depth_limit}); got length {len(w)}"
            )
        v = Fraction(1)
        n = 0
        while 2**n - 1 < len(w):
            start = 2**n - 1
            u = w[start : start + 2**n]
            v *= self._segment_factor(n, u)
            if v == 0:
                return v
            n += 1
        return v

    def params(self):
        return {"budget": {str(n): t for n, t in sorted(self.budget.items())}}


def circuit_gale(q, budget: Mapping[int, int]) -> CircuitGale:
    return CircuitGale(q, budget)


def countable_family(q, sources: Sequence[Source]) -> list[SingletonGale]:
    """One singleton gale per listed sequence; feeds the union machinery."""
    return [SingletonGale(q, src) for src in sources]


def describe_alphabet(alphabet: BlockAlphabet) -> str:
    return f"l={alphabet.l} S={{{','.join(alphabet.S)}}}"


__all__ = [
    "BlockAlphabet",
    "BlockGale",
    "CircuitGale",
    "CoverGale",
    "CoverSpec",
    "FrequencyGale",
    "SingletonGale",
    "TrivialGale",
    "block_gale",
    "circuit_gale",
    "countable_family",
    "cover_gale",
    "cover_sum_gale",
    "frequency_gale",
    "segment_of",
    "singleton_gale",
    "trivial_gale",
    "fmt_q",
]
