"""Binary words, prefix sets and pull-based sequence sources.

A word is a plain ``str`` over ``"0"``/``"1"``; the empty word is ``""``.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Callable, Iterable, Iterator

EMPTY = ""


def check_word(w: str) -> str:
    if not isinstance(w, str) or any(c not in "01" for c in w):
        raise ValueError(f"not a binary word: {w!r}")
    return w


def is_prefix(v: str, w: str) -> bool:
    return w.startswith(v)


def prefixes(w: str) -> Iterator[str]:
    """Yield every prefix of ``w``, shortest first (``""`` included)."""
    for i in range(len(w) + 1):
        yield w[:i]


def all_words(length: int) -> Iterator[str]:
    """Words of the given length in lexicographic order."""
    if length == 0:
        yield EMPTY
        return
    for bits in itertools.product("01", repeat=length):
        yield "".join(bits)


def words_upto(depth: int) -> Iterator[str]:
    for n in range(depth + 1):
        yield from all_words(n)


def ones(w: str) -> int:
    return w.count("1")


class PrefixSet(frozenset):
    """A finite antichain under the prefix order."""

    def __new__(cls, words: Iterable[str] = ()):
        items = [check_word(w) for w in words]
        self = super().__new__(cls, items)
        bad = find_prefix_pair(self)
        if bad is not None:
            raise ValueError(f"not a prefix set: {bad[0]!r} is a prefix of {bad[1]!r}")
        return self

    def kraft_mass(self, q):
        """Sum of q^-|w| over the members."""
        from fractions import Fraction

        q = Fraction(q)
        return sum((q ** -len(w) for w in self), Fraction(0))


def find_prefix_pair(words: Iterable[str]) -> tuple[str, str] | None:
    """Return some (v, w) with v a proper prefix of w, or None."""
    ordered = sorted(set(words))
    # in lexicographic order a prefix sorts immediately before some extension of it
    for v, w in zip(ordered, ordered[1:]):
        if w.startswith(v):
            return v, w
    return None


def is_antichain(words: Iterable[str]) -> bool:
    return find_prefix_pair(words) is None


# --------------------------------------------------------------------------
# sequence sources


class Source:
    """An infinite binary sequence that hands out bits on demand."""

    name = "source"

    def bit(self, i: int) -> str:
        raise NotImplementedError

    def prefix(self, n: int) -> str:
        return "".join(self.bit(i) for i in range(n))

    def bits(self) -> Iterator[str]:
        i = 0
        while True:
            yield self.bit(i)
            i += 1

    def describe(self) -> dict:
        raise NotImplementedError


class PeriodicSource(Source):
    """``pattern`` repeated forever, optionally after a finite ``head``."""

    name = "periodic"

    def __init__(self, pattern: str, head: str = ""):
        if not pattern:
            raise ValueError("periodic source needs a nonempty pattern")
        self.pattern = check_word(pattern)
        self.head = check_word(head)

    def bit(self, i: int) -> str:
        if i < len(self.head):
            return self.head[i]
        return self.pattern[(i - len(self.head)) % len(self.pattern)]

    def prefix(self, n: int) -> str:
        h = self.head[:n]
        rest = n - len(h)
        reps = -(-rest // len(self.pattern)) if rest > 0 else 0
        return h + (self.pattern * reps)[:rest]

    def describe(self) -> dict:
        d = {"kind": "periodic", "pattern": self.pattern}
        if self.head:
            d["head"] = self.head
        return d

    def __repr__(self):
        return f"PeriodicSource({self.pattern!r}, head={self.head!r})"


class WordSource(Source):
    """A finite word; reading past its end is an error."""

    name = "word"

    def __init__(self, word: str):
        self.word = check_word(word)

    def bit(self, i: int) -> str:
        if i >= len(self.word):
            raise IndexError(f"source exhausted at position {i} (length {len(self.word)})")
        return self.word[i]

    def prefix(self, n: int) -> str:
        if n > len(self.word):
            raise IndexError(f"source has only {len(self.word)} bits, asked for {n}")
        return self.word[:n]

    def describe(self) -> dict:
        return {"kind": "word", "bits": self.word}


class FileSource(WordSource):
    """Bits read from a text file; characters other than 0/1 are ignored."""

    name = "file"

    def __init__(self, path: str | Path):
        self.path = Path(path)
        text = self.path.read_text(encoding="utf-8")
        super().__init__("".join(c for c in text if c in "01"))

    def describe(self) -> dict:
        return {"kind": "file", "path": str(self.path)}


def _thue_morse(i: int) -> str:
    return str(bin(i).count("1") & 1)


def _multiples_of(k: int) -> Callable[[int], str]:
    return lambda i: "1" if i % k == 0 else "0"


class RuleSource(Source):
    """Bit i is ``rule(i)``; a few named rules are built in."""

    name = "rule"

    builtin = {
        "zeros": lambda i: "0",
        "ones": lambda i: "1",
        "thue-morse": _thue_morse,
    }

    def __init__(self, rule: str | Callable[[int], str], **params):
        self.params = params
        if callable(rule):
            self.rule_name = getattr(rule, "__name__", "custom")
            self._fn = rule
        elif rule == "multiples":
            self.rule_name = rule
            self._fn = _multiples_of(int(params["k"]))
        elif rule in self.builtin:
            self.rule_name = rule
            self._fn = self.builtin[rule]
        else:
            raise ValueError(f"unknown rule source {rule!r}")

    def bit(self, i: int) -> str:
        b = self._fn(i)
        return "1" if b in (1, "1", True) else "0"

    def describe(self) -> dict:
        return {"kind": "rule", "rule": self.rule_name, **self.params}

    def __repr__(self):
        return f"RuleSource({self.rule_name!r})"
