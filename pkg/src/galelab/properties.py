"""Seeded randomized property suites over exact (super)gale tables and covers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    GALE,
    SUPERGALE,
    antichains,
    count_exceeders,
    kraft_sum,
    max_kraft_sum,
    random_table,
    slack_bound_check,
    validate,
)
from .words import EMPTY, all_words, words_upto
from .zoo import CoverGale

TABLE_QS = (Fraction(1), Fraction(5, 4), Fraction(4, 3), Fraction(3, 2), Fraction(7, 4), Fraction(2))
ALPHAS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        if len(self.failures) < 20:
            self.failures.append(msg)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.checks} checks, {len(self.failures)} failures"


def table_suite(seed: int = 0, count: int = 100, depth: int = 6, slack_depth: int = 8, exceeder_len: int = 8):
    """Kraft, exceeder and slack properties on ``count`` random supergale tables.

    Returns one report per property.
    """
    rng = random.Random(seed)
    kraft = SuiteReport("kraft")
    exceed = SuiteReport("exceeders")
    slack = SuiteReport("slack")
    small = [frozenset(b) for b in antichains(3)]
    for i in range(count):
        q = rng.choice(TABLE_QS)
        d = random_table(rng, q, depth, SUPERGALE)
        tag = f"table {i} (seed {seed}, q={q})"
        # every prefix set inside the table: literally at depth 3, by the
        # exact maximum over all prefix sets beyond that
        for w in words_upto(depth):
            room = depth - len(w)
            if room <= 3:
                for B in small if room == 3 else antichains(room):
                    if not B:
                        continue
                    kraft.checks += 1
                    r = kraft_sum(d, w, B)
                    if not r.holds:
                        kraft.fail(f"{tag}: w={w!r} B={sorted(B)} sum {r.total} > {r.bound}")
            kraft.checks += 1
            best = max_kraft_sum(d, w, room)
            if best > d(w):
                kraft.fail(f"{tag}: w={w!r} max Kraft sum {best} > {d(w)}")
        for w in (EMPTY, "0", "1", "01"):
            for l in range(1, exceeder_len + 1):
                for a in ALPHAS:
                    exceed.checks += 1
                    r = count_exceeders(d, w, l, a)
                    if not (r.holds and r.witness_ok):
                        exceed.fail(f"{tag}: w={w!r} l={l} alpha={a}: count {r.count}, witness {r.witness}")
        for n in range(slack_depth + 1):
            for wu in all_words(n):
                for k in range(n + 1):
                    slack.checks += 1
                    if not slack_bound_check(d, wu[:k], wu[k:]):
                        slack.fail(f"{tag}: d({wu!r}) > q^{n - k} d({wu[:k]!r})")
    return [kraft, exceed, slack]


def random_light_cover(rng: random.Random, q: Fraction, max_len: int = 8) -> tuple[list[str], int]:
    """A random prefix set whose Kraft mass is at most 2^-r, and that r."""
    r = rng.randint(0, 3)
    limit = Fraction(1, 2**r)
    # shortest words allowed: q^-len <= limit once len is large enough
    cover: list[str] = []
    tries = rng.randint(1, 6)
    for _ in range(tries):
        L = rng.randint(1, max_len)
        w = "".join(rng.choice("01") for _ in range(L))
        if any(w.startswith(v) or v.startswith(w) for v in cover):
            continue
        mass = sum((q ** -len(v) for v in cover), Fraction(0)) + q**-L
        if mass <= limit:
            cover.append(w)
    if not cover:
        # fall back on one long word, light enough for any q >= 5/4
        L = max_len
        while q**-L > limit:
            L += 1
        cover = ["0" * L]
    return cover, r


def cover_suite(seed: int = 0, count: int = 50, depth: int = 8) -> SuiteReport:
    """(i) exact gale, (ii) d(λ) = Kraft mass, (iii) d = 1 on cover words."""
    rng = random.Random(seed)
    rep = SuiteReport("cover-triple")
    for i in range(count):
        q = rng.choice(TABLE_QS[1:] + (Fraction(3),))
        cover, r = random_light_cover(rng, q)
        g = CoverGale(q, cover)
        tag = f"cover {i} (seed {seed}, q={q}, r={r}, A={cover})"
        rep.checks += 1
        v = validate(g, max(depth, max(len(a) for a in cover)), GALE)
        if not v.valid:
            rep.fail(f"{tag}: {v.summary()}")
        rep.checks += 1
        mass = sum((q ** -len(a) for a in cover), Fraction(0))
        if g(EMPTY) != mass or mass > Fraction(1, 2**r):
            rep.fail(f"{tag}: d(λ) = {g(EMPTY)}, mass {mass}")
        for a in cover:
            rep.checks += 1
            if g(a) != 1:
                rep.fail(f"{tag}: d({a!r}) = {g(a)}")
    return rep


__all__ = ["ALPHAS", "SuiteReport", "TABLE_QS", "cover_suite", "random_light_cover", "table_suite"]
