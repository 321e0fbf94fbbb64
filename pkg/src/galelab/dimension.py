"""Entropy, success probes and finite-horizon dimension estimates.

Every asserted comparison is exact or runs on certified dyadic log2 bounds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .core import GaleRule, GaleValueTrace, TraceRow, as_q, fmt_q
from .logs import floor_log2, format_fixed, log2_bounds
from .words import Source

THRESHOLD_SEARCH = "threshold-search"
EXPONENT_OF_INCREASE = "exponent-of-increase"
DEFAULT_THRESHOLD_LOG2 = 20
DEFAULT_DEPTH = 30_000
DEFAULT_PRECISION = Fraction(1, 64)

# q-grid for the threshold search: s = log2 q ranges over [0, 2]
Q_MIN = Fraction(1)
Q_MAX = Fraction(4)


def _bits_for(precision) -> int:
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    return max(8, -floor_log2(precision) + 3)


@dataclass(frozen=True)
class EntropyValue:
    """Certified enclosure lo <= value-of-interest <= hi."""

    lo: Fraction
    hi: Fraction
    precision: Fraction

    @property
    def value(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __str__(self):
        return format_fixed(self.value, 6)


def _xlog_inv(x: Fraction, bits: int):
    """Bounds on x log2(1/x), with 0 log(1/0) = 0."""
    if x == 0:
        return Fraction(0), Fraction(0)
    lo, hi = log2_bounds(x, bits)
    return -x * hi, -x * lo


def entropy(alpha, precision=Fraction(1, 2**30)) -> EntropyValue:
    """Binary entropy H(alpha) = alpha log 1/alpha + (1-alpha) log 1/(1-alpha)."""
    a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    bits = _bits_for(precision)
    l1, h1 = _xlog_inv(a, bits)
    l2, h2 = _xlog_inv(1 - a, bits)
    return EntropyValue(l1 + l2, h1 + h2, Fraction(precision))


def weighted_entropy(x, y, precision=Fraction(1, 2**30)) -> EntropyValue:
    """h(x, y) = x log 1/y + (1-x) log 1/(1-y)."""
    x, y = Fraction(x), Fraction(y)
    if not 0 < y < 1:
        raise ValueError("y must lie strictly between 0 and 1")
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    bits = _bits_for(precision)
    ly_lo, ly_hi = log2_bounds(y, bits)
    lz_lo, lz_hi = log2_bounds(1 - y, bits)
    lo = -x * ly_hi - (1 - x) * lz_hi
    hi = -x * ly_lo - (1 - x) * lz_lo
    return EntropyValue(lo, hi, Fraction(precision))


@dataclass(frozen=True)
class FreqStats:
    n: int
    ones: int
    profile: tuple  # ((2^k, freq), ...)

    @property
    def freq(self) -> Fraction:
        return Fraction(self.ones, self.n)


def freq_stats(source: Source, n: int) -> FreqStats:
    """Exact 1-frequency of the length-n prefix, sampled at powers of two."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w = source.prefix(n)
    profile = []
    k = 1
    while k <= n:
        profile.append((k, Fraction(w[:k].count("1"), k)))
        k *= 2
    return FreqStats(n, w.count("1"), tuple(profile))


# --------------------------------------------------------------------------
# probes


@dataclass
class ProbeResult:
    succeeded: bool
    first_crossing_depth: int | None
    # certified bounds on max_n log2 d(prefix_n); None when d is 0 throughout
    max_log2_lo: Fraction | None
    max_log2_hi: Fraction | None
    threshold_log2: int
    depth: int
    probed: int  # how many bits were actually read
    trace: GaleValueTrace | None = None
    finitization: str = "value >= 2^T * d(empty) for some n <= depth"

    def __post_init__(self):
        if self.succeeded != (self.first_crossing_depth is not None):
            raise AssertionError("succeeded must match first_crossing_depth")

    @property
    def max_log2_value(self) -> Fraction | None:
        return self.max_log2_lo


def success_probe(
    d: GaleRule,
    source: Source,
    threshold_log2: int = DEFAULT_THRESHOLD_LOG2,
    depth: int = DEFAULT_DEPTH,
    keep_trace: bool = False,
    stop_on_success: bool = False,
    track_max: bool = True,
) -> ProbeResult:
    """Walk d along source; success iff d(prefix_n) >= 2^T d(λ) for some n <= depth."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if int(threshold_log2) != threshold_log2 or threshold_log2 < 1:
        raise ValueError("threshold_log2 must be a positive integer")
    T = int(threshold_log2)
    c = d.root()
    base = c.value
    goal = base * 2**T
    rows = [TraceRow(0, "", base)] if keep_trace else None
    first = None
    best_lo = best_hi = None
    probed = 0

    def note(v: Fraction):
        nonlocal best_lo, best_hi
        if v <= 0:
            return
        fl = floor_log2(v)
        # v < 2^(fl+1) <= 2^best_lo means v cannot raise either bound
        if best_lo is not None and fl + 1 <= best_lo and fl + 1 <= best_hi:
            return
        lo, hi = log2_bounds(v, 32)
        if best_lo is None:
            best_lo, best_hi = lo, hi
        else:
            best_lo, best_hi = max(best_lo, lo), max(best_hi, hi)

    if track_max:
        note(base)
    if base > 0:
        for n in range(1, depth + 1):
            c = c.child(source.bit(n - 1))
            probed = n
            v = c.value
            if rows is not None:
                rows.append(TraceRow(n, source.bit(n - 1), v))
            if track_max:
                note(v)
            if first is None and v >= goal:
                first = n
                if stop_on_success:
                    break
    return ProbeResult(
        first is not None,
        first,
        best_lo,
        best_hi,
        T,
        depth,
        probed,
        GaleValueTrace(rows) if rows is not None else None,
    )


@dataclass(frozen=True)
class ExponentEstimate:
    """Certified bounds on max_{depth/2 <= n <= depth} log2 d(prefix_n) / n."""

    lo: Fraction | None  # None: d vanished on the whole window (-inf sentinel)
    hi: Fraction | None
    depth: int
    window: tuple

    @property
    def is_floor(self) -> bool:
        return self.lo is None


def exponent_of_increase(d: GaleRule, source: Source, depth: int) -> ExponentEstimate:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    start = max(1, -(-depth // 2))
    c = d.root()
    lo = hi = None
    for n in range(1, depth + 1):
        c = c.child(source.bit(n - 1))
        if n < start or c.value <= 0:
            continue
        v = c.value
        fl = floor_log2(v)
        # (fl+1)/n bounds log2(v)/n from above; skip when it cannot matter
        if hi is not None and Fraction(fl + 1, n) <= lo:
            continue
        a, b = log2_bounds(v, 40)
        a, b = a / n, b / n
        lo = a if lo is None else max(lo, a)
        hi = b if hi is None else max(hi, b)
    return ExponentEstimate(lo, hi, depth, (start, depth))


# --------------------------------------------------------------------------
# dimension search


class EstimateError(RuntimeError):
    pass


@dataclass
class GridProbe:
    q: Fraction
    s_lo: Fraction
    s_hi: Fraction
    succeeded: bool
    first_crossing_depth: int | None
    source_index: int | None  # first source that defeated the gale, if any


@dataclass
class DimensionEstimate:
    lower: Fraction
    upper: Fraction
    method: str
    depth: int
    threshold_log2: int | None = None
    precision: Fraction | None = None
    probes: list[GridProbe] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    note: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise AssertionError("lower must not exceed upper")

    @property
    def ok(self) -> bool:
        return not self.anomalies

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, x, tol=0) -> bool:
        x = Fraction(x)
        return self.lower - tol <= x <= self.upper + tol

    def report(self) -> str:
        lines = [
            f"method: {self.method}",
            f"depth: {self.depth}",
            f"bracket: [{format_fixed(self.lower, 6)}, {format_fixed(self.upper, 6)}]",
            f"lower_exact: {self.lower}",
            f"upper_exact: {self.upper}",
        ]
        if self.threshold_log2 is not None:
            lines.append(f"threshold_log2: {self.threshold_log2}")
        if self.note:
            lines.append(f"note: {self.note}")
        for a in self.anomalies:
            lines.append(f"anomaly: {a}")
        return "\n".join(lines) + "\n"

    def probes_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["q", "s_lo", "s_hi", "succeeded", "first_crossing_depth"])
        for p in sorted(self.probes, key=lambda p: p.q):
            wr.writerow(
                [
                    fmt_q(p.q),
                    format_fixed(p.s_lo, 9),
                    format_fixed(p.s_hi, 9),
                    int(p.succeeded),
                    "" if p.first_crossing_depth is None else p.first_crossing_depth,
                ]
            )
        return buf.getvalue()


Family = Callable[[Fraction], GaleRule]


def grid_bits(precision) -> int:
    """m such that neighbouring q = k/2^m, q >= 1, are < precision/2 apart in s."""
    # log2((k+1)/k) <= 1/(k ln 2) < 2/k <= 2^(1-m)
    return _bits_for(precision)


def estimate_dimension(
    family: Family,
    sources: Source | Sequence[Source],
    depth: int = DEFAULT_DEPTH,
    precision=DEFAULT_PRECISION,
    method: str = THRESHOLD_SEARCH,
    threshold_log2: int = DEFAULT_THRESHOLD_LOG2,
    coarse_steps: int = 6,
) -> DimensionEstimate:
    """Least grid s whose gale succeeds on every source, as a certified bracket.

    A finite batch of sources is treated as a set: the gale must win on all
    of them, which makes the estimate the max of the per-source estimates.
    """
    if isinstance(sources, Source):
        sources = [sources]
    sources = list(sources)
    if not sources:
        raise ValueError("need at least one source")
    precision = Fraction(precision)
    if method == EXPONENT_OF_INCREASE:
        return _estimate_by_exponent(family, sources, depth)
    if method != THRESHOLD_SEARCH:
        raise ValueError(f"unknown method {method!r}")

    m = grid_bits(precision)
    scale = 1 << m
    k_min, k_max = int(Q_MIN * scale), int(Q_MAX * scale)
    bits = m + 8
    cache: dict[int, GridProbe] = {}

    def probe(k: int) -> GridProbe:
        if k in cache:
            return cache[k]
        q = Fraction(k, scale)
        d = family(q)
        hit, loser = None, None
        for i, src in enumerate(sources):
            r = success_probe(d, src, threshold_log2, depth, stop_on_success=True, track_max=False)
            if not r.succeeded:
                loser = i
                hit = None
                break
            hit = r.first_crossing_depth if hit is None else max(hit, r.first_crossing_depth)
        lo, hi = log2_bounds(q, bits)
        cache[k] = GridProbe(q, lo, hi, loser is None, hit, loser)
        return cache[k]

    # coarse sweep over the whole grid, checking monotonicity as we go
    span = k_max - k_min
    coarse = sorted({k_min + (span * j) // coarse_steps for j in range(coarse_steps + 1)})
    outcomes = [probe(k).succeeded for k in coarse]
    anomalies = _monotonicity_anomalies([cache[k] for k in coarse])

    if not outcomes[-1]:
        raise EstimateError(f"no gale on the grid up to q={fmt_q(Q_MAX)} succeeded within depth {depth}")
    if outcomes[0]:
        lo_k = hi_k = k_min
    else:
        # last failure before the first success in the coarse sweep
        j = outcomes.index(True)
        lo_k, hi_k = coarse[j - 1], coarse[j]
        while hi_k - lo_k > 1:
            mid = (lo_k + hi_k) // 2
            if probe(mid).succeeded:
                hi_k = mid
            else:
                lo_k = mid
    probes = [cache[k] for k in sorted(cache)]
    anomalies = anomalies or _monotonicity_anomalies(probes)
    upper = cache[hi_k].s_hi
    lower = Fraction(0) if hi_k == k_min else cache[lo_k].s_lo
    if hi_k == k_min:
        upper = cache[k_min].s_hi
    return DimensionEstimate(
        lower,
        upper,
        THRESHOLD_SEARCH,
        depth,
        threshold_log2,
        precision,
        probes,
        anomalies,
        note="finite-horizon surrogate: success means crossing 2^T * d(empty) within depth",
    )


def _monotonicity_anomalies(probes: Sequence[GridProbe]) -> list[str]:
    """Success at some s followed by failure at a larger grid s."""
    out = []
    seen_success = None
    for p in sorted(probes, key=lambda p: p.q):
        if p.succeeded and seen_success is None:
            seen_success = p
        elif not p.succeeded and seen_success is not None:
            out.append(f"success at q={fmt_q(seen_success.q)} but failure at larger q={fmt_q(p.q)}")
    return out


def _estimate_by_exponent(family: Family, sources, depth: int) -> DimensionEstimate:
    d = family(Fraction(2))
    lowers, uppers = [], []
    floors = 0
    for src in sources:
        e = exponent_of_increase(d, src, depth)
        if e.is_floor:
            floors += 1
            lowers.append(Fraction(1))
            uppers.append(Fraction(1))
            continue
        # 1 - lambda_d, clipped to [0, 1] (dimension of a single sequence)
        lowers.append(min(Fraction(1), max(Fraction(0), 1 - e.hi)))
        uppers.append(min(Fraction(1), max(Fraction(0), 1 - e.lo)))
    note = "1 - lambda_d for this fixed martingale only: a heuristic, not the sup over all martingales"
    if floors:
        note += f"; martingale vanished on {floors} source(s)"
    return DimensionEstimate(max(lowers), max(uppers), EXPONENT_OF_INCREASE, depth, None, None, [], [], note)


__all__ = [
    "DEFAULT_DEPTH",
    "DEFAULT_PRECISION",
    "DEFAULT_THRESHOLD_LOG2",
    "EXPONENT_OF_INCREASE",
    "THRESHOLD_SEARCH",
    "DimensionEstimate",
    "EntropyValue",
    "EstimateError",
    "ExponentEstimate",
    "FreqStats",
    "GridProbe",
    "ProbeResult",
    "as_q",
    "entropy",
    "estimate_dimension",
    "exponent_of_increase",
    "freq_stats",
    "grid_bits",
    "success_probe",
    "weighted_entropy",
]
