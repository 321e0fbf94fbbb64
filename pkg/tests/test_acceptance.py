"""Acceptance criteria 1-7, each at its stated tolerance.

Every test prints one PASS/FAIL line (visible even under captured output)
before asserting.
"""

import random
import time
from fractions import Fraction

import pytest

from galelab import circuits, core, diagonal, zoo
from galelab.core import GALE, SUPERGALE
from galelab.dimension import entropy, estimate_dimension, success_probe
from galelab.logs import log2_bounds
from galelab.properties import cover_suite, table_suite
from galelab.words import EMPTY, PeriodicSource, RuleSource, words_upto
from oracles import straight_line_sizes

F = Fraction


def verdict(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
    assert ok, detail


# -- 1: block dimension log|S|/l -----------------------------------------------------------

ALPHABETS = [
    zoo.BlockAlphabet(2, ("00", "11")),
    zoo.BlockAlphabet(2, ("00", "01", "11")),
    zoo.BlockAlphabet(3, ("000", "011", "101", "110", "111")),
]


@pytest.mark.parametrize("A", ALPHABETS, ids=lambda A: f"l{A.l}_S{A.size}")
def test_criterion_1_block_dimension(capsys, A):
    start = time.perf_counter()
    # the source only has to be a block-constructor output; building it
    # against the q=1 trivial gale keeps the run inside the time limit
    source = diagonal.ConstructedSource(diagonal.block_constructor(zoo.trivial_gale(1), A))
    est = estimate_dimension(lambda q: zoo.block_gale(q, A), source, 30_000)
    elapsed = time.perf_counter() - start
    lo, hi = log2_bounds(F(A.size), 64)
    target = (lo + hi) / 2 / A.l
    ok = est.ok and est.contains(target, F(3, 100)) and elapsed < 30
    detail = f"l={A.l} |S|={A.size} bracket [{float(est.lower):.6f}, {float(est.upper):.6f}] target {float(target):.6f} in {elapsed:.1f}s"
    verdict(capsys, "criterion 1", ok, detail)


# -- 2: frequency classes at finite horizon ---------------------------------------------------

PATTERNS = {F(1, 8): "00000001", F(1, 4): "0001", F(1, 2): "01"}


@pytest.mark.parametrize("alpha", sorted(PATTERNS), ids=str)
def test_criterion_2_frequency_dimension(capsys, alpha):
    pattern = PATTERNS[alpha]
    source = PeriodicSource(pattern)
    est = estimate_dimension(lambda q: zoo.frequency_gale(q, alpha), source, 10_000)
    H = entropy(alpha)
    # growth identity: after k periods the capital is exactly (y^ones (1-y)^zeros q^len)^k
    q = F(3, 2)
    d = zoo.frequency_gale(q, alpha)
    ones = pattern.count("1")
    per = alpha**ones * (1 - alpha) ** (len(pattern) - ones) * q ** len(pattern)
    bits = source.prefix(40 * len(pattern))
    values = list(d.path_values(bits))
    identity = all(values[k * len(pattern)] == per**k for k in range(41))
    ok = est.ok and est.contains(H.value, F(2, 100)) and identity
    detail = (
        f"alpha={alpha} bracket [{float(est.lower):.6f}, {float(est.upper):.6f}] "
        f"H={float(H.value):.6f}, growth identity {'exact' if identity else 'broken'}"
    )
    verdict(capsys, "criterion 2", ok, detail)


# -- 3: min-branch diagonalization bound -----------------------------------------------------

A35 = ALPHABETS[2]
ZOO_BELOW_2 = {
    "trivial-1": lambda: zoo.trivial_gale(1),
    "trivial-3/2": lambda: zoo.trivial_gale(F(3, 2)),
    "singleton": lambda: zoo.singleton_gale(F(5, 4), RuleSource("thue-morse")),
    "cover": lambda: zoo.cover_gale(F(3, 2), ["0", "10", "110"]),
    "cover_sum": lambda: zoo.cover_sum_gale(F(3, 2), [["0101", "1000"], ["000000", "1111111"]]),
    "frequency-1/4": lambda: zoo.frequency_gale(F(3, 2), F(1, 4)),
    "frequency-1/2": lambda: zoo.frequency_gale(F(7, 4), F(1, 2)),
    "block": lambda: zoo.block_gale(F(3, 2), ALPHABETS[0]),
    "block-3-5": lambda: zoo.block_gale(F(5, 4), A35),
    "circuit": lambda: zoo.circuit_gale(F(3, 2), {0: 0, 1: 1, 2: 2, 3: 4}),
}


@pytest.mark.parametrize("name", list(ZOO_BELOW_2))
def test_criterion_3_min_branch_bound(capsys, name):
    d = ZOO_BELOW_2[name]()
    # the circuit gale is defined only through its census range
    n_max = min(2000, getattr(d, "depth_limit", 2000))
    run = diagonal.run_constructor(diagonal.min_branch_constructor(d), n_max, observer=d, keep_blocks=False)
    root = d(EMPTY)
    ratio = d.q / 2
    bad = [row.n for row in run.trace.rows if row.value > ratio**row.n * root]
    ok = not bad and len(run.trace.rows) == n_max + 1
    verdict(capsys, "criterion 3", ok, f"{name} q={d.q}: {n_max} steps, {len(bad)} violations")


# -- 4: table property suites ----------------------------------------------------------------


def test_criterion_4_table_properties(capsys):
    start = time.perf_counter()
    reports = table_suite(seed=0, count=100, depth=6)
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reports) and elapsed < 60
    detail = "; ".join(f"{r.name} {r.checks} checks {len(r.failures)} failures" for r in reports)
    verdict(capsys, "criterion 4", ok, f"100 tables: {detail} in {elapsed:.1f}s")


# -- 5: conversion, exactification, unions -------------------------------------------------------


def test_criterion_5_constructions(capsys):
    problems = []
    for seed in range(10):
        q = [F(1), F(5, 4), F(3, 2), F(2), F(3)][seed % 5]
        d = core.random_table(random.Random(seed), q, 6, SUPERGALE)
        g = core.supergale_to_gale(d)
        if not core.validate(g, 8, GALE).valid:
            problems.append(f"conversion seed {seed} not a gale")
        if any(g(w) < d(w) for w in words_upto(8)):
            problems.append(f"conversion seed {seed} drops below d")
        if q == 1:
            continue
        e = core.exactify(core.noisy_evaluator(d, seed), q)
        if not core.validate(e, 6, SUPERGALE).valid:
            problems.append(f"exactify seed {seed} not a supergale")
        for w in words_upto(6):
            n = len(w)
            gap = e(w) - d(w)
            if not F(1, 2**n) - F(1, 2 ** (n + e.a)) <= gap <= F(1, 2**n) + F(1, 2 ** (n + e.a)):
                problems.append(f"exactify seed {seed} w={w!r} gap {gap}")
    members = lambda k: zoo.singleton_gale(F(3, 2), PeriodicSource(bin(k)[2:] + "0"))  # noqa: E731
    for w in ["", "0", "10", "0110", "101010"]:
        for r in [0, 4, 8, 12]:
            ref = sum((F(1, 2**k) * members(k)(w) for k in range(r + 2 * len(w) + 40)), F(0))
            got = core.union_gale_eval(members, r, w)
            if abs(got - ref) > F(1, 2**r):
                problems.append(f"union w={w!r} r={r} off by {abs(got - ref)}")
    verdict(capsys, "criterion 5", not problems, f"{len(problems)} problems" + (f": {problems[:3]}" if problems else ""))


# -- 6: cover gales ---------------------------------------------------------------------------


def test_criterion_6_cover_triple(capsys):
    rep = cover_suite(seed=0, count=50)
    verdict(capsys, "criterion 6", rep.passed, f"50 covers, {rep.checks} checks, {len(rep.failures)} failures")


# -- 7: circuit census ---------------------------------------------------------------------------


def test_criterion_7_circuit_census(capsys):
    problems = []
    for n in (0, 1, 2):
        table = circuits.census(n, 5)
        L = 1 << n
        for t in range(6):
            for u in words_upto(L - 1):
                whole = table.conditional_count(t, u)
                if whole != table.conditional_count(t, u + "0") + table.conditional_count(t, u + "1"):
                    problems.append(f"additivity n={n} t={t} u={u!r}")
    for n in (1, 2, 3):
        table = circuits.census(n, circuits.default_t_max(n))
        for t in range(n + 1, table.t_max + 1):
            if not circuits.shannon_bound_check(n, t, table).passed:
                problems.append(f"size bound n={n} t={t}")
    ref = straight_line_sizes(2, 4)
    closure = circuits.closure_sizes(2, 6)
    for f in range(16):
        if not circuits.circuit_size(2, f) == closure[f] == ref[f]:
            problems.append(f"circuit_size table {f}")
    # constructor invariants against the matching circuit gale
    alpha = F(1, 2)
    budget = {n: circuits.budget_below(alpha, n) or 0 for n in range(4)}
    d = zoo.circuit_gale(F(3, 2), budget)
    delta = diagonal.circuit_constructor(d, alpha, 3)
    diagonal.run_constructor(delta, delta.depth_limit)
    density_cases = 0
    for rec in delta.records:
        if rec.n > 0 and circuits.word_to_table(rec.block) not in circuits.admissible_tables(rec.n, alpha):
            problems.append(f"block at n={rec.n} not census-certified")
        if rec.density_holds:
            density_cases += 1
            if not rec.non_increasing:
                problems.append(f"observer increased at boundary n={rec.n}")
    detail = f"{len(problems)} problems, {len(delta.records)} boundaries ({density_cases} with density)"
    verdict(capsys, "criterion 7", not problems, detail + (f": {problems[:3]}" if problems else ""))
