"""Acceptance criteria 1-10, each reported as one PASS/FAIL line in the summary."""
import functools
import math
import random
import statistics
import time
from fractions import Fraction
from pathlib import Path

import pytest

from poctl.checker import Checker, check
from poctl.formula import (GE, GT, LE, LT, Always, And, Atom, BoundedAlways, BoundedUntil, Eventually,
                           Iff, Implies, Interval, Ne, Next, Not, Or, Po, Release, Threshold,
                           Until, conj, closure, desugar, formula_size,
                           lambda_n, to_pnf)
from poctl.pks import trap_complete
from poctl.errors import ExtensionRuleInStrictMode
from poctl.proof import check_proof, match_schema
from poctl.syntax import parse_formula as P
from poctl.syntax import parse_pks, parse_proof
from poctl.tableau import check_valid, decide, extract_witness
from support import (THRESHOLDS, VALUES3, matrix_pks, oracle_agreement, random_formula,
                     random_pks, schema_grid, small_matrices)

F = Fraction
HALF = F(1, 2)
a, b, c = Atom("a"), Atom("b"), Atom("c")
FIXTURES = Path(__file__).parent / "fixtures"

M_PRIME = parse_pks("""\
states: s u t
trans s -> u : 1/2
trans s -> t : 1
trans u -> u : 1
trans t -> t : 1
label t: a
""")


def witness_stats(d):
    """Extract (and thereby verify) a witness; return (states, eventuality rows, alive)."""
    w = extract_witness(d)
    t = d.tableau
    m = sum(1 for ev in t.eventualities if any(t.holds(ev, i) for i in t.alive))
    return len(w.model.states), m, len(t.alive)


WITNESSES = {}          # criterion -> list of witness_stats, read by criterion 10


def timed(limit):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            fn(*args, **kwargs)
            elapsed = time.perf_counter() - t0
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
        return run
    return wrap


# 1 -----------------------------------------------------------------------------------------

@pytest.mark.acceptance(1, "strict necessity boundary on the 3-state quotient model")
@timed(1)
def test_criterion_1(record_property):
    assert check(M_PRIME, "s", P("Ne>1/2[X a]")) is False
    assert check(M_PRIME, "s", P("Ne>=1/2[X a]")) is True
    v = Checker(M_PRIME).value(P("Ne>1/2[X a]"))["s"]
    assert v == HALF
    record_property("detail", f"Ne(s |= X a) = {v}; >1/2 false, >=1/2 true")


# 2 -----------------------------------------------------------------------------------------

@pytest.mark.acceptance(2, "Ne>1/2[X a] is SAT with a verified witness")
@timed(5)
def test_criterion_2(record_property):
    d = decide(P("Ne>1/2[X a]"))
    assert d.sat
    stats = witness_stats(d)
    WITNESSES[2] = [stats]
    record_property("detail", f"witness with {stats[0]} states verified")


# 3 -----------------------------------------------------------------------------------------

@pytest.mark.acceptance(3, "fixpoint values equal the lasso oracle on all small structures")
@timed(300)
def test_criterion_3(record_property):
    structures = comparisons = 0
    for mat in small_matrices(3, VALUES3):
        m = matrix_pks(mat)
        # non-normal rows are trap-completed; every state-set argument is enumerated,
        # which covers every labelling over {a, b}
        comparisons += oracle_agreement(trap_complete(m), m.states)
        structures += 1
    record_property("detail", f"{structures} structures up to isomorphism, "
                              f"{comparisons} exact comparisons")


# 4 -----------------------------------------------------------------------------------------

@pytest.mark.acceptance(4, "axiom schema instances are all VALID")
@timed(1800)
def test_criterion_4(record_property):
    grid = schema_grid([a, b, And(a, b)], [F(1, 4), HALF, F(3, 4)])
    assert len(grid) >= 300
    for name, f in grid:
        assert match_schema(name, f) is not None, (name, f)
        assert check_valid(f).valid, (name, f)
    record_property("detail", f"{len(grid)} instances over {len({n for n, _ in grid})} schemas")


# 5 -----------------------------------------------------------------------------------------

def _lemma_items(r=HALF):
    s = 1 - r
    ge = lambda v, p: Po(Threshold(GE, v), p)
    ne = lambda op, v, p: Ne(Threshold(op, v), p)
    X, G, Fv, U = Next, Always, Eventually, Until
    items = {
        1: Implies(ne(GT, s, X(a)), ge(r, X(a))),
        "2 forward": Implies(And(ge(r, X(a)), ne(GT, s, X(b))), ge(r, X(And(a, b)))),
        3: Iff(ge(r, X(Implies(a, b))), Or(ge(r, X(Not(a))), ge(r, X(b)))),
        4: Implies(ge(r, G(a)), ge(r, X(a))),
        5: Implies(ne(GT, r, G(a)), ne(GT, r, X(a))),
        6: Implies(ge(r, G(a)), ge(r, Fv(a))),
        7: Implies(ne(GT, r, G(a)), ne(GT, r, Fv(a))),
        8: Implies(ge(r, U(a, b)), ge(r, Fv(b))),
        9: Implies(ne(GT, r, U(a, b)), ne(GT, r, Fv(b))),
        10: Implies(ne(GT, r, G(Implies(c, And(Not(b), Implies(a, ge(s, X(c))))))),
                    Implies(c, Not(ne(GT, r, U(a, b))))),
        11: Implies(ne(GT, r, G(Implies(c, And(Not(b), ge(s, X(c)))))),
                    Implies(c, Not(ne(GT, r, Fv(b))))),
        12: Implies(ne(GT, r, G(Implies(c, And(Not(b), ge(s, X(c)))))),
                    Implies(c, Not(ne(GT, r, U(a, b))))),
        13: Implies(ne(GT, r, G(Implies(c, And(Not(b), Implies(a, ne(GT, r, X(c))))))),
                    Implies(c, Not(ge(s, U(a, b))))),
        14: Implies(ne(GT, r, G(Implies(c, And(Not(b), ne(GT, r, X(c)))))),
                    Implies(c, Not(ge(s, Fv(b))))),
    }
    for op in (GE, GT):
        po = Po(Threshold(op, r), U(a, b))
        nu = Ne(Threshold(op, r), U(a, b))
        items[f"15{op}"] = Iff(po, Or(b, And(a, Po(Threshold(op, r), X(po)))))
        items[f"16{op}"] = Iff(nu, Or(b, And(a, Ne(Threshold(op, r), X(nu)))))
    return items


TWO_BICONDITIONAL = Iff(And(P("Po>=1/2[X a]"), P("Ne>1/2[X b]")), P("Po>=1/2[X (a & b)]"))


@pytest.mark.acceptance(5, "derived theorem fixtures and the transcribed derivation script")
@timed(600)
def test_criterion_5(record_property):
    items = _lemma_items()
    for key, f in items.items():
        assert check_valid(f).valid, (key, f)
    s = parse_proof((FIXTURES / "next_conjunction.prf").read_text())
    report = check_proof(s)
    assert all(report.theorem.values())
    assert s.lines[-1].formula == items["2 forward"]
    first_repl = min(k for k, rule in report.extensions if rule == "REPL")
    with pytest.raises(ExtensionRuleInStrictMode) as ei:
        check_proof(s, strict=True)
    assert ei.value.line == first_repl == 4
    # item (2) as a biconditional is refuted; see the companion test below
    v = check_valid(TWO_BICONDITIONAL)
    assert not v.valid
    cm = v.countermodel
    assert not check(cm.model, cm.root, TWO_BICONDITIONAL)
    record_property("detail", f"{len(items)} formulas VALID; item 2 holds only left-to-right, "
                              f"biconditional refuted by a {len(cm.model.states)}-state "
                              "countermodel; script OK non-strict, strict stops at line 4")


@pytest.mark.acceptance(5, "item 2 as printed (biconditional) is VALID")
@pytest.mark.xfail(strict=True, reason="only the left-to-right direction is valid; "
                                       "the converse has a verified countermodel")
def test_criterion_5_item_2_biconditional():
    assert check_valid(TWO_BICONDITIONAL).valid


# 6 -----------------------------------------------------------------------------------------

def _random_full_formula(rng, depth):
    """Random formula using every connective, bounded operators and all bound kinds."""
    if depth == 0 or rng.random() < 0.25:
        x = Atom(rng.choice("ab"))
        return x if rng.random() < 0.7 else Not(x)
    k = rng.randrange(8)
    sub = lambda: _random_full_formula(rng, depth - 1)
    if k == 0:
        return Not(sub())
    if k < 4:
        return rng.choice((And, Or, Implies, Iff))(sub(), sub())
    vals = (F(0), F(1, 4), F(1, 3), HALF, F(3, 4), F(1))
    if rng.random() < 0.3:
        lo, hi = sorted((rng.choice(vals), rng.choice(vals)))
        closed = lo == hi
        bound = Interval(lo, hi, closed or rng.random() < 0.5, closed or rng.random() < 0.5)
    else:
        bound = Threshold(rng.choice((GE, GT, LE, LT)), rng.choice(vals))
    shape = rng.randrange(7)
    path = [lambda: Next(sub()), lambda: Until(sub(), sub()), lambda: Release(sub(), sub()),
            lambda: Eventually(sub()), lambda: Always(sub()),
            lambda: BoundedUntil(sub(), sub(), rng.randrange(3)),
            lambda: BoundedAlways(sub(), rng.randrange(3))][shape]()
    return rng.choice((Po, Ne))(bound, path)


@pytest.mark.acceptance(6, "PNF at most doubles formula size")
def test_criterion_6(record_property):
    rng = random.Random(2024)
    seen, worst = 0, 0.0
    while seen < 1000:
        f = _random_full_formula(rng, 4)
        if formula_size(f) > 10:
            continue
        seen += 1
        base = formula_size(desugar(f))
        got = formula_size(to_pnf(f))
        assert got <= 2 * base, f
        worst = max(worst, got / base)
    record_property("detail", f"1000 formulas, worst ratio {worst:.2f}, 0 violations")


# 7 -----------------------------------------------------------------------------------------

@pytest.mark.acceptance(7, "closure growth is quadratic")
def test_criterion_7(record_property):
    ns = list(range(2, 13))
    sizes = [len(closure(lambda_n(n))[1]) for n in ns]
    fit = statistics.linear_regression([math.log(n) for n in ns], [math.log(s) for s in sizes])
    assert 1.8 <= fit.slope <= 2.2
    # frozen regression values for this closure convention (one below the printed 2n^2-2n+3)
    assert sizes == [2 * n * n - 2 * n + 2 for n in ns]
    record_property("detail", f"fitted exponent {fit.slope:.3f}; |ecl| = 2n^2-2n+2")


# 8 -----------------------------------------------------------------------------------------

def _finite_subset(k):
    parts = [Po(Threshold(LT, F(1)), Next(a))]
    parts += [Po(Threshold(GE, 1 - F(1, n)), Next(a)) for n in range(1, k + 1)]
    return conj(*parts)


@pytest.mark.acceptance(8, "finite subsets of the non-compact set are SAT")
def test_criterion_8(record_property):
    stats, worst = [], 0.0
    for k in range(1, 9):
        t0 = time.perf_counter()
        d = decide(_finite_subset(k))
        assert d.sat, k
        stats.append(witness_stats(d))
        elapsed = time.perf_counter() - t0
        assert elapsed < 30, (k, elapsed)
        worst = max(worst, elapsed)
    WITNESSES[8] = stats
    record_property("detail", f"k = 1..8 SAT, witnesses verified, slowest {worst:.2f}s")


# 9 -----------------------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def completeness_sample(count=200, seed=99):
    rng = random.Random(seed)
    triples = []
    while len(triples) < count:
        m = random_pks(rng, values=VALUES3)
        f = random_formula(rng, 3, thresholds=THRESHOLDS)
        if formula_size(f) > 6:
            continue
        sat = Checker(m).sat(f)
        if sat:
            triples.append((m, sorted(sat)[0], f))
    return triples


@pytest.mark.acceptance(9, "formulas true in random models are decided SAT")
@timed(1800)
def test_criterion_9(record_property):
    stats = []
    for m, s, f in completeness_sample():
        assert check(m, s, f)
        d = decide(f)
        assert d.sat, f
        stats.append(witness_stats(d))
    WITNESSES[9] = stats
    record_property("detail", f"{len(stats)}/200 SAT, all witnesses verified")


# 10 ----------------------------------------------------------------------------------------

@pytest.mark.acceptance(10, "witness size is at most m*N")
def test_criterion_10(record_property):
    if 2 not in WITNESSES:
        test_criterion_2.__wrapped__(lambda *a: None)
    if 8 not in WITNESSES:
        test_criterion_8(lambda *a: None)
    if 9 not in WITNESSES:
        test_criterion_9.__wrapped__(lambda *a: None)
    total = worst = 0
    for stats in WITNESSES.values():
        for states, m, n in stats:
            assert states <= max(m, 1) * n, (states, m, n)
            total += 1
            worst = max(worst, states / (max(m, 1) * n))
    record_property("detail", f"{total} witnesses, largest uses {worst:.0%} of the bound")
