"""Shared generators and brute-force helpers for the test-suite."""
import itertools
from fractions import Fraction

from poctl.checker import po_path
from poctl.formula import (GE, GT, Always, And, Atom, Eventually, Ne, Next, Not, Or, Po, Release,
                           Threshold, Until)
from poctl.pks import PKS, oracle_table

HALF = Fraction(1, 2)
VALUES3 = (Fraction(0), HALF, Fraction(1))


def _canonical_matrix(mat, n):
    best = None
    for perm in itertools.permutations(range(n)):
        cand = tuple(tuple(mat[perm[i]][perm[j]] for j in range(n)) for i in range(n))
        if best is None or cand < best:
            best = cand
    return best


def small_matrices(max_states=3, values=VALUES3, up_to_symmetry=True):
    """Transition matrices over `values`, one per isomorphism class when requested."""
    for n in range(1, max_states + 1):
        rows = list(itertools.product(values, repeat=n))
        for mat in itertools.product(rows, repeat=n):
            if up_to_symmetry and _canonical_matrix(mat, n) != mat:
                continue
            yield mat


def matrix_pks(mat, labels=None):
    n = len(mat)
    states = [f"q{i}" for i in range(n)]
    trans = {(states[i], states[j]): mat[i][j] for i in range(n) for j in range(n) if mat[i][j]}
    return PKS(states, trans, None, labels or {}, {"a", "b"})


def subset(states, bits):
    return frozenset(s for i, s in enumerate(states) if bits >> i & 1)


def oracle_agreement(m, original):
    """Compare po_path with the lasso oracle for every state-set instance of the five shapes.

    Returns the number of (shape, instance, state) comparisons; raises
    AssertionError on the first disagreement.
    """
    n = len(original)
    k = 1 << n
    pos = {s: i for i, s in enumerate(original)}

    def table(member):
        out = {s: 0 for s in m.states}
        for s, i in pos.items():
            out[s] = member(i)
        return out.__getitem__

    single = table(lambda i: sum(1 << b for b in range(k) if b >> i & 1))
    left = table(lambda i: sum(1 << (a * k + b) for a in range(k) for b in range(k) if a >> i & 1))
    right = table(lambda i: sum(1 << (a * k + b) for a in range(k) for b in range(k) if b >> i & 1))

    shapes = [Next(single), Eventually(single), Always(single), Until(left, right), Release(left, right)]
    exact = {}
    for kind in shapes:
        if isinstance(kind, (Until, Release)):
            insts = [(a * k + b, type(kind)(subset(original, a), subset(original, b)))
                     for a in range(k) for b in range(k)]
        else:
            insts = [(a, type(kind)(subset(original, a))) for a in range(k)]
        exact[type(kind)] = [(idx, po_path(m, p)) for idx, p in insts]
    count = 0
    for s in original:
        table = oracle_table(m, s, shapes, horizon=len(m.states))
        for kind, got in zip(shapes, table):
            for idx, vals in exact[type(kind)]:
                want = got.get(idx, Fraction(0))
                assert vals[s] == want, (m, s, kind, idx, vals[s], want)
                count += 1
    return count


def random_pks(rng, max_states=3, values=VALUES3, atoms="ab", normal=True):
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    trans = {}
    for s in states:
        row = [rng.choice(values) for _ in states]
        if normal:
            row[rng.randrange(n)] = Fraction(1)
        elif not any(row):
            row[rng.randrange(n)] = rng.choice([v for v in values if v])
        for t, v in zip(states, row):
            if v:
                trans[(s, t)] = v
    labels = {s: {x for x in atoms if rng.random() < 0.5} for s in states}
    return PKS(states, trans, {states[0]: 1}, labels, set(atoms))


THRESHOLDS = (Fraction(0), Fraction(1, 4), HALF, Fraction(3, 4), Fraction(1))


def random_formula(rng, depth, atoms="ab", thresholds=THRESHOLDS):
    """Random PoCTL state formula over the unbounded path shapes."""
    if depth == 0 or rng.random() < 0.3:
        a = Atom(rng.choice(atoms))
        return a if rng.random() < 0.6 else Not(a)
    k = rng.random()
    if k < 0.15:
        return And(random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms))
    if k < 0.3:
        return Or(random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms))
    if k < 0.4:
        return Not(random_formula(rng, depth - 1, atoms))
    q = rng.choice((Po, Ne))
    bound = Threshold(rng.choice((GE, GT)), rng.choice(thresholds))
    x = random_formula(rng, depth - 1, atoms)
    shape = rng.choice("XFGUR")
    if shape == "X":
        path = Next(x)
    elif shape == "F":
        path = Eventually(x)
    elif shape == "G":
        path = Always(x)
    elif shape == "U":
        path = Until(x, random_formula(rng, depth - 1, atoms))
    else:
        path = Release(x, random_formula(rng, depth - 1, atoms))
    return q(bound, path)


# --- hypothesis strategies ----------------------------------------------------------------

from hypothesis import strategies as st  # noqa: E402

from poctl.formula import (FALSE, LE, LT, TRUE, BoundedAlways, BoundedUntil, Iff, Implies,  # noqa: E402
                           Interval)

SPEC_THRESHOLDS = tuple(Fraction(x) for x in ("0", "1/4", "1/3", "1/2", "2/3", "3/4", "1"))
atoms_st = st.sampled_from([Atom("a"), Atom("b")])


def bounds_st(ops=(GE, GT, LE, LT), intervals=True):
    thr = st.builds(Threshold, st.sampled_from(ops), st.sampled_from(SPEC_THRESHOLDS))
    if not intervals:
        return thr

    def interval(lo, hi, lc, hc):
        lo, hi = min(lo, hi), max(lo, hi)
        if lo == hi:
            lc = hc = True
        return Interval(lo, hi, lc, hc)

    return st.one_of(thr, st.builds(interval, st.sampled_from(SPEC_THRESHOLDS),
                                    st.sampled_from(SPEC_THRESHOLDS), st.booleans(), st.booleans()))


def paths_st(sub, bounded=True):
    shapes = [st.builds(Next, sub), st.builds(Until, sub, sub), st.builds(Release, sub, sub),
              st.builds(Eventually, sub), st.builds(Always, sub)]
    if bounded:
        n = st.integers(0, 2)
        shapes += [st.builds(BoundedUntil, sub, sub, n), st.builds(BoundedAlways, sub, n)]
    return st.one_of(*shapes)


def formulas_st(max_leaves=6, full=True, bounds=None, bounded=True):
    """Random state formulas; `full` adds ->, <->, intervals and <=/< comparisons."""
    bounds = bounds or (bounds_st() if full else bounds_st((GE, GT), intervals=False))

    def extend(sub):
        opts = [st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub),
                st.builds(Po, bounds, paths_st(sub, bounded)),
                st.builds(Ne, bounds, paths_st(sub, bounded))]
        if full:
            opts += [st.builds(Implies, sub, sub), st.builds(Iff, sub, sub)]
        return st.one_of(*opts)

    base = st.one_of(atoms_st, st.builds(Not, atoms_st), st.sampled_from([TRUE, FALSE]))
    return st.recursive(base, extend, max_leaves=max_leaves)


def pks_st(max_states=3, values=VALUES3, normal=True, atoms="ab"):
    """Random PKS; rows get a 1 entry when `normal`."""
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_states))
        states = [f"q{i}" for i in range(n)]
        trans = {}
        for s in states:
            row = [draw(st.sampled_from(values)) for _ in states]
            if normal:
                row[draw(st.integers(0, n - 1))] = Fraction(1)
            elif not any(row):
                row[draw(st.integers(0, n - 1))] = max(values)
            for t, v in zip(states, row):
                if v:
                    trans[(s, t)] = v
        labels = {s: set(draw(st.sets(st.sampled_from(atoms)))) for s in states}
        return PKS(states, trans, {states[0]: 1}, labels, set(atoms))
    return build()


def state_sets_st(m):
    return st.frozensets(st.sampled_from(m.states))


# --- axiom schema instances ---------------------------------------------------------------

from dataclasses import fields, is_dataclass  # noqa: E402

from poctl.formula import ONE  # noqa: E402
from poctl.proof import SCHEMAS, _B, _Var  # noqa: E402


def instantiate(pattern, subst, thresholds):
    """Apply a substitution and threshold bindings to a schema pattern."""
    if isinstance(pattern, _Var):
        return subst[pattern.name]
    if isinstance(pattern, _B):
        v = thresholds[pattern.var]
        if pattern.mode == "same":
            return v
        if pattern.mode == "dual":
            return Threshold(GT if v.op == GE else GE, ONE - v.value)
        return Threshold(GE if pattern.mode == "ge" else GT, v)
    if not is_dataclass(pattern):
        return pattern
    return type(pattern)(*(instantiate(getattr(pattern, x.name), subst, thresholds)
                           for x in fields(pattern)))


def _metavariables(pattern, acc):
    if isinstance(pattern, _Var):
        acc.add(pattern.name)
    elif is_dataclass(pattern) and not isinstance(pattern, _B):
        for x in fields(pattern):
            _metavariables(getattr(pattern, x.name), acc)
    return acc


def schema_grid(args, values):
    """(schema id, instance) for every schema other than A1.

    State metavariables range over `args`; thresholds over `values` with both
    comparisons; path metavariables over X, F and U built from `args`.
    """
    paths = ([Next(x) for x in args] + [Eventually(x) for x in args]
             + [Until(x, y) for x in args for y in args])
    out = []
    for name, (pattern, side) in SCHEMAS.items():
        names = sorted(_metavariables(pattern, set()))
        if name == "AP1":
            for r in values:
                out += [(name, instantiate(pattern, {"φ": p}, {"r": r})) for p in paths]
        elif name.startswith("AP"):
            for r1, r2 in itertools.product(values, repeat=2):
                t = {"r1": r1, "r2": r2}
                if side(t):
                    out += [(name, instantiate(pattern, {"φ": p}, t)) for p in paths]
        else:
            for op, r in itertools.product((GE, GT), values):
                t = {"r": Threshold(op, r)}
                if side is not None and not side(t):
                    continue
                for combo in itertools.product(args, repeat=len(names)):
                    out.append((name, instantiate(pattern, dict(zip(names, combo)), t)))
    return out
