"""PoCTL formula AST, positive normal form, threshold sets, closure and classification.

Po/Ne nodes are fused with their path operator: ``Po(bound, Until(a, b))`` is a
single node for sizing and classification purposes.
"""
from dataclasses import dataclass, fields
from fractions import Fraction

from .errors import MalformedThreshold, NotPNF

GE, GT, LE, LT = ">=", ">", "<=", "<"
ZERO, ONE = Fraction(0), Fraction(1)


def rat(x):
    """Exact rational from an int, Fraction, or a string like '1/3' or '0.25'."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a threshold")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot make an exact rational from {x!r}")


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in fields(cls))
    tag = cls.__name__

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((tag,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


# --- bounds -----------------------------------------------------------------

@_node
class Threshold:
    op: str
    value: Fraction

    def __post_init__(self):
        if self.op not in (GE, GT, LE, LT):
            raise ValueError(f"bad comparison {self.op!r}")
        object.__setattr__(self, "value", rat(self.value))


@_node
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))

    def is_empty(self):
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)


# --- state formulas ----------------------------------------------------------

class Formula:
    def __str__(self):
        from .syntax import print_formula
        return print_formula(self)


@_node
class TrueF(Formula):
    pass


@_node
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@_node
class Atom(Formula):
    name: str


@_node
class Not(Formula):
    arg: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


class Modal(Formula):
    """Common base of the fused Po/Ne nodes (fields: bound, path)."""


@_node
class Po(Modal):
    bound: object
    path: object


@_node
class Ne(Modal):
    bound: object
    path: object


# --- path shapes ---------------------------------------------------------------
# The arguments are state formulas, or frozensets of states when handed to the
# model checker's path evaluators.

class Path:
    pass


@_node
class Next(Path):
    arg: object


@_node
class Until(Path):
    left: object
    right: object


@_node
class BoundedUntil(Path):
    left: object
    right: object
    steps: int


@_node
class Release(Path):
    left: object
    right: object


@_node
class Eventually(Path):
    arg: object


@_node
class Always(Path):
    arg: object


@_node
class BoundedAlways(Path):
    arg: object
    steps: int


def path_args(path):
    if isinstance(path, (Next, Eventually, Always, BoundedAlways)):
        return (path.arg,)
    return (path.left, path.right)


def map_path(path, fn):
    """Rebuild `path` with `fn` applied to each argument."""
    if isinstance(path, Next):
        return Next(fn(path.arg))
    if isinstance(path, Eventually):
        return Eventually(fn(path.arg))
    if isinstance(path, Always):
        return Always(fn(path.arg))
    if isinstance(path, BoundedAlways):
        return BoundedAlways(fn(path.arg), path.steps)
    if isinstance(path, Until):
        return Until(fn(path.left), fn(path.right))
    if isinstance(path, Release):
        return Release(fn(path.left), fn(path.right))
    if isinstance(path, BoundedUntil):
        return BoundedUntil(fn(path.left), fn(path.right), path.steps)
    raise TypeError(f"not a path shape: {path!r}")


# --- convenience constructors -------------------------------------------------

def atom(name):
    return Atom(name)


def po(op, r, path):
    return Po(Threshold(op, rat(r)), path)


def ne(op, r, path):
    return Ne(Threshold(op, rat(r)), path)


def conj(*fs):
    if not fs:
        return TRUE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs):
    if not fs:
        return FALSE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def lambda_n(n):
    """Po>=1/2[X Po>=1/3[X ... Po>=1/n[X a]]], which has size n."""
    f = Atom("a")
    for k in range(n, 1, -1):
        f = po(GE, Fraction(1, k), Next(f))
    return f


# --- structural helpers ---------------------------------------------------------

def children(f):
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or, Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Modal):
        return path_args(f.path)
    return ()


def formula_size(f):
    """Node count; a Po/Ne block together with its path operator counts once."""
    return 1 + sum(formula_size(c) for c in children(f))


def subformulas(f):
    seen = []
    stack = [f]
    found = set()
    while stack:
        g = stack.pop()
        if g in found:
            continue
        found.add(g)
        seen.append(g)
        stack.extend(children(g))
    return seen


def atoms_of(f):
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def thresholds_of(f):
    out = set()
    for g in subformulas(f):
        if isinstance(g, Modal):
            b = g.bound
            if isinstance(b, Threshold):
                out.add(b.value)
            else:
                out.update((b.lo, b.hi))
    return out


def check_thresholds(f):
    for g in subformulas(f):
        if not isinstance(g, Modal):
            continue
        b = g.bound
        vals = (b.value,) if isinstance(b, Threshold) else (b.lo, b.hi)
        for v in vals:
            if not ZERO <= v <= ONE:
                raise MalformedThreshold(f"threshold {v} outside [0,1]")
        if isinstance(b, Interval) and b.is_empty():
            raise MalformedThreshold(f"empty interval {b}")
        if isinstance(g.path, (BoundedUntil, BoundedAlways)) and g.path.steps < 0:
            raise MalformedThreshold("negative step bound")


def is_degenerate(f):
    """Po/Ne >=0 is always true and Po/Ne >1 always false."""
    b = f.bound
    return isinstance(b, Threshold) and (
        (b.op == GE and b.value == ZERO) or (b.op == GT and b.value == ONE))


def is_pnf(f):
    if isinstance(f, (TrueF, FalseF, Atom)):
        return True
    if isinstance(f, Not):
        return isinstance(f.arg, Atom)
    if isinstance(f, (And, Or)):
        return is_pnf(f.left) and is_pnf(f.right)
    if isinstance(f, Modal):
        b = f.bound
        if not isinstance(b, Threshold) or b.op not in (GE, GT) or is_degenerate(f):
            return False
        if not isinstance(f.path, (Next, Until, Release, Eventually, Always)):
            return False
        return all(is_pnf(a) for a in path_args(f.path))
    return False


def _require_pnf(f):
    if not is_pnf(f):
        raise NotPNF(f"not in positive normal form: {f}")


# --- desugaring -------------------------------------------------------------------

def _flip(op):
    return {GE: GT, GT: GE}[op]


def decompose_intervals(f):
    """Rewrite interval bounds as conjunctions and <=/< bounds as negated >/>=."""
    if isinstance(f, Not):
        return Not(decompose_intervals(f.arg))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(decompose_intervals(f.left), decompose_intervals(f.right))
    if not isinstance(f, Modal):
        return f
    q = type(f)
    path = map_path(f.path, decompose_intervals)
    b = f.bound
    if isinstance(b, Interval):
        if b.is_empty():
            raise MalformedThreshold(f"empty interval [{b.lo},{b.hi}]")
        lower = q(Threshold(GE if b.lo_closed else GT, b.lo), path)
        upper = Not(q(Threshold(GT if b.hi_closed else GE, b.hi), path))
        return And(lower, upper)
    if b.op == LE:
        return Not(q(Threshold(GT, b.value), path))
    if b.op == LT:
        return Not(q(Threshold(GE, b.value), path))
    return q(b, path)


def _expand_bounded(q, bound, path):
    if isinstance(path, BoundedUntil):
        if path.steps == 0:
            return path.right
        rest = q(bound, Next(q(bound, BoundedUntil(path.left, path.right, path.steps - 1))))
        return Or(path.right, And(path.left, rest))
    if path.steps == 0:
        return path.arg
    rest = q(bound, Next(q(bound, BoundedAlways(path.arg, path.steps - 1))))
    return And(path.arg, rest)


def desugar(f):
    """Remove intervals, <=/<, iff and bounded operators without pushing negation.

    The PNF size bound is measured against this form: iff and the bounded
    operators are abbreviations whose unfolding repeats their arguments.
    """
    return _desugar(decompose_intervals(f))


def _desugar(f):
    if isinstance(f, Not):
        return Not(_desugar(f.arg))
    if isinstance(f, Iff):
        l, r = _desugar(f.left), _desugar(f.right)
        return And(Implies(l, r), Implies(r, l))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_desugar(f.left), _desugar(f.right))
    if isinstance(f, Modal):
        if is_degenerate(f):
            return TRUE if f.bound.op == GE else FALSE
        path = map_path(f.path, _desugar)
        if isinstance(path, (BoundedUntil, BoundedAlways)):
            return _desugar(_expand_bounded(type(f), f.bound, path))
        return type(f)(f.bound, path)
    return f


# --- positive normal form ------------------------------------------------------------

def _dual_path(path, neg):
    if isinstance(path, Next):
        return Next(neg(path.arg))
    if isinstance(path, Until):
        return Release(neg(path.left), neg(path.right))
    if isinstance(path, Release):
        return Until(neg(path.left), neg(path.right))
    if isinstance(path, Eventually):
        return Always(neg(path.arg))
    if isinstance(path, Always):
        return Eventually(neg(path.arg))
    raise TypeError(f"no dual for {path!r}")


def _push(f, positive):
    if isinstance(f, TrueF):
        return TRUE if positive else FALSE
    if isinstance(f, FalseF):
        return FALSE if positive else TRUE
    if isinstance(f, Atom):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _push(f.arg, not positive)
    if isinstance(f, And):
        l, r = _push(f.left, positive), _push(f.right, positive)
        return And(l, r) if positive else Or(l, r)
    if isinstance(f, Or):
        l, r = _push(f.left, positive), _push(f.right, positive)
        return Or(l, r) if positive else And(l, r)
    if isinstance(f, Implies):
        if positive:
            return Or(_push(f.left, False), _push(f.right, True))
        return And(_push(f.left, True), _push(f.right, False))
    if isinstance(f, Iff):
        return _push(And(Implies(f.left, f.right), Implies(f.right, f.left)), positive)
    if isinstance(f, Modal):
        if is_degenerate(f):
            value = f.bound.op == GE
            return (TRUE if value else FALSE) if positive else (FALSE if value else TRUE)
        b = f.bound
        if positive:
            return type(f)(b, map_path(f.path, lambda g: _push(g, True)))
        other = Ne if isinstance(f, Po) else Po
        return other(Threshold(_flip(b.op), ONE - b.value),
                     _dual_path(f.path, lambda g: _push(g, False)))
    raise TypeError(f"not a state formula: {f!r}")


def to_pnf(f):
    """Equivalent formula in positive normal form."""
    check_thresholds(f)
    return _push(desugar(f), True)


def negate_pnf(f):
    """PNF of the negation of a PNF formula; an involution."""
    _require_pnf(f)
    return _push(f, False)


# --- threshold sets ---------------------------------------------------------------------

class ThresholdSet:
    """Strictly increasing rationals containing 0 and 1, with pred/succ."""

    def __init__(self, values):
        self.values = tuple(sorted(set(rat(v) for v in values)))
        self._index = {v: i for i, v in enumerate(self.values)}

    def __contains__(self, r):
        return r in self._index

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, ThresholdSet) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "ThresholdSet([" + ", ".join(str(v) for v in self.values) + "])"

    def pred(self, r):
        i = self._index[r]
        if i == 0:
            raise ValueError(f"{r} is the least element")
        return self.values[i - 1]

    def succ(self, r):
        i = self._index[r]
        if i == len(self.values) - 1:
            raise ValueError(f"{r} is the greatest element")
        return self.values[i + 1]


def value_sets(f):
    """(V, EV): thresholds of `f`, their complements and {0,1}; EV adds midpoints."""
    base = thresholds_of(f)
    v = set(base) | {ONE - r for r in base} | {ZERO, ONE}
    vs = sorted(v)
    ev = set(vs) | {(a + b) / 2 for a, b in zip(vs, vs[1:])}
    return ThresholdSet(vs), ThresholdSet(ev)


# --- closure ------------------------------------------------------------------------------

def _next_variants(f, V):
    """Threshold variants of a Po/Ne successor formula under closure rules (4)-(6)."""
    q, op, r = type(f), f.bound.op, f.bound.value
    out = []
    for r2 in V:
        if r2 <= r:
            out.append(q(Threshold(op, r2), f.path))
        if op == GE and r2 < r:
            out.append(q(Threshold(GT, r2), f.path))
    if op == GT:
        out.append(q(Threshold(GE, r), f.path))
    return [g for g in out if not is_degenerate(g)]


class ClosureSet(frozenset):
    """Frozen set of PNF formulas remembering the formula it was built from."""

    def __new__(cls, formulas, origin):
        obj = super().__new__(cls, formulas)
        obj.origin = origin
        return obj


def closure(f, literal_diamond=True):
    """(cl, ecl) of a PNF formula.

    Rules (4)-(6) apply to Po and Ne successor formulas.  With
    `literal_diamond` they also apply to Ne(F ...) formulas, the family the
    printed rule names.
    """
    _require_pnf(f)
    V, _ = value_sets(f)
    cl = set()
    work = [f]
    while work:
        g = work.pop()
        if g in cl:
            continue
        cl.add(g)
        work.extend(children(g))
        if isinstance(g, Modal):
            p = g.path
            if isinstance(p, Next):
                work.extend(_next_variants(g, V))
            else:
                work.append(type(g)(g.bound, Next(g)))
                if literal_diamond and isinstance(g, Ne) and isinstance(p, Eventually):
                    work.extend(_next_variants(g, V))
    ecl = set(cl)
    ecl.update(_push(g, False) for g in cl)
    return ClosureSet(cl, f), ClosureSet(ecl, f)


# --- Table 1 classification ---------------------------------------------------------------

@dataclass(frozen=True)
class FormulaClass:
    kind: str               # "conjunctive", "disjunctive", "successor", "literal"
    components: tuple


CONJUNCTIVE, DISJUNCTIVE, SUCCESSOR, LITERAL = "conjunctive", "disjunctive", "successor", "literal"


def unfold(f):
    """The successor formula Q(X Q(path)) used by the fixpoint unfolding of `f`."""
    return type(f)(f.bound, Next(f))


def classify(f):
    _require_pnf(f)
    if isinstance(f, (TrueF, FalseF, Atom, Not)):
        return FormulaClass(LITERAL, ())
    if isinstance(f, And):
        return FormulaClass(CONJUNCTIVE, (f.left, f.right))
    if isinstance(f, Or):
        return FormulaClass(DISJUNCTIVE, (f.left, f.right))
    p = f.path
    if isinstance(p, Next):
        return FormulaClass(SUCCESSOR, (p.arg,))
    if isinstance(p, Until):
        return FormulaClass(DISJUNCTIVE, (p.right, And(p.left, unfold(f))))
    if isinstance(p, Eventually):
        return FormulaClass(DISJUNCTIVE, (p.arg, unfold(f)))
    if isinstance(p, Release):
        return FormulaClass(CONJUNCTIVE, (p.right, Or(p.left, unfold(f))))
    if isinstance(p, Always):
        return FormulaClass(CONJUNCTIVE, (p.arg, unfold(f)))
    raise NotPNF(f"cannot classify {f!r}")


def is_eventuality(f):
    return isinstance(f, Modal) and isinstance(f.path, (Until, Eventually))
