"""Finite possibilistic Kripke structures, lassos and the brute-force path oracle."""
from dataclasses import dataclass
from types import MappingProxyType

from .errors import HorizonTooSmall, InvalidLasso, MalformedThreshold, UnknownState
from .formula import (Always, BoundedAlways, BoundedUntil, Eventually, Next, Release,
                      Until, ONE, ZERO, rat)

TRAP = "trap"


class PKS:
    """Immutable finite PKS.  Missing transitions have possibility 0."""

    def __init__(self, states, trans=None, init=None, labels=None, atoms=None):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        known = set(self.states)
        succ = {s: {} for s in self.states}
        for (s, t), p in (trans or {}).items():
            for x in (s, t):
                if x not in known:
                    raise UnknownState(f"unknown state {x!r}")
            p = rat(p)
            if not ZERO <= p <= ONE:
                raise MalformedThreshold(f"possibility {p} outside [0,1]")
            if p > 0:
                succ[s][t] = p
        self._succ = {s: MappingProxyType(d) for s, d in succ.items()}
        ini = {}
        for s, p in (init or {}).items():
            if s not in known:
                raise UnknownState(f"unknown state {s!r}")
            p = rat(p)
            if not ZERO <= p <= ONE:
                raise MalformedThreshold(f"initial possibility {p} outside [0,1]")
            if p > 0:
                ini[s] = p
        self.init = MappingProxyType(ini)
        lab = {s: frozenset() for s in self.states}
        for s, names in (labels or {}).items():
            if s not in known:
                raise UnknownState(f"unknown state {s!r}")
            lab[s] = frozenset(names)
        self.labels = MappingProxyType(lab)
        used = frozenset().union(*lab.values()) if lab else frozenset()
        self.atoms = frozenset(atoms) | used if atoms is not None else used

    def P(self, s, t):
        return self._succ[s].get(t, ZERO)

    def successors(self, s):
        """Mapping t -> P(s,t) over the positive entries."""
        return self._succ[s]

    @property
    def trans(self):
        return {(s, t): p for s in self.states for t, p in self._succ[s].items()}

    def label(self, s):
        return self.labels[s]

    def __eq__(self, other):
        return (isinstance(other, PKS) and self.states == other.states
                and self.trans == other.trans and dict(self.init) == dict(other.init)
                and dict(self.labels) == dict(other.labels) and self.atoms == other.atoms)

    def __repr__(self):
        return f"PKS(states={self.states!r}, transitions={len(self.trans)})"

    def row_max(self, s):
        return max(self._succ[s].values(), default=ZERO)

    def is_normal(self):
        return all(self.row_max(s) == ONE for s in self.states)

    def values(self):
        return frozenset(self.trans.values())


@dataclass(frozen=True)
class Violation:
    rule: str          # "NotNormal", "NotTotal" or "InitNotNormal"
    state: object

    def __str__(self):
        return f"{self.rule}({self.state})" if self.state is not None else self.rule


def validate(m, require_normal=True):
    """List of invariant violations; empty when the structure is fine."""
    out = []
    for s in m.states:
        mx = m.row_max(s)
        if mx == ZERO:
            out.append(Violation("NotTotal", s))
        elif require_normal and mx != ONE:
            out.append(Violation("NotNormal", s))
    if require_normal and m.init and max(m.init.values()) != ONE:
        out.append(Violation("InitNotNormal", None))
    return out


def trap_complete(m):
    """Send every non-normal state to a fresh absorbing trap state with possibility 1."""
    bad = [s for s in m.states if m.row_max(s) != ONE]
    if not bad:
        return m
    trap = TRAP
    while trap in m.states:
        trap += "_"
    trans = m.trans
    for s in bad:
        trans[(s, trap)] = ONE
    trans[(trap, trap)] = ONE
    return PKS(m.states + (trap,), trans, m.init, m.labels, m.atoms)


@dataclass(frozen=True)
class Lasso:
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise InvalidLasso("empty cycle")

    @property
    def start(self):
        return self.prefix[0] if self.prefix else self.cycle[0]

    def steps(self):
        seq = self.prefix + self.cycle + self.cycle[:1]
        return list(zip(seq, seq[1:]))

    def unrolled(self, times=2):
        """prefix followed by `times` copies of the cycle."""
        return self.prefix + self.cycle * times


def path_possibility(m, lasso, use_initial=False):
    vals = []
    for s, t in lasso.steps():
        p = m.P(s, t)
        if p == ZERO:
            raise InvalidLasso(f"no transition {s} -> {t}")
        vals.append(p)
    if use_initial:
        vals.append(m.init.get(lasso.start, ZERO))
    return min(vals)


def _walks(m, start, length):
    """All positive walks start, s1, ..., s_{length-1} as tuples of `length` states."""
    walks = [(start,)]
    for _ in range(length - 1):
        walks = [w + (t,) for w in walks for t in m.successors(w[-1])]
    return walks


def enumerate_lassos(m, s, horizon):
    """Every lasso from `s` with prefix length <= horizon and cycle length <= |S|."""
    n = len(m.states)
    if horizon < n:
        raise HorizonTooSmall(f"horizon {horizon} < {n} states")
    seen = set()
    out = []

    def cycles_from(c0):
        for length in range(1, n + 1):
            for w in _walks(m, c0, length):
                if c0 in m.successors(w[-1]):
                    yield w

    def add(prefix, cycle):
        key = _canonical(prefix, cycle)
        if key not in seen:
            seen.add(key)
            out.append(Lasso(*key))

    for cyc in cycles_from(s):
        add((), cyc)
    for plen in range(1, horizon + 1):
        for pre in _walks(m, s, plen):
            for c0 in m.successors(pre[-1]):
                for cyc in cycles_from(c0):
                    add(pre, cyc)
    return out


def _canonical(prefix, cycle):
    k = len(cycle)
    for d in range(1, k + 1):
        if k % d == 0 and cycle[:d] * (k // d) == cycle:
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        cycle = cycle[-1:] + cycle[:-1]
        prefix = prefix[:-1]
    return prefix, cycle


def _mask(x, sets):
    return sets(x) if callable(sets) else (1 if x in sets else 0)


def lasso_mask(lasso, shape, full=1):
    """Bitmask of the instances in which the lasso satisfies `shape`.

    Shape arguments are either state sets (single instance, bit 0) or functions
    from a state to an int bitmask, so many state-set assignments can be
    checked against one lasso at once.  One unrolling of the cycle after the
    prefix decides every shape: any witness position further out repeats an
    earlier one.
    """
    seq = lasso.unrolled(1)

    def m(arg, x):
        return _mask(x, arg)

    if isinstance(shape, Next):
        return m(shape.arg, lasso.unrolled(2)[1])
    if isinstance(shape, Eventually):
        out = 0
        for x in seq:
            out |= m(shape.arg, x)
        return out & full
    if isinstance(shape, Always):
        out = full
        for x in seq:
            out &= m(shape.arg, x)
        return out
    if isinstance(shape, Until):
        out, ok = 0, full
        for x in seq:
            out |= ok & m(shape.right, x)
            ok &= m(shape.left, x)
        return out
    if isinstance(shape, Release):
        out, ok = 0, full
        for x in seq:
            b = m(shape.right, x)
            out |= ok & b & m(shape.left, x)
            ok &= b
        return out | ok
    if isinstance(shape, BoundedUntil):
        seq = lasso.unrolled(shape.steps + 1)[:shape.steps + 1]
        out, ok = 0, full
        for x in seq:
            out |= ok & m(shape.right, x)
            ok &= m(shape.left, x)
        return out
    if isinstance(shape, BoundedAlways):
        seq = lasso.unrolled(shape.steps + 1)[:shape.steps + 1]
        out = full
        for x in seq:
            out &= m(shape.arg, x)
        return out
    raise TypeError(f"not a path shape: {shape!r}")


def event_possibility_oracle(m, s, shape, horizon=None):
    """sup of path possibility over the lassos from `s` that satisfy `shape`."""
    if s not in m.labels:
        raise UnknownState(f"unknown state {s!r}")
    if horizon is None:
        horizon = len(m.states)
    best = ZERO
    for lasso in enumerate_lassos(m, s, horizon):
        if lasso_mask(lasso, shape):
            best = max(best, path_possibility(m, lasso))
    return best


def oracle_table(m, s, shapes, horizon=None):
    """Oracle values for many instances at once.

    `shapes` are path shapes whose arguments map a state to a bitmask over
    instance indices; returns, per shape, a dict bit-index -> value for every
    instance with a positive value.
    """
    if horizon is None:
        horizon = len(m.states)
    lassos = [(path_possibility(m, l), l) for l in enumerate_lassos(m, s, horizon)]
    result = []
    for shape in shapes:
        by_value = {}
        for p, l in lassos:
            by_value[p] = by_value.get(p, 0) | lasso_mask(l, shape, full=-1)
        values = {}
        for p in sorted(by_value):
            bits = by_value[p]
            i = 0
            while bits:
                if bits & 1:
                    values[i] = p
                bits >>= 1
                i += 1
        result.append(values)
    return result
