"""Exact max-min fixpoint model checking of PoCTL over finite PKSs."""
from .errors import InternalError, UnknownAtom, UnknownState
from .formula import (GE, GT, LE, LT, ONE, ZERO, Always, And, Atom, BoundedAlways,
                      BoundedUntil, Eventually, FalseF, Iff, Implies, Interval, Modal,
                      Ne, Next, Not, Or, Po, Release, TrueF, Until, map_path)


def _step(m, x):
    """max over t of min(P(s,t), x(t)) for every s."""
    out = {}
    for s in m.states:
        best = ZERO
        for t, p in m.successors(s).items():
            v = p if p < x[t] else x[t]
            if v > best:
                best = v
        out[s] = best
    return out


def _fix(m, x, update, order=None):
    states = list(order) if order is not None else list(m.states)
    limit = len(m.states) * (len(m.values()) + 2) + 1
    for _ in range(limit):
        changed = False
        for s in states:
            v = update(s, x)
            if v != x[s]:
                x[s] = v
                changed = True
        if not changed:
            return x
    raise InternalError("fixpoint iteration did not stabilise")


def _best_succ(m, s, x):
    best = ZERO
    for t, p in m.successors(s).items():
        v = p if p < x[t] else x[t]
        if v > best:
            best = v
    return best


def _until(m, A, B, order=None):
    x = {s: ZERO for s in m.states}
    return _fix(m, x, lambda s, x: ONE if s in B else (_best_succ(m, s, x) if s in A else ZERO), order)


def _always(m, A, order=None):
    x = {s: (ONE if s in A else ZERO) for s in m.states}
    return _fix(m, x, lambda s, x: _best_succ(m, s, x) if s in A else ZERO, order)


def po_path(m, path, order=None):
    """Po(s |= path) for every state; path arguments are sets of states."""
    S = frozenset(m.states)
    if isinstance(path, Next):
        A = path.arg
        return {s: max((p for t, p in m.successors(s).items() if t in A), default=ZERO)
                for s in m.states}
    if isinstance(path, Until):
        return _until(m, path.left, path.right, order)
    if isinstance(path, Eventually):
        return _until(m, S, path.arg, order)
    if isinstance(path, Always):
        return _always(m, path.arg, order)
    if isinstance(path, Release):
        A, B = path.left, path.right
        u = _until(m, B, A & B, order)
        g = _always(m, B, order)
        return {s: max(u[s], g[s]) for s in m.states}
    if isinstance(path, BoundedUntil):
        A, B = path.left, path.right
        x = {s: (ONE if s in B else ZERO) for s in m.states}
        for _ in range(path.steps):
            nxt = _step(m, x)
            x = {s: ONE if s in B else (nxt[s] if s in A else ZERO) for s in m.states}
        return x
    if isinstance(path, BoundedAlways):
        A = path.arg
        x = {s: (ONE if s in A else ZERO) for s in m.states}
        for _ in range(path.steps):
            nxt = _step(m, x)
            x = {s: nxt[s] if s in A else ZERO for s in m.states}
        return x
    raise TypeError(f"not a path shape: {path!r}")


def complement_paths(m, path):
    """Path shapes whose union is the complement of `path` (over state sets)."""
    S = frozenset(m.states)
    neg = lambda A: S - A
    if isinstance(path, Next):
        return [Next(neg(path.arg))]
    if isinstance(path, Until):
        return [Release(neg(path.left), neg(path.right))]
    if isinstance(path, Release):
        return [Until(neg(path.left), neg(path.right))]
    if isinstance(path, Eventually):
        return [Always(neg(path.arg))]
    if isinstance(path, Always):
        return [Eventually(neg(path.arg))]
    if isinstance(path, BoundedUntil):
        A, B = path.left, path.right
        return [BoundedUntil(neg(B), neg(A) & neg(B), path.steps),
                BoundedAlways(neg(B), path.steps)]
    if isinstance(path, BoundedAlways):
        return [BoundedUntil(S, neg(path.arg), path.steps)]
    raise TypeError(f"not a path shape: {path!r}")


def ne_path(m, path, order=None):
    """Ne(s |= path) = 1 - Po(s |= complement of path)."""
    parts = [po_path(m, c, order) for c in complement_paths(m, path)]
    return {s: ONE - max(p[s] for p in parts) for s in m.states}


def in_bound(v, bound):
    if isinstance(bound, Interval):
        lo_ok = v >= bound.lo if bound.lo_closed else v > bound.lo
        hi_ok = v <= bound.hi if bound.hi_closed else v < bound.hi
        return lo_ok and hi_ok
    r = bound.value
    return {GE: v >= r, GT: v > r, LE: v <= r, LT: v < r}[bound.op]


class Checker:
    """Bottom-up evaluator with memoised satisfaction sets for one model."""

    def __init__(self, m, unknown_atoms="error", order=None):
        if unknown_atoms not in ("error", "false"):
            raise ValueError("unknown_atoms must be 'error' or 'false'")
        self.m = m
        self.unknown_atoms = unknown_atoms
        self.order = order
        self.all = frozenset(m.states)
        self._sat = {}
        self._values = {}

    def sat(self, f):
        hit = self._sat.get(f)
        if hit is None:
            hit = self._compute(f)
            self._sat[f] = hit
        return hit

    def value(self, f):
        """Per-state Po or Ne value of the path inside a Po/Ne block."""
        hit = self._values.get(f)
        if hit is None:
            path = map_path(f.path, self.sat)
            hit = po_path(self.m, path, self.order) if isinstance(f, Po) else ne_path(self.m, path, self.order)
            # Po values come from {0,1} and the transition values; Ne values are
            # their complements.
            lattice = self.m.values() | {ZERO, ONE}
            flip = isinstance(f, Ne)
            if any((ONE - v if flip else v) not in lattice for v in hit.values()):
                raise InternalError("value outside the model's value lattice")
            self._values[f] = hit
        return hit

    def _compute(self, f):
        m = self.m
        if isinstance(f, TrueF):
            return self.all
        if isinstance(f, FalseF):
            return frozenset()
        if isinstance(f, Atom):
            if f.name not in m.atoms and self.unknown_atoms == "error":
                raise UnknownAtom(f"atom {f.name!r} is not in the model's atom set")
            return frozenset(s for s in m.states if f.name in m.labels[s])
        if isinstance(f, Not):
            return self.all - self.sat(f.arg)
        if isinstance(f, And):
            return self.sat(f.left) & self.sat(f.right)
        if isinstance(f, Or):
            return self.sat(f.left) | self.sat(f.right)
        if isinstance(f, Implies):
            return (self.all - self.sat(f.left)) | self.sat(f.right)
        if isinstance(f, Iff):
            a, b = self.sat(f.left), self.sat(f.right)
            return frozenset(s for s in m.states if (s in a) == (s in b))
        if isinstance(f, Modal):
            vals = self.value(f)
            return frozenset(s for s in m.states if in_bound(vals[s], f.bound))
        raise TypeError(f"not a state formula: {f!r}")


def sat_states(m, f, unknown_atoms="error"):
    return Checker(m, unknown_atoms).sat(f)


def check(m, s, f, unknown_atoms="error"):
    if s not in m.labels:
        raise UnknownState(f"unknown state {s!r}")
    return s in sat_states(m, f, unknown_atoms)
