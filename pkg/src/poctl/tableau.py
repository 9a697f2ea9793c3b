"""Tableau decision procedure for PoCTL satisfiability, witness extraction and validity.

Nodes are the maximal propositionally consistent subsets of ecl(Λ).  Such a
set is fixed by its elementary part: the truth of every atom and every
successor formula Po/Ne(X Φ).  Each successor formula is read in Po form
(Ne_{~r}(X Φ) is the negation of Po_{~',1-r}(X ¬Φ)), and the Po forms sharing
one argument form a chain ordered by strength.  Threshold monotonicity makes
the true members of a chain a prefix, so a node is an atom assignment plus a
cut position per chain; the rest of its label follows by unfolding the
classification components.
"""
import itertools
import os
from dataclasses import dataclass

from .checker import Checker
from .errors import (CapacityExceeded, NonNormalWitness, NotPNF,
                     WitnessVerificationFailed)
from .formula import (CONJUNCTIVE, GE, GT, ONE, TRUE, ZERO, And, Atom, FalseF, Modal, Ne,
                      Next, Not, Or, Po, Threshold, TrueF, Until, atoms_of, classify, closure,
                      is_eventuality, is_pnf, negate_pnf, to_pnf, value_sets)
from .pks import PKS

DEFAULT_NODE_CAP = 2 ** 22
INF = float("inf")


def node_cap(cap=None):
    if cap is not None:
        return int(cap)
    env = os.environ.get("POCTL_NODE_CAP")
    return int(env) if env else DEFAULT_NODE_CAP


def _cmp(v, op, r):
    return v >= r if op == GE else v > r


def _flip(op):
    return GT if op == GE else GE


@dataclass(frozen=True)
class Family:
    """Po successor formulas with argument `key`, weakest member first."""
    key: object
    members: tuple          # ((op, r), ...)

    def formula(self, idx):
        op, r = self.members[idx]
        return Po(Threshold(op, r), Next(self.key))


@dataclass(frozen=True)
class Node:
    index: int
    atoms: frozenset        # atoms true at the node
    cuts: tuple             # per family: number of true members


class Tableau:
    def __init__(self, formula, cap=None, literal_diamond=False):
        if not is_pnf(formula):
            raise NotPNF("build_tableau expects a formula in positive normal form")
        self.formula = formula
        self.V, self.EV = value_sets(formula)
        _, ecl = closure(formula, literal_diamond)
        self.ecl = tuple(sorted(ecl, key=lambda f: (len(str(f)), str(f))))
        self.atoms = tuple(sorted({f.name for f in self.ecl if isinstance(f, Atom)}))

        chains = {}
        for f in self.ecl:
            if isinstance(f, Modal) and isinstance(f.path, Next):
                key, op, r = self._po_form(f)
                chains.setdefault(key, set()).add((op, r))
        keys = sorted(chains, key=str)
        self.families = tuple(
            Family(k, tuple(sorted(chains[k], key=lambda m: (m[1], 0 if m[0] == GE else 1))))
            for k in keys)
        self._member = {}
        for fi, fam in enumerate(self.families):
            for idx, m in enumerate(fam.members):
                self._member[(fam.key, m)] = (fi, idx)

        count = 2 ** len(self.atoms)
        for fam in self.families:
            count *= len(fam.members) + 1
        limit = node_cap(cap)
        if count > limit:
            raise CapacityExceeded(f"tableau would have {count} nodes (limit {limit})")

        self.eventualities = tuple(f for f in self.ecl if is_eventuality(f))
        self.nodes = []
        self._memo = []
        cut_ranges = [range(len(f.members) + 1) for f in self.families]
        for bits in itertools.product((False, True), repeat=len(self.atoms)):
            true_atoms = frozenset(a for a, b in zip(self.atoms, bits) if b)
            for cuts in itertools.product(*cut_ranges):
                self.nodes.append(Node(len(self.nodes), true_atoms, tuple(cuts)))
                self._memo.append({})

        # successor signature: which chain arguments a node satisfies
        self.sig_of = []
        sig_ids = {}
        for n in self.nodes:
            sig = tuple(self.holds(fam.key, n.index) for fam in self.families)
            self.sig_of.append(sig_ids.setdefault(sig, len(sig_ids)))
        self.sigs = [None] * len(sig_ids)
        for sig, i in sig_ids.items():
            self.sigs[i] = sig
        self._caps = {}
        self._rows = {}
        self.alive = frozenset(range(len(self.nodes)))
        self.sweeps = 0

    # --- labels ---------------------------------------------------------------------------

    def _po_form(self, f):
        """(argument, op, r) of the Po successor formula equivalent to f or to its negation."""
        op, r = f.bound.op, f.bound.value
        if isinstance(f, Po):
            return f.path.arg, op, r
        return negate_pnf(f.path.arg), _flip(op), ONE - r

    def holds(self, f, i):
        memo = self._memo[i]
        hit = memo.get(f)
        if hit is None:
            hit = self._eval(f, i)
            memo[f] = hit
        return hit

    def _eval(self, f, i):
        node = self.nodes[i]
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Atom):
            return f.name in node.atoms
        if isinstance(f, Not):
            return f.arg.name not in node.atoms
        if isinstance(f, And):
            return self.holds(f.left, i) and self.holds(f.right, i)
        if isinstance(f, Or):
            return self.holds(f.left, i) or self.holds(f.right, i)
        if isinstance(f.path, Next):
            key, op, r = self._po_form(f)
            fi, idx = self._member[(key, (op, r))]
            val = node.cuts[fi] > idx
            return val if isinstance(f, Po) else not val
        cls = classify(f)
        a, b = cls.components
        if cls.kind == CONJUNCTIVE:
            return self.holds(a, i) and self.holds(b, i)
        return self.holds(a, i) or self.holds(b, i)

    def label(self, i):
        return frozenset(f for f in self.ecl if self.holds(f, i))

    # --- edges ----------------------------------------------------------------------------

    def caps(self, i):
        """Per family, the largest edge value into a node satisfying its argument."""
        cuts = self.nodes[i].cuts
        hit = self._caps.get(cuts)
        if hit is None:
            out = []
            for fam, c in zip(self.families, cuts):
                if c == len(fam.members):
                    out.append(ONE)
                else:
                    op, r = fam.members[c]
                    out.append(self.EV.pred(r) if op == GE else r)
            hit = tuple(out)
            self._caps[cuts] = hit
        return hit

    def obligations(self, i):
        """Strongest true Po successor formula per family as (family, op, r)."""
        out = []
        for fi, (fam, c) in enumerate(zip(self.families, self.nodes[i].cuts)):
            if c:
                op, r = fam.members[c - 1]
                out.append((fi, op, r))
        return out

    def min_value(self, op, r):
        """Least value in EV meeting `~ r`."""
        return r if op == GE else self.EV.succ(r)

    def _edge_row(self, i):
        """Edge value from node i into every signature."""
        caps = self.caps(i)
        hit = self._rows.get(caps)
        if hit is None:
            row = []
            for sig in self.sigs:
                v = ONE
                for c, present in zip(caps, sig):
                    if present and c < v:
                        v = c
                row.append(v)
            hit = tuple(row)
            self._rows[caps] = hit
        return hit

    def edge(self, s, t):
        """Closed-form edge possibility: the largest value in d_set(s, t)."""
        return self._edge_row(s)[self.sig_of[t]]

    def d_set(self, s, t):
        """Values v in EV compatible with every Ne successor obligation of s towards t."""
        conds = []
        for f in self.ecl:
            if isinstance(f, Ne) and isinstance(f.path, Next) and self.holds(f, s):
                conds.append((f.bound.op, ONE - f.bound.value, self.holds(f.path.arg, t)))
        out = set()
        for v in self.EV:
            ok = True
            for op, thr, present in conds:
                if not present and (v >= thr if op == GT else v > thr):
                    ok = False
                    break
            if ok:
                out.add(v)
        return out

    # --- pruning --------------------------------------------------------------------------

    def _alive_sigs(self, alive):
        by_sig = {}
        for i in sorted(alive):
            by_sig.setdefault(self.sig_of[i], []).append(i)
        return by_sig

    def _candidate_sigs(self, i, ob, by_sig):
        """Alive signatures that can discharge obligation `ob` of node i (None = normality)."""
        row = self._edge_row(i)
        if ob is None:
            return [sid for sid in by_sig if row[sid] == ONE]
        fi, op, r = ob
        return [sid for sid in by_sig if self.sigs[sid][fi] and _cmp(row[sid], op, r)]

    def _local_ok(self, i, by_sig):
        for ob in [None] + self.obligations(i):
            if not self._candidate_sigs(i, ob, by_sig):
                return False
        return True

    def sweep(self):
        """One deletion sweep over the current alive set; returns the deleted nodes."""
        alive = self.alive
        by_sig = self._alive_sigs(alive)
        bad = set()
        verdict = {}
        for i in alive:
            cuts = self.nodes[i].cuts
            ok = verdict.get(cuts)
            if ok is None:
                ok = verdict[cuts] = self._local_ok(i, by_sig)
            if not ok:
                bad.add(i)
        for ev in self.eventualities:
            ranks = self.rank(ev, alive)
            for i in alive:
                if i not in ranks and self.holds(ev, i):
                    bad.add(i)
        self.alive = alive - bad
        self.sweeps += 1
        return bad

    def prune(self):
        while self.sweep():
            pass
        return self

    # --- ranking --------------------------------------------------------------------------

    def rank(self, ev, alive=None):
        return (rank_existential if isinstance(ev, Po) else rank_universal)(self, ev, alive)

    def _split(self, ev):
        p = ev.path
        if isinstance(p, Until):
            return p.left, p.right
        return TRUE, p.arg

    def relevant(self, ev, mv):
        """Whether an edge of value mv counts for the universal eventuality ev."""
        thr = ONE - ev.bound.value
        return mv >= thr if ev.bound.op == GT else mv > thr

    def roots(self):
        return [i for i in sorted(self.alive) if self.holds(self.formula, i)]

    @property
    def satisfiable(self):
        return bool(self.roots())


def _bfs(t, members, base, requirements, alive):
    """Shared level-by-level rank propagation.

    requirements[s] lists, per obligation of the pending node s, the signature
    ids that discharge it.  A node is ranked once every obligation has a
    ranked signature; its rank is one more than the level of the last one.
    """
    by_sig_waiting = {}
    left = {}
    for s, reqs in requirements.items():
        left[s] = len(reqs)
        for oi, sids in enumerate(reqs):
            for sid in sids:
                by_sig_waiting.setdefault(sid, []).append((s, oi))
    done = {s: [False] * len(reqs) for s, reqs in requirements.items()}
    ranks = {s: 1 for s in base}
    level = list(base)
    sig_ranked = set()
    depth = 1
    while level:
        new_sigs = []
        for s in level:
            sid = t.sig_of[s]
            if sid not in sig_ranked:
                sig_ranked.add(sid)
                new_sigs.append(sid)
        nxt = []
        for sid in new_sigs:
            for s, oi in by_sig_waiting.get(sid, ()):
                if s in ranks or done[s][oi]:
                    continue
                done[s][oi] = True
                left[s] -= 1
                if left[s] == 0:
                    ranks[s] = depth + 1
                    nxt.append(s)
        level = nxt
        depth += 1
    return ranks


def rank_existential(t, ev, alive=None):
    """Ranks of the alive nodes containing the Po eventuality ev; missing = infinite."""
    alive = t.alive if alive is None else alive
    by_sig = t._alive_sigs(alive)
    phi, psi = t._split(ev)
    op, q = ev.bound.op, ev.bound.value
    fi = t._member[(ev, (op, q))][0]
    members = [i for i in sorted(alive) if t.holds(ev, i)]
    base = [i for i in members if t.holds(psi, i)]
    reqs = {}
    for i in members:
        if not t.holds(psi, i) and t.holds(phi, i):
            reqs[i] = [t._candidate_sigs(i, (fi, op, q), by_sig)]
    return _bfs(t, members, base, reqs, alive)


def rank_universal(t, ev, alive=None):
    """Ranks of the alive nodes containing the Ne eventuality ev; missing = infinite.

    Every successor obligation whose least edge value passes the eventuality's
    threshold, together with the normality obligation, must lead to a ranked node.
    """
    alive = t.alive if alive is None else alive
    by_sig = t._alive_sigs(alive)
    phi, psi = t._split(ev)
    members = [i for i in sorted(alive) if t.holds(ev, i)]
    base = [i for i in members if t.holds(psi, i)]
    reqs = {}
    for i in members:
        if t.holds(psi, i) or not t.holds(phi, i):
            continue
        obs = [None] + [ob for ob in t.obligations(i) if t.relevant(ev, t.min_value(ob[1], ob[2]))]
        reqs[i] = [t._candidate_sigs(i, ob, by_sig) for ob in obs]
    return _bfs(t, members, base, reqs, alive)


def build_tableau(formula, cap=None, literal_diamond=False):
    return Tableau(formula, cap, literal_diamond)


def prune(t):
    return t.prune()


# --- verdicts and witnesses -----------------------------------------------------------------

@dataclass
class Decision:
    verdict: str            # "SAT" or "UNSAT"
    tableau: Tableau
    source: object          # formula as given
    formula: object         # its positive normal form

    @property
    def sat(self):
        return self.verdict == "SAT"


def decide(formula, cap=None, literal_diamond=False):
    pnf = to_pnf(formula)
    t = build_tableau(pnf, cap, literal_diamond).prune()
    return Decision("SAT" if t.satisfiable else "UNSAT", t, formula, pnf)


@dataclass
class Witness:
    model: PKS
    root: str
    provenance: dict        # state -> (row, tableau node index)


def extract_witness(decision):
    """Build a model of the decided formula from the pruned tableau and verify it.

    States are pairs (row, node), one row per eventuality occurring in an
    alive node.  In row i a node with a pending i-th eventuality moves to
    lower-rank nodes in the same row; every other obligation moves to the
    next row.  Each obligation is discharged with the least edge value that
    meets it, so no extra high-possibility paths appear.
    """
    t = decision.tableau
    alive = t.alive
    roots = t.roots()
    if not roots:
        raise ValueError("formula is unsatisfiable; no witness exists")
    by_sig = t._alive_sigs(alive)
    rows = [ev for ev in t.eventualities if any(t.holds(ev, i) for i in alive)] or [None]
    m = len(rows)
    ranks = [t.rank(ev, alive) if ev is not None else {} for ev in rows]

    def pick_any(w, sids):
        if t.sig_of[w] in sids:
            return w
        return min(by_sig[sid][0] for sid in sids)

    def pick_ranked(rk, sids):
        best = None
        for sid in sids:
            for j in by_sig[sid]:
                if j in rk and (best is None or (rk[j], j) < (rk[best], best)):
                    best = j
        return best

    def successors(i, w):
        out = {}

        def add(key, v):
            if v > out.get(key, ZERO):
                out[key] = v

        ev, nxt = rows[i], (i + 1) % m
        pending = ev is not None and t.holds(ev, w) and ranks[i].get(w, INF) > 1
        obs = [(None, ONE)] + [(ob, t.min_value(ob[1], ob[2])) for ob in t.obligations(w)]
        if pending and isinstance(ev, Po):
            op, q = ev.bound.op, ev.bound.value
            fi = t._member[(ev, (op, q))][0]
            target = pick_ranked(ranks[i], t._candidate_sigs(w, (fi, op, q), by_sig))
            add((i, target), t.min_value(op, q))
        for ob, mv in obs:
            sids = t._candidate_sigs(w, ob, by_sig)
            if pending and isinstance(ev, Ne) and t.relevant(ev, mv):
                add((i, pick_ranked(ranks[i], sids)), mv)
            else:
                add((nxt, pick_any(w, sids)), mv)
        return out

    start = (0, roots[0])
    order = [start]
    index = {start: 0}
    edges = {}
    k = 0
    while k < len(order):
        cur = order[k]
        k += 1
        edges[cur] = successors(*cur)
        for tgt in edges[cur]:
            if tgt not in index:
                index[tgt] = len(order)
                order.append(tgt)
    names = [f"s{n}" for n in range(len(order))]
    trans = {}
    for cur, out in edges.items():
        for tgt, v in out.items():
            trans[(names[index[cur]], names[index[tgt]])] = v
    vocabulary = atoms_of(decision.source) | set(t.atoms)
    labels = {names[index[st]]: t.nodes[st[1]].atoms for st in order}
    model = PKS(names, trans, {names[0]: ONE}, labels, vocabulary)
    witness = Witness(model, names[0], {names[index[st]]: st for st in order})
    if not model.is_normal():
        raise NonNormalWitness("extracted witness is not normal")
    checker = Checker(model, unknown_atoms="false")
    for f in (decision.source, decision.formula):
        if names[0] not in checker.sat(f):
            raise WitnessVerificationFailed(f"extracted witness does not satisfy {f}")
    return witness


@dataclass
class Validity:
    verdict: str            # "VALID" or "INVALID"
    decision: Decision
    countermodel: Witness = None

    @property
    def valid(self):
        return self.verdict == "VALID"


def check_valid(formula, cap=None, literal_diamond=False):
    d = decide(Not(formula), cap, literal_diamond)
    if not d.sat:
        return Validity("VALID", d)
    return Validity("INVALID", d, extract_witness(d))
