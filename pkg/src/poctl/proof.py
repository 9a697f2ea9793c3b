"""Proof scripts for the Hilbert-style axiom system and their checker."""
import itertools
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction

from .errors import (BadPremiseIndex, ExtensionRuleInStrictMode, NecOnAssumption,
                     NotAnAxiomInstance, NotAssumed, NotPropositionalConsequence,
                     PoctlError, ReplacementMismatch, RuleMismatch)
from .formula import (GE, GT, ONE, TRUE, Always, And, Eventually, FalseF, Formula, Iff,
                      Implies, Modal, Ne, Next, Not, Or, Path, Po, Threshold, TrueF, Until,
                      formula_size, to_pnf)


@dataclass(frozen=True)
class Justification:
    kind: str                   # axiom id, ASSUME, MP, NEC-NEXT, NEC-ALW, PCONS, REPL
    premises: tuple = ()
    op: str = None              # comparison of a necessitation step
    value: Fraction = None      # threshold of a necessitation step


@dataclass(frozen=True)
class ProofLine:
    index: int
    formula: object
    just: Justification
    source_line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProofScript:
    lines: tuple


# --- schema patterns ---------------------------------------------------------------------

class _Var:
    """Metavariable for a state formula (or, with path=True, a path formula)."""

    def __init__(self, name, path=False):
        self.name, self.path = name, path


class _B:
    """Threshold placeholder.

    mode "same" binds var to the whole threshold, "dual" requires the flipped
    comparison with 1-r of var's threshold, "ge"/"gt" fix the comparison and
    bind var to the value only.
    """

    def __init__(self, var, mode="same"):
        self.var, self.mode = var, mode


_PHI, _PSI, _XI = _Var("Φ"), _Var("Ψ"), _Var("Ξ")
_PATH = _Var("φ", path=True)
_S, _D = _B("r"), _B("r", "dual")


def _flip(op):
    return GT if op == GE else GE


def _schemas():
    X, U, F, G = Next, Until, Eventually, Always
    return [
        ("A2", Iff(Po(_S, X(Or(_PHI, _PSI))), Or(Po(_S, X(_PHI)), Po(_S, X(_PSI)))), None),
        ("A3a", Iff(Po(_S, F(_PHI)), Po(_S, U(TRUE, _PHI))), None),
        ("A3b", Iff(Ne(_S, F(_PHI)), Ne(_S, U(TRUE, _PHI))), None),
        ("A4a", Iff(Po(_S, G(_PHI)), Not(Ne(_D, F(Not(_PHI))))), None),
        ("A4b", Iff(Ne(_S, G(_PHI)), Not(Po(_D, F(Not(_PHI))))), None),
        ("A5", Iff(Ne(_S, X(_PHI)), Not(Po(_D, X(Not(_PHI))))), None),
        ("A6", Implies(Or(_PSI, And(_PHI, Po(_S, X(Po(_S, U(_PHI, _PSI)))))),
                       Po(_S, U(_PHI, _PSI))), None),
        ("A7", Implies(Or(_PSI, And(_PHI, Ne(_S, X(Ne(_S, U(_PHI, _PSI)))))),
                       Ne(_S, U(_PHI, _PSI))), None),
        ("A8", Po(_S, X(TRUE)), lambda t: t["r"].value < ONE),
        ("A9", Implies(Ne(_S, G(Implies(Or(_PSI, And(_PHI, Ne(_S, X(_XI)))), _XI))),
                       Implies(Ne(_S, U(_PHI, _PSI)), _XI)), None),
        ("A10", Implies(Ne(_S, G(Implies(Or(_PSI, And(_PHI, Po(_D, X(_XI)))), _XI))),
                        Implies(Po(_D, U(_PHI, _PSI)), _XI)), None),
        ("A11", Implies(Ne(_S, G(Implies(_PHI, _PSI))),
                        Implies(Po(_D, X(_PHI)), Po(_D, X(_PSI)))), None),
        ("AP1", Implies(Po(_B("r", "gt"), _PATH), Po(_B("r", "ge"), _PATH)), None),
        ("AP2", Implies(Po(_B("r1", "ge"), _PATH), Po(_B("r2", "gt"), _PATH)),
         lambda t: t["r1"] > t["r2"]),
        ("AP3", Implies(Po(_B("r1", "ge"), _PATH), Po(_B("r2", "ge"), _PATH)),
         lambda t: t["r1"] >= t["r2"]),
    ]


SCHEMAS = {name: (pattern, side) for name, pattern, side in _schemas()}
AXIOM_IDS = ("A1",) + tuple(SCHEMAS)


@dataclass(frozen=True)
class AxiomMatch:
    axiom: str
    substitution: dict = field(default_factory=dict, hash=False)
    thresholds: dict = field(default_factory=dict, hash=False)


def _unify(pat, f, subst, bounds):
    if isinstance(pat, _Var):
        is_path = isinstance(f, Path)
        if is_path != pat.path:
            return False
        seen = subst.get(pat.name)
        if seen is None:
            subst[pat.name] = f
            return True
        return seen == f
    if isinstance(pat, _B):
        if not isinstance(f, Threshold) or f.op not in (GE, GT):
            return False
        bounds.append((pat, f))
        return True
    if type(pat) is not type(f):
        return False
    if not is_dataclass(pat):
        return pat == f
    return all(_unify(getattr(pat, x.name), getattr(f, x.name), subst, bounds)
               for x in fields(pat))


def _solve_bounds(bounds):
    """Resolve threshold placeholders; None when they are inconsistent."""
    out = {}
    for pat, t in bounds:
        if pat.mode == "same":
            if out.setdefault(pat.var, t) != t:
                return None
    for pat, t in bounds:
        if pat.mode == "dual":
            want = Threshold(_flip(t.op), ONE - t.value)
            if out.setdefault(pat.var, want) != want:
                return None
        elif pat.mode in ("ge", "gt"):
            if t.op != (GE if pat.mode == "ge" else GT):
                return None
            if out.setdefault(pat.var, t.value) != t.value:
                return None
    return out


def match_schema(name, f):
    """AxiomMatch if `f` instantiates the named schema (A1 by truth table), else None."""
    if name == "A1":
        return AxiomMatch("A1") if is_tautology(f) else None
    pattern, side = SCHEMAS[name]
    subst, bounds = {}, []
    if not _unify(pattern, f, subst, bounds):
        return None
    thr = _solve_bounds(bounds)
    if thr is None or (side is not None and not side(thr)):
        return None
    return AxiomMatch(name, subst, thr)


def match_axiom(f):
    """First axiom schema that `f` instantiates, trying A1 last."""
    for name in SCHEMAS:
        hit = match_schema(name, f)
        if hit is not None:
            return hit
    return match_schema("A1", f)


# --- propositional abstraction -----------------------------------------------------------

def _block_key(f):
    try:
        return to_pnf(f)
    except PoctlError:
        return f


def _abstract(f, table):
    """Boolean skeleton of `f` with atoms and Po/Ne blocks numbered in `table`."""
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(_abstract(f.arg, table))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_abstract(f.left, table), _abstract(f.right, table))
    key = _block_key(f) if isinstance(f, Modal) else f
    return table.setdefault(key, len(table))


def _truth(f, env):
    if isinstance(f, int):
        return env[f]
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Not):
        return not _truth(f.arg, env)
    a = _truth(f.left, env)
    if isinstance(f, And):
        return a and _truth(f.right, env)
    if isinstance(f, Or):
        return a or _truth(f.right, env)
    if isinstance(f, Implies):
        return (not a) or _truth(f.right, env)
    return a == _truth(f.right, env)


def entails(premises, conclusion):
    """Propositional consequence over the atom/modal-block abstraction."""
    table = {}
    prem = [_abstract(p, table) for p in premises]
    concl = _abstract(conclusion, table)
    for env in itertools.product((False, True), repeat=len(table)):
        if all(_truth(p, env) for p in prem) and not _truth(concl, env):
            return False
    return True


def is_tautology(f):
    return entails((), f)


# --- replacement ------------------------------------------------------------------------

def _replaced(orig, new, a, b):
    """Number of a->b replacements turning orig into new, or None if impossible."""
    if orig == new:
        return 0
    if orig == a and new == b:
        return 1
    if type(orig) is not type(new) or not is_dataclass(orig):
        return None
    total = 0
    for x in fields(orig):
        u, v = getattr(orig, x.name), getattr(new, x.name)
        if isinstance(u, (Formula, Path)):
            n = _replaced(u, v, a, b)
            if n is None:
                return None
            total += n
        elif u != v:
            return None
    return total


def is_replacement(orig, new, a, b):
    """Whether `new` is `orig` with one or more occurrences of a replaced by b."""
    n = _replaced(orig, new, a, b)
    return n is not None and n > 0


# --- checking ---------------------------------------------------------------------------

EXTENSION_RULES = ("PCONS", "REPL")


@dataclass
class ProofReport:
    theorem: dict           # line index -> theorem flag
    extensions: list        # (line index, rule) for every PCONS/REPL step
    axioms: dict            # line index -> AxiomMatch


def check_proof(script, strict=False, assumptions=None):
    """Check every line; raises a ProofError subclass at the first bad line.

    `assumptions` is the set Γ.  When it is None every ASSUME line is taken
    as a member of Γ.
    """
    gamma = None if assumptions is None else set(assumptions)
    formulas, theorem = {}, {}
    report = ProofReport({}, [], {})
    last = None
    for ln in script.lines:
        k, f, j = ln.index, ln.formula, ln.just
        if last is not None and k <= last:
            raise BadPremiseIndex(k, f"line numbers must increase (after {last})")
        last = k
        for p in j.premises:
            if p not in formulas:
                raise BadPremiseIndex(k, f"premise {p} is not an earlier line")
        prem = [formulas[p] for p in j.premises]
        kind = j.kind
        if kind in ("A3", "A4"):
            kinds = (kind + "a", kind + "b")
        else:
            kinds = (kind,)
        if kinds[0] in AXIOM_IDS:
            hit = None
            for name in kinds:
                hit = match_schema(name, f)
                if hit:
                    break
            if hit is None:
                raise NotAnAxiomInstance(k, f"not an instance of {kind}: {f}")
            report.axioms[k] = hit
            flag = True
        elif kind == "ASSUME":
            if gamma is not None and f not in gamma:
                raise NotAssumed(k, f"{f} is not among the assumptions")
            flag = False
        elif kind == "MP":
            imp, minor = prem
            if imp != Implies(minor, f):
                raise RuleMismatch(k, f"line {j.premises[0]} is not "
                                      f"(line {j.premises[1]} -> this line)")
            flag = all(theorem[p] for p in j.premises)
        elif kind in ("NEC-NEXT", "NEC-ALW"):
            p = j.premises[0]
            path = Next if kind == "NEC-NEXT" else Always
            if f != Ne(Threshold(j.op, j.value), path(prem[0])):
                raise RuleMismatch(k, f"{kind} {j.op} {j.value} of line {p} does not give {f}")
            if not theorem[p]:
                raise NecOnAssumption(k, f"necessitation applied to line {p}, "
                                         "which depends on an assumption")
            flag = True
        elif kind in EXTENSION_RULES:
            if strict:
                raise ExtensionRuleInStrictMode(k, f"{kind} is an extension rule")
            if kind == "PCONS":
                if not entails(prem, f):
                    raise NotPropositionalConsequence(
                        k, "not a propositional consequence of lines "
                           + ", ".join(map(str, j.premises)))
            else:
                src, eq = prem
                if not isinstance(eq, Iff):
                    raise ReplacementMismatch(k, f"line {j.premises[1]} is not an equivalence")
                if not theorem[j.premises[1]]:
                    raise ReplacementMismatch(k, f"line {j.premises[1]} depends on an assumption")
                if not (is_replacement(src, f, eq.left, eq.right)
                        or is_replacement(src, f, eq.right, eq.left)):
                    raise ReplacementMismatch(
                        k, f"not line {j.premises[0]} with {eq.left} and {eq.right} exchanged")
            report.extensions.append((k, kind))
            flag = all(theorem[p] for p in j.premises)
        else:
            raise RuleMismatch(k, f"unknown justification {kind}")
        formulas[k] = f
        theorem[k] = flag
    report.theorem = theorem
    return report


@dataclass
class CrosscheckReport:
    checked: list           # line indices run through the validity checker
    skipped: list           # theorem lines over the size budget
    failures: list          # (line index, formula) judged not valid

    @property
    def ok(self):
        return not self.failures


def crosscheck_line_validity(script, budget, assumptions=None, strict=False, cap=None):
    """Run every theorem line of size <= budget through the tableau validity check."""
    from .tableau import check_valid
    report = check_proof(script, strict, assumptions)
    out = CrosscheckReport([], [], [])
    for ln in script.lines:
        if not report.theorem[ln.index]:
            continue
        if formula_size(ln.formula) > budget:
            out.skipped.append(ln.index)
            continue
        out.checked.append(ln.index)
        if not check_valid(ln.formula, cap=cap).valid:
            out.failures.append((ln.index, ln.formula))
    return out
