"""Text syntax for formulas, PKS files and proof scripts.

Formula grammar (ASCII spellings, Unicode accepted as aliases)::

    Phi   := true | false | IDENT | "!" Phi | Phi "&" Phi | Phi "|" Phi
           | Phi "->" Phi | Phi "<->" Phi | "(" Phi ")" | ("Po"|"Ne") Bound "[" Path "]"
    Bound := (">=" | ">" | "<=" | "<") RAT | ("[" | "(") RAT "," RAT ("]" | ")")
    Path  := "X" Phi | Phi "U" Phi | Phi "U<=" NAT Phi | Phi "R" Phi
           | "F" Phi | "G" Phi | "G<=" NAT Phi

Precedence from tightest: !, &, |, ->, <->; binary operators associate to the right.
"""
import re
from fractions import Fraction

from .errors import (DuplicateTransition, MalformedThreshold, ParseError, SourceSpan,
                     UnknownState)
from .formula import (FALSE, GE, GT, LE, LT, ONE, TRUE, ZERO, Always, And, Atom,
                      BoundedAlways, BoundedUntil, Eventually, FalseF, Iff, Implies,
                      Interval, Modal, Ne, Next, Not, Or, Po, Release, Threshold, TrueF,
                      Until)
from .pks import PKS

ALIASES = {
    "¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≥": ">=", "≤": "<=",
    "○": "X", "◯": "X", "⊔": "U", "◊": "F", "◇": "F", "□": "G", "⊤": "true", "⊥": "false",
}
KEYWORDS = {"true", "false", "Po", "Ne", "X", "U", "R", "F", "G"}
SYMBOLS = ["<->", "->", ">=", "<=", ">", "<", "!", "&", "|", "(", ")", "[", "]", ","]
_NUM = re.compile(r"\d+(?:\.\d+|/\d+)?")
_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def span(self):
        return SourceSpan(self.line, self.col, len(self.text))

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r})"


def tokenize(text, line=1, col=1):
    """Tokens of `text`; `line`/`col` give the position of its first character."""
    toks = []
    i = 0
    ln, c = line, col
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i += 1
            ln += 1
            c = 1
            continue
        if ch.isspace():
            i += 1
            c += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in ALIASES:
            alias = ALIASES[ch]
            kind = "kw" if alias in KEYWORDS else "sym"
            toks.append(Token(kind, alias, ln, c))
            i += 1
            c += 1
            continue
        m = _NUM.match(text, i)
        if m:
            toks.append(Token("num", m.group(), ln, c))
        else:
            m = _ID.match(text, i)
            if m:
                word = m.group()
                toks.append(Token("kw" if word in KEYWORDS else "id", word, ln, c))
            else:
                for sym in SYMBOLS:
                    if text.startswith(sym, i):
                        toks.append(Token("sym", sym, ln, c))
                        break
                else:
                    raise ParseError(f"unexpected character {ch!r}", SourceSpan(ln, c, 1),
                                     ["formula"])
                i += len(toks[-1].text)
                c += len(toks[-1].text)
                continue
        i += len(m.group())
        c += len(m.group())
    toks.append(Token("eof", "", ln, c))
    return toks


def parse_rational(text, span=None):
    """Exact value of an int/int or decimal literal."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {text!r}", span, ["rational"]) from None


_PHI_START = ["true", "false", "identifier", "!", "(", "Po", "Ne"]


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, text):
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}", [text])
        return self.advance()

    def fail(self, message, expected):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{message}, got {got}", t.span(), expected)

    def formula(self):
        left = self.implication()
        if self.at("<->"):
            self.advance()
            return Iff(left, self.formula())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        if self.at("|"):
            self.advance()
            return Or(left, self.disjunction())
        return left

    def conjunction(self):
        left = self.unary()
        if self.at("&"):
            self.advance()
            return And(left, self.conjunction())
        return left

    def unary(self):
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "kw" and t.text == "true":
            self.advance()
            return TRUE
        if t.kind == "kw" and t.text == "false":
            self.advance()
            return FALSE
        if t.kind == "id":
            self.advance()
            return Atom(t.text)
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "kw" and t.text in ("Po", "Ne"):
            self.advance()
            bound = self.bound()
            self.expect("[")
            path = self.path()
            self.expect("]")
            return (Po if t.text == "Po" else Ne)(bound, path)
        self.fail("expected a formula", _PHI_START)

    def number(self):
        t = self.tok
        if t.kind != "num":
            self.fail("expected a rational", ["rational"])
        self.advance()
        return parse_rational(t.text, t.span())

    def natural(self):
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            self.fail("expected a step bound", ["natural"])
        self.advance()
        return int(t.text)

    def bound(self):
        for op in (GE, GT, LE, LT):
            if self.at(op):
                self.advance()
                return Threshold(op, self.number())
        if self.at("[") or self.at("("):
            lo_closed = self.advance().text == "["
            lo = self.number()
            self.expect(",")
            hi = self.number()
            if self.at("]") or self.at(")"):
                hi_closed = self.advance().text == "]"
            else:
                self.fail("expected ']' or ')'", ["]", ")"])
            return Interval(lo, hi, lo_closed, hi_closed)
        self.fail("expected a bound", [">=", ">", "<=", "<", "[", "("])

    def path(self):
        if self.at("X"):
            self.advance()
            return Next(self.formula())
        if self.at("F"):
            self.advance()
            return Eventually(self.formula())
        if self.at("G"):
            self.advance()
            if self.at("<="):
                self.advance()
                n = self.natural()
                return BoundedAlways(self.formula(), n)
            return Always(self.formula())
        left = self.formula()
        if self.at("U"):
            self.advance()
            if self.at("<="):
                self.advance()
                n = self.natural()
                return BoundedUntil(left, self.formula(), n)
            return Until(left, self.formula())
        if self.at("R"):
            self.advance()
            return Release(left, self.formula())
        self.fail("expected a path operator", ["U", "R"])


def parse_formula(text, line=1, col=1):
    p = _Parser(tokenize(text, line, col))
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input",
               ["end of input", "&", "|", "->", "<->"])
    return f


# --- printing ------------------------------------------------------------------

def format_rational(r):
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _level(f):
    return _LEVEL.get(type(f), 6)


def format_bound(b):
    if isinstance(b, Interval):
        return ("[" if b.lo_closed else "(") + format_rational(b.lo) + "," + \
            format_rational(b.hi) + ("]" if b.hi_closed else ")")
    return b.op + format_rational(b.value)


def format_path(p):
    pf = print_formula
    if isinstance(p, Next):
        return "X " + pf(p.arg)
    if isinstance(p, Eventually):
        return "F " + pf(p.arg)
    if isinstance(p, Always):
        return "G " + pf(p.arg)
    if isinstance(p, BoundedAlways):
        return f"G<={p.steps} " + pf(p.arg)
    if isinstance(p, Until):
        return pf(p.left) + " U " + pf(p.right)
    if isinstance(p, BoundedUntil):
        return pf(p.left) + f" U<={p.steps} " + pf(p.right)
    if isinstance(p, Release):
        return pf(p.left) + " R " + pf(p.right)
    raise TypeError(f"not a path shape: {p!r}")


def print_formula(f):
    """Canonical text with the fewest parentheses the precedence table allows."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = print_formula(f.arg)
        return "!" + (f"({inner})" if _level(f.arg) < 5 else inner)
    if isinstance(f, Modal):
        q = "Po" if isinstance(f, Po) else "Ne"
        return f"{q}{format_bound(f.bound)}[{format_path(f.path)}]"
    lvl = _LEVEL[type(f)]
    left, right = print_formula(f.left), print_formula(f.right)
    if _level(f.left) <= lvl:
        left = f"({left})"
    if _level(f.right) < lvl:
        right = f"({right})"
    return f"{left} {_SYM[type(f)]} {right}"


# --- PKS files ---------------------------------------------------------------------

_WORD = re.compile(r"[A-Za-z0-9_']+")


def _strip_comment(line):
    k = line.find("#")
    return line if k < 0 else line[:k]


def _pks_value(text, lineno, col, what):
    text = text.strip()
    span = SourceSpan(lineno, col, len(text))
    if not _NUM.fullmatch(text):
        raise ParseError(f"bad {what} {text!r}", span, ["rational"])
    v = parse_rational(text, span)
    if not ZERO <= v <= ONE:
        raise MalformedThreshold(f"line {lineno}: {what} {text} outside [0,1]")
    return v


def parse_pks(text):
    """Parse the line-oriented PKS format (states/init/label/trans/atoms lines)."""
    states = None
    init, labels, trans = {}, {}, {}
    atoms = set()

    def known(name, lineno, col):
        if states is None:
            raise ParseError("a 'states:' line must come first", SourceSpan(lineno, col, len(name)),
                             ["states:"])
        if name not in states:
            raise UnknownState(f"line {lineno}: unknown state {name!r}")
        return name

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        body = line.strip()
        if not body:
            continue
        col0 = line.index(body[0]) + 1
        if body.startswith("states:"):
            if states is not None:
                raise ParseError("second 'states:' line", SourceSpan(lineno, col0, 7), ["init:", "label", "trans"])
            names = body[len("states:"):].split()
            for n in names:
                if not _WORD.fullmatch(n):
                    raise ParseError(f"bad state name {n!r}", SourceSpan(lineno, line.index(n) + 1, len(n)),
                                     ["identifier"])
            if len(set(names)) != len(names) or not names:
                raise ParseError("state names must be unique and non-empty",
                                 SourceSpan(lineno, col0, len(body)), ["identifier"])
            states = list(names)
        elif body.startswith("init:"):
            for item in body[len("init:"):].split():
                col = line.index(item) + 1
                name, sep, val = item.partition(":")
                if not sep:
                    raise ParseError(f"expected state:value, got {item!r}",
                                     SourceSpan(lineno, col, len(item)), [":"])
                known(name, lineno, col)
                init[name] = _pks_value(val, lineno, col + len(name) + 1, "initial possibility")
        elif body.startswith("atoms:"):
            atoms.update(body[len("atoms:"):].split())
        elif body.startswith("label"):
            m = re.fullmatch(r"label\s+(\S+?)\s*:(.*)", body)
            if not m:
                raise ParseError("expected 'label STATE: ATOMS'", SourceSpan(lineno, col0, len(body)), [":"])
            name = known(m.group(1), lineno, col0 + 6)
            labels.setdefault(name, set()).update(m.group(2).split())
        elif body.startswith("trans"):
            m = re.fullmatch(r"trans\s+(\S+)\s*->\s*(\S+)\s*:\s*(\S+)", body)
            if not m:
                raise ParseError("expected 'trans S -> T : VALUE'", SourceSpan(lineno, col0, len(body)),
                                 ["->", ":"])
            s = known(m.group(1), lineno, col0 + m.start(1))
            t = known(m.group(2), lineno, col0 + m.start(2))
            if (s, t) in trans:
                raise DuplicateTransition(f"line {lineno}: second transition {s} -> {t}")
            trans[(s, t)] = _pks_value(m.group(3), lineno, col0 + m.start(3), "possibility")
        else:
            word = body.split()[0]
            raise ParseError(f"unknown line kind {word!r}", SourceSpan(lineno, col0, len(word)),
                             ["states:", "init:", "label", "trans", "atoms:"])
    if states is None:
        raise ParseError("missing 'states:' line", SourceSpan(1, 1, 1), ["states:"])
    return PKS(states, trans, init, labels, atoms)


def print_pks(m):
    lines = ["states: " + " ".join(m.states)]
    if m.init:
        lines.append("init: " + " ".join(f"{s}:{format_rational(m.init[s])}"
                                         for s in m.states if s in m.init))
    used = frozenset().union(*m.labels.values())
    if m.atoms - used:
        lines.append("atoms: " + " ".join(sorted(m.atoms)))
    for s in m.states:
        if m.labels[s]:
            lines.append(f"label {s}: " + " ".join(sorted(m.labels[s])))
    for s in m.states:
        succ = m.successors(s)
        for t in m.states:
            if t in succ:
                lines.append(f"trans {s} -> {t} : {format_rational(succ[t])}")
    return "\n".join(lines) + "\n"


# --- proof scripts ---------------------------------------------------------------------

_AXIOM_IDS = {"A1", "A2", "A3a", "A3b", "A4a", "A4b", "A5", "A6", "A7", "A8", "A9", "A10",
              "A11", "AP1", "AP2", "AP3"}


def _parse_just(text, lineno, col):
    from .proof import Justification
    words = text.split()
    span = SourceSpan(lineno, col, max(1, len(text)))
    if not words:
        raise ParseError("missing justification", span, sorted(_AXIOM_IDS) + ["ASSUME", "MP"])
    head, rest = words[0], words[1:]

    def ints(ws, count=None):
        try:
            vals = tuple(int(w) for w in ws)
        except ValueError:
            raise ParseError(f"expected line numbers after {head}", span, ["line number"]) from None
        if count is not None and len(vals) != count:
            raise ParseError(f"{head} takes {count} line number(s)", span, ["line number"])
        return vals

    if head in _AXIOM_IDS or head in ("A3", "A4"):
        if rest:
            raise ParseError(f"{head} takes no arguments", span, [";"])
        return Justification(head)
    if head == "ASSUME":
        if rest:
            raise ParseError("ASSUME takes no arguments", span, [";"])
        return Justification("ASSUME")
    if head in ("MP", "REPL"):
        return Justification(head, ints(rest, 2))
    if head == "PCONS":
        if not rest:
            raise ParseError("PCONS needs at least one line number", span, ["line number"])
        return Justification(head, ints(rest))
    if head in ("NEC-NEXT", "NEC-ALW"):
        if len(rest) != 3 or rest[0] not in (GE, GT):
            raise ParseError(f"expected '{head} >=|> RAT LINE'", span, [">=", ">"])
        value = parse_rational(rest[1], span)
        return Justification(head, ints(rest[2:], 1), rest[0], value)
    raise ParseError(f"unknown justification {head!r}", span,
                     sorted(_AXIOM_IDS) + ["ASSUME", "MP", "NEC-NEXT", "NEC-ALW", "PCONS", "REPL"])


def parse_proof(text):
    """Parse 'N. FORMULA ; JUST' lines into a ProofScript."""
    from .proof import ProofLine, ProofScript
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = re.match(r"\s*(\d+)\.", line)
        if not m:
            body = line.strip()
            raise ParseError("expected a line number 'N.'", SourceSpan(lineno, line.index(body[0]) + 1, 1),
                             ["line number"])
        k = line.rfind(";")
        if k < m.end():
            raise ParseError("expected ';' before the justification",
                             SourceSpan(lineno, len(line) + 1, 1), [";"])
        formula = parse_formula(line[m.end():k], lineno, m.end() + 1)
        just = _parse_just(line[k + 1:], lineno, k + 2)
        index = int(m.group(1))
        if lines and index <= lines[-1].index:
            raise ParseError("line numbers must increase", SourceSpan(lineno, m.start(1) + 1, len(m.group(1))),
                             [f"number > {lines[-1].index}"])
        lines.append(ProofLine(index, formula, just, lineno))
    return ProofScript(tuple(lines))


def format_just(j):
    if j.kind in ("NEC-NEXT", "NEC-ALW"):
        return f"{j.kind} {j.op} {format_rational(j.value)} {j.premises[0]}"
    if j.premises:
        return j.kind + " " + " ".join(str(i) for i in j.premises)
    return j.kind


def print_proof(script):
    return "".join(f"{ln.index}. {print_formula(ln.formula)} ; {format_just(ln.just)}\n"
                   for ln in script.lines)
