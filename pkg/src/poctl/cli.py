"""Command-line front end: pnf, closure, sat, valid, mc and prove."""
import argparse
import json
import os
import sys

from .checker import Checker, complement_paths
from .errors import CapacityExceeded, InputError, InternalError, PoctlError, ProofError
from .formula import ONE, Modal, Po, closure, formula_size, map_path, subformulas, to_pnf
from .pks import event_possibility_oracle
from .proof import check_proof, crosscheck_line_validity
from .syntax import format_rational, parse_formula, parse_pks, parse_proof, print_formula, print_pks
from .tableau import check_valid, decide, extract_witness

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror}") from None


def _formula_arg(arg):
    """A formula given as a file name, '-' for stdin, or inline text."""
    if arg == "-" or os.path.isfile(arg):
        return parse_formula(_read(arg))
    return parse_formula(arg)


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise _Usage(f"cannot write {path}: {e.strerror}") from None


class _Out:
    """Collects text lines and the mirrored json fields."""

    def __init__(self, fmt):
        self.fmt = fmt
        self.lines = []
        self.data = {}

    def put(self, key, value, text=None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def render(self):
        if self.fmt == "json":
            return json.dumps(self.data, indent=2, sort_keys=True) + "\n"
        return "".join(line + "\n" for line in self.lines)


def _cmd_pnf(args, out):
    f = to_pnf(_formula_arg(args.formula))
    out.put("pnf", print_formula(f), print_formula(f))
    out.put("size", formula_size(f))
    return EXIT_OK


def _cmd_closure(args, out):
    f = to_pnf(_formula_arg(args.formula))
    cl, ecl = closure(f, literal_diamond=not args.next_only)
    order = lambda s: sorted((print_formula(g) for g in s), key=lambda t: (len(t), t))
    cl_s, ecl_s = order(cl), order(ecl)
    out.put("pnf", print_formula(f), f"pnf: {print_formula(f)}")
    out.put("cl", cl_s, f"cl ({len(cl_s)}):")
    out.lines.extend("  " + g for g in cl_s)
    out.put("ecl", ecl_s, f"ecl ({len(ecl_s)}):")
    out.lines.extend("  " + g for g in ecl_s)
    out.put("ecl_size", len(ecl_s), f"|ecl| = {len(ecl_s)}")
    return EXIT_OK


def _cmd_sat(args, out):
    d = decide(_formula_arg(args.formula), cap=args.cap)
    t = d.tableau
    out.put("verdict", d.verdict, d.verdict)
    out.put("nodes", len(t.nodes), f"nodes: {len(t.nodes)}")
    out.put("alive", len(t.alive), f"alive: {len(t.alive)}")
    if d.sat and args.witness:
        w = extract_witness(d)
        _write(args.witness, print_pks(w.model))
        out.put("witness", {"path": args.witness, "root": w.root, "states": len(w.model.states)},
                f"witness: {args.witness} ({len(w.model.states)} states, root {w.root}, verified)")
    return EXIT_OK if d.sat else EXIT_NEGATIVE


def _cmd_valid(args, out):
    v = check_valid(_formula_arg(args.formula), cap=args.cap)
    out.put("verdict", v.verdict, v.verdict)
    if not v.valid and args.countermodel:
        w = v.countermodel
        _write(args.countermodel, print_pks(w.model))
        out.put("countermodel", {"path": args.countermodel, "root": w.root,
                                 "states": len(w.model.states)},
                f"countermodel: {args.countermodel} ({len(w.model.states)} states, root {w.root})")
    return EXIT_OK if v.valid else EXIT_NEGATIVE


def _cmd_mc(args, out):
    m = parse_pks(_read(args.model))
    f = _formula_arg(args.formula)
    checker = Checker(m)
    sat = checker.sat(f)
    if args.state is not None:
        if args.state not in m.labels:
            raise _Usage(f"unknown state {args.state!r}")
        judged = [args.state]
    else:
        judged = [s for s in m.states if s in m.init] or list(m.states)
    verdicts = {s: s in sat for s in judged}
    out.put("formula", print_formula(f), f"formula: {print_formula(f)}")
    out.put("verdicts", verdicts)
    for s in judged:
        out.lines.append(f"{s}: {'true' if verdicts[s] else 'false'}")
    values = {}
    seen = []
    for g in subformulas(f):
        if isinstance(g, Modal) and g not in seen:
            seen.append(g)
    for g in seen:
        vals = checker.value(g)
        kind = type(g).__name__
        key = print_formula(g)
        values[key] = {s: format_rational(vals[s]) for s in judged}
        out.lines.append(f"{kind} {key}: " + " ".join(f"{s}={values[key][s]}" for s in judged))
    out.put("values", values)
    if args.oracle:
        _oracle_check(m, checker, seen, judged, args.horizon)
        out.put("oracle", "agrees", "oracle: lasso enumeration agrees on every value")
    return EXIT_OK if all(verdicts.values()) else EXIT_NEGATIVE


def _oracle_check(m, checker, modal, states, horizon):
    for g in modal:
        path = map_path(g.path, checker.sat)
        for s in states:
            if isinstance(g, Po):
                want = event_possibility_oracle(m, s, path, horizon)
            else:
                want = ONE - max(event_possibility_oracle(m, s, c, horizon)
                                 for c in complement_paths(m, path))
            got = checker.value(g)[s]
            if got != want:
                raise InternalError(f"{print_formula(g)} at {s}: fixpoint {got}, lasso oracle {want}")


def _cmd_prove(args, out):
    script = parse_proof(_read(args.script))
    try:
        report = check_proof(script, strict=args.strict)
    except ProofError as e:
        out.put("verdict", "FAIL", f"FAIL {e}")
        out.put("line", e.line)
        out.put("error", type(e).__name__)
        return EXIT_NEGATIVE
    out.put("verdict", "OK", "OK")
    out.put("lines", len(script.lines))
    out.put("extensions", [{"line": k, "rule": r} for k, r in report.extensions])
    for k, r in report.extensions:
        out.lines.append(f"line {k}: extension rule {r}")
    if args.crosscheck is not None:
        cc = crosscheck_line_validity(script, args.crosscheck, strict=args.strict, cap=args.cap)
        out.put("crosscheck", {"checked": cc.checked, "skipped": cc.skipped,
                               "failures": [k for k, _ in cc.failures]},
                f"crosscheck: {len(cc.checked)} lines valid-checked, {len(cc.skipped)} over budget")
        for k, g in cc.failures:
            out.lines.append(f"line {k}: NOT VALID {print_formula(g)}")
        if cc.failures:
            return EXIT_INTERNAL
    return EXIT_OK


def _positive(kind):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{kind} must be at least 1")
        return v
    return conv


def build_parser():
    p = _Parser(prog="poctl", description="PoCTL satisfiability, model checking and proof checking.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--cap", type=_positive("capacity"), default=None,
                   help="tableau node limit (default: $POCTL_NODE_CAP or 2^22)")
    p.add_argument("--horizon", type=_positive("horizon"), default=None,
                   help="lasso prefix bound for oracle checks")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("pnf", help="print the positive normal form")
    s.add_argument("formula")
    s.set_defaults(run=_cmd_pnf)

    s = sub.add_parser("closure", help="print cl, ecl and |ecl|")
    s.add_argument("formula")
    s.add_argument("--next-only", action="store_true",
                   help="apply the threshold-variant rules to successor formulas only")
    s.set_defaults(run=_cmd_closure)

    s = sub.add_parser("sat", help="decide satisfiability")
    s.add_argument("formula")
    s.add_argument("--witness", metavar="OUT.pks")
    s.set_defaults(run=_cmd_sat)

    s = sub.add_parser("valid", help="decide validity")
    s.add_argument("formula")
    s.add_argument("--countermodel", metavar="OUT.pks")
    s.set_defaults(run=_cmd_valid)

    s = sub.add_parser("mc", help="model-check a formula on a PKS")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--state")
    s.add_argument("--oracle", action="store_true",
                   help="cross-check every Po/Ne value against lasso enumeration")
    s.set_defaults(run=_cmd_mc)

    s = sub.add_parser("prove", help="check a proof script")
    s.add_argument("script")
    s.add_argument("--strict", action="store_true", help="reject the PCONS and REPL extension rules")
    s.add_argument("--crosscheck", type=int, metavar="N",
                   help="validity-check theorem lines of size <= N")
    s.set_defaults(run=_cmd_prove)
    return p


def run(argv):
    """Run one invocation; returns (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
    except _Usage as e:
        return EXIT_INPUT, "", f"poctl: {e}\n"
    except SystemExit as e:          # --help
        return (e.code or 0), "", ""
    out = _Out(args.format)
    try:
        code = args.run(args, out)
    except _Usage as e:
        return EXIT_INPUT, "", f"poctl: {e}\n"
    except (InputError, CapacityExceeded) as e:
        return EXIT_INPUT, "", f"poctl: {type(e).__name__}: {e}\n"
    except InternalError as e:
        return EXIT_INTERNAL, "", f"poctl: internal error: {type(e).__name__}: {e}\n"
    except PoctlError as e:
        return EXIT_INTERNAL, "", f"poctl: {type(e).__name__}: {e}\n"
    return code, out.render(), ""


def main(argv=None):
    code, text, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
