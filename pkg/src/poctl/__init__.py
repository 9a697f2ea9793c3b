"""Possibilistic CTL: satisfiability tableau, max-min model checker and Hilbert proof checker."""
from .checker import Checker, check, po_path, sat_states
from .errors import (CapacityExceeded, InputError, InternalError, MalformedThreshold, NotPNF,
                     ParseError, PoctlError, ProofError, WitnessVerificationFailed)
from .formula import (TRUE, FALSE, Always, And, Atom, BoundedAlways, BoundedUntil, Eventually,
                      Iff, Implies, Interval, Ne, Next, Not, Or, Po, Release, Threshold, Until,
                      closure, formula_size, is_pnf, negate_pnf, to_pnf, value_sets)
from .pks import PKS, Lasso, enumerate_lassos, event_possibility_oracle, trap_complete, validate
from .proof import check_proof, crosscheck_line_validity, match_axiom
from .syntax import (parse_formula, parse_pks, parse_proof, print_formula, print_pks,
                     print_proof)
from .tableau import build_tableau, check_valid, decide, extract_witness

__version__ = "0.1.0"

__all__ = [
    "Checker", "check", "po_path", "sat_states",
    "CapacityExceeded", "InputError", "InternalError", "MalformedThreshold", "NotPNF",
    "ParseError", "PoctlError", "ProofError", "WitnessVerificationFailed",
    "TRUE", "FALSE", "Always", "And", "Atom", "BoundedAlways", "BoundedUntil", "Eventually",
    "Iff", "Implies", "Interval", "Ne", "Next", "Not", "Or", "Po", "Release", "Threshold",
    "Until", "closure", "formula_size", "is_pnf", "negate_pnf", "to_pnf", "value_sets",
    "PKS", "Lasso", "enumerate_lassos", "event_possibility_oracle", "trap_complete", "validate",
    "check_proof", "crosscheck_line_validity", "match_axiom",
    "parse_formula", "parse_pks", "parse_proof", "print_formula", "print_pks", "print_proof",
    "build_tableau", "check_valid", "decide", "extract_witness",
]
