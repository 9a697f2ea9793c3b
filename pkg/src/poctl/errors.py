"""Exception types shared across the toolkit."""


class PoctlError(Exception):
    """Base class; every error raised on purpose derives from this."""


class InputError(PoctlError):
    """Something wrong with user-supplied input (CLI exit code 2)."""


class InternalError(PoctlError):
    """An invariant of the toolkit itself failed (CLI exit code 3)."""


class SourceSpan:
    __slots__ = ("line", "column", "length")

    def __init__(self, line, column, length=1):
        self.line = line
        self.column = column
        self.length = max(1, length)

    def __repr__(self):
        return f"SourceSpan(line={self.line}, column={self.column}, length={self.length})"

    def __eq__(self, other):
        return isinstance(other, SourceSpan) and (self.line, self.column, self.length) == (
            other.line, other.column, other.length)


class ParseError(InputError):
    def __init__(self, message, span=None, expected=()):
        self.span = span
        self.expected = frozenset(expected)
        where = f"{span.line}:{span.column}: " if span else ""
        exp = ""
        if self.expected:
            exp = " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(where + message + exp)


class MalformedThreshold(InputError):
    pass


class DuplicateTransition(InputError):
    pass


class UnknownState(InputError):
    pass


class UnknownAtom(InputError):
    pass


class NotPNF(InputError):
    pass


class HorizonTooSmall(InputError):
    pass


class InvalidLasso(InputError):
    pass


class CapacityExceeded(PoctlError):
    pass


class WitnessVerificationFailed(InternalError):
    pass


class NonNormalWitness(InternalError):
    pass


class ProofError(PoctlError):
    """A proof script line failed to check; `line` is the script line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BadPremiseIndex(ProofError):
    pass


class NotAnAxiomInstance(ProofError):
    pass


class NecOnAssumption(ProofError):
    pass


class NotPropositionalConsequence(ProofError):
    pass


class ReplacementMismatch(ProofError):
    pass


class ExtensionRuleInStrictMode(ProofError):
    pass


class NotAssumed(ProofError):
    pass


class RuleMismatch(ProofError):
    """An MP or necessitation line does not have the shape the rule produces."""
