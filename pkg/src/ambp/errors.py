"""Exception types shared across the package."""


class AmbpError(Exception):
    """Base class for every error raised by this package."""


# --- truth tables ---------------------------------------------------------

class LengthMismatch(AmbpError):
    """Table text length does not match 2^arity."""


class BadCharacter(AmbpError):
    """Table text contains a character other than '0' or '1'."""


class ArityMismatch(AmbpError):
    """Operands have incompatible variable counts."""


class ArityZero(AmbpError):
    """Operation needs at least one variable."""


class UnknownName(AmbpError):
    """Unrecognised named-function spec."""


class UnsupportedArity(AmbpError):
    """Named function is not defined at this arity."""


# --- programs -------------------------------------------------------------

class StructureInvalid(AmbpError):
    """Operation requires a structurally valid program."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MissingEdge(AmbpError):
    """A walk took a branch that was removed by pruning."""


class EmptyProgram(AmbpError):
    """Operation requires at least one start node."""


class ParseError(AmbpError):
    """Malformed program or measure file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class VersionMismatch(ParseError):
    """File declares an unsupported format version."""


class DanglingEdge(ParseError):
    """Edge line references an undeclared node id."""


# --- construction ---------------------------------------------------------

class RangeError(AmbpError):
    """Argument falls outside its documented range."""


class ArityOutOfRange(AmbpError):
    """Requested variable count is outside the supported build range."""


class MemoryGuardExceeded(AmbpError):
    """Estimated build footprint exceeds the configured ceiling."""


class ReversibilityViolation(AmbpError):
    """Edge set is not reversible: some node lacks indegree 2 with
    complementary labels. Carries the offending node id."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


# --- verification ---------------------------------------------------------

class RequiresUnpruned(AmbpError):
    """Check is only meaningful on an unpruned build."""


class RequiresPruned(AmbpError):
    """Check is only meaningful on a pruned build."""


class NotOblivious(AmbpError):
    """Two edges in the same layer transition read different variables."""


# --- measures -------------------------------------------------------------

class IncompleteTable(AmbpError):
    """Measure table does not cover every function at its arity."""


class WrongCount(ParseError):
    """Measure file has the wrong number of value lines."""


class NegativeValue(ParseError):
    """Measure file contains a negative value."""


class AuditNotPassed(AmbpError):
    """Operation requires a measure that passed its axiom audit."""


class LongScanRefused(AmbpError):
    """Pairwise axiom scan at this arity needs the explicit long-run flag."""
