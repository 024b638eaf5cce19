"""Exception hierarchy. Every failure mode a caller can act on has its own
class; the CLI maps these onto exit codes (validation=1, budget=2, io=3)."""


class TripolyError(Exception):
    """Base class for all library errors."""


# --- construction / validation -------------------------------------------

class NotPrime(TripolyError):
    """Modulus failed the deterministic primality check."""


class TooSmall(TripolyError):
    """Modulus below the supported range (p must exceed 2)."""


class TooLarge(TripolyError):
    """Modulus at or above 2**62; residue products would not fit the exact
    double-width intermediate the arithmetic relies on."""


class FieldMismatch(TripolyError):
    """Elements of two different fields were mixed in one operation."""


class DivisionByZero(TripolyError):
    """Multiplicative inverse of zero requested."""


class WidthMismatch(TripolyError):
    """Exponent vector or evaluation point has the wrong number of variables."""


class RingMismatch(TripolyError):
    """Polynomials from different rings were combined."""


class ZeroPolynomial(TripolyError):
    """Operation undefined for the zero polynomial."""


class ExponentOverflow(TripolyError):
    """An exponent left the supported 32-bit range during multiplication."""


# --- system validation ----------------------------------------------------

class NonUniqueLeading(TripolyError):
    """A multiplier polynomial has no single monomial of maximal degree."""


class NonMonicLeading(TripolyError):
    """The maximal-degree monomial does not have coefficient 1."""


class DegreeCondition(TripolyError):
    """An additive tail exceeds the degree of its multiplier."""


class VariableScope(TripolyError):
    """A component polynomial touches a variable of equal or lower index."""


class ZeroA(TripolyError):
    """The affine last component has zero slope."""


class CharTooSmall(TripolyError):
    """Field characteristic does not exceed the system dimension."""


class WrongSystemKind(TripolyError):
    """Operation requires a system built by the fast constructor."""


class IndexOutOfRange(TripolyError):
    """Component index outside 0..m-1."""


# --- budgets and caps -------------------------------------------------------

class BudgetExceeded(TripolyError):
    """Base class for every configurable resource cap."""


class TermBudgetExceeded(BudgetExceeded):
    """Symbolic iteration would exceed the term-count budget."""


class StepBudgetExceeded(BudgetExceeded):
    """Cycle detection exceeded the step budget before closing the orbit."""


class EnumerationCapExceeded(BudgetExceeded):
    """Brute-force point enumeration larger than the configured cap."""


class CapExceeded(BudgetExceeded):
    """Exact discrepancy / coefficient-box enumeration larger than its cap."""


# --- input validation -------------------------------------------------------

class ZeroCoefficientVector(TripolyError):
    """Coefficient vector vanishes identically mod p."""


class ConstantPolynomial(TripolyError):
    """Character-sum oracle requires a nonconstant polynomial."""


class ParseError(TripolyError):
    """Malformed polynomial string or config file."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MissingField(TripolyError):
    """Config lacks a required key or has one of the wrong shape."""
