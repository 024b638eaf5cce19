"""Exact arithmetic in the prime field F_p for word-sized p.

Every residue is kept canonical in [0, p), so equality is plain integer
equality. The modulus cap 2**62 guarantees that a product of two residues
fits an exact 124-bit intermediate (Python ints are exact anyway; the cap is
what lets the compiled kernels use fixed-width arithmetic).
"""

from __future__ import annotations

from .errors import DivisionByZero, FieldMismatch, NotPrime, TooLarge, TooSmall

MAX_MODULUS = 1 << 62

# Witnesses that make Miller-Rabin deterministic for all n < 3.3e24,
# comfortably covering the 2**62 cap.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2**64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """The prime field F_p, 2 < p < 2**62."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int):
            raise TypeError("modulus must be an int")
        if p < 3:
            raise TooSmall(f"modulus must exceed 2, got {p}")
        if p >= MAX_MODULUS:
            raise TooLarge(f"modulus must be below 2**62, got {p}")
        if not is_prime(p):
            raise NotPrime(f"{p} is composite")
        self.p = p

    def __repr__(self):
        return f"Field({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def element(self, value: int) -> "Element":
        """Canonical element from any integer (reduced mod p)."""
        if isinstance(value, Element):
            if value.field != self:
                raise FieldMismatch(f"element of {value.field} given to {self}")
            return value
        return Element(value % self.p, self)

    @property
    def zero(self) -> "Element":
        return Element(0, self)

    @property
    def one(self) -> "Element":
        return Element(1, self)

    def reduce(self, value: int) -> int:
        """Raw residue of an integer."""
        return value % self.p


class Element:
    """An immutable residue in [0, p). Supports +, -, *, **, unary -, and
    .inv(); operands must belong to the same field (ints coerce)."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: Field):
        self.value = value
        self.field = field

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.field != self.field:
                raise FieldMismatch(
                    f"cannot mix elements of F_{self.field.p} and F_{other.field.p}"
                )
            return other
        if isinstance(other, int):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Element((self.value + o.value) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Element((self.value - o.value) % self.field.p, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Element(self.value * o.value % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return Element(-self.value % self.field.p, self.field)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        # pow(0, 0, p) == 1, which is the convention we want
        return Element(pow(self.value, e, self.field.p), self.field)

    def inv(self) -> "Element":
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.field.p}")
        return Element(pow(self.value, self.field.p - 2, self.field.p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}"
