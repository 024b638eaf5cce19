"""Sparse multivariate polynomials over a prime field.

Terms live in a map keyed by exponent vectors. Polynomials additionally keep
a packed-key numpy representation (one uint64 per monomial, exponents in
disjoint bit fields, variable 0 in the most significant field so that key
order is lexicographic order); the heavy products run on that form through
the kernel backend, and whichever representation an operation produces is
kept lazily until the other is needed.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    ExponentOverflow,
    ParseError,
    RingMismatch,
    TermBudgetExceeded,
    WidthMismatch,
    ZeroPolynomial,
)
from .ffield import Element, Field

NEG_INF = float("-inf")

MAX_EXPONENT = (1 << 32) - 1

# below this many pairwise products a plain dict loop beats packing
_SMALL_MUL = 1 << 10

_U64 = np.uint64


class PolyRing:
    """Context (field, number of variables) shared by a family of polynomials."""

    __slots__ = ("field", "nvars", "pack_bits", "pack_mask", "pack_shifts")

    def __init__(self, field: Field, nvars: int):
        if nvars < 1:
            raise ValueError("ring needs at least one variable")
        self.field = field
        self.nvars = nvars
        bits = min(32, 62 // nvars)
        self.pack_bits = bits
        self.pack_mask = (1 << bits) - 1
        self.pack_shifts = tuple(bits * (nvars - 1 - j) for j in range(nvars))

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.nvars == other.nvars
        )

    def __hash__(self):
        return hash((self.field.p, self.nvars))

    def __repr__(self):
        return f"PolyRing(F_{self.field.p}, {self.nvars} vars)"

    # ---------------------------------------------------------- constructors

    @property
    def zero(self) -> "Polynomial":
        return Polynomial._from_dict(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = int(c) % self.field.p
        return Polynomial._from_dict(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, j: int) -> "Polynomial":
        """The variable X_j as a polynomial."""
        if not 0 <= j < self.nvars:
            raise WidthMismatch(f"variable index {j} outside 0..{self.nvars - 1}")
        e = [0] * self.nvars
        e[j] = 1
        return Polynomial._from_dict(self, {tuple(e): 1})

    def monomial(self, exponents: Sequence[int], coeff=1) -> "Polynomial":
        return self.from_terms([(exponents, coeff)])

    def from_terms(self, pairs: Iterable[tuple[Sequence[int], int]]) -> "Polynomial":
        """Build from (exponent vector, coefficient) pairs; duplicates merge,
        zero coefficients drop."""
        p = self.field.p
        d: dict[tuple[int, ...], int] = {}
        for exps, c in pairs:
            e = tuple(int(x) for x in exps)
            if len(e) != self.nvars:
                raise WidthMismatch(
                    f"exponent vector {e} has width {len(e)}, ring has {self.nvars}"
                )
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            if any(x > MAX_EXPONENT for x in e):
                raise ExponentOverflow(f"exponent beyond 32 bits in {e}")
            c = int(c) % p
            cur = (d.get(e, 0) + c) % p
            if cur:
                d[e] = cur
            elif e in d:
                del d[e]
        return Polynomial._from_dict(self, d)

    def from_string(self, text: str) -> "Polynomial":
        """Parse the textual grammar: terms joined by + or -, each term a
        '*'-separated product of integer literals and X<j>[^<e>] factors."""
        s = text.strip()
        if not s:
            raise ParseError("empty polynomial string")
        pairs = []
        pos = 0
        for mo in re.finditer(r"[+-]?[^+-]+", s):
            chunk = mo.group().strip()
            pos = mo.end()
            sign = 1
            if chunk.startswith("+"):
                chunk = chunk[1:].strip()
            elif chunk.startswith("-"):
                sign = -1
                chunk = chunk[1:].strip()
            if not chunk:
                raise ParseError(f"dangling sign in {text!r}")
            coeff = sign
            exps = [0] * self.nvars
            for factor in chunk.split("*"):
                factor = factor.strip()
                fm = re.fullmatch(r"[Xx](\d+)(?:\^(\d+))?", factor)
                if fm:
                    j = int(fm.group(1))
                    if j >= self.nvars:
                        raise ParseError(
                            f"variable X{j} outside ring of {self.nvars} variables"
                        )
                    exps[j] += int(fm.group(2) or 1)
                elif re.fullmatch(r"-?\d+", factor):
                    coeff *= int(factor)
                else:
                    raise ParseError(f"bad factor {factor!r} in {text!r}")
            pairs.append((tuple(exps), coeff))
        if pos != len(s):
            raise ParseError(f"trailing junk in {text!r}")
        return self.from_terms(pairs)


class Polynomial:
    """Immutable sparse polynomial. Use the PolyRing factories to build one."""

    __slots__ = ("ring", "_d", "_k", "_v", "_deg", "_plan")

    def __init__(self):
        raise TypeError("use PolyRing factories to construct polynomials")

    # ------------------------------------------------------- representations

    @classmethod
    def _from_dict(cls, ring: PolyRing, d: dict) -> "Polynomial":
        self = object.__new__(cls)
        self.ring = ring
        self._d = d
        self._k = None
        self._v = None
        self._deg = None
        self._plan = None
        return self

    @classmethod
    def _from_arrays(cls, ring: PolyRing, keys, vals) -> "Polynomial":
        self = object.__new__(cls)
        self.ring = ring
        self._d = None
        self._k = keys
        self._v = vals
        self._deg = None
        self._plan = None
        return self

    def _unpack_cols(self):
        mask = _U64(self.ring.pack_mask)
        return np.stack(
            [(self._k >> _U64(s)) & mask for s in self.ring.pack_shifts], axis=1
        )

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        """Exponent-vector -> coefficient map (canonical, no zeros)."""
        if self._d is None:
            rows = self._unpack_cols().tolist()
            vals = self._v.tolist()
            self._d = {tuple(r): v for r, v in zip(rows, vals)}
        return self._d

    def _maybe_arrays(self):
        """Packed (keys, vals) or None when an exponent exceeds the ring's
        per-variable bit field."""
        if self._k is not None:
            return self._k, self._v
        d = self._d
        if not d:
            self._k = np.empty(0, _U64)
            self._v = np.empty(0, _U64)
            return self._k, self._v
        mat = np.array(list(d.keys()), dtype=np.int64)
        if int(mat.max()) > self.ring.pack_mask:
            return None
        mat = mat.astype(_U64)
        keys = np.zeros(len(d), dtype=_U64)
        for j, s in enumerate(self.ring.pack_shifts):
            keys |= mat[:, j] << _U64(s)
        self._k = keys
        self._v = np.fromiter(d.values(), dtype=_U64, count=len(d))
        return self._k, self._v

    # ------------------------------------------------------------- queries

    def __len__(self):
        return len(self._v) if self._d is None else len(self._d)

    def is_zero(self) -> bool:
        return len(self) == 0

    def total_degree(self):
        """Maximal term degree; NEG_INF for the zero polynomial."""
        if self._deg is None:
            if len(self) == 0:
                self._deg = NEG_INF
            elif self._d is not None:
                self._deg = max(sum(e) for e in self._d)
            else:
                self._deg = int(self._unpack_cols().sum(axis=1).max())
        return self._deg

    def leading_terms(self) -> dict[tuple[int, ...], int]:
        """All terms of maximal total degree."""
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no leading term")
        d = self.total_degree()
        if self._d is not None:
            return {e: c for e, c in self._d.items() if sum(e) == d}
        cols = self._unpack_cols()
        sel = cols.sum(axis=1) == d
        rows = cols[sel].tolist()
        vals = self._v[sel].tolist()
        return {tuple(r): v for r, v in zip(rows, vals)}

    def variables_used(self) -> set[int]:
        out = set()
        if self._d is not None:
            for e in self._d:
                for j, x in enumerate(e):
                    if x:
                        out.add(j)
        elif len(self):
            nz = self._unpack_cols().max(axis=0)
            out = {j for j, x in enumerate(nz.tolist()) if x}
        return out

    def _var_maxima(self):
        if len(self) == 0:
            return [0] * self.ring.nvars
        if self._k is not None:
            return [int(x) for x in self._unpack_cols().max(axis=0)]
        mx = [0] * self.ring.nvars
        for e in self._d:
            for j, x in enumerate(e):
                if x > mx[j]:
                    mx[j] = x
        return mx

    # ------------------------------------------------------------ arithmetic

    def _check_ring(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Element)):
                return self.ring.constant(other)
            raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check_ring(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self._k is not None or other._k is not None:
            a = self._maybe_arrays()
            b = other._maybe_arrays()
            if a is not None and b is not None:
                k, v = _kernels.add_packed(a[0], a[1], b[0], b[1], self.ring.field.p)
                return Polynomial._from_arrays(self.ring, k, v)
        p = self.ring.field.p
        d = dict(self.terms)
        for e, c in other.terms.items():
            cur = (d.get(e, 0) + c) % p
            if cur:
                d[e] = cur
            elif e in d:
                del d[e]
        return Polynomial._from_dict(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.field.p
        if self._k is not None:
            return Polynomial._from_arrays(self.ring, self._k, (_U64(p) - self._v) % _U64(p))
        return Polynomial._from_dict(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check_ring(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        """Product with a scalar."""
        p = self.ring.field.p
        c = int(c) % p
        if c == 0:
            return self.ring.zero
        if c == 1:
            return self
        if self._k is not None and p < (1 << 31):
            return Polynomial._from_arrays(self.ring, self._k, (self._v * _U64(c)) % _U64(p))
        return Polynomial._from_dict(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def _mul_dict(self, other):
        p = self.ring.field.p
        nvars = self.ring.nvars
        out: dict[tuple[int, ...], int] = {}
        items2 = list(other.terms.items())
        for e1, c1 in self.terms.items():
            for e2, c2 in items2:
                e = tuple(a + b for a, b in zip(e1, e2))
                cur = (out.get(e, 0) + c1 * c2) % p
                if cur:
                    out[e] = cur
                elif e in out:
                    del out[e]
        for e in out:
            if any(x > MAX_EXPONENT for x in e):
                raise ExponentOverflow(f"exponent beyond 32 bits in {e}")
        return Polynomial._from_dict(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, (int, Element)):
            return self.scale(other)
        other = self._check_ring(other)
        if self.is_zero() or other.is_zero():
            return self.ring.zero
        if len(self) * len(other) <= _SMALL_MUL:
            return self._mul_dict(other)
        a = self._maybe_arrays()
        b = other._maybe_arrays()
        if a is None or b is None:
            return self._mul_dict(other)
        bounds = [x + y for x, y in zip(self._var_maxima(), other._var_maxima())]
        if max(bounds) > self.ring.pack_mask:
            return self._mul_dict(other)
        impl = _kernels.mul_packed
        p = self.ring.field.p
        if p < (1 << 21) and math.prod(x + 1 for x in bounds) <= (1 << 24):
            impl = _kernels.mul_packed_scatter
        k, v = impl(
            a[0], a[1], b[0], b[1], p,
            self.ring.pack_shifts, self.ring.pack_mask,
        )
        return Polynomial._from_arrays(self.ring, k, v)

    def __rmul__(self, other):
        if isinstance(other, (int, Element)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # ---------------------------------------------------------- composition

    def compose(self, subs: Sequence["Polynomial"], term_budget: int | None = None) -> "Polynomial":
        """Substitute subs[j] for X_j and expand.

        Evaluation commutes: compose(f, subs)(w) == f([s(w) for s in subs]).
        Powers of each substituted polynomial are memoized across terms.
        A term_budget caps the size of every intermediate product (count
        bounded via the degree of the operands) and of the result.
        """
        ring = self.ring
        if len(subs) != ring.nvars:
            raise WidthMismatch(f"need {ring.nvars} substitutions, got {len(subs)}")
        for s in subs:
            if not isinstance(s, Polynomial) or s.ring != ring:
                raise RingMismatch("substitutions must come from the same ring")
        pows: list[list[Polynomial]] = [[ring.one, s] for s in subs]

        def power(j: int, e: int) -> Polynomial:
            chain = pows[j]
            while len(chain) <= e:
                chain.append(_guarded_mul(chain[-1], subs[j], term_budget))
            return chain[e]

        result = ring.zero
        for exps, c in self.terms.items():
            part: Polynomial | None = None
            for j, e in enumerate(exps):
                if e:
                    pj = power(j, e)
                    part = pj if part is None else _guarded_mul(part, pj, term_budget)
            part = ring.constant(c) if part is None else part.scale(c)
            result = result + part
            if term_budget is not None and len(result) > term_budget:
                raise TermBudgetExceeded(
                    f"composition grew to {len(result)} terms (budget {term_budget})"
                )
        return result

    # ------------------------------------------------------------ evaluation

    def _eval_plan(self):
        if self._plan is None:
            self._plan = [
                (c, tuple((j, e) for j, e in enumerate(exps) if e))
                for exps, c in self.terms.items()
            ]
        return self._plan

    def _eval_int(self, values: Sequence[int]) -> int:
        p = self.ring.field.p
        acc = 0
        for c, ves in self._eval_plan():
            t = c
            for j, e in ves:
                t = t * pow(values[j], e, p) % p
            acc += t
        return acc % p

    def evaluate(self, values: Sequence) -> Element:
        """Exact evaluation at a point (ints or Elements of the ring's field)."""
        ring = self.ring
        if len(values) != ring.nvars:
            raise WidthMismatch(f"need {ring.nvars} values, got {len(values)}")
        vals = []
        for v in values:
            if isinstance(v, Element):
                if v.field != ring.field:
                    raise RingMismatch("evaluation point from a different field")
                vals.append(v.value)
            else:
                vals.append(int(v) % ring.field.p)
        return ring.field.element(self._eval_int(vals))

    def __call__(self, *values):
        return self.evaluate(values)

    # ---------------------------------------------------------------- output

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms ordered by exponent vector, lexicographic descending."""
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def to_string(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = [
                f"X{j}" if e == 1 else f"X{j}^{e}"
                for j, e in enumerate(exps)
                if e
            ]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return "+".join(parts)

    def __repr__(self):
        s = self.to_string()
        if len(s) > 120:
            s = f"<{len(self)} terms, degree {self.total_degree()}>"
        return f"Polynomial({s})"

    def __eq__(self, other):
        if isinstance(other, (int, Element)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.ring != other.ring:
            return False
        if self._k is not None and other._k is not None:
            if len(self._k) != len(other._k):
                return False
            o1 = np.argsort(self._k)
            o2 = np.argsort(other._k)
            return bool(
                np.array_equal(self._k[o1], other._k[o2])
                and np.array_equal(self._v[o1], other._v[o2])
            )
        return self.terms == other.terms

    __hash__ = None  # mutable-view equality; polynomials are not hashable


def _guarded_mul(x: Polynomial, y: Polynomial, term_budget: int | None) -> Polynomial:
    if term_budget is not None and not (x.is_zero() or y.is_zero()):
        n = x.ring.nvars
        box = math.comb(int(x.total_degree() + y.total_degree()) + n, n)
        if min(box, len(x) * len(y)) > term_budget:
            raise TermBudgetExceeded(
                f"product bound {min(box, len(x) * len(y))} terms exceeds budget {term_budget}"
            )
    out = x * y
    if term_budget is not None and len(out) > term_budget:
        raise TermBudgetExceeded(f"product has {len(out)} terms (budget {term_budget})")
    return out
