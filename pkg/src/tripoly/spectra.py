"""Exponential sums along orbits.

Two independent algorithms compute every orbit sum: a compensated streaming
accumulation in emission order and a residue-histogram pass (exact integer
counts, then one complex multiply per residue class). Their agreement is the
floating-point control for all reported magnitudes. The module also carries
the brute-force full-space character sum used as the square-root
cancellation oracle, and the power-law envelopes p^alpha * N^(1-beta)
reported beside measured sums; their leading constants are unknown and
deliberately never asserted against measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._kernels import _purepy
from .errors import (
    ConstantPolynomial,
    EnumerationCapExceeded,
    ZeroCoefficientVector,
)
from .ffield import Element, Field
from .genseq import advance_to_cycle, generate_array
from .mpoly import Polynomial
from .trisys import TriangularSystem

TWO_PI = 2.0 * math.pi

DEFAULT_ENUM_CAP = 10**7

# above this modulus the histogram route aggregates observed residues
# instead of allocating a length-p bucket array
_HIST_ARRAY_MAX_P = 1 << 26


def e_char(field_or_p, z) -> complex:
    """The additive character exp(2*pi*i*z/p), from the reduced residue."""
    p = field_or_p.p if isinstance(field_or_p, Field) else int(field_or_p)
    r = z.value if isinstance(z, Element) else int(z) % p
    ang = TWO_PI * r / p
    return complex(math.cos(ang), math.sin(ang))


@dataclass(frozen=True)
class CharacterSum:
    """A computed orbit sum: value = sum of e(a . u_n) over n < n_terms."""

    value: complex
    n_terms: int
    coeffs: tuple[int, ...]

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _as_u64_rows(u) -> np.ndarray:
    arr = np.asarray(u, dtype=np.uint64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("point stream must be two-dimensional")
    return np.ascontiguousarray(arr)


def _reduce_coeffs(coeffs: Sequence, p: int) -> np.ndarray:
    return np.asarray([int(c) % p for c in coeffs], dtype=np.uint64)


def _hist_value(u: np.ndarray, cr: np.ndarray, p: int) -> complex:
    if p <= _HIST_ARRAY_MAX_P:
        counts = _kernels.residue_hist(u, cr, p)
        nz = np.nonzero(counts)[0]
        ang = nz.astype(np.float64) * (TWO_PI / p)
        weights = counts[nz].astype(np.float64)
        return complex(
            float(np.dot(weights, np.cos(ang))),
            float(np.dot(weights, np.sin(ang))),
        )
    t = _purepy._linear_form(u, cr, p)
    residues, counts = np.unique(t, return_counts=True)
    ang = residues.astype(np.float64) * (TWO_PI / p)
    weights = counts.astype(np.float64)
    return complex(
        float(np.dot(weights, np.cos(ang))),
        float(np.dot(weights, np.sin(ang))),
    )


def _sum_value(u: np.ndarray, cr: np.ndarray, p: int, method: str) -> complex:
    if method == "stream":
        return _kernels.exp_sum_stream(u, cr, p)
    if method == "hist":
        return _hist_value(u, cr, p)
    raise ValueError(f"unknown method {method!r}")


def exp_sum(u, coeffs: Sequence, p: int, n: int | None = None,
            method: str = "stream") -> CharacterSum:
    """Character sum over the first n rows of a point stream.

    The linear form a . u_n is evaluated in exact residue arithmetic; only
    the final character values are floating point. The coefficient vector
    must not vanish mod p. method is "stream" (compensated, emission order)
    or "hist" (residue buckets).
    """
    arr = _as_u64_rows(u if isinstance(u, np.ndarray) else list(u))
    if n is not None:
        if n > len(arr):
            raise ValueError(f"n = {n} exceeds stream length {len(arr)}")
        arr = arr[:n]
    cr = _reduce_coeffs(coeffs, p)
    if len(cr) != arr.shape[1]:
        raise ValueError(f"need {arr.shape[1]} coefficients, got {len(cr)}")
    if not cr.any():
        raise ZeroCoefficientVector("coefficient vector vanishes mod p")
    value = _sum_value(arr, cr, p, method)
    return CharacterSum(value=value, n_terms=len(arr), coeffs=tuple(int(c) for c in cr))


@dataclass(frozen=True)
class ExpSumReport:
    """Magnitudes of orbit sums over a coefficient box, plus their maximum."""

    p: int
    m: int
    n_terms: int
    rows: tuple[tuple[tuple[int, ...], complex], ...]

    @property
    def max_abs(self) -> float:
        return max(abs(v) for _, v in self.rows) if self.rows else 0.0


def coefficient_box(limit: int, m: int) -> Iterable[tuple[int, ...]]:
    """All integer vectors with entries in [-limit, limit], excluding the
    all-zero vector."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    span = range(-limit, limit + 1)
    idx = [0] * m
    vals = list(span)
    total = len(vals) ** m
    for flat in range(total):
        rem = flat
        for j in range(m - 1, -1, -1):
            idx[j] = rem % len(vals)
            rem //= len(vals)
        a = tuple(vals[i] for i in idx)
        if any(a):
            yield a


def exp_sum_max(sys: TriangularSystem, w0: Sequence, n: int,
                limit: int | None = None,
                vectors: Iterable[Sequence[int]] | None = None,
                advance: bool = True, method: str = "hist",
                max_steps: int = 10**8,
                enum_cap: int = DEFAULT_ENUM_CAP) -> ExpSumReport:
    """Max |S_a(n)| over a coefficient box (or explicit vectors) for one
    orbit, with the stream buffered once and reused across vectors.

    Vectors that vanish mod p are skipped (the bound's gcd condition).
    advance=True starts from the first state on the cycle so the stream is
    purely periodic, matching the hypothesis of the bounds.
    """
    p = sys.field.p
    start = advance_to_cycle(sys, w0, max_steps=max_steps) if advance else w0
    u = generate_array(sys, start, n, skip_last=True)
    if vectors is None:
        if limit is None:
            raise ValueError("need either a limit or explicit vectors")
        if (2 * limit + 1) ** sys.m > enum_cap:
            raise EnumerationCapExceeded(
                f"coefficient box of {(2 * limit + 1) ** sys.m} vectors exceeds cap {enum_cap}"
            )
        vectors = coefficient_box(limit, sys.m)
    rows = []
    for a in vectors:
        cr = _reduce_coeffs(a, p)
        if not cr.any():
            continue
        value = _sum_value(u, cr, p, method)
        rows.append((tuple(int(x) for x in a), value))
    return ExpSumReport(p=p, m=sys.m, n_terms=n, rows=tuple(rows))


# --------------------------------------------------------- full-space oracle

@dataclass(frozen=True)
class WeilReport:
    """Brute-force full-space character sum against the square-root bound."""

    value: complex
    degree: int
    nvars: int
    p: int

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def bound(self) -> float:
        return self.degree * float(self.p) ** (self.nvars - 0.5)

    @property
    def bound_ok(self) -> bool:
        return self.magnitude < self.bound


def _modpow_vec(base: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % p
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    return out


def weil_bruteforce(field: Field, poly: Polynomial,
                    cap: int = DEFAULT_ENUM_CAP) -> WeilReport:
    """Exact sum of e(F(x)) over every point of F_p^nvars.

    Values are tallied into residue classes (exact integer counts), so the
    final magnitude involves at most p rounded character values.
    """
    if poly.ring.field != field:
        raise ValueError("polynomial not over the given field")
    p = field.p
    nvars = poly.ring.nvars
    deg = poly.total_degree()
    if deg <= 0:
        raise ConstantPolynomial("full-space sum oracle needs a nonconstant polynomial")
    total = p ** nvars
    if total > cap:
        raise EnumerationCapExceeded(f"{total} points exceed enumeration cap {cap}")
    if p >= 1 << 31:
        raise EnumerationCapExceeded("modulus too large for the vectorised enumerator")
    base = np.arange(p, dtype=np.int64)
    acc = np.zeros((p,) * nvars, dtype=np.int64)
    for exps, c in poly.terms.items():
        term = None
        for j, e in enumerate(exps):
            if e == 0:
                continue
            shape = [1] * nvars
            shape[j] = p
            factor = _modpow_vec(base, e, p).reshape(shape)
            term = factor if term is None else term * factor % p
        if term is None:
            term_arr = np.full((1,) * nvars, c % p, dtype=np.int64)
        else:
            term_arr = term * (c % p) % p
        acc = (acc + term_arr) % p
    counts = np.bincount(acc.ravel(), minlength=p).astype(np.float64)
    ang = np.arange(p, dtype=np.float64) * (TWO_PI / p)
    value = complex(float(np.dot(counts, np.cos(ang))), float(np.dot(counts, np.sin(ang))))
    return WeilReport(value=value, degree=int(deg), nvars=nvars, p=p)


# ------------------------------------------------------------ bound envelope

@dataclass(frozen=True)
class BoundEnvelope:
    """Exponent pair behind both power-law envelopes: p_exponent on the
    modulus and n_exponent (the saving) on the length."""

    m: int
    nu: int

    def __post_init__(self):
        if self.m < 1 or self.nu < 1:
            raise ValueError("dimension and moment order must be positive")

    @property
    def p_exponent(self) -> Fraction:
        m, nu = self.m, self.nu
        return Fraction(2 * m * m + 2 * m * nu + 2 * m + nu, 4 * nu * (m + nu))

    @property
    def n_exponent(self) -> Fraction:
        return Fraction(1, 2 * self.nu)

    @property
    def exponent_ratio(self) -> Fraction:
        """p_exponent / n_exponent; approaches m + 1/2 for large nu."""
        return self.p_exponent / self.n_exponent

    def sum_envelope(self, p: int, n: int) -> float:
        """Envelope p^alpha * n^(1-beta) for sum magnitudes. The implied
        constant is unknown and intentionally omitted."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return float(p) ** float(self.p_exponent) * float(n) ** float(1 - self.n_exponent)

    def discrepancy_envelope(self, p: int, n: int) -> float:
        """Envelope p^alpha * n^(-beta) * (log p)^m; constant omitted."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return (
            float(p) ** float(self.p_exponent)
            * float(n) ** float(-self.n_exponent)
            * math.log(p) ** self.m
        )


def critical_exponent(m: int) -> Fraction:
    """Limit of exponent_ratio as the moment order grows: sums start to
    cancel once the length passes p^(m + 1/2)."""
    return Fraction(2 * m + 1, 2)


def nu1_large_n_exponent(m: int) -> Fraction:
    """At moment order 1 and length near p^(m+1) the sum magnitude is at
    most N raised to this exponent (up to o(1))."""
    return 1 - Fraction(1, 4 * (m + 1) ** 2)
