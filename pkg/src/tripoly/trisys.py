"""Triangular polynomial systems and their degree growth.

A system over F_p in variables X_0..X_m consists of components
f_i = X_i * g_i(X_{i+1..m}) + h_i(X_{i+1..m}) for i < m and an affine last
component f_m = a*X_m + b, where every multiplier g_i has a unique monic
monomial of maximal degree and deg h_i <= deg g_i. The exponent rows of
those maximal monomials form an upper unitriangular integer matrix whose
powers predict iterate degrees; this module validates the construction,
iterates it symbolically, and measures everything the prediction claims.
"""

from __future__ import annotations

import math
import random as _random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    CharTooSmall,
    DegreeCondition,
    IndexOutOfRange,
    MissingField,
    NonMonicLeading,
    NonUniqueLeading,
    ParseError,
    RingMismatch,
    VariableScope,
    ZeroA,
    ZeroCoefficientVector,
    ZeroPolynomial,
)
from .ffield import Element, Field
from .mpoly import NEG_INF, Polynomial, PolyRing

DEFAULT_TERM_BUDGET = 10**6


def _mat_mul(A, B):
    n = len(A)
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(n)) for j in range(n))
        for i in range(n)
    )


def _mat_pow(A, e):
    n = len(A)
    R = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    B = A
    while e:
        if e & 1:
            R = _mat_mul(R, B)
        e >>= 1
        if e:
            B = _mat_mul(B, B)
    return R


@dataclass(frozen=True)
class DegreeVector:
    """Exact iterate degrees (d_0..d_m) at iteration index k."""

    k: int
    d: tuple[int, ...]


@dataclass(frozen=True)
class ComboResult:
    """Outcome of a nonconstancy check on a combination of iterates."""

    constant: bool
    degree: int | None
    zero: bool


class TriangularSystem:
    """Validated system; immutable, with an internal iterate cache."""

    __slots__ = (
        "field", "m", "ring", "g", "h", "a", "b", "f",
        "exponent_matrix", "fast_consts", "_iterates",
    )

    def __init__(self, field, m, ring, g, h, a, b, f, exponent_matrix, fast_consts):
        self.field = field
        self.m = m
        self.ring = ring
        self.g = tuple(g)
        self.h = tuple(h)
        self.a = a
        self.b = b
        self.f = tuple(f)
        self.exponent_matrix = exponent_matrix
        self.fast_consts = fast_consts
        self._iterates = [tuple(f)]

    @property
    def is_fast(self) -> bool:
        return self.fast_consts is not None

    def __repr__(self):
        kind = "fast, " if self.is_fast else ""
        return f"TriangularSystem({kind}p={self.field.p}, m={self.m})"


def _as_int(field: Field, x) -> int:
    if isinstance(x, Element):
        if x.field != field:
            raise RingMismatch("coefficient from a different field")
        return x.value
    return int(x) % field.p


def build_system(field: Field, m: int, g: Sequence[Polynomial], h: Sequence[Polynomial],
                 a, b) -> TriangularSystem:
    """Validate the construction and assemble the component polynomials.

    Checks run in a fixed order so a broken input always reports the same
    error: variable scope, leading-monomial uniqueness, monicity, tail
    degree, nonzero slope, characteristic. Raises the specific error class
    for the first violated condition.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if len(g) != m or len(h) != m:
        raise ValueError(f"need exactly {m} multiplier and {m} tail polynomials")
    ring = PolyRing(field, m + 1)
    for name, polys in (("g", g), ("h", h)):
        for i, poly in enumerate(polys):
            if not isinstance(poly, Polynomial) or poly.ring != ring:
                raise RingMismatch(f"{name}{i} must live in {ring}")
            bad = [j for j in poly.variables_used() if j <= i]
            if bad:
                raise VariableScope(f"{name}{i} uses X{bad[0]} (allowed: X{i + 1}..X{m})")
    leads = []
    for i, poly in enumerate(g):
        try:
            lead = poly.leading_terms()
        except ZeroPolynomial:
            raise NonUniqueLeading(f"g{i} is zero, so it has no leading monomial") from None
        if len(lead) != 1:
            raise NonUniqueLeading(f"g{i} has {len(lead)} monomials of maximal degree")
        leads.append(next(iter(lead.items())))
    for i, (exps, coeff) in enumerate(leads):
        if coeff != 1:
            raise NonMonicLeading(f"g{i} leading coefficient is {coeff}, not 1")
    for i, poly in enumerate(h):
        if poly.total_degree() > g[i].total_degree():
            raise DegreeCondition(
                f"deg h{i} = {poly.total_degree()} exceeds deg g{i} = {g[i].total_degree()}"
            )
    a = _as_int(field, a)
    b = _as_int(field, b)
    if a == 0:
        raise ZeroA("last component must have nonzero slope")
    if field.p <= m:
        raise CharTooSmall(f"p = {field.p} must exceed m = {m}")

    f = [ring.gen(i) * g[i] + h[i] for i in range(m)]
    f.append(ring.gen(m).scale(a) + ring.constant(b))

    rows = []
    for i, (exps, _) in enumerate(leads):
        row = [0] * (m + 1)
        row[i] = 1
        for j in range(i + 1, m + 1):
            row[j] = exps[j]
        rows.append(tuple(row))
    rows.append(tuple(int(j == m) for j in range(m + 1)))
    exponent_matrix = tuple(rows)

    fast_consts = None
    x_next = [ring.gen(i + 1) for i in range(m)]
    if all(g[i] == x_next[i] for i in range(m)) and all(
        h[i].total_degree() <= 0 for i in range(m)
    ):
        fast_consts = tuple(
            next(iter(h[i].terms.values()), 0) for i in range(m)
        )

    return TriangularSystem(field, m, ring, g, h, a, b, f, exponent_matrix, fast_consts)


def fast_system(field: Field, m: int, add_consts: Sequence, a, b) -> TriangularSystem:
    """The one-multiplication-per-component instance: each multiplier is the
    next variable and each tail is a constant."""
    if len(add_consts) != m:
        raise ValueError(f"need {m} additive constants")
    ring = PolyRing(field, m + 1)
    g = [ring.gen(i + 1) for i in range(m)]
    h = [ring.constant(_as_int(field, c)) for c in add_consts]
    return build_system(field, m, g, h, a, b)


# ------------------------------------------------------------- degree growth

def degree_vector(sys: TriangularSystem, k: int) -> DegreeVector:
    """Exact predicted degrees of the k-th iterates: the (k+1)-st power of
    the exponent matrix applied to the all-ones vector."""
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    S = _mat_pow(sys.exponent_matrix, k + 1)
    return DegreeVector(k, tuple(sum(row) for row in S))


def chain_product(sys: TriangularSystem, i: int) -> int:
    """Product of the superdiagonal exponents from row i to the last row."""
    S = sys.exponent_matrix
    out = 1
    for j in range(i, sys.m):
        out *= S[j][j + 1]
    return out


def interpolate_points(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    """Exact monomial coefficients (ascending) of the polynomial through the
    given points, via Newton divided differences over the rationals."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / Fraction(xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    acc = [Fraction(1)]
    for j in range(n):
        for t, c in enumerate(acc):
            out[t] += coef[j] * c
        nxt = [Fraction(0)] * (len(acc) + 1)
        for t, c in enumerate(acc):
            nxt[t] += c * Fraction(-xs[j])
            nxt[t + 1] += c
        acc = nxt
    return out


def degree_poly_fit(sys: TriangularSystem, i: int, k_start: int = 10,
                    npoints: int | None = None) -> list[Fraction]:
    """Interpolate d_{k,i} through consecutive iteration indices starting at
    k_start (default m-i+1 points). The degree sequence is an exact
    polynomial in k of degree at most m-i, so the fit recovers it."""
    if not 0 <= i <= sys.m:
        raise IndexOutOfRange(f"component index {i} outside 0..{sys.m}")
    e = sys.m - i
    if npoints is None:
        npoints = e + 1
    ks = list(range(k_start, k_start + npoints))
    ys = [degree_vector(sys, k).d[i] for k in ks]
    return interpolate_points(ks, ys)


def predicted_leading(sys: TriangularSystem, i: int, verify_at: int = 10) -> tuple[Fraction, int]:
    """Leading behaviour of d_{k,i} in k: coefficient
    (product of superdiagonal exponents)/(m-i)! at power m-i.

    When the superdiagonal product is positive the closed form is verified
    against an exact interpolation of the degree sequence.
    """
    if not 0 <= i <= sys.m - 1:
        raise IndexOutOfRange(f"component index {i} outside 0..{sys.m - 1}")
    e = sys.m - i
    c = Fraction(chain_product(sys, i), math.factorial(e))
    if c > 0:
        coeffs = degree_poly_fit(sys, i, k_start=verify_at)
        if coeffs[e] != c:
            raise RuntimeError(
                f"interpolated leading coefficient {coeffs[e]} disagrees with {c}"
            )
    return c, e


# --------------------------------------------------------- symbolic iterates

def iterate_symbolic(sys: TriangularSystem, k: int,
                     term_budget: int | None = DEFAULT_TERM_BUDGET) -> list[Polynomial]:
    """The k-th symbolic iterates of all components (index 0 is the system
    itself). Levels are cached on the system; every product inside the
    composition is capped by term_budget."""
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    cache = sys._iterates
    while len(cache) <= k:
        prev = cache[-1]
        nxt = tuple(f.compose(prev, term_budget=term_budget) for f in sys.f)
        cache.append(nxt)
    return list(cache[k])


def dyndeg_estimate(system_or_map, k_max: int,
                    term_budget: int | None = DEFAULT_TERM_BUDGET) -> list[float]:
    """Root-growth estimates (deg of k-th iterate)**(1/k) for k = 1..k_max.

    For a validated triangular system the degrees come from the exact matrix
    prediction; for an arbitrary square polynomial map they are measured by
    symbolic iteration under the term budget.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if isinstance(system_or_map, TriangularSystem):
        return [
            max(degree_vector(system_or_map, k).d) ** (1.0 / k)
            for k in range(1, k_max + 1)
        ]
    polys = list(system_or_map)
    if not polys:
        raise ValueError("empty polynomial map")
    ring = polys[0].ring
    if len(polys) != ring.nvars or any(q.ring != ring for q in polys):
        raise RingMismatch("map must be square: one polynomial per ring variable")
    out = []
    cur = polys
    for k in range(1, k_max + 1):
        cur = [q.compose(cur, term_budget=term_budget) for q in polys]
        deg = max(q.total_degree() for q in cur)
        out.append(float(deg) ** (1.0 / k) if deg > 0 else 0.0)
    return out


def combo_nonconstant_check(sys: TriangularSystem, coeffs: Sequence,
                            k_list: Sequence[int], l_list: Sequence[int],
                            term_budget: int | None = DEFAULT_TERM_BUDGET) -> ComboResult:
    """Total degree of sum_i c_i * sum_j (f_i^(k_j) - f_i^(l_j)), built
    symbolically. Reports constant (degree <= 0) outcomes explicitly; equal
    index multisets always telescope to the zero polynomial."""
    if len(coeffs) != sys.m:
        raise ValueError(f"need {sys.m} coefficients")
    cs = [_as_int(sys.field, c) for c in coeffs]
    if not any(cs):
        raise ZeroCoefficientVector("coefficient vector vanishes mod p")
    if len(k_list) != len(l_list) or not k_list:
        raise ValueError("index lists must be nonempty and of equal length")
    if any(k < 0 for k in list(k_list) + list(l_list)):
        raise ValueError("iteration indices must be nonnegative")
    top = max(max(k_list), max(l_list))
    iterate_symbolic(sys, top, term_budget=term_budget)
    levels = sys._iterates
    F = sys.ring.zero
    for i, c in enumerate(cs):
        if not c:
            continue
        acc = sys.ring.zero
        for kj, lj in zip(k_list, l_list):
            acc = acc + levels[kj][i] - levels[lj][i]
        F = F + acc.scale(c)
    deg = F.total_degree()
    if deg == NEG_INF:
        return ComboResult(constant=True, degree=None, zero=True)
    if deg == 0:
        return ComboResult(constant=True, degree=None, zero=False)
    return ComboResult(constant=False, degree=int(deg), zero=False)


def combo_violation_scan(sys: TriangularSystem, nu: int, k_max: int,
                         coeff_trials: int = 3, min_index: int = 1,
                         rng=None,
                         term_budget: int | None = DEFAULT_TERM_BUDGET) -> list[dict]:
    """Empirical sweep of combo_nonconstant_check against the leading-term
    expectation.

    Every pair of index lists with entries in [min_index, k_max] and length
    nu is tried with several random nonzero coefficient vectors. Expected
    outcome: after cancelling common indices, nothing left means constant,
    otherwise the degree at the largest surviving index for the smallest
    component with a nonzero coefficient. Disagreements are returned as
    records rather than raised: below some system-dependent index floor the
    expectation can genuinely fail, and this scan measures where.
    """
    import itertools as _it

    if rng is None:
        rng = _random.Random(0)
    if min_index < 0 or k_max < min_index:
        raise ValueError("need 0 <= min_index <= k_max")
    p = sys.field.p
    violations = []
    indices = range(min_index, k_max + 1)
    for k_list in _it.product(indices, repeat=nu):
        for l_list in _it.product(indices, repeat=nu):
            surviving = []
            counts: dict[int, int] = {}
            for k in k_list:
                counts[k] = counts.get(k, 0) + 1
            for k in l_list:
                counts[k] = counts.get(k, 0) - 1
            surviving = [k for k, c in counts.items() if c]
            for _ in range(coeff_trials):
                coeffs = [rng.randrange(p) for _ in range(sys.m)]
                if not any(coeffs):
                    coeffs[rng.randrange(sys.m)] = rng.randrange(1, p)
                res = combo_nonconstant_check(sys, coeffs, k_list, l_list,
                                              term_budget=term_budget)
                if not surviving:
                    expected = None
                else:
                    i0 = min(i for i, c in enumerate(coeffs) if c % p)
                    expected = degree_vector(sys, max(surviving)).d[i0]
                measured = None if res.constant else res.degree
                if measured != expected:
                    violations.append({
                        "k_list": k_list, "l_list": l_list,
                        "coeffs": tuple(coeffs),
                        "measured": measured, "expected": expected,
                    })
    return violations


# ------------------------------------------------------------------ sampling

def random_system(rng, field: Field, m: int, s_range: tuple[int, int] = (0, 3),
                  chain_range: tuple[int, int] | None = None,
                  max_tail_terms: int = 2, max_h_terms: int = 2) -> TriangularSystem:
    """Draw a random valid system.

    Exponent-matrix entries come uniformly from s_range (superdiagonal
    entries from chain_range when given). Multiplier tails and additive
    parts are supported on componentwise divisors of the leading monomial;
    that keeps the maximal term of every iterate a single monomial, so the
    matrix degree prediction is exact for sampled systems (arbitrary valid
    tails can outgrow the prediction).
    """
    p = field.p
    ring = PolyRing(field, m + 1)
    g = []
    h = []
    for i in range(m):
        lead = [0] * (m + 1)
        for j in range(i + 1, m + 1):
            lead[j] = rng.randint(*s_range)
        if chain_range is not None:
            lead[i + 1] = rng.randint(*chain_range)
        lead = tuple(lead)

        def divisor(allow_full: bool) -> tuple[int, ...] | None:
            for _ in range(8):
                e = tuple(rng.randint(0, s) for s in lead)
                if allow_full or e != lead:
                    return e
            return None

        pairs = [(lead, 1)]
        for _ in range(rng.randint(0, max_tail_terms)):
            e = divisor(allow_full=False)
            if e is not None:
                pairs.append((e, rng.randrange(1, p)))
        gi = ring.from_terms(pairs)
        # merging could in principle erase the unique leading term; the
        # leading monomial never collides with a proper divisor, so gi is
        # always valid here
        g.append(gi)

        hpairs = []
        for _ in range(rng.randint(0, max_h_terms)):
            e = divisor(allow_full=True)
            if e is not None:
                hpairs.append((e, rng.randrange(1, p)))
        h.append(ring.from_terms(hpairs))
    a = rng.randrange(1, p)
    b = rng.randrange(0, p)
    return build_system(field, m, g, h, a, b)


# ------------------------------------------------------- text representation

def system_from_mapping(mapping: Mapping[str, str]) -> TriangularSystem:
    """Build from the key-value form used by config files: p, m, a, b and
    per-index polynomial strings g0..g{m-1}, h0..h{m-1} (h defaults to 0)."""
    def need(key: str) -> str:
        if key not in mapping or str(mapping[key]).strip() == "":
            raise MissingField(f"system definition lacks {key!r}")
        return str(mapping[key]).strip()

    def as_int(key: str) -> int:
        raw = need(key)
        try:
            return int(raw, 0)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got {raw!r}") from None

    p = as_int("p")
    m = as_int("m")
    field = Field(p)
    if m < 1:
        raise MissingField(f"m must be at least 1, got {m}")
    ring = PolyRing(field, m + 1)
    g = [ring.from_string(need(f"g{i}")) for i in range(m)]
    h = [
        ring.from_string(str(mapping[f"h{i}"]).strip()) if str(mapping.get(f"h{i}", "")).strip()
        else ring.zero
        for i in range(m)
    ]
    a = as_int("a")
    b = as_int("b")
    return build_system(field, m, g, h, a, b)


def system_to_mapping(sys: TriangularSystem) -> dict[str, str]:
    """Canonical key-value form (inverse of system_from_mapping)."""
    out = {
        "p": str(sys.field.p),
        "m": str(sys.m),
        "a": str(sys.a),
        "b": str(sys.b),
    }
    for i in range(sys.m):
        out[f"g{i}"] = sys.g[i].to_string()
        out[f"h{i}"] = sys.h[i].to_string()
    return out


def canonical_spec_text(sys: TriangularSystem) -> str:
    """Canonical [system] section echoed by the validate command."""
    mapping = system_to_mapping(sys)
    lines = ["[system]"]
    lines += [f"{k}={mapping[k]}" for k in ("p", "m", "a", "b")]
    for i in range(sys.m):
        lines.append(f"g{i}={mapping[f'g{i}']}")
        lines.append(f"h{i}={mapping[f'h{i}']}")
    return "\n".join(lines) + "\n"
