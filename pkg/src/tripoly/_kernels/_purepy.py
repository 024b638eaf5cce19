"""Pure-Python kernels: reference implementations of the hot loops.

Selected automatically when the compiled extension is unavailable (or when
TRIPOLY_PURE is set). Results are bit-identical to the extension for integer
outputs; floating sums agree within compensated-summation error. numpy is
used where it keeps exact integer semantics; anything that could overflow
a 64-bit lane falls back to Python ints.
"""

from __future__ import annotations

import math

import numpy as np

_U64 = np.uint64
_NP_SAFE_P = 1 << 31  # products of two residues stay below 2**62
_DENSE_CAP = 1 << 24  # dense accumulator entries for the scatter-add path


def _unpack(keys, shifts, mask):
    """(n,) packed keys -> (n, nvars) exponent matrix."""
    cols = [(keys >> _U64(s)) & _U64(mask) for s in shifts]
    return np.stack(cols, axis=1)


def _mul_dict(k1, v1, k2, v2, p):
    """Exact fallback on Python ints; handles any modulus."""
    acc = {}
    items2 = list(zip(k2.tolist(), v2.tolist()))
    for ka, va in zip(k1.tolist(), v1.tolist()):
        for kb, vb in items2:
            key = ka + kb
            cur = acc.get(key)
            prod = va * vb % p
            if cur is None:
                acc[key] = prod
            else:
                cur = (cur + prod) % p
                if cur:
                    acc[key] = cur
                else:
                    del acc[key]
    if not acc:
        return np.empty(0, _U64), np.empty(0, _U64)
    keys = np.fromiter(acc.keys(), dtype=_U64, count=len(acc))
    vals = np.fromiter(acc.values(), dtype=_U64, count=len(acc))
    return keys, vals


def _mul_dense(k1, v1, k2, v2, p, shifts, mask):
    # Mixed-radix scatter-add: exact because every product is reduced mod p
    # before accumulation and bin sums stay far below 2**63.
    e1 = _unpack(k1, shifts, mask)
    e2 = _unpack(k2, shifts, mask)
    bounds = e1.max(axis=0) + e2.max(axis=0) + _U64(1)
    radix = np.cumprod(np.concatenate(([_U64(1)], bounds[::-1][:-1])))[::-1]
    idx1 = (e1 * radix).sum(axis=1)
    idx2 = (e2 * radix).sum(axis=1)
    size = int(np.prod(bounds.astype(object)))
    dense = np.zeros(size, dtype=np.int64)
    if len(k1) < len(k2):
        k1, k2 = k2, k1
        idx1, idx2 = idx2, idx1
        v1, v2 = v2, v1
    idx1 = idx1.astype(np.int64)
    for j in range(len(k2)):
        np.add.at(dense, idx1 + int(idx2[j]), (v1 * v2[j] % _U64(p)).astype(np.int64))
    dense %= p
    flat = np.nonzero(dense)[0].astype(np.uint64)
    vals = dense[flat.astype(np.int64)].astype(_U64)
    # decode mixed radix back into packed bit fields
    keys = np.zeros(len(flat), dtype=_U64)
    rem = flat
    for s, r in zip(shifts, radix):
        q = rem // r
        keys |= q << _U64(s)
        rem = rem - q * r
    return keys, vals


def _mul_sorted(k1, v1, k2, v2, p):
    # Chunked outer products combined by sorting; exact for p < 2**31.
    chunk = max(1, (1 << 22) // max(1, len(k2)))
    acc_k = np.empty(0, _U64)
    acc_v = np.empty(0, np.int64)
    for lo in range(0, len(k1), chunk):
        hi = min(lo + chunk, len(k1))
        kk = (k1[lo:hi, None] + k2[None, :]).ravel()
        vv = ((v1[lo:hi, None] * v2[None, :]) % _U64(p)).ravel().astype(np.int64)
        kk = np.concatenate([acc_k, kk])
        vv = np.concatenate([acc_v, vv])
        uk, inv = np.unique(kk, return_inverse=True)
        sums = np.zeros(len(uk), dtype=np.int64)
        np.add.at(sums, inv, vv)
        sums %= p
        keep = sums != 0
        acc_k, acc_v = uk[keep], sums[keep]
    return acc_k, acc_v.astype(_U64)


def mul_packed(k1, v1, k2, v2, p, shifts, mask):
    """Sparse polynomial product on packed exponent keys.

    Keys are disjoint bit fields (the caller guarantees field sums cannot
    carry), so a pairwise key addition is exponent-vector addition.
    Returns unsorted (keys, coefficients mod p) with zeros dropped.
    """
    if len(k1) == 0 or len(k2) == 0:
        return np.empty(0, _U64), np.empty(0, _U64)
    pairs = len(k1) * len(k2)
    if p >= _NP_SAFE_P or pairs <= 1 << 12:
        return _mul_dict(k1, v1, k2, v2, p)
    e1 = _unpack(k1, shifts, mask)
    e2 = _unpack(k2, shifts, mask)
    size = int(np.prod((e1.max(axis=0) + e2.max(axis=0) + _U64(1)).astype(object)))
    if size <= _DENSE_CAP:
        return _mul_dense(k1, v1, k2, v2, p, shifts, mask)
    return _mul_sorted(k1, v1, k2, v2, p)


def add_packed(k1, v1, k2, v2, p):
    """Sum of two packed polynomials; zeros dropped, order unspecified."""
    if len(k1) == 0:
        return k2.copy(), v2.copy()
    if len(k2) == 0:
        return k1.copy(), v1.copy()
    kk = np.concatenate([k1, k2])
    uk, inv = np.unique(kk, return_inverse=True)
    sums = np.zeros(len(uk), dtype=object) if p >= 1 << 62 else np.zeros(len(uk), dtype=np.uint64)
    np.add.at(sums, inv, np.concatenate([v1, v2]))
    sums = sums % p
    keep = sums != 0
    return uk[keep], sums[keep].astype(_U64)


def fast_orbit(p, consts, a, b, w0, n):
    """n successive states of the one-multiplication-per-component map,
    starting at w0. Returns a uint64 array of shape (n, m+1)."""
    m = len(consts)
    consts = [int(c) for c in consts]
    a = int(a)
    b = int(b)
    w = [int(x) for x in w0]
    rows = []
    append = rows.append
    for _ in range(n):
        append(tuple(w))
        for i in range(m):
            w[i] = (w[i] * w[i + 1] + consts[i]) % p
        w[m] = (a * w[m] + b) % p
    return np.array(rows, dtype=_U64).reshape(n, m + 1)


def _fast_step_tuple(w, p, consts, a, b, m):
    nxt = list(w)
    for i in range(m):
        nxt[i] = (w[i] * w[i + 1] + consts[i]) % p
    nxt[m] = (a * w[m] + b) % p
    return tuple(nxt)


def fast_cycle(p, consts, a, b, w0, max_steps):
    """Brent cycle detection specialised to the fast map.

    Returns (preperiod, period), or (-1, -1) once max_steps map
    applications have been spent without closing the orbit.
    """
    m = len(consts)
    consts = [int(c) for c in consts]
    a = int(a)
    b = int(b)
    w0 = tuple(int(x) for x in w0)

    def step(w):
        return _fast_step_tuple(w, p, consts, a, b, m)

    steps = 0
    power = lam = 1
    tortoise = w0
    hare = step(w0)
    steps += 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power <<= 1
            lam = 0
        hare = step(hare)
        lam += 1
        steps += 1
        if steps > max_steps:
            return (-1, -1)
    period = lam
    tortoise = hare = w0
    for _ in range(period):
        hare = step(hare)
        steps += 1
        if steps > max_steps:
            return (-1, -1)
    preperiod = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        preperiod += 1
        steps += 2
        if steps > max_steps:
            return (-1, -1)
    return (preperiod, period)


def _linear_form(u, coeffs, p):
    """Residues (u @ coeffs) mod p, exactly."""
    if p < _NP_SAFE_P:
        t = (u * coeffs[None, :]) % _U64(p)
        return t.sum(axis=1) % _U64(p)
    cs = [int(c) for c in coeffs]
    out = np.empty(len(u), dtype=_U64)
    for i, row in enumerate(u.tolist()):
        out[i] = sum(c * x for c, x in zip(cs, row)) % p
    return out


def exp_sum_stream(u, coeffs, p):
    """Compensated streaming character sum over the rows of u."""
    t = _linear_form(u, coeffs, p)
    ang = t.astype(np.float64) * (2.0 * math.pi / p)
    return complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))


def residue_hist(u, coeffs, p):
    """Counts of the linear-form residue, as an int64 array of length p."""
    t = _linear_form(u, coeffs, p)
    return np.bincount(t.astype(np.int64), minlength=p)
