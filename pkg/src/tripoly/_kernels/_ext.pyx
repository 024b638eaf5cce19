# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: sequential orbit stepping, character-sum accumulation,
and sparse polynomial term combination on packed exponent keys.

Same contracts as _purepy; moduli up to 2**62 are handled through an exact
128-bit intermediate."""

from libc.math cimport cos, fabs, sin
from libc.stdlib cimport free, malloc

import numpy as np

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

ctypedef unsigned long long u64
ctypedef long long i64

cdef double TWO_PI = 6.283185307179586476925287

cdef u64 EMPTY = <u64>0xFFFFFFFFFFFFFFFFULL
cdef u64 GOLD = <u64>0x9E3779B97F4A7C15ULL


cdef inline u64 mulmod(u64 x, u64 y, u64 p) noexcept nogil:
    return <u64>((<u128>x * <u128>y) % <u128>p)


cdef inline u64 addmod(u64 x, u64 y, u64 p) noexcept nogil:
    cdef u64 s = x + y
    if s >= p:
        s -= p
    return s


# ---------------------------------------------------------------- sparse mul

cdef struct HashTab:
    u64* keys
    u64* vals
    Py_ssize_t cap
    Py_ssize_t used
    int shift


cdef int _tab_init(HashTab* t, Py_ssize_t cap) noexcept nogil:
    cdef Py_ssize_t i
    t.keys = <u64*>malloc(cap * sizeof(u64))
    t.vals = <u64*>malloc(cap * sizeof(u64))
    if t.keys == NULL or t.vals == NULL:
        if t.keys != NULL:
            free(t.keys)
        if t.vals != NULL:
            free(t.vals)
        return -1
    for i in range(cap):
        t.keys[i] = EMPTY
    t.cap = cap
    t.used = 0
    t.shift = 64
    while (<Py_ssize_t>1 << (64 - t.shift)) < cap:
        t.shift -= 1
    return 0


cdef void _tab_free(HashTab* t) noexcept nogil:
    if t.keys != NULL:
        free(t.keys)
    if t.vals != NULL:
        free(t.vals)
    t.keys = NULL
    t.vals = NULL


cdef int _tab_grow(HashTab* t) noexcept nogil:
    cdef HashTab big
    cdef Py_ssize_t i, idx
    cdef u64 key
    if _tab_init(&big, t.cap * 2) != 0:
        return -1
    for i in range(t.cap):
        key = t.keys[i]
        if key != EMPTY:
            idx = <Py_ssize_t>((key * GOLD) >> big.shift)
            while big.keys[idx] != EMPTY:
                idx += 1
                if idx == big.cap:
                    idx = 0
            big.keys[idx] = key
            big.vals[idx] = t.vals[i]
    big.used = t.used
    _tab_free(t)
    t[0] = big
    return 0


cdef inline int _tab_add(HashTab* t, u64 key, u64 val, u64 p) noexcept nogil:
    cdef Py_ssize_t idx = <Py_ssize_t>((key * GOLD) >> t.shift)
    while True:
        if t.keys[idx] == EMPTY:
            t.keys[idx] = key
            t.vals[idx] = val
            t.used += 1
            if t.used * 8 >= t.cap * 5:
                return _tab_grow(t)
            return 0
        if t.keys[idx] == key:
            t.vals[idx] = addmod(t.vals[idx], val, p)
            return 0
        idx += 1
        if idx == t.cap:
            idx = 0


def mul_packed(k1o, v1o, k2o, v2o, p_in, shifts, mask):
    """Sparse polynomial product on packed exponent keys (see _purepy)."""
    cdef u64[::1] k1 = np.ascontiguousarray(k1o, dtype=np.uint64)
    cdef u64[::1] v1 = np.ascontiguousarray(v1o, dtype=np.uint64)
    cdef u64[::1] k2 = np.ascontiguousarray(k2o, dtype=np.uint64)
    cdef u64[::1] v2 = np.ascontiguousarray(v2o, dtype=np.uint64)
    cdef u64 p = p_in
    cdef Py_ssize_t n1 = k1.shape[0], n2 = k2.shape[0]
    if n1 == 0 or n2 == 0:
        return np.empty(0, np.uint64), np.empty(0, np.uint64)
    cdef Py_ssize_t cap = 16
    while cap < 2 * (n1 + n2):
        cap *= 2
    cdef HashTab t
    if _tab_init(&t, cap) != 0:
        raise MemoryError
    cdef Py_ssize_t i, j, out_n
    cdef u64 ka, va
    cdef int err = 0
    with nogil:
        for i in range(n1):
            ka = k1[i]
            va = v1[i]
            for j in range(n2):
                if _tab_add(&t, ka + k2[j], mulmod(va, v2[j], p), p) != 0:
                    err = 1
                    break
            if err:
                break
    if err:
        _tab_free(&t)
        raise MemoryError
    out_n = 0
    for i in range(t.cap):
        if t.keys[i] != EMPTY and t.vals[i] != 0:
            out_n += 1
    keys_out = np.empty(out_n, np.uint64)
    vals_out = np.empty(out_n, np.uint64)
    cdef u64[::1] ko = keys_out
    cdef u64[::1] vo = vals_out
    j = 0
    for i in range(t.cap):
        if t.keys[i] != EMPTY and t.vals[i] != 0:
            ko[j] = t.keys[i]
            vo[j] = t.vals[i]
            j += 1
    _tab_free(&t)
    return keys_out, vals_out


# ------------------------------------------------------------------- orbits

def fast_orbit(p_in, consts_o, a_in, b_in, w0_o, n_in):
    """n successive states of the fast map; uint64 array (n, m+1)."""
    cdef u64 p = p_in, a = a_in, b = b_in
    cdef Py_ssize_t n = n_in
    cdef u64[::1] consts = np.ascontiguousarray(consts_o, dtype=np.uint64)
    cdef u64[::1] w0 = np.ascontiguousarray(w0_o, dtype=np.uint64)
    cdef Py_ssize_t m = consts.shape[0]
    out = np.empty((n, m + 1), dtype=np.uint64)
    cdef u64[:, ::1] o = out
    cdef u64* w = <u64*>malloc((m + 1) * sizeof(u64))
    if w == NULL:
        raise MemoryError
    cdef Py_ssize_t r, i
    for i in range(m + 1):
        w[i] = w0[i]
    with nogil:
        for r in range(n):
            for i in range(m + 1):
                o[r, i] = w[i]
            for i in range(m):
                w[i] = addmod(mulmod(w[i], w[i + 1], p), consts[i], p)
            w[m] = addmod(mulmod(a, w[m], p), b, p)
    free(w)
    return out


cdef inline void _fstep(u64* w, u64 p, u64* consts, Py_ssize_t m, u64 a, u64 b) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(m):
        w[i] = addmod(mulmod(w[i], w[i + 1], p), consts[i], p)
    w[m] = addmod(mulmod(a, w[m], p), b, p)


cdef inline bint _same(u64* x, u64* y, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(k):
        if x[i] != y[i]:
            return 0
    return 1


def fast_cycle(p_in, consts_o, a_in, b_in, w0_o, max_steps_in):
    """Brent cycle detection for the fast map; (-1, -1) on budget blow."""
    cdef u64 p = p_in, a = a_in, b = b_in
    cdef u64 max_steps = max_steps_in
    cdef u64[::1] cv = np.ascontiguousarray(consts_o, dtype=np.uint64)
    cdef u64[::1] w0 = np.ascontiguousarray(w0_o, dtype=np.uint64)
    cdef Py_ssize_t m = cv.shape[0], i
    cdef Py_ssize_t k = m + 1
    cdef u64* buf = <u64*>malloc(3 * k * sizeof(u64))
    if buf == NULL:
        raise MemoryError
    cdef u64* consts = <u64*>malloc(m * sizeof(u64)) if m > 0 else NULL
    if m > 0 and consts == NULL:
        free(buf)
        raise MemoryError
    for i in range(m):
        consts[i] = cv[i]
    cdef u64* tort = buf
    cdef u64* hare = buf + k
    cdef u64* start = buf + 2 * k
    for i in range(k):
        tort[i] = w0[i]
        hare[i] = w0[i]
        start[i] = w0[i]
    cdef u64 steps = 0, power = 1, lam = 1, period = 0, pre = 0
    cdef int blown = 0
    with nogil:
        _fstep(hare, p, consts, m, a, b)
        steps += 1
        while not _same(tort, hare, k):
            if power == lam:
                for i in range(k):
                    tort[i] = hare[i]
                power <<= 1
                lam = 0
            _fstep(hare, p, consts, m, a, b)
            lam += 1
            steps += 1
            if steps > max_steps:
                blown = 1
                break
        if not blown:
            period = lam
            for i in range(k):
                tort[i] = start[i]
                hare[i] = start[i]
            for lam in range(period):
                _fstep(hare, p, consts, m, a, b)
                steps += 1
                if steps > max_steps:
                    blown = 1
                    break
        if not blown:
            while not _same(tort, hare, k):
                _fstep(tort, p, consts, m, a, b)
                _fstep(hare, p, consts, m, a, b)
                pre += 1
                steps += 2
                if steps > max_steps:
                    blown = 1
                    break
    free(buf)
    if consts != NULL:
        free(consts)
    if blown:
        return (-1, -1)
    return (int(pre), int(period))


# ------------------------------------------------------------ character sums

def exp_sum_stream(uo, co, p_in):
    """Compensated (Neumaier) streaming character sum over rows of u."""
    cdef u64 p = p_in
    cdef u64[:, ::1] u = np.ascontiguousarray(uo, dtype=np.uint64)
    cdef u64[::1] c = np.ascontiguousarray(co, dtype=np.uint64)
    cdef Py_ssize_t n = u.shape[0], m = u.shape[1], r, j
    cdef double scale = TWO_PI / <double>p
    cdef double sre = 0.0, cre = 0.0, sim = 0.0, cim = 0.0
    cdef double x, tacc, ang
    cdef u64 lin
    with nogil:
        for r in range(n):
            lin = 0
            for j in range(m):
                lin = addmod(lin, mulmod(c[j], u[r, j], p), p)
            ang = <double>lin * scale
            x = cos(ang)
            tacc = sre + x
            if fabs(sre) >= fabs(x):
                cre += (sre - tacc) + x
            else:
                cre += (x - tacc) + sre
            sre = tacc
            x = sin(ang)
            tacc = sim + x
            if fabs(sim) >= fabs(x):
                cim += (sim - tacc) + x
            else:
                cim += (x - tacc) + sim
            sim = tacc
    return complex(sre + cre, sim + cim)


def residue_hist(uo, co, p_in):
    """Counts of the linear-form residue, as an int64 array of length p."""
    cdef u64 p = p_in
    cdef u64[:, ::1] u = np.ascontiguousarray(uo, dtype=np.uint64)
    cdef u64[::1] c = np.ascontiguousarray(co, dtype=np.uint64)
    counts = np.zeros(<Py_ssize_t>p, dtype=np.int64)
    cdef i64[::1] h = counts
    cdef Py_ssize_t n = u.shape[0], m = u.shape[1], r, j
    cdef u64 lin
    with nogil:
        for r in range(n):
            lin = 0
            for j in range(m):
                lin = addmod(lin, mulmod(c[j], u[r, j], p), p)
            h[<Py_ssize_t>lin] += 1
    return counts
