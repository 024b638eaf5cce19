"""Run a system numerically: state stepping mod p, the one-multiplication
fast path, streamed emission of the truncated vectors, and exact cycle
structure (preperiod and minimal period) via Brent's algorithm."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import ParseError, StepBudgetExceeded, WidthMismatch, WrongSystemKind
from .trisys import TriangularSystem

DEFAULT_STEP_BUDGET = 10**8

BINARY_MAGIC = b"TP"
_HEADER = struct.Struct("<2sQHI")  # magic, p, m, n -- 16 bytes


@dataclass(frozen=True)
class CycleInfo:
    """Orbit shape: w_{preperiod} is the first state on the cycle, period is
    the minimal cycle length."""

    preperiod: int
    period: int


def _check_state(sys: TriangularSystem, w: Sequence) -> tuple[int, ...]:
    if len(w) != sys.m + 1:
        raise WidthMismatch(f"state needs {sys.m + 1} components, got {len(w)}")
    p = sys.field.p
    return tuple(int(x) % p for x in w)


def step(sys: TriangularSystem, w: Sequence) -> tuple[int, ...]:
    """One application of the map: component i becomes f_i(w)."""
    w = _check_state(sys, w)
    return tuple(f._eval_int(w) for f in sys.f)


def fast_step(sys: TriangularSystem, w: Sequence) -> tuple[int, ...]:
    """Specialised step for fast systems: w'_i = w_i*w_{i+1} + c_i and an
    affine last component; one multiplication per component."""
    if not sys.is_fast:
        raise WrongSystemKind("system was not built with next-variable multipliers")
    w = _check_state(sys, w)
    p = sys.field.p
    consts = sys.fast_consts
    out = [
        (w[i] * w[i + 1] + consts[i]) % p
        for i in range(sys.m)
    ]
    out.append((sys.a * w[sys.m] + sys.b) % p)
    return tuple(out)


def stepper(sys: TriangularSystem) -> Callable[[tuple[int, ...]], tuple[int, ...]]:
    """Closure computing one step, using the fast form when available."""
    p = sys.field.p
    m = sys.m
    if sys.is_fast:
        consts = sys.fast_consts
        a, b = sys.a, sys.b

        def _fast(w):
            nxt = [(w[i] * w[i + 1] + consts[i]) % p for i in range(m)]
            nxt.append((a * w[m] + b) % p)
            return tuple(nxt)

        return _fast
    plans = sys.f

    def _generic(w):
        return tuple(f._eval_int(w) for f in plans)

    return _generic


def generate(sys: TriangularSystem, w0: Sequence, n: int,
             skip_last: bool = True) -> Iterator[tuple[int, ...]]:
    """Stream the first n emitted vectors from w0: the truncation
    (u_0..u_{m-1}) of each state, or full states when skip_last is False.
    Constant memory per step."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = _check_state(sys, w0)
    advance = stepper(sys)
    m = sys.m
    for _ in range(n):
        yield w[:m] if skip_last else w
        w = advance(w)


def generate_array(sys: TriangularSystem, w0: Sequence, n: int,
                   skip_last: bool = True) -> np.ndarray:
    """Same stream as generate, materialised as a uint64 array of shape
    (n, m) or (n, m+1). Fast systems run through the kernel backend."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = _check_state(sys, w0)
    if sys.is_fast:
        orbit = _kernels.fast_orbit(
            sys.field.p,
            np.asarray(sys.fast_consts, dtype=np.uint64),
            sys.a, sys.b,
            np.asarray(w, dtype=np.uint64),
            n,
        )
        return np.ascontiguousarray(orbit[:, : sys.m]) if skip_last else orbit
    rows = list(generate(sys, w, n, skip_last=skip_last))
    width = sys.m if skip_last else sys.m + 1
    return np.array(rows, dtype=np.uint64).reshape(n, width)


def brent_cycle(step_fn: Callable, w0, max_steps: int = DEFAULT_STEP_BUDGET) -> CycleInfo:
    """Brent's algorithm on an arbitrary deterministic map: finds the minimal
    period, then recovers the minimal preperiod with two cursors a period
    apart. Total map applications O(preperiod + period); the budget is
    enforced per power-of-two window, so a blown run stops within a constant
    factor of max_steps."""
    # Brent needs at most 4*max(preperiod, period) phase-1 steps, so orbits
    # inside the budget never trip the guard while runaways stop at O(budget)
    steps = 0
    power = 1
    period = 0
    hare = w0
    while not period:
        if steps + power > 4 * max_steps:
            raise StepBudgetExceeded(
                f"no cycle within {max_steps} steps (period >= budget)")
        tortoise = hare
        for i in range(power):
            hare = step_fn(hare)
            if hare == tortoise:
                period = i + 1
                break
        else:
            steps += power
            power <<= 1
    if period > max_steps:
        raise StepBudgetExceeded(f"no cycle within {max_steps} steps")
    tortoise = hare = w0
    for _ in range(period):
        hare = step_fn(hare)
    preperiod = 0
    while tortoise != hare:
        tortoise = step_fn(tortoise)
        hare = step_fn(hare)
        preperiod += 1
        if preperiod > max_steps:
            raise StepBudgetExceeded(f"no cycle within {max_steps} steps")
    return CycleInfo(preperiod=preperiod, period=period)


def find_cycle(sys: TriangularSystem, w0: Sequence,
               max_steps: int = DEFAULT_STEP_BUDGET) -> CycleInfo:
    """Minimal (preperiod, period) of the orbit of w0."""
    w = _check_state(sys, w0)
    if sys.is_fast:
        pre, per = _kernels.fast_cycle(
            sys.field.p,
            np.asarray(sys.fast_consts, dtype=np.uint64),
            sys.a, sys.b,
            np.asarray(w, dtype=np.uint64),
            max_steps,
        )
        if per < 0:
            raise StepBudgetExceeded(f"no cycle within {max_steps} steps (period >= budget)")
        return CycleInfo(preperiod=int(pre), period=int(per))
    return brent_cycle(stepper(sys), w, max_steps)


def advance_to_cycle(sys: TriangularSystem, w0: Sequence,
                     max_steps: int = DEFAULT_STEP_BUDGET) -> tuple[int, ...]:
    """First state on the cycle; from here the sequence is purely periodic,
    which is the hypothesis all the distribution bounds assume."""
    info = find_cycle(sys, w0, max_steps=max_steps)
    w = _check_state(sys, w0)
    advance = stepper(sys)
    for _ in range(info.preperiod):
        w = advance(w)
    return w


# ------------------------------------------------------------------ emission

def write_csv(fileobj, stream: Iterable[Sequence[int]], m: int) -> int:
    """Rows n,u0..u{m-1} (decimal residues). Returns the row count."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(["n"] + [f"u{i}" for i in range(m)])
    count = 0
    for n, row in enumerate(stream):
        writer.writerow([n] + [int(x) for x in row])
        count += 1
    return count


def read_csv(fileobj) -> np.ndarray:
    """Inverse of write_csv: residue rows as a uint64 array (the n column
    is dropped)."""
    reader = csv.reader(fileobj)
    header = next(reader, None)
    if not header or header[0] != "n":
        raise ParseError("point CSV must start with a header row n,u0,...")
    rows = [[int(x) for x in row[1:]] for row in reader if row]
    if not rows:
        raise ParseError("point CSV holds no rows")
    return np.array(rows, dtype=np.uint64)


def write_binary(fileobj, u: np.ndarray, p: int) -> None:
    """16-byte header (magic, p, m, n) then little-endian 64-bit residues,
    row-major."""
    n, m = u.shape
    fileobj.write(_HEADER.pack(BINARY_MAGIC, p, m, n))
    fileobj.write(np.ascontiguousarray(u, dtype="<u8").tobytes())


def read_binary(fileobj) -> tuple[int, np.ndarray]:
    """Inverse of write_binary: returns (p, residue array of shape (n, m))."""
    raw = fileobj.read(_HEADER.size)
    magic, p, m, n = _HEADER.unpack(raw)
    if magic != BINARY_MAGIC:
        raise ParseError(f"bad magic {magic!r} in binary stream")
    data = np.frombuffer(fileobj.read(8 * n * m), dtype="<u8")
    return p, data.reshape(n, m).astype(np.uint64)
