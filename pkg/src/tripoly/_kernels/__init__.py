"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python module provides the same functions. Set TRIPOLY_PURE=1 to force
the fallback (useful for the backend benchmark and for debugging).
"""

import os

from . import _purepy

if os.environ.get("TRIPOLY_PURE"):
    _impl = _purepy
    HAVE_EXT = False
else:
    try:
        from . import _ext as _impl  # type: ignore[attr-defined]

        HAVE_EXT = True
    except ImportError:
        _impl = _purepy
        HAVE_EXT = False

BACKEND = "ext" if HAVE_EXT else "purepy"

mul_packed = _impl.mul_packed
fast_orbit = _impl.fast_orbit
fast_cycle = _impl.fast_cycle
exp_sum_stream = _impl.exp_sum_stream
residue_hist = _impl.residue_hist
add_packed = _purepy.add_packed  # cheap enough that one implementation serves
# the numpy scatter-add product outruns the hash table when the result's
# monomial box is small; callers route per shape
mul_packed_scatter = _purepy.mul_packed
