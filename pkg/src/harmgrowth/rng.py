"""Counter-based uniforms: Philox4x32-10 evaluated on arrays of counters.

numpy ships Philox as a sequential bit generator; walk-on-spheres needs the
block function itself so every (seed, path, step) triple maps to its own
random numbers regardless of how paths are batched.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)


def philox4x32(counter, key, rounds=10):
    """Philox4x32 block function.

    ``counter`` is a sequence of four uint32 arrays (broadcastable), ``key``
    a pair of uint32 scalars or arrays.  Returns four uint32 arrays.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint32) for c in counter)
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    k0 = np.asarray(key[0], dtype=np.uint32)
    k1 = np.asarray(key[1], dtype=np.uint32)
    with np.errstate(over="ignore"):
        for r in range(rounds):
            p0 = _M0 * c0.astype(np.uint64)
            p1 = _M1 * c2.astype(np.uint64)
            hi0 = (p0 >> _SHIFT32).astype(np.uint32)
            lo0 = (p0 & _MASK32).astype(np.uint32)
            hi1 = (p1 >> _SHIFT32).astype(np.uint32)
            lo1 = (p1 & _MASK32).astype(np.uint32)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
            if r < rounds - 1:
                k0 = k0 + _W0
                k1 = k1 + _W1
    return c0, c1, c2, c3


def _to_unit(hi, lo):
    # 53-bit double in [0, 1) from two 32-bit words.
    v = (hi.astype(np.uint64) << _SHIFT32) | lo.astype(np.uint64)
    return (v >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def uniform_pair(seed: int, path, step):
    """Two independent U[0,1) arrays for the given path indices at ``step``.

    The Philox key is the 64-bit seed; the counter is (step, 0, path_lo, path_hi).
    """
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    key = (np.uint32(seed & 0xFFFFFFFF), np.uint32(seed >> 32))
    path = np.asarray(path, dtype=np.uint64)
    step = np.asarray(step, dtype=np.uint64)
    ctr = (
        (step & _MASK32).astype(np.uint32),
        (step >> _SHIFT32).astype(np.uint32),
        (path & _MASK32).astype(np.uint32),
        (path >> _SHIFT32).astype(np.uint32),
    )
    w0, w1, w2, w3 = philox4x32(ctr, key)
    return _to_unit(w0, w1), _to_unit(w2, w3)
