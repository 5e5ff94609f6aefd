"""Counter-based random numbers (Philox4x32-10).

Every random word used by the simulator is a pure function of
``(seed, step, index, stream)``. Sites can therefore be evaluated in any
order, on any number of threads, and produce identical output.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

TWO32 = 1 << 32

# stream tags, placed in the fourth counter word
STREAM_SITE = 0
STREAM_RELOCATE = 1
STREAM_PARTITION = 2
STREAM_INIT = 3


@nb.njit(cache=True, inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32 with 10 rounds. All arguments are uint64 holding 32-bit values."""
    for r in range(10):
        if r > 0:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _S32
        lo0 = p0 & _MASK
        hi1 = p1 >> _S32
        lo1 = p1 & _MASK
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@nb.njit(cache=True, inline="always")
def draw(k0, k1, step, index, stream):
    """Four 32-bit words for ``(step, index, stream)`` under key ``(k0, k1)``.

    ``step`` and ``index`` may be up to 32 bits each; ``stream`` is a small tag.
    """
    return philox4x32(np.uint64(index) & _MASK, np.uint64(step) & _MASK,
                      (np.uint64(step) >> _S32) & _MASK, np.uint64(stream) & _MASK,
                      k0, k1)


@nb.njit(cache=True, inline="always")
def bounded(word, n):
    """Map a 32-bit word to ``{0, ..., n-1}`` by multiply-shift (``n < 2**32``)."""
    return np.int64((word * np.uint64(n)) >> _S32)


def split_seed(seed: int) -> tuple[np.uint64, np.uint64]:
    """Split a seed into the two 32-bit key words Philox expects."""
    seed = int(seed)
    if seed < 0 or seed >= 1 << 64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32)


def probability_threshold(p: float) -> np.uint64:
    """Integer threshold ``t`` such that ``word < t`` has probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return np.uint64(int(round(p * TWO32)))


@nb.njit(cache=True)
def _block(k0, k1, step, n, stream):
    out = np.empty((n, 4), dtype=np.uint32)
    for i in range(n):
        w0, w1, w2, w3 = draw(k0, k1, step, i, stream)
        out[i, 0] = w0
        out[i, 1] = w1
        out[i, 2] = w2
        out[i, 3] = w3
    return out


def words(seed: int, step: int, n: int, stream: int = STREAM_SITE) -> np.ndarray:
    """``(n, 4)`` uint32 array of the words for indices ``0..n-1``."""
    k0, k1 = split_seed(seed)
    return _block(k0, k1, np.uint64(step), n, np.uint64(stream))


def uniforms(seed: int, step: int, n: int, stream: int = STREAM_SITE) -> np.ndarray:
    """``(n, 4)`` floats in ``[0, 1)`` derived from :func:`words`."""
    return words(seed, step, n, stream).astype(np.float64) / TWO32
