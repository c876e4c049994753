"""Hot inner loops: word expansion, factor counting and power iteration.

Each kernel exists twice, as a numba ``@njit`` function and as a pure numpy
function with the same signature.  The public names at the bottom of the
module are bound to the numba versions unless numba is missing or the
environment variable ``SADIC_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``.  Both paths return identical results (exact integer
arithmetic for the combinatorial kernels).
"""
import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

_flag = os.environ.get("SADIC_DISABLE_NUMBA", "")
NUMBA_AVAILABLE = nb is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and _flag in ("", "0")

LETTER_DTYPE = np.int32


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------

def expand_numpy(word, starts, lengths, flat):
    """Concatenate ``flat[starts[x]:starts[x]+lengths[x]]`` over letters x of word."""
    if word.size == 0:
        return np.empty(0, dtype=LETTER_DTYPE)
    seg_len = lengths[word]
    total = int(seg_len.sum())
    # position inside the output -> (segment, offset) via cumulative sums
    seg_start_out = np.cumsum(seg_len) - seg_len
    offsets = np.arange(total, dtype=np.int64) - np.repeat(seg_start_out, seg_len)
    src = np.repeat(starts[word], seg_len) + offsets
    return flat[src].astype(LETTER_DTYPE, copy=False)


def count_pattern_numpy(text, pattern):
    n, k = text.size, pattern.size
    if k == 0 or k > n:
        return 0
    m = n - k + 1
    mask = text[:m] == pattern[0]
    for i in range(1, k):
        mask &= text[i:i + m] == pattern[i]
    return int(np.count_nonzero(mask))


def factor_histogram_numpy(text, length, base):
    """Histogram of base-``base`` codes of all length-``length`` factors."""
    n = text.size
    out = np.zeros(base ** length, dtype=np.int64)
    if n < length:
        return out
    m = n - length + 1
    codes = np.zeros(m, dtype=np.int64)
    for i in range(length):
        codes = codes * base + text[i:i + m]
    out += np.bincount(codes, minlength=base ** length)
    return out


def power_iteration_numpy(B, tol, maxiter):
    """Power iteration from the all-ones vector; returns (lambda, v, iterations)."""
    n = B.shape[0]
    v = np.ones(n) / n
    lam = 0.0
    for it in range(1, maxiter + 1):
        w = B @ v
        s = w.sum()
        if s <= 0.0:
            return 0.0, v, it
        w = w / s
        lam = s
        if np.max(np.abs(B @ w - lam * w)) <= tol * np.max(np.abs(w)):
            return lam, w, it
        v = w
    return lam, v, -1


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @nb.njit(cache=True, nogil=True)
    def expand_numba(word, starts, lengths, flat):
        total = 0
        for i in range(word.size):
            total += lengths[word[i]]
        out = np.empty(total, dtype=np.int32)
        pos = 0
        for i in range(word.size):
            x = word[i]
            s = starts[x]
            for j in range(lengths[x]):
                out[pos] = flat[s + j]
                pos += 1
        return out

    @nb.njit(cache=True, nogil=True)
    def count_pattern_numba(text, pattern):
        n = text.size
        k = pattern.size
        if k == 0 or k > n:
            return 0
        count = 0
        for p in range(n - k + 1):
            ok = True
            for i in range(k):
                if text[p + i] != pattern[i]:
                    ok = False
                    break
            if ok:
                count += 1
        return count

    @nb.njit(cache=True, nogil=True)
    def factor_histogram_numba(text, length, base):
        size = 1
        for _ in range(length):
            size *= base
        out = np.zeros(size, dtype=np.int64)
        n = text.size
        if n < length:
            return out
        top = size // base
        code = 0
        for i in range(length - 1):
            code = code * base + text[i]
        for p in range(length - 1, n):
            code = (code % top) * base + text[p]
            out[code] += 1
        return out

    @nb.njit(cache=True, nogil=True)
    def power_iteration_numba(B, tol, maxiter):
        n = B.shape[0]
        v = np.ones(n) / n
        lam = 0.0
        for it in range(1, maxiter + 1):
            w = B @ v
            s = w.sum()
            if s <= 0.0:
                return 0.0, v, it
            w = w / s
            lam = s
            r = B @ w - lam * w
            if np.max(np.abs(r)) <= tol * np.max(np.abs(w)):
                return lam, w, it
            v = w
        return lam, v, -1

else:  # pragma: no cover
    expand_numba = expand_numpy
    count_pattern_numba = count_pattern_numpy
    factor_histogram_numba = factor_histogram_numpy
    power_iteration_numba = power_iteration_numpy


if NUMBA_ENABLED:
    expand = expand_numba
    count_pattern = count_pattern_numba
    factor_histogram = factor_histogram_numba
    power_iteration = power_iteration_numba
else:
    expand = expand_numpy
    count_pattern = count_pattern_numpy
    factor_histogram = factor_histogram_numpy
    power_iteration = power_iteration_numpy


def as_letters(word):
    return np.ascontiguousarray(np.asarray(word, dtype=LETTER_DTYPE).reshape(-1))
