"""
Hot inner loops, JIT-compiled with numba when available.

Every kernel exists twice: a pure-numpy version (always importable) and a
numba ``@njit`` version.  The public name is bound to the numba version
unless numba is missing or ``HOLOSEM_DISABLE_NUMBA`` is set to a truthy
value before import.  Both versions accumulate in the same order, so they
agree bit-for-bit on IEEE-754 hardware (numba is compiled without fastmath).

    HOLOSEM_DISABLE_NUMBA=1 pytest        # exercise the numpy fallback
"""

import os

import numpy as np

_FLAG = os.environ.get("HOLOSEM_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


# =============================================================================
# Direct circular convolution, O(n^2)
# =============================================================================

def circ_conv_direct_numpy(a, b):
    """c[k] = sum_j a[j] * b[(k - j) mod n], summed in ascending j."""
    n = a.shape[0]
    out = np.zeros(n, dtype=np.float64)
    for j in range(n):
        # np.roll(b, j)[k] == b[(k - j) mod n]
        out += a[j] * np.roll(b, j)
    return out


@njit(cache=True)
def _circ_conv_direct_jit(a, b):
    n = a.shape[0]
    out = np.zeros(n, dtype=np.float64)
    for j in range(n):
        aj = a[j]
        for k in range(n):
            idx = k - j
            if idx < 0:
                idx += n
            out[k] += aj * b[idx]
    return out


# =============================================================================
# Full contraction of an order-3 tensor, brute-force reference loop
# =============================================================================

def contract3_both_numpy(t, left, right):
    """s[j] = sum_{i,k} t[i,j,k] * left[i] * right[k], i-then-k order."""
    d1, d2, d3 = t.shape
    out = np.zeros(d2, dtype=np.float64)
    for i in range(d1):
        for k in range(d3):
            out += t[i, :, k] * (left[i] * right[k])
    return out


@njit(cache=True)
def _contract3_both_jit(t, left, right):
    d1, d2, d3 = t.shape
    out = np.zeros(d2, dtype=np.float64)
    for i in range(d1):
        for k in range(d3):
            w = left[i] * right[k]
            for j in range(d2):
                out[j] += t[i, j, k] * w
    return out


if USE_NUMBA:
    circ_conv_direct_numba = _circ_conv_direct_jit
    contract3_both_numba = _contract3_both_jit
    circ_conv_direct = _circ_conv_direct_jit
    contract3_both = _contract3_both_jit
    KERNEL_IMPL = "numba"
else:
    circ_conv_direct_numba = _circ_conv_direct_jit if NUMBA_AVAILABLE else None
    contract3_both_numba = _contract3_both_jit if NUMBA_AVAILABLE else None
    circ_conv_direct = circ_conv_direct_numpy
    contract3_both = contract3_both_numpy
    KERNEL_IMPL = "numpy"
