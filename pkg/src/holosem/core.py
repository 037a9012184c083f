"""
Dense hypervector and tensor arithmetic.

Representations are plain float64 numpy arrays: a hypervector is 1-D, an
order-2 map (adjective, intransitive verb) is a 2-D ``(rows, cols)`` array and
a transitive verb is a 3-D ``(subject, sentence, object)`` array.  Nothing here
normalizes implicitly; callers decide when unit length matters.

Random pointers come from :func:`make_rng`, a numpy ``Generator`` over PCG64,
whose stream for a given seed is fixed by numpy's stability policy for
``standard_normal``.
"""

import numpy as np

from . import _kernels
from .errors import DimensionError, InvalidDimensionError, UndefinedSimilarityError

__all__ = [
    "make_rng",
    "derive_rng",
    "as_vector",
    "random_unit",
    "normalize",
    "cosine",
    "circ_conv",
    "circ_conv_naive",
    "circ_conv_fft",
    "involution",
    "circ_corr",
    "outer",
    "matvec",
    "contract3",
    "impulse",
]


def make_rng(seed):
    """Return an independent PCG64 generator for a 64-bit unsigned seed."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def derive_rng(seed, *keys):
    """Generator for a sub-stream identified by ``(seed, *keys)``.

    Used to give every (dim, trial) cell of an experiment its own stream, so
    results do not depend on the order or concurrency in which cells run.
    """
    ss = np.random.SeedSequence([int(seed)] + [int(k) for k in keys])
    return np.random.Generator(np.random.PCG64(ss))


def as_vector(x, name="vector"):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    if v.shape[0] == 0:
        raise InvalidDimensionError(f"{name} has dimension 0")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite coordinates")
    return v


def _same_dim(a, b, what):
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"{what}: dimension mismatch {a.shape[0]} != {b.shape[0]}")


def impulse(dim, index=0):
    """Unit impulse, the identity element of circular convolution at index 0."""
    v = np.zeros(int(dim))
    v[index] = 1.0
    return v


def random_unit(dim, rng):
    """Random pointer: i.i.d. N(0, 1/dim) coordinates, then L2-normalized.

    Two independent draws have cosine with mean 0 and standard deviation
    close to ``1/sqrt(dim)``.

    Raises
    ------
    InvalidDimensionError
        If ``dim`` is not a positive integer.
    """
    if isinstance(dim, bool) or int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    v = rng.standard_normal(dim) / np.sqrt(dim)
    n = np.linalg.norm(v)
    # probability zero for dim >= 1, but keep the invariant honest
    while n == 0.0:
        v = rng.standard_normal(dim) / np.sqrt(dim)
        n = np.linalg.norm(v)
    return v / n


def normalize(v):
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise UndefinedSimilarityError("cannot normalize a zero vector")
    return v / n


def cosine(a, b):
    """Cosine similarity of two vectors (or equally shaped arrays, flattened).

    Raises
    ------
    DimensionError
        Shapes differ.
    UndefinedSimilarityError
        Either input is the zero vector.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    _same_dim(a, b, "cosine")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine is undefined for a zero vector")
    c = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, c))


def circ_conv_naive(a, b):
    """Direct O(n^2) circular convolution ``c_k = sum_j a_j b_{(k-j) mod n}``."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    _same_dim(a, b, "circ_conv_naive")
    return _kernels.circ_conv_direct(np.ascontiguousarray(a), np.ascontiguousarray(b))


def circ_conv_fft(a, b):
    """Circular convolution through the real FFT; any length is supported."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    _same_dim(a, b, "circ_conv_fft")
    n = a.shape[0]
    return np.fft.irfft(np.fft.rfft(a) * np.fft.rfft(b), n=n)


circ_conv = circ_conv_fft


def involution(a):
    """Index reversal ``a*_i = a_{(-i) mod n}``, the approximate convolution inverse."""
    a = np.asarray(a, dtype=np.float64)
    return np.concatenate((a[:1], a[:0:-1]))


def circ_corr(trace, cue):
    """Circular correlation, defined as ``circ_conv(trace, involution(cue))``.

    With this operand order ``circ_corr(circ_conv(a, b), b)`` approximates
    ``a`` for random unit vectors, and a unit impulse cue returns ``trace``.
    """
    trace = as_vector(trace, "trace")
    cue = as_vector(cue, "cue")
    _same_dim(trace, cue, "circ_corr")
    return circ_conv_fft(trace, involution(cue))


def outer(a, b):
    """``M[i, j] = a[i] * b[j]``."""
    return np.outer(as_vector(a, "a"), as_vector(b, "b"))


def matvec(m, v):
    m = np.asarray(m, dtype=np.float64)
    v = as_vector(v, "v")
    if m.ndim != 2:
        raise DimensionError(f"matvec expects a 2-D matrix, got shape {m.shape}")
    if m.shape[1] != v.shape[0]:
        raise DimensionError(f"matvec: matrix has {m.shape[1]} columns, vector has dim {v.shape[0]}")
    return m @ v


def contract3(t, left=None, right=None):
    """Contract an order-3 tensor on its first and/or last index.

    Parameters
    ----------
    t : ndarray, shape (d1, d2, d3)
    left : ndarray, shape (d1,), optional
        Contracted against index 1 (the subject slot for transitive verbs).
    right : ndarray, shape (d3,), optional
        Contracted against index 3 (the object slot).

    Returns
    -------
    ndarray
        ``(d2,)`` if both are given, else ``(d2, d3)`` or ``(d1, d2)``.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise DimensionError(f"contract3 expects an order-3 tensor, got shape {t.shape}")
    if left is None and right is None:
        raise ValueError("contract3 needs at least one of left/right")
    if left is not None:
        left = as_vector(left, "left")
        if left.shape[0] != t.shape[0]:
            raise DimensionError(f"left has dim {left.shape[0]}, tensor index 1 has {t.shape[0]}")
    if right is not None:
        right = as_vector(right, "right")
        if right.shape[0] != t.shape[2]:
            raise DimensionError(f"right has dim {right.shape[0]}, tensor index 3 has {t.shape[2]}")
    if left is not None and right is not None:
        return _kernels.contract3_both(np.ascontiguousarray(t), left, right)
    if left is not None:
        return np.tensordot(left, t, axes=(0, 0))
    return np.tensordot(t, right, axes=(2, 0))
