"""
Monte-Carlo and timing studies behind the command-line tool.

- :func:`run_capacity`: HRR crosstalk as a function of dimension and the
  number of bound pairs.
- :func:`run_bench`: direct vs FFT circular convolution timings, with a
  result-agreement gate before anything is timed.
- :func:`run_demo_sentence`: the *Junpa loves Jen* role-filler sentence
  unbound role by role under both backends.
"""

import time

import numpy as np

from . import _kernels
from .binding import TENSOR, Backend, CleanupMemory, cleanup, encode, full_ranking, unbind
from .core import circ_conv_fft, circ_conv_naive, cosine, derive_rng, random_unit
from .errors import HolosemError

SENTENCE_ROLES = ("agent", "patient", "verb")
SENTENCE_FILLERS = {"agent": "Junpa", "patient": "Jen", "verb": "loves"}


class NumericCheckError(HolosemError):
    """An internal numeric self-check failed."""


# =============================================================================
# Binding capacity
# =============================================================================

def capacity_cell(dim, m, trials, seed, vocab_size=32):
    """Recovered-filler statistics for ``m`` bound pairs at dimension ``dim``.

    Each trial binds ``m`` random (role, filler) pairs, unbinds every role and
    cleans the result up against a vocabulary holding the ``m`` fillers plus
    random distractors (at least ``vocab_size`` items in total).
    """
    cosines, hits = [], 0
    n_vocab = max(vocab_size, m)
    backend = Backend.hrr(dim)
    for t in range(trials):
        rng = derive_rng(seed, dim, m, t)
        vocab = [random_unit(dim, rng) for _ in range(n_vocab)]
        roles = [random_unit(dim, rng) for _ in range(m)]
        fillers = vocab[:m]
        trace = encode(list(zip(roles, fillers)), backend)
        memory = CleanupMemory([(f"w{i}", v) for i, v in enumerate(vocab)])
        for k in range(m):
            rec = unbind(trace, roles[k], backend)
            cosines.append(cosine(rec, fillers[k]))
            found = cleanup(rec, memory)
            hits += found is not None and found[0] == f"w{k}"
    cos = np.asarray(cosines)
    return {
        "dim": int(dim),
        "m": int(m),
        "mean_cosine": float(cos.mean()),
        "std_cosine": float(cos.std()),
        "cleanup_accuracy": hits / (trials * m),
    }


def run_capacity(dims, ms, trials, seed, vocab_size=32):
    return [capacity_cell(d, m, trials, seed, vocab_size) for d in dims for m in ms]


CAPACITY_HEADER = ("dim", "m", "mean_cosine", "std_cosine", "cleanup_accuracy")


# =============================================================================
# Convolution benchmark
# =============================================================================

def _median_time(fn, a, b, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(a, b)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def run_bench(dims, repeats, seed, tolerance=1e-9, naive=None):
    """Median-of-``repeats`` timings of direct vs FFT convolution per dim.

    Raises
    ------
    NumericCheckError
        If the two methods disagree by ``tolerance`` or more at any dim;
        raised before timing starts.
    """
    naive = naive or circ_conv_naive
    dims = list(dict.fromkeys(int(d) for d in dims))
    inputs = {}
    for d in dims:
        rng = derive_rng(seed, d)
        a, b = rng.standard_normal(d), rng.standard_normal(d)
        diff = float(np.max(np.abs(naive(a, b) - circ_conv_fft(a, b))))
        if not diff < tolerance:
            raise NumericCheckError(f"direct and FFT convolution differ by {diff:.3g} at dim {d}")
        inputs[d] = (a, b, diff)
    rows = []
    for d in dims:
        a, b, diff = inputs[d]
        rows.append(
            {
                "dim": d,
                "kernel": _kernels.KERNEL_IMPL,
                "naive_seconds": _median_time(naive, a, b, repeats),
                "fft_seconds": _median_time(circ_conv_fft, a, b, repeats),
                "max_abs_diff": diff,
            }
        )
    return rows


BENCH_HEADER = ("dim", "kernel", "naive_seconds", "fft_seconds", "max_abs_diff")


# =============================================================================
# Sentence unbinding demo
# =============================================================================

def _sentence_once(backend, dim, rng, roles):
    if backend.is_tensor:
        basis = np.eye(len(SENTENCE_ROLES))
        role_vecs = {r: basis[i] for i, r in enumerate(SENTENCE_ROLES)}
        filler_vecs = {f: random_unit(dim, rng) for f in SENTENCE_FILLERS.values()}
    else:
        role_vecs = {r: random_unit(dim, rng) for r in SENTENCE_ROLES}
        filler_vecs = {f: random_unit(dim, rng) for f in SENTENCE_FILLERS.values()}
    s = encode([(role_vecs[r], filler_vecs[SENTENCE_FILLERS[r]]) for r in SENTENCE_ROLES], backend)
    memory = CleanupMemory(list(filler_vecs.items()))
    out = {}
    for r in roles:
        rec = unbind(s, role_vecs[r], backend)
        name, score = full_ranking(rec, memory)[0]
        out[r] = (name, score)
    return out


def run_demo_sentence(roles, hrr_dims, trials, seed, filler_dim=64):
    """Unbind each requested role and clean up against {Junpa, Jen, loves}.

    Tensor roles are the orthonormal standard basis of a 3-d role space and
    the fillers random unit vectors of ``filler_dim``; HRR uses random
    pointers for both.
    """
    rows = []
    tensor = _sentence_once(TENSOR, filler_dim, derive_rng(seed, 0), roles)
    for r in roles:
        name, score = tensor[r]
        rows.append({"backend": "tensor", "dim": filler_dim, "role": r, "expected": SENTENCE_FILLERS[r],
                     "retrieved": name, "mean_score": score, "success_rate": float(name == SENTENCE_FILLERS[r])})
    for d in hrr_dims:
        wins = {r: 0 for r in roles}
        scores = {r: [] for r in roles}
        for t in range(trials):
            cell = _sentence_once(Backend.hrr(d), d, derive_rng(seed, d, t), roles)
            for r in roles:
                name, score = cell[r]
                wins[r] += name == SENTENCE_FILLERS[r]
                scores[r].append(score)
        for r in roles:
            rows.append({"backend": "hrr", "dim": int(d), "role": r, "expected": SENTENCE_FILLERS[r],
                         "retrieved": SENTENCE_FILLERS[r] if wins[r] * 2 > trials else "(mixed)",
                         "mean_score": float(np.mean(scores[r])), "success_rate": wins[r] / trials})
    return rows


DEMO_HEADER = ("backend", "dim", "role", "expected", "retrieved", "mean_score", "success_rate")
