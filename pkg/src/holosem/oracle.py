"""
Exact pet-fish rankings with plain Python arithmetic.

Deliberately shares no numeric code with :mod:`holosem.core` or
:mod:`holosem.binding`: the tables are re-parsed from their source text and
every product, norm and cosine is a hand-written loop over lists.  Tests use
it as ground truth for the tensor backend.
"""

import math

from .petfish import ANIMALS, FEATURES, TABLE1_TEXT, TABLE2_TEXT, RankingReport, aggregate


def _rows(text):
    return [[float(x) for x in line.split()[1:]] for line in text.strip().splitlines()]


def _norm(v):
    return math.sqrt(sum(x * x for x in v))


def oracle_queries():
    """``{animal: pet @ column}`` with the unnormalized table columns."""
    weights = _rows(TABLE1_TEXT)
    pet = _rows(TABLE2_TEXT)
    out = {}
    for j, animal in enumerate(ANIMALS):
        col = [weights[i][j] for i in range(len(FEATURES))]
        out[animal] = [sum(pet[r][c] * col[c] for c in range(len(FEATURES))) for r in range(len(FEATURES))]
    return out


def oracle_nouns():
    weights = _rows(TABLE1_TEXT)
    out = {}
    for j, animal in enumerate(ANIMALS):
        col = [weights[i][j] for i in range(len(FEATURES))]
        n = _norm(col)
        out[animal] = [x / n for x in col]
    return out


def oracle_scores():
    """``{animal: {noun: cosine(pet animal, noun)}}``."""
    nouns = oracle_nouns()
    out = {}
    for animal, q in oracle_queries().items():
        qn = _norm(q)
        out[animal] = {
            noun: sum(a * b for a, b in zip(q, vec)) / (qn * _norm(vec)) for noun, vec in nouns.items()
        }
    return out


def exact_oracle_rankings():
    queries = oracle_queries()
    scores = oracle_scores()
    results = []
    for animal in ANIMALS:
        ranked = sorted(scores[animal].items(), key=lambda kv: (-kv[1], kv[0]))
        results.append(
            {
                "backend": "tensor",
                "dim": len(FEATURES),
                "trial": 0,
                "animal": animal,
                "ranking": [{"noun": n, "score": s} for n, s in ranked],
                "query": queries[animal],
            }
        )
    return RankingReport(config={"source": "oracle"}, results=results, aggregates=aggregate(results, scores))
