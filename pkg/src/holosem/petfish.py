"""
The pet-fish composition experiment.

Six animals are weighted sums over seven feature pointers (``TABLE1``) and
the adjective *pet* is a 7x7 weighting of bound feature pairs (``TABLE2``,
rows = output feature, columns = input feature).  Each ``pet + animal``
phrase is composed, normalized and ranked against the six animal nouns.

Under the tensor backend the feature pointers are the standard basis and the
computation is exact.  Under HRR they are random pointers of the requested
dimension, redrawn per trial.

Note: circular convolution is commutative, so correlating ``p_i (*) p_j`` with
a noun picks up both the ``p_i`` and the ``p_j`` factor.  Projected onto the
feature pointers, HRR application tends to ``(R + R^T) n`` rather than
``R n`` as the dimension grows (diagonal cells count twice because
``p (*) p (*) p*`` has expected projection 2 onto ``p``), so HRR rankings need
not converge to the tensor ones.
"""

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .binding import TENSOR, Backend, CleanupMemory, full_ranking, unbind
from .core import circ_conv, derive_rng, normalize, random_unit
from .lexicon import Category, LexicalEntry, Lexicon, make_noun

FEATURES = ("cared-for", "vicious", "fluffy", "scaly", "lives-sea", "lives-house", "lives-zoo")
FEATURE_SYMBOLS = ("c", "v", "f", "s", "e", "h", "z")
ANIMALS = ("Fish", "Goldfish", "Cat", "Dog", "Shark", "Lion")

# Noun weights: one row per feature, one column per animal.
TABLE1_TEXT = """\
c 0.13 0.44 0.57 0.67 0.00 0.19
v 0.51 0.00 0.13 0.37 0.57 0.62
f 0.00 0.00 0.57 0.37 0.00 0.44
s 0.63 0.62 0.00 0.00 0.57 0.00
e 0.51 0.00 0.00 0.00 0.57 0.00
h 0.19 0.62 0.57 0.52 0.00 0.00
z 0.19 0.19 0.00 0.00 0.11 0.62
"""

# Pet adjective: row = output feature, column = input feature.
TABLE2_TEXT = """\
c 1 1 1 1 1 1 1
v 0 1 0 0 0 0 0
f 0 0 1 0 0 0 0
s 0 0 0 1 0 0 0
e 0 0 0 0 0 0 0
h 0 0 0 0 1 1 1
z 0 0 0 0 0 0 0
"""

# Outcomes the demo was designed for; recorded against the results, never asserted.
INTENDED_WINNERS = {"Fish": "Goldfish", "Cat": "Cat", "Dog": "Dog"}


def parse_table(text, ncols):
    rows, symbols = [], []
    for line in text.strip().splitlines():
        sym, *vals = line.split()
        if len(vals) != ncols:
            raise ValueError(f"row {sym!r} has {len(vals)} values, expected {ncols}")
        symbols.append(sym)
        rows.append([float(v) for v in vals])
    if tuple(symbols) != FEATURE_SYMBOLS:
        raise ValueError(f"feature rows out of order: {symbols}")
    return np.array(rows)


NOUN_WEIGHTS = parse_table(TABLE1_TEXT, len(ANIMALS))
PET_WEIGHTS = parse_table(TABLE2_TEXT, len(FEATURES))


@dataclass(frozen=True)
class FeatureBasis:
    """One pointer per feature, as rows of ``vectors`` in ``FEATURES`` order."""

    vectors: np.ndarray
    names: tuple = FEATURES

    def __post_init__(self):
        if self.vectors.shape[0] != len(FEATURES) or tuple(self.names) != FEATURES:
            raise ValueError("a feature basis has exactly the seven features in table order")

    @property
    def dim(self):
        return self.vectors.shape[1]

    @classmethod
    def exact(cls):
        return cls(np.eye(len(FEATURES)))

    @classmethod
    def random(cls, dim, rng):
        return cls(np.vstack([random_unit(dim, rng) for _ in FEATURES]))

    def backend(self):
        if np.array_equal(self.vectors, np.eye(len(FEATURES))):
            return TENSOR
        return Backend.hrr(self.dim)


def raw_noun_vector(animal, basis):
    """Table-weighted pointer sum before renormalization."""
    return NOUN_WEIGHTS[:, ANIMALS.index(animal)] @ basis.vectors


def build_petfish_nouns(basis, backend=None):
    """Lexicon of the six animals, each renormalized to exactly unit length."""
    backend = backend or basis.backend()
    lex = Lexicon(backend, noun_dim=basis.dim)
    for animal in ANIMALS:
        lex.add(make_noun(animal, raw_noun_vector(animal, basis)))
    return lex


def build_pet_adjective(basis, backend=None):
    """``sum_ij PET_WEIGHTS[i, j] * bind(p_i, p_j)``.

    Tensor: the 7x7 weight matrix expressed in the basis.  HRR: the sum of
    the 13 unit-weight convolutions ``p_i (*) p_j``.
    """
    backend = backend or basis.backend()
    P = basis.vectors
    if backend.is_tensor:
        payload = P.T @ PET_WEIGHTS @ P
    else:
        payload = np.zeros(basis.dim)
        for i, j in zip(*np.nonzero(PET_WEIGHTS)):
            payload = payload + PET_WEIGHTS[i, j] * circ_conv(P[i], P[j])
    return LexicalEntry("pet", Category.ADJECTIVE, payload)


def compose_query(pet, animal, basis, backend):
    """Unnormalized ``pet`` applied to the table-weighted animal vector."""
    return unbind(pet.payload, raw_noun_vector(animal, basis), backend)


@dataclass
class PetfishConfig:
    backends: tuple = ("tensor", "hrr")
    hrr_dims: tuple = (128, 512, 2048, 4096)
    trials: int = 50
    seed: int = 0
    normalize_outputs: bool = True
    output_path: str | None = None

    def __post_init__(self):
        self.backends = tuple(self.backends)
        self.hrr_dims = tuple(int(d) for d in self.hrr_dims)
        bad = set(self.backends) - {"tensor", "hrr"}
        if bad:
            raise ValueError(f"unknown backends {sorted(bad)}")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if any(d < 2 for d in self.hrr_dims):
            raise ValueError("hrr dims must be >= 2")
        if "hrr" in self.backends and not self.hrr_dims:
            raise ValueError("hrr backend requested without dims")


@dataclass
class RankingReport:
    config: dict
    results: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)

    def rankings(self, backend="tensor", dim=None, trial=0):
        """``{animal: [noun, ...]}`` for one (backend, dim, trial) cell."""
        out = {}
        for r in self.results:
            if r["backend"] == backend and r["trial"] == trial and (dim is None or r["dim"] == dim):
                out[r["animal"]] = [x["noun"] for x in r["ranking"]]
        return out

    def to_json(self):
        return asdict(self)

    def csv_rows(self):
        yield ("backend", "dim", "trial", "animal", "rank", "noun", "score")
        for r in self.results:
            for rank, item in enumerate(r["ranking"], start=1):
                yield (r["backend"], r["dim"], r["trial"], r["animal"], rank, item["noun"], repr(item["score"]))


def _rank_once(basis, backend, normalize_outputs):
    nouns = build_petfish_nouns(basis, backend)
    pet = build_pet_adjective(basis, backend)
    memory = CleanupMemory([(a, nouns[a].payload) for a in ANIMALS])
    out = {}
    for animal in ANIMALS:
        q = compose_query(pet, animal, basis, backend)
        if normalize_outputs:
            q = normalize(q)
        out[animal] = (q, full_ranking(q, memory))
    return out


def _record(backend_name, dim, trial, animal, query, ranking, with_query):
    rec = {
        "backend": backend_name,
        "dim": int(dim),
        "trial": int(trial),
        "animal": animal,
        "ranking": [{"noun": n, "score": float(s)} for n, s in ranking],
    }
    if with_query:
        rec["query"] = [float(x) for x in query]
    return rec


def tensor_rankings(normalize_outputs=True):
    basis = FeatureBasis.exact()
    return _rank_once(basis, TENSOR, normalize_outputs)


def run_petfish(config):
    """Run every requested backend/dim and return a :class:`RankingReport`.

    Tensor queries are recorded before normalization; HRR trial ``t`` at
    dimension ``d`` draws its feature pointers from ``derive_rng(seed, d, t)``.
    """
    results = []
    tensor_cell = tensor_rankings(normalize_outputs=False)
    oracle_scores = {a: dict(r) for a, (_, r) in tensor_cell.items()}

    if "tensor" in config.backends:
        for animal, (q, ranking) in tensor_cell.items():
            results.append(_record("tensor", len(FEATURES), 0, animal, q, ranking, with_query=True))

    if "hrr" in config.backends:
        for dim in config.hrr_dims:
            for trial in range(config.trials):
                basis = FeatureBasis.random(dim, derive_rng(config.seed, dim, trial))
                cell = _rank_once(basis, Backend.hrr(dim), config.normalize_outputs)
                for animal, (q, ranking) in cell.items():
                    results.append(_record("hrr", dim, trial, animal, q, ranking, with_query=False))

    return RankingReport(
        config=asdict(config),
        results=results,
        aggregates=aggregate(results, oracle_scores),
    )


def rank_correlation(ranking, reference_scores):
    """Spearman correlation between ``[(noun, score), ...]`` and ``{noun: score}``."""
    scores = [s for _, s in ranking]
    ref = [reference_scores[n] for n, _ in ranking]
    return float(spearmanr(scores, ref).statistic)


def aggregate(results, oracle_scores):
    cells = defaultdict(list)
    for r in results:
        cells[(r["backend"], r["dim"], r["animal"])].append(r)

    winner_frequency, mean_scores = [], []
    corr_by_dim = defaultdict(list)
    for (backend, dim, animal), recs in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1], ANIMALS.index(kv[0][2]))):
        n = len(recs)
        wins = Counter(r["ranking"][0]["noun"] for r in recs)
        sums = defaultdict(float)
        for r in recs:
            for item in r["ranking"]:
                sums[item["noun"]] += item["score"]
        winner_frequency.append(
            {"backend": backend, "dim": dim, "animal": animal,
             "frequency": {a: wins.get(a, 0) / n for a in ANIMALS}}
        )
        mean_scores.append(
            {"backend": backend, "dim": dim, "animal": animal,
             "scores": {a: sums[a] / n for a in ANIMALS}}
        )
        for r in recs:
            pairs = [(x["noun"], x["score"]) for x in r["ranking"]]
            corr_by_dim[(backend, dim)].append(rank_correlation(pairs, oracle_scores[animal]))

    rank_corr = [
        {"backend": b, "dim": d, "mean_spearman": float(np.mean(v)), "count": len(v)}
        for (b, d), v in sorted(corr_by_dim.items())
    ]

    observations = []
    for animal, wished in INTENDED_WINNERS.items():
        ranked = sorted(oracle_scores[animal].items(), key=lambda kv: (-kv[1], kv[0]))
        observations.append(
            {"animal": animal, "intended_winner": wished, "exact_winner": ranked[0][0],
             "matches_intent": ranked[0][0] == wished}
        )
    return {
        "winner_frequency": winner_frequency,
        "mean_scores": mean_scores,
        "rank_correlation": rank_corr,
        "observations": observations,
    }
