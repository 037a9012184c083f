"""
Supervised grounded learning of adjectives, intransitive verbs and nouns.

A hidden ground-truth lexicon stands in for the world.  Each presentation
samples a labelled phrase (``adjective noun`` or ``noun iverb``), composes it
with the hidden lexicon, adds isotropic Gaussian noise and renormalizes; the
result is the *percept*.  The learner then applies convex-mixture updates
with rate ``h``::

    F <- (1 - h) F + h * bind(percept, noun)          # adjective or verb
    n <- (1 - h) n + h * unbind_role(F, percept)      # noun, then renormalized

``bind`` keeps the library orientation (percept on the output side), so the
functor update for a verb is the same rule as for an adjective.  Words seen
for the first time are initialized from the percept: a noun as the percept
itself, a functor as ``bind(percept, percept)``.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .binding import CleanupMemory, cleanup, unbind_role
from .core import as_vector, cosine, make_rng, normalize, random_unit
from .errors import ConfigError, EmptyStructureError, UndefinedSimilarityError
from .lexicon import (
    Category,
    LexicalEntry,
    Lexicon,
    apply_adjective,
    apply_intransitive,
    build_adjective,
    build_iverb,
    dumps_lexicon,
    loads_lexicon,
    make_noun,
)

UPDATE_ORDERS = ("functor_first", "noun_first")


@dataclass(frozen=True)
class Phrase:
    kind: Category  # ADJECTIVE or IVERB
    word: str
    noun: str

    def __post_init__(self):
        kind = Category(self.kind)
        if kind not in (Category.ADJECTIVE, Category.IVERB):
            raise ValueError(f"phrases are adjective-noun or noun-iverb, not {kind.value}")
        object.__setattr__(self, "kind", kind)

    @property
    def label(self):
        if self.kind is Category.ADJECTIVE:
            return f"{self.word} {self.noun}"
        return f"{self.noun} {self.word}"

    def to_json(self):
        return {"kind": self.kind.value, "word": self.word, "noun": self.noun}


@dataclass(frozen=True)
class Stimulus:
    phrase: Phrase
    percept: np.ndarray
    clean: np.ndarray


@dataclass
class GroundTruthWorld:
    hidden: Lexicon
    phrases: list
    weights: np.ndarray
    noise_sigma: float = 0.05

    def __post_init__(self):
        if not self.phrases:
            raise EmptyStructureError("the phrase distribution is empty")
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (len(self.phrases),) or np.any(self.weights < 0):
            raise ValueError("one non-negative weight per phrase is required")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"phrase weights must sum to 1, got {self.weights.sum()}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        for p in self.phrases:
            for w in (p.word, p.noun):
                if w not in self.hidden:
                    raise ValueError(f"phrase {p.label!r} uses unknown word {w!r}")

    @property
    def backend(self):
        return self.hidden.backend

    @property
    def dim(self):
        return self.hidden.noun_dim

    def clean_composition(self, phrase):
        """Hidden composition, normalized."""
        return normalize(compose(self.hidden, phrase))


def compose(lexicon, phrase):
    functor = lexicon[phrase.word]
    noun = lexicon[phrase.noun]
    if phrase.kind is Category.ADJECTIVE:
        return apply_adjective(functor, noun, lexicon.backend)
    return apply_intransitive(functor, noun, lexicon.backend)


def make_world(phrases, dim, backend, seed, noise_sigma=0.05, weights=None):
    """Random hidden lexicon realizing ``phrases``.

    Nouns and phrase vectors are independent random pointers; each functor
    is the role-filler sum over the phrases it occurs in.  Sentence space
    equals noun space.

    ``phrases`` items are :class:`Phrase` or ``(kind, word, noun)`` tuples.
    """
    phrases = [p if isinstance(p, Phrase) else Phrase(*p) for p in phrases]
    if not phrases:
        raise EmptyStructureError("the phrase distribution is empty")
    if len({p.label for p in phrases}) != len(phrases):
        raise ValueError("duplicate phrase labels")
    rng = make_rng(seed)
    lex = Lexicon(backend, noun_dim=dim)
    for noun in sorted({p.noun for p in phrases}):
        lex.add(make_noun(noun, random_unit(dim, rng)))
    fillers = {p.label: random_unit(dim, rng) for p in phrases}
    for word in sorted({p.word for p in phrases}):
        mine = [p for p in phrases if p.word == word]
        kinds = {p.kind for p in mine}
        if len(kinds) != 1:
            raise ValueError(f"{word!r} is used both as adjective and verb")
        pairs = [(fillers[p.label], lex[p.noun].payload) for p in mine]
        if Category.ADJECTIVE in kinds:
            lex.add(build_adjective(pairs, backend, word))
        else:
            lex.add(build_iverb([(n, s) for s, n in pairs], backend, word))
    if weights is None:
        weights = np.full(len(phrases), 1.0 / len(phrases))
    return GroundTruthWorld(lex, phrases, weights, noise_sigma)


def generate_stimulus(world, rng):
    """Sample a phrase, compose it on the hidden lexicon, add noise, renormalize."""
    idx = int(rng.choice(len(world.phrases), p=world.weights))
    phrase = world.phrases[idx]
    clean = world.clean_composition(phrase)
    noise = rng.standard_normal(clean.shape[0])
    percept = normalize(clean + world.noise_sigma * noise)
    return Stimulus(phrase, percept, clean)


@dataclass
class LearnerState:
    lexicon: Lexicon
    h: float = 0.1
    presentations: int = 0
    seen_counts: Counter = field(default_factory=Counter)
    normalize_nouns: bool = True
    order: str = "functor_first"

    def __post_init__(self):
        if not 0.0 <= self.h <= 1.0:
            raise ValueError(f"learning rate h must lie in [0, 1], got {self.h}")
        if self.order not in UPDATE_ORDERS:
            raise ValueError(f"order must be one of {UPDATE_ORDERS}")

    @property
    def backend(self):
        return self.lexicon.backend

    @classmethod
    def empty(cls, backend, dim, **kw):
        lex = Lexicon(backend, noun_dim=dim, require_unit_nouns=kw.get("normalize_nouns", True))
        return cls(lex, **kw)


def _check_h(h):
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"learning rate h must lie in [0, 1], got {h}")


def init_unseen(word, percept, kind, backend):
    """First-sight initialization from a percept.

    Nouns start as the percept; adjectives and verbs as the percept bound
    to itself.
    """
    p = as_vector(percept, "percept")
    if not np.any(p):
        raise UndefinedSimilarityError("cannot initialize a word from a zero percept")
    kind = Category(kind)
    if kind is Category.NOUN:
        return make_noun(word, p)
    if kind in (Category.ADJECTIVE, Category.IVERB):
        return LexicalEntry(word, kind, backend.bind(p, p))
    raise ValueError(f"no initialization rule for {kind.value}")


def update_functor(state, word, percept, noun_word, h=None):
    """``F <- (1 - h) F + h * bind(percept, noun)`` for an adjective or verb."""
    h = state.h if h is None else h
    _check_h(h)
    old = state.lexicon[word]
    if old.category not in (Category.ADJECTIVE, Category.IVERB):
        raise ValueError(f"{word!r} is not an adjective or intransitive verb")
    term = state.backend.bind(percept, state.lexicon[noun_word].payload)
    new = old.replace((1.0 - h) * old.payload + h * term)
    state.lexicon.put(new)
    return new


def update_adjective(state, adj_word, percept, noun_word, h=None):
    return update_functor(state, adj_word, percept, noun_word, h)


def update_iverb(state, verb_word, noun_word, percept, h=None):
    return update_functor(state, verb_word, percept, noun_word, h)


def update_noun(state, noun_word, percept, functor_word, h=None):
    """``n <- (1 - h) n + h * unbind_role(F, percept)``, renormalized if configured.

    The same extraction serves adjectives and verbs since both store the
    percept side as rows.
    """
    h = state.h if h is None else h
    _check_h(h)
    old = state.lexicon[noun_word]
    extracted = unbind_role(state.lexicon[functor_word].payload, percept, state.backend)
    mixed = (1.0 - h) * old.payload + h * extracted
    if state.normalize_nouns:
        n = np.linalg.norm(mixed)
        mixed = mixed / n if n > 0 else old.payload
    new = old.replace(mixed)
    state.lexicon.put(new)
    return new


def present(state, stimulus):
    """One learning step.  Returns the Frobenius norm of the functor change."""
    phrase = stimulus.phrase
    lex = state.lexicon
    if phrase.noun not in lex:
        lex.put(init_unseen(phrase.noun, stimulus.percept, Category.NOUN, state.backend))
    if phrase.word not in lex:
        lex.put(init_unseen(phrase.word, stimulus.percept, phrase.kind, state.backend))
    before = lex[phrase.word].payload
    if state.order == "functor_first":
        update_functor(state, phrase.word, stimulus.percept, phrase.noun)
        update_noun(state, phrase.noun, stimulus.percept, phrase.word)
    else:
        update_noun(state, phrase.noun, stimulus.percept, phrase.word)
        update_functor(state, phrase.word, stimulus.percept, phrase.noun)
    state.presentations += 1
    state.seen_counts[phrase.word] += 1
    state.seen_counts[phrase.noun] += 1
    return float(np.linalg.norm(lex[phrase.word].payload - before))


def expected_functor_update(state, world, word):
    """Exact expectation of ``bind(clean percept, noun) - F`` given ``word`` is sampled.

    Uses noise-free percepts and the learner's current nouns.
    """
    idx = [i for i, p in enumerate(world.phrases) if p.word == word]
    if not idx:
        raise ValueError(f"{word!r} does not occur in the world")
    w = world.weights[idx]
    w = w / w.sum()
    term = sum(
        wi * state.backend.bind(world.clean_composition(world.phrases[i]), state.lexicon[world.phrases[i].noun].payload)
        for wi, i in zip(w, idx)
    )
    return term - state.lexicon[word].payload


# =============================================================================
# Evaluation and training loop
# =============================================================================

@dataclass
class LearningCurve:
    records: list = field(default_factory=list)

    @property
    def final(self):
        return self.records[-1]

    def to_json(self):
        return {"records": self.records}

    def csv_rows(self):
        yield ("epoch", "word", "metric", "value")
        for r in self.records:
            yield (r["epoch"], "*", "accuracy", repr(r["accuracy"]))
            yield (r["epoch"], "*", "mean_update_norm", repr(r["mean_update_norm"]))
            for w, c in r["word_cosine"].items():
                yield (r["epoch"], w, "cosine_to_truth", repr(c))


def evaluate(world, state):
    """Per-word cosine to the hidden payloads and retrieval accuracy.

    Retrieval composes every label with the LEARNED lexicon and cleans it up
    against the hidden compositions of all labels; a label with an unknown
    word counts as a miss.
    """
    cos = {}
    for entry in world.hidden:
        if entry.word in state.lexicon:
            try:
                cos[entry.word] = cosine(state.lexicon[entry.word].payload, entry.payload)
            except UndefinedSimilarityError:
                cos[entry.word] = None
    memory = CleanupMemory([(p.label, world.clean_composition(p)) for p in world.phrases])
    hits = 0
    for p in world.phrases:
        if p.word not in state.lexicon or p.noun not in state.lexicon:
            continue
        v = compose(state.lexicon, p)
        if not np.any(v):
            continue
        found = cleanup(v, memory)
        hits += found is not None and found[0] == p.label
    return {"word_cosine": cos, "accuracy": hits / len(world.phrases)}


def train(world, state, presentations, eval_every=None, seed=0):
    """Run ``presentations`` learning steps; evaluate at 0, every ``eval_every`` and at the end.

    ``epoch`` in the curve is the number of presentations done.  Fully
    determined by ``(world, initial state, seed)``.
    """
    presentations = int(presentations)
    if presentations < 0:
        raise ConfigError("presentations must be >= 0")
    eval_every = presentations if not eval_every else int(eval_every)
    rng = make_rng(seed)
    curve = LearningCurve()
    norms = []

    def snapshot():
        rec = evaluate(world, state)
        rec = {
            "epoch": state.presentations,
            "accuracy": rec["accuracy"],
            "mean_update_norm": float(np.mean(norms)) if norms else 0.0,
            "word_cosine": rec["word_cosine"],
        }
        curve.records.append(rec)
        norms.clear()

    snapshot()
    for step in range(1, presentations + 1):
        norms.append(present(state, generate_stimulus(world, rng)))
        if step % eval_every == 0 or step == presentations:
            snapshot()
    return curve


# =============================================================================
# Checkpoints
# =============================================================================

def dumps_checkpoint(state, seed):
    meta = {
        "h": state.h,
        "presentations_done": state.presentations,
        "seed": int(seed),
        "normalize_nouns": state.normalize_nouns,
        "order": state.order,
        "seen_counts": dict(sorted(state.seen_counts.items())),
    }
    return dumps_lexicon(state.lexicon, metadata=meta)


def loads_checkpoint(text):
    lex, meta = loads_lexicon(text, require_unit_nouns=False)
    state = LearnerState(
        lex,
        h=meta["h"],
        presentations=meta["presentations_done"],
        seen_counts=Counter(meta.get("seen_counts", {})),
        normalize_nouns=meta.get("normalize_nouns", True),
        order=meta.get("order", "functor_first"),
    )
    return state, meta["seed"]


def dumps_world(world, seed):
    meta = {
        "noise_sigma": world.noise_sigma,
        "seed": int(seed),
        "phrases": [dict(p.to_json(), weight=float(w)) for p, w in zip(world.phrases, world.weights)],
    }
    return dumps_lexicon(world.hidden, metadata=meta)


def loads_world(text):
    lex, meta = loads_lexicon(text)
    phrases = [Phrase(p["kind"], p["word"], p["noun"]) for p in meta["phrases"]]
    weights = [p["weight"] for p in meta["phrases"]]
    return GroundTruthWorld(lex, phrases, weights, meta["noise_sigma"]), meta["seed"]

