"""
Grammar-typed lexicon and composition.

Shapes per backend (``N`` = noun_dim, ``S`` = sentence_dim):

==============  ===========  ==========
category        tensor       hrr
==============  ===========  ==========
noun            (N,)         (dim,)
adjective       (N, N)       (dim,)
iverb           (S, N)       (dim,)
tverb           (N, S, N)    (dim,)
==============  ===========  ==========

Adjectives and verbs are built as role-filler sums with nouns as roles:
``adj = sum_i an_i (x) n_i``, ``iverb = sum_i sent_i (x) n_i`` and
``tverb = sum_ij n_i (x) sent_ij (x) n_j``.  Applying a word to its argument
is unbinding, so under the tensor backend it is ordinary contraction.
"""

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .binding import TENSOR, Backend, RoleFillerStructure, encode, unbind
from .core import as_vector, circ_conv, circ_corr, contract3, cosine, normalize, random_unit
from .errors import CategoryError, DimensionError, EmptyStructureError

FORMAT_VERSION = "1"


class Category(str, Enum):
    NOUN = "noun"
    ADJECTIVE = "adjective"
    IVERB = "iverb"
    TVERB = "tverb"


def expected_shape(category, backend, noun_dim, sentence_dim):
    if not backend.is_tensor:
        return (backend.dim,)
    category = Category(category)
    return {
        Category.NOUN: (noun_dim,),
        Category.ADJECTIVE: (noun_dim, noun_dim),
        Category.IVERB: (sentence_dim, noun_dim),
        Category.TVERB: (noun_dim, sentence_dim, noun_dim),
    }[category]


@dataclass(frozen=True)
class LexicalEntry:
    word: str
    category: Category
    payload: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "category", Category(self.category))
        p = np.array(self.payload, dtype=np.float64)
        if not np.all(np.isfinite(p)):
            raise ValueError(f"payload of {self.word!r} has non-finite entries")
        p.setflags(write=False)
        object.__setattr__(self, "payload", p)

    def replace(self, payload):
        return LexicalEntry(self.word, self.category, payload)


def _require(entry, category):
    if entry.category is not category:
        raise CategoryError(f"{entry.word!r} is a {entry.category.value}, expected {category.value}")


class Lexicon:
    """Word store for one backend.

    Entries are immutable values; :meth:`put` swaps an entry atomically, so a
    reader sees either the old or the new payload, never a mix.
    """

    def __init__(self, backend=TENSOR, noun_dim=None, sentence_dim=None, entries=(), require_unit_nouns=True):
        self.backend = backend
        self.require_unit_nouns = require_unit_nouns
        if not backend.is_tensor:
            noun_dim = backend.dim if noun_dim is None else noun_dim
            sentence_dim = backend.dim if sentence_dim is None else sentence_dim
            if noun_dim != backend.dim or sentence_dim != backend.dim:
                raise DimensionError("hrr lexicon needs noun_dim == sentence_dim == backend dim")
        if noun_dim is None or int(noun_dim) < 1:
            raise DimensionError(f"noun_dim must be positive, got {noun_dim!r}")
        self.noun_dim = int(noun_dim)
        self.sentence_dim = self.noun_dim if sentence_dim is None else int(sentence_dim)
        self._entries = {}
        for e in entries:
            self.add(e)

    def shape_for(self, category):
        return expected_shape(category, self.backend, self.noun_dim, self.sentence_dim)

    def _check(self, entry):
        want = self.shape_for(entry.category)
        if entry.payload.shape != want:
            raise DimensionError(
                f"{entry.category.value} {entry.word!r} has shape {entry.payload.shape}, lexicon expects {want}"
            )
        if self.require_unit_nouns and entry.category is Category.NOUN and abs(np.linalg.norm(entry.payload) - 1.0) > 1e-9:
            raise ValueError(f"noun {entry.word!r} must be unit norm")

    def add(self, entry):
        if entry.word in self._entries:
            raise ValueError(f"duplicate word {entry.word!r}")
        self.put(entry)

    def put(self, entry):
        self._check(entry)
        self._entries[entry.word] = entry

    def __getitem__(self, word):
        return self._entries[word]

    def __contains__(self, word):
        return word in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def words(self, category=None):
        if category is None:
            return list(self._entries)
        category = Category(category)
        return [w for w, e in self._entries.items() if e.category is category]

    def copy(self):
        return Lexicon(
            self.backend, self.noun_dim, self.sentence_dim, list(self._entries.values()), self.require_unit_nouns
        )

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "format_version": FORMAT_VERSION,
            "backend": self.backend.to_json(),
            "noun_dim": self.noun_dim,
            "sentence_dim": self.sentence_dim,
            "entries": [
                {
                    "word": e.word,
                    "category": e.category.value,
                    "shape": list(e.payload.shape),
                    "values": [float(x) for x in e.payload.ravel(order="C")],
                }
                for e in self._entries.values()
            ],
        }

    @classmethod
    def from_json(cls, doc, require_unit_nouns=True):
        if str(doc.get("format_version")) != FORMAT_VERSION:
            raise ValueError(f"unsupported lexicon format_version {doc.get('format_version')!r}")
        lex = cls(
            Backend.from_json(doc["backend"]), doc["noun_dim"], doc["sentence_dim"],
            require_unit_nouns=require_unit_nouns,
        )
        for item in doc["entries"]:
            payload = np.asarray(item["values"], dtype=np.float64).reshape(item["shape"])
            lex.add(LexicalEntry(item["word"], item["category"], payload))
        return lex


def dumps_lexicon(lexicon, metadata=None):
    """JSON text; Python float repr is the shortest string that round-trips exactly."""
    doc = lexicon.to_json()
    if metadata is not None:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=1, allow_nan=False)


def loads_lexicon(text, require_unit_nouns=True):
    doc = json.loads(text)
    return Lexicon.from_json(doc, require_unit_nouns), doc.get("metadata")


# =============================================================================
# Construction
# =============================================================================

def make_noun(word, vector):
    return LexicalEntry(word, Category.NOUN, normalize(as_vector(vector, word)))


def build_adjective(pairs, backend, word="adj"):
    """Adjective from ``(an, n)`` pairs: nouns are roles, phrase vectors fillers."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyStructureError("build_adjective needs at least one (an, n) pair")
    payload = encode(RoleFillerStructure(tuple((n, an) for an, n in pairs)), backend)
    return LexicalEntry(word, Category.ADJECTIVE, payload)


def build_iverb(pairs, backend, word="iverb"):
    """Intransitive verb from ``(n, sent)`` pairs."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyStructureError("build_iverb needs at least one (n, sent) pair")
    payload = encode(RoleFillerStructure(tuple((n, s) for n, s in pairs)), backend)
    return LexicalEntry(word, Category.IVERB, payload)


def build_tverb(triples, backend, word="tverb"):
    """Transitive verb from ``(n_subj, sent, n_obj)`` triples.

    Tensor payload is ``sum n_subj (x) sent (x) n_obj`` indexed
    ``[subject, sentence, object]``; HRR payload is the three-way convolution.
    """
    triples = [tuple(as_vector(x) for x in t) for t in triples]
    if not triples:
        raise EmptyStructureError("build_tverb needs at least one (n_subj, sent, n_obj) triple")
    dims = {(a.shape[0], s.shape[0], b.shape[0]) for a, s, b in triples}
    if len(dims) != 1:
        raise DimensionError(f"inconsistent triple dims {sorted(dims)}")
    (ds, dsent, do), = dims
    if ds != do:
        raise DimensionError("subject and object nouns must share a dimension")
    if backend.is_tensor:
        payload = sum(np.einsum("i,j,k->ijk", a, s, b) for a, s, b in triples)
    else:
        if {ds, dsent} != {backend.dim}:
            raise DimensionError(f"hrr:{backend.dim} cannot hold vectors of dims {ds}, {dsent}")
        payload = sum(circ_conv(circ_conv(a, s), b) for a, s, b in triples)
    return LexicalEntry(word, Category.TVERB, payload)


# =============================================================================
# Composition
# =============================================================================

def _finish(v, normalize_output):
    return normalize(v) if normalize_output else v


def apply_adjective(adj, noun, backend, normalize_output=False):
    _require(adj, Category.ADJECTIVE)
    _require(noun, Category.NOUN)
    return _finish(unbind(adj.payload, noun.payload, backend), normalize_output)


def apply_intransitive(verb, subject, backend, normalize_output=False):
    _require(verb, Category.IVERB)
    _require(subject, Category.NOUN)
    return _finish(unbind(verb.payload, subject.payload, backend), normalize_output)


def apply_transitive(verb, subject, obj, backend, normalize_output=False):
    """Sentence for ``subject verb obj``.

    HRR unbinds the subject first, then the object.
    """
    _require(verb, Category.TVERB)
    _require(subject, Category.NOUN)
    _require(obj, Category.NOUN)
    if backend.is_tensor:
        out = contract3(verb.payload, subject.payload, obj.payload)
    else:
        out = circ_corr(circ_corr(verb.payload, subject.payload), obj.payload)
    return _finish(out, normalize_output)


# =============================================================================
# Additive vs conjunctive similarity
# =============================================================================

class RoleTagSet:
    """Named tag vectors (``adj``, ``noun``, ...) for additive binding.

    Tensor tags are exactly orthonormal (QR of a Gaussian matrix); HRR tags
    are independent random pointers.
    """

    def __init__(self, tags):
        self.tags = {str(k): as_vector(v, k) for k, v in dict(tags).items()}

    @classmethod
    def generate(cls, names, dim, backend, rng):
        names = list(names)
        if len(set(names)) != len(names):
            raise ValueError("tag names must be unique")
        if backend.is_tensor:
            if len(names) > dim:
                raise DimensionError(f"cannot fit {len(names)} orthonormal tags in dim {dim}")
            q, _ = np.linalg.qr(rng.standard_normal((dim, len(names))))
            return cls({n: q[:, i] for i, n in enumerate(names)})
        return cls({n: random_unit(dim, rng) for n in names})

    def __getitem__(self, name):
        return self.tags[name]


def additive_compose(words, tags, backend):
    """``(1/sqrt(k)) * sum_i bind(vec_i, tag_i)`` over ``k`` (vector, tag-name) words.

    The result is unit length when the tags are orthonormal and the word
    vectors are unit.  Tensor results are matrices; compare them with
    :func:`holosem.core.cosine`, which flattens.
    """
    words = list(words)
    if not words:
        raise EmptyStructureError("additive_compose needs at least one word")
    names = [t for _, t in words]
    if len(set(names)) != len(names):
        raise ValueError(f"repeated role tag in {names}")
    total = None
    for vec, tag in words:
        term = backend.bind(vec, tags[tag])
        total = term if total is None else total + term
    return total / math.sqrt(len(words))


def conjunctive_similarity_check(pred, a, b, backend):
    """Return ``(cosine(pred (x) a, pred (x) b), cosine(a, b))``."""
    pred, a, b = as_vector(pred), as_vector(a), as_vector(b)
    if not (pred.shape == a.shape == b.shape):
        raise DimensionError("pred, a and b must share a dimension")
    return cosine(backend.bind(pred, a), backend.bind(pred, b)), cosine(a, b)
