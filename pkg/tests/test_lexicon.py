import math

import numpy as np
import pytest

from holosem.binding import TENSOR, Backend, CleanupMemory, cleanup
from holosem.core import cosine, derive_rng, make_rng, random_unit
from holosem.errors import CategoryError, DimensionError, EmptyStructureError
from holosem.lexicon import (
    Category,
    LexicalEntry,
    Lexicon,
    RoleTagSet,
    additive_compose,
    apply_adjective,
    apply_intransitive,
    apply_transitive,
    build_adjective,
    build_iverb,
    build_tverb,
    conjunctive_similarity_check,
    dumps_lexicon,
    loads_lexicon,
    make_noun,
)
from holosem.petfish import FeatureBasis, build_pet_adjective, compose_query


def noun(word, vec):
    return make_noun(word, vec)


def orthonormal(k, dim, seed=0):
    q, _ = np.linalg.qr(make_rng(seed).standard_normal((dim, k)))
    return [q[:, i] for i in range(k)]


def pair_with_cosine(s, dim=16, seed=0):
    a, w = orthonormal(2, dim, seed)
    return a, s * a + math.sqrt(1 - s * s) * w


def hrr_pet_projection_cosine(dim, seed):
    """Cosine between the HRR pet-fish query read out on the feature pointers and the exact result."""
    exact = FeatureBasis.exact()
    t = compose_query(build_pet_adjective(exact), "Fish", exact, TENSOR)
    basis = FeatureBasis.random(dim, derive_rng(seed, dim))
    q = compose_query(build_pet_adjective(basis), "Fish", basis, Backend.hrr(dim))
    return cosine(basis.vectors @ q, t)


class TestLexicon:
    def test_shapes_enforced(self):
        lex = Lexicon(TENSOR, noun_dim=4, sentence_dim=3)
        lex.add(LexicalEntry("walks", Category.IVERB, np.zeros((3, 4))))
        lex.add(LexicalEntry("sees", Category.TVERB, np.zeros((4, 3, 4))))
        with pytest.raises(DimensionError):
            lex.add(LexicalEntry("red", Category.ADJECTIVE, np.zeros((3, 3))))

    def test_unique_words(self):
        lex = Lexicon(TENSOR, noun_dim=2)
        lex.add(noun("cat", [1.0, 0.0]))
        with pytest.raises(ValueError):
            lex.add(noun("cat", [0.0, 1.0]))

    def test_nouns_unit(self):
        lex = Lexicon(TENSOR, noun_dim=2)
        with pytest.raises(ValueError):
            lex.add(LexicalEntry("cat", Category.NOUN, [3.0, 4.0]))

    def test_hrr_dims_follow_backend(self):
        lex = Lexicon(Backend.hrr(8))
        assert lex.noun_dim == lex.sentence_dim == 8
        with pytest.raises(DimensionError):
            Lexicon(Backend.hrr(8), noun_dim=4)

    def test_payload_read_only(self):
        e = noun("cat", [1.0, 0.0])
        with pytest.raises(ValueError):
            e.payload[0] = 2.0

    def test_words_by_category(self):
        lex = Lexicon(TENSOR, noun_dim=2)
        lex.add(noun("cat", [1.0, 0.0]))
        lex.add(LexicalEntry("red", Category.ADJECTIVE, np.eye(2)))
        assert lex.words(Category.NOUN) == ["cat"]
        assert lex.words("adjective") == ["red"]

    @pytest.mark.parametrize("backend", [TENSOR, Backend.hrr(6)])
    def test_json_round_trip_is_bit_exact(self, backend):
        rng = make_rng(1)
        lex = Lexicon(backend, noun_dim=6, sentence_dim=6)
        lex.add(noun("cat", rng.standard_normal(6)))
        shape = (6, 6) if backend.is_tensor else (6,)
        lex.add(LexicalEntry("red", Category.ADJECTIVE, rng.standard_normal(shape) / 3))
        if backend.is_tensor:
            lex.add(LexicalEntry("sees", Category.TVERB, rng.standard_normal((6, 6, 6))))
        back, meta = loads_lexicon(dumps_lexicon(lex, {"note": "x"}))
        assert meta == {"note": "x"}
        assert back.backend == backend and back.words() == lex.words()
        for e in lex:
            assert back[e.word].category is e.category
            assert np.array_equal(back[e.word].payload, e.payload)

    def test_bad_format_version(self):
        doc = Lexicon(TENSOR, noun_dim=2).to_json()
        doc["format_version"] = "99"
        with pytest.raises(ValueError):
            Lexicon.from_json(doc)


class TestApplication:
    def test_identity_adjective(self):
        n = noun("cat", make_rng(0).standard_normal(5))
        adj = LexicalEntry("same", Category.ADJECTIVE, np.eye(5))
        np.testing.assert_array_equal(apply_adjective(adj, n, TENSOR), n.payload)

    def test_pet_fish_hand_contraction(self):
        exact = FeatureBasis.exact()
        q = compose_query(build_pet_adjective(exact), "Fish", exact, TENSOR)
        np.testing.assert_allclose(q, [2.16, 0.51, 0.0, 0.63, 0.0, 0.89, 0.0], atol=1e-12)

    def test_normalize_flag(self):
        n = noun("cat", [1.0, 0.0])
        adj = LexicalEntry("big", Category.ADJECTIVE, 3 * np.eye(2))
        np.testing.assert_allclose(apply_adjective(adj, n, TENSOR), [3.0, 0.0])
        np.testing.assert_allclose(apply_adjective(adj, n, TENSOR, normalize_output=True), [1.0, 0.0])

    def test_category_mismatch(self):
        n = noun("cat", [1.0, 0.0])
        with pytest.raises(CategoryError):
            apply_adjective(n, n, TENSOR)
        with pytest.raises(CategoryError):
            apply_intransitive(LexicalEntry("red", Category.ADJECTIVE, np.eye(2)), n, TENSOR)

    def test_linearity(self):
        rng = make_rng(2)
        adj = LexicalEntry("red", Category.ADJECTIVE, rng.standard_normal((6, 6)))
        x, y = rng.standard_normal(6), rng.standard_normal(6)
        a, b = 0.3, -1.7
        lhs = apply_adjective(adj, LexicalEntry("z", Category.NOUN, a * x + b * y), TENSOR)
        rhs = a * apply_adjective(adj, LexicalEntry("x", Category.NOUN, x), TENSOR) + b * apply_adjective(
            adj, LexicalEntry("y", Category.NOUN, y), TENSOR
        )
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_hrr_pet_fish_near_tensor_at_2048(self):
        vals = [hrr_pet_projection_cosine(2048, s) for s in range(20)]
        assert np.mean(vals) >= 0.8

    def test_hrr_pet_fish_approaches_tensor_with_dim(self):
        means = [np.mean([hrr_pet_projection_cosine(d, s) for s in range(20)]) for d in (256, 1024, 4096)]
        assert means[0] <= means[1] <= means[2]


class TestBuilders:
    def test_red_car_exact_under_orthogonal_nouns(self):
        c, a, w = orthonormal(3, 8, seed=3)
        rc, ra, rw = orthonormal(3, 8, seed=4)
        red = build_adjective([(rc, c), (ra, a), (rw, w)], TENSOR, "red")
        np.testing.assert_allclose(apply_adjective(red, noun("car", c), TENSOR), rc, atol=1e-12)

    def test_red_car_hrr_cleanup(self):
        hits = 0
        b = Backend.hrr(1024)
        for t in range(100):
            rng = derive_rng(41, t)
            c, a, w, rc, ra, rw = (random_unit(1024, rng) for _ in range(6))
            red = build_adjective([(rc, c), (ra, a), (rw, w)], b, "red")
            mem = CleanupMemory({"rc": rc, "ra": ra, "rw": rw})
            hits += cleanup(apply_adjective(red, noun("car", c), b), mem)[0] == "rc"
        assert hits >= 95

    def test_single_pair_adjective(self):
        rng = make_rng(5)
        n = noun("cat", rng.standard_normal(6))
        an = rng.standard_normal(6)
        adj = build_adjective([(an, n.payload)], TENSOR)
        np.testing.assert_allclose(apply_adjective(adj, n, TENSOR), an, atol=1e-12)

    def test_randomized_round_trip(self):
        for seed in range(10):
            k = 1 + seed % 4
            nouns = orthonormal(k, 6, seed)
            fillers = [make_rng(100 + seed).standard_normal(6) for _ in range(k)]
            adj = build_adjective(list(zip(fillers, nouns)), TENSOR)
            for f, n in zip(fillers, nouns):
                np.testing.assert_allclose(apply_adjective(adj, noun("n", n), TENSOR), f, atol=1e-10)

    def test_iverb_three_subjects(self):
        subjects = orthonormal(3, 5, seed=6)
        sents = [make_rng(7 + i).standard_normal(4) for i in range(3)]
        verb = build_iverb(list(zip(subjects, sents)), TENSOR)
        assert verb.payload.shape == (4, 5)
        for n, s in zip(subjects, sents):
            np.testing.assert_allclose(apply_intransitive(verb, noun("n", n), TENSOR), s, atol=1e-10)

    def test_zero_verb(self):
        verb = LexicalEntry("rests", Category.IVERB, np.zeros((3, 4)))
        assert np.array_equal(apply_intransitive(verb, noun("n", [1.0, 0, 0, 0]), TENSOR), np.zeros(3))

    def test_tverb_exact_and_asymmetric(self):
        ns = orthonormal(3, 5, seed=8)
        rng = make_rng(9)
        sent = {(i, j): rng.standard_normal(4) for i in range(3) for j in range(3)}
        verb = build_tverb([(ns[i], sent[i, j], ns[j]) for i in range(3) for j in range(3)], TENSOR, "sees")
        assert verb.payload.shape == (5, 4, 5)
        for i in range(3):
            for j in range(3):
                np.testing.assert_allclose(
                    apply_transitive(verb, noun("s", ns[i]), noun("o", ns[j]), TENSOR), sent[i, j], atol=1e-10
                )
        ab = apply_transitive(verb, noun("s", ns[0]), noun("o", ns[1]), TENSOR)
        ba = apply_transitive(verb, noun("s", ns[1]), noun("o", ns[0]), TENSOR)
        np.testing.assert_allclose(ba, sent[1, 0], atol=1e-10)
        assert not np.allclose(ab, ba)

    def test_tverb_zero_object(self):
        ns = orthonormal(2, 3, seed=1)
        verb = build_tverb([(ns[0], np.ones(2), ns[1])], TENSOR)
        zero_obj = LexicalEntry("nothing", Category.NOUN, np.zeros(3))
        assert np.array_equal(apply_transitive(verb, noun("s", ns[0]), zero_obj, TENSOR), np.zeros(2))

    def test_tverb_hrr_subject_then_object(self):
        b = Backend.hrr(2048)
        rng = make_rng(10)
        s, o, sent = (random_unit(2048, rng) for _ in range(3))
        verb = build_tverb([(s, sent, o)], b)
        out = apply_transitive(verb, noun("s", s), noun("o", o), b)
        assert cosine(out, sent) > 0.4

    @pytest.mark.parametrize("builder", [build_adjective, build_iverb, build_tverb])
    def test_empty(self, builder):
        with pytest.raises(EmptyStructureError):
            builder([], TENSOR)


class TestAdditiveAndConjunctive:
    def tags(self, dim=8):
        return RoleTagSet.generate(["adj", "noun"], dim, TENSOR, make_rng(0))

    @pytest.mark.parametrize("s,expected", [(0.5, 0.75), (0.0, 0.5), (0.9, 0.95), (-0.4, 0.3)])
    def test_additive_boost(self, s, expected):
        cat, dog = pair_with_cosine(s, 8, seed=1)
        fluffy = orthonormal(3, 8, seed=2)[2]
        tags = self.tags()
        fc = additive_compose([(fluffy, "adj"), (cat, "noun")], tags, TENSOR)
        fd = additive_compose([(fluffy, "adj"), (dog, "noun")], tags, TENSOR)
        assert np.linalg.norm(fc) == pytest.approx(1.0, abs=1e-12)
        assert cosine(fc, fd) == pytest.approx(expected, abs=1e-10)
        assert cosine(fc, fd) == pytest.approx((1 + s) / 2, abs=1e-10)

    def test_single_word_norm_one(self):
        v = orthonormal(1, 8, seed=3)[0]
        out = additive_compose([(v, "adj")], self.tags(), TENSOR)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)

    def test_tags_orthonormal(self):
        tags = RoleTagSet.generate(["a", "b", "c"], 16, TENSOR, make_rng(4))
        assert abs(np.dot(tags["a"], tags["b"])) < 1e-10
        assert np.linalg.norm(tags["c"]) == pytest.approx(1.0)

    def test_repeated_tag(self):
        v = np.ones(8) / math.sqrt(8)
        with pytest.raises(ValueError):
            additive_compose([(v, "adj"), (v, "adj")], self.tags(), TENSOR)

    def test_conjunctive_identity_tensor(self):
        rng = make_rng(5)
        for _ in range(100):
            p, a, b = (random_unit(12, rng) for _ in range(3))
            bound, raw = conjunctive_similarity_check(p, a, b, TENSOR)
            assert bound == pytest.approx(raw, abs=1e-10)

    def test_conjunctive_equal_inputs(self):
        p, a = orthonormal(2, 6)
        assert conjunctive_similarity_check(p, a, a, TENSOR) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_conjunctive_hrr(self):
        diffs = []
        b = Backend.hrr(2048)
        for t in range(50):
            rng = derive_rng(51, t)
            p, a, c = (random_unit(2048, rng) for _ in range(3))
            bound, raw = conjunctive_similarity_check(p, a, c, b)
            diffs.append(abs(bound - raw))
        assert np.mean(diffs) < 0.1

    def test_conjunctive_dim_mismatch(self):
        with pytest.raises(DimensionError):
            conjunctive_similarity_check(np.ones(3), np.ones(3), np.ones(4), TENSOR)
