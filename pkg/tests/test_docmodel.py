import numpy as np
import pytest

from qtransfer.docmodel import (
    DocModelConfig,
    Vocabulary,
    pair_gradient,
    pair_objective,
    train_doc_model,
    wl_corpus,
)
from qtransfer.graphs import stratified_corpus


@pytest.fixture(scope="module")
def small_corpus():
    graphs = stratified_corpus(10, 4, 4, seed=0)
    return [wl_corpus(g) for g in graphs]


@pytest.fixture(scope="module")
def small_model(small_corpus):
    cfg = DocModelConfig(dims=16, epochs=30, seed=0)
    return train_doc_model(small_corpus, cfg)


class TestWlCorpus:
    def test_token_count(self, k4):
        assert len(wl_corpus(k4, depth=2)) == 4 * 3

    def test_iteration_prefixes(self, triangle):
        tokens = wl_corpus(triangle, depth=2)
        prefixes = sorted({t.split("_")[0] for t in tokens})
        assert prefixes == ["0", "1", "2"]

    def test_regular_graph_uniform_tokens(self, c6):
        # all nodes of a cycle share one color at every iteration
        tokens = wl_corpus(c6, depth=2)
        assert len(set(tokens)) == 3

    def test_path_has_distinct_colors(self, path3):
        tokens = wl_corpus(path3, depth=1)
        # degree-1 endpoints vs degree-2 middle at iteration 0
        iter0 = [t for t in tokens if t.startswith("0_")]
        assert len(set(iter0)) == 2

    def test_rejects_depth_zero(self, triangle):
        with pytest.raises(ValueError):
            wl_corpus(triangle, depth=0)

    def test_permutation_invariant_multiset(self, k4):
        perm = k4.permute([2, 0, 3, 1])
        assert sorted(wl_corpus(k4)) == sorted(wl_corpus(perm))


class TestVocabulary:
    def test_sorted_unique_tokens(self):
        vocab = Vocabulary([["b", "a"], ["a", "c"]])
        assert vocab.tokens == ["a", "b", "c"]

    def test_neg_probs_frequency_proportional(self):
        vocab = Vocabulary([["a", "a", "a", "b"]])
        assert np.allclose(vocab.neg_probs, [0.75, 0.25])

    def test_encode_skips_unknown(self):
        vocab = Vocabulary([["a", "b"]])
        assert vocab.encode(["b", "zzz", "a"]) == [1, 0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Vocabulary([[], []])

    def test_keep_probs_bounded(self, small_corpus):
        vocab = Vocabulary(small_corpus)
        assert np.all(vocab.keep_probs > 0) and np.all(vocab.keep_probs <= 1)


class TestPairObjective:
    def test_positive(self):
        rng = np.random.default_rng(0)
        d, p = rng.normal(size=8), rng.normal(size=8)
        n = rng.normal(size=(5, 8))
        assert pair_objective(d, p, n) > 0

    def test_perfect_separation_near_zero(self):
        d = np.array([10.0, 0.0])
        pos = np.array([10.0, 0.0])
        negs = np.array([[-10.0, 0.0]])
        assert pair_objective(d, pos, negs) < 1e-6

    @pytest.mark.parametrize("seed", range(5))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.normal(scale=0.5, size=6)
        pos = rng.normal(scale=0.5, size=6)
        negs = rng.normal(scale=0.5, size=(4, 6))
        grad_doc, grad_pos, grad_negs = pair_gradient(d, pos, negs)
        eps = 1e-6
        for i in range(6):
            step = np.zeros(6)
            step[i] = eps
            fd = (pair_objective(d + step, pos, negs) - pair_objective(d - step, pos, negs)) / (
                2 * eps
            )
            assert grad_doc[i] == pytest.approx(fd, abs=1e-5)
            fd = (pair_objective(d, pos + step, negs) - pair_objective(d, pos - step, negs)) / (
                2 * eps
            )
            assert grad_pos[i] == pytest.approx(fd, abs=1e-5)
        step = np.zeros((4, 6))
        step[2, 3] = eps
        fd = (pair_objective(d, pos, negs + step) - pair_objective(d, pos, negs - step)) / (2 * eps)
        assert grad_negs[2, 3] == pytest.approx(fd, abs=1e-5)


class TestTraining:
    def test_shapes(self, small_model, small_corpus):
        assert small_model.doc_vectors.shape == (len(small_corpus), 16)
        assert small_model.token_vectors.shape == (len(small_model.vocab), 16)

    def test_loss_decreases(self, small_model):
        hist = small_model.loss_history
        assert hist[-1] < hist[0]

    def test_deterministic(self, small_corpus):
        cfg = DocModelConfig(dims=8, epochs=5, seed=3)
        a = train_doc_model(small_corpus, cfg)
        b = train_doc_model(small_corpus, cfg)
        assert np.array_equal(a.doc_vectors, b.doc_vectors)
        assert np.array_equal(a.token_vectors, b.token_vectors)

    def test_seed_changes_result(self, small_corpus):
        a = train_doc_model(small_corpus, DocModelConfig(dims=8, epochs=5, seed=0))
        b = train_doc_model(small_corpus, DocModelConfig(dims=8, epochs=5, seed=1))
        assert not np.array_equal(a.doc_vectors, b.doc_vectors)

    def test_rejects_single_document(self):
        with pytest.raises(ValueError):
            train_doc_model([["a", "b"]], DocModelConfig())


class TestInference:
    def test_training_doc_recovers_stored_row(self, small_model, small_corpus):
        # stored rows sit at the convex projection, so re-inference lands there
        vec = small_model.infer(small_corpus[0])
        assert np.allclose(vec, small_model.doc_vectors[0], atol=1e-5)

    def test_deterministic(self, small_model, small_corpus):
        a = small_model.infer(small_corpus[3])
        b = small_model.infer(small_corpus[3])
        assert np.array_equal(a, b)

    def test_identical_docs_identical_vectors(self, small_model, small_corpus):
        a = small_model.infer(small_corpus[1])
        b = small_model.infer(list(small_corpus[1]))
        assert np.array_equal(a, b)

    def test_no_tokens_gives_zero_vector(self, small_model, caplog):
        import logging

        with caplog.at_level(logging.WARNING):
            vec = small_model.infer(["never_seen_token"])
        assert np.array_equal(vec, np.zeros(16))
        assert "no in-vocabulary tokens" in caplog.text

    def test_nearest_training_doc_is_self(self, small_model, small_corpus):
        # retrieval check on a handful of docs
        rows = small_model.doc_vectors
        for d in [0, 5, 11, 17]:
            vec = small_model.infer(small_corpus[d])
            dists = np.linalg.norm(rows - vec, axis=1)
            assert int(np.argmin(dists)) == d
