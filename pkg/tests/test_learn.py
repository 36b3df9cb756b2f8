import numpy as np
import pytest

from semg import (
    Distribution,
    JointTable,
    TruthParam,
    eval_truth_param,
    fit_truth_semantic_kl,
    gaussian_truth_from_transition,
    semantic_bayes,
    truth_from_joint,
    word_similarity,
)
from semg.errors import NonSquare
from semg.learn import semantic_kl_objective

from conftest import random_joint

J2_MI = 0.2780719051126377


def grid(a, b, step):
    n = int(round((b - a) / step)) + 1
    return a + step * np.arange(n)


class TestTabularFit:
    def test_j2_label_is_matched_column(self, j2, half_half):
        post = Distribution(("x1", "x2"), np.array([0.8, 0.2]))
        fit = fit_truth_semantic_kl(post, half_half, "tabular")
        assert np.allclose(fit.param.values, [1.0, 0.25], atol=1e-12)
        assert fit.objective == pytest.approx(J2_MI, abs=1e-12)

    def test_recovers_matched_channel_on_random_joints(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            j = random_joint(rng, 4, 3)
            chan = truth_from_joint(j)
            px = j.px()
            py = j.py().probs
            for col in range(3):
                post = Distribution(j.x_support, j.cells[:, col] / py[col])
                fit = fit_truth_semantic_kl(post, px, "tabular")
                assert np.allclose(fit.param.values, chan.columns[:, col],
                                   atol=1e-9)

    def test_uninformative_posterior_flagged(self, half_half):
        fit = fit_truth_semantic_kl(half_half, half_half, "tabular")
        assert fit.degenerate
        assert fit.objective == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(fit.param.values, 1.0)


class TestGaussianFit:
    def test_self_consistency_recovers_generator(self):
        x = grid(0, 140, 1.0)
        prior_shape = np.exp(-((x - 60.0) ** 2) / (2 * 30.0 ** 2))
        px = Distribution(tuple(x.tolist()), prior_shape / prior_shape.sum())
        gen = eval_truth_param(TruthParam.gaussian(70, 9), x)
        post = semantic_bayes(px, gen)
        fit = fit_truth_semantic_kl(post, px, "gaussian")
        mu_step = 140 / 63        # default grid resolution
        assert fit.param.mu == pytest.approx(70.0, abs=mu_step)
        assert fit.param.sigma == pytest.approx(9.0, abs=mu_step)

    def test_objective_beats_every_grid_member(self):
        x = grid(0, 100, 2.0)
        px = Distribution(tuple(x.tolist()), np.full(len(x), 1 / len(x)))
        gen = eval_truth_param(TruthParam.gaussian(40, 12), x)
        post = semantic_bayes(px, gen)
        fit = fit_truth_semantic_kl(post, px, "gaussian")
        rng = np.random.default_rng(1)
        for _ in range(200):
            mu = rng.uniform(0, 100)
            sigma = rng.uniform(1, 100)
            col = np.exp(-((x - mu) ** 2) / (2 * sigma ** 2))
            other = semantic_kl_objective(post.probs, px.probs, col)
            assert fit.objective >= other - 1e-9

    def test_flat_posterior_is_degenerate(self):
        x = grid(0, 10, 1.0)
        px = Distribution(tuple(x.tolist()), np.full(len(x), 1 / len(x)))
        fit = fit_truth_semantic_kl(px, px, "gaussian")
        assert fit.degenerate


class TestLogisticFit:
    def test_recovers_generator(self):
        x = grid(0, 120, 0.5)
        prior_shape = np.exp(-((x - 50.0) ** 2) / (2 * 15.0 ** 2))
        px = Distribution(tuple(x.tolist()), prior_shape / prior_shape.sum())
        gen = eval_truth_param(TruthParam.logistic(60, 0.8), x)
        post = semantic_bayes(px, gen)
        fit = fit_truth_semantic_kl(post, px, "logistic")
        ref = semantic_kl_objective(post.probs, px.probs, gen)
        # one golden pass per parameter resolves to grid-step accuracy
        assert fit.objective >= ref - 5e-3
        assert fit.param.x0 == pytest.approx(60.0, abs=120 / 63)
        assert fit.param.k > 0


class TestGaussianFromTransition:
    def test_gaussian_row_is_exact(self):
        x = grid(0, 140, 1.0)
        row = np.exp(-((x - 70.0) ** 2) / 162.0)     # sigma^2 = 81
        fit = gaussian_truth_from_transition(row, x)
        assert fit.param.mu == pytest.approx(70.0, abs=1e-3)
        assert fit.param.sigma == pytest.approx(9.0, abs=1e-3)
        assert not fit.sigma_floored
        assert not fit.non_gaussian

    def test_indicator_row_hits_sigma_floor(self):
        x = grid(0, 10, 1.0)
        row = np.zeros(len(x))
        row[4] = 1.0
        fit = gaussian_truth_from_transition(row, x)
        assert fit.sigma_floored
        assert fit.param.sigma == pytest.approx(1e-6)

    def test_bimodal_row_is_moment_matched_and_flagged(self):
        x = grid(0, 140, 1.0)
        row = (np.exp(-((x - 30.0) ** 2) / (2 * 25.0)) +
               np.exp(-((x - 110.0) ** 2) / (2 * 25.0)))
        w = row / row.sum()
        mu_expect = float(w @ x)
        sig_expect = float(np.sqrt(w @ (x - mu_expect) ** 2))
        fit = gaussian_truth_from_transition(row, x)
        assert fit.param.mu == pytest.approx(mu_expect, abs=1e-9)
        assert fit.param.sigma == pytest.approx(sig_expect, abs=1e-9)
        assert fit.non_gaussian
        assert fit.excess_kurtosis < -1.0

    def test_prior_weighting(self):
        x = grid(0, 10, 1.0)
        row = np.ones(len(x))
        px = Distribution(tuple(x.tolist()),
                          np.arange(1.0, 12.0) / np.arange(1.0, 12.0).sum())
        fit = gaussian_truth_from_transition(row, x, px)
        assert fit.param.mu == pytest.approx(float(px.probs @ x), abs=1e-12)


class TestWordSimilarity:
    def test_j2_as_cooccurrence(self):
        j = JointTable.from_weights([[0.4, 0.1], [0.1, 0.4]],
                                    ("w1", "w2"), ("w1", "w2"))
        sim = word_similarity(j)
        assert np.allclose(sim.values, [[1.0, 0.25], [0.25, 1.0]], atol=1e-12)

    def test_zero_cell_maps_to_zero(self):
        j = JointTable.from_weights([[0.5, 0.0], [0.2, 0.3]],
                                    ("a", "b"), ("a", "b"))
        sim = word_similarity(j)
        assert sim.values[0, 1] == 0.0

    def test_independent_corpus_is_all_ones(self):
        j = JointTable.from_weights(np.outer([0.4, 0.6], [0.4, 0.6]),
                                    ("a", "b"), ("a", "b"))
        assert np.allclose(word_similarity(j).values, 1.0, atol=1e-12)

    def test_symmetric_input_gives_symmetric_output(self):
        rng = np.random.default_rng(8)
        c = rng.random((4, 4))
        c = (c + c.T) / 2
        j = JointTable.from_weights(c / c.sum(), tuple("abcd"), tuple("abcd"))
        sim = word_similarity(j)
        assert np.allclose(sim.values, sim.values.T, atol=1e-12)

    def test_count_rescaling_invariance(self):
        counts = np.array([[4.0, 1.0], [1.0, 4.0]])
        j1 = JointTable.from_weights(counts / counts.sum(),
                                     ("a", "b"), ("a", "b"))
        j2 = JointTable.from_weights(counts * 17.0 / (counts * 17.0).sum(),
                                     ("a", "b"), ("a", "b"))
        assert np.allclose(word_similarity(j1).values,
                           word_similarity(j2).values, atol=1e-12)

    def test_non_square_rejected(self, j2):
        wide = JointTable.from_weights(np.full((2, 3), 1 / 6),
                                       ("a", "b"), ("u", "v", "w"))
        with pytest.raises(NonSquare):
            word_similarity(wide)
