import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semg import (
    Distribution,
    JointTable,
    SemanticChannel,
    TruthParam,
    eval_truth_param,
    logical_probability,
    minmi_match_from_semantic,
    relatedness,
    semantic_bayes,
    truth_from_joint,
    truth_from_likelihood,
    validate_distribution,
)
from semg.errors import (
    EmptySupport,
    NegativeMass,
    NonPositiveSigma,
    SumOutOfTolerance,
    ZeroLogicalProbability,
)

from conftest import random_joint


class TestValidateDistribution:
    def test_identity_case(self):
        d = validate_distribution([0.5, 0.5], ("a", "b"))
        assert np.allclose(d.probs, [0.5, 0.5])

    def test_negative_mass(self):
        with pytest.raises(NegativeMass):
            validate_distribution([0.5, -0.1], ("a", "b"))

    def test_empty_support(self):
        with pytest.raises(EmptySupport):
            validate_distribution([], ())

    def test_sum_out_of_tolerance(self):
        with pytest.raises(SumOutOfTolerance):
            validate_distribution([0.5, 0.6], ("a", "b"))

    def test_renormalizes_within_ingest_tolerance(self):
        d = validate_distribution([0.5, 0.5 + 5e-7], ("a", "b"))
        assert abs(d.probs.sum() - 1.0) < 1e-15

    def test_j2_cells_are_a_valid_joint(self):
        j = JointTable.from_weights([[0.4, 0.1], [0.1, 0.4]], ("a", "b"), ("c", "d"))
        assert abs(j.cells.sum() - 1.0) < 1e-12


class TestRelatedness:
    def test_j2_values(self, j2):
        rel = relatedness(j2)
        # oracle: direct elementwise division by the marginal product
        px = j2.cells.sum(axis=1)
        py = j2.cells.sum(axis=0)
        expect = j2.cells / np.outer(px, py)
        assert np.allclose(rel.values, expect, atol=1e-15)
        assert np.allclose(rel.values, [[1.6, 0.4], [0.4, 1.6]])
        assert np.allclose(rel.mm, [1.6, 1.6])

    def test_independent_joint_is_flat(self):
        px = np.array([0.3, 0.7])
        py = np.array([0.2, 0.5, 0.3])
        j = JointTable.from_weights(np.outer(px, py), ("a", "b"), ("c", "d", "e"))
        assert np.allclose(relatedness(j).values, 1.0)

    def test_reconstruction_identities(self, j2):
        rel = relatedness(j2)
        px = j2.px().probs
        py = j2.py().probs
        # P(x) m(x, y1) = P(x | y1)
        post = px * rel.values[:, 0]
        assert np.allclose(post, [0.8, 0.2], atol=1e-12)
        # m(x_i, y) P(y) = P(y | x_i)
        chan = rel.values * py[None, :]
        assert np.allclose(chan, j2.shannon_channel(), atol=1e-12)

    def test_marginal_consistency(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            j = random_joint(rng, 4, 3)
            rel = relatedness(j)
            px = j.px().probs
            assert np.allclose(px @ rel.values, 1.0, atol=1e-9)

    def test_zero_marginal_column_dropped_with_warning(self):
        cells = np.array([[0.5, 0.0], [0.5, 0.0]])
        j = JointTable.from_weights(cells, ("a", "b"), ("c", "d"))
        with pytest.warns(UserWarning, match="zero-marginal"):
            rel = relatedness(j)
        assert rel.y_support == ("c",)


class TestTruthFromJoint:
    def test_j2_columns(self, j2):
        chan = truth_from_joint(j2)
        assert np.allclose(chan.columns[:, 0], [1.0, 0.25], atol=1e-12)
        assert np.allclose(chan.columns[:, 1], [0.25, 1.0], atol=1e-12)

    def test_column_max_is_one(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            chan = truth_from_joint(random_joint(rng, 5, 4))
            assert np.allclose(chan.columns.max(axis=0), 1.0, atol=1e-12)

    def test_diagonal_joint_is_crisp(self):
        j = JointTable.from_weights(np.eye(3) / 3, ("a", "b", "c"), ("u", "v", "w"))
        assert np.allclose(truth_from_joint(j).columns, np.eye(3))

    def test_independent_joint_is_all_true(self):
        j = JointTable.from_weights(np.outer([0.4, 0.6], [0.5, 0.5]),
                                    ("a", "b"), ("c", "d"))
        assert np.allclose(truth_from_joint(j).columns, 1.0)


class TestLogicalProbability:
    def test_j2_matched_equals_inverse_mm(self, j2, half_half):
        chan = truth_from_joint(j2)
        t = logical_probability(chan, half_half)
        assert np.allclose(t, [0.625, 0.625], atol=1e-12)
        mm = relatedness(j2).mm
        assert np.allclose(t, 1.0 / mm, atol=1e-12)

    def test_vacuous_label(self, half_half):
        chan = SemanticChannel(("x1", "x2"), ("y",), np.ones((2, 1)))
        assert logical_probability(chan, half_half)[0] == pytest.approx(1.0)

    def test_crisp_partition_gives_set_probability(self):
        px = Distribution(("a", "b", "c"), np.array([0.2, 0.3, 0.5]))
        cols = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        chan = SemanticChannel(("a", "b", "c"), ("y1", "y2"), cols)
        assert np.allclose(logical_probability(chan, px), [0.5, 0.5])


class TestSemanticBayes:
    def test_matched_channel_reproduces_posterior(self, half_half):
        out = semantic_bayes(half_half, [1.0, 0.25])
        assert np.allclose(out.probs, [0.8, 0.2], atol=1e-12)

    def test_vacuous_truth_returns_prior(self, half_half):
        out = semantic_bayes(half_half, [1.0, 1.0])
        assert np.allclose(out.probs, half_half.probs)

    def test_skewed_prior(self):
        px = Distribution(("a", "b"), np.array([0.9, 0.1]))
        out = semantic_bayes(px, [1.0, 0.25])
        assert np.allclose(out.probs, [0.9 / 0.925, 0.025 / 0.925], atol=1e-12)
        assert out.probs[0] == pytest.approx(0.973, abs=5e-4)

    def test_zero_mass_raises(self, half_half):
        with pytest.raises(ZeroLogicalProbability):
            semantic_bayes(half_half, [0.0, 0.0])

    def test_reproduces_all_posteriors_of_random_joints(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            j = random_joint(rng, 4, 3)
            chan = truth_from_joint(j)
            px = j.px()
            py = j.py().probs
            for col in range(3):
                post = semantic_bayes(px, chan.columns[:, col])
                expect = j.cells[:, col] / py[col]
                assert np.allclose(post.probs, expect, atol=1e-12)


class TestTruthFromLikelihood:
    def test_j2_case(self, half_half):
        like = Distribution(("x1", "x2"), np.array([0.8, 0.2]))
        col, t_theta = truth_from_likelihood(half_half, like)
        assert t_theta == pytest.approx(0.625, abs=1e-12)
        assert np.allclose(col, [1.0, 0.25], atol=1e-12)

    def test_uninformative(self, half_half):
        col, t_theta = truth_from_likelihood(half_half, half_half)
        assert t_theta == pytest.approx(1.0)
        assert np.allclose(col, 1.0)

    @given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6),
           st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_round_trip(self, prior_w, like_w):
        n = min(len(prior_w), len(like_w))
        prior_w, like_w = prior_w[:n], like_w[:n]
        if sum(like_w) <= 0:
            like_w = [1.0] * n
        support = tuple(f"v{i}" for i in range(n))
        px = Distribution(support, np.array(prior_w) / sum(prior_w))
        like = Distribution(support, np.array(like_w) / sum(like_w))
        col, _ = truth_from_likelihood(px, like)
        back = semantic_bayes(px, col)
        assert np.allclose(back.probs, like.probs, atol=1e-12)


class TestMinMIMatch:
    def test_j2(self, j2, half_half):
        chan = truth_from_joint(j2)
        match = minmi_match_from_semantic(chan, half_half)
        assert np.allclose(match.py.probs, [0.5, 0.5], atol=1e-12)
        assert np.allclose(match.rows[0], [0.8, 0.2], atol=1e-12)
        assert np.allclose(match.row_defects, 0.0, atol=1e-12)

    def test_single_vacuous_label(self, half_half):
        chan = SemanticChannel(("x1", "x2"), ("y",), np.ones((2, 1)))
        match = minmi_match_from_semantic(chan, half_half)
        assert match.py.probs[0] == pytest.approx(1.0)
        assert np.allclose(match.rows, 1.0)

    def test_asymmetric_channel_reports_defect(self, half_half):
        cols = np.array([[1.0, 0.3, 0.2], [0.4, 1.0, 1.0]])
        chan = SemanticChannel(("x1", "x2"), ("a", "b", "c"), cols)
        match = minmi_match_from_semantic(chan, half_half)
        assert match.py.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(match.row_defects).max() > 1e-3

    def test_py_always_sums_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            cols = rng.random((4, 3))
            cols /= cols.max(axis=0)
            chan = SemanticChannel(tuple("abcd"), ("u", "v", "w"), cols)
            px = Distribution(tuple("abcd"), np.full(4, 0.25))
            match = minmi_match_from_semantic(chan, px)
            assert match.py.probs.sum() == pytest.approx(1.0, abs=1e-12)


class TestEvalTruthParam:
    def test_gaussian_peak(self):
        col = eval_truth_param(TruthParam.gaussian(70, 9), [70.0])
        assert col[0] == pytest.approx(1.0)

    def test_logistic_midpoint(self):
        col = eval_truth_param(TruthParam.logistic(60, 0.8), [60.0])
        assert col[0] == pytest.approx(0.5)

    def test_gaussian_unit(self):
        col = eval_truth_param(TruthParam.gaussian(0, 1), [1.0])
        assert col[0] == pytest.approx(np.exp(-0.5), abs=1e-12)

    def test_sigma_must_be_positive(self):
        with pytest.raises(NonPositiveSigma):
            TruthParam.gaussian(0, 0.0)

    def test_tabular_copy(self):
        p = TruthParam.tabular([0.2, 1.0, 0.5])
        assert np.allclose(eval_truth_param(p, [1.0, 2.0, 3.0]), [0.2, 1.0, 0.5])
