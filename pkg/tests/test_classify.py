import numpy as np
import pytest

from semg import (
    Distribution,
    Partition,
    SemanticChannel,
    exhaustive_threshold_mi,
    logical_probability,
    maxmi_classify,
    multilabel_classify,
    threshold_partition,
    truth_from_joint,
)
from semg.errors import DimensionMismatch, NoTrueLabel


def grid(a, b, step):
    n = int(round((b - a) / step)) + 1
    return a + step * np.arange(n)


class TestMultilabelClassify:
    def test_specific_label_wins(self):
        # age-20 instance: "adult" (0.862 bits) beats "youth" (0.737 bits)
        px = Distribution(("child", "grown"), np.array([0.5, 0.5]))
        cols = np.array([[1.0, 0.1, 0.2], [0.1, 1.0, 1.0]])
        chan = SemanticChannel(("child", "grown"), ("child", "adult", "youth"),
                               cols)
        t_theta = logical_probability(chan, px)
        assert np.allclose(t_theta, [0.55, 0.55, 0.6])
        assert multilabel_classify(1, chan, t_theta) == 1

    def test_crisp_partition_is_set_membership(self):
        px = Distribution(("a", "b", "c"), np.array([0.2, 0.5, 0.3]))
        cols = np.array([[1.0, 0], [1.0, 0], [0, 1.0]])
        chan = SemanticChannel(px.support, ("left", "right"), cols)
        t_theta = logical_probability(chan, px)
        assert multilabel_classify(0, chan, t_theta) == 0
        assert multilabel_classify(1, chan, t_theta) == 0
        assert multilabel_classify(2, chan, t_theta) == 1

    def test_rare_label_beats_broad_label(self):
        # both labels fully true at x, the rarer one carries more information
        px = Distribution(("u", "v"), np.array([0.5, 0.5]))
        cols = np.array([[1.0, 1.0], [0.1, 0.0]])
        chan = SemanticChannel(px.support, ("broad", "rare"), cols)
        t_theta = logical_probability(chan, px)    # (0.55, 0.5)
        assert multilabel_classify(0, chan, t_theta) == 1

    def test_no_true_label(self, half_half):
        chan = SemanticChannel(("x1", "x2"), ("y",), np.array([[1.0], [0.0]]))
        t_theta = logical_probability(chan, half_half)
        with pytest.raises(NoTrueLabel):
            multilabel_classify(1, chan, t_theta)


@pytest.fixture(scope="module")
def binary_test():
    """Medical-test setup: P(x)=(0.8,0.2), z|x ~ N(0,1) vs N(2,1)."""
    z = grid(-4, 6, 0.05)
    pzx = np.stack([np.exp(-(z - 0.0) ** 2 / 2), np.exp(-(z - 2.0) ** 2 / 2)])
    pzx /= pzx.sum(axis=1, keepdims=True)
    px = Distribution(("healthy", "sick"), np.array([0.8, 0.2]))
    return px, pzx, z


class TestMaxMI:
    def test_bad_init_reaches_sweep_maximum(self, binary_test):
        px, pzx, z = binary_test
        best_mi, best_t = exhaustive_threshold_mi(px, pzx, z)
        part, trace = maxmi_classify(px, pzx, threshold_partition(z, -1.0))
        assert len(trace.steps) <= 10
        assert trace.steps[-1].shannon_mi == pytest.approx(best_mi, abs=1e-6)
        # converged boundary within one grid step of the oracle threshold
        boundary = z[np.argmax(part.assignment == 1)]
        assert abs(boundary - best_t) <= 0.05 + 1e-12

    def test_optimal_init_is_fixed_point(self, binary_test):
        px, pzx, z = binary_test
        _, best_t = exhaustive_threshold_mi(px, pzx, z)
        init = threshold_partition(z, best_t)
        part, trace = maxmi_classify(px, pzx, init)
        assert len(trace.steps) <= 2
        assert np.array_equal(part.assignment, init.assignment)

    def test_rerunning_from_fixed_point_changes_nothing(self, binary_test):
        px, pzx, z = binary_test
        part, _ = maxmi_classify(px, pzx, threshold_partition(z, -1.0))
        again, trace = maxmi_classify(px, pzx, part)
        assert np.array_equal(again.assignment, part.assignment)
        assert len(trace.steps) == 1

    def test_non_degradation(self, binary_test):
        px, pzx, z = binary_test
        for t0 in (-1.0, 0.0, 1.0, 2.5):
            _, trace = maxmi_classify(px, pzx, threshold_partition(z, t0))
            assert trace.steps[-1].shannon_mi >= trace.steps[0].shannon_mi - 1e-12

    def test_semi_equals_shmi_at_every_matching_step(self, binary_test):
        px, pzx, z = binary_test
        _, trace = maxmi_classify(px, pzx, threshold_partition(z, -1.0))
        for step in trace.steps:
            assert step.semantic_mi == pytest.approx(step.shannon_mi, abs=1e-9)

    def test_label_swapped_init_converges_too(self, binary_test):
        px, pzx, z = binary_test
        best_mi, _ = exhaustive_threshold_mi(px, pzx, z)
        init = threshold_partition(z, -1.0, above_label=0)
        _, trace = maxmi_classify(px, pzx, init)
        assert trace.steps[-1].shannon_mi == pytest.approx(best_mi, abs=1e-6)

    def test_symmetric_stripes_collapse_is_handled(self, binary_test):
        px, pzx, z = binary_test
        stripes = Partition(np.arange(len(z)) % 2, 2)
        with pytest.warns(UserWarning):
            part, trace = maxmi_classify(px, pzx, stripes)
        # one label absorbs everything; the run must still terminate cleanly
        assert trace.dropped_labels or trace.oscillated or \
            len(np.unique(part.assignment)) <= 2

    def test_three_class_instance(self):
        z = grid(-4, 10, 0.1)
        pzx = np.stack([np.exp(-(z - m) ** 2 / 2) for m in (0.0, 3.0, 6.0)])
        pzx /= pzx.sum(axis=1, keepdims=True)
        px = Distribution(("a", "b", "c"), np.array([0.5, 0.3, 0.2]))
        init = Partition(np.digitize(z, [1.0, 2.0]), 3)
        part, trace = maxmi_classify(px, pzx, init)
        assert trace.steps[-1].shannon_mi >= trace.steps[0].shannon_mi
        assert len(np.unique(part.assignment)) == 3

    def test_init_must_cover_grid(self, binary_test):
        px, pzx, z = binary_test
        with pytest.raises(DimensionMismatch):
            maxmi_classify(px, pzx, Partition(np.zeros(5, dtype=int), 2))
