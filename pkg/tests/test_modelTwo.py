import unittest

import numpy as np
import pytest

from qbdLib.errors import CapacityError
from qbdLib.modelTwo import (
    PhaseIndexTwo, buildBlocksTwo, driftThetaTwo, driftVectorTwo, indexPhase, meanDriftRatesTwo,
    phGeneralizedErlang, phaseIndex)
from qbdLib.stability import ModelParams, isStable, meanDriftRates

from .testSupport import generatorTwo, smallParams


class PhaseTypeTest(unittest.TestCase):

    def test_moments(self):
        ph = phGeneralizedErlang(2.0, 1.0)
        self.assertAlmostEqual(ph.mean(), 1.5, delta=1e-14)
        # E[S^2] = 2/gamma^2 + 2/(gamma mu) + 2/mu^2
        self.assertAlmostEqual(ph.moment(2), 3.5, delta=1e-14)
        self.assertAlmostEqual(ph.variance(), 1.25, delta=1e-14)
        self.assertAlmostEqual(ph.scv(), 1.25 / 2.25, delta=1e-14)

    def test_exit_vector_closes_rows(self):
        ph = phGeneralizedErlang(3.0, 0.5)
        np.testing.assert_allclose(ph.t.sum(axis=1) + ph.t0, 0.0, atol=1e-15)


class PhaseIndexTest(unittest.TestCase):

    def test_lexicographic_order(self):
        self.assertEqual(phaseIndex(2, (1, 1)), 0)
        self.assertEqual(phaseIndex(2, (1, 2)), 1)
        self.assertEqual(phaseIndex(2, (2, 1)), 2)
        self.assertEqual(phaseIndex(2, (2, 2)), 3)
        self.assertEqual(phaseIndex(0, ()), 0)

    def test_round_trip(self):
        for n in range(1, 6):
            for index in range(2 ** n):
                self.assertEqual(phaseIndex(n, indexPhase(n, index)), index)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            phaseIndex(2, (1,))
        with self.assertRaises(ValueError):
            phaseIndex(1, (3,))
        with self.assertRaises(ValueError):
            indexPhase(2, 4)

    def test_flat_level_zero(self):
        index = PhaseIndexTwo(3)
        self.assertEqual(index.level0Size, 7)
        seen = [index.stateAt(k) for k in range(7)]
        self.assertEqual(seen[0], (0, ()))
        self.assertEqual(seen[1], (1, (1,)))
        self.assertEqual(seen[6], (2, (2, 2)))
        for n, phases in seen:
            self.assertEqual(index.stateAt(index.flatIndex(n, phases)), (n, phases))


class BlocksTwoTest(unittest.TestCase):

    def test_shapes(self):
        blocks = buildBlocksTwo(ModelParams(0.5, 1.0, 2.0, 3))
        self.assertEqual(blocks.a1.shape, (8, 8))
        self.assertEqual(blocks.f1.shape, (7, 7))
        self.assertEqual(blocks.f0.shape, (7, 8))
        self.assertEqual(blocks.f2.shape, (8, 7))

    def test_rows_sum_to_zero(self):
        for n in (1, 2, 4):
            blocks = buildBlocksTwo(ModelParams(0.4, 2.0, 1.0, n))
            np.testing.assert_allclose((blocks.a0 + blocks.a1 + blocks.a2).sum(axis=1), 0.0, atol=1e-12)
            np.testing.assert_allclose(blocks.f1.sum(axis=1) + blocks.f0.sum(axis=1), 0.0, atol=1e-12)
            np.testing.assert_allclose(
                blocks.f2.sum(axis=1) + blocks.a1.sum(axis=1) + blocks.a0.sum(axis=1), 0.0, atol=1e-12)

    def test_capacity(self):
        with self.assertRaises(CapacityError):
            buildBlocksTwo(ModelParams(0.1, 1.0, 1.0, 11))
        blocks = buildBlocksTwo(ModelParams(0.1, 1.0, 1.0, 4), maxOwners=4)
        self.assertEqual(blocks.repeatSize, 16)
        with self.assertRaises(CapacityError):
            buildBlocksTwo(ModelParams(0.1, 1.0, 1.0, 5), maxOwners=4)

    def test_counts(self):
        blocks = buildBlocksTwo(ModelParams(0.5, 1.0, 2.0, 2))
        zero = blocks.levelZeroCounts()
        np.testing.assert_array_equal(zero["idle"], [2, 1, 1])
        np.testing.assert_array_equal(zero["inService"], [0, 0, 1])
        level = blocks.repeatedCounts(3)
        np.testing.assert_array_equal(level["waiting"], [2, 2, 2, 2])
        np.testing.assert_array_equal(level["inService"], [0, 1, 1, 2])


def _lumpedState(n, level, phases):
    """Map a (level, phase tuple) to the (waiting, matching, serving) oracle state."""
    serving = sum(1 for phase in phases if phase == 2)
    matching = len(phases) - serving
    return (max(level - 1, 0), matching, serving)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_truncated_generator_lumps_to_transition_rules(n):
    levels = 5
    for params in smallParams(n):
        blocks = buildBlocksTwo(params)
        q = blocks.truncatedGenerator(levels)
        states, expected = generatorTwo(params, levels - 1)
        position = {state: k for k, state in enumerate(states)}
        # aggregation matrix from phases to lumped states
        index = PhaseIndexTwo(n)
        labels = [index.stateAt(k) for k in range(blocks.level0Size)]
        lumped = [_lumpedState(n, 0, phases) for _, phases in labels]
        for level in range(1, levels + 1):
            lumped += [_lumpedState(n, level, indexPhase(n, k)) for k in range(2 ** n)]
        aggregate = np.zeros((q.shape[0], len(states)))
        for row, state in enumerate(lumped):
            aggregate[row, position[state]] = 1.0
        # every phase of a lumped state must move to lumped states at the same rates
        flows = q @ aggregate
        for row, state in enumerate(lumped):
            np.testing.assert_allclose(flows[row], expected[position[state]], atol=1e-12)


def test_drift_vector_is_stationary():
    ph = phGeneralizedErlang(2.0, 1.0)
    omega = driftVectorTwo(2.0, 1.0)
    generator = ph.t + np.outer(ph.t0, ph.alpha)
    np.testing.assert_allclose(omega @ generator, 0.0, atol=1e-14)


def test_drift_condition_agrees_with_closed_form():
    rng = np.random.default_rng(21)
    for _ in range(30):
        lam, mu, gamma = rng.uniform(0.1, 3.0, size=3)
        n = int(rng.integers(1, 6))
        params = ModelParams(float(lam), float(mu), float(gamma), n)
        up, down = meanDriftRatesTwo(params)
        assert up == pytest.approx(lam)
        assert down == pytest.approx(n * mu * gamma / (mu + gamma))
        assert (up < down) == isStable(params)
        # both models share the drift rates
        assert down == pytest.approx(meanDriftRates(params)[1])


def test_theta_sums_to_one():
    theta = driftThetaTwo(ModelParams(0.5, 1.0, 2.0, 4))
    assert theta.shape == (16,)
    assert theta.sum() == pytest.approx(1.0)
