import math
import unittest

import numpy as np
import pytest

from qbdLib.constants import Model
from qbdLib.errors import ParameterError
from qbdLib.matrixAnalytic import solveStationary
from qbdLib.measures import littleSojourn, measuresOne, measuresTwo
from qbdLib.simulation import (
    SimConfig, SimEstimate, replicationSeed, sampleTransitionsOne, simulate, simulateReplication)
from qbdLib.stability import ModelParams
from qbdLib.utils import splitMix64

from .testSupport import pollaczekKhinchineParams, pollaczekKhinchineQueue, referenceParams


SMALL = SimConfig(maxEvents=20000, warmupFraction=0.1, replications=3, baseSeed=7)


class SimConfigTest(unittest.TestCase):

    def test_defaults(self):
        config = SimConfig()
        self.assertEqual(config.replications, 20)
        self.assertEqual(SimConfig.fromDict(config.asDict()), config)

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            SimConfig(maxEvents=10)
        with self.assertRaises(ParameterError):
            SimConfig(warmupFraction=1.0)
        with self.assertRaises(ParameterError):
            SimConfig.fromDict({"replications": 0})


class SimEstimateTest(unittest.TestCase):

    def test_single_value_has_no_interval(self):
        estimate = SimEstimate.fromValues([2.5])
        self.assertEqual(estimate.mean, 2.5)
        self.assertIsNone(estimate.ciHalfwidth)
        self.assertIsNone(estimate.contains(2.5))

    def test_interval(self):
        estimate = SimEstimate.fromValues([1.0, 2.0, 3.0])
        # z_0.995 * s / sqrt(3) with s = 1
        self.assertAlmostEqual(estimate.ciHalfwidth, 2.5758293035489 / math.sqrt(3), delta=1e-9)
        self.assertTrue(estimate.contains(2.5))
        self.assertFalse(estimate.contains(4.0))

    def test_nan_values_are_dropped(self):
        estimate = SimEstimate.fromValues([1.0, float("nan"), 3.0])
        self.assertEqual(estimate.replications, 2)
        self.assertEqual(estimate.mean, 2.0)

    def test_empty(self):
        estimate = SimEstimate.fromValues([])
        self.assertIsNone(estimate.mean)
        self.assertEqual(estimate.replications, 0)


def test_replication_seeds():
    assert replicationSeed(7, 3) == splitMix64(10)
    assert len({replicationSeed(7, index) for index in range(100)}) == 100


@pytest.mark.parametrize("model", ["one", "two"])
def test_replications_are_deterministic(model):
    first = simulateReplication(model, referenceParams, SMALL, 1, cdfTimes=(1.0,))
    second = simulateReplication(model, referenceParams, SMALL, 1, cdfTimes=(1.0,))
    assert first == second
    other = simulateReplication(model, referenceParams, SMALL, 2, cdfTimes=(1.0,))
    assert other.eq2 != first.eq2


def test_base_seed_changes_results():
    first = simulate("one", referenceParams, SMALL)
    second = simulate("one", referenceParams, SimConfig(maxEvents=20000, warmupFraction=0.1, replications=3, baseSeed=8))
    assert first.eq2.values != second.eq2.values
    assert first.baseSeed == 7


def test_merge_order_does_not_depend_on_workers():
    serial = simulate("two", referenceParams, SMALL)
    parallel = simulate(
        "two", referenceParams, SimConfig(maxEvents=20000, warmupFraction=0.1, replications=3, baseSeed=7, workers=2))
    assert serial.eq1.values == parallel.eq1.values
    assert serial.eq2.values == parallel.eq2.values


def test_single_replication_reports_no_interval():
    result = simulate("one", referenceParams, SimConfig(maxEvents=5000, replications=1, baseSeed=3))
    assert result.eq1.replications == 1
    assert result.eq1.ciHalfwidth is None
    assert set(result.estimates()) == {"eq1", "eq2", "throughput", "sojourn_mean"}


def test_no_arrivals_keeps_platform_idle():
    params = ModelParams(0.0, 1.0, 2.0, 3)
    result = simulateReplication("two", params, SMALL, 0)
    assert result.eq1 == 3.0
    assert result.eq2 == 0.0
    assert result.departures == 0
    assert math.isnan(result.sojournMean)


def test_empirical_cdf_shape():
    result = simulateReplication("one", referenceParams, SMALL, 0, cdfTimes=(0.0, 1.0, 5.0, 1000.0))
    values = result.sojournCdf
    assert values[0] == 0.0
    assert values[1] <= values[2] <= values[3]
    assert values[3] == 1.0


def test_transition_probabilities():
    params = ModelParams(0.5, 1.0, 2.0, 3)
    exits = 20000
    counts = sampleTransitionsOne(params, (2, 1), exits, seed=11)
    # rates: arrival 0.5, matching min(2, 1) * 2 = 2, service 2 * 1 = 2
    expected = {"arrival": 0.5 / 4.5, "matching": 2.0 / 4.5, "service": 2.0 / 4.5}
    assert sum(counts.values()) == exits
    for kind, probability in expected.items():
        sigma = math.sqrt(exits * probability * (1 - probability))
        assert abs(counts[kind] - exits * probability) < 3 * sigma


def test_transition_sampler_rejects_dead_state():
    params = ModelParams(0.0, 1.0, 2.0, 2)
    with pytest.raises(ParameterError):
        sampleTransitionsOne(params, (0, 2), 10, seed=1)


@pytest.mark.slow
@pytest.mark.parametrize("model", ["one", "two"])
def test_agrees_with_analytic_solution_at_reference_point(model):
    params = referenceParams
    config = SimConfig(maxEvents=500000, warmupFraction=0.2, replications=20, baseSeed=20230101)
    result = simulate(model, params, config)
    solution = solveStationary(model, params)
    eq1, eq2 = (measuresOne if model == "one" else measuresTwo)(solution, params)
    assert result.eq1.contains(eq1)
    assert result.eq2.contains(eq2)
    little = littleSojourn(params, eq1, eq2, Model(model))
    assert abs(result.sojournMean.mean - little) <= 2 * result.sojournMean.ciHalfwidth


@pytest.mark.slow
def test_single_owner_queue_matches_mean_value_formula():
    params = pollaczekKhinchineParams
    config = SimConfig(maxEvents=400000, warmupFraction=0.2, replications=12, baseSeed=99)
    result = simulate("two", params, config)
    estimate = result.eq2
    assert abs(estimate.mean - pollaczekKhinchineQueue) <= 2 * estimate.ciHalfwidth
    assert abs(result.throughput.mean - params.arrivalRate) <= 2 * result.throughput.ciHalfwidth


@pytest.mark.slow
def test_larger_platform_within_twice_the_interval():
    params = ModelParams(2.0, 1.0, 3.0, 4)
    config = SimConfig(maxEvents=300000, warmupFraction=0.2, replications=12, baseSeed=5)
    for model, measures in (("one", measuresOne), ("two", measuresTwo)):
        result = simulate(model, params, config)
        eq1, eq2 = measures(solveStationary(model, params), params)
        assert abs(result.eq1.mean - eq1) <= 2 * result.eq1.ciHalfwidth
        assert abs(result.eq2.mean - eq2) <= 2 * result.eq2.ciHalfwidth


@pytest.mark.slow
def test_simulated_cdf_against_analytic():
    from qbdLib.modelOne import buildAbsorbingChain
    from qbdLib.sojourn import sojournCDFValues

    params = referenceParams
    times = (0.5, 1.0, 2.0, 4.0)
    config = SimConfig(maxEvents=400000, warmupFraction=0.2, replications=12, baseSeed=17)
    result = simulate("one", params, config, cdfTimes=times)
    assert [t for t, _ in result.sojournCdf] == list(times)
    chain = buildAbsorbingChain(params, solveStationary("one", params))
    analytic = sojournCDFValues(chain, times)
    for (_, estimate), value in zip(result.sojournCdf, analytic):
        assert 0.0 <= estimate.mean <= 1.0
        assert np.isfinite(value)
