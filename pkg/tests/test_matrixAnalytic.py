import unittest

import numpy as np
import pytest

import qbdLib
from qbdLib.constants import Model
from qbdLib.errors import NonConvergenceError, UnstableModelError
from qbdLib.linalg import infinityNorm
from qbdLib.matrixAnalytic import (
    _normalized, buildBlocks, iterateRateMatrix, levelVector, rgFactorization, solveGMatrix,
    solveRateMatrix, solveStationary, truncationLevels)
from qbdLib.measures import meanInService, measuresOne, measuresTwo
from qbdLib.modelOne import buildRepeatedBlocks
from qbdLib.stability import ModelParams, trafficIntensity

from .testSupport import oracle, smallParams


class ScalarQueueTest(unittest.TestCase):

    def test_mm1_rate_matrix(self):
        # M/M/1 with lambda=1, mu=2: R = rho
        solution = solveRateMatrix([[2.0]], [[-3.0]], [[1.0]])
        self.assertAlmostEqual(solution.r[0, 0], 0.5, delta=1e-11)
        self.assertAlmostEqual(solution.spectralRadius, 0.5, delta=1e-11)
        self.assertLess(solution.residual, 1e-11)

    def test_mm1_g_matrix(self):
        g = solveGMatrix([[2.0]], [[-3.0]], [[1.0]])
        self.assertAlmostEqual(g[0, 0], 1.0, delta=1e-10)

    def test_no_arrivals(self):
        solution = solveRateMatrix([[2.0]], [[-2.0]], [[0.0]])
        self.assertEqual(solution.r[0, 0], 0.0)
        self.assertEqual(solution.spectralRadius, 0.0)

    def test_g_without_arrivals(self):
        a = np.array([[1.0, 0.0], [2.0, 1.0]])
        b = np.array([[-1.0, 0.0], [0.0, -3.0]])
        g = solveGMatrix(a, b, np.zeros((2, 2)))
        np.testing.assert_allclose(g, -np.linalg.solve(b, a), atol=1e-14)


def test_iterates_are_nondecreasing():
    blocks = buildBlocks("one", ModelParams(0.5, 1.0, 2.0, 3))
    down, local, up = blocks.repeatedBlocks()
    iterates = iterateRateMatrix(down, local, up)
    previous = next(iterates)
    assert np.all(previous >= 0)
    for _ in range(60):
        current = next(iterates)
        assert np.all(current >= previous - 1e-15)
        previous = current


@pytest.mark.parametrize("model", ["one", "two"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_rate_matrix_residual_is_small(model, n):
    for params in smallParams(n):
        blocks = buildBlocks(model, params)
        down, local, up = blocks.repeatedBlocks()
        solution = solveRateMatrix(down, local, up)
        assert solution.residual < 1e-10 * infinityNorm(local)
        assert np.all(solution.r >= 0)
        assert solution.spectralRadius < 1.0


@pytest.mark.parametrize("model", ["one", "two"])
def test_rg_factorization_consistency(model):
    params = ModelParams(0.5, 1.0, 2.0, 2)
    blocks = buildBlocks(model, params)
    down, local, up = blocks.repeatedBlocks()
    factorization = rgFactorization(down, local, up)
    assert factorization.consistency < 1e-8
    # positive recurrent: G is stochastic
    np.testing.assert_allclose(factorization.g.sum(axis=1), 1.0, atol=1e-8)
    np.testing.assert_allclose(factorization.u @ factorization.uInverse, np.eye(local.shape[0]), atol=1e-10)


class StationarySolutionTest(unittest.TestCase):

    def setUp(self):
        self.params = ModelParams(0.5, 1.0, 2.0, 2)
        self.solution = solveStationary(Model.ONE, self.params)

    def test_normalized(self):
        self.assertAlmostEqual(self.solution.totalMass(), 1.0, delta=1e-12)
        self.assertTrue(np.all(self.solution.pi0 >= 0))
        self.assertTrue(np.all(self.solution.pi1 >= 0))

    def test_boundary_equations(self):
        self.assertLess(self.solution.boundaryResidual(), 1e-10)

    def test_level_vectors(self):
        r = self.solution.r
        np.testing.assert_allclose(levelVector(self.solution, 3), self.solution.pi1 @ r @ r, atol=1e-15)
        np.testing.assert_array_equal(self.solution.levelVector(0), self.solution.pi0)
        with self.assertRaises(ValueError):
            self.solution.levelVector(-1)

    def test_tail_mass_complements_level_masses(self):
        masses = self.solution.levelMasses(12)
        self.assertEqual(len(masses), 13)
        self.assertAlmostEqual(masses.sum() + self.solution.tailMass(12), 1.0, delta=1e-12)

    def test_sub_level_vectors(self):
        pieces = [self.solution.subLevelVector(i) for i in range(2)]
        np.testing.assert_array_equal(np.concatenate(pieces), self.solution.pi0)


@pytest.mark.parametrize("model", ["one", "two"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_matches_rule_based_oracle(model, n):
    for params in smallParams(n):
        solution = solveStationary(model, params)
        expected = oracle(model, params, 250)
        assert expected["tail"] < 1e-12
        if model == "one":
            eq1, eq2 = measuresOne(solution, params)
        else:
            eq1, eq2 = measuresTwo(solution, params)
        assert eq1 == pytest.approx(expected["eq1"], abs=1e-8)
        assert eq2 == pytest.approx(expected["eq2"], abs=1e-8)
        assert meanInService(solution) == pytest.approx(expected["inService"], abs=1e-8)


def test_level_zero_matches_oracle_state_by_state():
    params = ModelParams(0.4, 2.0, 1.0, 2)
    solution = solveStationary("one", params)
    expected = oracle("one", params, 250)
    position = {state: k for k, state in enumerate(expected["states"])}
    # level 0 of Model one is ordered by (i, j)
    for i in range(2):
        for j in range(3):
            flat = i * 3 + j
            assert solution.pi0[flat] == pytest.approx(expected["pi"][position[(i, j)]], abs=1e-10)
    for k in range(1, 6):
        vector = solution.levelVector(k)
        for j in range(3):
            assert vector[j] == pytest.approx(expected["pi"][position[(k + 1, j)]], abs=1e-10)


def test_spectral_radius_tracks_stability():
    for lam in (0.2, 0.6, 0.9):
        params = ModelParams(lam, 1.0, 2.0, 2)
        rho = trafficIntensity(params)
        solution = solveStationary("one", params)
        assert rho < 1.0
        assert solution.rate.spectralRadius < 1.0
    with pytest.raises(UnstableModelError) as info:
        solveStationary("one", ModelParams(1.4, 1.0, 2.0, 2))
    assert info.value.rho == pytest.approx(1.05)


@pytest.mark.parametrize("target", [0.5, 0.9, 0.99, 1.01])
def test_rate_matrix_spectral_radius_at_stability_boundary(target):
    # rho = 3 lambda / 4 for mu = 1, gamma = 2 and two owners
    params = ModelParams(target / 0.75, 1.0, 2.0, 2)
    rho = trafficIntensity(params)
    assert rho == pytest.approx(target)
    a, b, c = buildRepeatedBlocks(params)
    try:
        solution = solveRateMatrix(a, b, c)
    except NonConvergenceError:
        assert rho >= 1.0
        return
    if rho < 1.0:
        assert solution.spectralRadius < 1.0
    else:
        assert solution.spectralRadius >= 1.0 - 1e-6


@pytest.mark.parametrize("params", [ModelParams(10.0, 1.0, 100.0, 60), ModelParams(0.0, 1.0, 2.0, 3)])
def test_boundary_solution_is_normalized_and_nonnegative(params):
    solution = solveStationary("one", params)
    assert np.all(solution.pi0 >= 0.0)
    assert np.all(solution.pi1 >= 0.0)
    assert solution.totalMass() == pytest.approx(1.0, abs=1e-13)


def test_normalized_after_clipping():
    r = np.array([[0.5]])
    pi0 = np.clip(np.array([0.3, -1e-3]), 0.0, None)
    pi1 = np.array([0.35])
    pi0, pi1 = _normalized(pi0, pi1, r)
    assert pi0.sum() + pi1[0] / (1 - 0.5) == pytest.approx(1.0, abs=1e-15)


def test_package_docstring():
    assert "two-sided service platforms" in qbdLib.__doc__


def test_unstable_two():
    with pytest.raises(UnstableModelError):
        solveStationary("two", ModelParams(1.0, 1.0, 1.0, 2))


def test_zero_arrivals_idle_platform():
    params = ModelParams(0.0, 1.0, 2.0, 3)
    for model in ("one", "two"):
        solution = solveStationary(model, params)
        eq1, eq2 = (measuresOne if model == "one" else measuresTwo)(solution, params)
        assert eq1 == pytest.approx(3.0, abs=1e-12)
        assert eq2 == pytest.approx(0.0, abs=1e-12)


def test_truncation_levels():
    assert truncationLevels(0.5, 1e-3) == 10
    assert truncationLevels(0.5, 1e-3, floor=20) == 20
    assert 0.9 ** truncationLevels(0.9, 1e-10) < 1e-10
    with pytest.raises(UnstableModelError):
        truncationLevels(1.0, 1e-10)
