import logging

import numpy as np
import pytest

from qbdLib.errors import ParameterError
from qbdLib.matrixAnalytic import solveStationary
from qbdLib.measures import meanInService, measuresOne, measuresTwo
from qbdLib.stability import ModelParams
from qbdLib.truncation import truncatedStationary

from .testSupport import oracle, referenceParams


@pytest.mark.parametrize("model", ["one", "two"])
def test_agrees_with_matrix_geometric_solution(model):
    params = referenceParams
    truncated = truncatedStationary(model, params, 120)
    solution = solveStationary(model, params)
    eq1, eq2 = (measuresOne if model == "one" else measuresTwo)(solution, params)
    assert truncated.meanIdleOwners() == pytest.approx(eq1, abs=1e-9)
    assert truncated.meanWaitingSeekers() == pytest.approx(eq2, abs=1e-9)
    assert truncated.meanInService() == pytest.approx(meanInService(solution), abs=1e-9)
    np.testing.assert_allclose(truncated.levelZeroVector(), solution.pi0, atol=1e-10)
    np.testing.assert_allclose(truncated.levelVector(4), solution.levelVector(4), atol=1e-10)
    assert truncated.residual < 1e-12


def test_agrees_with_rule_based_generator():
    params = ModelParams(0.4, 2.0, 1.0, 3)
    truncated = truncatedStationary("one", params, 150)
    expected = oracle("one", params, 152)
    assert truncated.meanWaitingSeekers() == pytest.approx(expected["eq2"], abs=1e-9)
    assert truncated.meanIdleOwners() == pytest.approx(expected["eq1"], abs=1e-9)


def test_insensitive_to_depth():
    params = ModelParams(0.5, 1.0, 2.0, 3)
    first = truncatedStationary("one", params, 300)
    second = truncatedStationary("one", params, 350)
    assert first.tailMass < 1e-12
    assert first.meanWaitingSeekers() == pytest.approx(second.meanWaitingSeekers(), abs=1e-10)


def test_no_arrivals():
    params = ModelParams(0.0, 1.0, 2.0, 3)
    truncated = truncatedStationary("one", params, 5)
    assert truncated.meanIdleOwners() == pytest.approx(3.0, abs=1e-12)
    assert truncated.levelMasses()[0] == pytest.approx(1.0, abs=1e-12)


def test_level_masses():
    truncated = truncatedStationary("two", referenceParams, 40)
    masses = truncated.levelMasses()
    assert masses.shape == (41,)
    assert masses.sum() == pytest.approx(1.0)
    assert truncated.tailMass == masses[-1]


def test_too_shallow():
    with pytest.raises(ParameterError):
        truncatedStationary("one", referenceParams, 1)


def test_heavy_tail_is_reported(caplog):
    params = ModelParams(0.95, 1.0, 2.0, 2)
    with caplog.at_level(logging.WARNING, logger="qbdLib"):
        truncated = truncatedStationary("one", params, 3, tailTolerance=1e-6)
    assert truncated.tailMass > 1e-6
    assert "tail mass" in caplog.text
