import json
import logging

import numpy as np
import pytest

from qbdLib.cli import main
from qbdLib.constants import EXIT_OK
from qbdLib.linalg import infinityNorm
from qbdLib.matrixAnalytic import buildBlocks, solveStationary
from qbdLib.measures import littleSojourn, measuresOne, profits
from qbdLib.runConfig import SweepSpec
from qbdLib.stability import ModelParams


LARGE_PLATFORM = ModelParams(10.0, 1.0, 100.0, 60)
SLOW_SERVICE = ModelParams(10.0, 0.26, 100.0, 43)


def _evaluate(points):
    rows = []
    for params in points:
        solution = solveStationary("one", params)
        eq1, eq2 = measuresOne(solution, params)
        f1, f2 = profits(params, eq1)
        _, local, _ = buildBlocks("one", params).repeatedBlocks()
        rows.append({
            "eq1": eq1,
            "eq2": eq2,
            "f1": f1,
            "f2": f2,
            "little": littleSojourn(params, eq1, eq2, "one"),
            "relativeResidual": solution.rate.residual / infinityNorm(local),
        })
    return {key: np.array([row[key] for row in rows]) for key in rows[0]}


def _sweep(base, parameter, start, stop, steps):
    values = SweepSpec(parameter, start, stop, steps).values()
    return [base.replace(**{parameter: value}) for value in values]


def _increasing(values):
    return bool(np.all(np.diff(values) > 0))


def _decreasing(values):
    return bool(np.all(np.diff(values) < 0))


@pytest.fixture(scope="module")
def arrivalSweep():
    return _evaluate(_sweep(LARGE_PLATFORM, "lambda", 10, 46, 9))


@pytest.fixture(scope="module")
def ownerSweep():
    return _evaluate(_sweep(SLOW_SERVICE, "n_owners", 43, 53, 10))


class TestArrivalRate(object):

    def test_waiting_seekers_increase(self, arrivalSweep):
        assert _increasing(arrivalSweep["eq2"])

    def test_idle_owners_decrease(self, arrivalSweep):
        assert _decreasing(arrivalSweep["eq1"])
        expected = 60 - np.arange(10, 47, 4)
        np.testing.assert_allclose(arrivalSweep["eq1"], expected, atol=1e-8)

    def test_profits_increase(self, arrivalSweep):
        assert _increasing(arrivalSweep["f1"])
        assert _increasing(arrivalSweep["f2"])

    def test_sojourn_mean_increases(self, arrivalSweep):
        assert _increasing(arrivalSweep["little"])

    def test_rate_matrix_residual(self, arrivalSweep):
        assert np.all(arrivalSweep["relativeResidual"] < 1e-10)


class TestOwners(object):

    def test_idle_owners_increase(self, ownerSweep):
        assert _increasing(ownerSweep["eq1"])

    def test_waiting_seekers_decrease(self, ownerSweep):
        assert _decreasing(ownerSweep["eq2"])

    def test_sojourn_mean_decreases(self, ownerSweep):
        assert _decreasing(ownerSweep["little"])

    def test_rate_matrix_residual(self, ownerSweep):
        assert np.all(ownerSweep["relativeResidual"] < 1e-10)


def test_matching_rate():
    base = LARGE_PLATFORM.replace(**{"lambda": 46.0})
    result = _evaluate(_sweep(base, "gamma", 100, 300, 4))
    assert _decreasing(result["eq2"])
    # idle owners only depend on lambda / mu in this model
    np.testing.assert_allclose(result["eq1"], 14.0, atol=1e-8)


def test_price():
    result = _evaluate(_sweep(LARGE_PLATFORM, "price", 30, 50, 4))
    assert _increasing(result["f1"])
    assert _increasing(result["f2"])
    np.testing.assert_allclose(result["eq1"], result["eq1"][0], atol=1e-12)


def test_matching_rate_sweep_warns_about_idle_owners(tmpdir, caplog):
    data = {
        "model": "one",
        "params": {"lambda": 0.5, "mu": 1, "gamma": 2, "n_owners": 2},
        "sweep": {"parameter": "gamma", "from": 2, "to": 4, "steps": 1},
    }
    path = tmpdir / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        code = main(["sweep", "--config", str(path), "--out", str(tmpdir / "run")])
    assert code == EXIT_OK
    assert "does not depend on gamma" in caplog.text
