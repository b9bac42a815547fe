"""
Stationary performance measures and profits of both platform models.

Means are read off the per-state counts of the block containers (idle
owners, waiting seekers, owners in service) weighted by the matrix-geometric
distribution: level 0 directly, the repeating levels through
pi_1 (I - R)^-1 and pi_1 (I - R)^-2.
"""
import logging
from dataclasses import dataclass, asdict

import numpy as np

from qbdLib.constants import Model, Provenance
from qbdLib.errors import ParameterError
from qbdLib.linalg import solveDense
from qbdLib.stability import trafficIntensity

__all__ = [
	"PerformanceReport",
	"meanIdleOwnersOne",
	"meanWaitingSeekersOne",
	"measuresOne",
	"measuresTwo",
	"meanInService",
	"throughput",
	"profits",
	"throughputProfits",
	"littleSojourn",
	"idleOwnersDistribution",
	"waitingSeekersDistribution",
	"performanceReport",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerformanceReport(object):

	"""
	The measures of one analytic solve (or a simulated estimate of them).
	sojournMeanRG is None for Model two; sojournMeanLittle is None when
	lambda is 0.
	"""

	meanIdleOwners: float
	meanWaitingSeekers: float
	sojournMeanLittle: float
	sojournMeanRG: float
	platformProfit: float
	ownerProfit: float
	platformProfitThroughput: float
	ownerProfitThroughput: float
	throughput: float
	rho: float
	provenance: Provenance = Provenance.ANALYTIC
	residualR: float = None
	tailMass: float = None

	def asDict(self):
		data = asdict(self)
		data["provenance"] = self.provenance.value
		return data


# ----------------
# Count-based sums
# ----------------

def _levelZeroMean(solution, key):
	return float(solution.pi0 @ solution.blocks.levelZeroCounts()[key])


def _repeatedMean(solution, key):
	"""sum over k >= 1 of pi_k c_k for counts c_k that are constant in k."""
	return solution.geometricSum(solution.blocks.repeatedCounts(1)[key])


def meanIdleOwnersOne(solution, params=None):
	"""
	E[Q1] = sum_l pi_0^(l) f + pi_1 (I - R)^-1 f with f = (0, 1, ..., N).
	"""
	return _levelZeroMean(solution, "idle") + _repeatedMean(solution, "idle")


def meanWaitingSeekersOne(solution, params=None):
	"""
	E[Q2] = sum_i i pi_0^(i) e + (N - 1) pi_1 (I - R)^-1 e + pi_1 (I - R)^-2 e;
	level k holds N + k - 1 waiting seekers.
	"""
	n = solution.blocks.owners
	value = _levelZeroMean(solution, "waiting")
	value += (n - 1) * solution.geometricSum()
	value += solution.weightedGeometricSum()
	return value


def measuresOne(solution, params=None):
	return meanIdleOwnersOne(solution, params), meanWaitingSeekersOne(solution, params)


def measuresTwo(solution, params=None):
	"""
	(E[Q1], E[Q2]) for Model two. Sub-level n of level 0 has N - n idle
	owners; level k >= 1 has none and k - 1 waiting seekers, so
	E[Q2] = psi_1 (I - R)^-2 e - psi_1 (I - R)^-1 e.
	"""
	eq1 = _levelZeroMean(solution, "idle")
	eq2 = solution.weightedGeometricSum() - solution.geometricSum()
	return eq1, max(eq2, 0.0)


def meanInService(solution):
	"""Expected number of owners in the service phase."""
	return _levelZeroMean(solution, "inService") + _repeatedMean(solution, "inService")


def throughput(solution, params):
	"""Service completions per unit time, mu E[owners in service]."""
	return params.serviceRate * meanInService(solution)


# -------
# Profits
# -------

def profits(params, eq1):
	"""
	Return (f1, f2): the platform profit (1 - d) P (N - E[Q1]) mu and the
	owner profit d P (1 - E[Q1] / N) mu per unit time.

	>>> from qbdLib.stability import ModelParams
	>>> f1, f2 = profits(ModelParams(10, 1, 100, 60), 50.0)
	>>> round(f1, 9), round(f2, 9)
	(100.0, 6.666666667)
	"""
	n = params.owners
	mu = params.serviceRate
	price = params.price
	share = params.share
	busy = n - eq1
	return (1.0 - share) * price * busy * mu, share * price * (busy / n) * mu


def throughputProfits(params):
	"""
	Return the profit pair with realized revenue lambda P in place of
	(N - E[Q1]) mu P.

	>>> from qbdLib.stability import ModelParams
	>>> f1, f2 = throughputProfits(ModelParams(10, 1, 100, 60))
	>>> round(f1, 9), round(f2, 9)
	(100.0, 6.666666667)
	"""
	lam = params.arrivalRate
	return (1.0 - params.share) * params.price * lam, params.share * params.price * lam / params.owners


def littleSojourn(params, eq1, eq2, model):
	"""
	Mean sojourn time by Little's law. A seeker is in the system while
	waiting or while its owner matches and serves it.

	>>> from qbdLib.stability import ModelParams
	>>> round(littleSojourn(ModelParams(0.3, 1, 2, 1), 0.5, 0.2863636363636, "two"), 6)
	2.454545
	"""
	lam = params.arrivalRate
	if lam == 0:
		raise ParameterError("Little's law needs a positive arrival rate")
	if Model(model) is Model.ONE:
		return (eq2 + (params.owners - eq1)) / lam
	return eq2 / lam + 1.0 / params.matchingRate + 1.0 / params.serviceRate


# --------------------------
# Marginal distributions
# --------------------------

def idleOwnersDistribution(solution):
	"""P(Q1 = m) for m = 0..N."""
	blocks = solution.blocks
	size = blocks.owners + 1
	zero = blocks.levelZeroCounts()["idle"].astype(int)
	distribution = np.bincount(zero, weights=solution.pi0, minlength=size)
	repeated = blocks.repeatedCounts(1)["idle"].astype(int)
	levelMass = solveDense((np.eye(solution.r.shape[0]) - solution.r).T, solution.pi1)
	distribution = distribution + np.bincount(repeated, weights=levelMass, minlength=size)
	return distribution[:size]


def waitingSeekersDistribution(solution, maxCount):
	"""P(Q2 = m) for m = 0..maxCount."""
	blocks = solution.blocks
	distribution = np.zeros(maxCount + 1)
	zero = blocks.levelZeroCounts()["waiting"].astype(int)
	keep = zero <= maxCount
	distribution += np.bincount(zero[keep], weights=solution.pi0[keep], minlength=maxCount + 1)
	level = 1
	current = solution.pi1
	while True:
		waiting = int(blocks.repeatedCounts(level)["waiting"][0])
		if waiting > maxCount:
			break
		distribution[waiting] += current.sum()
		current = current @ solution.r
		level += 1
	return distribution


# ------
# Report
# ------

def performanceReport(model, params, solution, sojournRG=None, tailLevels=None):
	"""Bundle every analytic measure of a stationary solution."""
	model = Model(model)
	if model is Model.ONE:
		eq1, eq2 = measuresOne(solution, params)
	else:
		eq1, eq2 = measuresTwo(solution, params)
	f1, f2 = profits(params, eq1)
	g1, g2 = throughputProfits(params)
	little = None
	if params.arrivalRate > 0:
		little = littleSojourn(params, eq1, eq2, model)
	tail = solution.tailMass(tailLevels) if tailLevels is not None else None
	flow = params.serviceRate * (params.owners - eq1) - params.arrivalRate
	if model is Model.ONE and abs(flow) > 1e-6:
		logger.warning("flow balance off by %.3g for %r", flow, params)
	return PerformanceReport(
		meanIdleOwners=eq1,
		meanWaitingSeekers=eq2,
		sojournMeanLittle=little,
		sojournMeanRG=sojournRG if model is Model.ONE else None,
		platformProfit=f1,
		ownerProfit=f2,
		platformProfitThroughput=g1,
		ownerProfitThroughput=g2,
		throughput=throughput(solution, params),
		rho=trafficIntensity(params),
		provenance=Provenance.ANALYTIC,
		residualR=solution.rate.residual,
		tailMass=tail,
	)


if __name__ == "__main__":
	import doctest
	doctest.testmod()
