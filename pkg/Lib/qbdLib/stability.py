"""
Model parameters and stability analysis.

Both platform models share one stability condition: the system is stable
if and only if the traffic intensity

	rho = lambda * (mu + gamma) / (N * mu * gamma)

is strictly below one. Equality is reported as unstable.
"""
import logging
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import gammaln, logsumexp

from qbdLib.errors import ParameterError
from qbdLib.validators import modelParamsValidator

__all__ = [
	"ModelParams",
	"StabilityReport",
	"trafficIntensity",
	"isStable",
	"minStableOwners",
	"driftAlpha",
	"meanDriftRates",
	"newtonBinomialSums",
	"stabilityReport",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams(object):

	"""
	One instance of either platform model.

	arrivalRate (lambda), serviceRate (mu) and matchingRate (gamma) are
	rates per unit time; owners is the number N of registered owners;
	price is the service price P and share the owner profit proportion d.
	"""

	arrivalRate: float
	serviceRate: float
	matchingRate: float
	owners: int
	price: float = 50.0
	share: float = 0.8

	def __post_init__(self):
		valid, message = modelParamsValidator(self.asDict())
		if not valid:
			raise ParameterError(message)

	@classmethod
	def fromDict(cls, data):
		"""
		Build from the short keys used by configs and tables.

		>>> ModelParams.fromDict({"lambda": 10, "mu": 1, "gamma": 100, "n_owners": 60}).owners
		60
		"""
		valid, message = modelParamsValidator(data)
		if not valid:
			raise ParameterError(message)
		return cls(
			arrivalRate=data["lambda"],
			serviceRate=data["mu"],
			matchingRate=data["gamma"],
			owners=data["n_owners"],
			price=data.get("price", cls.price),
			share=data.get("share", cls.share),
		)

	def asDict(self):
		return {
			"lambda": self.arrivalRate,
			"mu": self.serviceRate,
			"gamma": self.matchingRate,
			"n_owners": self.owners,
			"price": self.price,
			"share": self.share,
		}

	def replace(self, **changes):
		"""Return a copy with some short-key fields changed."""
		data = self.asDict()
		data.update(changes)
		return ModelParams.fromDict(data)


@dataclass(frozen=True)
class StabilityReport(object):
	rho: float
	stable: bool
	nMinExact: int
	nMinCorollary: int
	alpha: np.ndarray
	driftUp: float
	driftDown: float

	def asDict(self):
		data = asdict(self)
		data["alpha"] = [float(a) for a in self.alpha]
		return data


def trafficIntensity(params):
	"""
	The traffic intensity rho = lambda (mu + gamma) / (N mu gamma), shared
	by both models.

	>>> round(trafficIntensity(ModelParams(10, 1, 100, 60)), 12)
	0.168333333333
	"""
	lam = params.arrivalRate
	mu = params.serviceRate
	gamma = params.matchingRate
	return lam * (mu + gamma) / (params.owners * mu * gamma)


def isStable(params):
	return trafficIntensity(params) < 1.0


def minStableOwners(params):
	"""
	Return (nMinExact, nMinCorollary). The first is the smallest N with
	rho < 1, the second the smallest N satisfying the sufficient bound
	N > 1 + floor((lambda / mu) (1 + mu / gamma)). The owner count of
	params is ignored.

	>>> minStableOwners(ModelParams(10, 0.26, 100, 1))
	(39, 40)
	>>> minStableOwners(ModelParams(0, 1, 1, 1))
	(1, 1)
	"""
	lam = params.arrivalRate
	mu = params.serviceRate
	gamma = params.matchingRate
	load = lam * (mu + gamma) / (mu * gamma)
	exact = max(1, int(math.floor(load)) + 1)
	bound = 1 + int(math.floor((lam / mu) * (1.0 + mu / gamma)))
	corollary = max(1, bound + 1)
	if lam == 0:
		corollary = 1
	return exact, corollary


def newtonBinomialSums(n, x):
	"""
	Return (sum_i C(n,i) x**i, sum_i i C(n,i) x**i) summed term by term
	with the ratio C(n,k) / C(n,k-1) = (n-k+1) / k. The closed forms are
	(1+x)**n and n x (1+x)**(n-1).

	>>> newtonBinomialSums(3, 1.0)
	(8.0, 12.0)
	"""
	term = 1.0
	total = 1.0
	weighted = 0.0
	for k in range(1, n + 1):
		term *= x * (n - k + 1) / k
		total += term
		weighted += k * term
	return total, weighted


def driftAlpha(params):
	"""
	Stationary vector alpha of D = A + B + C, the generator of the idle
	owner count when seekers never run out. alpha_k is proportional to
	C(N, k) (mu / gamma)**k, evaluated in log space.

	>>> [round(float(a), 12) for a in driftAlpha(ModelParams(1, 2, 2, 2))]
	[0.25, 0.5, 0.25]
	"""
	n = params.owners
	k = np.arange(n + 1)
	logRatio = math.log(params.serviceRate) - math.log(params.matchingRate)
	logWeights = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + k * logRatio
	alpha = np.exp(logWeights - logsumexp(logWeights))
	return alpha / alpha.sum()


def meanDriftRates(params):
	"""
	Return (up, down) = (lambda, N mu gamma / (mu + gamma)).

	>>> meanDriftRates(ModelParams(1, 2, 2, 1))
	(1, 1.0)
	"""
	mu = params.serviceRate
	gamma = params.matchingRate
	return params.arrivalRate, params.owners * mu * gamma / (mu + gamma)


def stabilityReport(params):
	rho = trafficIntensity(params)
	nMinExact, nMinCorollary = minStableOwners(params)
	up, down = meanDriftRates(params)
	report = StabilityReport(
		rho=rho,
		stable=rho < 1.0,
		nMinExact=nMinExact,
		nMinCorollary=nMinCorollary,
		alpha=driftAlpha(params),
		driftUp=up,
		driftDown=down,
	)
	logger.debug("rho=%.6g stable=%s nMin=%d/%d", rho, report.stable, nMinExact, nMinCorollary)
	return report


if __name__ == "__main__":
	import doctest
	doctest.testmod()
