"""
Sojourn time of Model one through its absorbing chain.

The transient generator T has a finite boundary part T11 (sub-levels
1..N-1 of level 0) and an infinite level-independent part T22 (levels
k >= 1). Products with (-T)^-1 are evaluated with the Schur complement
T11 - T12 T22^-1 T21 and the UL-type factorization
T22 = (I - R_U) U_D (I - G_L), whose inverse acts level by level through
R, U^-1 and G. Level series are cut once sp(R)^K drops below the
tolerance.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from qbdLib.constants import DEFAULT_TRUNCATION_TOL
from qbdLib.linalg import expmAction, infinityNorm, solveBlockTridiagonal, solveDense
from qbdLib.matrixAnalytic import rgFactorization, truncationLevels

__all__ = [
	"LevelVector",
	"CensoredSolution",
	"SojournResult",
	"censoredInverseApply",
	"expectedSojournRG",
	"sojournCDF",
	"sojournCDFValues",
	"sojournSummary",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LevelVector(object):

	"""
	A column vector over the transient states: the boundary part, the
	explicit levels 1..m and a constant tail repeated on every level
	above m (None for zero).
	"""

	boundary: np.ndarray
	levels: list = field(default_factory=list)
	tail: np.ndarray = None

	def level(self, k, size):
		if k <= len(self.levels):
			return np.asarray(self.levels[k - 1], dtype=float)
		if self.tail is None:
			return np.zeros(size)
		return np.asarray(self.tail, dtype=float)


@dataclass(frozen=True, eq=False)
class CensoredSolution(object):
	boundary: np.ndarray
	levels: list
	residual: float
	truncationLevels: int


@dataclass(frozen=True)
class SojournResult(object):
	meanRG: float
	meanLittle: float
	cdfSamples: tuple
	truncationLevels: int
	omegaDelta: float


def _chainFactorization(chain, factorization):
	if factorization is None:
		factorization = rgFactorization(chain.a, chain.b, chain.c, r=chain.r)
	return factorization


def _boundaryProduct(chain, x):
	"""T11 x, block by block."""
	diagonals = chain.boundaryDiagonals
	result = []
	for i, block in enumerate(diagonals):
		value = block @ x[i]
		if i + 1 < len(diagonals):
			value = value + chain.boundaryUps[i] @ x[i + 1]
		if i > 0:
			value = value + chain.boundaryDowns[i - 1] @ x[i - 1]
		result.append(value)
	return result


def censoredInverseApply(chain, rhs, tol=DEFAULT_TRUNCATION_TOL, factorization=None):
	"""
	y = (-T)^-1 rhs for a LevelVector rhs. Levels of y are returned up to
	max(K, m) + 1, K the truncation depth for `tol`.
	"""
	factorization = _chainFactorization(chain, factorization)
	r = factorization.r
	g = factorization.g
	uInverse = factorization.uInverse
	size = chain.repeatSize
	depth = max(truncationLevels(chain.spectralRadius, tol), len(rhs.levels)) + 1
	eye = np.eye(size)
	tail = np.zeros(size) if rhs.tail is None else np.asarray(rhs.tail, dtype=float)
	tailSum = solveDense(eye - r, tail)
	# w_k = sum_{j >= k} R^(j-k) rhs_j
	w = [None] * (depth + 1)
	for k in range(depth, 0, -1):
		if k > len(rhs.levels):
			w[k] = tailSum
		else:
			w[k] = rhs.level(k, size) + r @ w[k + 1] if k < depth else rhs.level(k, size) + r @ tailSum
	boundaryCount = len(chain.boundaryDiagonals)
	boundary = []
	if boundaryCount:
		blockSize = chain.boundaryDiagonals[0].shape[0]
		r1 = np.asarray(rhs.boundary, dtype=float).reshape(boundaryCount, blockSize)
		s1 = uInverse @ w[1]
		diagonals = list(chain.boundaryDiagonals)
		diagonals[-1] = diagonals[-1] - chain.toLevelOne @ uInverse @ chain.fromLevelOne
		target = [-row for row in r1]
		target[-1] = target[-1] + chain.toLevelOne @ s1
		boundary = solveBlockTridiagonal(diagonals, chain.boundaryUps, chain.boundaryDowns, target)
		w[1] = w[1] + chain.fromLevelOne @ boundary[-1]
	levels = []
	previous = None
	for k in range(1, depth + 1):
		z = uInverse @ w[k]
		y = z if previous is None else z + g @ previous
		levels.append(-y)
		previous = y
	solution = CensoredSolution(
		boundary=np.concatenate(boundary) if boundaryCount else np.zeros(0),
		levels=levels,
		residual=0.0,
		truncationLevels=depth - 1,
	)
	residual = _residual(chain, rhs, solution)
	logger.debug("censored inverse: %d levels, residual %.3g", depth, residual)
	return CensoredSolution(
		boundary=solution.boundary, levels=levels, residual=residual, truncationLevels=depth - 1)


def _residual(chain, rhs, solution):
	"""||-T y - rhs|| over the boundary and levels 1..K."""
	size = chain.repeatSize
	worst = 0.0
	x2 = solution.levels
	boundaryCount = len(chain.boundaryDiagonals)
	if boundaryCount:
		x1 = solution.boundary.reshape(boundaryCount, -1)
		r1 = np.asarray(rhs.boundary, dtype=float).reshape(boundaryCount, -1)
		product = _boundaryProduct(chain, x1)
		product[-1] = product[-1] + chain.toLevelOne @ x2[0]
		for i in range(boundaryCount):
			worst = max(worst, infinityNorm(-product[i] - r1[i]))
	for k in range(1, len(x2)):
		value = chain.b @ x2[k - 1] + chain.c @ x2[k]
		if k > 1:
			value = value + chain.a @ x2[k - 2]
		elif boundaryCount:
			value = value + chain.fromLevelOne @ x1[-1]
		worst = max(worst, infinityNorm(-value - rhs.level(k, size)))
	return worst


def expectedSojournRG(chain, tol=DEFAULT_TRUNCATION_TOL, factorization=None):
	"""
	E[W] = omega~ (-T)^-1 e, with omega~ summed as a geometric series in R.
	"""
	size = chain.repeatSize
	ones = LevelVector(boundary=np.ones(chain.boundarySize), tail=np.ones(size))
	solution = censoredInverseApply(chain, ones, tol, factorization)
	mean = float(chain.omegaBoundary @ solution.boundary) if chain.boundarySize else 0.0
	weight = chain.omegaLevelOne
	for level in solution.levels:
		mean += float(weight @ level)
		weight = weight @ chain.r
	logger.debug("E[W] (RG) = %.12g, residual %.3g", mean, solution.residual)
	return mean


def sojournCDFValues(chain, times, tol=DEFAULT_TRUNCATION_TOL, conditional=True):
	"""
	F_W on a list of times from one truncated sub-generator.

	The unconditional profile 1 - omegaDelta - omega~ exp(T t) e rises
	from 0 to 1 - omegaDelta. With `conditional` (the default) it is
	divided by 1 - omegaDelta, giving the distribution of W for seekers
	whose initial state is transient.
	"""
	levels = truncationLevels(chain.spectralRadius, tol)
	generator = chain.truncatedSubGenerator(levels, sparse=True)
	omega = chain.truncatedOmega(levels)
	ones = np.ones(generator.shape[0])
	transientMass = float(omega.sum())
	values = []
	for t in times:
		if t < 0:
			raise ValueError("negative time %r" % (t,))
		if t == 0:
			values.append(0.0)
			continue
		remaining = float(omega @ expmAction(generator, ones, t, tol))
		value = transientMass - remaining
		if conditional:
			value = value / transientMass if transientMass > 0 else 1.0
		values.append(min(max(value, 0.0), 1.0))
	return values


def sojournCDF(chain, t, tol=DEFAULT_TRUNCATION_TOL, conditional=True):
	return sojournCDFValues(chain, [t], tol, conditional)[0]


def sojournSummary(params, solution, times=None, multiples=(0.0, 0.5, 1.0, 2.0, 5.0, 10.0), tol=DEFAULT_TRUNCATION_TOL):
	"""
	Mean sojourn time by both routes plus CDF samples. Without explicit
	`times` the grid is `multiples` of the RG mean E[W], which counts the
	omegaDelta mass as zero sojourn. The sampled CDF is conditional, so its
	own mean is E[W] / (1 - omegaDelta).
	"""
	from qbdLib.measures import measuresOne, littleSojourn
	from qbdLib.modelOne import buildAbsorbingChain
	from qbdLib.constants import Model

	chain = buildAbsorbingChain(params, solution)
	meanRG = expectedSojournRG(chain, tol)
	eq1, eq2 = measuresOne(solution, params)
	meanLittle = littleSojourn(params, eq1, eq2, Model.ONE)
	if times is None:
		times = [m * meanRG for m in multiples]
	values = sojournCDFValues(chain, times, tol)
	gap = abs(meanRG - meanLittle) / meanLittle if meanLittle else 0.0
	if gap > 0.01:
		logger.warning(
			"sojourn means differ by %.1f%%: RG %.6g, Little %.6g", 100.0 * gap, meanRG, meanLittle)
	return SojournResult(
		meanRG=meanRG,
		meanLittle=meanLittle,
		cdfSamples=tuple(zip([float(t) for t in times], values)),
		truncationLevels=truncationLevels(chain.spectralRadius, tol),
		omegaDelta=chain.omegaDelta,
	)
