"""
Matrix-geometric solution of level-independent QBD processes.

For repeated blocks (A, B, C) = (down, local, up) the rate matrix R is the
minimal nonnegative solution of R^2 A + R B + C = 0 and the level vectors
satisfy pi_k = pi_1 R^(k-1). R is computed by the successive iteration

	R(0) = 0,  R(n+1) = -[R(n)^2 A + C] B^-1

stopped when max |R(n+1) - R(n)| < epsilon. The boundary vectors come
from the level-0 balance equations, reduced sub-level by sub-level.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from fontTools.misc.loggingTools import Timer

from qbdLib.constants import DEFAULT_EPSILON, DEFAULT_MAX_ITER, MIN_TRUNCATION_LEVELS, Model
from qbdLib.errors import NonConvergenceError, UnstableModelError
from qbdLib.linalg import (
	infinityNorm, leftNullVector, luFactor, luSolve, solveDense, solveLeft, spectralRadius)
from qbdLib.stability import trafficIntensity

__all__ = [
	"RateMatrixSolution",
	"RgFactorization",
	"StationarySolution",
	"iterateRateMatrix",
	"solveRateMatrix",
	"solveGMatrix",
	"uMeasure",
	"rgFactorization",
	"solveBoundary",
	"levelVector",
	"truncationLevels",
	"buildBlocks",
	"solveStationary",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RateMatrixSolution(object):
	r: np.ndarray
	iterations: int
	residual: float
	spectralRadius: float


@dataclass(frozen=True, eq=False)
class RgFactorization(object):

	"""
	R, G and the U-measure U = B + R A of a repeated block triple, with
	the distance to the second expression B + C G.
	"""

	r: np.ndarray
	g: np.ndarray
	u: np.ndarray
	uInverse: np.ndarray
	consistency: float


def rateResidual(a, b, c, r):
	"""||R^2 A + R B + C|| in the infinity norm."""
	return infinityNorm(r @ r @ a + r @ b + c)


def iterateRateMatrix(a, b, c):
	"""
	Yield the iterates R(1), R(2), ... of the successive iteration.
	The sequence is entrywise nondecreasing.
	"""
	a = np.asarray(a, dtype=float)
	c = np.asarray(c, dtype=float)
	factors = luFactor(b)
	r = np.zeros_like(c)
	while True:
		r = -solveLeft(factors, r @ r @ a + c)
		yield r


def _iterate(iterates, epsilon, maxIter, name):
	previous = None
	for iteration, current in enumerate(iterates, 1):
		if previous is not None and np.max(np.abs(current - previous)) < epsilon:
			return current, iteration
		if iteration > maxIter:
			change = float(np.max(np.abs(current - previous)))
			raise NonConvergenceError(
				"%s iteration did not converge in %d steps (last change %.3g)" % (name, maxIter, change),
				iterations=maxIter,
				residual=change,
				iterate=current,
			)
		previous = current


def solveRateMatrix(a, b, c, epsilon=DEFAULT_EPSILON, maxIter=DEFAULT_MAX_ITER):
	"""
	Minimal nonnegative solution of R^2 A + R B + C = 0.

	>>> solution = solveRateMatrix([[2.0]], [[-3.0]], [[1.0]])
	>>> round(float(solution.r[0, 0]), 10)
	0.5
	"""
	a = np.atleast_2d(np.asarray(a, dtype=float))
	b = np.atleast_2d(np.asarray(b, dtype=float))
	c = np.atleast_2d(np.asarray(c, dtype=float))
	with Timer(logger, "solve the rate matrix"):
		r, iterations = _iterate(iterateRateMatrix(a, b, c), epsilon, maxIter, "rate matrix")
	residual = rateResidual(a, b, c, r)
	radius = spectralRadius(r)
	logger.debug("R: %d iterations, residual %.3g, sp(R) %.12g", iterations, residual, radius)
	return RateMatrixSolution(r=r, iterations=iterations, residual=residual, spectralRadius=radius)


def iterateGMatrix(a, b, c):
	a = np.asarray(a, dtype=float)
	c = np.asarray(c, dtype=float)
	factors = luFactor(b)
	g = np.zeros_like(a)
	while True:
		g = -luSolve(factors, a + c @ g @ g)
		yield g


def solveGMatrix(a, b, c, epsilon=DEFAULT_EPSILON, maxIter=DEFAULT_MAX_ITER):
	"""
	Minimal nonnegative solution of A + B G + C G^2 = 0, iterating
	G(n+1) = -B^-1 (A + C G(n)^2) from G(0) = 0.

	>>> round(float(solveGMatrix([[2.0]], [[-3.0]], [[1.0]])[0, 0]), 8)
	1.0
	"""
	a = np.atleast_2d(np.asarray(a, dtype=float))
	b = np.atleast_2d(np.asarray(b, dtype=float))
	c = np.atleast_2d(np.asarray(c, dtype=float))
	with Timer(logger, "solve the G matrix"):
		g, iterations = _iterate(iterateGMatrix(a, b, c), epsilon, maxIter, "G matrix")
	logger.debug("G: %d iterations", iterations)
	return g


def uMeasure(a, b, r):
	return np.asarray(b, dtype=float) + np.asarray(r, dtype=float) @ np.asarray(a, dtype=float)


def rgFactorization(a, b, c, epsilon=DEFAULT_EPSILON, maxIter=DEFAULT_MAX_ITER, r=None):
	"""
	The pieces of the UL-type factorization
	A z^-1 + B + C z = (I - R z) U (I - G z^-1) of the repeated blocks.
	"""
	if r is None:
		r = solveRateMatrix(a, b, c, epsilon, maxIter).r
	g = solveGMatrix(a, b, c, epsilon, maxIter)
	u = uMeasure(a, b, r)
	other = np.asarray(b, dtype=float) + np.asarray(c, dtype=float) @ g
	uInverse = solveDense(u, np.eye(u.shape[0]))
	return RgFactorization(r=r, g=g, u=u, uInverse=uInverse, consistency=infinityNorm(u - other))


def truncationLevels(radius, tol, floor=MIN_TRUNCATION_LEVELS):
	"""
	Smallest K with radius**K < tol, at least `floor`.

	>>> truncationLevels(0.5, 1e-3)
	10
	>>> truncationLevels(0.0, 1e-10)
	8
	"""
	if radius >= 1.0:
		raise UnstableModelError("geometric series diverges (sp(R)=%.12g)" % radius)
	if radius <= 0.0:
		return floor
	levels = int(np.ceil(np.log(tol) / np.log(radius)))
	while radius ** levels >= tol:
		levels += 1
	return max(floor, levels)


# -----------------------
# Stationary distribution
# -----------------------

@dataclass(frozen=True, eq=False)
class StationarySolution(object):

	"""
	Stationary distribution in matrix-geometric form: the flat level-0
	vector pi0, the level-1 vector pi1 and R. For model two the same
	fields hold psi_0, psi_1 and R.
	"""

	model: Model
	blocks: object = field(repr=False)
	pi0: np.ndarray = field(repr=False)
	pi1: np.ndarray = field(repr=False)
	r: np.ndarray = field(repr=False)
	rate: RateMatrixSolution = field(repr=False)

	def levelVector(self, level):
		"""pi_k = pi_1 R^(k-1) for k >= 1; level 0 returns pi0."""
		if level < 0:
			raise ValueError("negative level %d" % level)
		if level == 0:
			return self.pi0
		return self.pi1 @ np.linalg.matrix_power(self.r, level - 1)

	def subLevelVector(self, index):
		offsets = self.blocks.subLevelOffsets()
		return self.pi0[offsets[index]:offsets[index + 1]]

	def _resolvent(self, power=1):
		size = self.r.shape[0]
		vector = np.ones(size)
		shifted = np.eye(size) - self.r
		for _ in range(power):
			vector = solveDense(shifted, vector)
		return vector

	def geometricSum(self, weights=None):
		"""pi_1 (I - R)^-1 w, the total of w over levels k >= 1 (w = e by default)."""
		size = self.r.shape[0]
		if weights is None:
			weights = np.ones(size)
		return float(self.pi1 @ solveDense(np.eye(size) - self.r, weights))

	def weightedGeometricSum(self):
		"""pi_1 (I - R)^-2 e = sum over k >= 1 of k pi_k e."""
		return float(self.pi1 @ self._resolvent(2))

	def totalMass(self):
		return float(self.pi0.sum()) + self.geometricSum()

	def tailMass(self, levels):
		"""Probability of the levels above `levels`."""
		head = self.pi1 @ np.linalg.matrix_power(self.r, levels)
		return float(head @ self._resolvent(1))

	def levelMasses(self, levels):
		masses = [float(self.pi0.sum())]
		current = self.pi1
		for _ in range(levels):
			masses.append(float(current.sum()))
			current = current @ self.r
		return np.array(masses)

	def boundaryResidual(self):
		"""Largest violation of the level-0 and level-1 balance equations."""
		blocks = self.blocks
		down, local, _ = blocks.repeatedBlocks()
		diagonals = list(blocks.subLevelDiagonals)
		uppers = list(blocks.subLevelUps) + [blocks.toLevelOne]
		lowers = list(blocks.subLevelDowns) + [blocks.fromLevelOne]
		pieces = [self.subLevelVector(i) for i in range(len(diagonals))] + [self.pi1]
		diagonals.append(uMeasure(down, local, self.r))
		worst = 0.0
		for j in range(len(pieces)):
			flow = pieces[j] @ diagonals[j]
			if j > 0:
				flow = flow + pieces[j - 1] @ uppers[j - 1]
			if j < len(pieces) - 1:
				flow = flow + pieces[j + 1] @ lowers[j]
			worst = max(worst, infinityNorm(flow))
		return worst


def _normalized(pi0, pi1, r):
	"""Scale so that pi0 1 + pi1 (I - R)^-1 1 = 1."""
	size = r.shape[0]
	total = pi0.sum() + pi1 @ solveDense(np.eye(size) - r, np.ones(size))
	return pi0 / total, pi1 / total


def solveBoundary(blocks, r, rate=None):
	"""
	Solve pi_0 B_0 + pi_1 A_0 = 0, pi_0 C_0 + pi_1 (B + R A) = 0 and
	pi_0 e + pi_1 (I - R)^-1 e = 1.

	The stacked unknowns (sub-levels 0..N-1, then level 1) form a block
	tridiagonal system. It is censored bottom-up onto sub-level 0, whose
	left null vector is found with the normalization in place of the most
	dependent column; the other pieces follow by back substitution.
	"""
	r = np.asarray(r, dtype=float)
	down, local, _ = blocks.repeatedBlocks()
	diagonals = list(blocks.subLevelDiagonals) + [uMeasure(down, local, r)]
	uppers = list(blocks.subLevelUps) + [blocks.toLevelOne]
	lowers = list(blocks.subLevelDowns) + [blocks.fromLevelOne]
	count = len(diagonals)
	factors = [None] * count
	reduced = diagonals[-1]
	for j in range(count - 1, 0, -1):
		factors[j] = luFactor(reduced)
		reduced = diagonals[j - 1] - uppers[j - 1] @ luSolve(factors[j], lowers[j - 1])
	pieces = [leftNullVector(reduced)]
	for j in range(1, count):
		pieces.append(-solveLeft(factors[j], pieces[j - 1] @ uppers[j - 1]))
	pi0 = np.concatenate(pieces[:-1])
	pi1 = pieces[-1]
	pi0, pi1 = _normalized(pi0, pi1, r)
	smallest = min(pi0.min(), pi1.min())
	if smallest < 0.0:
		logger.debug("clipping negative probabilities down to %.3g", smallest)
		pi0 = np.clip(pi0, 0.0, None)
		pi1 = np.clip(pi1, 0.0, None)
		pi0, pi1 = _normalized(pi0, pi1, r)
	if rate is None:
		a, b, c = blocks.repeatedBlocks()
		rate = RateMatrixSolution(
			r=r, iterations=0, residual=rateResidual(a, b, c, r), spectralRadius=spectralRadius(r))
	return StationarySolution(model=blocks.model, blocks=blocks, pi0=pi0, pi1=pi1, r=r, rate=rate)


def levelVector(solution, level):
	return solution.levelVector(level)


def buildBlocks(model, params):
	"""Block container of either model."""
	model = Model(model)
	if model is Model.ONE:
		from qbdLib.modelOne import buildBlocksOne
		return buildBlocksOne(params)
	from qbdLib.modelTwo import buildBlocksTwo
	return buildBlocksTwo(params)


def solveStationary(model, params, epsilon=DEFAULT_EPSILON, maxIter=DEFAULT_MAX_ITER):
	"""Stability check, blocks, R and boundary in one call."""
	model = Model(model)
	rho = trafficIntensity(params)
	if rho >= 1.0:
		raise UnstableModelError(
			"model %s is unstable: rho=%.12g >= 1" % (model.value, rho), rho=rho)
	blocks = buildBlocks(model, params)
	down, local, up = blocks.repeatedBlocks()
	rate = solveRateMatrix(down, local, up, epsilon, maxIter)
	if rate.spectralRadius >= 1.0:
		raise UnstableModelError("sp(R)=%.12g is not below 1" % rate.spectralRadius, rho=rho)
	with Timer(logger, "solve the boundary equations"):
		solution = solveBoundary(blocks, rate.r, rate)
	return solution


if __name__ == "__main__":
	import doctest
	doctest.testmod()
