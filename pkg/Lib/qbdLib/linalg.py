"""
Dense linear algebra helpers for block-structured generators.

Matrices are float64 numpy arrays. Solvers raise SingularMatrixError
instead of returning garbage when a pivot vanishes.
"""
import logging
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.stats import poisson

from qbdLib.errors import DimensionError, NonConvergenceError, RankDeficiencyError, SingularMatrixError

__all__ = [
	"asMatrix",
	"kronProduct",
	"kronSum",
	"kronPower",
	"kronSumPower",
	"luFactor",
	"luSolve",
	"solveDense",
	"solveLeft",
	"spectralRadius",
	"expmAction",
	"blockTridiagonal",
	"solveBlockTridiagonal",
	"leftNullVector",
	"infinityNorm",
]

logger = logging.getLogger(__name__)


def asMatrix(a):
	"""
	>>> asMatrix(2.0).shape
	(1, 1)
	"""
	return np.atleast_2d(np.asarray(a, dtype=float))


def _checkSquare(a, name="matrix"):
	a = asMatrix(a)
	if a.shape[0] != a.shape[1]:
		raise DimensionError("%s must be square, got %dx%d" % (name, a.shape[0], a.shape[1]))
	return a


def infinityNorm(a):
	"""Maximum absolute row sum (maximum absolute entry for vectors)."""
	a = np.asarray(a, dtype=float)
	if a.size == 0:
		return 0.0
	if a.ndim == 1:
		return float(np.max(np.abs(a)))
	return float(np.max(np.sum(np.abs(a), axis=1)))


# ---------
# Kronecker
# ---------

def kronProduct(a, b):
	"""
	>>> kronProduct([[2.0]], [[3.0]]).tolist()
	[[6.0]]
	"""
	return np.kron(asMatrix(a), asMatrix(b))


def kronSum(a, b):
	"""
	a (+) b = a (x) I + I (x) b for square a and b.

	>>> kronSum([[1.0]], [[2.0]]).tolist()
	[[3.0]]
	"""
	a = _checkSquare(a, "left operand")
	b = _checkSquare(b, "right operand")
	return np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)


def kronPower(a, n):
	"""n-fold Kronecker product; the empty product is [[1]]."""
	result = np.ones((1, 1))
	a = asMatrix(a)
	for _ in range(n):
		result = np.kron(result, a)
	return result


def kronSumPower(a, n):
	"""n-fold Kronecker sum; the empty sum is [[0]]."""
	a = _checkSquare(a)
	result = np.zeros((1, 1))
	for _ in range(n):
		result = kronSum(result, a)
	return result


# -------
# Solvers
# -------

def luFactor(a):
	"""
	LU factorization with partial pivoting. Raises SingularMatrixError
	carrying the index of the first vanishing pivot.
	"""
	a = _checkSquare(a)
	n = a.shape[0]
	scale = np.max(np.abs(a)) if a.size else 0.0
	if scale == 0.0:
		raise SingularMatrixError("matrix is zero", pivot=0)
	with warnings.catch_warnings():
		warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
		lu, piv = scipy.linalg.lu_factor(a)
	threshold = np.finfo(float).eps * n * scale
	small = np.flatnonzero(np.abs(np.diag(lu)) <= threshold)
	if small.size:
		pivot = int(small[0])
		raise SingularMatrixError("matrix is singular to machine precision at pivot %d" % pivot, pivot=pivot)
	return lu, piv


def luSolve(factors, b, trans=0):
	return scipy.linalg.lu_solve(factors, np.asarray(b, dtype=float), trans=trans)


def solveDense(a, b):
	"""
	Solve a x = b with partial pivoting.

	>>> solveDense([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0]).tolist()
	[1.0, 2.0]
	"""
	return luSolve(luFactor(a), b)


def solveLeft(factors, b):
	"""Solve x a = b for row vector(s) b, given the LU factors of a."""
	b = np.asarray(b, dtype=float)
	return luSolve(factors, b.T, trans=1).T


def spectralRadius(a, tol=1e-12, maxIter=100000):
	"""
	Dominant eigenvalue modulus by power iteration from the all-ones
	vector. A two-term Krylov fit catches complex or opposite-sign
	dominant pairs, where plain power iteration oscillates.

	>>> spectralRadius(np.diag([0.3, 0.7]))
	0.7
	"""
	a = _checkSquare(a)
	if a.shape[0] == 0:
		return 0.0
	x = np.ones(a.shape[0])
	previous = None
	for iteration in range(1, maxIter + 1):
		y = a @ x
		estimate = float(np.max(np.abs(y)))
		if estimate == 0.0:
			return 0.0
		if previous is not None and abs(estimate - previous) <= tol * estimate:
			logger.debug("spectral radius %.15g after %d iterations", estimate, iteration)
			return estimate
		if iteration % 64 == 0:
			fitted = _krylovPairModulus(a, x, 10.0 * tol)
			if fitted is not None:
				return fitted
		previous = estimate
		x = y / estimate
	fitted = _krylovPairModulus(a, x, 1e-8)
	if fitted is not None:
		return fitted
	raise NonConvergenceError(
		"power iteration did not converge in %d iterations" % maxIter,
		iterations=maxIter,
		iterate=x,
	)


def _krylovPairModulus(a, x, tol):
	v0 = x
	v1 = a @ v0
	v2 = a @ v1
	scale = np.max(np.abs(v2))
	if scale == 0.0:
		return 0.0
	basis = np.column_stack([v1, v0])
	coefficients = np.linalg.lstsq(basis, -v2, rcond=None)[0]
	residual = np.max(np.abs(v2 + basis @ coefficients)) / scale
	if residual > tol:
		return None
	roots = np.roots([1.0, coefficients[0], coefficients[1]])
	return float(np.max(np.abs(roots)))


def expmAction(q, v, t, tol=1e-12):
	"""
	exp(q t) v by uniformization. q is a (sub)generator, dense or
	scipy.sparse; the Poisson series is cut where the tail drops below tol.

	>>> expmAction(np.array([[-1.0, 1.0], [1.0, -1.0]]), np.array([1.0, 0.0]), 0.0).tolist()
	[1.0, 0.0]
	"""
	v = np.asarray(v, dtype=float)
	if t == 0:
		return v.copy()
	if scipy.sparse.issparse(q):
		diagonal = q.diagonal()
	else:
		q = asMatrix(q)
		diagonal = np.diag(q)
	rate = float(np.max(np.abs(diagonal))) if diagonal.size else 0.0
	if rate == 0.0:
		return v.copy()
	if scipy.sparse.issparse(q):
		p = scipy.sparse.identity(q.shape[0], format="csr") + q.tocsr() / rate
	else:
		p = np.eye(q.shape[0]) + q / rate
	mean = rate * t
	terms = int(poisson.isf(tol, mean)) + 1
	weights = poisson.pmf(np.arange(terms + 1), mean)
	term = v.copy()
	result = weights[0] * term
	for k in range(1, terms + 1):
		term = p @ term
		result = result + weights[k] * term
	return result


# ----------------
# Block structures
# ----------------

def blockTridiagonal(diagonals, uppers, lowers, sparse=False):
	"""
	Assemble a block tridiagonal matrix. uppers[i] couples block i to
	block i + 1, lowers[i] couples block i + 1 to block i.

	>>> blockTridiagonal([[[1.0]], [[2.0]]], [[[3.0]]], [[[4.0]]]).tolist()
	[[1.0, 3.0], [4.0, 2.0]]
	"""
	count = len(diagonals)
	if len(uppers) != count - 1 or len(lowers) != count - 1:
		raise DimensionError("expected %d off-diagonal blocks on each side" % (count - 1))
	grid = [[None] * count for _ in range(count)]
	for i, block in enumerate(diagonals):
		grid[i][i] = asMatrix(block)
	for i in range(count - 1):
		grid[i][i + 1] = asMatrix(uppers[i])
		grid[i + 1][i] = asMatrix(lowers[i])
	if sparse:
		return scipy.sparse.bmat(grid, format="csr")
	sizes = [grid[i][i].shape[0] for i in range(count)]
	offsets = np.concatenate([[0], np.cumsum(sizes)])
	result = np.zeros((offsets[-1], offsets[-1]))
	for i in range(count):
		for j in range(max(0, i - 1), min(count, i + 2)):
			block = grid[i][j]
			if block.shape != (sizes[i], sizes[j]):
				raise DimensionError("block (%d, %d) has shape %s" % (i, j, block.shape))
			result[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = block
	return result


def solveBlockTridiagonal(diagonals, uppers, lowers, rhs):
	"""
	Solve M x = rhs for block tridiagonal M by block elimination. rhs is
	a list of per-block vectors; the solution comes back the same way.
	"""
	count = len(diagonals)
	factors = [None] * count
	reduced = [None] * count
	h = asMatrix(diagonals[0])
	y = np.asarray(rhs[0], dtype=float)
	factors[0] = luFactor(h)
	reduced[0] = y
	for i in range(1, count):
		lower = asMatrix(lowers[i - 1])
		h = asMatrix(diagonals[i]) - lower @ luSolve(factors[i - 1], asMatrix(uppers[i - 1]))
		y = np.asarray(rhs[i], dtype=float) - lower @ luSolve(factors[i - 1], reduced[i - 1])
		factors[i] = luFactor(h)
		reduced[i] = y
	solution = [None] * count
	solution[-1] = luSolve(factors[-1], reduced[-1])
	for i in range(count - 2, -1, -1):
		solution[i] = luSolve(factors[i], reduced[i] - asMatrix(uppers[i]) @ solution[i + 1])
	return solution


def leftNullVector(h, tol=1e-10):
	"""
	Row vector x with x h = 0 and x e = 1, for h with a one-dimensional
	left null space. The most dependent column, found by pivoted QR, is
	replaced by the normalization.

	>>> [round(v, 12) for v in leftNullVector(np.array([[-1.0, 1.0], [2.0, -2.0]]))]
	[0.666666666667, 0.333333333333]
	"""
	h = _checkSquare(h)
	n = h.shape[0]
	if n == 1:
		return np.ones(1)
	_, upper, permutation = scipy.linalg.qr(h, pivoting=True)
	diagonal = np.abs(np.diag(upper))
	if diagonal[0] == 0.0 or diagonal[-2] <= tol * diagonal[0]:
		raise RankDeficiencyError(
			"balance system has more than one dependent equation",
			pivot=int(permutation[-2]),
		)
	column = int(permutation[-1])
	replaced = h.copy()
	replaced[:, column] = 1.0
	target = np.zeros(n)
	target[column] = 1.0
	return solveLeft(luFactor(replaced), target)


if __name__ == "__main__":
	import doctest
	doctest.testmod()
