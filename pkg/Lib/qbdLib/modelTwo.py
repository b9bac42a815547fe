"""
Model two: matching information released at matching start.

An owner that takes a seeker goes through a generalized Erlang period of
order 2: matching at rate gamma, then service at rate mu. Level 0 holds
the sub-levels n = 0..N-1 of working owners with nobody waiting; level
k >= 1 has all N owners working and k - 1 seekers waiting. A phase is the
tuple of the working owners' phases, each 1 (matching) or 2 (service),
ordered lexicographically.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import factorial

from qbdLib.constants import MODEL_TWO_MAX_OWNERS, Model
from qbdLib.errors import CapacityError
from qbdLib.linalg import blockTridiagonal, kronPower, kronSumPower, solveDense
from qbdLib.structure import QbdStructure

__all__ = [
	"PhRep",
	"PhaseIndexTwo",
	"QbdBlocksTwo",
	"phGeneralizedErlang",
	"phaseIndex",
	"indexPhase",
	"buildBlocksTwo",
	"driftVectorTwo",
	"driftThetaTwo",
	"meanDriftRatesTwo",
	"assembleTruncatedGenerator",
]

logger = logging.getLogger(__name__)


# ---------------------
# Phase-type service
# ---------------------

@dataclass(frozen=True, eq=False)
class PhRep(object):

	"""A phase-type representation (alpha, T, T0)."""

	alpha: np.ndarray
	t: np.ndarray
	t0: np.ndarray

	@property
	def order(self):
		return self.t.shape[0]

	def moment(self, k):
		"""k! alpha (-T)^-k e"""
		vector = np.ones(self.order)
		for _ in range(k):
			vector = solveDense(-self.t, vector)
		return float(factorial(k, exact=True) * (self.alpha @ vector))

	def mean(self):
		return self.moment(1)

	def variance(self):
		return self.moment(2) - self.mean() ** 2

	def scv(self):
		"""Squared coefficient of variation."""
		return self.variance() / self.mean() ** 2


def phGeneralizedErlang(gamma, mu):
	"""
	>>> ph = phGeneralizedErlang(2.0, 1.0)
	>>> ph.t.tolist(), ph.t0.tolist()
	([[-2.0, 2.0], [0.0, -1.0]], [0.0, 1.0])
	>>> ph.mean()
	1.5
	"""
	gamma = float(gamma)
	mu = float(mu)
	return PhRep(
		alpha=np.array([1.0, 0.0]),
		t=np.array([[-gamma, gamma], [0.0, -mu]]),
		t0=np.array([0.0, mu]),
	)


# -----------
# Phase index
# -----------

def phaseIndex(n, phases):
	"""
	Position of a phase tuple inside its sub-level: the tuple read as a
	base-2 numeral with digits (i - 1), first owner most significant.

	>>> phaseIndex(2, (2, 1))
	2
	>>> phaseIndex(3, (1, 2, 2))
	3
	"""
	phases = tuple(phases)
	if len(phases) != n:
		raise ValueError("expected %d phases, got %d" % (n, len(phases)))
	index = 0
	for phase in phases:
		if phase not in (1, 2):
			raise ValueError("phase entries must be 1 or 2, got %r" % (phase,))
		index = 2 * index + (phase - 1)
	return index


def indexPhase(n, index):
	"""
	>>> indexPhase(3, 3)
	(1, 2, 2)
	"""
	if not 0 <= index < 2 ** n:
		raise ValueError("index %d outside 0..%d" % (index, 2 ** n - 1))
	digits = []
	for _ in range(n):
		index, digit = divmod(index, 2)
		digits.append(digit + 1)
	return tuple(reversed(digits))


class PhaseIndexTwo(object):

	"""
	Flat indexing of level 0 (sub-level n starts at 2**n - 1) and of the
	repeating levels.

	>>> index = PhaseIndexTwo(3)
	>>> index.flatIndex(2, (2, 1))
	5
	>>> index.stateAt(5)
	(2, (2, 1))
	"""

	def __init__(self, owners):
		self.owners = owners

	@staticmethod
	def offset(n):
		return 2 ** n - 1

	@property
	def level0Size(self):
		return 2 ** self.owners - 1

	def flatIndex(self, n, phases):
		if not 0 <= n < self.owners:
			raise ValueError("sub-level %d outside 0..%d" % (n, self.owners - 1))
		return self.offset(n) + phaseIndex(n, phases)

	def stateAt(self, index):
		if not 0 <= index < self.level0Size:
			raise ValueError("index %d outside level 0" % index)
		n = 0
		while self.offset(n + 1) <= index:
			n += 1
		return n, indexPhase(n, index - self.offset(n))


def _phaseTwoCounts(n):
	return np.array([bin(m).count("1") for m in range(2 ** n)], dtype=float)


# ------
# Blocks
# ------

@dataclass(frozen=True, eq=False)
class QbdBlocksTwo(QbdStructure):

	"""
	Block matrices of the Model-two generator: repeated a0 (up), a1
	(local), a2 (down); the boundary f1, f0, f2 are assembled on request.
	"""

	owners: int
	ph: PhRep
	a0: np.ndarray
	a1: np.ndarray
	a2: np.ndarray
	subLevelDiagonals: tuple = field(repr=False)
	subLevelUps: tuple = field(repr=False)
	subLevelDowns: tuple = field(repr=False)
	toLevelOne: np.ndarray = field(repr=False)
	fromLevelOne: np.ndarray = field(repr=False)

	model = Model.TWO

	@property
	def down(self):
		return self.a2

	@property
	def local(self):
		return self.a1

	@property
	def up(self):
		return self.a0

	@property
	def f1(self):
		return blockTridiagonal(self.subLevelDiagonals, self.subLevelUps, self.subLevelDowns)

	@property
	def f0(self):
		block = np.zeros((self.level0Size, self.repeatSize))
		rows = self.toLevelOne.shape[0]
		block[-rows:, :] = self.toLevelOne
		return block

	@property
	def f2(self):
		block = np.zeros((self.repeatSize, self.level0Size))
		columns = self.fromLevelOne.shape[1]
		block[:, -columns:] = self.fromLevelOne
		return block

	def levelZeroCounts(self):
		n = self.owners
		idle = np.concatenate([np.full(2 ** m, float(n - m)) for m in range(n)])
		inService = np.concatenate([_phaseTwoCounts(m) for m in range(n)])
		return {"idle": idle, "waiting": np.zeros(self.level0Size), "inService": inService}

	def repeatedCounts(self, level):
		size = self.repeatSize
		return {
			"idle": np.zeros(size),
			"waiting": np.full(size, float(level - 1)),
			"inService": _phaseTwoCounts(self.owners),
		}


def _embedded(block, position, count):
	"""I (x) ... (x) block (x) ... (x) I with `block` on coordinate `position` of `count`."""
	left = np.eye(2 ** position)
	right = np.eye(2 ** (count - position - 1))
	return np.kron(np.kron(left, block), right)


def _completionBlock(ph, n):
	"""C(n): one of n working owners leaves after phase 2, its coordinate removed."""
	exit = ph.t0.reshape(2, 1)
	block = np.zeros((2 ** n, 2 ** (n - 1)))
	for position in range(n):
		block += _embedded(exit, position, n)
	return block


def _startBlock(ph, n):
	"""D(n): a new owner starts matching as coordinate n + 1."""
	return np.kron(np.eye(2 ** n), ph.alpha.reshape(1, 2))


def buildBlocksTwo(params, maxOwners=MODEL_TWO_MAX_OWNERS):
	"""
	>>> from qbdLib.stability import ModelParams
	>>> blocks = buildBlocksTwo(ModelParams(0.3, 1, 2, 1))
	>>> blocks.f1.tolist(), blocks.f0.tolist(), blocks.f2.tolist()
	([[-0.3]], [[0.3, 0.0]], [[0.0], [1.0]])
	"""
	n = params.owners
	if n > maxOwners:
		raise CapacityError(
			"model two with N=%d needs 2**%d = %d phases per level; the cap is N=%d"
			% (n, n, 2 ** n, maxOwners))
	lam = float(params.arrivalRate)
	ph = phGeneralizedErlang(params.matchingRate, params.serviceRate)
	size = 2 ** n
	a0 = lam * np.eye(size)
	a1 = kronSumPower(ph.t, n) - lam * np.eye(size)
	restart = np.outer(ph.t0, ph.alpha)
	a2 = np.zeros((size, size))
	for position in range(n):
		a2 += _embedded(restart, position, n)
	diagonals = []
	ups = []
	downs = []
	for m in range(n):
		diagonals.append(kronSumPower(ph.t, m) - lam * np.eye(2 ** m))
		if m < n - 1:
			ups.append(lam * _startBlock(ph, m))
		if m > 0:
			downs.append(_completionBlock(ph, m))
	logger.debug("model two blocks: N=%d, %d phases per level", n, size)
	return QbdBlocksTwo(
		owners=n,
		ph=ph,
		a0=a0,
		a1=a1,
		a2=a2,
		subLevelDiagonals=tuple(diagonals),
		subLevelUps=tuple(ups),
		subLevelDowns=tuple(downs),
		toLevelOne=lam * _startBlock(ph, n - 1),
		fromLevelOne=_completionBlock(ph, n),
	)


def driftVectorTwo(gamma, mu):
	"""
	Stationary vector of T + T0 alpha.

	>>> driftVectorTwo(1.0, 1.0).tolist()
	[0.5, 0.5]
	"""
	total = float(gamma + mu)
	return np.array([mu / total, gamma / total])


def driftThetaTwo(params):
	omega = driftVectorTwo(params.matchingRate, params.serviceRate)
	return kronPower(omega.reshape(1, 2), params.owners).ravel()


def meanDriftRatesTwo(params, blocks=None):
	"""Return (up, down) = (Theta A0 e, Theta A2 e) from the built blocks."""
	if blocks is None:
		blocks = buildBlocksTwo(params)
	theta = driftThetaTwo(params)
	ones = np.ones(blocks.repeatSize)
	return float(theta @ blocks.a0 @ ones), float(theta @ blocks.a2 @ ones)


def assembleTruncatedGenerator(params, levels):
	return buildBlocksTwo(params).truncatedGenerator(levels)


if __name__ == "__main__":
	import doctest
	doctest.testmod()
