"""
Model one: matching information released at matching completion.

A state (i, j) counts i waiting seekers and j idle owners. Seekers arrive
at rate lambda, each of the min(i, j) seeker/owner pairs completes its
match at rate gamma, and each of the N - j busy owners finishes service
at rate mu. Level 0 holds the sub-levels i = 0..N-1, level k >= 1 holds
i = N + k - 1; within a level the phase is j.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from qbdLib.constants import Model
from qbdLib.errors import UnstableModelError
from qbdLib.linalg import blockTridiagonal, solveDense
from qbdLib.stability import trafficIntensity
from qbdLib.structure import QbdStructure

__all__ = [
	"StateIndexOne",
	"QbdBlocksOne",
	"AbsorbingChainOne",
	"buildRepeatedBlocks",
	"buildSubLevelBlocks",
	"buildBoundaryBlocks",
	"buildBlocksOne",
	"buildDriftGenerator",
	"assembleTruncatedGenerator",
	"buildAbsorbingChain",
]

logger = logging.getLogger(__name__)


# -----------
# State index
# -----------

class StateIndexOne(object):

	"""
	Bijection between states (i, j) and (level, phase) positions.

	>>> index = StateIndexOne(2)
	>>> index.levelOf(1, 2)
	(0, 5)
	>>> index.levelOf(3, 1)
	(2, 1)
	>>> index.stateOf(2, 1)
	(3, 1)
	>>> index.flatIndex(3, 1)
	10
	"""

	def __init__(self, owners):
		self.owners = owners

	def _checkPhase(self, j):
		if not 0 <= j <= self.owners:
			raise IndexError("idle owner count %d outside 0..%d" % (j, self.owners))

	def levelOf(self, i, j):
		self._checkPhase(j)
		if i < 0:
			raise IndexError("negative seeker count %d" % i)
		n = self.owners
		if i < n:
			return 0, i * (n + 1) + j
		return i - n + 1, j

	def stateOf(self, level, phase):
		n = self.owners
		if level < 0:
			raise IndexError("negative level %d" % level)
		if level == 0:
			if not 0 <= phase < n * (n + 1):
				raise IndexError("phase %d outside level 0" % phase)
			return phase // (n + 1), phase % (n + 1)
		self._checkPhase(phase)
		return n + level - 1, phase

	def flatIndex(self, i, j):
		"""Position in the truncated generator (level 0 first)."""
		n = self.owners
		level, phase = self.levelOf(i, j)
		if level == 0:
			return phase
		return n * (n + 1) + (level - 1) * (n + 1) + phase

	def stateAt(self, index):
		n = self.owners
		size0 = n * (n + 1)
		if index < size0:
			return self.stateOf(0, index)
		level, phase = divmod(index - size0, n + 1)
		return self.stateOf(level + 1, phase)


# ------
# Blocks
# ------

@dataclass(frozen=True, eq=False)
class QbdBlocksOne(QbdStructure):

	"""
	Block matrices of the Model-one generator. The assembled boundary
	blocks a0, b0 and c0 are built on request from the sub-level blocks.
	"""

	owners: int
	a: np.ndarray
	b: np.ndarray
	c: np.ndarray
	subLevelDiagonals: tuple = field(repr=False)
	subLevelUps: tuple = field(repr=False)
	subLevelDowns: tuple = field(repr=False)
	toLevelOne: np.ndarray = field(repr=False)
	fromLevelOne: np.ndarray = field(repr=False)

	model = Model.ONE

	@property
	def down(self):
		return self.a

	@property
	def local(self):
		return self.b

	@property
	def up(self):
		return self.c

	@property
	def b0(self):
		return blockTridiagonal(self.subLevelDiagonals, self.subLevelUps, self.subLevelDowns)

	@property
	def a0(self):
		n = self.owners
		block = np.zeros((n + 1, self.level0Size))
		block[:, -(n + 1):] = self.fromLevelOne
		return block

	@property
	def c0(self):
		n = self.owners
		block = np.zeros((self.level0Size, n + 1))
		block[-(n + 1):, :] = self.toLevelOne
		return block

	def levelZeroCounts(self):
		n = self.owners
		j = np.tile(np.arange(n + 1), n)
		i = np.repeat(np.arange(n), n + 1)
		return {"idle": j.astype(float), "waiting": i.astype(float), "inService": (n - j).astype(float)}

	def repeatedCounts(self, level):
		n = self.owners
		j = np.arange(n + 1, dtype=float)
		return {"idle": j, "waiting": np.full(n + 1, float(n + level - 1)), "inService": n - j}


def buildRepeatedBlocks(params):
	"""
	Return (a, b, c) for levels k >= 1.

	>>> from qbdLib.stability import ModelParams
	>>> a, b, c = buildRepeatedBlocks(ModelParams(2, 3, 5, 1))
	>>> a.tolist(), b.tolist(), c.tolist()
	([[0.0, 0.0], [5.0, 0.0]], [[-5.0, 3.0], [0.0, -7.0]], [[2.0, 0.0], [0.0, 2.0]])
	"""
	n = params.owners
	lam = params.arrivalRate
	mu = params.serviceRate
	gamma = params.matchingRate
	j = np.arange(n + 1)
	a = np.zeros((n + 1, n + 1))
	a[j[1:], j[1:] - 1] = j[1:] * gamma
	b = np.diag(np.asarray(-(lam + (n - j) * mu + j * gamma), dtype=float))
	b[j[:-1], j[:-1] + 1] = (n - j[:-1]) * mu
	c = lam * np.eye(n + 1)
	return a, b, c


def buildSubLevelBlocks(params, k):
	"""
	Return (up, diagonal, down) for level-0 sub-level k: arrivals lambda I,
	the local block with diagonal -[lambda + min(j, k) gamma + (N - j) mu],
	and the matching completions min(j, k) gamma towards sub-level k - 1.
	"""
	n = params.owners
	lam = params.arrivalRate
	mu = params.serviceRate
	gamma = params.matchingRate
	j = np.arange(n + 1)
	matching = np.asarray(np.minimum(j, k) * gamma, dtype=float)
	diagonal = np.diag(np.asarray(-(lam + matching + (n - j) * mu), dtype=float))
	diagonal[j[:-1], j[:-1] + 1] = (n - j[:-1]) * mu
	down = np.zeros((n + 1, n + 1))
	down[j[1:], j[1:] - 1] = matching[1:]
	up = lam * np.eye(n + 1)
	return up, diagonal, down


def buildBlocksOne(params):
	n = params.owners
	a, b, c = buildRepeatedBlocks(params)
	diagonals = []
	ups = []
	downs = []
	for k in range(n):
		up, diagonal, down = buildSubLevelBlocks(params, k)
		diagonals.append(diagonal)
		if k > 0:
			downs.append(down)
		if k < n - 1:
			ups.append(up)
	toLevelOne = params.arrivalRate * np.eye(n + 1)
	# from level 1 the down block equals the sub-level-N matching block
	fromLevelOne = buildSubLevelBlocks(params, n)[2]
	return QbdBlocksOne(
		owners=n,
		a=a,
		b=b,
		c=c,
		subLevelDiagonals=tuple(diagonals),
		subLevelUps=tuple(ups),
		subLevelDowns=tuple(downs),
		toLevelOne=toLevelOne,
		fromLevelOne=fromLevelOne,
	)


def buildBoundaryBlocks(params):
	"""
	Return the assembled boundary blocks (a0, b0, c0).

	>>> from qbdLib.stability import ModelParams
	>>> a0, b0, c0 = buildBoundaryBlocks(ModelParams(1, 1, 2, 3))
	>>> a0.shape, b0.shape, c0.shape
	((4, 12), (12, 12), (12, 4))
	"""
	blocks = buildBlocksOne(params)
	return blocks.a0, blocks.b0, blocks.c0


def buildDriftGenerator(params):
	"""D = A + B + C, the generator of the idle owner count at high levels."""
	a, b, c = buildRepeatedBlocks(params)
	return a + b + c


def assembleTruncatedGenerator(params, levels):
	"""
	Dense generator over level 0 and `levels` repeating levels with a
	reflecting top level.

	>>> from qbdLib.stability import ModelParams
	>>> assembleTruncatedGenerator(ModelParams(1, 1, 2, 2), 3).shape
	(15, 15)
	"""
	return buildBlocksOne(params).truncatedGenerator(levels)


# ---------------------
# Sojourn-time chain
# ---------------------

@dataclass(frozen=True, eq=False)
class AbsorbingChainOne(object):

	"""
	The chain a tagged seeker's sojourn is read from. Sub-level 0 of
	level 0 is the absorption set; the transient part keeps sub-levels
	1..N-1 (the boundary, T11) and every level k >= 1 (T22).

	For N = 1 there is no boundary part and absorption happens from
	level 1 directly.
	"""

	owners: int
	a: np.ndarray
	b: np.ndarray
	c: np.ndarray
	r: np.ndarray
	boundaryDiagonals: tuple = field(repr=False)
	boundaryUps: tuple = field(repr=False)
	boundaryDowns: tuple = field(repr=False)
	toLevelOne: np.ndarray = field(repr=False)
	fromLevelOne: np.ndarray = field(repr=False)
	phiTilde: np.ndarray = field(repr=False)
	phiLevelOne: np.ndarray = field(repr=False)
	omegaDelta: float = 0.0
	omegaBoundary: np.ndarray = field(default=None, repr=False)
	omegaLevelOne: np.ndarray = field(default=None, repr=False)
	spectralRadius: float = 0.0

	@property
	def boundarySize(self):
		return sum(block.shape[0] for block in self.boundaryDiagonals)

	@property
	def t11(self):
		if not self.boundaryDiagonals:
			return np.zeros((0, 0))
		return blockTridiagonal(self.boundaryDiagonals, self.boundaryUps, self.boundaryDowns)

	@property
	def t12(self):
		block = np.zeros((self.boundarySize, self.repeatSize))
		if self.boundarySize:
			block[-self.repeatSize:, :] = self.toLevelOne
		return block

	@property
	def t21(self):
		block = np.zeros((self.repeatSize, self.boundarySize))
		if self.boundarySize:
			block[:, -self.repeatSize:] = self.fromLevelOne
		return block

	@property
	def repeatSize(self):
		return self.b.shape[0]

	def omegaLevel(self, level):
		"""Initial mass on level k >= 1, pi_1 R^(k-1)."""
		return self.omegaLevelOne @ np.linalg.matrix_power(self.r, level - 1)

	def omegaTildeMass(self):
		tail = solveDense(np.eye(self.repeatSize) - self.r, np.ones(self.repeatSize))
		return float(self.omegaBoundary.sum() + self.omegaLevelOne @ tail)

	def truncatedLayout(self, levels):
		top = self.b + np.diag(self.c.sum(axis=1))
		levelDiagonals = [self.b] * (levels - 1) + [top]
		if self.boundaryDiagonals:
			diagonals = list(self.boundaryDiagonals) + levelDiagonals
			uppers = list(self.boundaryUps) + [self.toLevelOne] + [self.c] * (levels - 1)
			lowers = list(self.boundaryDowns) + [self.fromLevelOne] + [self.a] * (levels - 1)
		else:
			diagonals = levelDiagonals
			uppers = [self.c] * (levels - 1)
			lowers = [self.a] * (levels - 1)
		return diagonals, uppers, lowers

	def truncatedSubGenerator(self, levels, sparse=True):
		"""T restricted to the boundary and `levels` levels, reflecting at the top."""
		diagonals, uppers, lowers = self.truncatedLayout(levels)
		return blockTridiagonal(diagonals, uppers, lowers, sparse=sparse)

	def truncatedExit(self, levels):
		rest = np.zeros((levels - 1) * self.repeatSize)
		return np.concatenate([self.phiTilde, self.phiLevelOne, rest])

	def truncatedOmega(self, levels):
		"""omega over the truncation; the tail beyond the last level is folded into it."""
		parts = [self.omegaBoundary]
		current = self.omegaLevelOne
		for _ in range(levels - 1):
			parts.append(current)
			current = current @ self.r
		last = solveDense((np.eye(self.repeatSize) - self.r).T, current)
		parts.append(last)
		return np.concatenate(parts)


def buildAbsorbingChain(params, solution):
	"""
	Build the sojourn-time chain from a stationary solution of Model one.
	The initial vector puts omegaDelta = pi_0^(0) e on absorption and
	pi on every transient state.
	"""
	rho = trafficIntensity(params)
	if rho >= 1.0:
		raise UnstableModelError("sojourn chain needs a stable instance (rho=%.6g)" % rho, rho=rho)
	blocks = solution.blocks
	n = params.owners
	gamma = params.matchingRate
	offsets = blocks.subLevelOffsets()
	omegaDelta = float(solution.pi0[:offsets[1]].sum())
	omegaBoundary = solution.pi0[offsets[1]:].copy()
	phi = np.minimum(np.arange(n + 1), 1) * float(gamma)
	if n > 1:
		phiTilde = np.concatenate([phi, np.zeros((n - 2) * (n + 1))])
		phiLevelOne = np.zeros(n + 1)
	else:
		phiTilde = np.zeros(0)
		phiLevelOne = phi
	chain = AbsorbingChainOne(
		owners=n,
		a=blocks.a,
		b=blocks.b,
		c=blocks.c,
		r=solution.r,
		boundaryDiagonals=tuple(blocks.subLevelDiagonals[1:]),
		boundaryUps=tuple(blocks.subLevelUps[1:]),
		boundaryDowns=tuple(blocks.subLevelDowns[1:]),
		toLevelOne=blocks.toLevelOne,
		fromLevelOne=blocks.fromLevelOne,
		phiTilde=phiTilde,
		phiLevelOne=phiLevelOne,
		omegaDelta=omegaDelta,
		omegaBoundary=omegaBoundary,
		omegaLevelOne=solution.pi1.copy(),
		spectralRadius=solution.rate.spectralRadius,
	)
	logger.debug("absorbing chain: omegaDelta=%.6g boundary size %d", omegaDelta, chain.boundarySize)
	return chain


if __name__ == "__main__":
	import doctest
	doctest.testmod()
