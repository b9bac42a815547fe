"""
Brute-force stationary solve on a finite truncation of either generator.

Level 0 is kept whole and `levels` repeating levels follow; arrivals out of
the last level are suppressed (reflecting truncation). The result is an
oracle for the matrix-geometric solution as long as the mass of the last
level is negligible.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from fontTools.misc.loggingTools import Timer

from qbdLib.constants import Model
from qbdLib.errors import ParameterError
from qbdLib.linalg import infinityNorm, leftNullVector
from qbdLib.matrixAnalytic import buildBlocks

__all__ = ["TruncatedSolution", "truncatedStationary"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TruncatedSolution(object):

	"""
	Stationary vector of a truncated generator over the flat index
	(level 0, then levels 1..levels).
	"""

	model: Model
	blocks: object = field(repr=False)
	levels: int
	pi: np.ndarray = field(repr=False)
	residual: float = 0.0

	def _mean(self, key):
		return float(self.pi @ self.blocks.truncatedCounts(self.levels)[key])

	def meanIdleOwners(self):
		return self._mean("idle")

	def meanWaitingSeekers(self):
		return self._mean("waiting")

	def meanInService(self):
		return self._mean("inService")

	def levelMasses(self):
		"""Mass of level 0 and of every kept repeating level."""
		head = self.blocks.level0Size
		rest = self.pi[head:].reshape(self.levels, self.blocks.repeatSize)
		return np.concatenate([[self.pi[:head].sum()], rest.sum(axis=1)])

	@property
	def tailMass(self):
		"""Mass of the last kept level."""
		return float(self.levelMasses()[-1])

	def levelZeroVector(self):
		return self.pi[:self.blocks.level0Size]

	def levelVector(self, level):
		start = self.blocks.level0Size + (level - 1) * self.blocks.repeatSize
		return self.pi[start:start + self.blocks.repeatSize]


def truncatedStationary(model, params, levels, tailTolerance=None):
	"""
	Solve pi Q = 0, pi e = 1 on the truncation with `levels` repeating
	levels. A tail mass above `tailTolerance` is logged as a warning;
	callers decide whether it is acceptable.
	"""
	if levels < 2:
		raise ParameterError("a truncation needs at least 2 repeating levels, got %d" % levels)
	model = Model(model)
	blocks = buildBlocks(model, params)
	generator = blocks.truncatedGenerator(levels)
	with Timer(logger, "truncated solve over %d states" % generator.shape[0]):
		pi = leftNullVector(generator)
	pi = np.clip(pi, 0.0, None)
	pi = pi / pi.sum()
	solution = TruncatedSolution(
		model=model,
		blocks=blocks,
		levels=levels,
		pi=pi,
		residual=infinityNorm(pi @ generator),
	)
	if tailTolerance is not None and solution.tailMass > tailTolerance:
		logger.warning(
			"truncation at %d levels keeps tail mass %.3g above %.3g",
			levels, solution.tailMass, tailTolerance)
	logger.debug("truncated solve: K=%d tail %.3g residual %.3g", levels, solution.tailMass, solution.residual)
	return solution
