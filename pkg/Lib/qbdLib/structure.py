"""
Shared view of a level-independent QBD generator whose level 0 is split
into sub-levels.

Level 0 is a chain of sub-levels 0..N-1 with block tridiagonal couplings;
the last sub-level couples to level 1, and levels k >= 1 repeat the same
(down, local, up) blocks. Both platform models fit this shape, which lets
one boundary solver and one truncation routine serve both.
"""
import numpy as np

from qbdLib.linalg import blockTridiagonal


class QbdStructure(object):

	"""
	Mixin for the block containers of both models.

	Subclasses provide the attributes

		down, local, up          repeated blocks between levels k >= 1
		subLevelDiagonals        diagonal blocks of the level-0 sub-levels
		subLevelUps              sub-level i -> i + 1 couplings
		subLevelDowns            sub-level i + 1 -> i couplings
		toLevelOne               last sub-level -> level 1
		fromLevelOne             level 1 -> last sub-level

	and the methods levelZeroCounts() and repeatedCounts(level), returning
	per-phase dictionaries of "idle", "waiting" and "inService" counts.
	"""

	model = None

	def repeatedBlocks(self):
		return self.down, self.local, self.up

	@property
	def repeatSize(self):
		return self.local.shape[0]

	@property
	def subLevelSizes(self):
		return [block.shape[0] for block in self.subLevelDiagonals]

	@property
	def level0Size(self):
		return sum(self.subLevelSizes)

	def subLevelOffsets(self):
		"""Start index of every sub-level inside the flat level-0 vector."""
		return np.concatenate([[0], np.cumsum(self.subLevelSizes)]).astype(int)

	def truncatedLayout(self, levels):
		"""
		Blocks of the generator truncated after `levels` repeating levels.
		Arrivals out of the last level are suppressed and their rate is
		folded into its diagonal, so every row still sums to zero.
		"""
		if levels < 1:
			raise ValueError("at least one repeating level is required")
		top = self.local + np.diag(self.up.sum(axis=1))
		diagonals = list(self.subLevelDiagonals) + [self.local] * (levels - 1) + [top]
		uppers = list(self.subLevelUps) + [self.toLevelOne] + [self.up] * (levels - 1)
		lowers = list(self.subLevelDowns) + [self.fromLevelOne] + [self.down] * (levels - 1)
		return diagonals, uppers, lowers

	def truncatedGenerator(self, levels, sparse=False):
		diagonals, uppers, lowers = self.truncatedLayout(levels)
		return blockTridiagonal(diagonals, uppers, lowers, sparse=sparse)

	def truncatedCounts(self, levels):
		"""Per-state counts over the flat truncated index."""
		zero = self.levelZeroCounts()
		counts = {}
		for key, values in zero.items():
			parts = [values] + [self.repeatedCounts(level)[key] for level in range(1, levels + 1)]
			counts[key] = np.concatenate(parts)
		return counts
