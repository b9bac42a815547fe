"""
Event-driven simulation of both platform models.

Every step is an exponential race between the enabled transitions (the
Gillespie step): the holding time is exponential with the total rate and
the transition is picked with probability proportional to its rate.
Seekers are served first come first served; a tagged seeker's sojourn runs
from its arrival to its service completion.

Replication r draws from numpy's PCG64 generator seeded with
splitMix64(baseSeed + r), so estimates do not depend on the number of
worker processes.
"""
import collections
import logging
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from qbdLib.constants import (
	CONFIDENCE_LEVEL, DEFAULT_BASE_SEED, DEFAULT_MAX_EVENTS, DEFAULT_REPLICATIONS,
	DEFAULT_WARMUP_FRACTION, Model)
from qbdLib.errors import ParameterError
from qbdLib.utils import splitMix64
from qbdLib.validators import simConfigValidator

__all__ = [
	"SimConfig",
	"SimEstimate",
	"SimulationResult",
	"replicationSeed",
	"simulateReplication",
	"simulate",
	"sampleTransitionsOne",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimConfig(object):
	maxEvents: int = DEFAULT_MAX_EVENTS
	warmupFraction: float = DEFAULT_WARMUP_FRACTION
	replications: int = DEFAULT_REPLICATIONS
	baseSeed: int = DEFAULT_BASE_SEED
	workers: int = 1

	def __post_init__(self):
		valid, message = simConfigValidator(self.asDict())
		if not valid:
			raise ParameterError(message)

	@classmethod
	def fromDict(cls, data):
		return cls(
			maxEvents=data.get("max_events", DEFAULT_MAX_EVENTS),
			warmupFraction=data.get("warmup_fraction", DEFAULT_WARMUP_FRACTION),
			replications=data.get("replications", DEFAULT_REPLICATIONS),
			baseSeed=data.get("base_seed", DEFAULT_BASE_SEED),
			workers=data.get("workers", 1),
		)

	def asDict(self):
		return {
			"max_events": self.maxEvents,
			"warmup_fraction": self.warmupFraction,
			"replications": self.replications,
			"base_seed": self.baseSeed,
			"workers": self.workers,
		}


@dataclass(frozen=True)
class SimEstimate(object):

	"""
	Mean over replication means with a normal-approximation confidence
	half width; ciHalfwidth is None for a single replication.
	"""

	mean: float
	ciHalfwidth: float
	replications: int
	values: tuple = field(repr=False, default=())

	@classmethod
	def fromValues(cls, values, level=CONFIDENCE_LEVEL):
		"""
		>>> SimEstimate.fromValues([1.0, 3.0]).mean
		2.0
		>>> SimEstimate.fromValues([1.0]).ciHalfwidth is None
		True
		"""
		values = tuple(float(v) for v in values if v is not None and not math.isnan(v))
		if not values:
			return cls(mean=None, ciHalfwidth=None, replications=0)
		mean = float(np.mean(values))
		halfwidth = None
		if len(values) > 1:
			quantile = norm.ppf(0.5 + level / 2.0)
			halfwidth = float(quantile * np.std(values, ddof=1) / math.sqrt(len(values)))
		return cls(mean=mean, ciHalfwidth=halfwidth, replications=len(values), values=values)

	def contains(self, value):
		if self.mean is None or self.ciHalfwidth is None or value is None:
			return None
		return abs(value - self.mean) <= self.ciHalfwidth


@dataclass(frozen=True)
class ReplicationResult(object):
	eq1: float
	eq2: float
	throughput: float
	sojournMean: float
	sojournCdf: tuple
	departures: int


@dataclass(frozen=True)
class SimulationResult(object):
	model: Model
	eq1: SimEstimate
	eq2: SimEstimate
	throughput: SimEstimate
	sojournMean: SimEstimate
	sojournCdf: tuple
	baseSeed: int

	def estimates(self):
		return {
			"eq1": self.eq1,
			"eq2": self.eq2,
			"throughput": self.throughput,
			"sojourn_mean": self.sojournMean,
		}


def replicationSeed(baseSeed, index):
	return splitMix64(baseSeed + index)


# ----------
# Dynamics
# ----------

def _ratesOne(params, waiting, idle):
	"""Rates of (arrival, matching completion, service completion) in state (i, j)."""
	n = params.owners
	return (
		params.arrivalRate,
		min(waiting, idle) * params.matchingRate,
		(n - idle) * params.serviceRate,
	)


def sampleTransitionsOne(params, state, exits, seed):
	"""
	Draw `exits` transitions out of the pinned Model-one state (i, j) and
	count them by kind.
	"""
	rates = np.array(_ratesOne(params, *state), dtype=float)
	total = rates.sum()
	if total == 0:
		raise ParameterError("state %r has no outgoing transitions" % (state,))
	generator = np.random.Generator(np.random.PCG64(seed))
	picks = np.searchsorted(np.cumsum(rates) / total, generator.random(exits), side="right")
	counts = np.bincount(np.minimum(picks, 2), minlength=3)
	return {"arrival": int(counts[0]), "matching": int(counts[1]), "service": int(counts[2])}


class _Recorder(object):

	"""Time integrals and tagged sojourns collected after warmup."""

	def __init__(self, cdfTimes):
		self.start = None
		self.idleArea = 0.0
		self.waitingArea = 0.0
		self.departures = 0
		self.sojourns = []
		self.cdfTimes = cdfTimes

	def accumulate(self, dt, idle, waiting):
		if self.start is not None:
			self.idleArea += dt * idle
			self.waitingArea += dt * waiting

	def depart(self, now, arrival):
		if self.start is None:
			return
		self.departures += 1
		if arrival >= self.start:
			self.sojourns.append(now - arrival)

	def result(self, now, idle, waiting):
		elapsed = now - self.start
		if elapsed > 0:
			eq1 = self.idleArea / elapsed
			eq2 = self.waitingArea / elapsed
			rate = self.departures / elapsed
		else:
			eq1, eq2, rate = float(idle), float(waiting), 0.0
		sojourns = np.sort(np.array(self.sojourns))
		mean = float(sojourns.mean()) if sojourns.size else float("nan")
		cdf = ()
		if self.cdfTimes:
			if sojourns.size:
				cdf = tuple(float(np.searchsorted(sojourns, t, side="right")) / sojourns.size for t in self.cdfTimes)
			else:
				cdf = tuple(float("nan") for _ in self.cdfTimes)
		return ReplicationResult(
			eq1=eq1, eq2=eq2, throughput=rate, sojournMean=mean, sojournCdf=cdf,
			departures=self.departures)


def _runOne(params, config, generator, cdfTimes):
	n = params.owners
	events = config.maxEvents
	warmup = int(config.warmupFraction * events)
	holding = generator.standard_exponential(events)
	choices = generator.random(events)
	picks = generator.random(events)
	queue = collections.deque()
	busy = []
	idle = n
	now = 0.0
	recorder = _Recorder(cdfTimes)
	for event in range(events):
		if event == warmup:
			recorder.start = now
		arrival, matching, service = _ratesOne(params, len(queue), idle)
		total = arrival + matching + service
		if total == 0:
			break
		dt = holding[event] / total
		recorder.accumulate(dt, idle, len(queue))
		now += dt
		u = choices[event] * total
		if u < arrival:
			queue.append(now)
		elif u < arrival + matching:
			# the first min(i, j) seekers are being matched
			position = min(int(picks[event] * min(len(queue), idle)), min(len(queue), idle) - 1)
			seeker = queue[position]
			del queue[position]
			busy.append(seeker)
			idle -= 1
		else:
			position = min(int(picks[event] * len(busy)), len(busy) - 1)
			busy[position], busy[-1] = busy[-1], busy[position]
			recorder.depart(now, busy.pop())
			idle += 1
	if recorder.start is None:
		recorder.start = now
	return recorder.result(now, idle, len(queue))


def _runTwo(params, config, generator, cdfTimes):
	n = params.owners
	lam = params.arrivalRate
	gamma = params.matchingRate
	mu = params.serviceRate
	events = config.maxEvents
	warmup = int(config.warmupFraction * events)
	holding = generator.standard_exponential(events)
	choices = generator.random(events)
	picks = generator.random(events)
	queue = collections.deque()
	matching = []
	serving = []
	now = 0.0
	recorder = _Recorder(cdfTimes)
	for event in range(events):
		if event == warmup:
			recorder.start = now
		idle = n - len(matching) - len(serving)
		first = len(matching) * gamma
		second = len(serving) * mu
		total = lam + first + second
		if total == 0:
			break
		dt = holding[event] / total
		recorder.accumulate(dt, idle, len(queue))
		now += dt
		u = choices[event] * total
		if u < lam:
			if idle > 0:
				matching.append(now)
			else:
				queue.append(now)
		elif u < lam + first:
			position = min(int(picks[event] * len(matching)), len(matching) - 1)
			matching[position], matching[-1] = matching[-1], matching[position]
			serving.append(matching.pop())
		else:
			position = min(int(picks[event] * len(serving)), len(serving) - 1)
			serving[position], serving[-1] = serving[-1], serving[position]
			recorder.depart(now, serving.pop())
			if queue:
				matching.append(queue.popleft())
	if recorder.start is None:
		recorder.start = now
	idle = n - len(matching) - len(serving)
	return recorder.result(now, idle, len(queue))


def simulateReplication(model, params, config, index, cdfTimes=()):
	"""Run replication `index` and return its ReplicationResult."""
	model = Model(model)
	seed = replicationSeed(config.baseSeed, index)
	generator = np.random.Generator(np.random.PCG64(seed))
	run = _runOne if model is Model.ONE else _runTwo
	result = run(params, config, generator, tuple(cdfTimes))
	logger.debug(
		"replication %d (seed %d): eq1 %.6g eq2 %.6g, %d departures",
		index, seed, result.eq1, result.eq2, result.departures)
	return result


def _replicationTask(arguments):
	return simulateReplication(*arguments)


def simulate(model, params, config=None, cdfTimes=()):
	"""
	Run config.replications independent replications and merge them in
	replication-index order.
	"""
	model = Model(model)
	if config is None:
		config = SimConfig()
	cdfTimes = tuple(float(t) for t in cdfTimes)
	tasks = [(model, params, config, index, cdfTimes) for index in range(config.replications)]
	if config.workers > 1 and config.replications > 1:
		with multiprocessing.Pool(min(config.workers, config.replications)) as pool:
			results = pool.map(_replicationTask, tasks)
	else:
		results = [_replicationTask(task) for task in tasks]
	cdf = tuple(
		(t, SimEstimate.fromValues([r.sojournCdf[position] for r in results]))
		for position, t in enumerate(cdfTimes))
	return SimulationResult(
		model=model,
		eq1=SimEstimate.fromValues([r.eq1 for r in results]),
		eq2=SimEstimate.fromValues([r.eq2 for r in results]),
		throughput=SimEstimate.fromValues([r.throughput for r in results]),
		sojournMean=SimEstimate.fromValues([r.sojournMean for r in results]),
		sojournCdf=cdf,
		baseSeed=config.baseSeed,
	)


if __name__ == "__main__":
	import doctest
	doctest.testmod()
