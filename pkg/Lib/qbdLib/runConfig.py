"""
Run configuration: one JSON document per command invocation.

	{
		"model": "one",
		"params": {"lambda": 10, "mu": 1, "gamma": 100, "n_owners": 60,
		           "price": 50, "share": 0.8},
		"sweep": {"parameter": "lambda", "from": 10, "to": 46, "steps": 9},
		"solver": {"epsilon": 1e-12, "max_iter": 100000, "truncation_tol": 1e-10},
		"sim": {"max_events": 500000, "warmup_fraction": 0.2,
		        "replications": 20, "base_seed": 20230101, "workers": 1},
		"sojourn": {"multiples": [0, 0.5, 1, 2, 5, 10]},
		"outputs": "results/fig4",
		"workers": 1
	}

Only "model" and "params" are required.
"""
import json
import logging
import os
from dataclasses import dataclass, field

import fs.base
import fs.errors
import fs.osfs
import numpy as np

from qbdLib.constants import (
	DEFAULT_EPSILON, DEFAULT_MAX_ITER, DEFAULT_TRUNCATION_TOL, Model)
from qbdLib.errors import ConfigError, ParameterError
from qbdLib.simulation import SimConfig
from qbdLib.stability import ModelParams
from qbdLib.validators import runConfigValidator

__all__ = [
	"SweepSpec",
	"SolverSettings",
	"SojournSettings",
	"RunConfig",
	"runConfigFromDict",
	"readRunConfig",
]

logger = logging.getLogger(__name__)

DEFAULT_SOJOURN_MULTIPLES = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class SweepSpec(object):

	"""
	A one-parameter grid of steps + 1 equally spaced points.

	>>> SweepSpec("lambda", 10, 46, 9).values()
	[10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 34.0, 38.0, 42.0, 46.0]
	>>> SweepSpec("n_owners", 43, 53, 10).values()[:3]
	[43, 44, 45]
	"""

	parameter: str
	start: float
	stop: float
	steps: int

	def values(self):
		grid = np.linspace(self.start, self.stop, self.steps + 1)
		if self.parameter == "n_owners":
			return [int(round(v)) for v in grid]
		return [float(v) for v in grid]


@dataclass(frozen=True)
class SolverSettings(object):
	epsilon: float = DEFAULT_EPSILON
	maxIter: int = DEFAULT_MAX_ITER
	truncationTol: float = DEFAULT_TRUNCATION_TOL


@dataclass(frozen=True)
class SojournSettings(object):

	"""CDF sample times: absolute `times`, or `multiples` of the unconditional RG mean."""

	times: tuple = None
	multiples: tuple = DEFAULT_SOJOURN_MULTIPLES

	def grid(self, mean):
		if self.times is not None:
			return [float(t) for t in self.times]
		return [m * mean for m in self.multiples]


@dataclass(frozen=True)
class RunConfig(object):
	model: Model
	params: ModelParams
	sweep: SweepSpec = None
	solver: SolverSettings = field(default_factory=SolverSettings)
	sim: SimConfig = None
	sojourn: SojournSettings = field(default_factory=SojournSettings)
	outputs: str = None
	workers: int = 1

	def points(self):
		"""The parameter sets to evaluate, in grid order."""
		if self.sweep is None:
			return [self.params]
		return [self.params.replace(**{self.sweep.parameter: v}) for v in self.sweep.values()]


def runConfigFromDict(data):
	"""
	>>> config = runConfigFromDict({"model": "two", "params": {"lambda": 0.3, "mu": 1, "gamma": 2, "n_owners": 1}})
	>>> config.model, config.params.owners, config.sweep
	(<Model.TWO: 'two'>, 1, None)
	"""
	if not isinstance(data, dict):
		raise ConfigError("a run configuration must be a JSON object")
	valid, message = runConfigValidator(data)
	if not valid:
		raise ConfigError(message)
	try:
		params = ModelParams.fromDict(data["params"])
	except ParameterError as e:
		raise ConfigError(str(e))
	sweep = None
	if data.get("sweep") is not None:
		section = data["sweep"]
		sweep = SweepSpec(section["parameter"], section["from"], section["to"], section["steps"])
	section = data.get("solver") or {}
	solver = SolverSettings(
		epsilon=section.get("epsilon", DEFAULT_EPSILON),
		maxIter=section.get("max_iter", DEFAULT_MAX_ITER),
		truncationTol=section.get("truncation_tol", DEFAULT_TRUNCATION_TOL),
	)
	sim = None
	if data.get("sim") is not None:
		sim = SimConfig.fromDict(data["sim"])
	section = data.get("sojourn") or {}
	if "times" in section:
		sojourn = SojournSettings(times=tuple(section["times"]))
	else:
		sojourn = SojournSettings(multiples=tuple(section.get("multiples", DEFAULT_SOJOURN_MULTIPLES)))
	config = RunConfig(
		model=Model(data["model"]),
		params=params,
		sweep=sweep,
		solver=solver,
		sim=sim,
		sojourn=sojourn,
		outputs=data.get("outputs"),
		workers=data.get("workers", 1),
	)
	if sweep is not None:
		try:
			config.points()
		except ParameterError as e:
			raise ConfigError("sweep: %s" % e)
	return config


def readRunConfig(path, fileSystem=None):
	"""
	Read and validate a JSON run configuration. `path` is relative to
	`fileSystem` when one is given, otherwise a local path.
	"""
	shouldClose = False
	if fileSystem is None:
		if not path:
			raise ConfigError("no configuration path given")
		directory, name = os.path.split(os.path.abspath(path))
		try:
			fileSystem = fs.osfs.OSFS(directory)
		except fs.errors.CreateFailed as e:
			raise ConfigError("unable to open '%s': %s" % (path, e))
		shouldClose = True
		path = name
	elif not isinstance(fileSystem, fs.base.FS):
		raise TypeError("Expected an fs.base.FS object, found '%s'" % type(fileSystem).__name__)
	try:
		text = fileSystem.readtext(path, encoding="utf-8")
	except fs.errors.ResourceNotFound:
		raise ConfigError("configuration '%s' is missing" % path)
	except fs.errors.FSError as e:
		raise ConfigError("configuration '%s' could not be read: %s" % (path, e))
	finally:
		if shouldClose:
			fileSystem.close()
	try:
		data = json.loads(text)
	except ValueError as e:
		raise ConfigError("configuration '%s' is not valid JSON: %s" % (path, e))
	config = runConfigFromDict(data)
	logger.debug("read %s: model %s, %d point(s)", path, config.model.value, len(config.points()))
	return config


if __name__ == "__main__":
	import doctest
	doctest.testmod()
