"""
CSV tables and JSON detail files written by the command-line tool.

Every table is UTF-8 with a header row and "\\n" line endings; numbers
carry 12 significant digits, booleans are written true/false and missing
values are left blank, so identical runs give byte-identical files.
"""
import csv
import io
import json
import logging
import os

import fs.base
import fs.errors
import fs.osfs

from qbdLib.errors import ConfigError
from qbdLib.utils import formatNumber

__all__ = [
	"COLUMNS",
	"SIMULATION_COLUMNS",
	"SOJOURN_COLUMNS",
	"SOJOURN_MEAN_COLUMNS",
	"analyticRow",
	"unstableRow",
	"formatRow",
	"csvText",
	"ResultWriter",
]

logger = logging.getLogger(__name__)

COLUMNS = [
	"model",
	"lambda",
	"mu",
	"gamma",
	"n_owners",
	"price",
	"share",
	"rho",
	"stable",
	"eq1",
	"eq2",
	"ew_little",
	"ew_rg",
	"f1",
	"f2",
	"f1_throughput_based",
	"throughput",
	"source",
	"residual_R",
	"tail_mass",
	"seed",
]

SIMULATION_COLUMNS = [
	"metric",
	"analytic",
	"sim_mean",
	"ci_halfwidth",
	"within_ci",
	"replications",
	"seed",
]

SOJOURN_COLUMNS = ["point", "lambda", "mu", "gamma", "n_owners", "t", "cdf"]

SOJOURN_MEAN_COLUMNS = [
	"point",
	"lambda",
	"mu",
	"gamma",
	"n_owners",
	"rho",
	"ew_rg",
	"ew_little",
	"ew_sim",
	"ew_sim_ci_halfwidth",
	"omega_delta",
	"truncation_levels",
]


def _parameterCells(model, params):
	row = {"model": model.value}
	row.update(params.asDict())
	return row


def analyticRow(model, params, report):
	"""One row of the main table from a PerformanceReport."""
	row = _parameterCells(model, params)
	row.update({
		"rho": report.rho,
		"stable": True,
		"eq1": report.meanIdleOwners,
		"eq2": report.meanWaitingSeekers,
		"ew_little": report.sojournMeanLittle,
		"ew_rg": report.sojournMeanRG,
		"f1": report.platformProfit,
		"f2": report.ownerProfit,
		"f1_throughput_based": report.platformProfitThroughput,
		"throughput": report.throughput,
		"source": report.provenance.value,
		"residual_R": report.residualR,
		"tail_mass": report.tailMass,
		"seed": None,
	})
	return row


def unstableRow(model, params, rho):
	"""A grid point kept with --allow-unstable: parameters, rho and blanks."""
	row = _parameterCells(model, params)
	row.update({"rho": rho, "stable": False, "source": "analytic"})
	return row


def formatRow(row, columns):
	"""
	>>> formatRow({"a": 0.5, "b": None, "c": False}, ["a", "b", "c"])
	['0.5', '', 'false']
	"""
	return [formatNumber(row.get(column)) for column in columns]


def csvText(rows, columns):
	"""
	>>> csvText([{"x": 1, "y": 2.5}], ["x", "y"])
	'x,y\\n1,2.5\\n'
	"""
	buffer = io.StringIO()
	writer = csv.writer(buffer, lineterminator="\n")
	writer.writerow(columns)
	for row in rows:
		writer.writerow(formatRow(row, columns))
	return buffer.getvalue()


class ResultWriter(object):

	"""
	Write result files named "<stem>_<name>" below the directory of an
	output prefix such as "results/fig4". A prefix ending in a separator
	names a directory and the files keep their bare names.

	A filesystem object may be passed instead of a local directory; the
	prefix is then taken relative to it, and closing it is left to the
	caller.
	"""

	def __init__(self, prefix, fileSystem=None):
		prefix = prefix or ""
		if fileSystem is None:
			directory, stem = os.path.split(prefix)
			directory = os.path.abspath(directory or ".")
			try:
				fileSystem = fs.osfs.OSFS(directory, create=True)
			except fs.errors.CreateFailed as e:
				raise ConfigError("unable to open output directory '%s': %s" % (directory, e))
			self._shouldClose = True
			self.directory = "/"
		elif isinstance(fileSystem, fs.base.FS):
			directory, _, stem = prefix.rpartition("/")
			self.directory = "/" + directory.strip("/")
			if self.directory != "/":
				fileSystem.makedirs(self.directory, recreate=True)
			self._shouldClose = False
		else:
			raise TypeError(
				"Expected an fs.base.FS object, found '%s'" % type(fileSystem).__name__)
		self.fs = fileSystem
		self.stem = stem
		self.written = []

	def fileName(self, name):
		base = "%s_%s" % (self.stem, name) if self.stem else name
		return "/".join([self.directory.rstrip("/"), base])

	def _write(self, name, text):
		path = self.fileName(name)
		try:
			self.fs.writetext(path, text, encoding="utf-8", newline="")
		except fs.errors.FSError as e:
			raise ConfigError("'%s' could not be written on %s: %s" % (path, self.fs, e))
		self.written.append(path)
		logger.debug("wrote %s", path)
		return path

	def writeTable(self, name, rows, columns=COLUMNS):
		return self._write(name, csvText(rows, columns))

	def writeJson(self, name, data):
		text = json.dumps(data, indent=2, sort_keys=True) + "\n"
		return self._write(name, text)

	def close(self):
		if self._shouldClose:
			self.fs.close()

	def __enter__(self):
		return self

	def __exit__(self, exc_type, exc_value, exc_tb):
		self.close()


if __name__ == "__main__":
	import doctest
	doctest.testmod()
