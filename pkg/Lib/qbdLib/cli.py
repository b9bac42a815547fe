"""
Command-line entry point.

	platform-qbd <stability|solve|sweep|simulate|sojourn> --config <path>
	             [--out <prefix>] [--allow-unstable] [-v | -q]

Exit codes: 0 success, 1 configuration error, 2 unstable instance,
3 solver failure, 4 unsupported feature.
"""
import argparse
import logging
import multiprocessing
import sys

from fontTools.misc.loggingTools import Timer, configLogger

from qbdLib.constants import (
	EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_UNSTABLE, EXIT_UNSUPPORTED, Model)
from qbdLib.errors import (
	CapacityError, ConfigError, NonConvergenceError, ParameterError, SingularMatrixError,
	UnstableModelError, UnsupportedFeatureError)
from qbdLib.matrixAnalytic import solveStationary, truncationLevels
from qbdLib.measures import littleSojourn, measuresTwo, performanceReport
from qbdLib.modelOne import buildAbsorbingChain
from qbdLib.reports import (
	SIMULATION_COLUMNS, SOJOURN_COLUMNS, SOJOURN_MEAN_COLUMNS, ResultWriter, analyticRow,
	unstableRow)
from qbdLib.runConfig import readRunConfig
from qbdLib.simulation import simulate
from qbdLib.sojourn import expectedSojournRG, sojournCDFValues
from qbdLib.stability import stabilityReport, trafficIntensity

__all__ = [
	"main",
	"evaluatePoint",
	"cmdStability",
	"cmdSolve",
	"cmdSweep",
	"cmdSimulate",
	"cmdSojourn",
]

log = logging.getLogger("qbdLib")
logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_PREFIX = "qbd"

_exitCodes = [
	((ConfigError, ParameterError), EXIT_CONFIG),
	((UnstableModelError,), EXIT_UNSTABLE),
	((SingularMatrixError, NonConvergenceError), EXIT_SOLVER),
	((UnsupportedFeatureError, CapacityError), EXIT_UNSUPPORTED),
]


def exitCode(error):
	for classes, code in _exitCodes:
		if isinstance(error, classes):
			return code
	raise error


# ------------
# Single point
# ------------

def evaluatePoint(model, params, solver):
	"""Solve one stable instance; return (solution, report)."""
	solution = solveStationary(model, params, solver.epsilon, solver.maxIter)
	levels = truncationLevels(solution.rate.spectralRadius, solver.truncationTol)
	sojournRG = None
	if model is Model.ONE:
		chain = buildAbsorbingChain(params, solution)
		sojournRG = expectedSojournRG(chain, solver.truncationTol)
	report = performanceReport(model, params, solution, sojournRG, levels)
	return solution, report


def _pointRow(task):
	model, params, solver, allowUnstable = task
	rho = trafficIntensity(params)
	if rho >= 1.0:
		if allowUnstable:
			return unstableRow(model, params, rho)
		raise UnstableModelError("rho=%.12g >= 1 for %r" % (rho, params), rho=rho)
	_, report = evaluatePoint(model, params, solver)
	return analyticRow(model, params, report)


def _requireStable(points):
	for params in points:
		rho = trafficIntensity(params)
		if rho >= 1.0:
			raise UnstableModelError(
				"grid point %r is unstable (rho=%.12g); use --allow-unstable to keep it" % (params, rho),
				rho=rho)


# --------
# Commands
# --------

def cmdStability(config, writer, allowUnstable=False):
	reports = []
	for params in config.points():
		report = stabilityReport(params)
		reports.append(dict(params.asDict(), **report.asDict()))
		print("lambda=%s mu=%s gamma=%s N=%d" % (
			params.arrivalRate, params.serviceRate, params.matchingRate, params.owners))
		print("  rho             %.12g" % report.rho)
		print("  stable          %s" % ("true" if report.stable else "false"))
		print("  n_min_exact     %d" % report.nMinExact)
		print("  n_min_corollary %d" % report.nMinCorollary)
	writer.writeJson("stability.json", {"model": config.model.value, "points": reports})
	stable = all(r["stable"] for r in reports)
	logger.info("stability: %d point(s), %s", len(reports), "stable" if stable else "unstable")
	return EXIT_OK if stable else EXIT_UNSTABLE


def cmdSolve(config, writer, allowUnstable=False):
	model = config.model
	params = config.params
	solution, report = evaluatePoint(model, params, config.solver)
	writer.writeTable("solve.csv", [analyticRow(model, params, report)])
	detail = {
		"model": model.value,
		"params": params.asDict(),
		"pi0": solution.pi0.tolist(),
		"pi1": solution.pi1.tolist(),
		"r": solution.r.tolist(),
		"residual_R": solution.rate.residual,
		"iterations_R": solution.rate.iterations,
		"spectral_radius_R": solution.rate.spectralRadius,
		"boundary_residual": solution.boundaryResidual(),
		"report": report.asDict(),
	}
	writer.writeJson("solve_detail.json", detail)
	logger.info(
		"solve: model %s rho=%.6g eq1=%.12g eq2=%.12g", model.value, report.rho,
		report.meanIdleOwners, report.meanWaitingSeekers)
	return EXIT_OK


def cmdSweep(config, writer, allowUnstable=False):
	if config.sweep is None:
		raise ConfigError("the sweep command needs a \"sweep\" section")
	model = config.model
	points = config.points()
	if not allowUnstable:
		_requireStable(points)
	if model is Model.ONE and config.sweep.parameter == "gamma":
		logger.warning(
			"model one: E[Q1] = N - lambda/mu does not depend on gamma; "
			"a decrease of idle owners in gamma is not expected")
	tasks = [(model, params, config.solver, allowUnstable) for params in points]
	with Timer(logger, "sweep over %d points" % len(tasks), level=logging.INFO):
		if config.workers > 1 and len(tasks) > 1:
			with multiprocessing.Pool(min(config.workers, len(tasks))) as pool:
				rows = pool.map(_pointRow, tasks)
		else:
			rows = [_pointRow(task) for task in tasks]
	writer.writeTable("sweep.csv", rows)
	logger.info("sweep: %d rows over %s", len(rows), config.sweep.parameter)
	return EXIT_OK


def _analyticMeans(model, params, solver):
	if trafficIntensity(params) >= 1.0:
		return {}
	_, report = evaluatePoint(model, params, solver)
	return {
		"eq1": report.meanIdleOwners,
		"eq2": report.meanWaitingSeekers,
		"throughput": report.throughput,
		"sojourn_mean": report.sojournMeanLittle,
	}


def cmdSimulate(config, writer, allowUnstable=False):
	if config.sim is None:
		raise ConfigError("the simulate command needs a \"sim\" section")
	model = config.model
	rows = []
	for point, params in enumerate(config.points()):
		if trafficIntensity(params) >= 1.0:
			logger.warning("simulating an unstable instance; queue statistics diverge")
		analytic = _analyticMeans(model, params, config.solver)
		result = simulate(model, params, config.sim)
		for metric, estimate in result.estimates().items():
			value = analytic.get(metric)
			rows.append({
				"point": point,
				"metric": metric,
				"analytic": value,
				"sim_mean": estimate.mean,
				"ci_halfwidth": estimate.ciHalfwidth,
				"within_ci": estimate.contains(value),
				"replications": estimate.replications,
				"seed": config.sim.baseSeed,
			})
	writer.writeTable("simulate.csv", rows, ["point"] + SIMULATION_COLUMNS)
	logger.info("simulate: %d replication(s) per point", config.sim.replications)
	return EXIT_OK


def cmdSojourn(config, writer, allowUnstable=False):
	model = config.model
	points = config.points()
	_requireStable(points)
	tol = config.solver.truncationTol
	cdfRows = []
	meanRows = []
	for point, params in enumerate(points):
		solution = solveStationary(model, params, config.solver.epsilon, config.solver.maxIter)
		row = {
			"point": point,
			"lambda": params.arrivalRate,
			"mu": params.serviceRate,
			"gamma": params.matchingRate,
			"n_owners": params.owners,
			"rho": trafficIntensity(params),
		}
		times = []
		values = []
		if model is Model.ONE:
			report = performanceReport(model, params, solution)
			chain = buildAbsorbingChain(params, solution)
			meanRG = expectedSojournRG(chain, tol)
			times = config.sojourn.grid(meanRG)
			values = sojournCDFValues(chain, times, tol)
			row.update({
				"ew_rg": meanRG,
				"ew_little": report.sojournMeanLittle,
				"omega_delta": chain.omegaDelta,
				"truncation_levels": truncationLevels(chain.spectralRadius, tol),
			})
		else:
			eq1, eq2 = measuresTwo(solution, params)
			row["ew_little"] = littleSojourn(params, eq1, eq2, model) if params.arrivalRate > 0 else None
		simulated = {}
		if config.sim is not None:
			result = simulate(model, params, config.sim, times)
			row["ew_sim"] = result.sojournMean.mean
			row["ew_sim_ci_halfwidth"] = result.sojournMean.ciHalfwidth
			simulated = dict(result.sojournCdf)
		for t, value in zip(times, values):
			cdfRow = dict(row, t=t, cdf=value)
			if t in simulated:
				cdfRow["cdf_sim"] = simulated[t].mean
			cdfRows.append(cdfRow)
		_logSojournGaps(row)
		meanRows.append(row)
	writer.writeTable("sojourn_means.csv", meanRows, SOJOURN_MEAN_COLUMNS)
	if model is not Model.ONE:
		raise UnsupportedFeatureError(
			"the sojourn-time distribution is only available for model one; "
			"Little's-law and simulated means were written")
	writer.writeTable("sojourn.csv", cdfRows, SOJOURN_COLUMNS + ["cdf_sim"])
	logger.info("sojourn: %d point(s), %d CDF samples", len(meanRows), len(cdfRows))
	return EXIT_OK


def _logSojournGaps(row):
	little = row.get("ew_little")
	if not little:
		return
	for key in ("ew_rg", "ew_sim"):
		value = row.get(key)
		if value is not None and abs(value - little) > 0.01 * little:
			logger.warning(
				"point %d: %s=%.6g differs from the Little's-law mean %.6g by %.1f%%",
				row["point"], key, value, little, 100.0 * abs(value - little) / little)


_commands = {
	"stability": cmdStability,
	"solve": cmdSolve,
	"sweep": cmdSweep,
	"simulate": cmdSimulate,
	"sojourn": cmdSojourn,
}


def buildParser():
	parser = argparse.ArgumentParser(
		prog="platform-qbd",
		description="Matrix-analytic and simulated performance of two-sided service platforms.")
	parser.add_argument("command", choices=sorted(_commands))
	parser.add_argument("--config", required=True, help="JSON run configuration")
	parser.add_argument("--out", default=None, help="output path prefix")
	parser.add_argument(
		"--allow-unstable", action="store_true",
		help="keep unstable sweep points as rows with stable=false")
	verbosity = parser.add_mutually_exclusive_group()
	verbosity.add_argument("-v", "--verbose", action="store_true")
	verbosity.add_argument("-q", "--quiet", action="store_true")
	return parser


def main(args=None):
	parser = buildParser()
	try:
		options = parser.parse_args(args)
	except SystemExit as e:
		# argparse exits with 2 on usage errors, which is our "unstable" code
		return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
	level = logging.INFO
	if options.verbose:
		level = logging.DEBUG
	elif options.quiet:
		level = logging.WARNING
	for handler in list(log.handlers):
		log.removeHandler(handler)
	configLogger(logger=log, level=level, propagate=True)
	try:
		config = readRunConfig(options.config)
		prefix = options.out or config.outputs or DEFAULT_OUTPUT_PREFIX
		with ResultWriter(prefix) as writer:
			code = _commands[options.command](config, writer, options.allow_unstable)
			for path in writer.written:
				logger.info("wrote %s", path.lstrip("/"))
	except Exception as e:
		code = exitCode(e)
		logger.error("%s: %s", type(e).__name__, e)
	return code


if __name__ == "__main__":
	sys.exit(main())
