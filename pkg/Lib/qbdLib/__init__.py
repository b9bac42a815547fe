"""
Matrix-analytic performance analysis of two-sided service platforms.

Seekers (service requesters) arrive at a platform with N registered
owners (service providers). Two models are supported:

	Model one    matching information is released when matching completes;
	             the state (i, j) counts waiting seekers and idle owners.
	Model two    matching information is released when matching starts;
	             every busy owner runs a generalized Erlang period
	             (matching at rate gamma, then service at rate mu).

Both are level-independent QBD processes whose level 0 is split into
sub-levels. The stationary distribution is matrix-geometric,
pi_k = pi_1 R^(k-1), with R from the successive iteration and the
boundary from the censored level-0 equations. The package also provides
the sojourn time of Model one through an RG-factorization of its
absorbing chain, an event-driven simulator and a truncated direct solver
used as independent oracles, and the platform-qbd command-line tool.

The one-call entry point is

	solveStationary(model, params)

followed by performanceReport(model, params, solution).
"""

import logging

from qbdLib.constants import Model, Provenance
from qbdLib.errors import (
	QBDLibError, ParameterError, ConfigError, DimensionError, UnstableModelError,
	SingularMatrixError, RankDeficiencyError, NonConvergenceError, CapacityError,
	UnsupportedFeatureError)
from qbdLib.stability import (
	ModelParams, StabilityReport, trafficIntensity, isStable, minStableOwners, driftAlpha,
	meanDriftRates, stabilityReport)
from qbdLib.matrixAnalytic import (
	RateMatrixSolution, RgFactorization, StationarySolution, solveRateMatrix, solveGMatrix,
	rgFactorization, solveBoundary, levelVector, solveStationary)
from qbdLib.measures import (
	PerformanceReport, meanIdleOwnersOne, meanWaitingSeekersOne, measuresTwo, profits,
	littleSojourn, performanceReport)
from qbdLib.sojourn import SojournResult, censoredInverseApply, expectedSojournRG, sojournCDF
from qbdLib.simulation import SimConfig, SimEstimate, simulate
from qbdLib.truncation import TruncatedSolution, truncatedStationary

__all__ = [
	"Model",
	"Provenance",
	"QBDLibError",
	"ParameterError",
	"ConfigError",
	"DimensionError",
	"UnstableModelError",
	"SingularMatrixError",
	"RankDeficiencyError",
	"NonConvergenceError",
	"CapacityError",
	"UnsupportedFeatureError",
	"ModelParams",
	"StabilityReport",
	"trafficIntensity",
	"isStable",
	"minStableOwners",
	"driftAlpha",
	"meanDriftRates",
	"stabilityReport",
	"RateMatrixSolution",
	"RgFactorization",
	"StationarySolution",
	"solveRateMatrix",
	"solveGMatrix",
	"rgFactorization",
	"solveBoundary",
	"levelVector",
	"solveStationary",
	"PerformanceReport",
	"meanIdleOwnersOne",
	"meanWaitingSeekersOne",
	"measuresTwo",
	"profits",
	"littleSojourn",
	"performanceReport",
	"SojournResult",
	"censoredInverseApply",
	"expectedSojournRG",
	"sojournCDF",
	"SimConfig",
	"SimEstimate",
	"simulate",
	"TruncatedSolution",
	"truncatedStationary",
]

__version__ = "1.0.0.dev0"

logger = logging.getLogger(__name__)
