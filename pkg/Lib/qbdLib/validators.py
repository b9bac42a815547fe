"""Various low level data validators.

The generic validators return a bool. The structure validators return a
(valid, message) pair, message being None when the value is valid.
"""

from collections.abc import Mapping

from qbdLib.constants import sweepParameters
from qbdLib.utils import isInteger, isNumber


# -------
# Generic
# -------

def genericTypeValidator(value, typ):
	"""
	Generic.

	>>> genericTypeValidator("one", str)
	True
	"""
	return isinstance(value, typ)

def genericNumberValidator(value):
	"""
	Generic. Booleans are not numbers here.

	>>> genericNumberValidator(2.5), genericNumberValidator(True)
	(True, False)
	"""
	return isNumber(value)

def genericNonNegativeNumberValidator(value):
	"""
	Generic.

	>>> genericNonNegativeNumberValidator(0)
	True
	>>> genericNonNegativeNumberValidator(-1e-9)
	False
	"""
	if not isNumber(value):
		return False
	if value < 0:
		return False
	return True

def genericPositiveNumberValidator(value):
	"""
	Generic.

	>>> genericPositiveNumberValidator(0)
	False
	"""
	if not isNumber(value):
		return False
	if value <= 0:
		return False
	return True

def genericPositiveIntValidator(value):
	"""
	Generic.

	>>> genericPositiveIntValidator(3), genericPositiveIntValidator(3.0)
	(True, False)
	"""
	if not isInteger(value):
		return False
	if value < 1:
		return False
	return True

def genericOpenUnitIntervalValidator(value):
	"""
	Generic. Numbers strictly between 0 and 1.

	>>> genericOpenUnitIntervalValidator(0.8), genericOpenUnitIntervalValidator(1)
	(True, False)
	"""
	if not isNumber(value):
		return False
	return 0 < value < 1

def genericDictValidator(value, prototype):
	"""
	Generic. The prototype maps keys to (validator, required).

	>>> prototype = {"mu": (genericPositiveNumberValidator, True)}
	>>> genericDictValidator({"mu": 1.0}, prototype)
	(True, None)
	>>> genericDictValidator({}, prototype)
	(False, 'missing required key "mu"')
	"""
	# not a dict
	if not isinstance(value, Mapping):
		return False, "expected a mapping, got %s" % type(value).__name__
	# missing required keys
	for key, (validator, required) in prototype.items():
		if not required:
			continue
		if key not in value:
			return False, "missing required key \"%s\"" % key
	# unknown keys
	for key in value.keys():
		if key not in prototype:
			return False, "unknown key \"%s\"" % key
	# invalid values
	for key, v in value.items():
		validator, required = prototype[key]
		if v is None and not required:
			continue
		if not validator(v):
			return False, "invalid value for \"%s\": %r" % (key, v)
	return True, None

# ----------
# Parameters
# ----------

_paramsPrototype = {
	"lambda": (genericNonNegativeNumberValidator, True),
	"mu": (genericPositiveNumberValidator, True),
	"gamma": (genericPositiveNumberValidator, True),
	"n_owners": (genericPositiveIntValidator, True),
	"price": (genericNonNegativeNumberValidator, False),
	"share": (genericOpenUnitIntervalValidator, False),
}

def modelParamsValidator(value):
	"""
	Validate the "params" section of a run configuration.

	>>> modelParamsValidator({"lambda": 10, "mu": 1, "gamma": 100, "n_owners": 60})
	(True, None)
	>>> modelParamsValidator({"lambda": 10, "gamma": 100, "n_owners": 60})
	(False, 'params: missing required key "mu"')
	"""
	valid, message = genericDictValidator(value, _paramsPrototype)
	if not valid:
		return False, "params: %s" % message
	return True, None

def modelNameValidator(value):
	"""
	>>> modelNameValidator("two")
	(True, None)
	"""
	if value not in ("one", "two"):
		return False, "model must be \"one\" or \"two\", got %r" % (value,)
	return True, None

# ------
# Sweeps
# ------

_sweepPrototype = {
	"parameter": (lambda v: v in sweepParameters, True),
	"from": (genericNumberValidator, True),
	"to": (genericNumberValidator, True),
	"steps": (genericPositiveIntValidator, True),
}

def sweepValidator(value):
	"""
	>>> sweepValidator({"parameter": "lambda", "from": 10, "to": 46, "steps": 9})
	(True, None)
	>>> sweepValidator({"parameter": "n_owners", "from": 43.5, "to": 53, "steps": 10})
	(False, 'sweep: n_owners end points must be integral')
	"""
	valid, message = genericDictValidator(value, _sweepPrototype)
	if not valid:
		return False, "sweep: %s" % message
	if value["to"] < value["from"]:
		return False, "sweep: empty range %r..%r" % (value["from"], value["to"])
	if value["parameter"] == "n_owners":
		for key in ("from", "to"):
			if float(value[key]) != int(value[key]):
				return False, "sweep: n_owners end points must be integral"
	return True, None

# --------------------
# Solver and simulator
# --------------------

_solverPrototype = {
	"epsilon": (genericPositiveNumberValidator, False),
	"max_iter": (genericPositiveIntValidator, False),
	"truncation_tol": (genericPositiveNumberValidator, False),
}

def solverSettingsValidator(value):
	"""
	>>> solverSettingsValidator({"epsilon": 1e-12})
	(True, None)
	"""
	valid, message = genericDictValidator(value, _solverPrototype)
	if not valid:
		return False, "solver: %s" % message
	return True, None

_simPrototype = {
	"max_events": (lambda v: genericPositiveIntValidator(v) and v >= 1000, False),
	"warmup_fraction": (lambda v: isNumber(v) and 0 <= v < 1, False),
	"replications": (genericPositiveIntValidator, False),
	"base_seed": (lambda v: isInteger(v) and 0 <= v < 2 ** 64, False),
	"workers": (genericPositiveIntValidator, False),
}

def simConfigValidator(value):
	"""
	>>> simConfigValidator({"max_events": 500, "replications": 2})
	(False, 'sim: invalid value for "max_events": 500')
	"""
	valid, message = genericDictValidator(value, _simPrototype)
	if not valid:
		return False, "sim: %s" % message
	return True, None

def _timeListValidator(value):
	if not isinstance(value, (list, tuple)) or not value:
		return False
	return all(genericNonNegativeNumberValidator(v) for v in value)

_sojournPrototype = {
	"times": (_timeListValidator, False),
	"multiples": (_timeListValidator, False),
}

def sojournSettingsValidator(value):
	"""
	>>> sojournSettingsValidator({"times": [0, 0.5, 1.0]})
	(True, None)
	>>> sojournSettingsValidator({"times": [0, 1], "multiples": [1, 2]})
	(False, 'sojourn: give either "times" or "multiples"')
	"""
	valid, message = genericDictValidator(value, _sojournPrototype)
	if not valid:
		return False, "sojourn: %s" % message
	if "times" in value and "multiples" in value:
		return False, "sojourn: give either \"times\" or \"multiples\""
	return True, None

# -----------------
# Run configuration
# -----------------

_runConfigPrototype = {
	"model": (lambda v: modelNameValidator(v)[0], True),
	"params": (lambda v: True, True),
	"sweep": (lambda v: True, False),
	"solver": (lambda v: True, False),
	"sim": (lambda v: True, False),
	"sojourn": (lambda v: True, False),
	"outputs": (lambda v: isinstance(v, str) and bool(v), False),
	"workers": (genericPositiveIntValidator, False),
}

def runConfigValidator(value):
	"""
	Validate a whole run configuration document. The first problem found
	is reported.

	>>> runConfigValidator({"model": "one", "params": {"lambda": 10, "mu": 1, "gamma": 100, "n_owners": 60}})
	(True, None)
	>>> runConfigValidator({"model": "three", "params": {}})
	(False, 'invalid value for "model": \\'three\\'')
	"""
	valid, message = genericDictValidator(value, _runConfigPrototype)
	if not valid:
		return False, message
	sections = [
		("params", modelParamsValidator),
		("sweep", sweepValidator),
		("solver", solverSettingsValidator),
		("sim", simConfigValidator),
		("sojourn", sojournSettingsValidator),
	]
	for key, validator in sections:
		if value.get(key) is None:
			continue
		valid, message = validator(value[key])
		if not valid:
			return False, message
	return True, None


if __name__ == "__main__":
	import doctest
	doctest.testmod()
