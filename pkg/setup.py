#! /usr/bin/env python
import sys
from setuptools import setup, find_packages


needs_pytest = {'pytest', 'test'}.intersection(sys.argv)
pytest_runner = ['pytest_runner'] if needs_pytest else []
needs_wheel = {'bdist_wheel'}.intersection(sys.argv)
wheel = ['wheel'] if needs_wheel else []

long_description = """\
qbdLib computes stationary queue lengths, profits and sojourn times of
two-sided service platforms (seekers matched to registered owners) with
matrix-analytic methods for quasi birth-and-death processes, and checks
them against an event-driven simulator and a truncated direct solver.

The platform-qbd command runs stability reports, single solves, parameter
sweeps, simulations and sojourn-time distributions from a JSON
configuration and writes CSV tables.
"""

setup_params = dict(
	name="platform-qbd",
	version="1.0.0.dev0",
	description="Matrix-analytic solver for two-sided service platform queues.",
	license="MIT",
	platforms=["Any"],
	long_description=long_description,
	package_dir={'': 'Lib'},
	packages=find_packages('Lib'),
	include_package_data=True,
	python_requires=">=3.7",
	setup_requires=pytest_runner + wheel,
	tests_require=[
		'pytest>=3.0.2',
	],
	install_requires=[
		"numpy >= 1.17",
		"scipy >= 1.4",
		"fonttools >= 3.30.0",
		"fs >= 2.4.11, < 3",
	],
	extras_require={
		"testing": [
			"pytest >= 3.0.0",
			"pytest-cov >= 2.5.1",
			"pytest-randomly >= 1.2.3",
		],
	},
	entry_points={
		"console_scripts": [
			"platform-qbd = qbdLib.cli:main",
		],
	},
	classifiers=[
		"Development Status :: 4 - Beta",
		"Environment :: Console",
		"Intended Audience :: Science/Research",
		"License :: OSI Approved :: MIT License",
		"Natural Language :: English",
		"Operating System :: OS Independent",
		"Programming Language :: Python :: 3",
		"Topic :: Scientific/Engineering :: Mathematics",
	],
)


if __name__ == "__main__":
	setup(**setup_params)
