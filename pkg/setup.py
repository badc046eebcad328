"""PyPI setup script

Usage:
    >>> python setup.py sdist
    ...

"""

import os
from setuptools import setup, find_packages

version_file = os.path.abspath("sbfolio/version.py")
version_mod = dict()

with open(version_file) as f:
    exec(f.read(), version_mod)

version = version_mod["version"]

classifiers = [
    "Development Status :: 4 - Beta",
    "Intended Audience :: Science/Research",
    "License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)",
    "Programming Language :: Python",
    "Programming Language :: Python :: 3",
    "Programming Language :: Python :: 3.8",
    "Programming Language :: Python :: 3.9",
    "Programming Language :: Python :: 3.10",
    "Programming Language :: Python :: 3.11",
    "Topic :: Office/Business :: Financial :: Investment",
    "Topic :: Scientific/Engineering :: Mathematics",
]

setup(
    name="sbfolio",
    version=version,
    description="Integer portfolio trajectories solved by "
                "simulated bifurcation.",
    license="LGPL",
    packages=find_packages(),
    classifiers=classifiers,
    python_requires=">=3.8",
    install_requires=[
        "pyblish-base>=1.4.2",
        "jsonschema>=3.2",
        "numpy>=1.20",
        "pandas>=1.5",
    ],
    extras_require={
        "tests": ["pytest"],
    },
    package_data={
        "sbfolio": [
            "schema/*.json",
            "presets/*.json",
            "plugins/*.py",
        ]
    },
    entry_points={
        "console_scripts": [
            "sbfolio = sbfolio.__main__:main",
        ]
    },
)
