"""Build script: compiles the optional speedup kernels when Cython is available.

The package works without the extension; rulekit.kernels falls back to a
vectorized pure-Python backend at import time.  Set RULEKIT_SKIP_SPEEDUPS=1
to force a pure build.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RULEKIT_SKIP_SPEEDUPS"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "rulekit.kernels._speedups",
                    ["src/rulekit/kernels/_speedups.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
