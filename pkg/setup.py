"""Build script: compiles the optional selection kernel.

The package works without the extension (a pure-Python fallback is picked
at import time); set CHRISIMOS_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CHRISIMOS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "chrisimos._kernels._native",
                    ["src/chrisimos/_kernels/_native.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
