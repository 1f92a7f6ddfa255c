"""Build script for the optional Cython kernels.

The package works without a compiler: if the extension cannot be built,
``varconv.kernels`` falls back to the numpy implementation.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("VARCONV_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build without Cython
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "varconv._kernels",
                    ["src/varconv/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
