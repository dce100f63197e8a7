"""Build script for the optional compiled kernels.

The package works without a compiler: if Cython or a C toolchain is missing
the extension is skipped and ``siegel_lab.kernels`` falls back to the
pure-Python implementation.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SIEGEL_LAB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "siegel_lab._kernels",
                    ["src/siegel_lab/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
