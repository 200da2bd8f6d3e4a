"""Build the optional Cython window kernel.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy implementation at import time.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SMC_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "smc._window_ext",
                    ["src/smc/_window_ext.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
