import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    USE_CYTHON = True
except ImportError:
    USE_CYTHON = False

# The package runs without the extension; EHORM_SIM_NO_EXT skips building it.
ext_modules = []
if USE_CYTHON and not os.environ.get("EHORM_SIM_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "ehorm_sim._kernels",
                ["src/ehorm_sim/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # no FMA contraction: results must match the Python fallback bit for bit
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
