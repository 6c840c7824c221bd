"""Builds the optional compiled kernel. A failed compile leaves the pure-Python fallback in place."""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "pvbatt._kernel",
        ["src/pvbatt/_kernel.pyx"],
        include_dirs=[np.get_include()],
        # no FMA contraction: results must match the Python twin bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
