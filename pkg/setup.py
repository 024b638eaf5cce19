"""Build script: compiles the optional accelerator extension when Cython is
available. The package works without it (pure-Python kernels are selected at
import time), so a failed or skipped extension build is not fatal."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tripoly._kernels._ext",
                ["src/tripoly/_kernels/_ext.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
