"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python fallback is
selected at import time); the build is best-effort so that source
installs on toolchain-less hosts still succeed.
"""

import numpy
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "bdpgo._kernels._core",
                ["src/bdpgo/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps float results bit-identical to the
                # pure-Python fallback (no fused multiply-add surprises).
                extra_compile_args=["-O2", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
