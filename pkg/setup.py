"""Build script: compiles the Monte Carlo kernel extension when a toolchain
is available.  Set QIDCODES_PURE=1 to skip compilation; the package then runs
on the pure-numpy fallback backend."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QIDCODES_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "qidcodes._accel._mc",
                    ["src/qidcodes/_accel/_mc.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
