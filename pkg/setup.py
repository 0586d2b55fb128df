import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ROBUSTBOOST_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "robustboost._kernels._core",
                    ["src/robustboost/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        # No Cython available: install with the pure-Python kernels only.
        ext_modules = []

setup(ext_modules=ext_modules)
