import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("TSBASELINES_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "tsbaselines._kernels",
                    ["src/tsbaselines/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError as exc:
        print(f"compiled kernels skipped ({exc}); the pure-Python backend will be used")

setup(ext_modules=ext_modules)
