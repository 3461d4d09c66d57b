"""Build script: compiles the optional fast kernels.

The package works without the compiled extension (a NumPy fallback is
selected at import time), so a missing compiler or Cython downgrades the
build to pure Python instead of failing it.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("WPCNRELAY_NO_EXT", "") not in ("1", "true"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        # the random-stream C API lives in numpy's static npyrandom library
        npyrandom_dir = os.path.join(
            os.path.dirname(np.__file__), "random", "lib"
        )
        ext = Extension(
            "wpcnrelay._kernels",
            ["src/wpcnrelay/_kernels.pyx"],
            include_dirs=[np.get_include()],
            library_dirs=[npyrandom_dir],
            libraries=["npyrandom"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize([ext], language_level=3)
    except Exception as exc:  # pragma: no cover
        print("wpcnrelay: building without compiled kernels (%s)" % exc,
              file=sys.stderr)
        ext_modules = []

setup(ext_modules=ext_modules)
