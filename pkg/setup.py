"""Build script: compiles the optional speedup extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so a failed compile only costs speed.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("FOLIOLAB_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext = Extension(
            "foliolab._kernels._core",
            ["src/foliolab/_kernels/_core.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize(
            [ext], compiler_directives={"language_level": 3})
    except Exception as exc:  # noqa: BLE001 - any build-env problem degrades to pure python
        sys.stderr.write("foliolab: skipping C extension (%s)\n" % exc)

setup(ext_modules=ext_modules)
