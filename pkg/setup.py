"""Build script for the optional compiled Bellman-backup kernel.

The package is pure Python except for one Cython extension holding the
floating-point value-iteration inner loop.  The extension is marked
optional: if Cython, numpy, or a C compiler is missing, installation
proceeds and the package falls back to the numpy kernel at import time.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "rabingames.kernels._backup",
        ["src/rabingames/kernels/_backup.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
