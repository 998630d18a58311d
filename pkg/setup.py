"""Build script.

The bottleneck-value kernel has a compiled (Cython) implementation and a pure
Python one.  The compiled extension is optional: if Cython or a C compiler is
unavailable the package installs anyway and selects the Python kernel at
import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("ctxfuse._kernel", ["src/ctxfuse/_kernel.pyx"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
