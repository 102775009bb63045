"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure NumPy fallback is selected
at import time); building it just makes the hot kernels faster.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lyapctrl.kernels._speedups",
                ["src/lyapctrl/kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
