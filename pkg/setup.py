"""Build the optional compiled decoding core.

If Cython or a C compiler is missing the package still installs and falls
back to the pure-Python engine at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("PSPOLAR_PURE_PYTHON") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("pspolar._core", ["src/pspolar/_core.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
