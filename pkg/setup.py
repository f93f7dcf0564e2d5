import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; cavity_xyz.kernels falls back
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("CXYZ_NO_EXTENSION"):
    ext_modules = cythonize(
        [
            Extension(
                "cavity_xyz._ckernels",
                ["src/cavity_xyz/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
