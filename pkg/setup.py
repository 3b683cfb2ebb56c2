import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "pvtrack.assignment._lap_ext",
        ["src/pvtrack/assignment/_lap_ext.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# PVTRACK_NO_EXT=1 installs the pure-Python package only
setup(
    ext_modules=[] if os.environ.get("PVTRACK_NO_EXT") else cythonize(
        extensions, compiler_directives={"language_level": "3"}),
)
