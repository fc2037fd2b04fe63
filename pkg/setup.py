import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "zetaflow._kernels._speedups",
    ["src/zetaflow/_kernels/_speedups.pyx"],
    include_dirs=[numpy.get_include()],
)

setup(ext_modules=cythonize(ext, language_level=3))
