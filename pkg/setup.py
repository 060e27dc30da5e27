from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or without a C compiler)
# the package falls back to the pure-Python kernels at import time.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("sparseq._ckernels", ["src/sparseq/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
