import os

from setuptools import setup

ext_modules = []
if not os.environ.get("BTCURATOR_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/btcurator/kernels/_ckernels.pyx",
            compiler_directives={"language_level": "3"},
        )
        include_dirs = [numpy.get_include()]
        for ext in ext_modules:
            ext.include_dirs = include_dirs
    except ImportError:
        # no Cython: install with the pure-python kernels only
        ext_modules = []

setup(ext_modules=ext_modules)
