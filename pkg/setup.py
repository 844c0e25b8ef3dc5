import os

from setuptools import setup, Extension

ext_modules = []
if not os.environ.get("MAXSTABLE_LAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
        import numpy as np

        ext_modules = cythonize(
            [
                Extension(
                    "maxstable_lab._ckernels",
                    ["src/maxstable_lab/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    language="c++",
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Cython or numpy missing at build time: the pure-Python kernels are used.
        ext_modules = []

setup(ext_modules=ext_modules)
