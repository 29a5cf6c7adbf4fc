import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "spheregas._mcmc",
                ["src/spheregas/_mcmc.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )

# The compiled kernel is optional: spheregas.sampler falls back to a pure
# numpy implementation when the extension is missing.
setup(ext_modules=ext_modules)
