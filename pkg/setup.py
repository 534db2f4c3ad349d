from setuptools import Extension, setup

# The compiled route-computation kernel is optional: without Cython (or a C
# compiler) the package falls back to the pure-Python twin at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "olsrsim.metrics._pathcore",
                ["src/olsrsim/metrics/_pathcore.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
