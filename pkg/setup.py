from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package falls back to the pure-numpy kernel at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "groupoidal.numkit._jacobi",
                ["src/groupoidal/numkit/_jacobi.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
