from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kcert._ratcore",
                ["src/kcert/_ratcore.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # No Cython: install the pure-Python package, scalars fall back to Fraction.
    ext_modules = []

setup(ext_modules=ext_modules)
