"""Build script: compiles the optional integer-scan extension.

The package works without the extension (a pure-Python twin of every
kernel ships in katofan/_purekernels.py); the extension only speeds up
the hot inner loops.  Build failures are therefore non-fatal.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "katofan._speedups",
                ["src/katofan/_speedups.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
