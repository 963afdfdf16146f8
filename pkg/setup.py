import sys

from setuptools import setup

# The compiled kernel is an optimization, not a requirement: when Cython or
# a C toolchain is unavailable the package installs pure-python and the
# backend selector falls back at import time.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/quditmse/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - toolchain-dependent
    print("building without the compiled kernel: %s" % exc, file=sys.stderr)

setup(ext_modules=ext_modules)
