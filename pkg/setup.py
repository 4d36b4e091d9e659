"""Build script for the optional compiled kernel core.

The package works without the extension (a pure-python fallback is selected
at import time), so a missing compiler or Cython must not fail the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """build_ext that degrades to a warning when compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: compiled kernels unavailable ({exc}); "
            "falling back to the pure-python backend",
            file=sys.stderr,
        )


extensions = [
    Extension(
        "nccsense._kernels._core",
        sources=["src/nccsense/_kernels/_core.pyx"],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level="3") if cythonize else [],
    cmdclass={"build_ext": OptionalBuildExt},
)
