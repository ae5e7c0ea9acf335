"""Build script. The compiled kernels are optional: if Cython or a C compiler
is unavailable the install proceeds and the package falls back to its numpy
kernels at import time."""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as err:  # missing compiler, broken toolchain
            self._skip(err)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as err:
            self._skip(err)

    @staticmethod
    def _skip(err):
        print(f"WARNING: compiled kernels not built ({err}); "
              f"relimax will use the numpy fallback kernels")


try:
    from Cython.Build import cythonize

    # -O3 only: no -ffast-math, the trajectory kernel's comparisons must stay
    # bit-identical to the numpy fallback.
    ext_modules = cythonize(
        [
            Extension(
                "relimax._kernels._core",
                ["src/relimax/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(cmdclass={"build_ext": OptionalBuildExt}, ext_modules=ext_modules)
