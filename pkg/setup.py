"""Build script: compiles the optional Cython kernel core.

The extension is a speed-up only; if Cython or a C compiler is missing the
build degrades to the pure-Python kernel fallback that bridgekit selects at
import time (see bridgekit.numcore.backend).
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Never fail the install because the accelerator would not compile."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc}); "
                  f"pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc}); "
                  f"pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError:
        return []
    ext = Extension(
        "bridgekit.numcore._kernels_cy",
        ["src/bridgekit/numcore/_kernels_cy.pyx"],
        extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
