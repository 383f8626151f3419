"""Build the optional Cython kernels; the package falls back to numpy without them."""
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

DIRECTIVES = dict(
    language_level=3,
    boundscheck=False,
    wraparound=False,
    cdivision=True,
    initializedcheck=False,
    embedsignature=True,
)


class optional_build_ext(build_ext):
    # A missing compiler must not break installation.
    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback")


ext_modules = []
if not os.environ.get("ROUNDTAX_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "roundtax._ckernels",
                    ["src/roundtax/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives=DIRECTIVES,
        )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
