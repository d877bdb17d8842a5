import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator extension if possible, fall back silently.

    The package is fully functional without the compiled kernels; the
    pure-python backend is selected at import time when _ckernels is absent.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: skipping compiled kernels ({exc}); "
                  f"pure-python backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  f"pure-python backend will be used")


ext_modules = []
if os.environ.get("MDEMAP_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mdemap._ckernels",
                    ["src/mdemap/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
