import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the compiled kernel when a toolchain is available.

    The package is fully functional on the pure-Python kernel, so a missing
    compiler or Cython must not fail the install.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernel skipped ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: extension {ext.name} skipped ({exc})")


def extensions():
    if os.environ.get("THEMELAB_NO_EXT"):
        return []
    pyx = os.path.join("src", "themelab", "_kernel.pyx")
    if not os.path.exists(pyx):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("themelab._kernel_c", [pyx])],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
