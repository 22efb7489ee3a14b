import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Drives the CMake build and drops _tsgad into the tsgad package."""

    def build_extension(self, ext):
        src = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        cfg = [
            "cmake",
            "-S", str(src),
            "-B", str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DTSGAD_BUILD_TESTS=OFF",
            f"-DPython3_EXECUTABLE={sys.executable}",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
        ]
        subprocess.run(cfg, check=True)
        jobs = str(os.cpu_count() or 2)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_tsgad", "-j", jobs],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("tsgad._tsgad")],
    cmdclass={"build_ext": CMakeBuild},
)
