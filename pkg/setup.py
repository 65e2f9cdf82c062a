"""Build script: compiles the optional sweep kernel when a toolchain is present.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the build therefore degrades gracefully instead of
failing when Cython or a C compiler is missing.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "frontgame.kernels._sweep",
                ["src/frontgame/kernels/_sweep.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - toolchain probing
    print(f"frontgame: skipping compiled kernel ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
