"""Build script for the optional compiled greedy kernel.

The package is pure Python plus one Cython extension (tokensieve._native)
holding the greedy map inner loop.  If Cython or a C toolchain is missing
the extension is skipped and the numpy fallback is used at import time.
"""

import sys

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "tokensieve._native",
                sources=["src/tokensieve/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError as exc:
    print(f"tokensieve: native extension skipped ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
