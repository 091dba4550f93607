"""Builds the optional compiled LCS kernel.

The package works without it (textproc falls back to a pure-Python DP);
the extension exists because LCS re-ranking is the hot loop of retrieval.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tutorprompt._lcskernel",
                ["src/tutorprompt/_lcskernel.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
