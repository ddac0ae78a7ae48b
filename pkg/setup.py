"""Build script: compiles the optional matching kernel when Cython is available.

The package works without the extension (a pure-Python fallback is selected
at import time), so the extension is marked optional and a failed compile
only produces a warning.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "termlex._match_cy",
                ["src/termlex/_match_cy.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
