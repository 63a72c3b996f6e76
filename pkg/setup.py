"""Build script. The matching kernel has an optional Cython build.

The compiled extension (clinn._match_cy) is a drop-in accelerator for the
pure-Python kernel in clinn._match_py; the package works without it. The
build is skipped when Cython or a C toolchain is unavailable.
"""

from setuptools import setup

ext_modules = []
cmdclass = {}
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/clinn/_match_cy.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules, cmdclass=cmdclass)
