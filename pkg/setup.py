import os

from setuptools import Extension, setup

# Smith division and plain multiplication inline, as numpy does, instead of
# the C99 libcalls with their inf/nan recovery
COMPILE_ARGS = ["-O3", "-fcx-fortran-rules"] if os.name != "nt" else ["/O2"]

ext_modules = []
if os.environ.get("LCLADDER_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "lcladder._ckernels",
                    ["src/lcladder/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=COMPILE_ARGS,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
