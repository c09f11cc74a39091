import os

import numpy as np
from setuptools import Extension, setup

extensions = []
if os.environ.get("PURITY_WITNESS_NO_EXT", "") in ("", "0"):
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "purity_witness._ckernels",
                ["src/purity_witness/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
