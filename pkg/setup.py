from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
    import numpy as np

    extensions = cythonize(
        [
            Extension(
                "aoisim._kernels._core",
                ["src/aoisim/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback kernels are used when the extension is absent.
    extensions = []

setup(ext_modules=extensions)
