from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    # pure-Python install; polyvi._backend falls back to NumPy kernels
    pass
else:
    ext_modules = cythonize(
        Extension(
            "polyvi._kernels",
            ["src/polyvi/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        language_level=3,
    )

setup(ext_modules=ext_modules)
