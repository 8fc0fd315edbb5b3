from Cython.Build import cythonize
from setuptools import Extension, setup

# no fast-math or FMA contraction: the compiled kernel must match the Python reference bit for bit
extensions = [
    Extension(
        "cascadelab._kernel",
        ["src/cascadelab/_kernel.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
