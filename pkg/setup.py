from setuptools import Extension, setup

# The compiled event-loop kernel is optional: without Cython/numpy headers the
# package falls back to the pure-Python kernel selected in eoe.kernels.
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "eoe._simkernel",
                ["src/eoe/_simkernel.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: the kernel must be bit-identical to the
                # pure-Python twin, so FMA contraction is disabled.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
            "nonecheck": False,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
