# cython: language_level=3
# Compiled twin of the pure-Python kernels; one source, two builds.
include "_kernels.py"
