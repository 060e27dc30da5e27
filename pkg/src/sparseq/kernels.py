"""Kernel selection: compiled extension if built, pure Python otherwise.

Set SPARSEQ_PURE=1 to force the pure-Python kernels (used by the
benchmark in benchmarks/bench_kernels.py to compare both).
"""

import os

if os.environ.get("SPARSEQ_PURE"):
    from sparseq import _kernels as _impl
else:
    try:
        from sparseq import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from sparseq import _kernels as _impl  # type: ignore[no-redef]

COMPILED = _impl.__name__.endswith("_ckernels")

POPCOUNT4 = _impl.POPCOUNT4
POPBYTE = _impl.POPBYTE
TRANS4 = _impl.TRANS4
ZSWAP = _impl.ZSWAP
eff_sig = _impl.eff_sig
child = _impl.child
sub_ones = _impl.sub_ones
merge_seq = _impl.merge_seq
merge_mixed = _impl.merge_mixed
multiply = _impl.multiply
sum_restricted = _impl.sum_restricted
iter_ones = _impl.iter_ones
line_count = _impl.line_count
set_check_hook = _impl.set_check_hook
