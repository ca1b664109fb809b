"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module is. Set ``MATCHFORGE_PURE_PYTHON=1`` to force the fallback.
"""
import os
from array import array

from matchforge import _kernels_py

if os.environ.get("MATCHFORGE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from matchforge import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

transversal_rank = _impl.transversal_rank
path_independence_witness = _impl.path_independence_witness
size_monotonicity_witness = _impl.size_monotonicity_witness
substitutability_witness = _impl.substitutability_witness
irc_witness = _impl.irc_witness
rank_table = _impl.rank_table
independence_witness = _impl.independence_witness
rank_witness = _impl.rank_witness
base_exchange_witness = _impl.base_exchange_witness


def backends():
    """Available kernel modules keyed by name (for cross-checks and benchmarks)."""
    found = {"python": _kernels_py}
    try:
        from matchforge import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found


def u64_array(values=()):
    return array("Q", values)
