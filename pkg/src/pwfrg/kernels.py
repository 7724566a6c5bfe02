"""Select the compiled kernel when available.

Set ``PWFRG_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import os

from . import _bitkernel_py

BACKEND = "python"
_heisenberg_apply = _bitkernel_py.heisenberg_apply

if not os.environ.get("PWFRG_PURE_PYTHON"):
    try:
        from ._bitkernel import heisenberg_apply as _heisenberg_apply
        BACKEND = "cython"
    except ImportError:  # extension not built
        pass


def heisenberg_apply(x, couplings, out=None, backend=None):
    """``out = H x`` for an open chain with the given bond strengths.

    ``backend`` overrides the import-time choice ("python" or "cython").
    """
    import numpy as np

    x = np.ascontiguousarray(x, dtype=float)
    couplings = np.ascontiguousarray(couplings, dtype=float)
    if x.shape[0] != 1 << (len(couplings) + 1):
        raise ValueError("vector length does not match the number of sites")
    if out is None:
        out = np.empty_like(x)
    fn = _heisenberg_apply
    if backend == "python":
        fn = _bitkernel_py.heisenberg_apply
    elif backend == "cython":
        from ._bitkernel import heisenberg_apply as fn
    fn(x, couplings, out)
    return out
