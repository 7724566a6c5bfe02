"""NumPy fallback for the bit-basis Heisenberg matvec (same conventions)."""
import numpy as np


def heisenberg_apply(x, couplings, out):
    n = x.shape[0]
    nb = len(couplings)
    idx = np.arange(n, dtype=np.int64)
    out[:] = 0.0
    for i, c in enumerate(couplings):
        p = nb - 1 - i
        anti = ((idx >> p) ^ (idx >> (p + 1))) & 1
        out += c * np.where(anti, -0.25, 0.25) * x
        out += (0.5 * c) * anti * x[idx ^ (3 << p)]
    return out
