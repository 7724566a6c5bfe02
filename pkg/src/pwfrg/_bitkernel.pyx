# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bit-basis Heisenberg matvec.

Site ``k`` (1-based) of an ``L``-site chain is bit ``L - k`` of the state
index; bit value 0 is spin up. Each output entry is accumulated by a single
loop in a fixed bond order, so results are reproducible.
"""


def heisenberg_apply(const double[::1] x, const double[::1] couplings,
                     double[::1] out):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nb = couplings.shape[0]
    cdef Py_ssize_t s, i
    cdef int p
    cdef unsigned long long st, pair
    cdef double acc, c, xs
    if out.shape[0] != n:
        raise ValueError("output length mismatch")
    with nogil:
        for s in range(n):
            st = <unsigned long long> s
            xs = x[s]
            acc = 0.0
            for i in range(nb):
                c = couplings[i]
                p = <int> (nb - 1 - i)
                if ((st >> p) ^ (st >> (p + 1))) & 1:
                    pair = st ^ (<unsigned long long> 3 << p)
                    acc += -0.25 * c * xs + 0.5 * c * x[pair]
                else:
                    acc += 0.25 * c * xs
            out[s] = acc
