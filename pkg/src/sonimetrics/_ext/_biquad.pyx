# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
import numpy as np


def biquad_tv(const double[::1] x, const double[::1] b0, const double[::1] b1,
              const double[::1] b2, const double[::1] a1, const double[::1] a2):
    """Direct-form-I biquad with per-sample coefficients (a0 normalized to 1)."""
    cdef Py_ssize_t n = x.shape[0], i
    if not (b0.shape[0] == b1.shape[0] == b2.shape[0] == a1.shape[0] == a2.shape[0] == n):
        raise ValueError("coefficient arrays must match the input length")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double x0, x1 = 0.0, x2 = 0.0, y0, y1 = 0.0, y2 = 0.0
    with nogil:
        for i in range(n):
            x0 = x[i]
            # same left-to-right evaluation as the Python fallback
            y0 = b0[i] * x0 + b1[i] * x1 + b2[i] * x2 - a1[i] * y1 - a2[i] * y2
            y[i] = y0
            x2 = x1
            x1 = x0
            y2 = y1
            y1 = y0
    return out
