from __future__ import annotations

import numpy as np


def biquad_tv(x, b0, b1, b2, a1, a2):
    """Direct-form-I biquad with per-sample coefficients (a0 normalized to 1)."""
    n = len(x)
    if not all(len(c) == n for c in (b0, b1, b2, a1, a2)):
        raise ValueError("coefficient arrays must match the input length")
    xs = np.asarray(x, dtype=np.float64).tolist()
    cb0, cb1, cb2 = b0.tolist(), b1.tolist(), b2.tolist()
    ca1, ca2 = a1.tolist(), a2.tolist()
    out = [0.0] * n
    x1 = x2 = y1 = y2 = 0.0
    for i in range(n):
        x0 = xs[i]
        y0 = cb0[i] * x0 + cb1[i] * x1 + cb2[i] * x2 - ca1[i] * y1 - ca2[i] * y2
        out[i] = y0
        x2, x1 = x1, x0
        y2, y1 = y1, y0
    return np.array(out, dtype=np.float64)
