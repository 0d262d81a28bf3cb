"""Inner loops that do not vectorize.

``biquad`` runs a second-order IIR filter whose coefficients change on
every sample. It exists twice: ``_biquad`` is the compiled Cython version
and ``pybiquad`` the pure-Python fallback. Both evaluate the difference
equation in the same order, so their outputs are bit-identical.
"""

from __future__ import annotations

from .pybiquad import biquad_tv as py_biquad_tv

try:
    from ._biquad import biquad_tv as c_biquad_tv
except ImportError:  # extension not built
    c_biquad_tv = None

BACKEND = "cython" if c_biquad_tv is not None else "python"
biquad_tv = c_biquad_tv if c_biquad_tv is not None else py_biquad_tv

__all__ = ["BACKEND", "biquad_tv", "c_biquad_tv", "py_biquad_tv"]
