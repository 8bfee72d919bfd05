"""Hot numeric kernels.

Two interchangeable backends implement the same functions: compiled loops
(numba) and vectorized numpy. The numba backend is used when numba imports
and ``SCWQKD_NO_NUMBA`` is unset or "0"; set ``SCWQKD_NO_NUMBA=1`` to force
the numpy path.
"""

import os

from . import _numpy
from ._common import (POLICY_DISCARD, POLICY_RANDOM_BIT, REGIME_CARRIER,
                      REGIME_DEEP, REGIME_ORIGINAL)


def _want_numba():
    flag = os.environ.get("SCWQKD_NO_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


def load_backend(name):
    """Return the kernel module for ``name`` ("numba" or "numpy")."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


BACKEND = "numpy"
_impl = _numpy
if _want_numba():
    try:
        _impl = load_backend("numba")
        BACKEND = "numba"
    except ImportError:
        pass

bessel_table = _impl.bessel_table
modulated_energies = _impl.modulated_energies
apply_dead_time = _impl.apply_dead_time
tally = _impl.tally

__all__ = [
    "BACKEND", "load_backend", "bessel_table", "modulated_energies",
    "apply_dead_time", "tally", "REGIME_ORIGINAL", "REGIME_DEEP",
    "REGIME_CARRIER", "POLICY_DISCARD", "POLICY_RANDOM_BIT",
]
