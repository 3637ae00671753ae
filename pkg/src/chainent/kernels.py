"""Backend selection for the state-vector kernels.

The Cython extension is used when it imports; otherwise the numpy fallback.
Set ``CHAINENT_BACKEND=numpy`` to force the fallback.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("CHAINENT_BACKEND", "").lower() == "numpy":
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "numpy"

BACKENDS = {"numpy": _fallback}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _prepare(psi, mats, sites):
    mats = np.ascontiguousarray(mats, dtype=np.complex128).reshape(-1, 4, 4)
    sites = np.ascontiguousarray(sites, dtype=np.int_).reshape(-1)
    if mats.shape[0] != sites.shape[0]:
        raise ValueError("need one site index per 4x4 matrix")
    return mats, sites


def apply_gates(psi, gates, sites, n, backend=None):
    """Apply a sequence of two-site gates to ``psi`` in place.

    ``psi`` must be a contiguous complex128 vector of length ``2**n``.
    """
    if psi.dtype != np.complex128 or not psi.flags.c_contiguous:
        raise TypeError("psi must be a contiguous complex128 array")
    gates, sites = _prepare(psi, gates, sites)
    impl = BACKENDS[backend] if backend else _impl
    impl.apply_gates(psi, gates, sites, n)
    return psi


def apply_bonds(psi, mats, sites, n, out=None, backend=None):
    """Return ``sum_k mats[k] psi`` with ``mats[k]`` acting on sites ``(sites[k], sites[k]+1)``."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    mats, sites = _prepare(psi, mats, sites)
    if out is None:
        out = np.empty_like(psi)
    impl = BACKENDS[backend] if backend else _impl
    impl.apply_bonds(psi, mats, sites, n, out)
    return out
