"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and semantics; used when the extension is not built or when
``CHAINENT_BACKEND=numpy`` is set.
"""

import numpy as np


def _check(psi, sites, n):
    if psi.shape[0] != 1 << n:
        raise ValueError("state length does not match qubit count")
    for s in sites:
        if s < 0 or s > n - 2:
            raise ValueError(f"bond site {s} out of range for n={n}")


def apply_gates(psi, gates, sites, n):
    """Apply ``gates[k]`` on sites ``(sites[k], sites[k] + 1)`` in order, in place."""
    _check(psi, sites, n)
    for g, s in zip(gates, sites):
        view = psi.reshape(1 << s, 4, 1 << (n - 2 - s))
        view[...] = np.matmul(g, view)


def apply_bonds(psi, mats, sites, n, out):
    """Write ``sum_k mats[k] psi`` into ``out``."""
    _check(psi, sites, n)
    if out.shape[0] != psi.shape[0]:
        raise ValueError("state length does not match qubit count")
    out[...] = 0
    for h, s in zip(mats, sites):
        shape = (1 << s, 4, 1 << (n - 2 - s))
        out.reshape(shape)[...] += np.matmul(h, psi.reshape(shape))
