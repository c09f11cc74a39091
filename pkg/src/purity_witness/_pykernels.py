"""Pure numpy implementations of the hot kernels.

These are the reference fallbacks for :mod:`purity_witness._ckernels`; both
expose the same functions with the same signatures.
"""

import numpy as np


def partial_trace(rho, dim_s, dim_e, trace_out):
    """Partial trace of a ``(dim_s*dim_e)``-square matrix, S index slow."""
    blocks = rho.reshape(dim_s, dim_e, dim_s, dim_e)
    if trace_out == "E":
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


def purity_rate_trace(rho, h, dim_s, dim_e):
    """Return ``Tr((rho_S (x) I_E) [H, rho])`` as a complex number."""
    comm = h @ rho - rho @ h
    rho_s = partial_trace(rho, dim_s, dim_e, "E")
    reduced_comm = partial_trace(comm, dim_s, dim_e, "E")
    return complex(np.sum(rho_s.T * reduced_comm))
