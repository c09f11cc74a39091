"""Density matrices on a bipartite space and their static information quantities.

Entropies are in nats throughout.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionError, StateError
from .linalg import HermitianMatrix, tensor_product

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
ENTROPY_CUTOFF = 1e-15
MI_CLAMP = 1e-10

__all__ = [
    "BipartiteSpace",
    "DensityMatrix",
    "from_pure",
    "is_product",
    "mutual_information",
    "partial_trace",
    "product_defect",
    "product_state",
    "purity",
    "random_density",
    "random_hermitian",
    "renyi_entropy",
    "von_neumann_entropy",
]


@dataclass(frozen=True)
class BipartiteSpace:
    """Dimension pair of ``H_S (x) H_E``."""

    dim_s: int
    dim_e: int

    def __post_init__(self):
        for name in ("dim_s", "dim_e"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DimensionError(f"{name} must be a positive integer, got {value!r}")

    @property
    def dim(self):
        return self.dim_s * self.dim_e

    def check(self, op, name="operator"):
        n = np.shape(op.data if hasattr(op, "data") else op)[0]
        if n != self.dim:
            raise DimensionError(
                f"{name} has dimension {n}, expected {self.dim_s}*{self.dim_e}={self.dim}"
            )


class DensityMatrix:
    """Positive semidefinite, unit-trace operator with cached spectrum.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero and the spectrum is
    renormalized; more negative eigenvalues, or a trace further than
    ``1e-10`` from one, raise :class:`StateError`.
    """

    def __init__(self, a):
        h = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
        tr = float(np.trace(h.data).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix trace is {tr!r}, expected 1")
        eig = h.eig
        lam = eig.eigenvalues
        lowest = float(lam[0])
        if lowest < -PSD_TOL:
            raise StateError(f"density matrix has eigenvalue {lowest:.3e} < -{PSD_TOL}")
        self.psd_defect = max(0.0, -lowest)
        self.eigenvectors = eig.eigenvectors
        if lowest < 0.0:
            p = np.clip(lam, 0.0, None)
            p = p / p.sum()
            v = eig.eigenvectors
            m = (v * p) @ v.conj().T
            self.matrix = HermitianMatrix._trusted((m + m.conj().T) / 2)
        else:
            p = lam / lam.sum()
            self.matrix = h
        p.setflags(write=False)
        self.eigenvalues = p

    @property
    def data(self):
        return self.matrix.data

    @property
    def dim(self):
        return self.matrix.dim

    @cached_property
    def purity(self):
        return float(np.sum(self.eigenvalues**2))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, purity={self.purity:.6g})"


def from_pure(psi):
    """Projector ``|psi><psi| / <psi|psi>``."""
    v = np.asarray(psi, dtype=np.complex128).ravel()
    norm2 = float(np.vdot(v, v).real)
    if v.size == 0 or norm2 <= 0.0:
        raise StateError("pure state vector must be non-zero")
    return DensityMatrix(np.outer(v, v.conj()) / norm2)


def product_state(rho_s, rho_e):
    return DensityMatrix(tensor_product(rho_s.data, rho_e.data))


def partial_trace(rho, space, trace_out="E"):
    """Reduced state after tracing out subsystem ``"E"`` (default) or ``"S"``."""
    space.check(rho, "state")
    data = rho.data if hasattr(rho, "data") else np.asarray(rho)
    return DensityMatrix(kernels.partial_trace(data, space.dim_s, space.dim_e, trace_out))


def purity(rho):
    """``Tr rho^2``, in ``[1/dim, 1]``."""
    return rho.purity


def _entropy_from_spectrum(p):
    p = p[p > ENTROPY_CUTOFF]
    return float(-np.sum(p * np.log(p))) + 0.0


def von_neumann_entropy(rho):
    """``-Tr rho ln rho`` in nats, with ``0 ln 0 = 0``."""
    return _entropy_from_spectrum(rho.eigenvalues)


def renyi_entropy(rho, alpha):
    """Renyi entropy of order ``alpha`` in nats.

    Parameters
    ----------
    rho : DensityMatrix
    alpha : float
        Positive and different from one.
    """
    if not (alpha > 0) or alpha == 1:
        raise ValueError(f"Renyi order must be positive and != 1, got {alpha!r}")
    p = rho.eigenvalues
    p = p[p > ENTROPY_CUTOFF]
    return float(np.log(np.sum(p**alpha)) / (1.0 - alpha)) + 0.0


def mutual_information(rho, space):
    """``S(rho_S) + S(rho_E) - S(rho)`` in nats, clamped at zero."""
    space.check(rho, "state")
    s_s = von_neumann_entropy(partial_trace(rho, space, "E"))
    s_e = von_neumann_entropy(partial_trace(rho, space, "S"))
    value = s_s + s_e - von_neumann_entropy(rho)
    if value < 0.0:
        if value < -MI_CLAMP:
            raise StateError(f"mutual information {value:.3e} is negative beyond tolerance")
        return 0.0
    return value


def product_defect(rho, space):
    """Trace-norm distance ``||rho - rho_S (x) rho_E||_1``."""
    space.check(rho, "state")
    data = rho.data
    rs = kernels.partial_trace(data, space.dim_s, space.dim_e, "E")
    re = kernels.partial_trace(data, space.dim_s, space.dim_e, "S")
    diff = data - np.kron(rs, re)
    diff = (diff + diff.conj().T) / 2
    return float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def is_product(rho, space, tol=1e-8):
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    return product_defect(rho, space) <= tol


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(dim, rank=None, seed=None):
    """Random state ``G G^dagger / Tr(G G^dagger)`` with ``G`` a ``dim x rank``
    standard complex Gaussian matrix.

    ``seed`` is an integer or a :class:`numpy.random.Generator`.
    """
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = _ginibre(_rng(seed), dim, rank)
    w = g @ g.conj().T
    w = (w + w.conj().T) / 2
    return DensityMatrix(w / np.trace(w).real)


def random_hermitian(dim, scale=1.0, seed=None):
    """GUE-style sample ``scale * (G + G^dagger) / 2``, entries of ``G`` with
    unit mean-square modulus."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    g = _ginibre(_rng(seed), dim, dim)
    return HermitianMatrix._trusted(scale * (g + g.conj().T) / 2)
