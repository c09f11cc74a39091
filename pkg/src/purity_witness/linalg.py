"""Dense complex-matrix kernels.

Every operator in the package is a ``complex128`` numpy array. Hermitian
operators are wrapped in :class:`HermitianMatrix`, which validates and
symmetrizes its input and caches a deterministic eigendecomposition.

Bipartite index convention: basis element ``(i, j)`` of ``S (x) E`` maps to
flat index ``i * dim_e + j`` (S slow, E fast), which is what
:func:`numpy.kron` produces.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, HermiticityError, NumericalError

HERMITIAN_RTOL = 1e-10
DEGENERACY_RTOL = 1e-10
ZERO_TIME = 1e-15

__all__ = [
    "HermitianMatrix",
    "SpectralDecomposition",
    "as_matrix",
    "commutator",
    "hermitian_eig",
    "operator_norm",
    "propagator",
    "tensor_product",
    "trace_norm",
]


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D ``complex128`` array (copy if needed)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} has non-finite entries")
    return m


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _square(m, name):
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, fn):
        """Matrix function ``V fn(Lambda) V^dagger``."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ v.conj().T


class HermitianMatrix:
    """Validated Hermitian operator.

    Input within ``1e-10 * max(1, max|A_ij|)`` of Hermitian is stored as
    ``(A + A^dagger) / 2``; anything further away raises
    :class:`HermiticityError`.
    """

    def __init__(self, a):
        m = as_matrix(a, "Hermitian matrix")
        _square(m, "Hermitian matrix")
        defect = float(np.max(np.abs(m - m.conj().T)))
        scale = max(1.0, float(np.max(np.abs(m))))
        if defect > HERMITIAN_RTOL * scale:
            raise HermiticityError(
                f"matrix is not Hermitian: defect {defect:.3e} exceeds "
                f"tolerance {HERMITIAN_RTOL * scale:.3e}"
            )
        self.data = _frozen((m + m.conj().T) / 2)
        self.hermiticity_defect = defect

    @classmethod
    def _trusted(cls, data):
        # Caller guarantees exact Hermiticity.
        obj = cls.__new__(cls)
        obj.data = _frozen(data)
        obj.hermiticity_defect = 0.0
        return obj

    @property
    def dim(self):
        return self.data.shape[0]

    @cached_property
    def eig(self):
        return hermitian_eig(self)

    @cached_property
    def op_norm(self):
        return float(np.max(np.abs(self.eig.eigenvalues)))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"


def tensor_product(a, b):
    """Kronecker product with ``a`` as the outer (slow) factor."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def commutator(a, b):
    """``AB - BA`` for square operands of equal dimension."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def _canonical_basis_gram_schmidt(block):
    """Replace the columns of ``block`` by an orthonormal basis of the same
    span built from the projected canonical basis vectors, in index order."""
    n, k = block.shape
    chosen = []
    for idx in range(n):
        v = block @ block[idx, :].conj()
        for u in chosen:
            v = v - u * np.vdot(u, v)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            chosen.append(v / norm)
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise NumericalError("degenerate eigenspace basis could not be completed")
    return np.column_stack(chosen)


def _fix_phases(vecs):
    # Make the first component carrying at least half the largest magnitude
    # real and positive.
    mags = np.abs(vecs)
    lead = np.argmax(mags >= 0.5 * mags.max(axis=0), axis=0)
    ph = vecs[lead, np.arange(vecs.shape[1])]
    return vecs * (ph.conj() / np.abs(ph))


def hermitian_eig(a):
    """Deterministic eigendecomposition of a Hermitian operator.

    Parameters
    ----------
    a : HermitianMatrix or array_like
        Validated as a :class:`HermitianMatrix` if a raw array is given.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues. Eigenvectors of (numerically) degenerate
        eigenvalues are re-orthonormalized from the canonical basis in index
        order, and every column has a fixed phase, so the output depends only
        on the input matrix.
    """
    h = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
    try:
        w, v = np.linalg.eigh(h.data)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise NumericalError("eigensolver returned non-finite values")

    n = len(w)
    if n > 1:
        gap_tol = DEGENERACY_RTOL * max(1.0, float(np.max(np.abs(w))))
        breaks = np.flatnonzero(np.diff(w) > gap_tol) + 1
        starts = np.concatenate(([0], breaks))
        stops = np.concatenate((breaks, [n]))
        for lo, hi in zip(starts, stops):
            if hi - lo > 1:
                v[:, lo:hi] = _canonical_basis_gram_schmidt(v[:, lo:hi])
                w[lo:hi] = np.mean(w[lo:hi])
    v = _fix_phases(v)
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def trace_norm(a):
    """Sum of singular values."""
    m = as_matrix(a)
    _square(m, "trace_norm operand")
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def operator_norm(a):
    """Largest singular value."""
    m = as_matrix(a)
    return float(np.linalg.svd(m, compute_uv=False)[0])


def propagator(h, t):
    """``exp(-i t H)`` through the cached eigendecomposition of ``H``.

    ``|t| < 1e-15`` returns the identity exactly.
    """
    if not np.isfinite(t):
        raise NumericalError(f"propagator time must be finite, got {t}")
    h = h if isinstance(h, HermitianMatrix) else HermitianMatrix(h)
    if abs(t) < ZERO_TIME:
        return np.eye(h.dim, dtype=np.complex128)
    return h.eig.apply(lambda lam: np.exp(-1j * t * lam))
