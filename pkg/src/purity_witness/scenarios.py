"""Named constructions and truncation studies.

Two truncation families approximate unbounded-Hamiltonian constructions by
block-diagonal ``(rho, H)`` pairs indexed by a block count ``N``:

``remark_family``
    ``rho = (+)_n 2^-n E_11`` and ``H = (+)_n 2^n M_n`` with 2x2 blocks
    ``M_n = [[1/n^2, b_n], [b_n, 1 - 1/n^2]]``, ``b_n = sqrt(1 - 1/n^2) / n``.
    The first moment of ``H`` converges while ``||[H, rho]||_1`` and the
    second moment diverge.
``commuting_family``
    ``rho = diag(c / k^2)`` and ``H = rho^(-1/2)``. The commutator vanishes
    identically while ``sum_k p_k ||H e_k||`` diverges logarithmically.

The powers of two in the remark family leave double range long before
``N = 10^4``, so both families are held as :class:`BlockPair` objects that
keep a binary exponent per block. Products such as ``H_n rho_n`` then cancel
the exponents exactly and the diagnostics stay finite.
"""

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np
from scipy.linalg import block_diag

from .errors import HermiticityError, NumericalError, StateError
from .linalg import HERMITIAN_RTOL, HermitianMatrix
from .states import PSD_TOL, TRACE_TOL, BipartiteSpace, DensityMatrix, from_pure, von_neumann_entropy

MAX_DENSE_REMARK_BLOCKS = 1000
DIAGNOSTICS = ("m1", "m2", "commutator_trace_norm", "eigen_weighted_energy_sum", "derivative")
CONVERGENT_RTOL = 1e-3
LOGARITHMIC_RTOL = 0.05

__all__ = [
    "BlockPair",
    "ConvergenceReport",
    "FAMILIES",
    "Growth",
    "IsingClosedForms",
    "TruncationFamily",
    "classify_growth",
    "commuting_blocks",
    "commuting_family",
    "remark_blocks",
    "remark_family",
    "truncation_study",
    "two_qubit_ising",
]


def _scaled_sum(values, exponents, scale=1.0):
    """``scale * sum(values * 2**exponents)`` as a float, or as a 17-digit
    :class:`~decimal.Decimal` when the result exceeds double range."""
    values = np.asarray(values, dtype=float)
    exponents = np.asarray(exponents, dtype=np.int64)
    if exponents.size == 0:
        return 0.0
    top = int(exponents.max())
    if top < 900:
        return math.fsum(np.ldexp(values, exponents)) * scale
    with localcontext() as ctx:
        ctx.prec = 40
        two = Decimal(2)
        total = sum(
            (Decimal(float(v)) * two ** int(e) for v, e in zip(values, exponents) if v != 0.0),
            Decimal(0),
        ) * Decimal(scale)
        if abs(total) < Decimal("1e300"):
            return float(total)
        ctx.prec = 17
        return +total


@dataclass(frozen=True)
class BlockPair:
    """Block-diagonal ``rho`` and ``H`` with aligned ``k x k`` blocks.

    Block ``n`` of ``rho`` is ``rho_scale * 2**rho_exp[n] * rho_mant[n]`` and
    block ``n`` of ``H`` is ``2**h_exp[n] * h_mant[n]``.
    """

    rho_mant: np.ndarray
    rho_exp: np.ndarray
    h_mant: np.ndarray
    h_exp: np.ndarray
    rho_scale: float = 1.0

    @property
    def blocks(self):
        return self.rho_mant.shape[0]

    @property
    def dim(self):
        return self.rho_mant.shape[0] * self.rho_mant.shape[1]

    def trace(self):
        tr = np.einsum("nii->n", self.rho_mant).real
        return _scaled_sum(tr, self.rho_exp, self.rho_scale)

    def validate(self, unit_trace=True):
        """Block-wise Hermitian and density-matrix checks, same tolerances as
        :class:`HermitianMatrix` and :class:`DensityMatrix`."""
        for name, mant in (("H", self.h_mant), ("rho", self.rho_mant)):
            defect = np.max(np.abs(mant - np.conj(np.swapaxes(mant, 1, 2))), axis=(1, 2))
            scale = np.maximum(1.0, np.max(np.abs(mant), axis=(1, 2)))
            if np.any(defect > HERMITIAN_RTOL * scale):
                raise HermiticityError(f"{name} block is not Hermitian")
            if not np.all(np.isfinite(mant)):
                raise NumericalError(f"{name} block has non-finite entries")
        lowest = np.linalg.eigvalsh(self.rho_mant)[:, 0]
        if np.any(np.ldexp(lowest, self.rho_exp) * self.rho_scale < -PSD_TOL):
            raise StateError("rho block has a negative eigenvalue")
        if unit_trace and abs(self.trace() - 1.0) > TRACE_TOL:
            raise StateError(f"rho trace is {self.trace()!r}, expected 1")

    def dense(self):
        """Materialize as ``(DensityMatrix, HermitianMatrix)``."""
        if self.h_exp.max() > 1000 or self.rho_exp.min() < -1000:
            raise NumericalError("block scales exceed double range; use the block diagnostics")
        rho = block_diag(*np.ldexp(1.0, self.rho_exp)[:, None, None] * self.rho_mant) * self.rho_scale
        h = block_diag(*np.ldexp(1.0, self.h_exp)[:, None, None] * self.h_mant)
        return DensityMatrix(rho), HermitianMatrix(h)

    def diagnostics(self):
        """``m1, m2, ||[H, rho]||_1, sum_k p_k ||H e_k||`` and the purity rate
        against a trivial environment, evaluated block by block."""
        r, h, s = self.rho_mant, self.h_mant, self.rho_scale
        hr = h @ r
        m1 = _scaled_sum(np.einsum("nii->n", hr).real, self.h_exp + self.rho_exp, s)
        m2 = _scaled_sum(np.einsum("nii->n", h @ hr).real, 2 * self.h_exp + self.rho_exp, s)
        comm = hr - r @ h
        comm_norm = _scaled_sum(
            np.linalg.svd(comm, compute_uv=False).sum(axis=1), self.h_exp + self.rho_exp, s
        )
        lam, vec = np.linalg.eigh(r)
        he_norm = np.linalg.norm(h @ vec, axis=1)
        ew = _scaled_sum((np.clip(lam, 0.0, None) * he_norm).sum(axis=1), self.h_exp + self.rho_exp, s)
        # -2i Tr(rho [H, rho]) per block; vanishes by cyclicity of the trace.
        rate = -2j * np.einsum("nij,nji->n", r, comm)
        derivative = _scaled_sum(rate.real, self.h_exp + 2 * self.rho_exp, s * s)
        return {
            "m1": m1,
            "m2": m2,
            "commutator_trace_norm": comm_norm,
            "eigen_weighted_energy_sum": ew,
            "derivative": derivative,
        }


def _check_blocks(n, limit=None):
    if int(n) != n or n < 1:
        raise ValueError(f"block count must be a positive integer, got {n!r}")
    if limit is not None and n > limit:
        raise ValueError(f"block count {n} exceeds the dense limit {limit}")
    return int(n)


def remark_blocks(n_blocks, renormalize=True):
    """Block form of the diverging-commutator family.

    With ``renormalize=False`` the weights are the untruncated ``2^-n`` and
    the trace is ``1 - 2^-N``.
    """
    n_blocks = _check_blocks(n_blocks)
    n = np.arange(1, n_blocks + 1, dtype=float)
    off = np.sqrt(1.0 - 1.0 / n**2) / n
    h = np.zeros((n_blocks, 2, 2), dtype=np.complex128)
    h[:, 0, 0] = 1.0 / n**2
    h[:, 0, 1] = h[:, 1, 0] = off
    h[:, 1, 1] = 1.0 - 1.0 / n**2
    r = np.zeros((n_blocks, 2, 2), dtype=np.complex128)
    r[:, 0, 0] = 1.0
    exps = np.arange(1, n_blocks + 1, dtype=np.int64)
    scale = 1.0 / -math.expm1(-n_blocks * math.log(2.0)) if renormalize else 1.0
    return BlockPair(r, -exps, h, exps, scale)


def commuting_blocks(n_blocks, renormalize=True):
    """Block form of the commuting family ``H = rho^(-1/2)``.

    With ``renormalize=False`` the weights are the untruncated
    ``6 / (pi^2 k^2)`` and ``H`` is the untruncated ``pi k / sqrt(6)``.
    """
    n_blocks = _check_blocks(n_blocks)
    k = np.arange(1, n_blocks + 1, dtype=float)
    if renormalize:
        p = (1.0 / k**2) / math.fsum(1.0 / k**2)
    else:
        p = 6.0 / (math.pi**2 * k**2)
    zeros = np.zeros(n_blocks, dtype=np.int64)
    r = p.astype(np.complex128).reshape(-1, 1, 1)
    h = (1.0 / np.sqrt(p)).astype(np.complex128).reshape(-1, 1, 1)
    return BlockPair(r, zeros, h, zeros.copy(), 1.0)


def remark_family(n_blocks):
    """Dense ``(rho, H)`` of the remark family, dimension ``2N``, ``N <= 1000``."""
    n_blocks = _check_blocks(n_blocks, MAX_DENSE_REMARK_BLOCKS)
    return remark_blocks(n_blocks).dense()


def commuting_family(n_blocks):
    """Dense ``(rho, H)`` of the commuting family, dimension ``N``."""
    return commuting_blocks(_check_blocks(n_blocks)).dense()


@dataclass(frozen=True)
class TruncationFamily:
    name: str
    generator: object
    raw_generator: object
    diagnostics: tuple = DIAGNOSTICS


FAMILIES = {
    "remark_family": TruncationFamily(
        "remark_family",
        remark_blocks,
        lambda n: remark_blocks(n, renormalize=False),
    ),
    "commuting_family": TruncationFamily(
        "commuting_family",
        commuting_blocks,
        lambda n: commuting_blocks(n, renormalize=False),
    ),
}


@dataclass(frozen=True)
class Growth:
    kind: str
    parameter: float

    def __str__(self):
        return f"{self.kind}({self.parameter!r})"


def _to_decimal(v):
    return v if isinstance(v, Decimal) else Decimal(float(v))


def _log(v):
    d = abs(_to_decimal(v))
    if d == 0:
        return -math.inf
    with localcontext() as ctx:
        ctx.prec = 30
        return float(d.ln())


def _lstsq_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def classify_growth(levels, values):
    """Classify a diagnostic sequence as convergent, logarithmic or power-law.

    * convergent(limit): the last two values differ by less than 0.1%
      relative; the limit is the last value.
    * logarithmic(increment per decade): at least three levels and every
      per-decade increment within 5% of the last one; the reported increment
      is the least-squares slope against ``log10 N`` over the last half of
      the levels.
    * divergent-power(exponent): otherwise; least-squares slope of
      ``ln|v|`` against ``ln N`` over the last half of the levels.
    """
    levels = [int(n) for n in levels]
    if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("need at least two strictly increasing levels")
    if len(values) != len(levels):
        raise ValueError("one value per level required")
    dec = [_to_decimal(v) for v in values]
    last, prev = dec[-1], dec[-2]
    if last == prev:
        return Growth("convergent", float(last))
    if last != 0 and abs(last - prev) / abs(last) < Decimal(CONVERGENT_RTOL):
        return Growth("convergent", float(last))

    half = len(levels) - max(2, (len(levels) + 1) // 2)
    tail = slice(half, None)
    if len(levels) >= 3:
        incs = [
            (dec[i + 1] - dec[i]) / Decimal(math.log10(levels[i + 1] / levels[i]))
            for i in range(len(levels) - 1)
        ]
        ref = incs[-1]
        if ref != 0 and all(abs(d - ref) <= Decimal(LOGARITHMIC_RTOL) * abs(ref) for d in incs):
            slope = _lstsq_slope(np.log10(levels[tail]), [float(v) for v in dec[tail]])
            return Growth("logarithmic", slope)
    slope = _lstsq_slope(np.log(levels[tail]), [_log(v) for v in dec[tail]])
    return Growth("divergent-power", slope)


@dataclass(frozen=True)
class ConvergenceReport:
    family: str
    levels: tuple
    values: dict
    raw_values: dict
    growth: dict = field(default_factory=dict)
    raw_growth: dict = field(default_factory=dict)

    def rows(self):
        for i, n in enumerate(self.levels):
            yield n, {k: v[i] for k, v in self.values.items()}


def truncation_study(family, levels):
    """Evaluate every diagnostic of ``family`` at each level and classify growth.

    ``family`` is a :class:`TruncationFamily` or one of the names in
    :data:`FAMILIES`. Both the renormalized (valid state) and untruncated
    weight versions are evaluated.
    """
    if isinstance(family, str):
        try:
            family = FAMILIES[family]
        except KeyError:
            raise ValueError(f"unknown truncation family {family!r}") from None
    levels = tuple(int(n) for n in levels)
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    values = {name: [] for name in family.diagnostics}
    raw = {name: [] for name in family.diagnostics}
    for n in levels:
        pair = family.generator(n)
        pair.validate()
        for name, v in pair.diagnostics().items():
            values[name].append(v)
        raw_pair = family.raw_generator(n)
        raw_pair.validate(unit_trace=False)
        for name, v in raw_pair.diagnostics().items():
            raw[name].append(v)
    growth, raw_growth = {}, {}
    if len(levels) >= 2:
        growth = {k: classify_growth(levels, v) for k, v in values.items()}
        raw_growth = {k: classify_growth(levels, v) for k, v in raw.items()}
    return ConvergenceReport(family.name, levels, values, raw, growth, raw_growth)


@dataclass(frozen=True)
class IsingClosedForms:
    """Exact reduced quantities for ``|00>`` evolving under ``sigma_x (x) sigma_x``."""

    @staticmethod
    def purity_s(t):
        return 1.0 - 0.5 * np.sin(2 * t) ** 2

    @staticmethod
    def dpurity_dt(t):
        return -np.sin(4 * t)

    @staticmethod
    def mutual_info(t):
        c2 = np.cos(t) ** 2
        return 2.0 * von_neumann_entropy(DensityMatrix(np.diag([c2, 1.0 - c2])))

    @staticmethod
    def state(t):
        psi = np.zeros(4, dtype=np.complex128)
        psi[0] = np.cos(t)
        psi[3] = -1j * np.sin(t)
        return from_pure(psi)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def two_qubit_ising():
    """``(rho0, H, space, closed_forms)`` for ``|00>`` under ``sigma_x (x) sigma_x``."""
    rho0 = from_pure([1, 0, 0, 0])
    h = HermitianMatrix(np.kron(SIGMA_X, SIGMA_X))
    return rho0, h, BipartiteSpace(2, 2), IsingClosedForms()

