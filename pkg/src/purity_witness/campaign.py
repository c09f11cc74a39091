"""Seeded random instances for the randomized bound and flatness campaigns."""

from dataclasses import dataclass

import numpy as np

from .dynamics import decompose_hamiltonian, moment, purity_derivative_analytic
from .linalg import HermitianMatrix
from .states import DensityMatrix, product_defect, product_state, random_density, random_hermitian
from .witness import (
    BOUND_RTOL,
    FLATNESS_RTOL,
    bound_interaction,
    bound_second_moment,
    intermediate_bound,
)

MODES = ("product", "general")
PRODUCT_TOL = 1e-8

__all__ = ["InstanceResult", "evaluate_instance", "random_instance"]


def random_instance(seed, space, mode="general", max_norm=100.0):
    """Build ``(rho, H)`` from an integer seed.

    ``H`` is a GUE sample rescaled to an operator norm drawn log-uniformly
    from ``[0.1, max_norm]``. In ``"product"`` mode ``rho = rho_S (x) rho_E``
    with independently drawn ranks; in ``"general"`` mode ``rho`` is a joint
    state of random rank.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    rng = np.random.default_rng(seed)
    if mode == "product":
        rho_s = random_density(space.dim_s, int(rng.integers(1, space.dim_s + 1)), rng)
        rho_e = random_density(space.dim_e, int(rng.integers(1, space.dim_e + 1)), rng)
        rho = product_state(rho_s, rho_e)
    else:
        rho = random_density(space.dim, int(rng.integers(1, space.dim + 1)), rng)
    h = random_hermitian(space.dim, 1.0, rng)
    target = 10.0 ** rng.uniform(-1.0, np.log10(max_norm))
    h = HermitianMatrix._trusted(h.data * (target / h.op_norm))
    return rho, h


@dataclass(frozen=True)
class InstanceResult:
    derivative: float
    bound_qe: float
    bound_m2: float
    intermediate_bound: float
    product_defect: float
    scale: float

    @property
    def tolerance(self):
        return BOUND_RTOL * self.scale

    @property
    def theorem4_pass(self):
        """The flatness implication holds: not a product state, or a flat rate."""
        if self.product_defect > PRODUCT_TOL:
            return True
        return abs(self.derivative) <= FLATNESS_RTOL * self.scale

    def violations(self):
        """Amounts by which the rate exceeds each bound (<= 0 means satisfied)."""
        d = abs(self.derivative)
        return {
            "bound_qe": d - self.bound_qe,
            "bound_m2": d - self.bound_m2,
            "intermediate_bound": d - self.intermediate_bound,
            "chain": self.intermediate_bound - self.bound_m2,
        }

    def ok(self):
        return self.theorem4_pass and all(v <= self.tolerance for v in self.violations().values())


def evaluate_instance(rho: DensityMatrix, h: HermitianMatrix, space) -> InstanceResult:
    decomp = decompose_hamiltonian(h, space)
    return InstanceResult(
        derivative=purity_derivative_analytic(rho, h, space),
        bound_qe=float(bound_interaction(rho, decomp, space)),
        bound_m2=float(bound_second_moment(rho, h)),
        intermediate_bound=float(intermediate_bound(rho, h)),
        product_defect=product_defect(rho, space),
        scale=max(1.0, float(np.sqrt(max(moment(h, rho, 2), 0.0)))),
    )
