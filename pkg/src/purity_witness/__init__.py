"""Reduced-purity dynamics of finite-dimensional bipartite quantum systems.

The rate of change of the purity ``Tr rho_S^2`` of a subsystem vanishes
whenever the joint state is a product state, so a non-zero rate certifies
correlations with the environment. This package evaluates that rate, its
upper bounds, and the witness built on it, and runs the truncation studies
for two unbounded-Hamiltonian constructions.
"""

from .dynamics import (
    HamiltonianDecomposition,
    Trajectory,
    decompose_hamiltonian,
    eigen_weighted_energy_sum,
    energy_variance,
    evolve,
    liouvillian,
    moment,
    purity_derivative_analytic,
    purity_derivative_fd,
    sample_trajectory,
)
from .errors import (
    ConfigError,
    DimensionError,
    HermiticityError,
    InvariantViolation,
    NumericalError,
    PurityWitnessError,
    StateError,
)
from .kernels import BACKEND
from .linalg import (
    HermitianMatrix,
    SpectralDecomposition,
    commutator,
    hermitian_eig,
    operator_norm,
    propagator,
    tensor_product,
    trace_norm,
)
from .scenarios import (
    commuting_family,
    remark_family,
    truncation_study,
    two_qubit_ising,
)
from .states import (
    BipartiteSpace,
    DensityMatrix,
    from_pure,
    is_product,
    mutual_information,
    partial_trace,
    product_state,
    purity,
    random_density,
    random_hermitian,
    renyi_entropy,
    von_neumann_entropy,
)
from .witness import (
    bound_interaction,
    bound_second_moment,
    check_product_flat,
    correlation_witness,
    intermediate_bound,
)

__version__ = "0.1.0"
