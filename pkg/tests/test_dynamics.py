import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purity_witness.dynamics import (
    HamiltonianDecomposition,
    decompose_hamiltonian,
    eigen_weighted_energy_sum,
    energy_variance,
    evolve,
    liouvillian,
    moment,
    purity_derivative_analytic,
    purity_derivative_fd,
    reduced_purity,
    sample_trajectory,
)
from purity_witness.errors import DimensionError, HermiticityError, NumericalError
from purity_witness.kernels import partial_trace as pt
from purity_witness.linalg import HermitianMatrix
from purity_witness.scenarios import commuting_family, remark_family, two_qubit_ising
from purity_witness.states import (
    BipartiteSpace,
    DensityMatrix,
    from_pure,
    product_state,
    random_density,
    random_hermitian,
)

from .conftest import I2, SX, SY, SZ

seeds = st.integers(0, 2**32 - 1)


def instance(seed, ds=2, de=2):
    rng = np.random.default_rng(seed)
    sp = BipartiteSpace(ds, de)
    return random_density(sp.dim, seed=rng), random_hermitian(sp.dim, seed=rng), sp


class TestEvolve:
    def test_zero_time_is_identity(self):
        rho, h, _ = instance(1)
        assert evolve(rho, h, 0.0) is rho
        assert evolve(rho, h, 1e-16) is rho

    def test_qubit_precession(self):
        # |0> under sigma_x: populations cos^2 t, sin^2 t
        rho = evolve(from_pure([1, 0]), SX, 0.3)
        assert rho.data[0, 0].real == pytest.approx(math.cos(0.3) ** 2, abs=1e-14)

    def test_reversible(self):
        rho, h, _ = instance(2, 2, 3)
        back = evolve(evolve(rho, h, 1.7), h, -1.7)
        assert np.allclose(back.data, rho.data, atol=1e-12)

    def test_stationary_state(self):
        h = HermitianMatrix(np.diag([0.0, 1.0, 3.0]))
        rho = DensityMatrix(np.diag([0.2, 0.3, 0.5]))
        assert np.allclose(evolve(rho, h, 5.0).data, rho.data, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            evolve(random_density(3, seed=0), SX, 1.0)

    def test_non_hermitian(self):
        with pytest.raises(HermiticityError):
            evolve(from_pure([1, 0]), [[0, 1], [0, 0]], 1.0)

    @settings(max_examples=30, deadline=None)
    @given(seeds, st.floats(-3, 3))
    def test_spectrum_preserved(self, seed, t):
        rho, h, _ = instance(seed)
        assert np.allclose(np.sort(evolve(rho, h, t).eigenvalues), np.sort(rho.eigenvalues), atol=1e-12)


class TestLiouvillian:
    def test_matches_central_difference(self):
        rho, h, _ = instance(3)
        step = 1e-5
        fd = (evolve(rho, h, step).data - evolve(rho, h, -step).data) / (2 * step)
        assert np.allclose(liouvillian(rho, h), fd, atol=1e-8)

    def test_commuting_is_zero(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]))
        assert np.all(liouvillian(rho, SZ) == 0)


class TestMoments:
    def test_pauli(self):
        rho = from_pure([1, 0])
        assert moment(SZ, rho, 1) == pytest.approx(1)
        assert moment(SX, rho, 1) == pytest.approx(0, abs=1e-15)
        assert moment(SX, rho, 2) == pytest.approx(1)
        assert energy_variance(SX, rho) == pytest.approx(1)
        assert energy_variance(SZ, rho) == pytest.approx(0, abs=1e-15)

    def test_matches_matrix_power(self):
        rho, h, _ = instance(4, 3, 2)
        for k in (1, 2, 3):
            dense = np.trace(np.linalg.matrix_power(h.data, k) @ rho.data).real
            assert moment(h, rho, k) == pytest.approx(dense, rel=1e-12, abs=1e-12)

    def test_remark_family_first_moment(self):
        rho, h = remark_family(10)
        basel_partial = sum(1 / n**2 for n in range(1, 11))
        assert basel_partial == pytest.approx(1.549768, abs=1e-6)
        assert moment(h, rho, 1) * (1 - 2.0**-10) == pytest.approx(basel_partial, rel=1e-12)

    @pytest.mark.parametrize("k", [0, -1, 1.5])
    def test_bad_order(self, k):
        with pytest.raises(ValueError):
            moment(SX, from_pure([1, 0]), k)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_variance_nonnegative(self, seed):
        rho, h, _ = instance(seed, 2, 3)
        assert energy_variance(h, rho) >= 0


class TestPurityDerivative:
    def test_product_state_is_flat(self):
        rho = product_state(random_density(2, seed=1), random_density(3, seed=2))
        h = random_hermitian(6, seed=3)
        assert abs(purity_derivative_analytic(rho, h, BipartiteSpace(2, 3))) < 1e-13

    def test_local_hamiltonian_is_flat(self):
        rho, _, sp = instance(5)
        h = np.kron(random_hermitian(2, seed=1).data, I2) + np.kron(I2, random_hermitian(2, seed=2).data)
        assert abs(purity_derivative_analytic(rho, h, sp)) < 1e-13

    def test_ising_eighth_period(self):
        _, h, sp, closed = two_qubit_ising()
        assert purity_derivative_analytic(closed.state(np.pi / 8), h, sp) == pytest.approx(-1, abs=1e-12)

    def test_dense_formula(self):
        rho, h, sp = instance(6, 3, 2)
        rho_s = pt(rho.data, 3, 2, "E")
        dense = -2j * np.trace(np.kron(rho_s, np.eye(2)) @ (h.data @ rho.data - rho.data @ h.data))
        assert purity_derivative_analytic(rho, h, sp) == pytest.approx(dense.real, abs=1e-13)

    def test_backends_agree(self, backend):
        rho, h, sp = instance(7, 2, 3)
        ref = purity_derivative_analytic(rho, h, sp, backend="python")
        assert purity_derivative_analytic(rho, h, sp, backend=backend) == pytest.approx(ref, abs=1e-14)

    def test_imaginary_residue_rejected(self):
        rho, _, sp = instance(8)
        h = HermitianMatrix._trusted(np.kron(SX, SY) + 1j * np.kron(SZ, SX))
        with pytest.raises(NumericalError):
            purity_derivative_analytic(rho, h, sp)

    def test_space_mismatch(self):
        rho, h, _ = instance(9)
        with pytest.raises(DimensionError):
            purity_derivative_analytic(rho, h, BipartiteSpace(3, 2))

    def test_finite_difference_agrees(self):
        rho, h, sp = instance(10, 2, 2)
        assert purity_derivative_fd(rho, h, sp) == pytest.approx(
            purity_derivative_analytic(rho, h, sp), abs=1e-8
        )

    def test_finite_difference_away_from_zero(self):
        rho, h, sp = instance(11, 2, 2)
        t = 0.4
        assert purity_derivative_fd(rho, h, sp, t=t) == pytest.approx(
            purity_derivative_analytic(evolve(rho, h, t), h, sp), abs=1e-8
        )

    def test_bad_step(self):
        rho, h, sp = instance(12)
        with pytest.raises(ValueError):
            purity_derivative_fd(rho, h, sp, step=0)

    def test_reduced_purity_ising(self):
        _, _, sp, closed = two_qubit_ising()
        assert reduced_purity(closed.state(np.pi / 8), sp) == pytest.approx(0.75, abs=1e-15)


class TestDecomposition:
    def test_canonical_parts(self):
        sp = BipartiteSpace(2, 2)
        a, b = random_hermitian(2, seed=1).data, random_hermitian(2, seed=2).data
        inter = np.kron(SX, SX) + 0.3 * np.kron(SY, SZ)
        h = np.kron(a, I2) + np.kron(I2, b) + inter
        d = decompose_hamiltonian(h, sp)
        assert np.allclose(d.h_int.data, inter, atol=1e-14)
        assert np.trace(d.h_s.data).real / 2 == pytest.approx(np.trace(d.h_e.data).real / 2, abs=1e-14)
        # local parts are unique up to moving a multiple of the identity between S and E
        assert np.allclose(np.kron(d.h_s.data, I2) + np.kron(I2, d.h_e.data),
                           np.kron(a, I2) + np.kron(I2, b), atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(1, 3), st.integers(1, 3))
    def test_round_trip_and_traceless_marginals(self, seed, ds, de):
        sp = BipartiteSpace(ds, de)
        h = random_hermitian(sp.dim, seed=seed)
        d = decompose_hamiltonian(h, sp)
        recon = np.kron(d.h_s.data, np.eye(de)) + np.kron(np.eye(ds), d.h_e.data) + d.h_int.data
        assert np.allclose(recon, h.data, atol=1e-13)
        assert d.residual <= 1e-10 * max(1.0, np.abs(h.data).max())
        assert np.allclose(pt(d.h_int.data, ds, de, "E"), 0, atol=1e-13)
        assert np.allclose(pt(d.h_int.data, ds, de, "S"), 0, atol=1e-13)

    def test_from_parts(self):
        d = HamiltonianDecomposition.from_parts(SZ, SZ, np.kron(SX, SX))
        assert np.allclose(d.h_total.data, np.kron(SZ, I2) + np.kron(I2, SZ) + np.kron(SX, SX))

    def test_from_parts_inconsistent_total(self):
        with pytest.raises(NumericalError):
            HamiltonianDecomposition.from_parts(SZ, SZ, np.kron(SX, SX), h_total=np.eye(4))

    def test_from_parts_dimension(self):
        with pytest.raises(DimensionError):
            HamiltonianDecomposition.from_parts(SZ, SZ, np.eye(3))


class TestEigenWeightedSum:
    def test_commuting_family_oracle(self):
        # H = rho^(-1/2) so p_k ||H e_k|| = sqrt(p_k) = sqrt(c) / k
        n = 50
        rho, h = commuting_family(n)
        c = 1 / sum(1 / k**2 for k in range(1, n + 1))
        harmonic = sum(1 / k for k in range(1, n + 1))
        assert eigen_weighted_energy_sum(h, rho) == pytest.approx(math.sqrt(c) * harmonic, rel=1e-12)

    def test_pure_state(self):
        rho, h, _ = instance(13)
        psi = from_pure([1, 0, 0, 0])
        assert eigen_weighted_energy_sum(h, psi) == pytest.approx(np.linalg.norm(h.data[:, 0]), rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_between_first_absolute_and_second_moment(self, seed):
        rho, h, _ = instance(seed, 2, 3)
        s = eigen_weighted_energy_sum(h, rho)
        assert s <= math.sqrt(moment(h, rho, 2)) * (1 + 1e-12) + 1e-15


class TestTrajectory:
    def test_ising_columns(self):
        rho0, h, sp, closed = two_qubit_ising()
        times = np.linspace(0, np.pi / 2, 11)
        traj = sample_trajectory(rho0, decompose_hamiltonian(h, sp), sp, times)
        assert np.allclose(traj.column("purity_s"), closed.purity_s(times), atol=1e-12)
        assert np.allclose(traj.column("dpurity_analytic"), closed.dpurity_dt(times), atol=1e-12)
        assert np.allclose(traj.column("purity_s"), traj.column("purity_e"), atol=1e-12)
        assert traj.records[0].is_product
        assert traj.records[0].witness == "inconclusive"

    def test_times_validated(self):
        rho0, h, sp, _ = two_qubit_ising()
        d = decompose_hamiltonian(h, sp)
        for bad in ([], [0.0, 0.0], [1.0, 0.5]):
            with pytest.raises(ValueError):
                sample_trajectory(rho0, d, sp, bad)

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_moments_conserved(self, seed):
        rho, h, sp = instance(seed, 2, 2)
        scale = max(1.0, math.sqrt(moment(h, rho, 2)))
        ref = [moment(h, rho, 1), moment(h, rho, 2), energy_variance(h, rho)]
        for t in (0.5, 2.0, 10.0):
            r = evolve(rho, h, t)
            got = [moment(h, r, 1), moment(h, r, 2), energy_variance(h, r)]
            assert np.allclose(got, ref, atol=1e-9 * scale, rtol=0)
