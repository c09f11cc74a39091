import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purity_witness.dynamics import decompose_hamiltonian, moment, purity_derivative_analytic
from purity_witness.scenarios import two_qubit_ising
from purity_witness.states import (
    BipartiteSpace,
    DensityMatrix,
    from_pure,
    is_product,
    mutual_information,
    random_density,
    random_hermitian,
)
from purity_witness.witness import (
    CORRELATED,
    INCONCLUSIVE,
    bound_interaction,
    bound_second_moment,
    check_product_flat,
    correlation_witness,
    flatness_report,
    intermediate_bound,
)

from .conftest import SX, SZ

seeds = st.integers(0, 2**32 - 1)
Q = BipartiteSpace(2, 2)
XX = np.kron(SX, SX)
CLASSICAL = DensityMatrix(np.diag([0.5, 0, 0, 0.5]))


class TestBounds:
    def test_second_moment_pure_basis(self):
        # (XX)^2 = I so m2 = 1
        assert bound_second_moment(from_pure([1, 0, 0, 0]), XX) == pytest.approx(4)

    def test_interaction_bell(self):
        bell = from_pure([1, 0, 0, 1])
        d = decompose_hamiltonian(XX, Q)
        assert bound_interaction(bell, d, Q) == pytest.approx(4 * math.sqrt(2) * math.sqrt(2 * math.log(2)))

    def test_interaction_vanishes_for_local_hamiltonian(self):
        h = np.kron(SZ, np.eye(2)) + np.kron(np.eye(2), SX)
        d = decompose_hamiltonian(h, Q)
        assert d.h_int.op_norm < 1e-14
        assert bound_interaction(from_pure([1, 0, 0, 1]), d, Q) < 1e-13

    def test_intermediate_pure(self):
        h = random_hermitian(4, seed=0)
        psi = from_pure([0, 1, 0, 0])
        assert intermediate_bound(psi, h) == pytest.approx(4 * np.linalg.norm(h.data[:, 1]), rel=1e-14)

    def test_ising_eighth_period(self):
        _, h, sp, closed = two_qubit_ising()
        rho = closed.state(np.pi / 8)
        d = purity_derivative_analytic(rho, h, sp)
        assert abs(d) <= bound_second_moment(rho, h)
        assert abs(d) <= bound_interaction(rho, decompose_hamiltonian(h, sp), sp)
        assert bound_interaction(rho, decompose_hamiltonian(h, sp), sp) == pytest.approx(
            4 * math.sqrt(2) * math.sqrt(closed.mutual_info(np.pi / 8)), rel=1e-12
        )

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(1, 3), st.integers(1, 3))
    def test_chain(self, seed, ds, de):
        rng = np.random.default_rng(seed)
        sp = BipartiteSpace(ds, de)
        rho = random_density(sp.dim, int(rng.integers(1, sp.dim + 1)), rng)
        h = random_hermitian(sp.dim, float(rng.uniform(0.1, 10)), rng)
        d = abs(purity_derivative_analytic(rho, h, sp))
        tol = 1e-9 * max(1.0, math.sqrt(moment(h, rho, 2)))
        mid = intermediate_bound(rho, h)
        assert d <= mid + tol
        assert mid <= bound_second_moment(rho, h) + tol
        assert d <= bound_interaction(rho, decompose_hamiltonian(h, sp), sp) + tol


class TestWitness:
    def test_ising_correlated(self):
        _, h, sp, closed = two_qubit_ising()
        v = correlation_witness(closed.state(np.pi / 8), h, sp)
        assert v.verdict == CORRELATED and v.correlated
        assert v.derivative == pytest.approx(-1, abs=1e-12)
        assert v.bound_m2 == pytest.approx(4)

    def test_classical_correlations_are_inconclusive(self):
        v = correlation_witness(CLASSICAL, XX, Q)
        assert not is_product(CLASSICAL, Q, 1e-8)
        assert mutual_information(CLASSICAL, Q) == pytest.approx(math.log(2))
        assert abs(v.derivative) <= 1e-10
        assert v.verdict == INCONCLUSIVE

    def test_product_inconclusive(self):
        v = correlation_witness(from_pure([1, 0, 0, 0]), XX, Q)
        assert v.derivative == 0.0
        assert v.verdict == INCONCLUSIVE

    def test_threshold_floor_scales_with_energy(self):
        rho = from_pure([1, 0, 0, 0])
        v = correlation_witness(rho, 1e6 * XX, Q, threshold=1e-12)
        assert v.threshold == pytest.approx(1e-8 * 1e6)

    def test_user_threshold_above_floor(self):
        _, h, sp, closed = two_qubit_ising()
        v = correlation_witness(closed.state(np.pi / 8), h, sp, threshold=2.0)
        assert v.threshold == 2.0
        assert v.verdict == INCONCLUSIVE

    def test_threshold_positive(self):
        with pytest.raises(ValueError):
            correlation_witness(CLASSICAL, XX, Q, threshold=0)

    def test_accepts_decomposition(self):
        _, h, sp, closed = two_qubit_ising()
        rho = closed.state(0.3)
        a = correlation_witness(rho, h, sp)
        b = correlation_witness(rho, decompose_hamiltonian(h, sp), sp)
        assert a == b

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_verdicts_are_binary(self, seed):
        rng = np.random.default_rng(seed)
        v = correlation_witness(random_density(4, seed=rng), random_hermitian(4, seed=rng), Q)
        assert v.verdict in (CORRELATED, INCONCLUSIVE)
        if v.verdict == CORRELATED:
            assert abs(v.derivative) > v.threshold


class TestFlatness:
    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_products_are_flat(self, seed, ds, de):
        rng = np.random.default_rng(seed)
        sp = BipartiteSpace(ds, de)
        rs = random_density(ds, int(rng.integers(1, ds + 1)), rng)
        re = random_density(de, int(rng.integers(1, de + 1)), rng)
        h = random_hermitian(sp.dim, 10 ** rng.uniform(-1, 2), rng)
        report = check_product_flat(rs, re, h, sp)
        assert report.is_flat
        assert report.product_defect < 1e-12

    def test_perturbed_mixture_is_not_flat(self):
        # real states under a real H have a vanishing rate, so mix in
        # an Ising-evolved state carrying an imaginary coherence
        _, h, _, closed = two_qubit_ising()
        eps = 0.1
        rho = DensityMatrix((1 - eps) * np.diag([1.0, 0, 0, 0]) + eps * closed.state(np.pi / 8).data)
        report = flatness_report(rho, h, Q)
        assert report.product_defect > 1e-3
        assert not report.is_flat

    def test_flat_does_not_imply_product(self):
        report = flatness_report(CLASSICAL, XX, Q)
        assert report.is_flat
        assert report.product_defect == pytest.approx(1.0)
