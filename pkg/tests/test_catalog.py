import itertools

import numpy as np
import pytest

from mumkit.catalog import (
    CdParams,
    TowerSpec,
    cd_special,
    gen_pauli,
    h4,
    h5,
    h6,
    heisenberg_weyl,
    kuznetsov5,
    pauli_tower,
    spectral_projectors,
    standard_mub_pair,
    tower_to_measurements,
)
from mumkit.linalg import identity, is_unitary, matrix_power
from mumkit.mum import direct_sum_test, from_block_hadamard, verify_mub_pair, verify_mum_conditions, verify_unitary_hadamard
from mumkit.quaternion import ONE, I, J, K, Quaternion, autocorrelation, dephase, has_noncommuting_pair, is_q_hadamard
from mumkit.sdc import gram_matrix, verify_orthogonal_unitary_basis

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def max_dev(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


class TestBlockMatrices:
    def test_known_entries(self):
        assert max_dev(h4().block(3, 2), 1j * Y) == 0
        assert max_dev(h5().block(2, 5), -1j * Y) == 0
        assert max_dev(h6().block(5, 4), -1j * Y) == 0

    def test_h4_first_nontrivial(self):
        assert max_dev(h4().block(2, 2), 2j / 3 * (Z - Y) - identity(2) / 3) <= 1e-15

    @pytest.mark.parametrize("make", [h4, h5, h6])
    def test_hadamard_and_dephased(self, make):
        h = make()
        rep = verify_unitary_hadamard(h, 1e-12)
        assert rep.passed and rep.max_violation <= 1e-12
        assert h.is_dephased()

    @pytest.mark.parametrize("make", [h4, h5, h6])
    def test_not_direct_sum(self, make):
        assert not direct_sum_test(from_block_hadamard(make()))[0]


class TestSpecialFamily:
    def test_real_case(self):
        m = cd_special(CdParams(1, 0, 1, 0))
        assert np.allclose(m.data[:, :, 1:], 0)
        assert set(np.round(m.data[:, :, 0].ravel()).astype(int)) == {-1, 1}
        assert m[2, 2] == -ONE and m[3, 3] == ONE

    def test_i_j(self):
        m = cd_special(CdParams(0, 1, 0, 1))
        assert m[2, 2].isclose(-0.5 * (ONE + I + J - K))

    def test_sampled_parameters(self):
        rng = np.random.default_rng(0)
        for alpha, beta in rng.uniform(0, 2 * np.pi, size=(25, 2)):
            assert is_q_hadamard(cd_special(CdParams.from_angles(alpha, beta)))

    def test_non_real_parameters_do_not_commute(self):
        m = cd_special(CdParams.from_angles(0.8, 2.1))
        assert has_noncommuting_pair(dephase(m))[0]

    def test_real_a_commutes(self):
        assert not has_noncommuting_pair(dephase(cd_special(CdParams.from_angles(0.0, 2.1))))[0]

    def test_non_unit(self):
        with pytest.raises(ValueError):
            CdParams(1, 1, 1, 0)


class TestSequence:
    def test_terms(self):
        seq = kuznetsov5()
        assert len(seq) == 5
        assert seq.terms[4].isclose(Quaternion(-0.5, 0.5, -0.5, -0.5))
        assert seq.terms[1] == J

    def test_autocorrelation(self):
        seq = kuznetsov5()
        assert autocorrelation(seq, 0).isclose(Quaternion(5.0))
        assert autocorrelation(seq, 2).norm() <= 1e-12
        assert seq.is_perfect()


class TestPaulis:
    def test_d2(self):
        z, x = gen_pauli(2)
        assert np.allclose(z, np.diag([-1, 1]))
        assert np.allclose(x, X)

    def test_order(self):
        for d in (3, 5):
            z, x = gen_pauli(d)
            assert max_dev(matrix_power(x, d), identity(d)) <= 1e-12
            assert max_dev(matrix_power(z, d), identity(d)) <= 1e-12
            assert is_unitary(z) and is_unitary(x)

    def test_commutation(self):
        z, x = gen_pauli(4)
        assert max_dev(z @ x, 1j * x @ z) <= 1e-12

    def test_too_small(self):
        with pytest.raises(ValueError):
            gen_pauli(1)


class TestStandardPair:
    def test_d2(self):
        P, Q = standard_mub_pair(2)
        assert np.allclose(P[0], np.diag([1, 0]))
        assert np.allclose(Q[1], np.full((2, 2), 0.5))
        assert np.allclose(Q[0], [[0.5, -0.5], [-0.5, 0.5]])

    def test_d5_overlaps(self):
        P, Q = standard_mub_pair(5)
        overlaps = np.array([[np.trace(p @ q) for q in Q] for p in P])
        assert max_dev(overlaps, 0.2) <= 1e-12
        assert verify_mub_pair(P, Q)

    def test_d4_mum(self):
        assert verify_mum_conditions(*standard_mub_pair(4)).passed

    def test_eigenbases(self):
        # P from Z_d, Q from X_d
        z, x = gen_pauli(3)
        P, Q = standard_mub_pair(3)
        for p in P:
            assert max_dev(z @ p, p @ z) <= 1e-12
        for q in Q:
            assert max_dev(x @ q, q @ x) <= 1e-12


class TestTower:
    def test_d2_n2(self):
        a1, a2 = pauli_tower(TowerSpec(2, 2))
        z, x = gen_pauli(2)
        assert max_dev(a1, np.kron(z, identity(2))) == 0
        assert max_dev(a2, np.kron(x, z)) == 0
        assert max_dev(a1 @ a2, -a2 @ a1) <= 1e-12

    def test_order_three(self):
        ops = pauli_tower(TowerSpec(3, 3))
        assert max_dev(matrix_power(ops[1], 3), identity(27)) <= 1e-10

    def test_commutation_relations(self):
        d = 3
        ops = pauli_tower(TowerSpec(d, 3))
        w = np.exp(2j * np.pi / d)
        for j, k in itertools.combinations(range(3), 2):
            assert max_dev(ops[j] @ ops[k], w * ops[k] @ ops[j]) <= 1e-12

    def test_cap(self):
        with pytest.raises(ValueError):
            TowerSpec(2, 9)
        assert TowerSpec(2, 9, cap=512).n == 9
        with pytest.raises(ValueError):
            TowerSpec(2, 1)

    @pytest.mark.parametrize("d,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)])
    def test_pairwise_unbiased(self, d, n):
        ms = tower_to_measurements(pauli_tower(TowerSpec(d, n)), d)
        assert len(ms) == n
        for P, Q in itertools.combinations(ms, 2):
            rep = verify_mum_conditions(P, Q)
            assert rep.passed and rep.max_violation <= 1e-10


class TestSpectral:
    def test_z(self):
        z, _ = gen_pauli(2)
        # omega_2^1 = -1 labels |1>, omega_2^2 = 1 labels |2>
        p1, p2 = spectral_projectors(z, 2)
        assert np.allclose(p1, np.diag([1, 0])) and np.allclose(p2, np.diag([0, 1]))

    def test_x(self):
        p1, p2 = spectral_projectors(X, 2)
        assert np.allclose(p1, (identity(2) - X) / 2)
        assert np.allclose(p2, (identity(2) + X) / 2)

    def test_wrong_order(self):
        with pytest.raises(ValueError):
            spectral_projectors(np.diag([1, 1j]), 2)


class TestHeisenbergWeyl:
    def test_d2(self):
        ops = heisenberg_weyl(2)
        z, x = gen_pauli(2)
        for got, want in zip(ops, [identity(2), z, x, x @ z]):
            assert max_dev(got, want) <= 1e-15
        assert verify_orthogonal_unitary_basis(ops)

    @pytest.mark.parametrize("d", range(2, 7))
    def test_gram(self, d):
        ops = heisenberg_weyl(d)
        assert len(ops) == d * d
        assert max_dev(ops[0], identity(d)) == 0
        assert max_dev(gram_matrix(ops), d * identity(d * d)) <= 1e-12
