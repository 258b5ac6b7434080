import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mumkit.catalog import cd_special, CdParams, kuznetsov5
from mumkit.linalg import is_unitary
from mumkit.mum import canonicalize, normalize, verify_unitary_hadamard
from mumkit.quaternion import (
    I,
    J,
    K,
    ONE,
    PerfectSequence,
    Quaternion,
    QuaternionMatrix,
    autocorrelation,
    circulant_from_sequence,
    dephase,
    dephase_columns,
    dephase_hadamard,
    has_noncommuting_pair,
    is_dephased,
    is_q_hadamard,
    is_unit,
    lift,
    lift_matrix,
    q_conj,
    q_mul,
    q_norm,
)

Q = (-ONE + I - J - K) * 0.5
QS = Q.conj()

comp = st.floats(min_value=-1, max_value=1, allow_nan=False)
quats = st.builds(Quaternion, comp, comp, comp, comp)
unit_quats = quats.filter(lambda q: q.norm() > 1e-3).map(lambda q: q / q.norm())


def rows_equal(m: QuaternionMatrix, expected, tol=1e-12):
    return all(m[r, c].isclose(expected[r][c], tol) for r in range(len(expected)) for c in range(len(expected)))


def random_gauge(rng, m: QuaternionMatrix) -> QuaternionMatrix:
    # D1 M D2 with diagonal unit quaternions keeps M M^dagger = d*1
    d = m.shape[0]

    def unit():
        v = rng.normal(size=4)
        return Quaternion.from_array(v / np.linalg.norm(v))

    left = [unit() for _ in range(d)]
    right = [unit() for _ in range(d)]
    return QuaternionMatrix.from_rows([[left[r] * m[r, c] * right[c] for c in range(d)] for r in range(d)])


class TestArithmetic:
    def test_units(self):
        assert q_mul(I, J) == K
        assert q_mul(J, I) == -K
        for u in (I, J, K):
            assert q_mul(u, u) == -ONE

    def test_inverse(self):
        q = (ONE + I) * (1 / np.sqrt(2))
        assert q_mul(q, q.inverse()).isclose(ONE)

    def test_conj_and_norm(self):
        assert q_conj(K) == -K
        assert q_norm(Q) == pytest.approx(1)
        assert is_unit(Q)
        assert not is_unit(ONE + I)

    @given(quats, quats)
    def test_conj_antihomomorphism(self, p, q):
        assert q_conj(p * q).isclose(q_conj(q) * q_conj(p), 1e-12)

    @given(quats, quats)
    def test_norm_multiplicative(self, p, q):
        assert abs(q_norm(p * q) - q_norm(p) * q_norm(q)) <= 1e-12

    def test_non_finite(self):
        with pytest.raises(ValueError):
            Quaternion(float("nan"))


class TestHadamard:
    def test_examples(self):
        assert is_q_hadamard(QuaternionMatrix.from_rows([[1, 1], [1, -1]]))
        assert is_q_hadamard(circulant_from_sequence(kuznetsov5()))
        assert not is_q_hadamard(QuaternionMatrix.from_rows([[1, 1], [1, 1]]))

    def test_non_square(self):
        with pytest.raises(ValueError):
            is_q_hadamard(QuaternionMatrix.from_rows([[1, 1]]))

    def test_order_matters(self):
        # rows orthogonal only with the conjugate on the right
        m = QuaternionMatrix.from_rows([[ONE, ONE], [I, -I]])
        assert is_q_hadamard(m)


class TestDephase:
    def test_already_dephased(self):
        m = QuaternionMatrix.from_rows([[1, 1], [1, -1]])
        assert dephase(m).allclose(m)

    def test_ps5_intermediate(self):
        c = circulant_from_sequence(kuznetsov5())
        expected = [
            [ONE, ONE, ONE, ONE, ONE],
            [Q, -J, ONE, J, QS],
            [ONE, -(J * Q), -J, J, QS * J],
            [J, -J, -(J * Q), ONE, QS * J],
            [J, ONE, -J, Q, QS],
        ]
        assert rows_equal(dephase_columns(c), expected)

    def test_ps5_final(self):
        c = circulant_from_sequence(kuznetsov5())
        expected = [
            [ONE, ONE, ONE, ONE, ONE],
            [ONE, -(J * QS), QS, J * QS, QS * QS],
            [ONE, -(J * Q), -J, J, QS * J],
            [ONE, -ONE, J * Q * J, -J, QS],
            [ONE, -J, -ONE, -(Q * J), -(QS * J)],
        ]
        assert rows_equal(dephase(c), expected)

    def test_generic_second_row(self):
        # (1, j, x, x, j, 1, q): the unspecified middle entries do not reach row 2's pattern
        seq = [ONE, J, -ONE, I, J, ONE, Q]
        d = len(seq)
        m = QuaternionMatrix.from_rows([[seq[(c - r) % d] for c in range(d)] for r in range(d)])
        row = [dephase(m)[1, c] for c in range(d)]
        assert row[0].isclose(ONE)
        assert row[1].isclose(-(J * QS))
        assert row[-2].isclose(J * QS)
        assert row[-1].isclose(QS * QS)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        m = random_gauge(rng, circulant_from_sequence(kuznetsov5()))
        once = dephase(m)
        assert is_dephased(once)
        assert dephase(once).allclose(once, 1e-12)

    def test_non_unit_entry(self):
        with pytest.raises(ValueError):
            dephase(QuaternionMatrix.from_rows([[1, 2], [1, 1]]))

    def test_hadamard_variant_preserves_property(self):
        rng = np.random.default_rng(1)
        bases = [circulant_from_sequence(kuznetsov5()), cd_special(CdParams.from_angles(0.7, 1.9))]
        for base in bases:
            for _ in range(10):
                m = random_gauge(rng, base)
                out = dephase_hadamard(m)
                assert is_dephased(out)
                assert is_q_hadamard(out)
                assert dephase_hadamard(out).allclose(out, 1e-12)

    def test_column_first_order_preserves_conjugate_property(self):
        # left on columns, right on rows keeps the entrywise conjugate Hadamard
        rng = np.random.default_rng(2)
        base = circulant_from_sequence(kuznetsov5()).conjugate()
        for _ in range(10):
            m = random_gauge(rng, base).conjugate()
            assert is_q_hadamard(m.conjugate())
            assert is_q_hadamard(dephase(m).conjugate())

    def test_column_first_ps5_result_is_not_hadamard(self):
        c = circulant_from_sequence(kuznetsov5())
        assert not is_q_hadamard(dephase(c))
        with pytest.raises(ValueError):
            lift_matrix(dephase(c))


class TestNoncommuting:
    def test_real_entries(self):
        assert has_noncommuting_pair(QuaternionMatrix.from_rows([[1, -1], [-1, 1]])) == (False, None)

    def test_single_axis(self):
        m = QuaternionMatrix.from_rows([[ONE, J], [-J, ONE]])
        assert not has_noncommuting_pair(m)[0]

    def test_ps5(self):
        deph = dephase(circulant_from_sequence(kuznetsov5()))
        found, witness = has_noncommuting_pair(deph)
        assert found
        (r1, c1), (r2, c2) = witness
        p, q = deph[r1 - 1, c1 - 1], deph[r2 - 1, c2 - 1]
        assert (p * q - q * p).norm() > 1e-10
        # entries (2,4) and (2,5)
        a, b = deph[1, 3], deph[1, 4]
        assert (a * b - b * a).norm() > 0.5


class TestSequences:
    def test_autocorrelation(self):
        seq = kuznetsov5()
        assert autocorrelation(seq, 0).isclose(Quaternion(5.0))
        for t in range(1, 5):
            assert autocorrelation(seq, t).norm() <= 1e-12
        assert autocorrelation([ONE, ONE], 1).isclose(Quaternion(2.0))
        assert not PerfectSequence([ONE, ONE]).is_perfect()

    def test_circulant_ps5_rows(self):
        c = circulant_from_sequence(kuznetsov5())
        expected = [
            [ONE, J, J, ONE, Q],
            [Q, ONE, J, J, ONE],
            [ONE, Q, ONE, J, J],
            [J, ONE, Q, ONE, J],
            [J, J, ONE, Q, ONE],
        ]
        assert rows_equal(c, expected)

    def test_length_one(self):
        c = circulant_from_sequence(PerfectSequence([ONE]))
        assert c.shape == (1, 1) and c[0, 0] == ONE

    def test_rejects_non_perfect(self):
        with pytest.raises(ValueError):
            circulant_from_sequence(PerfectSequence([ONE, ONE]))
        with pytest.raises(ValueError):
            PerfectSequence([ONE, Quaternion(2.0)]).check()

    @settings(max_examples=30)
    @given(unit_quats, unit_quats, st.integers(0, 4))
    def test_random_perfect_inputs(self, u, v, shift):
        # u q_l v and cyclic shifts of a perfect sequence stay perfect
        terms = [u * q * v for q in kuznetsov5().terms]
        seq = PerfectSequence(terms[shift:] + terms[:shift])
        c = circulant_from_sequence(seq)
        assert is_q_hadamard(c, 1e-9)
        d = len(seq)
        for r in range(1, d):
            for col in range(d):
                assert c[r, col] == c[r - 1, (col - 1) % d]


class TestLift:
    def test_units(self):
        Y = np.array([[0, -1j], [1j, 0]])
        Z = np.diag([1, -1])
        assert np.allclose(lift(J), -1j * Y)
        assert np.allclose(lift(J), [[0, -1], [1, 0]])
        assert np.allclose(lift(I) @ lift(J), lift(K))
        assert np.allclose(lift(K), 1j * Z)

    @settings(max_examples=200)
    @given(quats, quats)
    def test_homomorphism(self, p, q):
        assert np.max(np.abs(lift(p * q) - lift(p) @ lift(q))) <= 1e-12
        assert np.max(np.abs(lift(p + q) - lift(p) - lift(q))) <= 1e-12
        assert np.max(np.abs(lift(p.conj()) - lift(p).conj().T)) <= 1e-12

    @given(unit_quats)
    def test_unit_lifts_unitary(self, q):
        assert is_unitary(lift(q), 1e-12)

    def test_real_hadamard(self):
        h = lift_matrix(QuaternionMatrix.from_rows([[1, 1], [1, -1]]))
        assert np.allclose(h.block(2, 2), -np.eye(2))
        assert np.allclose(h.block(1, 2), np.eye(2))

    def test_entry_j(self):
        h = lift_matrix(QuaternionMatrix.from_rows([[ONE, ONE], [J, -J]]))
        assert np.allclose(h.block(2, 1), 1j * np.array([[0, -1j], [1j, 0]]))

    def test_ps5_lift(self):
        m = dephase_hadamard(circulant_from_sequence(kuznetsov5()))
        h = lift_matrix(m)
        assert verify_unitary_hadamard(h, 1e-12).passed
        assert h.is_dephased()

    def test_dephasing_commutes_with_lift(self):
        c = circulant_from_sequence(kuznetsov5())
        block_level = canonicalize(normalize(lift_matrix(c)))
        assert np.max(np.abs(block_level.blocks - lift_matrix(dephase_hadamard(c)).blocks)) <= 1e-12

    def test_rejects_non_hadamard(self):
        with pytest.raises(ValueError):
            lift_matrix(QuaternionMatrix.from_rows([[1, 1], [1, 1]]))
