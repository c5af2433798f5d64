"""Core linear algebra: products, adjoints, traces, tensor products, unitarity."""

import numpy as np
import pytest

from qpath import linalg
from qpath.measure import HADAMARD, MIRROR


def random_state(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def random_matrix(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestMatmul:
    def test_identity_absorbs(self):
        assert linalg.max_abs_diff(linalg.matmul(linalg.identity(2), HADAMARD), HADAMARD) == 0.0

    def test_hadamard_squares_to_identity(self):
        # (1/sqrt2)^2 + (1/sqrt2)^2 = 1 on the diagonal, 1/2 - 1/2 = 0 off it
        product = linalg.matmul(HADAMARD, HADAMARD)
        assert linalg.max_abs_diff(product, np.eye(2)) <= 1e-12

    def test_hxh_is_diag_1_minus1(self):
        product = linalg.matmul(linalg.matmul(HADAMARD, MIRROR), HADAMARD)
        assert linalg.max_abs_diff(product, np.diag([1.0, -1.0])) <= 1e-12

    def test_shape_error_names_both_shapes(self):
        with pytest.raises(linalg.ShapeError, match=r"2x2 by 3x3"):
            linalg.matmul(np.eye(2), np.eye(3))


class TestDagger:
    def test_real_symmetric_fixed_point(self):
        assert np.array_equal(linalg.dagger(HADAMARD), HADAMARD)

    def test_forced_by_definition(self):
        m = np.array([[0, 1j], [0, 0]])
        expected = np.array([[0, 0], [-1j, 0]])
        assert np.array_equal(linalg.dagger(m), expected)

    def test_involution_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = random_matrix(rng, 3, 4)
            assert np.array_equal(linalg.dagger(linalg.dagger(m)), m)

    def test_product_reversal(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b = random_matrix(rng, 3), random_matrix(rng, 3)
            lhs = linalg.dagger(linalg.matmul(a, b))
            rhs = linalg.matmul(linalg.dagger(b), linalg.dagger(a))
            assert linalg.max_abs_diff(lhs, rhs) <= 1e-12

    def test_product_reversal_exact_on_rational_entries(self):
        # entries exactly representable: integers and halves
        a = np.array([[1, 0.5], [-2, 1j]])
        b = np.array([[0.25, 3], [1, -0.5j]])
        lhs = linalg.dagger(linalg.matmul(a, b))
        rhs = linalg.matmul(linalg.dagger(b), linalg.dagger(a))
        assert np.array_equal(lhs, rhs)


class TestInnerProduct:
    def test_orthonormal_basis_pairings(self):
        e0, e1 = linalg.basis_ket(2, 0), linalg.basis_ket(2, 1)
        assert linalg.inner_product(e0, e0) == 1
        assert linalg.inner_product(e0, e1) == 0

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, b = random_state(rng, 4), random_state(rng, 4)
            lhs = linalg.inner_product(a, b)
            rhs = np.conj(linalg.inner_product(b, a))
            assert abs(lhs - rhs) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(linalg.ShapeError):
            linalg.inner_product(np.ones(2), np.ones(3))


class TestKetBra:
    def test_projector_on_zero(self):
        e0 = linalg.basis_ket(2, 0)
        assert np.array_equal(linalg.ket_bra(e0, e0), np.array([[1, 0], [0, 0]], dtype=complex))

    def test_square_rule(self):
        # P = |A><B| satisfies P^2 = <B|A> P
        rng = np.random.default_rng(5)
        for _ in range(30):
            a = linalg.normalize(random_state(rng, 3))
            b = linalg.normalize(random_state(rng, 3))
            p = linalg.ket_bra(a, b)
            lhs = linalg.matmul(p, p)
            rhs = linalg.inner_product(b, a) * p
            assert linalg.max_abs_diff(lhs, rhs) <= 1e-10

    def test_completeness_over_computed_basis(self):
        # sum_i |C_i><C_i| = 1 for an orthonormal basis from a QR factorization
        rng = np.random.default_rng(9)
        for d in (2, 3, 5):
            u = linalg.haar_unitary(d, rng)
            total = sum(linalg.ket_bra(u[:, i], u[:, i]) for i in range(d))
            assert linalg.max_abs_diff(total, np.eye(d)) <= 1e-10

    def test_rectangular_allowed(self):
        out = linalg.ket_bra(np.ones(3), np.ones(2))
        assert out.shape == (3, 2)


class TestTrace:
    def test_identity(self):
        for d in range(2, 7):
            assert linalg.trace(linalg.identity(d)) == d

    def test_hadamard_traceless(self):
        assert abs(linalg.trace(HADAMARD)) <= 1e-12

    def test_cyclic(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            a, b = random_matrix(rng, 4), random_matrix(rng, 4)
            lhs = linalg.trace(linalg.matmul(a, b))
            rhs = linalg.trace(linalg.matmul(b, a))
            assert abs(lhs - rhs) <= 1e-10

    def test_non_square_rejected(self):
        with pytest.raises(linalg.ShapeError):
            linalg.trace(np.ones((2, 3)))


class TestTensorProduct:
    def test_identity_times_identity(self):
        out = linalg.tensor_product(linalg.identity(2), linalg.identity(2))
        assert np.array_equal(out, np.eye(4))

    def test_block_structure(self):
        rng = np.random.default_rng(17)
        u = random_matrix(rng, 2)
        out = linalg.tensor_product(linalg.identity(2), u)
        assert np.array_equal(out[:2, :2], u)
        assert np.array_equal(out[2:, 2:], u)
        assert np.all(out[:2, 2:] == 0) and np.all(out[2:, :2] == 0)

    def test_mixed_product_rule(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            a, b, c, d = (random_matrix(rng, 2) for _ in range(4))
            lhs = linalg.matmul(linalg.tensor_product(a, b), linalg.tensor_product(c, d))
            rhs = linalg.tensor_product(linalg.matmul(a, c), linalg.matmul(b, d))
            assert linalg.max_abs_diff(lhs, rhs) <= 1e-10


class TestUnitarity:
    def test_hadamard_is_unitary(self):
        assert linalg.is_unitary(HADAMARD, 1e-10)

    def test_shear_is_not(self):
        assert not linalg.is_unitary(np.array([[1, 1], [0, 1]]), 1e-10)

    def test_qr_construction_is_unitary(self):
        rng = np.random.default_rng(23)
        for d in (2, 3, 5):
            assert linalg.is_unitary(linalg.haar_unitary(d, rng), 1e-10)

    def test_preserves_inner_products(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            d = int(rng.integers(2, 6))
            u = linalg.haar_unitary(d, rng)
            v, w = random_state(rng, d), random_state(rng, d)
            before = linalg.inner_product(v, w)
            after = linalg.inner_product(u @ v, u @ w)
            assert abs(after - before) <= 1e-9


class TestStates:
    def test_projector_law(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            a = linalg.normalize(random_state(rng, 4))
            p = linalg.ket_bra(a, a)
            assert linalg.max_abs_diff(linalg.matmul(p, p), p) <= 1e-10

    def test_resolution_of_identity_reconstructs(self):
        rng = np.random.default_rng(37)
        for d in (2, 3, 4):
            basis = linalg.haar_unitary(d, rng)
            a = random_state(rng, d)
            rebuilt = sum(
                linalg.inner_product(basis[:, i], a) * basis[:, i] for i in range(d)
            )
            assert linalg.max_abs_diff(rebuilt, a) <= 1e-10

    def test_normalize_flags(self):
        v = np.array([3.0, 4.0])
        assert not linalg.is_normalized(v)
        n = linalg.normalize(v)
        assert linalg.is_normalized(n)
        with pytest.raises(ValueError):
            linalg.normalize(np.zeros(2))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            linalg.as_matrix(np.array([[np.nan, 0], [0, 1]]))
        with pytest.raises(ValueError):
            linalg.as_state(np.array([np.inf, 0]))


def test_equality_is_tolerance_based():
    a = np.eye(2)
    b = np.eye(2) + 1e-12
    assert linalg.equal_within(a, b, 1e-10)
    assert not linalg.equal_within(a, b, 1e-14)
    with pytest.raises(linalg.ShapeError):
        linalg.max_abs_diff(np.eye(2), np.eye(3))
