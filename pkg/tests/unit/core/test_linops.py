"""
Unit tests for operator/superoperator linear algebra
"""

import numpy as np
import pytest

from hsthermo.core.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    NonFiniteError,
)
from hsthermo.core.linops import (
    anticommutator_super,
    check_density_matrix,
    commutator_super,
    devectorize,
    eig,
    embed_operator,
    embed_superoperator,
    expm,
    hs_norm,
    induced_norm,
    kron,
    left_mult,
    partial_trace,
    right_mult,
    sandwich,
    superoperator_from_map,
    trace_distance,
    vectorize,
)
from hsthermo.core.types import Operator, Superoperator


def random_operator(rng, dim):
    return Operator(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


class TestVectorization:
    """Column stacking and the elementary superoperators"""

    def test_column_stacking(self):
        operator = Operator(np.array([[1, 2], [3, 4]]))
        np.testing.assert_array_equal(vectorize(operator), [1, 3, 2, 4])

    def test_devectorize_inverts_vectorize(self, rng):
        operator = random_operator(rng, 3)
        np.testing.assert_array_equal(devectorize(vectorize(operator), 3).entries, operator.entries)

    def test_devectorize_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            devectorize(np.zeros(5), 2)

    def test_sandwich_matches_matrix_products(self, rng):
        left, right, middle = (random_operator(rng, 3) for _ in range(3))
        expected = left.entries @ middle.entries @ right.entries
        np.testing.assert_allclose(sandwich(left, right).apply(middle).entries, expected, atol=1e-12)

    def test_left_and_right_multiplication(self, rng):
        x, rho = random_operator(rng, 2), random_operator(rng, 2)
        np.testing.assert_allclose(left_mult(x).apply(rho).entries, x.entries @ rho.entries, atol=1e-12)
        np.testing.assert_allclose(right_mult(x).apply(rho).entries, rho.entries @ x.entries, atol=1e-12)

    def test_commutator_and_anticommutator(self, rng):
        x, rho = random_operator(rng, 2), random_operator(rng, 2)
        product, reverse = x.entries @ rho.entries, rho.entries @ x.entries
        np.testing.assert_allclose(commutator_super(x).apply(rho).entries, product - reverse, atol=1e-12)
        np.testing.assert_allclose(anticommutator_super(x).apply(rho).entries, product + reverse, atol=1e-12)

    def test_superoperator_from_map(self, rng):
        x = random_operator(rng, 2)
        built = superoperator_from_map(lambda rho: x @ rho @ x.dag, 2)
        np.testing.assert_allclose(built.matrix, sandwich(x, x.dag).matrix, atol=1e-12)

    def test_sandwich_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            sandwich(Operator.identity(2), Operator.identity(3))


class TestTensorProducts:
    """kron, partial_trace and embedding"""

    def test_partial_trace_of_product(self, rng):
        first, second = random_operator(rng, 2), random_operator(rng, 3)
        joint = kron(first, second)
        np.testing.assert_allclose(
            partial_trace(joint, [2, 3], keep=1).entries, first.trace() * second.entries, atol=1e-12
        )
        np.testing.assert_allclose(
            partial_trace(joint, [2, 3], keep=0).entries, second.trace() * first.entries, atol=1e-12
        )

    def test_partial_trace_keeps_several_factors(self, rng):
        a, b, c = (random_operator(rng, 2) for _ in range(3))
        reduced = partial_trace(kron(a, b, c), [2, 2, 2], keep=[0, 2])
        np.testing.assert_allclose(reduced.entries, b.trace() * kron(a, c).entries, atol=1e-12)

    def test_partial_trace_rejects_bad_dims(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace(Operator.identity(4), [2, 3], keep=0)
        with pytest.raises(DimensionMismatchError):
            partial_trace(Operator.identity(4), [2, 2], keep=2)

    def test_embed_operator(self, rng):
        x = random_operator(rng, 2)
        np.testing.assert_allclose(
            embed_operator(x, [2, 2], 1).entries, np.kron(np.eye(2), x.entries), atol=1e-12
        )

    @pytest.mark.parametrize("factor", [0, 1, 2])
    def test_embed_superoperator_acts_on_one_factor(self, rng, factor):
        local = sandwich(random_operator(rng, 2), random_operator(rng, 2))
        factors = [random_operator(rng, 2) for _ in range(3)]
        lifted = embed_superoperator(local, [2, 2, 2], factor)
        expected = [local.apply(op) if index == factor else op for index, op in enumerate(factors)]
        np.testing.assert_allclose(
            lifted.apply(kron(*factors)).entries, kron(*expected).entries, atol=1e-10
        )

    def test_kron_needs_operators(self):
        with pytest.raises(DimensionMismatchError):
            kron()


class TestExpm:
    """Matrix exponential paths"""

    def test_eig_and_pade_agree(self, rng):
        generator = Superoperator(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        np.testing.assert_allclose(
            expm(generator, 0.3, method="eig").matrix,
            expm(generator, 0.3, method="pade").matrix,
            atol=1e-10,
        )

    def test_zero_generator_gives_identity(self):
        result = expm(Superoperator.zeros(2), 5.0)
        np.testing.assert_array_equal(result.matrix, np.eye(4))

    def test_operator_in_operator_out(self):
        result = expm(Operator(np.diag([1.0, 2.0])), 1.0)
        assert isinstance(result, Operator)
        np.testing.assert_allclose(np.diag(result.entries), np.exp([1.0, 2.0]))

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteError):
            expm(Operator(np.array([[np.nan, 0.0], [0.0, 1.0]])))
        with pytest.raises(NonFiniteError):
            expm(Operator.identity(2), np.inf)

    def test_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            expm(Operator.identity(2), 1.0, method="taylor")


class TestNormsAndStates:
    """Norms, trace distance and density-matrix validation"""

    def test_hs_norm(self):
        assert hs_norm(Operator.identity(2)) == pytest.approx(np.sqrt(2.0))

    def test_induced_norm_of_zz_coupling(self):
        coupling = -1j * commutator_super(Operator(np.diag([1.0, -1.0, -1.0, 1.0])))
        assert induced_norm(coupling) == pytest.approx(2.0)

    def test_induced_norm_is_submultiplicative(self, rng):
        for dim in (2, 3, 2, 3, 4):
            first = Superoperator(rng.normal(size=(dim ** 2, dim ** 2)) + 1j * rng.normal(size=(dim ** 2, dim ** 2)))
            second = Superoperator(rng.normal(size=(dim ** 2, dim ** 2)))
            assert induced_norm(first @ second) <= induced_norm(first) * induced_norm(second) + 1e-10

    def test_trace_distance_of_orthogonal_states(self):
        ground = Operator(np.diag([1.0, 0.0]))
        excited = Operator(np.diag([0.0, 1.0]))
        assert trace_distance(ground, excited) == pytest.approx(1.0)
        assert trace_distance(ground, ground) == pytest.approx(0.0)

    def test_check_density_matrix(self):
        state = Operator(np.array([[0.5, 0.5], [0.5, 0.5]]))
        assert check_density_matrix(state) is state
        with pytest.raises(InvalidStateError):
            check_density_matrix(Operator(np.diag([1.0, 1.0])))
        with pytest.raises(InvalidStateError):
            check_density_matrix(Operator(np.diag([1.5, -0.5])))
        with pytest.raises(InvalidStateError):
            check_density_matrix(Operator(np.array([[0.5, 0.5], [0.0, 0.5]])))


class TestEig:
    """Biorthonormal eigendecomposition"""

    def test_biorthonormal_and_sorted(self, rng):
        generator = Superoperator(rng.normal(size=(9, 9)))
        spectrum = eig(generator)
        duality = spectrum.left_vectors.conj().T @ spectrum.right_vectors
        np.testing.assert_allclose(duality, np.eye(9), atol=1e-8)
        real_parts = np.abs(np.real(spectrum.eigenvalues))
        assert np.all(np.diff(real_parts) >= -1e-12)
        reconstruction = (spectrum.right_vectors * spectrum.eigenvalues) @ spectrum.left_vectors.conj().T
        np.testing.assert_allclose(reconstruction, generator.matrix, atol=1e-8)

    def test_degenerate_cluster(self):
        spectrum = eig(Superoperator(np.diag([-2.0, -1.0, 0.0, -1.0])))
        np.testing.assert_allclose(spectrum.eigenvalues, [0.0, -1.0, -1.0, -2.0])
        duality = spectrum.left_vectors.conj().T @ spectrum.right_vectors
        np.testing.assert_allclose(duality, np.eye(4), atol=1e-12)

    def test_operator_views(self):
        spectrum = eig(Superoperator(np.diag([0.0, -1.0, -1.0, -2.0])))
        assert spectrum.right_operator(0).dim == 2
        assert spectrum.left_operator(3).dim == 2


class TestTypes:
    """Operator and Superoperator wrappers"""

    def test_operator_must_be_square(self):
        with pytest.raises(DimensionMismatchError):
            Operator(np.zeros((2, 3)))

    def test_superoperator_side_must_be_square_number(self):
        with pytest.raises(DimensionMismatchError):
            Superoperator(np.zeros((3, 3)))

    def test_entries_are_read_only(self):
        operator = Operator(np.eye(2))
        with pytest.raises(ValueError):
            operator.entries[0, 0] = 5.0

    def test_arithmetic(self):
        x = Operator(np.diag([1.0, 2.0]))
        np.testing.assert_array_equal((2 * x - x).entries, x.entries)
        np.testing.assert_array_equal((x @ x).entries, np.diag([1.0, 4.0]))
        with pytest.raises(DimensionMismatchError):
            x + Operator.identity(3)
