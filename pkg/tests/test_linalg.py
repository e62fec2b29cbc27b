import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricprobe.linalg import (
    MINUS,
    PLUS,
    DensityMatrix,
    FactorLayout,
    StateVector,
    bloch_vector,
    fidelity_pure,
    global_phase_equal,
    ket,
    min_eigenvalue,
    partial_trace,
    projector,
    purity,
    tensor,
)

from conftest import random_state

S = 1 / math.sqrt(2)


def brute_partial_trace(rho: np.ndarray, dims, keep):
    """Loop-over-indices partial trace, independent of the einsum path."""
    n = len(dims)
    kept = [i for i in range(n) if i in keep]
    traced = [i for i in range(n) if i not in keep]
    kdims = [dims[i] for i in kept]
    d = int(np.prod(kdims)) if kdims else 1
    out = np.zeros((d, d), dtype=complex)

    def flat(idx):
        f = 0
        for i, dim in zip(idx, dims):
            f = f * dim + i
        return f

    for row_k in itertools.product(*[range(x) for x in kdims]):
        for col_k in itertools.product(*[range(x) for x in kdims]):
            total = 0j
            for tr in itertools.product(*[range(dims[i]) for i in traced]):
                r = [0] * n
                c = [0] * n
                for pos, i in enumerate(kept):
                    r[i], c[i] = row_k[pos], col_k[pos]
                for pos, i in enumerate(traced):
                    r[i] = c[i] = tr[pos]
                total += rho[flat(r), flat(c)]
            out[flat_k(row_k, kdims), flat_k(col_k, kdims)] = total
    return out


def flat_k(idx, dims):
    f = 0
    for i, dim in zip(idx, dims):
        f = f * dim + i
    return f


class TestTensor:
    def test_basis_kets(self):
        np.testing.assert_array_equal(tensor(ket(0), ket(1)).amplitudes, [0, 1, 0, 0])

    def test_plus_zero(self):
        np.testing.assert_allclose(tensor(PLUS, ket(0)).amplitudes, np.array([1, 0, 1, 0]) * S, atol=1e-15)

    def test_singlet_from_products(self):
        v = (tensor(ket(0), ket(1)).amplitudes - tensor(ket(1), ket(0)).amplitudes) * S
        np.testing.assert_allclose(v, [0, S, -S, 0])

    def test_big_endian_layout(self):
        v = tensor(tensor(ket(1), ket(0)), ket(1))
        assert v.layout.factor_dims == (2, 2, 2)
        assert np.argmax(np.abs(v.amplitudes)) == 0b101

    def test_vector_overflow_rejected(self):
        with pytest.raises(ValueError, match="exceeds 8"):
            tensor(ket(0, 0), ket(0, 0))

    def test_density_matrices(self):
        rho = tensor(projector(ket(0)), projector(PLUS))
        np.testing.assert_allclose(rho.data, np.kron([[1, 0], [0, 0]], [[0.5, 0.5], [0.5, 0.5]]))
        assert rho.layout.factor_dims == (2, 2)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(TypeError):
            tensor(ket(0), projector(ket(0)))


class TestConstruction:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="finite"):
            StateVector([np.nan, 1])

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            StateVector([1, 0, 0])
        with pytest.raises(ValueError):
            StateVector(np.zeros(16))

    def test_layout_mismatch(self):
        with pytest.raises(ValueError, match="expects dimension 8"):
            StateVector([1, 0, 0, 0], (2, 2, 2))

    def test_density_checks(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix([[0.5, 0.1], [0.2, 0.5]])
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2))
        with pytest.raises(ValueError, match="negative eigenvalue"):
            DensityMatrix([[1.5, 0], [0, -0.5]])

    def test_immutable(self):
        v = ket(0)
        with pytest.raises(ValueError):
            v.amplitudes[0] = 2


class TestProjector:
    def test_zero(self):
        np.testing.assert_array_equal(projector(ket(0)).data, [[1, 0], [0, 0]])

    def test_plus(self):
        np.testing.assert_allclose(projector(PLUS).data, 0.5 * np.ones((2, 2)))

    def test_bob_state_zero_phase(self):
        # (|1> - |0>)/sqrt(2) expanded by hand
        rho = projector(StateVector([-S, S]))
        np.testing.assert_allclose(rho.data, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_idempotent(self, rng):
        p = projector(StateVector(random_state(rng, 8))).data
        np.testing.assert_allclose(p @ p, p, atol=1e-12)

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError, match="normalized"):
            projector(StateVector([1, 1]))


class TestPartialTrace:
    def test_singlet_marginals(self):
        singlet = StateVector([0, S, -S, 0], (2, 2))
        for keep in ([0], [1]):
            np.testing.assert_allclose(partial_trace(projector(singlet), None, keep).data, np.eye(2) / 2, atol=1e-15)

    def test_matches_brute_force(self, rng):
        dims = (2, 2, 2)
        for _ in range(20):
            rho = projector(StateVector(random_state(rng, 8), dims))
            for keep in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
                got = partial_trace(rho, dims, keep).data
                np.testing.assert_allclose(got, brute_partial_trace(rho.data, dims, keep), atol=1e-14)

    def test_mixed_input_brute_force(self, rng):
        dims = (2, 4)
        vs = [random_state(rng, 8) for _ in range(3)]
        w = rng.dirichlet(np.ones(3))
        rho = DensityMatrix(sum(wi * np.outer(v, v.conj()) for wi, v in zip(w, vs)), dims)
        np.testing.assert_allclose(partial_trace(rho, None, [1]).data, brute_partial_trace(rho.data, dims, [1]), atol=1e-14)

    def test_layout_argument_overrides(self, rng):
        rho = projector(StateVector(random_state(rng, 8)))
        assert rho.layout.factor_dims == (8,)
        assert partial_trace(rho, FactorLayout((2, 2, 2)), [2]).dim == 2

    def test_inconsistent_layout(self):
        rho = projector(ket(0, 1))
        with pytest.raises(ValueError, match="expects dimension 8.*dimension 4"):
            partial_trace(rho, (2, 2, 2), [0])

    def test_bad_keep(self):
        rho = projector(ket(0, 1))
        with pytest.raises(ValueError):
            partial_trace(rho, None, [])
        with pytest.raises(ValueError):
            partial_trace(rho, None, [2])

    def test_composition(self, rng):
        dims = (2, 2, 2)
        for _ in range(50):
            rho = projector(StateVector(random_state(rng, 8), dims))
            step = partial_trace(partial_trace(rho, dims, [0, 1]), (2, 2), [0])
            once = partial_trace(rho, dims, [0])
            np.testing.assert_allclose(step.data, once.data, atol=1e-12)

    def test_product_returns_factor(self, rng):
        a = projector(StateVector(random_state(rng, 2)))
        b = projector(StateVector(random_state(rng, 4), (2, 2)))
        prod = tensor(a, b)
        np.testing.assert_allclose(partial_trace(prod, None, [0]).data, a.data, atol=1e-12)
        np.testing.assert_allclose(partial_trace(prod, None, [1, 2]).data, b.data, atol=1e-12)


class TestPurityFidelity:
    def test_maximally_mixed(self):
        assert purity(DensityMatrix(np.eye(2) / 2)) == pytest.approx(0.5, abs=1e-15)

    def test_random_projectors(self, rng):
        for _ in range(1000):
            dim = rng.choice([2, 4, 8])
            assert abs(purity(projector(StateVector(random_state(rng, dim)))) - 1) <= 1e-12

    def test_half_coherence_purity(self):
        # |W|^2 = 1/2 gives Tr rho^2 = (1 + 1/2) / 2
        w = math.sqrt(0.5) * np.exp(0.3j)
        rho = DensityMatrix(0.5 * np.array([[1, -w], [-np.conj(w), 1]]))
        assert purity(rho) == pytest.approx(0.75, abs=1e-12)

    def test_purity_matches_trace_of_square(self, rng):
        vs = [random_state(rng, 4) for _ in range(2)]
        rho = DensityMatrix(0.3 * np.outer(vs[0], vs[0].conj()) + 0.7 * np.outer(vs[1], vs[1].conj()))
        assert purity(rho) == pytest.approx(np.real(np.trace(rho.data @ rho.data)), abs=1e-14)

    def test_fidelity(self, rng):
        assert fidelity_pure(projector(ket(0)), ket(0)) == pytest.approx(1)
        assert fidelity_pure(projector(ket(0)), ket(1)) == pytest.approx(0)
        for _ in range(10):
            v = StateVector(random_state(rng, 2))
            assert fidelity_pure(DensityMatrix(np.eye(2) / 2), v) == pytest.approx(0.5, abs=1e-14)

    def test_fidelity_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            fidelity_pure(projector(ket(0)), ket(0, 0))


def test_global_phase_equal(rng):
    v = StateVector(random_state(rng, 4))
    assert global_phase_equal(v, StateVector(np.exp(1.7j) * v.amplitudes))
    assert not global_phase_equal(ket(0, 1), ket(1, 0))


def test_bloch_vector_of_plus_minus():
    np.testing.assert_allclose(bloch_vector(projector(PLUS)), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(bloch_vector(projector(MINUS)), [-1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(bloch_vector(projector(StateVector([S, 1j * S]))), [0, 1, 0], atol=1e-15)


complex_amp = st.complex_numbers(min_magnitude=0, max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(complex_amp, min_size=8, max_size=8).filter(lambda a: np.linalg.norm(a) > 1e-3))
def test_reduced_states_are_valid_densities(amps):
    v = np.array(amps) / np.linalg.norm(amps)
    rho = projector(StateVector(v, (2, 2, 2)))
    for keep in ([0], [0, 1], [1, 2]):
        red = partial_trace(rho, None, keep)
        m = red.data
        assert np.max(np.abs(m - m.conj().T)) <= 1e-12
        assert abs(np.trace(m) - 1) <= 1e-12
        assert min_eigenvalue(red) >= -1e-10
        assert 1 / red.dim - 1e-12 <= purity(red) <= 1 + 1e-12
