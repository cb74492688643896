import numpy as np
import pytest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from qracsim.qcore import (
    DensityMatrix,
    Ket,
    F_from_f,
    bell_state,
    embed_operator,
    entanglement_fidelity,
    f_from_F,
    haar_random_ket,
    kron,
    partial_trace,
    states_equal,
    transmission_fidelity_mc,
)

X2 = np.array([[0, 1], [1, 0]], dtype=complex)


def random_density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


class TestTypes:
    def test_ket_rejects_unnormalised(self):
        with pytest.raises(ValueError):
            Ket(np.array([1.0, 1.0]))

    def test_ket_rejects_nan(self):
        with pytest.raises(ValueError):
            Ket(np.array([np.nan, 0.0]))

    def test_density_rejects_nonhermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_density_rejects_wrong_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2))

    def test_density_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))


class TestBellState:
    def test_d2_amplitudes(self):
        v = bell_state(2).amplitudes
        assert np.allclose(v, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_d3_positions(self):
        v = bell_state(3).amplitudes
        expected = np.zeros(9)
        expected[[0, 4, 8]] = 1 / np.sqrt(3)
        assert np.allclose(v, expected)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_reduced_state_is_maximally_mixed(self, d):
        rho = DensityMatrix(bell_state(d).projector())
        for keep in ([0], [1]):
            reduced = partial_trace(rho, [d, d], keep)
            assert np.allclose(reduced.matrix, np.eye(d) / d, atol=1e-12)

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            bell_state(1)


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_shift_on_first_qubit(self):
        ket00 = np.array([1, 0, 0, 0], dtype=complex)
        assert np.allclose(kron(X2, np.eye(2)) @ ket00, [0, 0, 1, 0])

    def test_trace_multiplicative_on_random_inputs(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            # independent oracle: direct product of the two traces
            assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))


class TestEmbedOperator:
    def test_single_site_matches_kron(self):
        assert np.allclose(embed_operator(X2, (0,), [2, 2]), np.kron(X2, np.eye(2)))
        assert np.allclose(embed_operator(X2, (1,), [2, 2]), np.kron(np.eye(2), X2))

    def test_two_site_permutation(self):
        rng = np.random.default_rng(5)
        op = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        direct = np.kron(op, np.eye(2))
        assert np.allclose(embed_operator(op, (0, 1), [2, 2, 2]), direct)
        # acting on sites (1, 0) swaps the tensor factors of the operator
        swapped = embed_operator(op, (1, 0), [2, 2, 2])
        swap = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                swap[j * 2 + i, i * 2 + j] = 1
        assert np.allclose(swapped, np.kron(swap @ op @ swap.T, np.eye(2)))

    def test_rejects_bad_sites(self):
        with pytest.raises(ValueError):
            embed_operator(X2, (3,), [2, 2])


class TestPartialTrace:
    def test_bell_reduction(self):
        rho = DensityMatrix(bell_state(2).projector())
        assert np.allclose(partial_trace(rho, [2, 2], [0]).matrix, np.eye(2) / 2)

    def test_product_state_factors(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            rho_a = random_density(2, rng)
            rho_b = random_density(2, rng)
            prod = DensityMatrix(kron(rho_a.matrix, rho_b.matrix))
            assert np.allclose(partial_trace(prod, [2, 2], [0]).matrix, rho_a.matrix, atol=1e-12)
            assert np.allclose(partial_trace(prod, [2, 2], [1]).matrix, rho_b.matrix, atol=1e-12)

    def test_keep_all_is_identity(self):
        rng = np.random.default_rng(4)
        rho = random_density(6, rng)
        back = partial_trace(rho, [2, 3], [0, 1])
        assert np.allclose(back.matrix, rho.matrix, atol=1e-12)

    def test_dimension_mismatch(self):
        rho = DensityMatrix(np.eye(4) / 4)
        with pytest.raises(ValueError):
            partial_trace(rho, [2, 3], [0])

    @settings(max_examples=25, deadline=None)
    @given(
        dims=st.lists(st.integers(2, 4), min_size=3, max_size=3),
        keep_mask=st.integers(1, 6),
        seed=st.integers(0, 10**6),
    )
    def test_trace_preserved(self, dims, keep_mask, seed):
        keep = [i for i in range(3) if keep_mask >> i & 1]
        rng = np.random.default_rng(seed)
        rho = random_density(int(np.prod(dims)), rng)
        reduced = partial_trace(rho, dims, keep)
        assert abs(np.trace(reduced.matrix).real - 1.0) < 1e-12


class TestEntanglementFidelity:
    def test_bell_is_one(self):
        assert entanglement_fidelity(DensityMatrix(bell_state(2).projector())).value == pytest.approx(1.0)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_maximally_mixed(self, d):
        rho = DensityMatrix(np.eye(d * d) / d**2)
        assert entanglement_fidelity(rho).value == pytest.approx(1 / d**2)

    def test_shifted_bell_is_orthogonal(self):
        ket = Ket(kron(X2, np.eye(2)) @ bell_state(2).amplitudes)
        assert entanglement_fidelity(DensityMatrix(ket.projector())).value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_range_on_random_states(self, d):
        rng = np.random.default_rng(9)
        for _ in range(100):
            f = entanglement_fidelity(random_density(d * d, rng)).value
            assert 0.0 <= f <= 1.0

    def test_rejects_non_square_dimension(self):
        with pytest.raises(ValueError):
            entanglement_fidelity(DensityMatrix(np.eye(6) / 6))


class TestFidelityConversion:
    def test_perfect(self):
        for d in range(2, 7):
            assert f_from_F(1, d) == 1

    def test_quarter_qubit(self):
        assert f_from_F(Fraction(1, 4), 2) == Fraction(1, 2)

    @pytest.mark.parametrize("d", range(2, 7))
    def test_maximally_mixed_value(self, d):
        # rational oracle: (d/d^2 + 1)/(d + 1) simplifies to 1/d
        assert f_from_F(Fraction(1, d * d), d) == Fraction(1, d)

    @pytest.mark.parametrize("d", range(2, 7))
    def test_inverse_dimension_value(self, d):
        # rational oracle: (d/d + 1)/(d + 1) simplifies to 2/(d + 1)
        assert f_from_F(Fraction(1, d), d) == Fraction(2, d + 1)

    @settings(max_examples=60, deadline=None)
    @given(
        num=st.integers(0, 1000),
        den=st.integers(1, 1000),
        d=st.integers(2, 9),
    )
    def test_round_trip_exact(self, num, den, d):
        f_val = Fraction(num, den * 1000 + num)  # arbitrary rational in [0, 1)
        assert f_from_F(F_from_f(f_val, d), d) == f_val
        assert F_from_f(f_from_F(f_val, d), d) == f_val


class TestStatesEqual:
    def test_global_phase_ignored(self):
        a = bell_state(3)
        b = Ket(np.exp(1j * 0.7) * a.amplitudes)
        assert states_equal(a, b)

    def test_distinct_states(self):
        a = Ket(np.array([1, 0], dtype=complex))
        b = Ket(np.array([0, 1], dtype=complex))
        assert not states_equal(a, b)


class TestTransmissionFidelityMc:
    def test_identity_channel(self):
        est = transmission_fidelity_mc(lambda k: DensityMatrix(k.projector()), 2, samples=50, seed=1)
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert est.std_error == pytest.approx(0.0, abs=1e-12)

    def test_depolarising_channel(self):
        est = transmission_fidelity_mc(lambda k: DensityMatrix(np.eye(2) / 2), 2, samples=200, seed=2)
        assert est.value == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_unitary_channel_matches_conversion(self, d):
        rng = np.random.default_rng(21 + d)
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        u, _ = np.linalg.qr(z)

        def channel(ket, u=u):
            return DensityMatrix(np.outer(u @ ket.amplitudes, (u @ ket.amplitudes).conj()))

        choi = DensityMatrix(Ket(kron(u, np.eye(d)) @ bell_state(d).amplitudes).projector())
        f_expected = float(f_from_F(Fraction(entanglement_fidelity(choi).value), d))
        est = transmission_fidelity_mc(channel, d, samples=200, seed=7)
        spread = max(est.std_error, 1e-12)
        assert abs(est.value - f_expected) < 3 * spread + 1e-9

    def test_deterministic_for_fixed_seed(self):
        channel = lambda k: DensityMatrix(np.eye(2) / 2)  # noqa: E731
        a = transmission_fidelity_mc(channel, 2, samples=130, seed=5)
        b = transmission_fidelity_mc(channel, 2, samples=130, seed=5)
        assert a == b

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            transmission_fidelity_mc(lambda k: DensityMatrix(np.eye(2) / 2), 2, samples=0, seed=0)


def test_haar_random_ket_is_normalised():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5):
        assert abs(np.linalg.norm(haar_random_ket(d, rng).amplitudes) - 1) < 1e-12
