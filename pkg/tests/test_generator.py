import numpy as np
import pytest

from backflow.generator import (
    GeneratorSpec,
    I2,
    SIGMA_MINUS,
    SIGMA_X,
    SIGMA_Z,
    compile_generator,
    dissipator,
    full_generator,
    hamiltonian_part,
    jump_operator,
    nonsecular_term_table,
    nonsecular_terms,
    secular_generator,
    simplified_nonsecular_generator,
    undriven_generator,
    unvec,
    vec,
)
from backflow.params import ModelParams, UndrivenParams

from conftest import random_density


def apply(L, rho):
    return unvec(L @ vec(rho))


class TestVectorization:
    def test_round_trip(self, rng):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.array_equal(unvec(vec(m)), m)

    def test_column_stacking_order(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(vec(m), [1.0, 3.0, 2.0, 4.0])


class TestDissipator:
    def test_pure_decay_from_excited(self):
        rho_e = np.diag([1.0, 0.0]).astype(complex)
        out = apply(dissipator(SIGMA_MINUS, 1.0), rho_e)
        assert out == pytest.approx(np.diag([-1.0, 1.0]))

    def test_dephasing_hits_only_coherences(self, rng):
        c = 0.3 - 0.2j
        rho = np.array([[0.6, c], [np.conj(c), 0.4]])
        g0 = 0.7
        out = apply(dissipator(SIGMA_Z, g0), rho)
        assert out[0, 0] == pytest.approx(0.0, abs=1e-14)
        assert out[1, 1] == pytest.approx(0.0, abs=1e-14)
        assert out[0, 1] == pytest.approx(-2.0 * g0 * c)

    def test_zero_rate_is_zero_map(self):
        assert np.all(dissipator(SIGMA_MINUS, 0.0) == 0.0)

    def test_linear_in_rate_including_negative(self, rng):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert dissipator(A, -0.3) == pytest.approx(-0.3 * dissipator(A, 1.0))


class TestHamiltonianPart:
    def test_precession_direction(self):
        # H = (w/2) sigma_z on the sigma_x eigenstate: xdot = -w y, ydot = +w x
        w = 2.0
        Lh = hamiltonian_part(0.5 * w * SIGMA_Z)
        rho = 0.5 * (I2 + SIGMA_X)
        out = apply(Lh, rho)
        ydot = np.real(np.trace(out @ np.array([[0, -1j], [1j, 0]])))
        xdot = np.real(np.trace(out @ SIGMA_X))
        assert xdot == pytest.approx(0.0, abs=1e-14)
        assert ydot == pytest.approx(w)

    def test_zero_hamiltonian(self):
        assert np.all(hamiltonian_part(np.zeros((2, 2))) == 0.0)

    def test_commuting_state_is_fixed(self):
        Lh = hamiltonian_part(0.7 * SIGMA_Z)
        rho = np.diag([0.8, 0.2]).astype(complex)
        assert np.abs(apply(Lh, rho)).max() < 1e-14

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hamiltonian_part(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.fixture(scope="module")
def driven_params():
    return ModelParams.from_dimensionless(s=1.0, p=2.0, alpha=0.6, Delta=1.0, Omega=2.0)


class TestStructuralInvariants:
    @pytest.mark.parametrize("builder", [secular_generator, full_generator,
                                         simplified_nonsecular_generator])
    def test_trace_annihilation_and_hermiticity(self, builder, driven_params):
        rng = np.random.default_rng(42)
        for T in (0.0, 0.3, 2.0, 9.0):
            L = builder(T, driven_params)
            for _ in range(250):
                rho = random_density(rng)
                out = apply(L, rho)
                assert abs(out.trace()) < 1e-12
                assert np.abs(out - out.conj().T).max() < 1e-12

    def test_linearity(self, driven_params, rng):
        L = full_generator(1.3, driven_params)
        r1, r2 = random_density(rng), random_density(rng)
        a, b = 0.3, -1.7
        lhs = apply(L, a * r1 + b * r2)
        rhs = a * apply(L, r1) + b * apply(L, r2)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_dissipative_part_vanishes_at_T0(self, driven_params):
        for builder in (secular_generator, simplified_nonsecular_generator, full_generator):
            L0 = builder(0.0, driven_params)
            H = hamiltonian_part(0.5 * driven_params.regime.p * SIGMA_Z)
            assert np.abs(L0 - H).max() < 1e-14


class TestSecular:
    def test_symmetric_fixed_point_on_resonance(self):
        # Delta=0, s=0: gamma_+ = gamma_-, so the maximally mixed state is fixed
        params = ModelParams.from_dimensionless(s=0.0, p=4.0, alpha=0.5)
        c = params.coeffs
        assert c.c_plus**2 == pytest.approx(0.25)
        assert c.c_minus**2 == pytest.approx(0.25)
        assert c.c_zero**2 == pytest.approx(0.25)
        L = secular_generator(6.0, params)
        mixed = 0.5 * I2
        assert np.abs(apply(L, mixed)).max() < 1e-14

    def test_channel_rate_pairing(self):
        # at large T with s=1, p=2: q_+ = -1, q_- = 3; the lowering channel
        # must carry the q_+ rate
        params = ModelParams.from_dimensionless(s=1.0, p=2.0, alpha=1.0, Delta=3.0, Omega=4.0)
        L = secular_generator(60.0, params)
        rho_e = np.diag([1.0, 0.0]).astype(complex)
        decay = np.real(apply(L, rho_e)[1, 1])
        gamma_plus_inf = 1.0 / (2.0 * (1.0 + 1.0))
        assert decay == pytest.approx(params.coeffs.c_plus**2 * gamma_plus_inf, rel=1e-10)


class TestNonsecular:
    def test_vanishes_without_drive_mixing(self):
        # Omega = 0 sends C0 and C+C- to zero: every cross term dies
        params = ModelParams.from_dimensionless(s=1.0, p=2.0, alpha=0.7,
                                                Delta=1.0, Omega=0.0)
        assert np.abs(nonsecular_terms(3.0, params)).max() == 0.0

    def test_term_order_invariance(self, driven_params):
        table = nonsecular_term_table(driven_params.coeffs)
        base = nonsecular_terms(2.1, driven_params, table=table)
        rng = np.random.default_rng(0)
        for _ in range(5):
            perm = [table[i] for i in rng.permutation(len(table))]
            assert np.abs(nonsecular_terms(2.1, driven_params, table=perm)).max() > 0
            assert nonsecular_terms(2.1, driven_params, table=perm) == pytest.approx(base)

    def test_full_equals_secular_plus_cross_terms(self, driven_params):
        T = 1.7
        lhs = full_generator(T, driven_params)
        rhs = secular_generator(T, driven_params) + nonsecular_terms(T, driven_params)
        assert np.abs(lhs - rhs).max() < 1e-14


class TestSimplified:
    def test_jump_operator_normalized(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            params = ModelParams.from_dimensionless(
                s=0.0, p=1.0, alpha=0.5,
                Delta=rng.uniform(-4, 4), Omega=rng.uniform(1e-3, 4),
            )
            A = jump_operator(params.coeffs)
            assert np.trace(A.conj().T @ A).real == pytest.approx(1.0, abs=1e-12)

    def test_coherent_correction_reduces_to_sigma_x(self, driven_params):
        # H' = lamb C0 (C+ - C-) sigma_x and C+ - C- = 1
        gen = compile_generator(GeneratorSpec("simplified_nonsecular", driven_params))
        c0 = driven_params.coeffs.c_zero
        expected = hamiltonian_part(c0 * SIGMA_X)
        assert gen.ham_basis[0] == pytest.approx(expected)

    def test_p_zero_consistency_with_full(self):
        # at p = 0 the cross terms regroup exactly into the single channel + H'
        rng = np.random.default_rng(9)
        Ts = np.linspace(0.0, 20.0, 100)
        for _ in range(10):
            params = ModelParams.from_dimensionless(
                s=rng.uniform(0, 6), p=0.0, alpha=rng.uniform(0.1, 1.0),
                Delta=rng.uniform(-3, 3), Omega=rng.uniform(0.1, 4),
            )
            full = compile_generator(GeneratorSpec("full_nonsecular", params)).batch(Ts)
            simp = compile_generator(GeneratorSpec("simplified_nonsecular", params)).batch(Ts)
            assert np.linalg.norm(full - simp, axis=(1, 2)).max() < 1e-10

    def test_secular_dominates_at_large_p(self):
        # integrated Frobenius distance between full and secular generators is
        # small relative to the generator norm once p >> 1
        params = ModelParams.from_dimensionless(s=5.0, p=100.0, alpha=0.5)
        Ts = np.linspace(0.0, 10.0, 1001)
        full = compile_generator(GeneratorSpec("full_nonsecular", params)).batch(Ts)
        sec = compile_generator(GeneratorSpec("secular", params)).batch(Ts)
        num = np.linalg.norm(full - sec, axis=(1, 2)).sum()
        den = np.linalg.norm(sec, axis=(1, 2)).sum()
        assert num / den < 0.1


class TestUndriven:
    def test_matches_plain_damping(self):
        u = UndrivenParams(alpha=0.3, lambda_width=1.0)
        from backflow.rates import nondriven_rate

        t = 2.0
        L = undriven_generator(t, u)
        assert L == pytest.approx(dissipator(SIGMA_MINUS, nondriven_rate(t, 0.3, 1.0)))

    def test_spec_validation(self):
        u = UndrivenParams(alpha=0.3, lambda_width=1.0)
        with pytest.raises(TypeError):
            GeneratorSpec("secular", u)
        with pytest.raises(ValueError):
            GeneratorSpec("weird", u)


class TestCompiledBatch:
    def test_batch_matches_single_calls(self, driven_params):
        gen = compile_generator(GeneratorSpec("full_nonsecular", driven_params))
        Ts = np.array([0.0, 0.7, 3.3, 14.0])
        batch = gen.batch(Ts)
        for i, T in enumerate(Ts):
            assert batch[i] == pytest.approx(gen(float(T)))

    def test_dissipative_plus_ham_is_full(self, driven_params):
        gen = compile_generator(GeneratorSpec("simplified_nonsecular", driven_params))
        Ts = np.array([0.5, 2.0])
        ham_c, _ = gen.coefficients(Ts)
        ham = gen.static_ham + np.einsum("nk,kab->nab", ham_c, gen.ham_basis)
        assert gen.batch(Ts) == pytest.approx(ham + gen.dissipative_batch(Ts))
