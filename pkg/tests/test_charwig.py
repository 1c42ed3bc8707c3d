"""Characteristic/Wigner functions, partial transpose, negativity volume."""

import numpy as np
import pytest

import ecdwitness as ew
from ecdwitness.charwig import _simpson_weights
from ecdwitness.fock import FockSpace


def random_state(rng, d=8, mixed=False, pad=4):
    """Random state with support on d levels, embedded with `pad` empty levels."""
    v = np.zeros(d + pad, dtype=complex)
    v[:d] = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    if not mixed:
        return ew.PureState(FockSpace((d + pad,)), v)
    p = rng.uniform(0.2, 0.8)
    rho = (1 - p) * np.outer(v, v.conj())
    rho[:d, :d] += p * np.eye(d) / d
    return ew.DensityOperator(FockSpace((d + pad,)), rho)


class TestCharFn:
    def test_at_zero(self):
        st = ew.make_state("cat2", beta=1.0)
        assert ew.char_fn(st, [0, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_gaussian(self):
        vac = ew.make_state("vacuum")
        for xi in (0.3, 1.1 - 0.4j, 2.0j):
            assert ew.char_fn(vac, xi) == pytest.approx(np.exp(-abs(xi) ** 2 / 2),
                                                        abs=1e-12)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(4)
        st = random_state(rng, mixed=True)
        for xi in (0.4 + 0.2j, -1.0j, 0.8):
            assert ew.char_fn(st, -xi) == pytest.approx(
                np.conj(ew.char_fn(st, xi)), abs=1e-12)

    def test_modulus_bounded(self):
        rng = np.random.default_rng(5)
        st = random_state(rng, mixed=True)
        xis = rng.standard_normal((50, 1)) + 1j * rng.standard_normal((50, 1))
        vals = ew.char_fn_batch(st, xis)
        assert np.abs(vals).max() <= 1 + 1e-10

    def test_pure_vs_density_paths_agree(self):
        st = ew.make_state("fock_bell", theta=0.4)
        xi = np.array([0.3 - 0.2j, 0.5j])
        assert ew.char_fn(st, xi) == pytest.approx(
            ew.char_fn(st.density(), xi), abs=1e-12)

    def test_three_mode_path_matches_kron(self):
        rng = np.random.default_rng(6)
        dims = (4, 3, 5)
        v = rng.standard_normal(60) + 1j * rng.standard_normal(60)
        v /= np.linalg.norm(v)
        st = ew.PureState(FockSpace(dims), v)
        xi = np.array([0.2 + 0.1j, -0.3j, 0.15])
        big = ew.multimode_displacement(FockSpace(dims), xi)
        expect = np.vdot(v, big @ v)
        assert ew.char_fn(st, xi) == pytest.approx(expect, abs=1e-12)
        rho = st.density()
        assert ew.char_fn(rho, xi) == pytest.approx(expect, abs=1e-12)

    def test_tail_warning(self):
        # a coherent state squeezed into a too-small space flags itself
        amps = ew.fock._coherent_amps(6, 1.8)
        amps = amps / np.linalg.norm(amps)
        st = ew.PureState(FockSpace((6,)), amps)
        with pytest.warns(ew.TruncationWarning):
            ew.char_fn(st, 0.5)


class TestWigner:
    def test_vacuum_origin(self):
        assert ew.wigner(ew.make_state("vacuum"), 0j) == pytest.approx(
            2 / np.pi, abs=1e-12)
        two = ew.make_state("vacuum", modes=2)
        assert ew.wigner(two, [0j, 0j]) == pytest.approx((2 / np.pi) ** 2,
                                                         abs=1e-12)

    def test_single_photon_origin(self):
        assert ew.wigner(ew.make_state("fock", n=(1,)), 0j) == pytest.approx(
            -2 / np.pi, abs=1e-12)

    def test_grid_integral_is_trace(self):
        st = ew.make_state("cat1", beta=1.2)
        axis = np.linspace(-6, 6, 121)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        vals = ew.wigner_batch(st, (x + 1j * y).reshape(-1, 1))
        w = _simpson_weights(121) * (axis[1] - axis[0])
        integral = np.outer(w, w).reshape(-1) @ vals
        assert integral == pytest.approx(1.0, abs=1e-4)

    def test_fourier_consistency_with_char_fn(self):
        # numerically inverse-transforming a char-fn grid reproduces wigner():
        # W(alpha) = pi^-2 int chi(xi) exp(alpha xi^* - alpha^* xi) d^2 xi
        rng = np.random.default_rng(7)
        st = random_state(rng, d=10, mixed=True)
        L, n = 7.5, 151
        axis = np.linspace(-L, L, n)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        xis = (x + 1j * y).reshape(-1, 1)
        chi = ew.char_fn_batch(st, xis)
        w1 = _simpson_weights(n) * (axis[1] - axis[0])
        weight = np.outer(w1, w1).reshape(-1)
        for alpha in (0.0j, 0.4 - 0.3j, 1.0 + 0.2j):
            kernel = np.exp(alpha * np.conj(xis[:, 0]) - np.conj(alpha) * xis[:, 0])
            val = np.real(np.sum(weight * chi * kernel)) / np.pi ** 2
            assert val == pytest.approx(ew.wigner(st, alpha), abs=1e-3)


class TestReducedCollectiveWigner:
    def test_product_coherent_nonnegative(self):
        st = ew.make_state("coherent", beta=[0.6, 0.6])
        axis = np.linspace(-3, 3, 41)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        marg = ew.collective_marginal(st)
        vals = ew.wigner_batch(marg, (x + 1j * y).reshape(-1, 1))
        assert vals.min() > -1e-8

    def test_balanced_single_photon_negative(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        assert ew.reduced_collective_wigner(st, 0j) == pytest.approx(
            -2 / np.pi, abs=1e-9)

    def test_matches_explicit_marginal_integration(self):
        # integrating W over the minus coordinate reproduces the rotated trace
        st = ew.make_state("fock_bell", theta=0.6, cutoffs=(10, 10))
        L, n = 5.0, 81
        axis = np.linspace(-L, L, n)
        w1 = _simpson_weights(n) * (axis[1] - axis[0])
        x, y = np.meshgrid(axis, axis, indexing="ij")
        a_minus = (x + 1j * y).reshape(-1)
        weight = np.outer(w1, w1).reshape(-1)
        for alpha_plus in (0j, 0.3 + 0.1j):
            a1 = (alpha_plus + a_minus) / np.sqrt(2)
            a2 = (alpha_plus - a_minus) / np.sqrt(2)
            vals = ew.wigner_batch(st, np.stack([a1, a2], axis=1), check=False)
            marginal = float(np.sum(weight * vals))
            direct = ew.reduced_collective_wigner(st, alpha_plus)
            assert marginal == pytest.approx(direct, abs=1e-6)


class TestPartialTranspose:
    def test_product_state_stays_psd(self):
        a = ew.make_state("coherent", beta=[0.4], cutoffs=(8,)).density()
        b = ew.make_state("thermal", nbar=0.5, cutoffs=(8,))
        joint = ew.DensityOperator(FockSpace((8, 8)), np.kron(a.matrix, b.matrix))
        assert ew.pt_min_eigenvalue(joint, [1]) > -1e-10

    def test_balanced_single_photon_min_eigenvalue(self):
        rho = ew.make_state("fock_bell", theta=np.pi / 4).density()
        assert ew.pt_min_eigenvalue(rho, [1]) == pytest.approx(-0.5, abs=1e-10)

    def test_double_transpose_restores(self):
        rho = ew.make_state("cat2", beta=0.9).density()
        pt = ew.partial_transpose(rho, [1])
        pt2 = ew.DensityOperator(rho.space, pt, validate=False)
        assert np.abs(ew.partial_transpose(pt2, [1]) - rho.matrix).max() == 0.0

    def test_wigner_rule(self):
        # W_{rho^{T_B}}(a, b) = W_rho(a, b^*)
        rho = ew.make_state("fock_bell", theta=0.5).density()
        pt = ew.DensityOperator(rho.space, ew.partial_transpose(rho, [1]),
                                validate=False)
        rng = np.random.default_rng(8)
        for _ in range(5):
            a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            lhs = ew.wigner(pt, [a, b], check=False)
            rhs = ew.wigner(rho, [a, np.conj(b)], check=False)
            assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_trace_and_hermiticity(self):
        rho = ew.make_state("pstmsv", r=0.3).density()
        pt = ew.partial_transpose(rho, [1])
        assert np.trace(pt).real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(pt - pt.conj().T).max() < 1e-12


class TestNegativityVolume:
    def test_vacuum_zero(self):
        val, err = ew.negativity_volume(ew.make_state("vacuum"), points=81)
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_single_photon_closed_form(self):
        val, err = ew.negativity_volume(ew.make_state("fock", n=(1,)))
        assert val == pytest.approx(2 * np.exp(-0.5) - 1, abs=1e-4)

    def test_two_mode_families_reduce(self):
        # |1,0>, the beamsplit family, and the photon-subtracted squeezed
        # vacuum all share the single-photon volume
        expect = 2 * np.exp(-0.5) - 1
        for theta in (0.2, 0.5, np.pi / 4, 1.0, 1.4):
            val, _ = ew.negativity_volume(ew.make_state("fock_bell", theta=theta),
                                          points=201)
            assert val == pytest.approx(expect, abs=3e-4)
        for r in (0.25, 0.7, 1.0):
            val, _ = ew.negativity_volume(ew.make_state("pstmsv", r=r),
                                          points=201)
            assert val == pytest.approx(expect, abs=3e-4)

    def test_cat_against_dense_grid_oracle(self):
        # independent oracle: dense Simpson grid at n=201, L=8 on the
        # single-mode reduction
        beta = 2.0
        cat1 = ew.make_state("cat1", beta=np.sqrt(2) * beta)
        L, n = 8.0, 201
        axis = np.linspace(-L, L, n)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        vals = ew.wigner_batch(cat1, (x + 1j * y).reshape(-1, 1))
        w1 = _simpson_weights(n) * (axis[1] - axis[0])
        weight = np.outer(w1, w1).reshape(-1)
        oracle = float(np.sum(weight * 0.5 * (np.abs(vals) - vals)))
        val, err = ew.negativity_volume(ew.make_state("cat2", beta=beta))
        assert val == pytest.approx(oracle, abs=max(5e-4, 3 * err))

    def test_unreduced_two_mode_grid_agrees(self):
        # the slow 4D path agrees with the registered reduction
        st = ew.make_state("fock_bell", theta=np.pi / 4, cutoffs=(6, 6))
        slow, _ = ew.negativity_volume(st, half_width=4.0, points=41,
                                       reduce=False, check=False)
        assert slow == pytest.approx(2 * np.exp(-0.5) - 1, abs=2e-2)

    def test_even_point_count_rejected(self):
        with pytest.raises(ValueError):
            ew.negativity_volume(ew.make_state("vacuum"), points=80)


class TestCatTraceDistanceBound:
    def test_small_beta_limit(self):
        assert ew.cat_ntr_lower_bound(0.0) == 0.0
        assert ew.cat_ntr_lower_bound(0.05, points=101) < 0.05

    def test_beta_two_value_against_grid_oracle(self):
        # oracle: dense grid minimum without polish
        beta = 2.0
        cat1 = ew.make_state("cat1", beta=np.sqrt(2) * beta)
        axis = np.linspace(-6, 6, 401)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        vals = ew.wigner_batch(cat1, (x + 1j * y).reshape(-1, 1))
        oracle = max(0.0, -np.pi / 2 * vals.min())
        got = ew.cat_ntr_lower_bound(beta)
        assert got >= oracle - 1e-12
        assert got == pytest.approx(oracle, rel=1e-3)

    def test_bounded_by_trace_distance_range(self):
        for beta in (0.5, 1.0, 2.0, 3.0):
            assert ew.cat_ntr_lower_bound(beta, points=201) <= 2.0


class TestTheorem2Numeric:
    def test_separable_states_have_nonnegative_collective_marginal(self):
        # random separable two-mode states: min over a 41^2 grid >= -1e-8
        rng = np.random.default_rng(11)
        axis = np.linspace(-3.5, 3.5, 41)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        alphas = (x + 1j * y).reshape(-1, 1)
        for _ in range(12):
            rho = _random_separable(rng, (16, 16))
            marg = ew.collective_marginal(rho)
            vals = ew.wigner_batch(marg, alphas, check=False)
            assert vals.min() > -1e-8


def _random_separable(rng, dims):
    """Mixture of random product Gaussians and product Fock mixtures.

    Parameters stay small enough that the truncated factors carry < 1e-10
    tails, so marginal Wigner values are trustworthy at the 1e-8 level.
    """
    terms = rng.integers(2, 5)
    mat = np.zeros((dims[0] * dims[1], dims[0] * dims[1]), dtype=complex)
    weights = rng.dirichlet(np.ones(terms))
    for w in weights:
        factors = []
        for d in dims:
            if rng.random() < 0.5:
                mag = 0.6 * np.sqrt(rng.random())
                alpha = mag * np.exp(2j * np.pi * rng.random())
                r = rng.uniform(-0.2, 0.2)
                st = ew.make_state("coherent", beta=[alpha], cutoffs=(d,))
                amp = ew.squeeze(ew.FockSpace((d,)), 0, r) @ st.amplitudes
                amp = amp / np.linalg.norm(amp)
                factors.append(np.outer(amp, amp.conj()))
            else:
                probs = rng.dirichlet(np.ones(3))
                diag = np.zeros(d)
                diag[:3] = probs
                factors.append(np.diag(diag).astype(complex))
        mat += w * np.kron(factors[0], factors[1])
    mat = 0.5 * (mat + mat.conj().T)
    return ew.DensityOperator(ew.FockSpace(dims), mat / np.trace(mat).real)
