import numpy as np
import pytest
from scipy import stats

from fksim.potentials import SpecError
from fksim.samplers import (FAMILIES, LevySpec, empirical_char_function,
                            gaussian_increment, levy_increment,
                            positive_stable)
from fksim.streams import substream

N_LAW = 100_000


def probe_grid(d, rng, n_freq=20, radius=3.0):
    """Fixed probe frequencies with |u| <= radius."""
    u = rng.normal(size=(n_freq, d))
    u *= (radius * rng.uniform(0.1, 1.0, size=(n_freq, 1))
          / np.linalg.norm(u, axis=1, keepdims=True))
    return u


def char_sup_error(spec, dt, seed):
    rng = substream(seed, "charfun", spec.family, int(dt * 1000))
    samples = levy_increment(spec, dt, rng, size=N_LAW)
    u = probe_grid(spec.dimension, substream(seed, "charfun-grid"))
    errs = [abs(empirical_char_function(samples, ui)
                - np.exp(-dt * spec.char_exponent(ui)))
            for ui in u]
    return max(errs)


class TestGaussianIncrement:
    def test_variance_matches_dt(self):
        rng = substream(21, "gauss-var")
        dt = 0.05
        draws = gaussian_increment(2, dt, rng, size=1_000_000)
        var = draws.var(axis=0)
        assert np.allclose(var, dt, rtol=0.01)

    def test_cross_covariance_small(self):
        rng = substream(21, "gauss-cov")
        n = 200_000
        draws = gaussian_increment(2, 1.0, rng, size=n)
        cov = np.mean(draws[:, 0] * draws[:, 1])
        assert abs(cov) < 3.0 / np.sqrt(n)

    def test_small_dt_small_magnitude(self):
        rng = substream(21, "gauss-dt")
        draws = gaussian_increment(3, 1e-10, rng, size=1000)
        assert np.linalg.norm(draws, axis=1).max() < 1e-3

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(SpecError):
            gaussian_increment(2, 0.0, substream(21, "x"))


class TestPositiveStable:
    def test_strictly_positive(self):
        rng = substream(22, "stable-pos")
        s = positive_stable(0.7, 0.3, rng, size=50_000)
        assert np.all(s > 0)

    def test_half_stable_closed_form_ks(self):
        # beta = 1/2: S  =law=  t^2 / (2 Z^2), Z standard normal
        rng = substream(22, "stable-ks")
        t = 0.7
        s = positive_stable(0.5, t, rng, size=N_LAW)
        z = rng.standard_normal(N_LAW)
        ref = t ** 2 / (2.0 * z ** 2)
        d_stat = stats.ks_2samp(s, ref).statistic
        crit = 1.628 * np.sqrt(2.0 / N_LAW)  # 1% two-sample critical value
        assert d_stat < crit

    def test_laplace_transform(self):
        rng = substream(22, "stable-laplace")
        beta, t = 0.6, 0.4
        s = positive_stable(beta, t, rng, size=N_LAW)
        for lam in (0.5, 1.0, 2.0):
            emp = np.mean(np.exp(-lam * s))
            assert abs(emp - np.exp(-t * lam ** beta)) < 4.0 / np.sqrt(N_LAW)

    def test_domain_validation(self):
        rng = substream(22, "stable-dom")
        with pytest.raises(SpecError):
            positive_stable(1.2, 1.0, rng)
        with pytest.raises(SpecError):
            positive_stable(0.5, -1.0, rng)


class TestLevyIncrement:
    def test_alpha2_variance(self):
        spec = LevySpec("isotropic_stable", 2, alpha=2.0)
        rng = substream(23, "alpha2")
        dt = 0.05
        draws = levy_increment(spec, dt, rng, size=500_000)
        assert np.allclose(draws.var(axis=0), 2.0 * dt, rtol=0.02)

    def test_brownian_vs_stable2_normalization(self):
        # Psi = |u|^2/2 vs |u|^2: variance dt vs 2dt, never conflated
        b = LevySpec("brownian_standard", 2)
        s = LevySpec("isotropic_stable", 2, alpha=2.0)
        assert b.char_exponent([1.0, 0.0]) == pytest.approx(0.5)
        assert s.char_exponent([1.0, 0.0]) == pytest.approx(1.0)

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("dt", [0.01, 0.1])
    def test_char_function_sup_error(self, family, dt):
        spec = LevySpec(family, 2, alpha=1.5, m=1.0)
        err = char_sup_error(spec, dt, seed=23)
        assert err <= 4.0 / np.sqrt(N_LAW) + 0.01

    def test_char_exponent_zero_at_origin(self):
        for family in FAMILIES:
            spec = LevySpec(family, 2, alpha=1.5, m=1.0)
            assert spec.char_exponent([0.0, 0.0]) == pytest.approx(0.0)

    def test_isotropy(self):
        spec = LevySpec("isotropic_stable", 2, alpha=1.5)
        rng = substream(23, "isotropy")
        draws = levy_increment(spec, 0.1, rng, size=N_LAW)
        # heavy tails: test isotropy on the directions, which are exactly uniform
        mean_dir = np.mean(draws / np.linalg.norm(draws, axis=1, keepdims=True), axis=0)
        assert np.linalg.norm(mean_dir) < 4.0 / np.sqrt(N_LAW)
        u = draws / np.linalg.norm(draws, axis=1, keepdims=True)
        cov = u.T @ u / len(u)
        assert abs(cov[0, 1] / cov[0, 0]) < 0.05

    def test_stable_self_similarity(self):
        # increments at dt and c*dt agree in law after scaling by c^{1/alpha}
        alpha, c = 1.5, 4.0
        spec = LevySpec("isotropic_stable", 2, alpha=alpha)
        r1 = np.linalg.norm(levy_increment(spec, 0.05, substream(23, "ss-a"),
                                           size=N_LAW), axis=1)
        r2 = np.linalg.norm(levy_increment(spec, c * 0.05, substream(23, "ss-b"),
                                           size=N_LAW), axis=1)
        d_stat = stats.ks_2samp(r1 * c ** (1.0 / alpha), r2).statistic
        assert d_stat < 1.628 * np.sqrt(2.0 / N_LAW)

    def test_jump_diffusion_is_convolution(self):
        # char function of the sum equals the product of the parts
        spec = LevySpec("jump_diffusion", 2, alpha=1.5)
        g = LevySpec("isotropic_stable", 2, alpha=2.0)
        s = LevySpec("isotropic_stable", 2, alpha=1.5)
        u = np.array([0.7, -0.4])
        assert spec.char_exponent(u) == pytest.approx(
            g.char_exponent(u) + s.char_exponent(u))

    def test_relativistic_rejection_cap(self):
        spec = LevySpec("relativistic_stable", 2, alpha=1.0, m=500.0,
                        max_rejection_rounds=3)
        with pytest.raises(RuntimeError, match="rejection"):
            # acceptance ~ e^{-m dt} is tiny, the cap must trigger
            levy_increment(spec, 1.0, substream(23, "rel-cap"), size=64)

    def test_family_validation(self):
        with pytest.raises(SpecError):
            LevySpec("unknown", 2)
        with pytest.raises(SpecError):
            LevySpec("isotropic_stable", 2, alpha=2.5)
        with pytest.raises(SpecError):
            LevySpec("isotropic_stable", 1, alpha=1.5)  # d=1 only for brownian
        LevySpec("brownian_standard", 1)  # allowed


class TestEmpiricalCharFunction:
    def test_all_zero_samples(self):
        assert empirical_char_function(np.zeros((10, 2)), [1.0, 2.0]) == 1 + 0j

    def test_zero_frequency(self):
        rng = substream(24, "ecf")
        x = rng.normal(size=(100, 2))
        assert empirical_char_function(x, [0.0, 0.0]) == pytest.approx(1 + 0j)

    def test_antipodal_pi_phase(self):
        v = np.array([1.0, 0.0])
        samples = np.array([v, -v, v, -v])
        u = np.pi * v  # u . v = pi
        val = empirical_char_function(samples, u)
        assert val == pytest.approx(-1 + 0j)

    def test_modulus_bounded(self):
        rng = substream(24, "ecf-mod")
        x = rng.normal(size=(1000, 3))
        assert abs(empirical_char_function(x, [1.0, 2.0, -1.0])) <= 1.0 + 1e-12

    def test_empty_rejected(self):
        with pytest.raises(SpecError):
            empirical_char_function(np.empty((0, 2)), [1.0, 0.0])
