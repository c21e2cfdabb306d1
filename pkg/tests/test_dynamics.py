import numpy as np
import pytest

from fksim.dynamics import (InteractingModel, KineticModel, LevyModel,
                            OverdampedModel, step)
from fksim.potentials import DriftSpec, SpecError
from fksim.samplers import LevySpec
from fksim.streams import substream

from conftest import ConstantRng


class TestOverdamped:
    def test_zero_drift_zero_noise_fixed_point(self, zero_rng):
        model = OverdampedModel(drift=DriftSpec(kind="zero"), dim=2)
        x = np.array([0.3, -0.7])
        assert np.allclose(step(model, x, 0.1, zero_rng), x)

    def test_linear_drift_zero_noise(self, zero_rng):
        model = OverdampedModel(drift=DriftSpec(kind="linear", kappa=1.0), dim=2)
        out = step(model, np.array([1.0, 0.0]), 0.1, zero_rng)
        assert np.allclose(out, [0.9, 0.0])

    def test_one_step_gaussian_law(self):
        # exact one-step law: mean x(1 - kappa dt), per-coordinate variance dt
        model = OverdampedModel(drift=DriftSpec(kind="linear", kappa=1.0), dim=2)
        rng = substream(41, "ou-onestep")
        n, dt = 100_000, 0.05
        starts = np.tile([1.0, 0.0], (n, 1))
        out = step(model, starts, dt, rng)
        sigma = np.sqrt(dt)
        assert abs(out[:, 0].mean() - 0.95) < 4 * sigma / np.sqrt(n)
        assert np.allclose(out.var(axis=0), dt, rtol=0.01)

    def test_weak_order_richardson(self):
        # bias of E[X_T^2] halves when dt halves (linear drift, exact target)
        model = OverdampedModel(drift=DriftSpec(kind="linear", kappa=1.0), dim=1)
        T, n = 1.0, 600_000
        exact = np.exp(-2 * T) * 1.0 + (1 - np.exp(-2 * T)) / 2

        def mc_second_moment(dt, tag):
            rng = substream(41, "weak-order", tag)
            x = np.full((n, 1), 1.0)
            for _ in range(int(round(T / dt))):
                x = step(model, x, dt, rng)
            m2 = x[:, 0] ** 2
            return m2.mean(), m2.std(ddof=1) / np.sqrt(n)

        b1, se1 = mc_second_moment(0.1, "h")
        b2, se2 = mc_second_moment(0.05, "h2")
        bias1, bias2 = b1 - exact, b2 - exact
        # halving within statistical error
        assert abs(bias1 - 2 * bias2) < 4 * np.sqrt(se1 ** 2 + 4 * se2 ** 2)
        assert abs(bias1) > abs(bias2)  # refinement reduces the bias

    def test_stiff_diagnostic(self):
        model = OverdampedModel(
            drift=DriftSpec(kind="gradient_power", coefficient=1.0, exponent=8.0),
            dim=2)
        diag = {}
        step(model, np.array([[200.0, 0.0]]), 1.0, ConstantRng(0.0), diag=diag)
        assert diag["stiff_steps"] == 1


class TestKinetic:
    def test_free_flight(self, zero_rng):
        model = KineticModel(drift=DriftSpec(kind="zero"), gamma=1e-12, dim=2)
        state = np.array([0.0, 0.0, 1.0, 0.0])
        out = step(model, state, 0.5, zero_rng)
        assert np.allclose(out, [0.5, 0.0, 1.0, 0.0], atol=1e-12)

    def test_hamiltonian(self):
        model = KineticModel(drift=DriftSpec(kind="linear", kappa=1.0),
                             gamma=1.0, dim=2)
        h = model.hamiltonian(np.array([1.0, 0.0, 2.0, 0.0]))
        # V_c = |x|^2/2 + 1 (floored primitive), kinetic part |v|^2/2
        assert h == pytest.approx(0.5 + 1.0 + 2.0)

    def test_velocity_ou_stationary_variance(self):
        # free velocity is an exact OU recursion with stationary variance 1/(2 gamma)
        gamma, dt = 1.0, 1e-3
        model = KineticModel(drift=DriftSpec(kind="zero"), gamma=gamma, dim=1)
        rng = substream(42, "kinetic-ou")
        states = np.zeros((4096, 2))
        burn, keep = 7000, 2000
        acc = []
        for k in range(burn + keep):
            states = step(model, states, dt, rng)
            if k >= burn:
                acc.append(np.mean(states[:, 1] ** 2))
        assert np.mean(acc) == pytest.approx(1.0 / (2 * gamma), rel=0.03)

    def test_gamma_and_gradient_validation(self):
        with pytest.raises(SpecError):
            KineticModel(drift=DriftSpec(kind="zero"), gamma=0.0, dim=2)


class TestLevyAndInteracting:
    def test_levy_marginal_blocks_match_single_particle(self):
        # each block of the interacting model has the single-particle law
        levy = LevySpec("isotropic_stable", 2, alpha=1.5)
        inter = InteractingModel(n=2, levy=levy)
        single = LevyModel(levy=levy)
        n = 50_000
        joint = step(inter, np.zeros((n, 4)), 0.1, substream(43, "blocks"))
        solo = step(single, np.zeros((n, 2)), 0.1, substream(43, "solo"))
        from scipy import stats
        for block in (joint[:, :2], joint[:, 2:]):
            d_stat = stats.ks_2samp(np.linalg.norm(block, axis=1),
                                    np.linalg.norm(solo, axis=1)).statistic
            assert d_stat < 1.95 * np.sqrt(2.0 / n)  # 0.1% critical value

    def test_state_dims(self):
        levy = LevySpec("isotropic_stable", 2, alpha=1.5)
        assert LevyModel(levy=levy).state_dim == 2
        assert InteractingModel(n=3, levy=levy).state_dim == 6
        assert KineticModel(drift=DriftSpec(kind="zero"), gamma=1.0,
                            dim=2).state_dim == 4

    def test_dimension_mismatch_rejected(self):
        model = OverdampedModel(drift=DriftSpec(kind="zero"), dim=2)
        with pytest.raises(SpecError):
            step(model, np.zeros(3), 0.1, ConstantRng())

    def test_nonpositive_dt_rejected(self):
        model = OverdampedModel(drift=DriftSpec(kind="zero"), dim=2)
        with pytest.raises(SpecError):
            step(model, np.zeros(2), -0.1, ConstantRng())
