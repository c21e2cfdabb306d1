"""One-step transition kernels for the four process models.

All kernels are vectorized over a batch of states: `states` has shape
(N, state_dim). Euler-Maruyama is used for both diffusions; Levy models
advance by exact increments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .potentials import DriftSpec, InteractionSpec, SpecError
from .samplers import LevySpec, gaussian_increment, levy_increment

STIFF_THRESHOLD = 1e4  # |b|*dt above this flags discretization breakdown


@dataclass(frozen=True)
class OverdampedModel:
    """dX = b_c(X) dt + dB on R^d."""
    drift: DriftSpec
    dim: int

    @property
    def state_dim(self) -> int:
        return self.dim

    def position(self, states):
        return states

    def step(self, states, dt, rng, diag=None):
        x = np.asarray(states, dtype=float)
        b = self.drift(x)
        if diag is not None:
            diag["stiff_steps"] = diag.get("stiff_steps", 0) + int(
                np.count_nonzero(np.linalg.norm(b, axis=-1) * dt > STIFF_THRESHOLD))
        return x + b * dt + gaussian_increment(self.dim, dt, rng, size=x.shape[0])


@dataclass(frozen=True)
class LevyModel:
    """X advanced by exact Levy increments."""
    levy: LevySpec

    @property
    def dim(self) -> int:
        return self.levy.dimension

    @property
    def state_dim(self) -> int:
        return self.levy.dimension

    def position(self, states):
        return states

    def step(self, states, dt, rng, diag=None):
        x = np.asarray(states, dtype=float)
        return x + levy_increment(self.levy, dt, rng, size=x.shape[0])


@dataclass(frozen=True)
class KineticModel:
    """Kinetic Langevin: dx = v dt, dv = (-grad V_c(x) - gamma v) dt + dB.

    V_c is the floored primitive of the gradient-type drift (V_c >= 1);
    noise on v has unit strength (no temperature parameter).
    """
    drift: DriftSpec
    gamma: float
    dim: int

    def __post_init__(self):
        if self.gamma <= 0:
            raise SpecError("kinetic model needs gamma > 0")
        if not self.drift.is_gradient:
            raise SpecError("kinetic model needs a gradient-type drift")

    @property
    def state_dim(self) -> int:
        return 2 * self.dim

    def position(self, states):
        return np.asarray(states)[..., : self.dim]

    def velocity(self, states):
        return np.asarray(states)[..., self.dim:]

    def hamiltonian(self, states):
        x, v = self.position(states), self.velocity(states)
        return self.drift.primitive(x) + 0.5 * np.sum(v * v, axis=-1)

    def step(self, states, dt, rng, diag=None):
        s = np.asarray(states, dtype=float)
        x, v = s[..., : self.dim], s[..., self.dim:]
        x_new = x + v * dt
        force = -self.drift.grad_primitive(x_new) - self.gamma * v
        if diag is not None:
            diag["stiff_steps"] = diag.get("stiff_steps", 0) + int(
                np.count_nonzero(np.linalg.norm(force, axis=-1) * dt > STIFF_THRESHOLD))
        v_new = v + force * dt + gaussian_increment(self.dim, dt, rng, size=s.shape[0])
        return np.concatenate([x_new, v_new], axis=-1)


@dataclass(frozen=True)
class InteractingModel:
    """n independent Levy copies driving a configuration in (R^d)^n."""
    n: int
    levy: LevySpec
    interaction: Optional[InteractionSpec] = None

    def __post_init__(self):
        if self.n < 2:
            raise SpecError("interacting model needs n >= 2")
        if self.interaction is not None and self.interaction.n != self.n:
            raise SpecError("interaction particle count mismatch")

    @property
    def dim(self) -> int:
        return self.levy.dimension

    @property
    def state_dim(self) -> int:
        return self.n * self.levy.dimension

    def position(self, states):
        return states

    def step(self, states, dt, rng, diag=None):
        x = np.asarray(states, dtype=float)
        d = self.levy.dimension
        inc = levy_increment(self.levy, dt, rng, size=x.shape[0] * self.n)
        return x + inc.reshape(x.shape[0], self.n * d)


Model = Union[OverdampedModel, LevyModel, KineticModel, InteractingModel]


def step(model: Model, state, dt, rng, diag=None):
    """Advance one or a batch of states by one time step."""
    if dt <= 0:
        raise SpecError("dt must be > 0")
    s = np.asarray(state, dtype=float)
    single = s.ndim == 1
    if single:
        s = s[None, :]
    if s.shape[-1] != model.state_dim:
        raise SpecError(f"state dim {s.shape[-1]} does not match model "
                        f"state_dim {model.state_dim}")
    out = model.step(s, dt, rng, diag=diag)
    return out[0] if single else out
