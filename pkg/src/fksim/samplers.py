"""Levy increment samplers via subordinated Brownian motion.

Each family draws increments whose characteristic function is exp(-dt*Psi(u)),
with Psi exposed for the self-tests. Constructions reduce to two primitives:
Gaussian draws and the one-sided stable subordinator (Kanter / CMS form).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import SpecError

FAMILIES = (
    "brownian_standard",
    "isotropic_stable",
    "relativistic_stable",
    "variance_gamma",
    "geometric_stable",
    "jump_diffusion",
)


@dataclass(frozen=True)
class LevySpec:
    family: str
    dimension: int
    alpha: float = 2.0
    m: float = 1.0
    max_rejection_rounds: int = 10_000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown Levy family {self.family!r}")
        if self.dimension < 1:
            raise SpecError("dimension must be >= 1")
        if self.dimension < 2 and self.family != "brownian_standard":
            raise SpecError("d >= 2 required except for brownian_standard")
        if self.family == "isotropic_stable" and not (0 < self.alpha <= 2):
            raise SpecError("isotropic_stable needs alpha in (0, 2]")
        if self.family in ("relativistic_stable", "geometric_stable", "jump_diffusion"):
            if not (0 < self.alpha < 2):
                raise SpecError(f"{self.family} needs alpha in (0, 2)")
        if self.family == "relativistic_stable" and self.m <= 0:
            raise SpecError("relativistic_stable needs m > 0")

    def char_exponent(self, u):
        """Psi(u) for frequency vectors u of shape (..., d); Psi(0) = 0."""
        s = np.linalg.norm(np.asarray(u, dtype=float), axis=-1)
        if self.family == "brownian_standard":
            return 0.5 * s ** 2
        if self.family == "isotropic_stable":
            return s ** self.alpha
        if self.family == "relativistic_stable":
            a, m = self.alpha, self.m
            return (s ** a + m ** (2.0 / a)) ** (a / 2.0) - m
        if self.family == "variance_gamma":
            return np.log1p(s ** 2)
        if self.family == "geometric_stable":
            return np.log1p(s ** self.alpha)
        return s ** 2 + s ** self.alpha  # jump_diffusion


def gaussian_increment(d: int, dt: float, rng: np.random.Generator, size=None):
    """i.i.d. centered normal coordinates with variance dt each."""
    if dt <= 0:
        raise SpecError("dt must be > 0")
    shape = (d,) if size is None else (size, d)
    return rng.normal(scale=np.sqrt(dt), size=shape)


def positive_stable(beta: float, t: float, rng: np.random.Generator, size=None):
    """One-sided stable draw S with E[exp(-lam*S)] = exp(-t * lam**beta).

    Kanter's construction: S = t**(1/beta) * (a(U)/E)**((1-beta)/beta) with
    a(u) = sin(beta*u)**(beta/(1-beta)) * sin((1-beta)*u) / sin(u)**(1/(1-beta)),
    U uniform on (0, pi), E standard exponential.
    """
    if not (0 < beta < 1):
        raise SpecError("beta must lie in (0, 1)")
    if np.any(np.asarray(t) <= 0):
        raise SpecError("t must be > 0")
    shape = () if size is None else (size,)
    u = rng.uniform(0.0, np.pi, size=shape)
    e = rng.standard_exponential(size=shape)
    a = (np.sin(beta * u) ** (beta / (1.0 - beta)) * np.sin((1.0 - beta) * u)
         / np.sin(u) ** (1.0 / (1.0 - beta)))
    return np.asarray(t) ** (1.0 / beta) * (a / e) ** ((1.0 - beta) / beta)


def _subordinated_gaussian(s, d, rng):
    """sqrt(2*S) * Z: characteristic function E[exp(-S |u|^2)]."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    z = rng.standard_normal(size=(s.shape[0], d))
    return np.sqrt(2.0 * s)[:, None] * z


def levy_increment(spec: LevySpec, dt: float, rng: np.random.Generator, size=None):
    """A draw with characteristic function exp(-dt * Psi(u))."""
    if dt <= 0:
        raise SpecError("dt must be > 0")
    n = 1 if size is None else int(size)
    d = spec.dimension
    fam = spec.family

    if fam == "brownian_standard":
        out = rng.normal(scale=np.sqrt(dt), size=(n, d))
    elif fam == "isotropic_stable":
        if spec.alpha == 2.0:
            out = rng.normal(scale=np.sqrt(2.0 * dt), size=(n, d))
        else:
            s = positive_stable(spec.alpha / 2.0, dt, rng, size=n)
            out = _subordinated_gaussian(s, d, rng)
    elif fam == "variance_gamma":
        g = rng.gamma(shape=dt, scale=1.0, size=n)
        out = _subordinated_gaussian(g, d, rng)
    elif fam == "geometric_stable":
        g = rng.gamma(shape=dt, scale=1.0, size=n)
        # stable step run for the random gamma time: S ~ one-sided stable at t=g
        s = np.where(g > 0, positive_stable(spec.alpha / 2.0, np.maximum(g, 1e-300), rng, size=n), 0.0)
        out = _subordinated_gaussian(s, d, rng)
    elif fam == "relativistic_stable":
        out = _relativistic_increment(spec, dt, rng, n)
    else:  # jump_diffusion
        g = rng.normal(scale=np.sqrt(2.0 * dt), size=(n, d))
        s = positive_stable(spec.alpha / 2.0, dt, rng, size=n)
        out = g + _subordinated_gaussian(s, d, rng)

    return out[0] if size is None else out


def _relativistic_increment(spec, dt, rng, n):
    """Increment with exponent ((|u|^a + m^{2/a})^{a/2} - m), a = alpha.

    Written as a composition of Bernstein functions g(h(|u|^2)) with
    h(t) = t^{a/2} and g(t) = (t + m^{2/a})^{a/2} - m, it is realized by a
    stable(a/2) subordinator run for the random time given by the tilted
    stable(a/2) subordinator. The tilted draw uses rejection (accept with
    probability exp(-m^{2/a} S)); the accepted law is exact, and the expected
    acceptance is exp(-m*dt) per round, so dt must be small vs 1/m.
    """
    tilt = spec.m ** (2.0 / spec.alpha)
    s = np.empty(n)
    pending = np.arange(n)
    for _ in range(spec.max_rejection_rounds):
        cand = positive_stable(spec.alpha / 2.0, dt, rng, size=pending.size)
        accept = rng.uniform(size=pending.size) < np.exp(-tilt * cand)
        s[pending[accept]] = cand[accept]
        pending = pending[~accept]
        if pending.size == 0:
            inner = positive_stable(spec.alpha / 2.0, s, rng, size=n)
            return _subordinated_gaussian(inner, spec.dimension, rng)
    raise RuntimeError(
        f"relativistic rejection exceeded {spec.max_rejection_rounds} rounds "
        f"(acceptance ~ exp(-m*dt) = {np.exp(-spec.m * dt):.3g}; reduce dt)")


def empirical_char_function(samples, u):
    """(1/N) sum_j exp(i u . x_j); modulus <= 1."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise SpecError("empty sample list")
    if samples.ndim == 1:
        samples = samples[:, None]
    phase = samples @ np.asarray(u, dtype=float)
    return complex(np.mean(np.exp(1j * phase)))
