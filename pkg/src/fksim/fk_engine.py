"""Killed, exponentially weighted trajectories and pointwise semigroup estimates.

Log-domain weights throughout. The additive constant (offset) of the potential
is accumulated separately from the rest of the integrand, which makes the
potential-shift identity V -> V + c exact in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dynamics import Model
from .geometry import DomainSpec, contains, singularity_distance
from .potentials import (InteractionSpec, Potential, SpecError, eval_base,
                         potential_lower_bound, potential_offset)

UNDERFLOW_LOG = -700.0  # exp() underflows to exact 0 below this


@dataclass
class PathBatch:
    """Vectorized outcome of N killed weighted trajectories."""
    endpoints: np.ndarray          # (N, state_dim)
    alive: np.ndarray              # (N,) bool
    log_weight_base: np.ndarray    # (N,) excludes the constant offset term
    offset_total: float            # offset * t, added back by log_weight
    exit_step: np.ndarray          # (N,) int, -1 while alive
    min_singularity_distance: np.ndarray  # (N,)
    underflows: int = 0

    @property
    def log_weight(self) -> np.ndarray:
        return self.log_weight_base - self.offset_total

    def weights(self) -> np.ndarray:
        """exp(log_weight) * alive, with underflow treated as exact 0."""
        lw = np.where(self.alive, self.log_weight, -np.inf)
        with np.errstate(under="ignore"):
            w = np.exp(np.maximum(lw, UNDERFLOW_LOG))
        w[lw <= UNDERFLOW_LOG] = 0.0
        return w


@dataclass
class PathResult:
    """One killed, weighted trajectory."""
    endpoint: np.ndarray
    alive: bool
    log_weight: float
    exit_step: Optional[int]
    min_singularity_distance: float


def _per_particle(model, potential):
    if isinstance(potential, InteractionSpec):
        return (potential.n, potential.dimension)
    return None


def run_killed_weighted_paths(model: Model, domain: DomainSpec,
                              potential: Potential, starts, dt: float,
                              n_steps: int, rng, diag=None) -> PathBatch:
    """Advance a batch of paths, killing at domain exit and accumulating
    the trapezoidal log-weight -int V ds.

    Increments are drawn for every particle at every step regardless of its
    alive status, so the noise sequence is independent of the kill pattern
    (this is what makes domain-monotonicity hold path by path under a shared
    seed).
    """
    starts = np.asarray(starts, dtype=float)
    single = starts.ndim == 1
    if single:
        starts = starts[None, :]
    n = starts.shape[0]

    offset = potential_offset(potential)
    pp = _per_particle(model, potential)
    pos0 = model.position(starts)
    if not np.all(contains(domain, pos0, potential, per_particle=pp)):
        raise SpecError("a start state lies outside the domain or on the singular set")

    states = starts.copy()
    alive = np.ones(n, dtype=bool)
    lw = np.zeros(n)
    exit_step = np.full(n, -1, dtype=np.int64)
    min_dist = singularity_distance(pos0, potential)
    v_prev = np.asarray(eval_base(potential, pos0), dtype=float)

    for k in range(n_steps):
        new_states = model.step(states, dt, rng, diag=diag)
        # dead paths keep their exit state
        states = np.where(alive[:, None], new_states, states)
        pos = model.position(states)
        dist = singularity_distance(pos, potential)
        min_dist = np.where(alive, np.minimum(min_dist, dist), min_dist)

        inside = contains(domain, pos, potential, per_particle=pp)
        just_killed = alive & ~inside
        exit_step[just_killed] = k
        alive = alive & inside

        v_new = np.asarray(eval_base(potential, pos), dtype=float)
        with np.errstate(invalid="ignore"):
            incr = -dt * 0.5 * (v_prev + v_new)
        lw = np.where(alive, lw + np.where(np.isneginf(incr), -np.inf, incr), lw)
        v_prev = v_new

    if np.any(min_dist[alive] <= 0):
        raise AssertionError("a discrete state landed exactly on the singular set")

    batch = PathBatch(
        endpoints=states, alive=alive, log_weight_base=lw,
        offset_total=offset * dt * n_steps, exit_step=exit_step,
        min_singularity_distance=min_dist,
        underflows=int(np.count_nonzero(alive & (lw - offset * dt * n_steps < UNDERFLOW_LOG))),
    )
    return batch


def run_killed_weighted_path(model, domain, potential, start, dt, n_steps,
                             rng, diag=None) -> PathResult:
    """Single-path convenience wrapper around the batched runner."""
    b = run_killed_weighted_paths(model, domain, potential,
                                  np.asarray(start, dtype=float)[None, :],
                                  dt, n_steps, rng, diag=diag)
    alive = bool(b.alive[0])
    return PathResult(
        endpoint=b.endpoints[0],
        alive=alive,
        log_weight=float(b.log_weight[0]),
        exit_step=None if alive else int(b.exit_step[0]),
        min_singularity_distance=float(b.min_singularity_distance[0]),
    )


def estimate_Qt_f(model: Model, domain: DomainSpec, potential: Potential,
                  x, f: Callable, t: float, dt: float, n_paths: int, rng):
    """Monte Carlo estimate of Q_t f(x) = E_x[f(X_t) e^{-int V} 1_{alive}].

    Returns (mean, standard_error). Killed paths contribute exactly 0.
    """
    n_steps = int(round(t / dt))
    if abs(n_steps * dt - t) > 1e-9 * max(1.0, t):
        raise SpecError("t/dt must be integral")
    if n_paths < 2:
        raise SpecError("n_paths must be >= 2")
    starts = np.broadcast_to(np.asarray(x, dtype=float), (n_paths, model.state_dim)).copy()
    batch = run_killed_weighted_paths(model, domain, potential, starts, dt, n_steps, rng)
    w = batch.weights()
    vals = np.where(batch.alive, np.asarray(f(batch.endpoints), dtype=float), 0.0) * w
    mean = float(np.mean(vals))
    if np.all(vals == vals[0]):
        return float(vals[0]), 0.0  # zero-variance case, exact
    se = float(np.std(vals, ddof=1) / np.sqrt(n_paths))
    return mean, se


def estimate_eigenfunction(model: Model, domain: DomainSpec, potential: Potential,
                           grid, lambda_hat: float, T: float, dt: float,
                           n_paths: int, rng, rho_weights=None):
    """phi_hat(x) = e^{lambda_hat * T} * Q_T 1(x) on a grid of start states.

    Rescaled so the rho-weighted average is 1 when `rho_weights` (one weight
    per grid state) is given, otherwise so the maximum is 1. Returns
    (values, standard_errors).
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.empty(grid.shape[0])
    ses = np.empty(grid.shape[0])
    scale = np.exp(lambda_hat * T)
    for i, x in enumerate(grid):
        m, se = estimate_Qt_f(model, domain, potential, x, lambda _s: 1.0,
                              T, dt, n_paths, rng)
        vals[i] = scale * m
        ses[i] = scale * se
    if not np.any(vals > 0):
        raise RuntimeError("all eigenfunction estimates vanished; "
                           "increase n_paths or shorten the horizon T")
    if rho_weights is not None:
        rho = np.asarray(rho_weights, dtype=float)
        norm = float(np.sum(rho * vals) / np.sum(rho))
    else:
        norm = float(np.max(vals))
    return vals / norm, ses / norm
