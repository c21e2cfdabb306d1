"""Weighted interacting-particle approximation of the renormalized semigroup.

Estimates the principal eigenvalue from the per-epoch mean-weight trace
(rho(Q_t 1) = e^{-lambda t}), the q.s.d. from histograms of the resampled
ensemble, and the exponential convergence rate from TV-decay traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dynamics import Model
from .fk_engine import run_killed_weighted_paths
from .geometry import DomainSpec, contains
from .potentials import InteractionSpec, Potential, SpecError


class ExtinctionError(RuntimeError):
    """Every particle died or carried zero weight in one epoch."""


@dataclass
class Ensemble:
    states: np.ndarray                      # (N, state_dim)
    epoch_index: int = 0
    log_norm_trace: List[float] = field(default_factory=list)
    ess_trace: List[float] = field(default_factory=list)
    extinct: bool = False

    @property
    def n(self) -> int:
        return self.states.shape[0]


def resample_systematic(weights, rng, n_out=None) -> np.ndarray:
    """Low-variance systematic resampling of n_out indices (default: one per
    weight).

    Counts satisfy floor(N*w) <= c_i <= ceil(N*w) and E[c_i] = N*w for the
    normalized weights, N = n_out.
    """
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if not np.isfinite(total) or total <= 0:
        raise SpecError("systematic resampling needs positive total weight")
    n = w.size if n_out is None else int(n_out)
    positions = (rng.uniform() + np.arange(n)) / n
    cum = np.cumsum(w / total)
    cum[-1] = 1.0  # guard rounding
    return np.searchsorted(cum, positions, side="right").astype(np.int64)


def ess(weights) -> float:
    w = np.asarray(weights, dtype=float)
    s = w.sum()
    if s <= 0:
        return 0.0
    return float(s * s / np.sum(w * w))


def smc_epoch(ensemble: Ensemble, model: Model, domain: DomainSpec,
              potential: Potential, delta: float, dt: float, rng,
              diag=None):
    """One propagate / weight / resample epoch.

    Returns (ensemble', m_k) where m_k is the mean alive weight of the epoch.
    Resampling probabilities use offset-free base weights (the constant part
    of V multiplies every weight equally), so the resampled index sequence is
    bit-identical under V -> V + c.
    """
    if ensemble.extinct:
        raise ExtinctionError("ensemble is extinct")
    n_steps = int(round(delta / dt))
    if abs(n_steps * dt - delta) > 1e-9 * max(1.0, delta):
        raise SpecError("delta/dt must be integral")

    batch = run_killed_weighted_paths(model, domain, potential,
                                      ensemble.states, dt, n_steps, rng,
                                      diag=diag)
    base = np.where(batch.alive, batch.log_weight_base, -np.inf)
    finite = np.isfinite(base)
    if not np.any(finite):
        ensemble.extinct = True
        ensemble.epoch_index += 1
        return ensemble, 0.0

    # m_k = (1/N) sum e^{log_weight} 1{alive}, in the log domain
    mx = base[finite].max()
    sum_base = np.exp(base[finite] - mx).sum()
    log_mk = mx + np.log(sum_base) - np.log(ensemble.n) - batch.offset_total
    m_k = float(np.exp(log_mk))

    w_resample = np.where(finite, np.exp(base - mx), 0.0)
    idx = resample_systematic(w_resample, rng)
    ensemble.states = batch.endpoints[idx]
    ensemble.epoch_index += 1
    ensemble.log_norm_trace.append(float(log_mk))
    ensemble.ess_trace.append(ess(w_resample))
    return ensemble, m_k


def run_epochs(ensemble: Ensemble, model, domain, potential, delta, dt,
               n_epochs, master_rng_factory, diag=None):
    """Run n_epochs epochs, each with its own derived stream (epoch-keyed)."""
    for k in range(n_epochs):
        if ensemble.extinct:
            break
        rng = master_rng_factory(ensemble.epoch_index)
        smc_epoch(ensemble, model, domain, potential, delta, dt, rng, diag=diag)
    return ensemble


def estimate_lambda(log_norm_trace, delta: float, burn_in_fraction: float = 0.5):
    """lambda_hat = -mean(log m_k)/delta over the post-burn-in trace.

    Standard error by batch means (>= 5 batches) to absorb autocorrelation.
    """
    trace = np.asarray(log_norm_trace, dtype=float)
    start = int(np.floor(burn_in_fraction * trace.size))
    post = trace[start:]
    if post.size < 10:
        raise SpecError("need at least 10 post-burn-in epochs")
    lam = -float(np.mean(post)) / delta
    n_batches = max(5, min(20, post.size // 10))
    usable = (post.size // n_batches) * n_batches
    batches = post[:usable].reshape(n_batches, -1).mean(axis=1)
    se = float(np.std(batches, ddof=1) / np.sqrt(n_batches)) / delta
    return lam, se


# ---------------------------------------------------------------------------
# histograms and TV diagnostics
# ---------------------------------------------------------------------------

@dataclass
class Histogram:
    """Normalized box histogram with a single overflow bin for outside mass."""
    lo: np.ndarray
    hi: np.ndarray
    bins: int                  # bins per axis
    mass: np.ndarray           # (bins,)*dim, normalized together with overflow
    overflow: float

    @property
    def dim(self) -> int:
        return self.lo.size

    def centers(self):
        widths = (self.hi - self.lo) / self.bins
        return [self.lo[a] + (np.arange(self.bins) + 0.5) * widths[a]
                for a in range(self.dim)]

    def same_binning(self, other) -> bool:
        return (self.bins == other.bins and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))


def histogram_points(points, lo, hi, bins: int, weights=None) -> Histogram:
    """Deterministic half-open binning; mass outside the box goes to overflow."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    if x.shape[1] != d:
        raise SpecError("point dimension does not match histogram box")
    if weights is None:
        weights = np.ones(x.shape[0])
    w = np.asarray(weights, dtype=float)
    widths = (hi - lo) / bins
    idx = np.floor((x - lo) / widths).astype(np.int64)
    inside = np.all((idx >= 0) & (idx < bins), axis=1)
    mass = np.zeros((bins,) * d)
    if np.any(inside):
        flat = np.ravel_multi_index(tuple(idx[inside].T), (bins,) * d)
        np.add.at(mass.ravel(), flat, w[inside])
    overflow = float(w[~inside].sum())
    total = mass.sum() + overflow
    if total <= 0:
        raise SpecError("histogram received zero total mass")
    return Histogram(lo=lo, hi=hi, bins=bins, mass=mass / total,
                     overflow=overflow / total)


def qsd_histogram(states, model: Model, lo, hi, bins: int,
                  weights=None) -> Histogram:
    """Histogram of particle states (position component for kinetic)."""
    pos = model.position(np.asarray(states, dtype=float))
    return histogram_points(pos, lo, hi, bins, weights=weights)


def tv_distance(h1: Histogram, h2: Histogram) -> float:
    """Half L1 distance between two histograms on identical binning."""
    if not h1.same_binning(h2):
        raise SpecError("histogram binning mismatch")
    return 0.5 * (float(np.abs(h1.mass - h2.mass).sum())
                  + abs(h1.overflow - h2.overflow))


def sample_from_histogram(hist: Histogram, n: int, rng) -> np.ndarray:
    """Draw points from the in-box part of a histogram (uniform within bins)."""
    mass = hist.mass.ravel()
    total = mass.sum()
    if total <= 0:
        raise SpecError("histogram has no in-box mass to sample from")
    flat = rng.choice(mass.size, size=n, p=mass / total)
    idx = np.stack(np.unravel_index(flat, hist.mass.shape), axis=1)
    widths = (hist.hi - hist.lo) / hist.bins
    u = rng.uniform(size=(n, hist.dim))
    return hist.lo + (idx + u) * widths


def _lift_positions(model: Model, positions, rng):
    """Turn sampled positions into full model states (zero velocities)."""
    pos = np.asarray(positions, dtype=float)
    if pos.shape[1] == model.state_dim:
        return pos
    # kinetic: append standard normal velocities
    extra = model.state_dim - pos.shape[1]
    return np.concatenate([pos, rng.standard_normal((pos.shape[0], extra))], axis=1)


def quasi_stationarity_check(rho_hat: Histogram, model: Model,
                             domain: DomainSpec, potential: Potential,
                             delta: float, dt: float, n: int, rng) -> float:
    """TV distance between rho_hat and rho_hat propagated for one epoch of the
    normalized evolution."""
    starts = _lift_positions(model, sample_from_histogram(rho_hat, n, rng), rng)
    # histogram bins straddling the domain boundary can emit outside points;
    # those are killed at time zero, which is the same as dropping them here
    pp = ((potential.n, potential.dimension)
          if isinstance(potential, InteractionSpec) else None)
    inside = contains(domain, model.position(starts), potential, per_particle=pp)
    if not np.any(inside):
        raise SpecError("no sampled start state lies inside the domain")
    ensemble = Ensemble(states=starts[inside])
    ensemble, _ = smc_epoch(ensemble, model, domain, potential, delta, dt, rng)
    if ensemble.extinct:
        raise ExtinctionError("quasi-stationarity check went extinct")
    h = qsd_histogram(ensemble.states, model, rho_hat.lo, rho_hat.hi, rho_hat.bins)
    return tv_distance(h, rho_hat)


def convergence_trace(start_states, model: Model, domain: DomainSpec,
                      potential: Potential, rho_hat: Histogram, delta: float,
                      dt: float, n_epochs: int, rng):
    """Per-epoch TV distances of the normalized evolved law against rho_hat.

    Returns (times, tvs, extinct_flag); extinction truncates the trace.
    """
    ensemble = Ensemble(states=np.asarray(start_states, dtype=float))
    times, tvs = [], []
    for k in range(n_epochs):
        ensemble, _ = smc_epoch(ensemble, model, domain, potential, delta, dt, rng)
        if ensemble.extinct:
            return np.asarray(times), np.asarray(tvs), True
        h = qsd_histogram(ensemble.states, model, rho_hat.lo, rho_hat.hi,
                          rho_hat.bins)
        times.append((k + 1) * delta)
        tvs.append(tv_distance(h, rho_hat))
    return np.asarray(times), np.asarray(tvs), False


def fit_decay_rate(times, tvs, noise_floor: float = 0.0):
    """Least-squares fit of log(tv) vs t over points above the noise floor.

    Returns (slope, r_squared); slope is the empirical decay exponent.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(tvs, dtype=float)
    mask = y > noise_floor
    if mask.sum() < 6:
        raise SpecError("need at least 6 trace points above the noise floor")
    t, y = t[mask], np.log(y[mask])
    a = np.vstack([t, np.ones_like(t)]).T
    coef, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    fit = a @ coef
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(coef[0]), r2
