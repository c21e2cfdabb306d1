"""Explicit Lyapunov functions, generator ratios, and drift-condition scans.

The cutoff chi is the C^2 polynomial smoothstep in s = 2|x| - 1:
chi = 1 on B(0,1/2), chi = 0 outside B(0,1), chi = 1 - (6s^5 - 15s^4 + 10s^3)
on the annulus. All radial derivatives are closed form, so the finite
difference cross-check sees clean second-order convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .dynamics import (InteractingModel, KineticModel, LevyModel, Model,
                       OverdampedModel)
from .potentials import DriftSpec, Potential, SpecError

KINDS = ("exp_radial", "power_radial", "kinetic", "unit")


# ---------------------------------------------------------------------------
# cutoff and radial profiles
# ---------------------------------------------------------------------------

def _smoothstep(s):
    return 6.0 * s ** 5 - 15.0 * s ** 4 + 10.0 * s ** 3


def _smoothstep_d1(s):
    return 30.0 * s ** 2 * (s - 1.0) ** 2


def _smoothstep_d2(s):
    return 120.0 * s ** 3 - 180.0 * s ** 2 + 60.0 * s


def cutoff_complement(r):
    """g = 1 - chi and its first two radial derivatives, vectorized."""
    r = np.asarray(r, dtype=float)
    s = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    mid = (r > 0.5) & (r < 1.0)
    g = np.where(r >= 1.0, 1.0, np.where(mid, _smoothstep(s), 0.0))
    g1 = np.where(mid, 2.0 * _smoothstep_d1(s), 0.0)
    g2 = np.where(mid, 4.0 * _smoothstep_d2(s), 0.0)
    return g, g1, g2


def _L_profile(r):
    """L = r*(1-chi): value and first two radial derivatives."""
    g, g1, g2 = cutoff_complement(r)
    return r * g, g + r * g1, 2.0 * g1 + r * g2


def _ell_profile(r, k):
    """ell = r^k * (1-chi): value and first two radial derivatives."""
    g, g1, g2 = cutoff_complement(r)
    rk = r ** k
    val = rk * g
    d1 = k * r ** (k - 1) * g + rk * g1
    d2 = k * (k - 1) * r ** (k - 2) * g + 2.0 * k * r ** (k - 1) * g1 + rk * g2
    return val, d1, d2


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LyapunovSpec:
    """exp_radial: W = exp(eps * L); power_radial: W = ell + 1;
    kinetic: W = exp(F - inf F) with F = a*H + b*v.G; unit: W = 1."""
    kind: str
    eps: float = 0.1
    k: float = 4.0
    a: float = 1.0
    b: float = 0.2
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown Lyapunov kind {self.kind!r}")
        if self.kind == "exp_radial" and self.eps <= 0:
            raise SpecError("exp_radial needs eps > 0")
        if self.kind == "power_radial" and self.k <= 2:
            raise SpecError("power_radial needs k > 2")
        if self.kind == "kinetic":
            if self.a <= 0 or self.b <= 0 or self.gamma <= 0:
                raise SpecError("kinetic Lyapunov needs positive a, b, gamma")
            if not (self.a < 2 * self.gamma):
                raise SpecError("kinetic Lyapunov needs a < 2*gamma")
            if not (self.b < self.a * (self.gamma - self.a / 2.0)):
                raise SpecError("kinetic Lyapunov needs b < a*(gamma - a/2)")


def _vector_field_G(x):
    """G(x) = (x/|x|)(1-chi), its value; |G| <= 1 with bounded gradient."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    g, _, _ = cutoff_complement(r[..., 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(r > 0, x / r, 0.0)
    return g[..., None] * unit


def eval_W(spec: LyapunovSpec, state, drift: DriftSpec = None, dim: int = None):
    """W at overdamped states x (..., d) or kinetic states (x, v) (..., 2d)."""
    s = np.asarray(state, dtype=float)
    if spec.kind == "unit":
        return np.ones(s.shape[:-1])
    if spec.kind == "exp_radial":
        r = np.linalg.norm(s, axis=-1)
        L, _, _ = _L_profile(r)
        return np.exp(spec.eps * L)
    if spec.kind == "power_radial":
        r = np.linalg.norm(s, axis=-1)
        ell, _, _ = _ell_profile(r, spec.k)
        return ell + 1.0
    # kinetic: state = (x, v), needs the drift primitive for H
    if drift is None or dim is None:
        raise SpecError("kinetic W needs the drift and position dimension")
    x, v = s[..., :dim], s[..., dim:]
    h = drift.primitive(x) + 0.5 * np.sum(v * v, axis=-1)
    f = spec.a * h + spec.b * np.sum(v * _vector_field_G(x), axis=-1)
    inf_f = spec.a - spec.b ** 2 / (2.0 * spec.a)  # V_c >= 1 and |G| <= 1
    return np.exp(f - inf_f)


# ---------------------------------------------------------------------------
# generator ratios
# ---------------------------------------------------------------------------

def gen_oL_ratio(x, spec: LyapunovSpec, drift: DriftSpec):
    """(L^{oL} W)(x) / W(x) for the overdamped generator b.grad + Laplacian/2."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SpecError("generator ratio undefined at x = 0")
    d = x.shape[-1]
    with np.errstate(invalid="ignore"):
        unit = x / r[..., None]
    b_rad = np.sum(drift(x) * unit, axis=-1)

    if spec.kind == "unit":
        return np.zeros(r.shape)
    if spec.kind == "exp_radial":
        L, L1, L2 = _L_profile(r)
        e = spec.eps
        lap_L = L2 + (d - 1) * L1 / r
        return e * b_rad * L1 + 0.5 * e * e * L1 ** 2 + 0.5 * e * lap_L
    if spec.kind == "power_radial":
        ell, e1, e2 = _ell_profile(r, spec.k)
        lap = e2 + (d - 1) * e1 / r
        return (b_rad * e1 + 0.5 * lap) / (ell + 1.0)
    raise SpecError("kinetic Lyapunov function needs gen_kL_ratio")


def gen_kL_ratio(x, v, spec: LyapunovSpec, drift: DriftSpec):
    """(L^{kL} W)(y) / W(y) for y = (x, v), W = exp(F - inf F).

    -L W / W = -a d/2 + a g |v|^2 - b v.(grad G)v + b g v.G + b G.grad V_c
               - |a v + b G|^2 / 2,   g = gamma.
    """
    if spec.kind != "kinetic":
        raise SpecError("gen_kL_ratio needs a kinetic Lyapunov spec")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SpecError("generator ratio undefined at x = 0")
    d = x.shape[-1]
    a, b, gamma = spec.a, spec.b, spec.gamma

    g, g1, _ = cutoff_complement(r)
    unit = x / r[..., None]
    v_rad = np.sum(v * unit, axis=-1)
    v2 = np.sum(v * v, axis=-1)
    # grad G = g' unit unit^T + (g/r)(I - unit unit^T)
    v_gradG_v = g1 * v_rad ** 2 + (g / r) * (v2 - v_rad ** 2)
    G = g[..., None] * unit
    vG = g * v_rad
    G_gradVc = np.sum(G * drift.grad_primitive(x), axis=-1)
    av_bG = a * v + b * G
    neg_ratio = (-a * d / 2.0 + a * gamma * v2 - b * v_gradG_v
                 + b * gamma * vG + b * G_gradVc
                 - 0.5 * np.sum(av_bG * av_bG, axis=-1))
    return -neg_ratio


def generator_ratio(model: Model, spec: LyapunovSpec, state):
    """Dispatch the analytic generator ratio for a model/W pairing."""
    s = np.asarray(state, dtype=float)
    if spec.kind == "unit":
        return np.zeros(s.shape[:-1])
    if isinstance(model, OverdampedModel):
        return gen_oL_ratio(s, spec, model.drift)
    if isinstance(model, KineticModel):
        return gen_kL_ratio(s[..., : model.dim], s[..., model.dim:], spec,
                            model.drift)
    raise SpecError(f"no non-trivial Lyapunov ratio implemented for "
                    f"{type(model).__name__}")


# ---------------------------------------------------------------------------
# drift scans
# ---------------------------------------------------------------------------

@dataclass
class DriftScanRow:
    p: float
    values: np.ndarray           # ratio - p*V along the scan
    endpoints_below: bool        # both scan ends fall under -threshold
    tail_monotone: bool          # last 5 points decrease toward each end
    max_outside: float           # largest value outside the central annulus


@dataclass
class LyapunovReport:
    scan_coordinate: np.ndarray  # radius (or separation) per scan point
    ratio: np.ndarray            # generator ratio along the scan
    potential_values: np.ndarray
    rows: List[DriftScanRow]
    m0: float                    # max over the scan of ratio - V  (cc2 bound)
    threshold: float


def scan_states(model: Model, radii) -> np.ndarray:
    """Scan curve toward the singularity and toward infinity.

    Overdamped/Levy: x = r e1. Kinetic: (r e1, 0). Interacting: particles
    spread along e1 with spacing r (pair separation = scan coordinate).
    """
    radii = np.asarray(radii, dtype=float)
    if isinstance(model, (OverdampedModel, LevyModel)):
        states = np.zeros((radii.size, model.state_dim))
        states[:, 0] = radii
        return states
    if isinstance(model, KineticModel):
        states = np.zeros((radii.size, model.state_dim))
        states[:, 0] = radii
        return states
    if isinstance(model, InteractingModel):
        d = model.dim
        states = np.zeros((radii.size, model.state_dim))
        for i in range(model.n):
            states[:, i * d] = (i - (model.n - 1) / 2.0) * radii
        return states
    raise SpecError(f"no scan curve for {type(model).__name__}")


def drift_scan(model: Model, spec: LyapunovSpec, potential: Potential,
               p_list: Sequence[float], radii, threshold: float = 100.0,
               core_lo: float = 0.1, core_hi: float = 10.0) -> LyapunovReport:
    """Tabulate ratio - p*V along the scan; the thresholded endpoint check is
    the finite-grid surrogate for the drift condition's divergence to -inf."""
    radii = np.sort(np.asarray(radii, dtype=float))
    states = scan_states(model, radii)
    ratio = generator_ratio(model, spec, states)
    pos = model.position(states)
    vvals = np.asarray(potential(pos), dtype=float)

    rows = []
    for p in p_list:
        vals = ratio - p * vvals
        below = bool(vals[0] <= -threshold and vals[-1] <= -threshold)
        head = vals[:5]
        tail = vals[-5:]
        monotone = bool(np.all(np.diff(head) > 0) and np.all(np.diff(tail) < 0))
        outside = (radii < core_lo) | (radii > core_hi)
        max_out = float(vals[outside].max()) if np.any(outside) else -np.inf
        rows.append(DriftScanRow(p=float(p), values=vals,
                                 endpoints_below=below, tail_monotone=monotone,
                                 max_outside=max_out))
    finite = np.isfinite(vvals)
    m0 = float((ratio[finite] - vvals[finite]).max())
    return LyapunovReport(scan_coordinate=radii, ratio=ratio,
                          potential_values=vvals, rows=rows, m0=m0,
                          threshold=threshold)


# ---------------------------------------------------------------------------
# finite-difference guard for the hand-derived closed forms
# ---------------------------------------------------------------------------

def fd_generator_check(spec: LyapunovSpec, model: Model, state, h: float):
    """Central-difference evaluation of L W compared to the analytic
    ratio * W. Returns (analytic, finite_difference, abs_error)."""
    s = np.asarray(state, dtype=float)

    if isinstance(model, OverdampedModel):
        def w(y):
            return eval_W(spec, y)
        x = s
        d = x.size
        grad = np.empty(d)
        lap = 0.0
        w0 = float(w(x))
        for i in range(d):
            e = np.zeros(d)
            e[i] = h
            wp, wm = float(w(x + e)), float(w(x - e))
            grad[i] = (wp - wm) / (2.0 * h)
            lap += (wp - 2.0 * w0 + wm) / h ** 2
        fd = float(model.drift(x) @ grad + 0.5 * lap)
        analytic = float(generator_ratio(model, spec, x[None, :])[0] * w0)
        return analytic, fd, abs(analytic - fd)

    if isinstance(model, KineticModel):
        dim = model.dim

        def w(y):
            return eval_W(spec, y, drift=model.drift, dim=dim)
        w0 = float(w(s))
        x, v = s[:dim], s[dim:]
        grad_x = np.empty(dim)
        grad_v = np.empty(dim)
        lap_v = 0.0
        for i in range(dim):
            e = np.zeros(2 * dim)
            e[i] = h
            grad_x[i] = (float(w(s + e)) - float(w(s - e))) / (2.0 * h)
            e = np.zeros(2 * dim)
            e[dim + i] = h
            wp, wm = float(w(s + e)), float(w(s - e))
            grad_v[i] = (wp - wm) / (2.0 * h)
            lap_v += (wp - 2.0 * w0 + wm) / h ** 2
        force = -model.drift.grad_primitive(x) - model.gamma * v
        fd = float(v @ grad_x + force @ grad_v + 0.5 * lap_v)
        analytic = float(generator_ratio(model, spec, s[None, :])[0] * w0)
        return analytic, fd, abs(analytic - fd)

    raise SpecError(f"no generator check for {type(model).__name__}")
