"""Independent finite-difference reference solvers.

Low-dimensional eigen- and heat-solvers used to produce reference values for
the Monte Carlo stack. Deliberately separate numerics: radial problems are
discretized in conservative divergence form on a cell-centered grid and
symmetrized by the volume weight r^(d-1), giving a symmetric tridiagonal
matrix handled by Sturm bisection plus shifted inverse iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .potentials import SpecError


class OracleError(RuntimeError):
    """Inverse iteration or truncation failed to converge."""


@dataclass(frozen=True)
class RadialProblem:
    """Radial Schrodinger eigenproblem with absorbing outer boundary.

    dimension >= 2: problem on (0, r_max) in reduced form.
    dimension == 1 with interval=(a, b): -1/2 psi'' + V psi, absorbing at both
    ends (whole-line problems are truncated intervals).
    """
    dimension: int
    r_max: float
    potential: Callable[[np.ndarray], np.ndarray]
    n: int = 800
    interval: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 200:
            raise SpecError("grid size must be >= 200")
        if self.dimension < 1:
            raise SpecError("dimension must be >= 1")
        if self.dimension == 1 and self.interval is None:
            raise SpecError("d = 1 problems need an explicit interval")
        if self.dimension >= 2 and self.r_max <= 0:
            raise SpecError("r_max must be > 0")

    def grid(self, n=None):
        n = n or self.n
        if self.dimension == 1:
            a, b = self.interval
            h = (b - a) / n
            return a + h * np.arange(1, n), h
        # cell-centered grid on (0, r_max); excludes r = 0 by construction
        h = self.r_max / n
        return h * (np.arange(1, n + 1) - 0.5), h


def _tridiag(problem: RadialProblem, n=None):
    """Symmetric tridiagonal (diag, off) for the radial operator, together
    with the similarity weight sqrt(w) mapping back to function values.

    d = 1: node-centered, Dirichlet at both interval ends.
    d >= 2: conservative divergence form -1/2 r^{1-d} (r^{d-1} phi')' + V on a
    cell-centered grid (natural regularity at 0, Dirichlet at r_max),
    symmetrized by the volume weight w = r^{d-1}.
    """
    r, h = problem.grid(n)
    v = np.asarray(problem.potential(r), dtype=float)
    if problem.dimension == 1:
        diag = 1.0 / h ** 2 + v
        off = np.full(r.size - 1, -0.5 / h ** 2)
        return r, h, diag, off, np.ones(r.size)

    d = problem.dimension
    m = r.size
    faces = h * np.arange(0, m + 1)           # r_{j-1/2} positions
    wf = faces ** (d - 1)
    w = r ** (d - 1)
    diag = 0.5 * (wf[:-1] + wf[1:]) / h ** 2 + w * v
    diag[-1] += 0.5 * wf[-1] / h ** 2         # Dirichlet ghost phi_{n+1}=-phi_n
    off = -0.5 * wf[1:-1] / h ** 2
    sw = np.sqrt(w)
    return r, h, diag / w, off / (sw[:-1] * sw[1:]), sw


def _sturm_count(diag, off, sigma):
    """Number of eigenvalues of the symmetric tridiagonal below sigma."""
    count = 0
    q = diag[0] - sigma
    if q < 0:
        count += 1
    with np.errstate(over="ignore", divide="ignore"):
        for i in range(1, diag.size):
            denom = q if q != 0 else 1e-300
            q = (diag[i] - sigma) - off[i - 1] ** 2 / denom
            if q < 0:
                count += 1
    return count


def _bracket_smallest(diag, off, tol=1e-8, max_iter=200):
    """Bisection bracket [lo, hi] around the smallest eigenvalue."""
    lo = float(diag.min() - 2.0 * np.abs(off).max() - 1.0)  # Gershgorin
    hi = float(diag.max() + 2.0 * np.abs(off).max() + 1.0)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _sturm_count(diag, off, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol * max(1.0, abs(hi)):
            return lo, hi
    raise OracleError("Sturm bisection failed to bracket the ground eigenvalue")


def _inverse_iteration(diag, off, shift, max_iter=500):
    """Smallest eigenpair of the symmetric tridiagonal (diag, off) via shifted
    inverse iteration; shift must lie below the smallest eigenvalue."""
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    # Rayleigh quotients fluctuate at the roundoff floor set by the matrix norm
    tol = 1e-14 * float(np.abs(diag).max() + 2.0 * np.abs(off).max() + 1.0)
    v = np.full(n, 1.0 / np.sqrt(n))
    lam_prev = None
    for _ in range(max_iter):
        w = solve_banded((1, 1), ab, v)
        w /= np.linalg.norm(w)
        lam = float(w @ (diag * w) + 2.0 * np.sum(off * w[:-1] * w[1:]))
        if lam_prev is not None and abs(lam - lam_prev) < tol:
            if w.sum() < 0:
                w = -w
            return lam, w
        lam_prev = lam
        v = w
    raise OracleError("inverse iteration did not converge")


def radial_ground_eigen(problem: RadialProblem, n=None):
    """Smallest eigenvalue and positive eigenfunction (normalized to max 1)."""
    r, h, diag, off, sw = _tridiag(problem, n)
    lo, _ = _bracket_smallest(diag, off)
    lam, psi = _inverse_iteration(diag, off, shift=lo)
    phi = psi / sw
    phi = phi / np.abs(phi).max()
    if phi.mean() < 0:
        phi = -phi
    return lam, r, phi


def richardson_eigen(problem: RadialProblem):
    """Richardson-extrapolated ground eigenvalue using n and 2n grids.

    Returns (extrapolated, lambda_n, lambda_2n, error_bar). The scheme is
    second order, so extrap = lam_2n + (lam_2n - lam_n)/3.
    """
    lam_n, _, _ = radial_ground_eigen(problem, n=problem.n)
    lam_2n, _, _ = radial_ground_eigen(problem, n=2 * problem.n)
    extrap = lam_2n + (lam_2n - lam_n) / 3.0
    return extrap, lam_n, lam_2n, abs(lam_2n - lam_n) / 3.0


def radial_survival(problem: RadialProblem, t: float, start_radius: float,
                    n_time: int = 400):
    """Crank-Nicolson solve of du/dt = 1/2 Lap u - V u with absorbing boundary,
    evaluated at the start radius: E_x[e^{-int V} 1_{t < exit}]."""
    if t <= 0:
        raise SpecError("t must be > 0")
    r, h, diag, off, sw = _tridiag(problem)
    dt = t / n_time
    n = diag.size
    # symmetric variables psi = sqrt(w) * u, initial u = 1
    psi = sw.copy()

    # (I + dt/2 A) psi_new = (I - dt/2 A) psi, A = -1/2 D2 + V_eff
    ab = np.zeros((3, n))
    ab[0, 1:] = 0.5 * dt * off
    ab[1] = 1.0 + 0.5 * dt * diag
    ab[2, :-1] = 0.5 * dt * off

    for _ in range(n_time):
        rhs = psi - 0.5 * dt * (diag * psi)
        rhs[:-1] -= 0.5 * dt * off * psi[1:]
        rhs[1:] -= 0.5 * dt * off * psi[:-1]
        psi = solve_banded((1, 1), ab, rhs)

    u = psi / sw
    return float(np.interp(start_radius, r, u))


def two_particle_reduction(confining_coefficient: float, pair_potential,
                           d: int, r_max: float = 12.0, n: int = 1200):
    """Ground energy of two Brownian particles with U = sum c|x_i|^2 + v(|x1-x2|).

    Center-of-mass change of variables u = (x1+x2)/sqrt(2), w = (x1-x2)/sqrt(2)
    preserves independent standard Brownian motions and gives
    U = c|u|^2 + c|w|^2 + v(sqrt(2)|w|). Hence
    lambda = lambda_cm + lambda_rel with lambda_cm the d-dim harmonic ground
    energy (from the 1-d solver by separability) and lambda_rel the d-dim
    radial ground energy of c r^2 + v(sqrt(2) r).

    Returns (lambda_total, lambda_cm, lambda_rel).
    """
    if confining_coefficient <= 0:
        raise SpecError("reduction requires a quadratic confining potential")
    c = confining_coefficient
    # one-dimensional harmonic factor: -1/2 psi'' + c x^2
    omega = np.sqrt(2.0 * c)
    L = 8.0 / np.sqrt(omega)
    one_d = RadialProblem(dimension=1, r_max=L, n=n,
                          potential=lambda x: c * x ** 2, interval=(-L, L))
    lam_1d, _, _, _ = richardson_eigen(one_d)
    lam_cm = d * lam_1d

    rel = RadialProblem(dimension=d, r_max=r_max, n=n,
                        potential=lambda r: c * r ** 2 + pair_potential(np.sqrt(2.0) * r))
    lam_rel, _, _, _ = richardson_eigen(rel)
    return lam_cm + lam_rel, lam_cm, lam_rel
