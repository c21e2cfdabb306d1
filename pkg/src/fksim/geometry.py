"""Killing subdomains and singularity distances.

Domains are open; a state on the boundary counts as exited. Membership always
excludes the singular set of the active potential. For the kinetic model only
the position component is tested (the metastable sets are O x R^d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .potentials import (InteractionSpec, LineChargeSpec, Potential,
                         PotentialSpec, SpecError)

KINDS = ("full", "ball", "annulus", "ball_complement", "halfspace")


@dataclass(frozen=True)
class DomainSpec:
    kind: str = "full"
    center: tuple = ()
    radius: float = 1.0
    r_in: float = 0.5
    r_out: float = 1.0
    normal: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown domain kind {self.kind!r}")
        if self.kind in ("ball", "ball_complement") and self.radius <= 0:
            raise SpecError("radius must be > 0")
        if self.kind == "annulus" and not (0 <= self.r_in < self.r_out):
            raise SpecError("annulus needs 0 <= r_in < r_out")

    def contains_positions(self, x) -> np.ndarray:
        """Open geometric membership for points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "full":
            return np.ones(x.shape[:-1], dtype=bool)
        if self.kind in ("ball", "annulus", "ball_complement"):
            c = np.asarray(self.center, dtype=float) if len(self.center) else 0.0
            if len(self.center) and len(self.center) != x.shape[-1]:
                raise SpecError("domain center dimension mismatch")
            r = np.linalg.norm(x - c, axis=-1)
            if self.kind == "ball":
                return r < self.radius
            if self.kind == "ball_complement":
                return r > self.radius
            return (r > self.r_in) & (r < self.r_out)
        n = np.asarray(self.normal, dtype=float)
        if n.shape[-1] != x.shape[-1]:
            raise SpecError("halfspace normal dimension mismatch")
        return x @ n < self.offset


def singularity_distance(positions, potential: Potential) -> np.ndarray:
    """Distance to the singular set of the active potential.

    |x| for point-singular potentials, min pairwise distance for interacting
    configurations, distance to the axis for line charges, +inf when the
    potential has no singular set.
    """
    x = np.asarray(positions, dtype=float)
    if isinstance(potential, InteractionSpec):
        n, d = potential.n, potential.dimension
        if x.shape[-1] == n * d:
            x = x.reshape(x.shape[:-1] + (n, d))
        dmin = np.full(x.shape[:-2], np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                dmin = np.minimum(
                    dmin, np.linalg.norm(x[..., i, :] - x[..., j, :], axis=-1))
        return dmin
    if isinstance(potential, LineChargeSpec):
        return potential.axis_distance(x)
    if isinstance(potential, PotentialSpec) and not potential.is_singular:
        return np.full(x.shape[:-1], np.inf)
    return np.linalg.norm(x, axis=-1)


def contains(domain: DomainSpec, positions, potential: Optional[Potential] = None,
             per_particle: Optional[tuple] = None) -> np.ndarray:
    """Open membership of position states, singular set excluded.

    `per_particle=(n, d)` applies the domain blockwise to an interacting
    configuration (all particles must lie inside).
    """
    x = np.asarray(positions, dtype=float)
    if per_particle is not None:
        n, d = per_particle
        blocks = x.reshape(x.shape[:-1] + (n, d))
        inside = domain.contains_positions(blocks).all(axis=-1)
    else:
        inside = domain.contains_positions(x)
    if potential is not None:
        inside = inside & (singularity_distance(x, potential) > 0)
    return inside
