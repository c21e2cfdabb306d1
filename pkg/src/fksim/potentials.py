"""Schrodinger potential families: singular classes, interaction energies, drifts.

All evaluators are vectorized over a leading batch axis and total on the
extended reals: the singular set maps to the +inf sentinel, never to NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

INF = np.inf


class SpecError(ValueError):
    """Raised when a potential/drift specification fails validation."""


# ---------------------------------------------------------------------------
# part descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RieszPart:
    """Repulsive power-law singularity c / |x|^b (b=1, d=3 is Coulomb-like)."""
    exponent: float = 1.0
    coefficient: float = 1.0

    def validate(self):
        if self.exponent <= 0 or self.coefficient <= 0:
            raise SpecError("riesz part needs exponent > 0 and coefficient > 0")


@dataclass(frozen=True)
class LennardJonesPart:
    """4*eps*((sigma/u)^12 - (sigma/u)^6); minimum -eps at u = 2^(1/6) sigma."""
    well_depth: float = 1.0
    length_scale: float = 1.0

    def validate(self):
        if self.well_depth <= 0 or self.length_scale <= 0:
            raise SpecError("lennard_jones part needs positive parameters")


@dataclass(frozen=True)
class LogPart:
    """-c * log(u). Unbounded below at infinity; needs a confining partner."""
    coefficient: float = 1.0

    def validate(self):
        if self.coefficient <= 0:
            raise SpecError("log_singular part needs coefficient > 0")


@dataclass(frozen=True)
class PowerPart:
    """Confining term c * |x|^k, k > 0."""
    exponent: float = 2.0
    coefficient: float = 1.0

    def validate(self):
        if self.exponent <= 0 or self.coefficient <= 0:
            raise SpecError("power part needs exponent > 0 and coefficient > 0")


SingularPart = Union[RieszPart, LennardJonesPart, LogPart]


# ---------------------------------------------------------------------------
# PotentialSpec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    """A point-singular + confining potential on R^d, singular set {0}.

    V(x) = singular(|x|) + confining(|x|) + offset, with a closed-form lower
    bound -k_S recorded at validation time.
    """
    dimension: int
    singular: Optional[SingularPart] = None
    confining: Optional[PowerPart] = None
    offset: float = 0.0
    lower_bound: float = field(init=False, default=0.0)  # k_S: V >= -k_S

    def __post_init__(self):
        if self.dimension < 1:
            raise SpecError("dimension must be a positive integer")
        if self.singular is not None:
            self.singular.validate()
        if self.confining is not None:
            self.confining.validate()
        cls, k_s = _classify(self)
        if cls == "invalid":
            raise SpecError("potential is not bounded below "
                            "(log singularity without confinement)")
        object.__setattr__(self, "lower_bound", k_s)

    @property
    def is_singular(self) -> bool:
        return self.singular is not None

    def base_radial(self, r):
        """V - offset on radii r >= 0 (the non-constant part, no clamping)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        if self.singular is not None:
            with np.errstate(divide="ignore"):
                out = out + _singular_radial(self.singular, r)
        if self.confining is not None:
            c = self.confining
            out = out + c.coefficient * r ** c.exponent
        return out

    def radial(self, r):
        """Evaluate V on radii r >= 0 (vectorized, +inf on the singular set)."""
        out = self.base_radial(r) + self.offset
        # guard against rounding dipping below the certified bound
        return np.maximum(out, -self.lower_bound)

    def base(self, x):
        """V - offset at points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        return self.base_radial(np.linalg.norm(x, axis=-1))

    def __call__(self, x):
        """V at points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        return self.radial(np.linalg.norm(x, axis=-1))


def _singular_radial(part: SingularPart, r: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if isinstance(part, RieszPart):
            v = part.coefficient * r ** (-part.exponent)
        elif isinstance(part, LennardJonesPart):
            u6 = (part.length_scale / r) ** 6
            v = 4.0 * part.well_depth * (u6 * u6 - u6)
        elif isinstance(part, LogPart):
            v = np.where(r > 0, -part.coefficient * np.log(np.maximum(r, 1e-300)), INF)
        else:  # pragma: no cover
            raise SpecError(f"unknown singular part {part!r}")
    return np.where(r > 0, v, INF)


def _classify(spec: PotentialSpec):
    """Return (class, k_S) where class is 'S1', 'S2', 'none', or 'invalid'."""
    sing, conf = spec.singular, spec.confining
    if isinstance(sing, LogPart) and conf is None:
        return "invalid", 0.0

    # lower bound of the radial profile, offset included
    if sing is None:
        base = 0.0
    elif isinstance(sing, RieszPart):
        base = 0.0
    elif isinstance(sing, LennardJonesPart):
        base = -sing.well_depth
    elif isinstance(sing, LogPart):
        # minimize c_p r^k - c_l log r over r > 0
        c_l = sing.coefficient
        c_p, k = conf.coefficient, conf.exponent
        r_star = (c_l / (c_p * k)) ** (1.0 / k)
        base = c_p * r_star ** k - c_l * math.log(r_star)
        # the power part is counted inside `base`; do not double count below
        k_s = max(0.0, -(base + spec.offset))
        cls = "S2"
        return cls, k_s
    else:  # pragma: no cover
        raise SpecError(f"unknown singular part {sing!r}")

    k_s = max(0.0, -(base + spec.offset))
    if sing is None:
        return "none", k_s
    cls = "S2" if conf is not None else "S1"
    return cls, k_s


def classify(spec: PotentialSpec):
    """Classification (S1 / S2 / none) plus the lower bound k_S of a spec."""
    return _classify(spec)


def eval_schrodinger(spec: PotentialSpec, x):
    """V(x) on the extended reals; +inf exactly on the singular set."""
    return spec(x)


# ---------------------------------------------------------------------------
# interacting-particle energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogWithFloorPart:
    """Pair potential max(-c*log u, 0): diverges at 0+, floored at zero."""
    coefficient: float = 1.0

    def validate(self):
        if self.coefficient <= 0:
            raise SpecError("log_with_floor needs coefficient > 0")


PairPart = Union[RieszPart, LennardJonesPart, LogWithFloorPart]


def _pair_radial(part: PairPart, u: np.ndarray) -> np.ndarray:
    if isinstance(part, LogWithFloorPart):
        with np.errstate(divide="ignore"):
            v = np.where(u > 0, -part.coefficient * np.log(np.maximum(u, 1e-300)), INF)
        return np.where(u > 0, np.maximum(v, 0.0), INF)
    return _singular_radial(part, u)


def _pair_lower_bound(part: PairPart) -> float:
    if isinstance(part, LennardJonesPart):
        return part.well_depth
    return 0.0  # riesz and floored log are nonnegative


@dataclass(frozen=True)
class InteractionSpec:
    """Energy of n particles: sum_i V_inf(x_i) + sum_{i<j} v_S(|x_i - x_j|)."""
    n: int
    confining: PotentialSpec          # V_inf, must be nonsingular and coercive
    pair: PairPart                    # v_S
    pair_lower_bound: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.n < 2:
            raise SpecError("interaction needs n >= 2 particles")
        if self.confining.is_singular:
            raise SpecError("V_inf must not be singular")
        if self.confining.confining is None:
            raise SpecError("V_inf must be coercive (confining part required)")
        self.pair.validate()
        object.__setattr__(self, "pair_lower_bound", _pair_lower_bound(self.pair))

    @property
    def dimension(self) -> int:
        return self.confining.dimension

    @property
    def offset(self) -> float:
        # total additive constant, used by the weight accumulator
        return self.n * self.confining.offset

    def _eval(self, config, confining_eval):
        """Sorted-term evaluation so the value is exactly invariant under
        particle permutations (floating-point addition is not)."""
        x = _as_config(config, self.n, self.dimension)
        conf = np.sort(confining_eval(x), axis=-1)
        pair = [
            _pair_radial(self.pair,
                         np.linalg.norm(x[..., i, :] - x[..., j, :], axis=-1))
            for i in range(self.n) for j in range(i + 1, self.n)
        ]
        pair = np.sort(np.stack(pair, axis=-1), axis=-1)
        return conf.sum(axis=-1) + pair.sum(axis=-1)

    def base(self, config):
        """U_S - offset (the non-constant part)."""
        return self._eval(config, self.confining.base)

    def __call__(self, config):
        """U_S for configurations of shape (..., n, d) or flat (..., n*d)."""
        return self._eval(config, self.confining)


def _as_config(config, n, d):
    x = np.asarray(config, dtype=float)
    if x.shape[-1] == n * d and (x.ndim == 1 or x.shape[-2:] != (n, d)):
        x = x.reshape(x.shape[:-1] + (n, d))
    if x.shape[-2:] != (n, d):
        raise SpecError(f"configuration shape {x.shape} does not match (n={n}, d={d})")
    return x


def eval_interaction(spec: InteractionSpec, config):
    """U_S(config); +inf iff two particles coincide."""
    return spec(config)


# ---------------------------------------------------------------------------
# line-charge potential in R^3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineChargeSpec:
    """v_S applied to the distance from the vertical axis {(0,0,t)}, plus V_inf."""
    radial_profile: PairPart
    confining: PotentialSpec

    def __post_init__(self):
        if self.confining.dimension != 3:
            raise SpecError("line-charge potentials live in R^3")
        if self.confining.is_singular:
            raise SpecError("confining part of a line charge must be nonsingular")
        self.radial_profile.validate()

    @property
    def dimension(self) -> int:
        return 3

    @property
    def offset(self) -> float:
        return self.confining.offset

    def axis_distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.hypot(x[..., 0], x[..., 1])

    def base(self, x):
        """C_S - offset (the non-constant part)."""
        x = np.asarray(x, dtype=float)
        return (_pair_radial(self.radial_profile, self.axis_distance(x))
                + self.confining.base(x))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _pair_radial(self.radial_profile, self.axis_distance(x)) + self.confining(x)


Potential = Union[PotentialSpec, InteractionSpec, LineChargeSpec]


def potential_offset(p: Potential) -> float:
    """The additive constant of a potential (split off for exact weight shifts)."""
    return p.offset


def eval_base(p: Potential, x):
    """V - offset evaluated without the offset round trip.

    Bit-identical for two specs differing only in their constant part; this is
    what makes the discrete potential-shift identity exact in floating point.
    """
    return p.base(x)


def potential_lower_bound(p: Potential) -> float:
    """A k_S with V >= -k_S (closed form per family)."""
    if isinstance(p, PotentialSpec):
        return p.lower_bound
    if isinstance(p, InteractionSpec):
        n = p.n
        return n * p.confining.lower_bound + (n * (n - 1) / 2) * p.pair_lower_bound
    if isinstance(p, LineChargeSpec):
        return p.confining.lower_bound + _pair_lower_bound(p.radial_profile)
    raise SpecError(f"not a potential: {p!r}")


# ---------------------------------------------------------------------------
# drifts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftSpec:
    """Confining drift b_c. kind in {zero, linear, gradient_power, double_well}.

    linear:          b(x) = -kappa * x
    gradient_power:  b(x) = -grad(c |x|^k / k) = -c |x|^(k-2) x, k >= 2
    double_well:     b(x) = -grad((|x|^2 - 1)^2 / 4) = -(|x|^2 - 1) x
    """
    kind: str = "zero"
    kappa: float = 1.0
    coefficient: float = 1.0
    exponent: float = 4.0
    growth_class: str = field(init=False, default="c2")

    def __post_init__(self):
        if self.kind not in ("zero", "linear", "gradient_power", "double_well"):
            raise SpecError(f"unknown drift kind {self.kind!r}")
        if self.kind == "linear" and self.kappa < 0:
            raise SpecError("linear drift needs kappa >= 0")
        if self.kind == "gradient_power":
            if self.coefficient <= 0 or self.exponent < 2:
                raise SpecError("gradient_power needs coefficient > 0 and exponent >= 2")
        # derived growth class: c1 means b.x/|x| -> -inf, c2 means at most linear
        if self.kind in ("zero", "linear"):
            tag = "c2"
        elif self.kind == "gradient_power":
            tag = "both" if self.exponent == 2 else "c1"
        else:
            tag = "c1"
        object.__setattr__(self, "growth_class", tag)

    @property
    def is_gradient(self) -> bool:
        return self.kind in ("zero", "linear", "gradient_power", "double_well")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "linear":
            return -self.kappa * x
        r2 = np.sum(x * x, axis=-1, keepdims=True)
        if self.kind == "gradient_power":
            return -self.coefficient * r2 ** ((self.exponent - 2) / 2.0) * x
        return -(r2 - 1.0) * x  # double well

    def primitive(self, x):
        """V_c with b = -grad V_c, floored so that V_c >= 1 (kinetic model)."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        if self.kind == "zero":
            return np.ones(r.shape)
        if self.kind == "linear":
            return 0.5 * self.kappa * r ** 2 + 1.0
        if self.kind == "gradient_power":
            return (self.coefficient / self.exponent) * r ** self.exponent + 1.0
        return 0.25 * (r ** 2 - 1.0) ** 2 + 1.0

    def grad_primitive(self, x):
        return -self(x)


def eval_drift(spec: DriftSpec, x):
    """b_c(x), locally Lipschitz by construction of the families."""
    return spec(x)
