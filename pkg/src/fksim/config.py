"""Experiment configuration: TOML parsing and theorem-case validation."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from . import potentials as pot
from .dynamics import (InteractingModel, KineticModel, LevyModel, Model,
                       OverdampedModel)
from .geometry import DomainSpec
from .lyapunov import LyapunovSpec
from .potentials import SpecError
from .samplers import LevySpec

THEOREM_CASES = ("oL_case1", "oL_case2", "levy", "kinetic", "interacting",
                 "line_charge", "nonsingular")


@dataclass
class ParticleParams:
    n: int = 1024
    delta: float = 0.1
    epochs: int = 200
    burn_in: float = 0.5
    start: Optional[list] = None
    box_lo: Optional[list] = None
    box_hi: Optional[list] = None
    bins: int = 64


@dataclass
class LyapunovParams:
    spec: LyapunovSpec = field(default_factory=lambda: LyapunovSpec("unit"))
    p_list: tuple = (1.5, 2.0, 4.0)
    scan_lo: float = 1e-3
    scan_hi: float = 1e3
    scan_points: int = 61
    threshold: float = 100.0


@dataclass
class RunSetup:
    theorem_case: str
    model: Model
    potential: pot.Potential
    domain: DomainSpec
    dt: float
    particles: ParticleParams
    lyapunov: LyapunovParams
    seed: int
    out_dir: str
    raw: dict

    def start_state(self) -> np.ndarray:
        if self.particles.start is not None:
            s = np.asarray(self.particles.start, dtype=float)
            if s.size != self.model.state_dim:
                raise SpecError("start state dimension mismatch")
            return s
        return _default_start(self.model)


def _default_start(model: Model) -> np.ndarray:
    s = np.zeros(model.state_dim)
    if isinstance(model, (OverdampedModel, LevyModel, KineticModel)):
        s[0] = 1.0
    else:
        d = model.dim
        for i in range(model.n):
            s[i * d] = float(i + 1)
    return s


def _build_singular(section: dict):
    kind = section.get("singular", "none")
    if kind == "none":
        return None
    if kind == "riesz":
        return pot.RieszPart(section.get("singular_exponent", 1.0),
                             section.get("singular_coefficient", 1.0))
    if kind == "lennard_jones":
        return pot.LennardJonesPart(section.get("well_depth", 1.0),
                                    section.get("length_scale", 1.0))
    if kind == "log_singular":
        return pot.LogPart(section.get("singular_coefficient", 1.0))
    raise SpecError(f"unknown singular kind {kind!r}")


def _build_confining(section: dict):
    kind = section.get("confining", "none")
    if kind == "none":
        return None
    if kind == "power":
        return pot.PowerPart(section.get("confining_exponent", 2.0),
                             section.get("confining_coefficient", 1.0))
    raise SpecError(f"unknown confining kind {kind!r}")


def _build_pair(section: dict):
    kind = section.get("pair", "riesz")
    if kind == "riesz":
        return pot.RieszPart(section.get("pair_exponent", 1.0),
                             section.get("pair_coefficient", 1.0))
    if kind == "lennard_jones":
        return pot.LennardJonesPart(section.get("well_depth", 1.0),
                                    section.get("length_scale", 1.0))
    if kind == "log_with_floor":
        return pot.LogWithFloorPart(section.get("pair_coefficient", 1.0))
    raise SpecError(f"unknown pair kind {kind!r}")


def _build_drift(proc: dict) -> pot.DriftSpec:
    return pot.DriftSpec(
        kind=proc.get("drift", "zero"),
        kappa=proc.get("kappa", 1.0),
        coefficient=proc.get("drift_coefficient", 1.0),
        exponent=proc.get("drift_exponent", 4.0),
    )


def load_config(path: str, seed_override=None, out_override=None) -> RunSetup:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return build_setup(raw, seed_override=seed_override, out_override=out_override)


def build_setup(raw: dict, seed_override=None, out_override=None) -> RunSetup:
    case = raw.get("theorem_case")
    if case not in THEOREM_CASES:
        raise SpecError(f"theorem_case must be one of {THEOREM_CASES}, got {case!r}")

    proc = raw.get("process", {})
    psec = raw.get("potential", {})
    dsec = raw.get("domain", {})
    outsec = raw.get("output", {})

    dim = int(proc.get("dimension", 2))
    dt = float(proc.get("dt", 1e-3))
    variant = proc.get("variant", "overdamped")

    # potential
    if case == "interacting" or variant == "interacting":
        n_part = int(proc.get("n_particles_model4", 2))
        confining = pot.PotentialSpec(dimension=dim,
                                      confining=_build_confining(psec),
                                      offset=psec.get("offset", 0.0))
        potential = pot.InteractionSpec(n=n_part, confining=confining,
                                        pair=_build_pair(psec))
    elif case == "line_charge" or psec.get("line_charge", False):
        confining = pot.PotentialSpec(dimension=3,
                                      confining=_build_confining(psec),
                                      offset=psec.get("offset", 0.0))
        potential = pot.LineChargeSpec(radial_profile=_build_pair(psec),
                                       confining=confining)
        dim = 3
    else:
        potential = pot.PotentialSpec(dimension=dim,
                                      singular=_build_singular(psec),
                                      confining=_build_confining(psec),
                                      offset=psec.get("offset", 0.0))

    # model
    if variant == "overdamped":
        model = OverdampedModel(drift=_build_drift(proc), dim=dim)
    elif variant == "levy":
        model = LevyModel(levy=LevySpec(family=proc.get("family", "isotropic_stable"),
                                        dimension=dim,
                                        alpha=proc.get("alpha", 1.5),
                                        m=proc.get("m", 1.0)))
    elif variant == "kinetic":
        model = KineticModel(drift=_build_drift(proc),
                             gamma=float(proc.get("gamma", 1.0)), dim=dim)
    elif variant == "interacting":
        model = InteractingModel(n=int(proc.get("n_particles_model4", 2)),
                                 levy=LevySpec(family=proc.get("family", "brownian_standard"),
                                               dimension=dim,
                                               alpha=proc.get("alpha", 1.5),
                                               m=proc.get("m", 1.0)),
                                 interaction=potential if isinstance(potential, pot.InteractionSpec) else None)
    else:
        raise SpecError(f"unknown process variant {variant!r}")

    domain = DomainSpec(
        kind=dsec.get("kind", "full"),
        center=tuple(dsec.get("center", ())),
        radius=dsec.get("radius", 1.0),
        r_in=dsec.get("r_in", 0.5),
        r_out=dsec.get("r_out", 1.0),
        normal=tuple(dsec.get("normal", ())),
        offset=dsec.get("offset", 0.0),
    )

    _check_theorem_case(case, model, potential, dim)

    par = raw.get("particles", {})
    particles = ParticleParams(
        n=int(par.get("n", 1024)),
        delta=float(par.get("delta", 0.1)),
        epochs=int(par.get("epochs", 200)),
        burn_in=float(par.get("burn_in", 0.5)),
        start=par.get("start"),
        box_lo=par.get("box_lo"),
        box_hi=par.get("box_hi"),
        bins=int(par.get("bins", 64)),
    )

    ly = raw.get("lyapunov", {})
    gamma = float(proc.get("gamma", 1.0))
    lspec = LyapunovSpec(kind=ly.get("kind", "unit"), eps=ly.get("eps", 0.1),
                         k=ly.get("k", 4.0), a=ly.get("a", 1.0),
                         b=ly.get("b", 0.2), gamma=ly.get("gamma", gamma))
    lyap = LyapunovParams(spec=lspec,
                          p_list=tuple(ly.get("p_list", [1.5, 2.0, 4.0])),
                          scan_lo=float(ly.get("scan_lo", 1e-3)),
                          scan_hi=float(ly.get("scan_hi", 1e3)),
                          scan_points=int(ly.get("scan_points", 61)),
                          threshold=float(ly.get("threshold", 100.0)))

    seed = seed_override if seed_override is not None else outsec.get("seed")
    if seed is None:
        raise SpecError("a seed is mandatory ([output] seed or --seed)")
    out_dir = out_override if out_override is not None else outsec.get("directory", "out")

    return RunSetup(theorem_case=case, model=model, potential=potential,
                    domain=domain, dt=dt, particles=particles, lyapunov=lyap,
                    seed=int(seed), out_dir=out_dir, raw=raw)


def _check_theorem_case(case, model, potential, dim):
    """Enforce the hypothesis pairing of the declared theorem case."""
    def pclass():
        return pot.classify(potential)[0] if isinstance(potential, pot.PotentialSpec) else None

    if case == "oL_case1":
        if not isinstance(model, OverdampedModel):
            raise SpecError("oL_case1 needs the overdamped model")
        if model.drift.growth_class not in ("c1", "both"):
            raise SpecError("oL_case1 requires a drift of class c1")
        if pclass() not in ("S1", "S2"):
            raise SpecError("oL_case1 requires an S1 or S2 potential")
    elif case == "oL_case2":
        if not isinstance(model, OverdampedModel):
            raise SpecError("oL_case2 needs the overdamped model")
        if pclass() != "S2":
            raise SpecError("oL_case2 requires an S2 potential")
    elif case == "levy":
        if not isinstance(model, LevyModel):
            raise SpecError("levy case needs a Levy model")
        if pclass() != "S2":
            raise SpecError("the Levy theorem case requires an S2 potential")
    elif case == "kinetic":
        if not isinstance(model, KineticModel):
            raise SpecError("kinetic case needs the kinetic model")
        if model.drift.growth_class not in ("c1", "both"):
            raise SpecError("kinetic case requires a c1-class gradient drift")
        if pclass() not in ("S1", "S2"):
            raise SpecError("kinetic case requires an S1 or S2 potential")
    elif case == "interacting":
        if not isinstance(model, InteractingModel):
            raise SpecError("interacting case needs the interacting model")
        if not isinstance(potential, pot.InteractionSpec):
            raise SpecError("interacting case needs an interaction potential")
    elif case == "line_charge":
        if not isinstance(potential, pot.LineChargeSpec):
            raise SpecError("line_charge case needs a line-charge potential")
        if dim != 3:
            raise SpecError("line_charge case lives in R^3")
    elif case == "nonsingular":
        if not isinstance(potential, pot.PotentialSpec) or potential.is_singular:
            raise SpecError("nonsingular case needs a nonsingular potential")
        if potential.confining is None:
            raise SpecError("nonsingular case needs a coercive potential")


def resolved_config(setup: RunSetup) -> str:
    """Echo the resolved configuration as TOML-style text (round-trippable)."""
    lines = [f'theorem_case = "{setup.theorem_case}"', ""]

    def emit(name, table):
        lines.append(f"[{name}]")
        for k, v in table.items():
            if isinstance(v, str):
                lines.append(f'{k} = "{v}"')
            elif isinstance(v, bool):
                lines.append(f"{k} = {str(v).lower()}")
            elif isinstance(v, (list, tuple)):
                lines.append(f"{k} = [{', '.join(repr(float(x)) if isinstance(x, float) else repr(x) for x in v)}]")
            elif v is not None:
                lines.append(f"{k} = {v!r}")
        lines.append("")

    for name in ("process", "potential", "domain", "particles", "lyapunov"):
        if name in setup.raw:
            emit(name, setup.raw[name])
    emit("output", {**setup.raw.get("output", {}),
                    "seed": setup.seed, "directory": setup.out_dir})
    return "\n".join(lines)
