"""Experiment runner: binds TOML configs to the simulation modules.

Every subcommand writes CSV artifacts plus summary.txt into the output
directory. All randomness flows from the single master seed through tagged
substreams, so re-running a config reproduces its files byte for byte
regardless of the worker count.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import potentials as pot
from .config import RunSetup, load_config, resolved_config
from .dynamics import KineticModel
from .fk_engine import run_killed_weighted_paths
from .geometry import contains
from .lyapunov import drift_scan, scan_states
from .oracle import OracleError, RadialProblem, richardson_eigen
from .particle import (Ensemble, estimate_lambda, fit_decay_rate,
                       qsd_histogram, smc_epoch)
from .potentials import SpecError
from .samplers import empirical_char_function, levy_increment
from .streams import substream

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_EXTINCTION = 3
EXIT_ORACLE = 4


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_summary(setup: RunSetup, path, **kv):
    keys = ("theorem_case", "lambda_hat", "lambda_se", "inf_V",
            "qsd_tv_check", "decay_slope", "decay_r2")
    values = {"theorem_case": setup.theorem_case}
    values.update({k: _fmt(v) for k, v in kv.items()})
    with open(path, "w") as fh:
        for k in keys:
            fh.write(f"{k} = {values.get(k, 'nan')}\n")
        fh.write("\n# resolved configuration\n")
        for line in resolved_config(setup).splitlines():
            fh.write(f"# {line}\n")


def _fail(out_dir, code, reason):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "failure.txt"), "w") as fh:
        fh.write(f"exit_code={code} reason={reason}\n")
    print(f"error: {reason}", file=sys.stderr)
    return code


def _inf_potential(setup: RunSetup) -> float:
    """Numeric infimum of V over the scan curve restricted to the domain."""
    radii = np.geomspace(1e-4, 1e3, 400)
    states = scan_states(setup.model, radii)
    pos = setup.model.position(states)
    inside = contains(setup.domain, pos, setup.potential,
                      per_particle=(setup.potential.n, setup.potential.dimension)
                      if isinstance(setup.potential, pot.InteractionSpec) else None)
    vals = np.asarray(setup.potential(pos), dtype=float)[inside]
    vals = vals[np.isfinite(vals)]
    return float(vals.min()) if vals.size else float("nan")


def _fresh_ensemble(setup: RunSetup) -> Ensemble:
    start = setup.start_state()
    return Ensemble(states=np.tile(start, (setup.particles.n, 1)))


def _epoch_rng_factory(setup: RunSetup, purpose: str):
    return lambda epoch: substream(setup.seed, purpose, epoch)


def _run_smc(setup: RunSetup, purpose="epoch", collect_states=False):
    par = setup.particles
    ens = _fresh_ensemble(setup)
    pooled = []
    burn_start = int(np.floor(par.burn_in * par.epochs))
    for k in range(par.epochs):
        if ens.extinct:
            break
        rng = substream(setup.seed, purpose, ens.epoch_index)
        smc_epoch(ens, setup.model, setup.domain, setup.potential,
                  par.delta, setup.dt, rng)
        if collect_states and not ens.extinct and k >= burn_start:
            pooled.append(setup.model.position(ens.states).copy())
    return ens, (np.concatenate(pooled) if pooled else None)


def _hist_box(setup: RunSetup):
    par = setup.particles
    if isinstance(setup.model, KineticModel):
        d = setup.model.dim
    else:
        d = setup.model.state_dim
    lo = np.asarray(par.box_lo if par.box_lo is not None else [-3.0] * d, dtype=float)
    hi = np.asarray(par.box_hi if par.box_hi is not None else [3.0] * d, dtype=float)
    return lo, hi


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(setup: RunSetup, out_dir):
    par = setup.particles
    n_steps = int(round(par.delta / setup.dt))
    starts = np.tile(setup.start_state(), (par.n, 1))
    rng = substream(setup.seed, "simulate")
    batch = run_killed_weighted_paths(setup.model, setup.domain, setup.potential,
                                      starts, setup.dt, n_steps, rng)
    dim = setup.model.state_dim
    header = ["path_id", "alive", "exit_step", "log_weight", "min_dist"] + \
             [f"endpoint_{i}" for i in range(dim)]
    rows = [[i, batch.alive[i], int(batch.exit_step[i]),
             float(batch.log_weight[i]), float(batch.min_singularity_distance[i])]
            + [float(v) for v in batch.endpoints[i]]
            for i in range(par.n)]
    _write_csv(os.path.join(out_dir, "paths.csv"), header, rows)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   inf_V=_inf_potential(setup))
    return EXIT_OK


def cmd_lambda(setup: RunSetup, out_dir):
    ens, _ = _run_smc(setup)
    rows = [[k, ens.log_norm_trace[k], ens.ess_trace[k]]
            for k in range(len(ens.log_norm_trace))]
    _write_csv(os.path.join(out_dir, "lambda_trace.csv"),
               ["epoch", "log_m", "ess"], rows)
    if ens.extinct:
        _write_summary(setup, os.path.join(out_dir, "summary.txt"))
        return _fail(out_dir, EXIT_EXTINCTION, "particle system went extinct")
    lam, se = estimate_lambda(ens.log_norm_trace, setup.particles.delta,
                              setup.particles.burn_in)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   lambda_hat=lam, lambda_se=se, inf_V=_inf_potential(setup))
    print(f"lambda_hat = {lam!r} +- {se!r} "
          f"({len(ens.log_norm_trace)} epochs, burn-in {setup.particles.burn_in})")
    return EXIT_OK


def cmd_qsd(setup: RunSetup, out_dir):
    ens, pooled = _run_smc(setup, collect_states=True)
    if ens.extinct or pooled is None:
        return _fail(out_dir, EXIT_EXTINCTION, "particle system went extinct")
    lo, hi = _hist_box(setup)
    hist = qsd_histogram(pooled, _identity_model(setup), lo, hi,
                         setup.particles.bins)
    centers = hist.centers()
    header = [f"bin_center_{a}" for a in range(hist.dim)] + ["mass"]
    rows = []
    for idx in np.ndindex(hist.mass.shape):
        rows.append([centers[a][idx[a]] for a in range(hist.dim)]
                    + [float(hist.mass[idx])])
    rows.append([float("nan")] * hist.dim + [hist.overflow])
    _write_csv(os.path.join(out_dir, "qsd.csv"), header, rows)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   inf_V=_inf_potential(setup))
    return EXIT_OK


class _IdentityModel:
    """Position-passthrough shim so pooled position arrays can be histogrammed."""
    def position(self, states):
        return states


def _identity_model(setup):
    return _IdentityModel()


def cmd_convergence(setup: RunSetup, out_dir):
    from .particle import convergence_trace
    ens, pooled = _run_smc(setup, collect_states=True)
    if ens.extinct or pooled is None:
        return _fail(out_dir, EXIT_EXTINCTION, "reference run went extinct")
    lo, hi = _hist_box(setup)
    rho = qsd_histogram(pooled, _identity_model(setup), lo, hi,
                        setup.particles.bins)
    start = np.tile(setup.start_state(), (setup.particles.n, 1))
    rng = substream(setup.seed, "convergence")
    times, tvs, extinct = convergence_trace(start, setup.model, setup.domain,
                                            setup.potential, rho,
                                            setup.particles.delta, setup.dt,
                                            setup.particles.epochs // 2, rng)
    floor = float(setup.raw.get("particles", {}).get("noise_floor", 0.05))
    try:
        slope, r2 = fit_decay_rate(times, tvs, noise_floor=floor)
    except SpecError:
        slope, r2 = float("nan"), float("nan")
    rows = [[float(times[i]), float(tvs[i]), slope, r2]
            for i in range(times.size)]
    _write_csv(os.path.join(out_dir, "convergence.csv"),
               ["t", "tv", "slope", "r2"], rows)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   decay_slope=slope, decay_r2=r2, inf_V=_inf_potential(setup))
    if extinct:
        return _fail(out_dir, EXIT_EXTINCTION, "convergence run went extinct")
    return EXIT_OK


def cmd_lyapunov(setup: RunSetup, out_dir):
    ly = setup.lyapunov
    radii = np.geomspace(ly.scan_lo, ly.scan_hi, ly.scan_points)
    report = drift_scan(setup.model, ly.spec, setup.potential, ly.p_list,
                        radii, threshold=ly.threshold)
    rows = []
    for row in report.rows:
        for i, r in enumerate(report.scan_coordinate):
            rows.append([float(r), row.p, float(report.ratio[i]),
                         float(row.values[i])])
    _write_csv(os.path.join(out_dir, "lyapunov_scan.csv"),
               ["scan_coordinate", "p", "ratio", "ratio_minus_pV"], rows)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   inf_V=_inf_potential(setup))
    return EXIT_OK


def cmd_sampler_test(setup: RunSetup, out_dir, n_samples=100_000, n_freq=20):
    model = setup.model
    if not hasattr(model, "levy"):
        return _fail(out_dir, EXIT_VALIDATION,
                     "sampler-test needs a Levy process variant")
    spec = model.levy
    rng = substream(setup.seed, "sampler-test")
    dt = setup.dt
    samples = levy_increment(spec, dt, rng, size=n_samples)
    rows = []
    for i in range(n_freq):
        u = np.zeros(spec.dimension)
        u[0] = 3.0 * (i + 1) / n_freq
        emp = empirical_char_function(samples, u)
        target = np.exp(-dt * spec.char_exponent(u))
        rows.append([float(np.linalg.norm(u)), emp.real, emp.imag,
                     float(target), 0.0, abs(emp - target)])
    _write_csv(os.path.join(out_dir, "charfun.csv"),
               ["u_norm", "emp_real", "emp_imag", "target_real",
                "target_imag", "abs_err"], rows)
    _write_summary(setup, os.path.join(out_dir, "summary.txt"))
    return EXIT_OK


def cmd_oracle(setup: RunSetup, out_dir):
    p = setup.potential
    if not isinstance(p, pot.PotentialSpec):
        return _fail(out_dir, EXIT_VALIDATION,
                     "the grid oracle handles point-singular potentials only")
    d = p.dimension
    if setup.domain.kind == "ball":
        r_max = float(setup.domain.radius)
    else:
        # truncate where V has climbed 40 above its minimum
        radii = np.geomspace(1e-3, 1e3, 2000)
        vals = p.radial(radii)
        vmin = vals[np.isfinite(vals)].min()
        above = radii[(vals >= vmin + 40.0) & (radii > 1.0)]
        r_max = float(above[0]) if above.size else 50.0
    if d == 1:
        problem = RadialProblem(dimension=1, r_max=r_max, n=800,
                                potential=p.radial, interval=(-r_max, r_max))
    else:
        problem = RadialProblem(dimension=d, r_max=r_max, n=800,
                                potential=p.radial)
    try:
        extrap, lam_n, lam_2n, err = richardson_eigen(problem)
    except OracleError as exc:
        return _fail(out_dir, EXIT_ORACLE, f"oracle non-convergence: {exc}")
    _write_csv(os.path.join(out_dir, "oracle.csv"),
               ["lambda_ref", "grid_n", "extrapolated", "error_bar"],
               [[lam_2n, problem.n * 2, extrap, err]])
    _write_summary(setup, os.path.join(out_dir, "summary.txt"),
                   lambda_hat=extrap, lambda_se=err)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "lambda": cmd_lambda,
    "qsd": cmd_qsd,
    "convergence": cmd_convergence,
    "lyapunov": cmd_lyapunov,
    "sampler-test": cmd_sampler_test,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fksim",
        description="killed Feynman-Kac semigroup experiments")
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker count (results are worker-independent)")
    parser.add_argument("--out", default=None, help="override output directory")
    args = parser.parse_args(argv)

    try:
        setup = load_config(args.config, seed_override=args.seed,
                            out_override=args.out)
    except (SpecError, FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        out_dir = args.out or "out"
        return _fail(out_dir, EXIT_VALIDATION, f"validation failure: {exc}")

    out_dir = setup.out_dir
    os.makedirs(out_dir, exist_ok=True)
    try:
        return COMMANDS[args.subcommand](setup, out_dir)
    except SpecError as exc:
        return _fail(out_dir, EXIT_VALIDATION, f"validation failure: {exc}")


if __name__ == "__main__":
    sys.exit(main())
