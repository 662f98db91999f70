"""Command-line interface.

Subcommands: check-structure, simulate, decay-fit, decompose-verify,
lemma3-probe, profile-ode, run.  Numeric inputs accept exact rational
strings where exactness matters (tensor entries, matrix entries).
Exit status is 0 when all declared assertions pass, 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import decomposition, harness, profile
from .evolution import simulate
from .nonlinearity import (HermitianForm, builtin_tensor,
                           hermitian_from_config, structure_search,
                           structure_verify, tensor_from_config)
from .spectral import SpectralGrid


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _tensor_from_args(args):
    if args.tensor_file:
        return tensor_from_config(_load_json(args.tensor_file))
    if args.tensor:
        return builtin_tensor(args.tensor)
    raise SystemExit("provide --tensor NAME or --tensor-file FILE")


def _matrix_from_args(args, n):
    if args.matrix_a is None:
        return None
    spec = args.matrix_a
    if spec == "identity":
        return HermitianForm.identity(n)
    if spec.startswith("diag:"):
        return HermitianForm.diagonal(spec[5:].split(","))
    return hermitian_from_config(_load_json(spec))


def _emit(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True,
                      default=harness._json_default)
    if path:
        Path(path).write_text(text + "\n")
    print(text)


def cmd_check_structure(args) -> int:
    tensor = _tensor_from_args(args)
    matrix = _matrix_from_args(args, tensor.n_components)
    out = {"tensor": tensor.to_config()}
    ok = True
    if matrix is not None:
        verdict = structure_verify(tensor, matrix)
        out["holds"] = verdict.holds
        if not verdict.holds:
            y, val = verdict.witness
            out["witness"] = {"y": [[z.real, z.imag] for z in y],
                              "im_value": val}
            out["violating_monomials"] = [
                {"alpha": list(a), "beta": list(b)}
                for (a, b), _, _ in verdict.violations]
        ok = verdict.holds
    else:
        result = structure_search(tensor)
        out["search_status"] = result.status
        out["obstruction"] = result.obstruction
        if result.matrix is not None:
            out["matrix"] = result.matrix.to_config()
        ok = result.found
    _emit(out, args.json)
    return 0 if ok else 1


def cmd_simulate(args) -> int:
    scenario = harness.scenario_from_config(_load_json(args.config))
    cfg = scenario.simulation_config()
    traj = simulate(cfg)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{scenario.name}_series.csv"
    harness.write_series_csv(csv_path, traj)
    snap_path = outdir / f"{scenario.name}_snapshots"
    if args.text_snapshots:
        traj.save_text(snap_path.with_suffix(".csv"))
    else:
        traj.save_npz(snap_path.with_suffix(".npz"))
    print(f"wrote {csv_path}")
    return 0


def cmd_decay_fit(args) -> int:
    rows = np.genfromtxt(args.csv, delimiter=",", names=True)
    column = args.column
    if column not in rows.dtype.names:
        raise SystemExit(f"column {column!r} not in {list(rows.dtype.names)}")
    window = (args.t0, args.t1) if args.t0 is not None else None
    fit = harness.fit_decay_exponent(rows["t"], rows[column], window)
    _emit({"column": column, "fit": fit.to_dict()}, args.json)
    return 0


def cmd_decompose_verify(args) -> int:
    grid = SpectralGrid(args.half_width, args.n_points)
    phi = (decomposition.heavy_tail_profile(grid) if args.profile == "heavy"
           else decomposition.gaussian_profile(grid))
    t_list = [float(s) for s in args.times.split(",")]
    residuals = [decomposition.decomposition_residual(grid, phi, t)
                 for t in t_list]
    v_rate = decomposition.rate_probe(grid, phi, t_list, "v_minus_one",
                                      window=(min(t_list), max(t_list)))
    w_rate = decomposition.rate_probe(grid, phi, t_list, "w_l2",
                                      window=(min(t_list), max(t_list)))
    res_max = max(r["residual"] for r in residuals)
    out = {"identity_residuals": residuals, "identity_max": res_max,
           "identity_pass": bool(res_max <= args.tolerance),
           "v_rate": v_rate, "w_rate": w_rate}
    _emit(out, args.json)
    return 0 if out["identity_pass"] else 1


def cmd_lemma3_probe(args) -> int:
    tensor = _tensor_from_args(args)
    grid = SpectralGrid(args.half_width, args.n_points)
    x = grid.x
    base = np.array([(1.0 - 0.3 * j) * np.exp(-(x / 2.0) ** 2)
                     for j in range(tensor.n_components)], dtype=complex)
    t_list = [float(s) for s in args.times.split(",")]
    out = profile.remainder_probe(grid, tensor, base, t_list, j=args.component - 1)
    out["slope_pass"] = bool(out["slope"] <= args.slope_max)
    _emit(out, args.json)
    return 0 if out["slope_pass"] else 1


def cmd_profile_ode(args) -> int:
    tensor = _tensor_from_args(args)
    matrix = _matrix_from_args(args, tensor.n_components)
    if matrix is None:
        matrix = HermitianForm.identity(tensor.n_components)
    xi = np.linspace(-args.xi_cap, args.xi_cap, args.xi_points)
    rng = np.random.default_rng(args.seed)
    n = tensor.n_components
    amps = 0.8 + 0.4 * rng.random(n)
    phases = np.exp(2j * np.pi * rng.random(n))
    psi0 = np.array([a * p * np.exp(-xi ** 2) for a, p in zip(amps, phases)])
    state0 = profile.ProfileState(args.kappa, xi, psi0, 1.0)
    traj = profile.integrate_profile_ode(tensor, state0, args.t1,
                                         include_nonresonant=args.nonresonant)
    q0 = profile.lyapunov(traj.at(traj.times[0]), matrix)
    qT = profile.lyapunov(traj.at(traj.times[-1]), matrix)
    drift = float(np.max(np.abs(qT - q0)) / max(float(np.max(np.abs(q0))), 1e-300))
    out = {"t_end": args.t1, "kappa": args.kappa,
           "nonresonant": args.nonresonant, "relative_drift": drift}
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("t,xi,component,re,im,quadratic_form\n")
            for ti, snap in zip(traj.times, traj.states):
                q = profile.lyapunov(
                    profile.ProfileState(args.kappa, xi, snap, max(ti, 1.0)), matrix)
                for k in range(xi.size):
                    for j in range(n):
                        fh.write(f"{ti:.9g},{xi[k]:.9g},{j + 1},"
                                 f"{snap[j, k].real:.12g},{snap[j, k].imag:.12g},"
                                 f"{q[k]:.12g}\n")
    _emit(out, args.json)
    return 0


def cmd_run(args) -> int:
    if args.config:
        scenario = harness.scenario_from_config(_load_json(args.config))
    else:
        scenario = harness.builtin_scenario(args.scenario)
    report = harness.run_scenario(scenario, outdir=args.outdir,
                                  figures=not args.no_figures)
    for check in report["checks"]:
        status = "PASS" if check.get("pass", True) else "FAIL"
        print(f"{report['scenario']}::{check['name']}: {status}")
    print(f"report hash {report['config_hash'][:16]}")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlkg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_tensor_opts(sp):
        sp.add_argument("--tensor", help="built-in tensor name")
        sp.add_argument("--tensor-file", help="JSON tensor description")

    sp = sub.add_parser("check-structure", help="decide the structure criterion")
    add_tensor_opts(sp)
    sp.add_argument("--matrix-a", help="identity, diag:a,b,..., or a JSON file")
    sp.add_argument("--json", help="also write the verdict to this file")
    sp.set_defaults(func=cmd_check_structure)

    sp = sub.add_parser("simulate", help="run one simulation to CSV + snapshots")
    sp.add_argument("--config", required=True)
    sp.add_argument("--outdir", default="out")
    sp.add_argument("--text-snapshots", action="store_true",
                    help="plain-text spectral dumps instead of npz")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("decay-fit", help="fit a decay exponent from a CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--column", default="u_h1inf")
    sp.add_argument("--t0", type=float)
    sp.add_argument("--t1", type=float)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_decay_fit)

    sp = sub.add_parser("decompose-verify",
                        help="propagator factorisation identity and rates")
    sp.add_argument("--times", default="1,4,16,64")
    sp.add_argument("--profile", choices=("gaussian", "heavy"), default="gaussian")
    sp.add_argument("--tolerance", type=float, default=1e-6)
    sp.add_argument("--half-width", type=float, default=400.0)
    sp.add_argument("--n-points", type=int, default=8192)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_decompose_verify)

    sp = sub.add_parser("lemma3-probe",
                        help="large-time remainder of the cubic main term")
    add_tensor_opts(sp)
    sp.add_argument("--times", default="1,2,4,8,16,32,64")
    sp.add_argument("--component", type=int, default=1)
    sp.add_argument("--slope-max", type=float, default=-1.0)
    sp.add_argument("--half-width", type=float, default=400.0)
    sp.add_argument("--n-points", type=int, default=8192)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_lemma3_probe)

    sp = sub.add_parser("profile-ode", help="integrate the slow profile system")
    add_tensor_opts(sp)
    sp.add_argument("--matrix-a")
    sp.add_argument("--t1", type=float, default=100.0)
    sp.add_argument("--kappa", type=float, default=2.5)
    sp.add_argument("--nonresonant", action="store_true")
    sp.add_argument("--xi-cap", type=float, default=8.0)
    sp.add_argument("--xi-points", type=int, default=321)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", help="dump t, xi, psi, quadratic form")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_profile_ode)

    sp = sub.add_parser("run", help="run a whole scenario to a report bundle")
    sp.add_argument("--scenario", default="complex_cubic")
    sp.add_argument("--config", help="JSON scenario file (overrides --scenario)")
    sp.add_argument("--outdir", default="out")
    sp.add_argument("--no-figures", action="store_true")
    sp.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
