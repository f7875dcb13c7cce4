"""Command-line front end: ``twomode {steady,sweep,evolve,verify,trajectory}``.

Parameters are layered: preset, then ``--config`` file (flat ``key = value``
lines, ``#`` comments), then command-line flags.  Flags win.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .entropy import entropy_production_trace
from .errors import DivergenceError, InstabilityError, ParameterDomainError, TwoModeError
from .lyapunov import _UPPER, CovarianceMatrix, evolve_series, solve_steady_state, vacuum
from .model import SystemParams, build_drift_diffusion, check_stability, derive_constants, resonant_delta
from .pipeline import IDENTITY_TOL, analyze
from .sweep import PRESET_OMEGA, PRESETS, QUANTITIES, SweepAxis, SweepSpec, format_value, run_sweep, write_csv
from .trajectory import TrajectoryConfig, simulate_covariance
from .verify import run_verify

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNSTABLE = 2
EXIT_DIVERGED = 3
EXIT_INVALID = 4

# drive strength used by `steady`/`evolve`/`trajectory` when a figure preset is chosen;
# omega0 then follows as 1 + 2 Lambda unless given explicitly
_PRESET_POINT_LAMBDA = {"fig3": 0.2, "fig4": 0.1}

_PARAM_KEYS = {f.name for f in dataclasses.fields(SystemParams)}
_FLAG_TO_KEY = {
    "delta": "delta",
    "omega0": "omega0",
    "lambda_drive": "lambda_drive",
    "g_coupling": "g_coupling",
    "G": "G",
    "kappa": "kappa",
    "gamma": "gamma",
    "nbar1": "nbar1",
    "nbar2": "nbar2",
}


def read_config(path: Optional[str]) -> dict:
    """Parse a flat ``key = value`` file into a dict of strings."""
    if not path:
        return {}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterDomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _normalize(layer: dict) -> dict:
    """Keep only parameter keys and turn ``G`` into ``g_coupling``."""
    out = {k: v for k, v in layer.items() if k in _PARAM_KEYS}
    if "G" in layer:
        out["g_coupling"] = float(layer["G"]) / 2.0
    return out


def _layered(args, base: dict, config: dict) -> dict:
    flags = {key: getattr(args, flag) for flag, key in _FLAG_TO_KEY.items() if getattr(args, flag, None) is not None}
    return {**_normalize(base), **_normalize(config), **_normalize(flags)}


def resolve_params(args, config: dict) -> SystemParams:
    """Build SystemParams from preset, config file and flags (in increasing priority)."""
    base: dict = {}
    if args.preset:
        base.update(PRESETS[args.preset])
        base["lambda_drive"] = _PRESET_POINT_LAMBDA[args.preset]
        base["delta"] = "resonance"
    values = _layered(args, base, config)
    if args.preset and "omega0" not in _layered(args, {}, config):
        # presets fix omega = omega0 - 2 Lambda, not omega0
        values["omega0"] = PRESET_OMEGA + 2.0 * float(values["lambda_drive"])
    delta = values.pop("delta", None)
    kwargs = {k: float(v) for k, v in values.items()}
    if delta is not None and str(delta).strip().lower() == "resonance":
        kwargs["delta"] = resonant_delta(kwargs.get("omega0", 1.0), kwargs.get("lambda_drive", 0.0))
    elif delta is not None:
        kwargs["delta"] = float(delta)
    return SystemParams(**kwargs)


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
    else:
        yield sys.stdout


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def steady_report_dict(params: SystemParams, tol: float = IDENTITY_TOL) -> dict:
    rep = analyze(params, tol=tol)
    derived = derive_constants(params)
    return {
        "params": params.as_dict(),
        "derived": {
            "G": params.G,
            "N1": params.N1,
            "N2": params.N2,
            "omega": derived.omega_minus,
            "Omega": derived.omega_plus,
            "eta": derived.eta,
        },
        "stability": dataclasses.asdict(rep.stability),
        "sigma": rep.sigma.sigma,
        "symplectic_eigenvalues": list(rep.symplectic),
        "wigner_entropy": rep.wigner_entropy,
        "lyapunov_residual": rep.lyapunov_residual,
        "pi_s_trace": rep.pi_s_trace,
        "pi_s_offdiag": rep.pi_s_offdiag,
        "budget": rep.budget.as_dict() if rep.budget is not None else None,
        "checks": rep.checks,
        "all_checks_pass": rep.all_checks_pass,
    }


def cmd_steady(args) -> int:
    config = read_config(args.config)
    params = resolve_params(args, config)
    try:
        report = steady_report_dict(params)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    report = _jsonable(report)
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(report, fh, indent=2)
            fh.write("\n")
        else:
            rows: list = []
            _flatten("", report, rows)
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in rows:
                w.writerow([k, format_value(v) if isinstance(v, (float, bool)) else ("" if v is None else v)])
    return EXIT_OK


def _axis(name, rng, default):
    if rng is None and name is None:
        return default
    name = name or default.name
    if rng is None:
        return SweepAxis(name, default.start, default.stop, default.num)
    start, stop, num = rng
    return SweepAxis(name, float(start), float(stop), int(num))


def build_sweep_spec(args, config: dict) -> SweepSpec:
    values = _layered(args, PRESETS[args.preset or "fig3"], config)
    if str(values.get("delta", "")).lower() == "resonance":
        values.pop("delta")
    fixed = SystemParams(**{k: float(v) for k, v in values.items()})

    default = SweepSpec()

    def cfg_range(prefix):
        keys = [f"{prefix}_start", f"{prefix}_stop", f"{prefix}_num"]
        if all(k in config for k in keys):
            return [config[k] for k in keys]
        return None

    x_axis = _axis(config.get("x_axis"), cfg_range("x"), default.x_axis)
    y_axis = _axis(config.get("y_axis"), cfg_range("y"), default.y_axis)
    x_axis = _axis(args.x_axis or x_axis.name, args.x_range, x_axis)
    y_axis = _axis(args.y_axis or y_axis.name, args.y_range, y_axis)

    q = args.quantities if args.quantities is not None else config.get("quantities")
    quantities = QUANTITIES if q is None else tuple(s.strip() for s in q.split(",") if s.strip())
    # a user-supplied omega0 is held fixed; otherwise omega = omega0 - 2 Lambda is held at the preset value
    hold = None if "omega0" in _layered(args, {}, config) else PRESET_OMEGA
    return SweepSpec(x_axis=x_axis, y_axis=y_axis, fixed=fixed, quantities=quantities, hold_omega=hold)


def cmd_sweep(args) -> int:
    spec = build_sweep_spec(args, read_config(args.config))
    with _output(args.out) as fh:
        if args.format == "json":
            cols = spec.columns()
            rows = [dict(zip(cols, r)) for r in run_sweep(spec, jobs=args.jobs)]
            json.dump(_jsonable({"columns": cols, "rows": rows}), fh)
            fh.write("\n")
        else:
            write_csv(spec, fh, jobs=args.jobs)
    return EXIT_OK


_SIGMA_COLUMNS = [f"s{i + 1}{j + 1}" for i, j in _UPPER]


def cmd_evolve(args) -> int:
    config = read_config(args.config)
    params = resolve_params(args, config)
    dd = build_drift_diffusion(params)
    stab = check_stability(params)
    steady = solve_steady_state(dd) if stab.stable else None

    t_final = args.t_final if args.t_final is not None else 50.0 / min(params.kappa, params.gamma)
    init = args.init
    if init == "vacuum":
        sigma0 = vacuum()
    elif init == "thermal":
        sigma0 = CovarianceMatrix(np.diag([params.N1, params.N1, params.N2, params.N2]) / 2.0)
    else:
        if steady is None:
            print("error: no steady state to start from (unstable drift)", file=sys.stderr)
            return EXIT_UNSTABLE
        sigma0 = steady

    columns = ["t", *_SIGMA_COLUMNS, "pi_s_transient_diagnostic", "residual_max"]
    code = EXIT_OK
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        try:
            for t, s in evolve_series(dd, sigma0, t_final, args.dt, every=args.every):
                pi_t, _ = entropy_production_trace(dd, s)
                resid = float(np.max(np.abs(s.sigma - steady.sigma))) if steady is not None else None
                w.writerow([format_value(v) for v in (t, *s.packed(), pi_t, resid)])
        except DivergenceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DIVERGED
    if not stab.stable:
        print(
            f"error: drift matrix is unstable (max Re eigenvalue {stab.max_real_eigenvalue:.6g}); "
            "no steady state exists",
            file=sys.stderr,
        )
        code = EXIT_UNSTABLE
    return code


def cmd_verify(args) -> int:
    report = run_verify(n_samples=args.n_samples, seed=args.seed, tol=args.tol, trajectory=not args.no_trajectory)
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(_jsonable(report.as_dict()), fh, indent=2)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["property", "kind", "n_checked", "n_passed", "max_residual", "tol", "passed"])
            for r in report.results:
                w.writerow([r.name, r.kind, r.n_checked, r.n_passed, format_value(r.max_residual),
                            format_value(r.tol), format_value(r.passed)])
    n_fail = sum(not r.passed for r in report.results)
    print(
        f"verify: {len(report.results) - n_fail}/{len(report.results)} properties passed "
        f"(samples={report.n_samples}, seed={report.seed}, digest={report.sample_digest})",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_trajectory(args) -> int:
    config = read_config(args.config)
    params = resolve_params(args, config)
    dd = build_drift_diffusion(params)
    cfg = TrajectoryConfig(
        dt=args.dt,
        burn_in=args.burn_in,
        sample_time=args.sample_time,
        n_trajectories=args.n_trajectories,
        seed=args.seed,
        n_blocks=args.blocks,
    )
    try:
        exact = solve_steady_state(dd).sigma
        res = simulate_covariance(dd, cfg)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    emp = res.sigma_emp.sigma
    z = (emp - exact) / res.stderr
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(
                _jsonable({
                    "params": params.as_dict(),
                    "sigma_emp": emp,
                    "stderr": res.stderr,
                    "sigma_lyapunov": exact,
                    "zscore": z,
                    "max_abs_z": float(np.max(np.abs(z))),
                    "metadata": res.metadata,
                }),
                fh,
                indent=2,
            )
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "j", "sigma_emp", "stderr", "sigma_lyapunov", "zscore"])
            for i, j in _UPPER:
                w.writerow([i + 1, j + 1, *(format_value(v) for v in (emp[i, j], res.stderr[i, j], exact[i, j], z[i, j]))])
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, default_format: str):
    p.add_argument("--config", help="flat key = value parameter file")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
    p.add_argument("--preset", choices=sorted(PRESETS), help="figure parameter preset")


def _add_params(p: argparse.ArgumentParser):
    g = p.add_argument_group("system parameters")
    g.add_argument("--delta", help="mode-1 frequency, or 'resonance' for sqrt(Omega*omega)")
    g.add_argument("--omega0", type=float)
    g.add_argument("--lambda-drive", dest="lambda_drive", type=float)
    g.add_argument("--g-coupling", dest="g_coupling", type=float, help="coupling g (G = 2g)")
    g.add_argument("--G", dest="G", type=float, help="drift-matrix coupling G = 2g")
    g.add_argument("--kappa", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--nbar1", type=float)
    g.add_argument("--nbar2", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twomode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="steady-state covariance and entropy budget at one point")
    _add_common(p, "json")
    _add_params(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="2-D grid of budget quantities as CSV")
    _add_common(p, "csv")
    _add_params(p)
    p.add_argument("--x-axis", help="delta_ratio, lambda_ratio or a parameter name")
    p.add_argument("--x-range", nargs=3, metavar=("START", "STOP", "NUM"))
    p.add_argument("--y-axis")
    p.add_argument("--y-range", nargs=3, metavar=("START", "STOP", "NUM"))
    p.add_argument("--quantities", help=f"comma-separated subset of {','.join(QUANTITIES)}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evolve", help="transient covariance from an initial state")
    _add_common(p, "csv")
    _add_params(p)
    p.add_argument("--t-final", type=float, help="default 50/min(kappa, gamma)")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--every", type=int, default=100, help="output stride in steps")
    p.add_argument("--init", choices=("vacuum", "thermal", "steady"), default="vacuum")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="randomized identity and positivity checks")
    _add_common(p, "csv")
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--tol", type=float, default=IDENTITY_TOL, help="relative tolerance for identities")
    p.add_argument("--no-trajectory", action="store_true", help="skip the stochastic check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", help="Euler-Maruyama covariance versus the Lyapunov solution")
    _add_common(p, "json")
    _add_params(p)
    p.add_argument("--dt", type=float, default=TrajectoryConfig.dt)
    p.add_argument("--burn-in", type=float, default=TrajectoryConfig.burn_in)
    p.add_argument("--sample-time", type=float, default=TrajectoryConfig.sample_time)
    p.add_argument("--n-trajectories", type=int, default=TrajectoryConfig.n_trajectories)
    p.add_argument("--blocks", type=int, default=TrajectoryConfig.n_blocks)
    p.set_defaults(func=cmd_trajectory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (TwoModeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
