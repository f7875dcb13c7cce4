"""2-D parameter sweeps over the mode-1 detuning and the drive strength."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

import numpy as np

from .closedform import coefficients
from .entropy import decompose, entropy_production_trace
from .errors import ClosedFormDomainError, InstabilityError, NumericalDegeneracyError, ParameterDomainError
from .lyapunov import solve_steady_state, symplectic_eigenvalues
from .model import SystemParams, build_drift_diffusion, check_stability

__all__ = [
    "QUANTITIES",
    "PRESETS",
    "SweepAxis",
    "SweepSpec",
    "preset",
    "preset_point",
    "point_params",
    "evaluate_point",
    "run_sweep",
    "write_csv",
    "format_value",
]

QUANTITIES = (
    "pi_s", "pi0", "pi1", "pi_11", "pi_12", "pi_21", "pi_22",
    "J12", "Jp12", "j1", "j2", "j3", "N1s", "N2s", "eta", "stable", "nu_minus",
)

# delta_ratio = delta / sqrt(Omega*omega); lambda_ratio = Lambda / omega with omega = omega0 - 2 Lambda
RATIO_AXES = ("delta_ratio", "lambda_ratio")
_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemParams))

# presets: kappa = gamma = 0.2 omega, G = 0.05 omega (fig3) or 0.5 omega (fig4),
# omega = omega0 - 2 Lambda = 1, zero-temperature baths; G = 2 g.  omega0 is the
# Lambda = 0 value; sweeps and preset points move it to 1 + 2 Lambda.
PRESETS = {
    "fig3": dict(omega0=1.0, kappa=0.2, gamma=0.2, g_coupling=0.025, nbar1=0.0, nbar2=0.0),
    "fig4": dict(omega0=1.0, kappa=0.2, gamma=0.2, g_coupling=0.25, nbar1=0.0, nbar2=0.0),
}
PRESET_OMEGA = 1.0


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.name not in RATIO_AXES + _PARAM_FIELDS:
            raise ValueError(f"unknown sweep axis {self.name!r}")
        if self.num < 1:
            raise ValueError("axis needs at least one point")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SweepSpec:
    x_axis: SweepAxis = SweepAxis("delta_ratio", 0.5, 1.5, 101)
    y_axis: SweepAxis = SweepAxis("lambda_ratio", 0.0, 0.4, 101)
    fixed: SystemParams = SystemParams(**PRESETS["fig3"])
    quantities: tuple = QUANTITIES
    # when set, omega = omega0 - 2 Lambda is held at this value and omega0 follows the drive
    hold_omega: Optional[float] = PRESET_OMEGA

    def __post_init__(self):
        bad = [q for q in self.quantities if q not in QUANTITIES]
        if bad:
            raise ValueError(f"unknown quantities {bad}; choose from {QUANTITIES}")
        if self.x_axis.name == self.y_axis.name:
            raise ValueError("x and y axes must differ")
        if self.hold_omega is not None:
            if not self.hold_omega > 0.0:
                raise ValueError("hold_omega must be > 0")
            if "omega0" in (self.x_axis.name, self.y_axis.name):
                raise ValueError("an omega0 axis needs hold_omega=None")

    def columns(self) -> list[str]:
        return [self.x_axis.name, self.y_axis.name, "delta", "lambda_drive", "omega0", *self.quantities]


def preset(name: str, **overrides) -> SweepSpec:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return dataclasses.replace(SweepSpec(fixed=SystemParams(**PRESETS[name])), **overrides)


def preset_point(name: str, lambda_drive: float, delta: Optional[float] = None) -> SystemParams:
    """Preset parameters at one drive strength; ``delta`` defaults to the resonance value."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    values = dict(PRESETS[name], lambda_drive=lambda_drive, omega0=PRESET_OMEGA + 2.0 * lambda_drive)
    if delta is None:
        delta = math.sqrt(PRESET_OMEGA * (PRESET_OMEGA + 4.0 * lambda_drive))
    return SystemParams(delta=delta, **values)


def point_params(fixed: SystemParams, assignments: dict, hold_omega: Optional[float] = None) -> SystemParams:
    """Apply axis values to ``fixed``; the drive is resolved before the detuning ratio.

    With ``hold_omega`` the split frequency ``omega0 - 2 Lambda`` stays at that
    value, so ``lambda_ratio`` maps to ``Lambda = r * hold_omega`` and omega0
    is reset to ``hold_omega + 2 Lambda``.
    """
    values = fixed.as_dict()
    for name, v in assignments.items():
        if name in _PARAM_FIELDS:
            values[name] = v
    if "lambda_ratio" in assignments:
        r = assignments["lambda_ratio"]
        if hold_omega is not None:
            values["lambda_drive"] = r * hold_omega
        else:
            if 1.0 + 2.0 * r == 0.0:
                raise ParameterDomainError("lambda_ratio = -1/2 has no solution")
            values["lambda_drive"] = r * values["omega0"] / (1.0 + 2.0 * r)
    if hold_omega is not None:
        values["omega0"] = hold_omega + 2.0 * values["lambda_drive"]
    if "delta_ratio" in assignments:
        w = values["omega0"] - 2.0 * values["lambda_drive"]
        W = values["omega0"] + 2.0 * values["lambda_drive"]
        if w * W <= 0.0:
            raise ParameterDomainError("delta_ratio axis requires omega * Omega > 0")
        values["delta"] = assignments["delta_ratio"] * math.sqrt(w * W)
    return SystemParams(**values)


def evaluate_point(params: SystemParams, quantities: Iterable[str]) -> dict:
    """Requested quantities at one point; unavailable cells are ``None``.

    Unstable points carry only ``stable`` and ``eta``.  Closed-form quantities
    are ``None`` when ``omega <= 0``.
    """
    quantities = tuple(quantities)
    out = dict.fromkeys(quantities)
    stab = check_stability(params)
    if "eta" in out:
        out["eta"] = stab.routh_hurwitz_eta
    if "stable" in out:
        out["stable"] = stab.stable
    if not stab.stable:
        return out
    dd = build_drift_diffusion(params)
    try:
        sigma = solve_steady_state(dd)
    except (InstabilityError, NumericalDegeneracyError):
        if "stable" in out:
            out["stable"] = False
        return out
    if "nu_minus" in out:
        out["nu_minus"] = symplectic_eigenvalues(sigma)[1]
    if "pi_s" in out:
        out["pi_s"] = entropy_production_trace(dd, sigma)[0]
    try:
        budget = decompose(params, coefficients(params), sigma)
    except (ClosedFormDomainError, InstabilityError):
        return out
    table = {
        "pi0": budget.pi0,
        "pi1": budget.pi1,
        "pi_11": budget.pi_11,
        "pi_12": budget.pi_12,
        "pi_21": budget.pi_21,
        "pi_22": budget.pi_22,
        "J12": budget.J12,
        "Jp12": budget.Jp12,
        "j1": budget.j1,
        "j2": budget.j2,
        "j3": budget.j3,
        "N1s": budget.occupations[0],
        "N2s": budget.occupations[1],
    }
    for q in quantities:
        if q in table:
            out[q] = table[q]
    return out


def _row_task(args):
    spec, y = args
    rows = []
    for x in spec.x_axis.values():
        assign = {spec.y_axis.name: float(y), spec.x_axis.name: float(x)}
        p = point_params(spec.fixed, assign, spec.hold_omega)
        vals = evaluate_point(p, spec.quantities)
        rows.append([float(x), float(y), p.delta, p.lambda_drive, p.omega0, *(vals[q] for q in spec.quantities)])
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> Iterable[list]:
    """Yield grid rows in y-major order (x varies fastest).

    An empty quantity list yields no rows.  With ``jobs > 1`` rows are
    computed in worker processes; output order is still fixed by the grid.
    """
    if not spec.quantities:
        return
    tasks = [(spec, y) for y in spec.y_axis.values()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rows in pool.map(_row_task, tasks):
                yield from rows
    else:
        for t in tasks:
            yield from _row_task(t)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    v = float(v)
    if not math.isfinite(v):
        return ""
    return format(v + 0.0, ".17g")  # + 0.0 maps -0.0 to 0.0


def write_csv(spec: SweepSpec, out: Optional[TextIO] = None, jobs: int = 1) -> str:
    """Write the sweep as CSV (header always present).  Returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(spec.columns())
    for row in run_sweep(spec, jobs=jobs):
        w.writerow([format_value(v) for v in row])
    return buf.getvalue() if out is None else ""
