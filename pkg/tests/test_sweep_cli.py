import csv
import io
import json
import math

import numpy as np
import pytest

from twomode.cli import main
from twomode.sweep import (
    PRESETS,
    QUANTITIES,
    SweepAxis,
    SweepSpec,
    format_value,
    point_params,
    preset,
    preset_point,
    write_csv,
)
from twomode.model import SystemParams


def small_spec(name="fig3", quantities=QUANTITIES):
    return preset(
        name,
        x_axis=SweepAxis("delta_ratio", 0.8, 1.2, 5),
        y_axis=SweepAxis("lambda_ratio", 0.0, 0.4, 3),
        quantities=tuple(quantities),
    )


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_preset_parameters():
    for name, G in (("fig3", 0.05), ("fig4", 0.5)):
        p = preset_point(name, 0.15)
        assert p.G == pytest.approx(G)
        assert p.omega == pytest.approx(1.0)
        assert (p.kappa, p.gamma, p.nbar1, p.nbar2) == (0.2, 0.2, 0.0, 0.0)
        assert p.delta == pytest.approx(math.sqrt(p.omega * p.Omega))


def test_ratio_axes_resolve_to_resonance():
    p = point_params(SystemParams(**PRESETS["fig3"]), {"lambda_ratio": 0.25, "delta_ratio": 1.0})
    assert p.lambda_drive / p.omega == pytest.approx(0.25)
    assert p.delta == pytest.approx(math.sqrt(p.omega * p.Omega))
    held = point_params(SystemParams(**PRESETS["fig3"]), {"lambda_ratio": 0.25, "delta_ratio": 1.0}, hold_omega=1.0)
    assert (held.omega, held.lambda_drive, held.omega0) == pytest.approx((1.0, 0.25, 1.5))


def test_preset_sweep_holds_split_frequency():
    rows = rows_of(write_csv(small_spec()))
    for r in rows:
        assert float(r["omega0"]) - 2 * float(r["lambda_drive"]) == pytest.approx(1.0, abs=1e-15)
        assert float(r["lambda_drive"]) == pytest.approx(float(r["lambda_ratio"]))


def test_explicit_omega0_is_held(capsys):
    code, out, _ = run(capsys, ["sweep", "--omega0", "1", "--x-range", "1", "1", "1", "--y-range", "0", "0.4", "3",
                                "--quantities", "pi_12"])
    assert code == 0
    assert {r["omega0"] for r in rows_of(out)} == {"1"}


def test_csv_layout_and_order():
    rows = rows_of(write_csv(small_spec()))
    assert len(rows) == 15
    assert list(rows[0])[:4] == ["delta_ratio", "lambda_ratio", "delta", "lambda_drive"]
    # y-major: x varies fastest
    assert [float(r["delta_ratio"]) for r in rows[:5]] == pytest.approx([0.8, 0.9, 1.0, 1.1, 1.2])
    assert {r["lambda_ratio"] for r in rows[:5]} == {"0"}


def test_empty_quantities_give_header_only():
    text = write_csv(small_spec(quantities=()))
    assert text == "delta_ratio,lambda_ratio,delta,lambda_drive,omega0\n"


def test_sweep_is_reproducible_and_parallel_safe():
    spec = small_spec("fig4")
    assert write_csv(spec) == write_csv(spec, jobs=2)


def test_unstable_cells_are_blank():
    spec = preset(
        "fig3",
        x_axis=SweepAxis("delta_ratio", 1.0, 1.0, 1),
        y_axis=SweepAxis("g_coupling", 0.01, 2.0, 2),
        quantities=("pi_s", "eta", "stable"),
    )
    rows = rows_of(write_csv(spec))
    assert rows[0]["stable"] == "true" and rows[0]["pi_s"] != ""
    assert rows[1]["stable"] == "false" and rows[1]["pi_s"] == "" and float(rows[1]["eta"]) < 0


def test_format_value():
    assert format_value(None) == "" and format_value(float("nan")) == ""
    assert format_value(-0.0) == "0"
    assert format_value(True) == "true"
    assert float(format_value(0.1)) == 0.1


def test_bad_spec_rejected():
    with pytest.raises(ValueError):
        SweepSpec(quantities=("nonsense",))
    with pytest.raises(ValueError):
        SweepAxis("nope", 0, 1, 3)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_steady_json_schema(capsys):
    code, out, _ = run(capsys, ["steady", "--preset", "fig4"])
    assert code == 0
    d = json.loads(out)
    assert d["all_checks_pass"] and all(d["checks"].values())
    assert np.array(d["sigma"]).shape == (4, 4)
    assert d["params"]["g_coupling"] == 0.25


def test_steady_resonance_value(capsys):
    code, out, _ = run(
        capsys, ["steady", "--G", "0.5", "--lambda-drive", "0", "--kappa", "0.2", "--gamma", "0.2", "--delta", "1"]
    )
    assert code == 0
    assert json.loads(out)["pi_s_trace"] == pytest.approx(0.25 * 1.04 * 0.2 / 0.8316, rel=1e-10)


def test_config_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("# comment\nG = 0.4\nkappa = 0.3\n")
    code, out, _ = run(capsys, ["steady", "--config", str(cfg), "--g-coupling", "0.1"])
    assert code == 0
    params = json.loads(out)["params"]
    assert params["g_coupling"] == 0.1 and params["kappa"] == 0.3


def test_unstable_steady_exit_code(capsys):
    code, _, err = run(capsys, ["steady", "--G", "5", "--lambda-drive", "0.2", "--delta", "resonance"])
    assert code == 2 and err


def test_invalid_input_exit_code(capsys):
    code, _, _ = run(capsys, ["steady", "--kappa", "-1"])
    assert code == 4


def test_evolve_from_steady_is_flat(capsys):
    code, out, _ = run(capsys, ["evolve", "--preset", "fig3", "--init", "steady", "--t-final", "5", "--every", "100"])
    assert code == 0
    rows = rows_of(out)
    first, last = rows[0], rows[-1]
    for key in ("s11", "s24", "s34", "s44"):
        assert float(last[key]) == pytest.approx(float(first[key]), abs=1e-12)


def test_evolve_vacuum_converges(capsys):
    code, out, _ = run(capsys, ["evolve", "--preset", "fig3", "--every", "5000"])
    assert code == 0
    rows = rows_of(out)
    assert float(rows[-1]["t"]) == pytest.approx(250.0)
    assert float(rows[-1]["residual_max"]) < 1e-8


def test_evolve_unstable_diverges(capsys):
    code, _, _ = run(capsys, ["evolve", "--G", "5", "--lambda-drive", "0.2", "--delta", "resonance", "--t-final", "1e4"])
    assert code == 3


def test_verify_passes_and_is_seeded(capsys):
    code, out, _ = run(capsys, ["verify", "--n-samples", "50", "--no-trajectory", "--seed", "7"])
    assert code == 0
    code2, out2, _ = run(capsys, ["verify", "--n-samples", "50", "--no-trajectory", "--seed", "7"])
    assert out == out2


def test_verify_reports_failures_at_impossible_tolerance(capsys):
    code, out, _ = run(capsys, ["verify", "--n-samples", "20", "--no-trajectory", "--tol", "1e-20"])
    assert code == 1
    rows = {r["property"]: r for r in rows_of(out)}
    assert rows["trace_vs_offdiag"]["passed"] == "false"
    assert rows["second_law"]["passed"] == "true"


def test_sweep_cli_writes_file(capsys, tmp_path):
    target = tmp_path / "s.csv"
    code, _, _ = run(
        capsys,
        ["sweep", "--preset", "fig4", "--x-range", "0.9", "1.1", "3", "--y-range", "0", "0.2", "2",
         "--quantities", "pi_11,pi_22", "--out", str(target)],
    )
    assert code == 0
    rows = rows_of(target.read_text())
    assert len(rows) == 6 and set(rows[0]) >= {"pi_11", "pi_22"}


def test_trajectory_cli(capsys):
    code, out, _ = run(
        capsys,
        ["trajectory", "--preset", "fig4", "--dt", "2e-3", "--burn-in", "10", "--sample-time", "100",
         "--n-trajectories", "4", "--blocks", "2"],
    )
    d = json.loads(out)
    assert code in (0, 1)
    assert np.array(d["sigma_emp"]).shape == (4, 4)
