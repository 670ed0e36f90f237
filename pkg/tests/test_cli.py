import json

import numpy as np
import pytest

import yamabeflow as yf
from yamabeflow.cli import main, parse_config

from conftest import solve_preset


def test_parse_run_defaults():
    cfg = parse_config(["run", "--dimension", "3", "--preset", "constant:1.0",
                        "--t-final", "0.5"])
    assert cfg.command == "run"
    assert cfg.preset == yf.Constant(1.0)
    assert cfg.ell == 6.0 and cfg.nodes == 400 and cfg.dt == 1e-3
    assert cfg.t_final == 0.5


def test_parse_incompleteness_annulus():
    cfg = parse_config(
        ["incompleteness", "--preset", "powerlaw:1.0", "--r-min", "1", "--ell", "100"]
    )
    assert cfg.preset == yf.PowerLaw(1.0)
    assert cfg.r_min == 1.0 and cfg.ell == 100.0


def test_parse_rejects_low_dimension(capsys):
    assert main(["run", "--dimension", "2", "--preset", "constant:1.0"]) == 2
    assert "dimension" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("dimension = 4\nnodes = 64\ndt = 2e-3\n# comment\n")
    cfg = parse_config(
        ["run", "--config", str(cfg_file), "--preset", "constant:1.0", "--nodes", "80"]
    )
    assert cfg.dimension == 4
    assert cfg.nodes == 80  # flag overrides file
    assert cfg.dt == 2e-3


def test_config_file_unknown_key(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("wibble = 3\n")
    assert main(["run", "--config", str(cfg_file), "--preset", "constant:1"]) == 2
    assert "wibble" in capsys.readouterr().err


def test_run_command_end_to_end(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(
        ["run", "--preset", "constant:1.0", "--ell", "3", "--nodes", "64",
         "--t-final", "0.05", "--output", str(out)]
    )
    assert code == 0
    assert out.exists() and out.with_suffix(".json").exists()
    sidecar = json.loads(out.with_suffix(".json").read_text())
    assert sidecar["schema_version"] == 1
    assert sidecar["data_bounds"]["kappa"] == pytest.approx(6.0)


def test_barriers_command_exit_code(tmp_path):
    code = main(
        ["barriers", "--preset", "bump:1,1,2,0.5", "--nodes", "150",
         "--t-final", "0.2", "--output", str(tmp_path / "b.csv")]
    )
    assert code == 0
    sidecar = json.loads((tmp_path / "b.json").read_text())
    assert sidecar["diagnostics"]["barriers"]["passed"] is True


def test_run_command_euclidean_sphere():
    code = main(
        ["run", "--preset", "puncturedsphere", "--r-min", "0", "--ell", "6",
         "--nodes", "100", "--t-final", "0.02"]
    )
    assert code == 0


def test_compare_command(capsys):
    code = main(
        ["compare", "--preset", "constant:1.0", "--preset-b", "constant:0.8",
         "--ell", "3", "--nodes", "64", "--t-final", "0.05"]
    )
    assert code == 0
    assert "violation" in capsys.readouterr().out


def test_exhaust_command(tmp_path):
    out = tmp_path / "exhaust.json"
    code = main(
        ["exhaust", "--preset", "bump:1,1,2,0.5", "--ladder", "3,4,5",
         "--dt", "2e-3", "--t-final", "0.1", "--output", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())["report"]
    assert len(report["d"]) == 2


def test_incompleteness_command(tmp_path):
    out = tmp_path / "scan.json"
    code = main(
        ["incompleteness", "--preset", "powerlaw:1.0", "--r-min", "1",
         "--sizes", "10,20", "--t-final", "0.05", "--output", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())["report"]
    assert report["verdict"] == "UniformlyBounded"


# --- export ------------------------------------------------------------------------

def test_export_first_row_closed_form(tmp_path):
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 3.0, 64)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.01)
    traj = solve_preset(yf.Constant(1.0), mesh, cfg)
    csv_path, _ = yf.export_trajectory(traj, tmp_path / "c.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,r,u,U,R_elliptic"
    assert lines[1] == "0,0,1,1,-6"


def test_export_flat_static_origin_value(tmp_path):
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 3.0, 64)
    u0 = yf.make_initial(yf.FlatStatic(4.0), mesh)
    traj = yf.FlowTrajectory(mesh=mesh, times=np.array([0.0]), fields=u0.values[None, :].copy())
    csv_path, _ = yf.export_trajectory(traj, tmp_path / "f.csv")
    first = csv_path.read_text().splitlines()[1].split(",")
    assert first[2] == "1"  # u(0) = 4 / (4 cosh^4 0) = 1


def test_export_empty_trajectory(tmp_path):
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 3.0, 16)
    traj = yf.FlowTrajectory(mesh=mesh, times=np.empty(0), fields=np.empty((0, 16)))
    csv_path, _ = yf.export_trajectory(traj, tmp_path / "e.csv")
    assert csv_path.read_text() == "t,r,u,U,R_elliptic\n"


def test_export_deterministic_and_round_trip(tmp_path):
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 3.0, 48)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.02)
    a = solve_preset(yf.Bump(1.0, 0.5, 1.5, 0.4), mesh, cfg)
    b = solve_preset(yf.Bump(1.0, 0.5, 1.5, 0.4), mesh, cfg)
    pa, ja = yf.export_trajectory(a, tmp_path / "a.csv", config={"x": 1})
    pb, jb = yf.export_trajectory(b, tmp_path / "b.csv", config={"x": 1})
    assert pa.read_bytes() == pb.read_bytes()
    assert ja.read_bytes() == jb.read_bytes()
    back = yf.import_trajectory(pa)
    assert np.array_equal(back.times, a.times)
    assert np.array_equal(back.fields, a.fields)
