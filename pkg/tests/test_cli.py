import numpy as np
import pytest

from neutral_periodic import cli
from neutral_periodic.config import ConfigError, RunConfig, load, parse_text
from neutral_periodic.problem import DEFAULT_RECIPE, parse_recipe
from neutral_periodic.spectral import evaluate, grid

SMALL = ["--modes", "16", "--time-grid", "64", "--space-grid", "33"]


def run(tmp_path, command, text=None, *flags, out="out"):
    argv = [command, "--out", str(tmp_path / out), *flags]
    if text is not None:
        path = tmp_path / f"{out}.cfg"
        path.write_text(text)
        argv += ["--config", str(path)]
    return cli.main(argv)


def report(tmp_path, command, out="out"):
    lines = (tmp_path / out / f"{command}_report.txt").read_text().splitlines()
    return dict(line.split(": ", 1) for line in lines)


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_check_pass_with_margin(tmp_path):
    assert run(tmp_path, "check", "a0 = 0.01\na1 = 0.01\nL = 0.01\n") == 0
    rep = report(tmp_path, "check")
    assert rep["F3.verdict"] == "PASS"
    assert float(rep["F3.margin"]) == pytest.approx(0.642, abs=1e-3)
    assert rep["config.a0"] == "0.01"


def test_check_all_zero_passes(tmp_path):
    assert run(tmp_path, "check", "problem = heat_decay\n") == 0


def test_check_fail_exit_one(tmp_path):
    assert run(tmp_path, "check", "a0 = 0\na1 = 0\nL = 0.8\n") == 1
    assert report(tmp_path, "check")["F3.verdict"] == "FAIL"


def test_check_unknown_exit_two(tmp_path):
    assert run(tmp_path, "check", "problem = heat_decay\nundeclared = L\n") == 2


def test_check_paper_convention_flag(tmp_path):
    assert run(tmp_path, "check", "problem = manufactured\n", "--convention", "paper") == 0
    assert report(tmp_path, "check")["C_one_minus_alpha"] == "1.0"


@pytest.mark.parametrize("text,needle", [
    ("omega = 1\nbogus = 3\n", "out.cfg:2: unknown key 'bogus'"),
    ("[solve]\nalpha = 1.5\n", "out.cfg:2: alpha"),
    ("[plot]\n", "out.cfg:1: unknown section"),
    ("omega 1\n", "out.cfg:1: expected 'key = value'"),
    ("modes = 64\nspace_grid = 33\n", "set at"),
    ("problem = nowhere\n", "problem must be one of"),
])
def test_invalid_config_exit_three(tmp_path, capsys, text, needle):
    assert run(tmp_path, "check", text) == 3
    assert needle in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["check", "--config", str(tmp_path / "none.cfg")]) == 3


def test_solve_manufactured_matches_exact(tmp_path):
    text = "problem = manufactured\ntau = 0.3\nxi = 0.2\n"
    assert run(tmp_path, "solve", text) == 0
    data = read_csv(tmp_path / "out" / "solution.csv")
    assert data.shape == (256 * 256, 3)
    sol = parse_recipe(DEFAULT_RECIPE, 1.0)
    t, x = data[:, 0], data[:, 1]
    # t-major ordering
    assert np.all(np.diff(t) >= 0) and np.allclose(x[:256], grid(257))
    exact = np.concatenate([evaluate(sol.coefficients(tj, 64), grid(257))
                            for tj in np.arange(256) / 256])
    assert np.max(np.abs(data[:, 2] - exact)) <= 1e-6
    assert report(tmp_path, "solve")["status"] == "converged"


def test_solve_heat_decay_is_zero(tmp_path):
    assert run(tmp_path, "solve", "problem = heat_decay\n", *SMALL) == 0
    assert np.all(read_csv(tmp_path / "out" / "solution.csv")[:, 2] == 0)


def test_solve_constant_forcing_profile(tmp_path):
    assert run(tmp_path, "solve", "problem = constant_forcing\n", *SMALL) == 0
    data = read_csv(tmp_path / "out" / "solution.csv")
    u = data[:, 2].reshape(64, 32)
    profile = np.sqrt(2) * np.sin(np.pi * grid(33)) / np.pi**2
    assert np.max(np.abs(u - profile)) <= 1e-12


def test_solve_not_converged_exit_one(tmp_path):
    assert run(tmp_path, "solve", "", *SMALL, "--max-iter", "1") == 1
    assert (tmp_path / "out" / "solution.csv").exists()
    assert report(tmp_path, "solve")["status"] == "max_iter"


def test_solve_is_deterministic_and_round_trips(tmp_path):
    text = "initial = random\n"
    assert run(tmp_path, "solve", text, *SMALL, "--seed", "7", out="a") == 0
    assert run(tmp_path, "solve", text, *SMALL, "--seed", "7", out="b") == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / "solution.csv").read_bytes() == (b / "solution.csv").read_bytes()
    ra = (a / "solve_report.txt").read_text().replace(str(a), "")
    rb = (b / "solve_report.txt").read_text().replace(str(b), "")
    assert ra == rb
    # the echoed config reproduces the run
    assert cli.main(["solve", "--config", str(a / "solve_effective.cfg"),
                     "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "solution.csv").read_bytes() == (a / "solution.csv").read_bytes()


def test_no_temporary_files_left(tmp_path):
    run(tmp_path, "check", "problem = heat_decay\n")
    assert not [p for p in (tmp_path / "out").iterdir() if p.name.startswith(".")]


def test_simulate_heat_decay(tmp_path):
    text = ("problem = heat_decay\nhistory = first_mode\nhorizon = 1\ndt = 0.001\n"
            "modes = 8\nspace_grid = 17\nstride = 100\n")
    assert run(tmp_path, "simulate", text) == 0
    final = float(report(tmp_path, "simulate")["final_l2_norm"])
    assert final <= np.exp(-np.pi**2) + 1e-8
    data = read_csv(tmp_path / "out" / "trajectory.csv")
    assert data.shape == (11 * 16, 3)


def test_compare_periodic_start(tmp_path):
    text = "[compare]\nhistory = periodic\nhorizon = 1\n"
    assert run(tmp_path, "compare", text, "--modes", "32", "--time-grid", "128",
               "--space-grid", "129") == 0
    dist = read_csv(tmp_path / "out" / "distance.csv")
    assert np.all(dist[:, 1] <= 1e-5)
    assert (tmp_path / "out" / "distance.csv").read_text().startswith("period_index,distance\n")


def test_compare_zero_history_decreases(tmp_path):
    text = "[compare]\nhistory = zero\nhorizon = 3\n"
    code = run(tmp_path, "compare", text, "--modes", "32", "--time-grid", "128",
               "--space-grid", "129")
    dist = read_csv(tmp_path / "out" / "distance.csv")[:, 1]
    assert dist[1] < dist[0] and dist[2] <= dist[1] + 1e-12
    assert code == (0 if dist[-1] <= 1e-4 else 1)


def test_compare_uses_saved_solution(tmp_path):
    assert run(tmp_path, "solve", "", "--modes", "32", "--time-grid", "128",
               "--space-grid", "129", out="s") == 0
    text = f"solution = {tmp_path / 's' / 'solution.csv'}\nhistory = periodic\nhorizon = 1\n"
    assert run(tmp_path, "compare", text, "--modes", "32", "--time-grid", "128",
               "--space-grid", "129") == 0
    assert report(tmp_path, "compare")["periodic_source"].endswith("solution.csv")


def test_compare_missing_solution(tmp_path, capsys):
    text = f"solution = {tmp_path / 'missing.csv'}\nhorizon = 1\n"
    assert run(tmp_path, "compare", text, *SMALL) == 3
    assert "does not exist" in capsys.readouterr().err


def test_manufacture_bundle(tmp_path):
    assert run(tmp_path, "manufacture", "recipe = 1:0.5:0.25:0\ng_scale = 0.01\n"
               "tau = 0.3\nxi = 0.2\n") == 0
    rep = report(tmp_path, "manufacture")
    assert float(rep["exact_residual"]) <= 1e-8
    conf, _ = load(tmp_path / "out" / "problem.cfg", "solve")
    assert conf.problem == "manufactured" and conf.g_scale == 0.01
    assert (tmp_path / "out" / "exact_solution.csv").exists()


def test_manufacture_rejects_high_mode(tmp_path, capsys):
    assert run(tmp_path, "manufacture", "recipe = 99:1:0:0\n") == 3
    assert "above n_modes" in capsys.readouterr().err


def test_config_sections_override_top_level():
    text = "[solve]\ntol = 1e-6\n[check]\ntol = 1e-3\n"
    values, origins = parse_text(text + "tol = 1e-9\n", "solve", "x.cfg")
    assert values["tol"] == 1e-6 and origins["tol"] == "x.cfg:2"
    values, _ = parse_text("tol = 1e-9\n" + text, "simulate")
    assert values["tol"] == 1e-9


def test_config_text_round_trip():
    conf = RunConfig(problem="manufactured", tau=0.3, L=0.02, lipschitz=False, dt=1 / 640)
    values, _ = parse_text(conf.to_text(), "solve")
    assert RunConfig(**values) == conf


def test_bad_flag_value():
    with pytest.raises(ConfigError, match="--modes"):
        load(None, "solve", {"modes": 0})


def test_read_solution_csv_round_trip(tmp_path):
    spec = cli.problem_from_config(RunConfig(problem="manufactured", modes=16, time_grid=8,
                                             space_grid=33))
    u = parse_recipe(DEFAULT_RECIPE, 1.0).trajectory(8, 16)
    path = tmp_path / "u.csv"
    cli.write_atomic(path, cli.field_csv(spec.times, u.values, spec.m_x))
    back = cli.read_solution_csv(path, spec)
    assert np.max(np.abs(back.values - u.values)) <= 1e-14
    with pytest.raises(ValueError, match="rows"):
        cli.read_solution_csv(path, spec.with_(m_t=4))
