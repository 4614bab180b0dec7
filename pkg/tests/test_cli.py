import json

import pytest

from diffwave import cli
from diffwave.cli import ConfigError, main, parse_config, resolve_config, run_experiment, sweep
from diffwave.grid import Grid1D
from diffwave.solver import SolverError, State

SMALL = {"alpha": 1, "lambda": 0.3, "boundary": "dirichlet", "N": 400, "t_end": 20.0, "n_samples": 12,
         "wave_dx": 0.2}


@pytest.fixture
def outroot(tmp_path, monkeypatch):
    monkeypatch.setenv("DIFFWAVE_OUT", str(tmp_path))
    return tmp_path


def write_cfg(path, **over):
    raw = dict(SMALL, **over)
    path.write_text(json.dumps(raw))
    return str(path)


def test_minimal_defaults(outroot):
    p = outroot / "c.json"
    p.write_text(json.dumps({"alpha": 1, "lambda": 0, "boundary": "dirichlet", "output": "min"}))
    cfg = parse_config(str(p))
    assert (cfg.gamma, cfg.v_plus, cfg.u_plus, cfg.amplitude, cfg.N, cfg.L) == (1.4, 1.0, 0.0, 0.01, 8000, None)
    assert cfg.length == pytest.approx(cli.auto_length(cfg))
    echoed = json.loads((outroot / "min" / "resolved_config.json").read_text())
    assert echoed["N"] == 8000 and echoed["regime"] == "dirichlet"


def test_lambda_one_rejected_with_range():
    with pytest.raises(ConfigError, match=r"\[0, 1\)"):
        resolve_config({"alpha": 1, "lambda": 1.0, "boundary": "dirichlet"})


@pytest.mark.parametrize("raw, key", [
    ({"lambda": 0, "boundary": "dirichlet"}, "alpha"),
    ({"alpha": 1, "lambda": 0, "boundary": "dirichlet", "cfl": 1.2}, "cfl"),
    ({"alpha": -1, "lambda": 0, "boundary": "dirichlet"}, "alpha"),
    ({"alpha": 1, "lambda": 0, "boundary": "dirichlet", "bogus": 3}, "bogus"),
    ({"alpha": 1, "lambda": 0, "boundary": "dirichlet", "N": "many"}, "N"),
])
def test_errors_name_the_key(raw, key):
    with pytest.raises(ConfigError, match=key):
        resolve_config(raw)


def test_neumann_regime_resolution():
    base = {"alpha": 1, "lambda": 0.5, "boundary": "neumann"}
    assert resolve_config(base).regime == "neumann_constant"
    assert resolve_config(dict(base, v0_at_0=1.0)).regime == "neumann_constant"
    assert resolve_config(dict(base, v0_at_0=1.1)).regime == "neumann"


@pytest.mark.parametrize("u_plus", [0.0, 0.01])
def test_exact_initialisation_has_zero_errors(u_plus):
    cfg = resolve_config(dict(SMALL, u_plus=u_plus))
    wave, corr = cli.build_wave(cfg, cfg.sample_times())
    from diffwave.correction import correction_cell_average
    g = Grid1D(cfg.length, cfg.N)
    v = wave.cell_average(g.faces, 0.0, "v") + correction_cell_average(corr, g.faces, 0.0, "v")
    u = wave.cell_average(g.faces, 0.0, "u") + correction_cell_average(corr, g.faces, 0.0, "u")
    row = cli._series_row(State(v, u, 0.0), g, wave, corr)
    errors = dict(zip(cli.SERIES_COLUMNS, row))
    # the wave columns measure v - v_bar, which contains v_hat when u_+ != 0
    skip = {"v_wave_Linf_err", "u_wave_Linf_err"} if u_plus else set()
    for name in cli.SERIES_COLUMNS[1:-1]:
        if name not in skip:
            assert abs(errors[name]) <= 1e-8, name


def test_run_artifacts_and_determinism(outroot):
    cfg = resolve_config(dict(SMALL, output="r1", snapshots=True))
    rep = run_experiment(cfg)
    out = outroot / "r1"
    series = (out / "series.csv").read_text()
    assert series.splitlines()[0] == ",".join(cli.SERIES_COLUMNS)
    assert len(series.splitlines()) == 1 + cfg.n_samples
    report = json.loads((out / "report.json").read_text())
    assert report["config_hash"] == cli.config_hash(cfg)
    assert report["quantities"]["v_Linf"]["predicted"] == pytest.approx(0.975)
    assert "series.csv" in (out / "plots.gp").read_text()
    assert (out / "snapshot_000.txt").exists() and not (out / "ABORTED").exists()
    assert rep.quantities["v_Linf"]["fitted"] > 0
    run_experiment(cfg)
    assert (out / "series.csv").read_text() == series


def test_abort_leaves_marker(outroot, monkeypatch):
    def boom(*a, **k):
        raise SolverError("forced")
    monkeypatch.setattr(cli, "run", boom)
    p = write_cfg(outroot / "c.json", output="ab")
    assert main(["run", p]) == 3
    assert (outroot / "ab" / "ABORTED").read_text().startswith("SolverError")
    assert (outroot / "ab" / "series.csv").exists()


def test_exit_codes(outroot, capsys):
    bad = outroot / "bad.json"
    bad.write_text(json.dumps({"alpha": 1, "lambda": 1.0, "boundary": "dirichlet"}))
    assert main(["run", str(bad)]) == 2
    assert "lambda" in capsys.readouterr().err
    assert main(["run", str(outroot / "missing.json")]) == 2
    p = write_cfg(outroot / "w.json", output="w")
    assert main(["wave", p]) == 0
    assert (outroot / "w" / "wave_profile.txt").read_text().startswith("# diffwave-profile v1")


def test_sweep_empty(outroot):
    cfg = resolve_config(dict(SMALL, output="empty"))
    assert sweep(cfg, []) == []
    text = (outroot / "empty" / "sweep.csv").read_text()
    assert text.strip() == ",".join(cli.SWEEP_COLUMNS)
    p = write_cfg(outroot / "e.json", output="empty2")
    assert main(["sweep", p, "--lambdas", ""]) == 0


def test_sweep_rejects_bad_lambda():
    cfg = resolve_config(SMALL)
    with pytest.raises(ConfigError):
        sweep(cfg, [0.2, 1.0])


def test_sweep_parallel_matches_serial(outroot):
    small = dict(SMALL, N=200, t_end=10.0, n_samples=10)
    a = resolve_config(dict(small, output="s1"))
    b = resolve_config(dict(small, output="s4"))
    sweep(a, [0.6, 0.0], jobs=1)
    sweep(b, [0.0, 0.6], jobs=4)
    t1 = (outroot / "s1" / "sweep.csv").read_text()
    assert t1 == (outroot / "s4" / "sweep.csv").read_text()
    lam = [float(r.split(",")[0]) for r in t1.splitlines()[1:]]
    assert lam == [0.0, 0.6]
    assert "vpred(l)" in (outroot / "s1" / "sweep.gp").read_text()
