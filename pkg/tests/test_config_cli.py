import json
import os
import subprocess
import sys

import pytest

from migrasim import cli
from migrasim.config import (
    DEFAULTS,
    ConfigParseError,
    cell_seed,
    dumps_config,
    expand_sweep,
    from_dict,
    parse_config,
    shipped_config,
    shipped_config_path,
    to_dict,
    with_overrides,
)
from migrasim.engine import ConfigError

MINIMAL = '{"n_workers": 50, "seed": 7, "horizon_months": 12}'


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def error_line(capsys):
    err = capsys.readouterr().err.strip()
    assert "\n" not in err
    assert err.startswith("migrasim: error: E_")
    return err


# config parsing


def test_minimal_config_gets_defaults():
    cfg = parse_config(MINIMAL.encode())
    d = to_dict(cfg)
    for key, value in DEFAULTS.items():
        assert d[key] == value, key
    assert cfg.n_workers == 50 and cfg.econ.N_total == 50.0
    assert cfg.seed == 7 and cfg.horizon_months == 12


def test_alpha_out_of_range_names_field_and_bound():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"n_workers": 10, "seed": 1, "horizon_months": 1, "econ": {"alpha": 1.5}}')
    assert exc.value.field == "econ.alpha"
    assert "alpha" in str(exc.value) and "(0, 1)" in str(exc.value)


def test_instance1_parses_exactly():
    cfg = shipped_config("instance1")
    assert cfg.dynamics.a == 0.0008
    assert cfg.dynamics.f == 0.001
    assert cfg.dynamics.input_gain == 0.02
    assert cfg.migration.beta == 3.0
    assert cfg.sparse_factor == 0.09
    assert cfg.n_workers == 100 and cfg.initial_urban_fraction == 0.2


def test_instance2_parses_exactly():
    cfg = shipped_config("instance2")
    assert (cfg.dynamics.a, cfg.dynamics.f, cfg.dynamics.input_gain) == (0.002, 0.004, 0.02)
    assert cfg.migration.beta == 2.0 and cfg.sparse_factor == 0.08
    assert not cfg.hukou_initial_urban
    assert shipped_config("instance2_hukou") == with_overrides(cfg, {"hukou_initial_urban": True})


@pytest.mark.parametrize(
    "raw, field",
    [
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "sparse_factr": 0.1}, "sparse_factr"),
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "dynamics": {"alpha": 1}}, "dynamics.alpha"),
        ({"n_workers": 10, "seed": 1}, "horizon_months"),
        ({"n_workers": 10, "seed": 1.5, "horizon_months": 1}, "seed"),
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "clamp_on_blowup": 1}, "clamp_on_blowup"),
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "schema_version": 2}, "schema_version"),
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "sweep": {"dynamics.q": [1]}}, "sweep.dynamics.q"),
        ({"n_workers": 10, "seed": 1, "horizon_months": 1, "migration": {"beta": 0}}, "migration.beta"),
    ],
)
def test_invalid_configs_name_field(raw, field):
    with pytest.raises(ConfigError) as exc:
        from_dict(raw)
    assert exc.value.field == field


def test_parse_error_has_position():
    with pytest.raises(ConfigParseError) as exc:
        parse_config('{\n  "n_workers": 10,\n  "seed": }')
    assert exc.value.line == 3
    with pytest.raises(ConfigParseError, match="UTF-8"):
        parse_config(b"\xff\xfe")


@pytest.mark.parametrize("name", ["instance1", "instance2", "instance2_hukou", "sweep_instance2"])
def test_round_trip(name):
    cfg = shipped_config(name)
    assert parse_config(dumps_config(cfg)) == cfg
    tweaked = with_overrides(cfg, {"econ.r_u": 0.25, "x0_jitter": 0.1})
    assert parse_config(dumps_config(tweaked)) == tweaked


def test_expand_sweep_cells():
    cfg = shipped_config("sweep_instance2")
    cells = expand_sweep(cfg)
    # keys sorted, last key varies fastest
    assert [ov["dynamics.a"] for ov, _ in cells] == [0.002, 0.002, 0.006, 0.006]
    assert [c.hukou_initial_urban for _, c in cells] == [False, True, False, True]
    seeds = [c.seed for _, c in cells]
    assert seeds == [cell_seed(2024, i) for i in range(4)]
    assert len(set(seeds)) == 4
    assert all(c.sweep == {} for _, c in cells)
    assert expand_sweep(with_overrides(cfg, {"sweep": {"seed": [4, 5]}}))[1][1].seed == 5


def test_cell_seed_is_stable():
    assert cell_seed(2024, 0) == cell_seed(2024, 0)
    assert cell_seed(2024, 0) != cell_seed(2024, 1) != cell_seed(2025, 1)
    assert 0 <= cell_seed(2**64 - 1, 10**6) < 2**64


# command line


def test_validate_shipped(tmp_path, capsys):
    before = set(os.listdir(tmp_path))
    assert cli.main(["validate-config", "--config", shipped_config_path("instance1")]) == 0
    assert capsys.readouterr().out.startswith("ok:")
    assert set(os.listdir(tmp_path)) == before


def test_validate_reports_codes(tmp_path, capsys):
    bad = write(tmp_path, "a.json", {"n_workers": 10, "seed": 1, "horizon_months": 1, "econ": {"alpha": 1.5}})
    assert cli.main(["validate-config", "--config", bad]) == 1
    assert "E_CONFIG_INVALID" in error_line(capsys)
    broken = write(tmp_path, "b.json", "{not json")
    assert cli.main(["validate-config", "--config", broken]) == 1
    assert "E_CONFIG_PARSE" in error_line(capsys)
    assert cli.main(["validate-config", "--config", str(tmp_path / "missing.json")]) == 1
    assert "E_IO" in error_line(capsys)
    assert cli.main(["frobnicate"]) == 2
    assert "E_USAGE" in error_line(capsys)
    assert cli.main(["run", "--config", bad, "--out", str(tmp_path), "--seed", "-3"]) == 2
    assert "E_USAGE" in error_line(capsys)


def test_analyze_two_vertex_unit_graph(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"n_workers": 2, "seed": 0, "horizon_months": 1,
                                     "initial_urban_fraction": 0.5, "dynamics": {"a": 1.0, "f": 1.0}})
    graph = write(tmp_path, "g.txt", "# migrasim-graph v1\nn 2\nseed none\n0 1 1.0\n1 0 1.0\n")
    assert cli.main(["analyze-graph", "--config", cfg, "--graph", graph]) == 0
    out = capsys.readouterr().out
    assert "lambda2_re: 2.0" in out
    assert "consensus_predicted: true" in out
    assert cli.main(["analyze-graph", "--config", cfg, "--graph", graph, "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["lambda2_re"] == 2.0 and report["consensus_predicted"] is True
    assert report["eigenvalues"] == [[0.0, 0.0], [2.0, 0.0]]


def test_analyze_export_reload(tmp_path, capsys):
    exported = str(tmp_path / "g.txt")
    path = shipped_config_path("instance2")
    assert cli.main(["analyze-graph", "--config", path, "--export", exported, "--json"]) == 0
    first = json.loads(capsys.readouterr().out)
    assert cli.main(["analyze-graph", "--config", path, "--graph", exported, "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == first


def test_run_writes_csv_and_json(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"n_workers": 30, "seed": 9, "horizon_months": 5})
    out = tmp_path / "out"
    assert cli.main(["run", "--config", cfg, "--out", str(out), "--seed", "4"]) == 0
    assert sorted(os.listdir(out)) == ["series.csv", "summary.json", "workers.csv"]
    series = (out / "series.csv").read_bytes()
    assert b"\r" not in series
    lines = series.decode().splitlines()
    assert lines[0] == "t_days,N_u,v,bv,spread,inflow,outflow"
    assert len(lines) == 7
    assert lines[1].startswith("0.0,6,")
    workers = (out / "workers.csv").read_text().splitlines()
    assert workers[0] == "worker,row,col,initial_sector,final_sector,hukou,final_x"
    assert len(workers) == 31
    summary = json.loads((out / "summary.json").read_text())
    assert summary["schema_version"] == 1
    assert summary["config"]["seed"] == 4
    assert set(summary) == {"schema_version", "config", "status", "diverged", "verdict", "summary"}

    only_json = tmp_path / "j"
    assert cli.main(["run", "--config", cfg, "--out", str(only_json), "--format", "json"]) == 0
    assert os.listdir(only_json) == ["summary.json"]


def test_run_is_byte_identical(tmp_path):
    path = shipped_config_path("instance1")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        assert cli.main(["run", "--config", path, "--out", str(out)]) == 0
        outs.append({name: (out / name).read_bytes() for name in os.listdir(out)})
    assert outs[0] == outs[1]


def test_sweep_manifest(tmp_path, monkeypatch, capsys):
    raw = json.loads(open(shipped_config_path("sweep_instance2")).read())
    raw["horizon_months"] = 6
    cfg = write(tmp_path, "s.json", raw)
    monkeypatch.setenv("MIGRASIM_THREADS", "2")
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    cells = manifest["cells"]
    assert [c["index"] for c in cells] == [0, 1, 2, 3]
    assert all(c["status"] == "ok" for c in cells)
    assert [c["seed"] for c in cells] == [cell_seed(2024, i) for i in range(4)]
    for c in cells:
        assert sorted(os.listdir(out / c["dir"])) == ["series.csv", "summary.json", "workers.csv"]
    # thread count does not change results
    monkeypatch.setenv("MIGRASIM_THREADS", "1")
    out1 = tmp_path / "sweep1"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
    for c in cells:
        assert (out / c["dir"] / "series.csv").read_bytes() == (out1 / c["dir"] / "series.csv").read_bytes()


def test_sweep_partial_failure_kept(tmp_path, monkeypatch, capsys):
    raw = {"n_workers": 10, "seed": 1, "horizon_months": 2, "sweep": {"blowup_bound": [1e12, 1e6]},
           "dynamics": {"a": 1.0}, "clamp_on_blowup": False}
    cfg = write(tmp_path, "s.json", raw)

    def boom(cfg):
        if cfg.blowup_bound < 1e12:
            raise FloatingPointError("synthetic failure")
        return real_run(cfg)

    real_run = cli.run
    monkeypatch.setattr(cli, "run", boom)
    monkeypatch.setenv("MIGRASIM_THREADS", "1")
    out = tmp_path / "o"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 1
    assert "E_SWEEP_PARTIAL" in error_line(capsys)
    cells = json.loads((out / "manifest.json").read_text())["cells"]
    assert [c["status"] for c in cells] == ["ok", "failed"]
    assert "synthetic failure" in cells[1]["error"]


def test_bad_thread_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MIGRASIM_THREADS", "zero")
    cfg = shipped_config_path("sweep_instance2")
    assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "MIGRASIM_THREADS" in error_line(capsys)


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "migrasim.cli", "validate-config", "--config", str(tmp_path / "nope.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert proc.stderr.startswith("migrasim: error: E_IO: ")
