import pytest

from gossipsim.cli import main


@pytest.fixture
def cycle_file(tmp_path):
    p = tmp_path / "cycle.txt"
    p.write_text("0 1\n1 2\n2 0\n")
    return str(p)


def test_pagerank_run_and_outputs(cycle_file, tmp_path, capsys):
    out = tmp_path / "run"
    code = main([
        "pagerank", "--graph", cycle_file, "--m", "0.15",
        "--steps", "5000", "--seed", "7", "--out", str(out),
    ])
    assert code == 0
    assert (out / "trajectory.csv").exists()
    assert (out / "errors.csv").exists()
    assert (out / "summary.txt").exists()
    assert "final l1_error_vs_pi" in capsys.readouterr().out


def test_verify_expectation_subcommand(cycle_file, capsys):
    code = main([
        "verify-expectation", "--application", "pagerank",
        "--graph", cycle_file, "--samples", "500",
    ])
    assert code == 0
    assert "exact_pass=True" in capsys.readouterr().out


def test_verify_expectation_writes_report(cycle_file, tmp_path):
    out = tmp_path / "rep"
    code = main([
        "verify-expectation", "--application", "pagerank",
        "--graph", cycle_file, "--samples", "500", "--out", str(out),
    ])
    assert code == 0
    body = (out / "expectation_report.txt").read_text()
    assert "exact_pass=True" in body
    assert "mc_std_error=" in body


def test_error_reports_class_name(tmp_path, capsys):
    missing = str(tmp_path / "nope.txt")
    code = main(["pagerank", "--graph", missing, "--steps", "10"])
    assert code == 1
    assert "ConfigError" in capsys.readouterr().err


def test_validation_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 0\n")  # node 2 missing entirely -> under 3 nodes
    code = main(["pagerank", "--graph", str(bad), "--steps", "10"])
    assert code == 1
    assert "ValidationError" in capsys.readouterr().err


def test_config_file_with_flag_override(cycle_file, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"application = pagerank\ngraph = {cycle_file}\nsteps = 100\nseed = 1\n"
    )
    out = tmp_path / "out"
    code = main(["pagerank", "--config", str(cfg), "--steps", "250", "--out", str(out)])
    assert code == 0
    summary = dict(
        line.split("=", 1)
        for line in (out / "summary.txt").read_text().splitlines()
    )
    assert summary["steps"] == "250"  # flag wins over the file value


def test_plot_data_from_run_dir(cycle_file, tmp_path):
    out = tmp_path / "run"
    assert main([
        "pagerank", "--graph", cycle_file, "--steps", "2000",
        "--seed", "3", "--out", str(out),
    ]) == 0
    plot = tmp_path / "plot.csv"
    assert main([
        "plot-data", "--run", str(out), "--kind", "error-curve", "--out", str(plot),
    ]) == 0
    header = plot.read_text().splitlines()[0]
    assert header.startswith("step,")


def test_plot_data_trajectory_from_dump(cycle_file, tmp_path):
    out = tmp_path / "run"
    assert main([
        "pagerank", "--graph", cycle_file, "--steps", "2000",
        "--seed", "3", "--thin", "100", "--dump-every", "500", "--out", str(out),
    ]) == 0
    plot = tmp_path / "fan.csv"
    assert main([
        "plot-data", "--run", str(out), "--kind", "trajectory", "--out", str(plot),
    ]) == 0
    lines = plot.read_text().splitlines()
    assert lines[0] == "step,x_0,x_1,x_2"
    assert lines[1].startswith("0,")
    assert lines[-1].startswith("2000,")


def test_affine_subcommand(tmp_path, capsys):
    m = tmp_path / "m.csv"
    m.write_text("0.5,0\n0,0.5\n")
    u = tmp_path / "u.csv"
    u.write_text("1\n1\n")
    code = main([
        "affine", "--matrix", str(m), "--input", str(u), "--steps", "60",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "final err_x_inf" in out


def test_opinions_subcommand(tmp_path):
    w = tmp_path / "w.csv"
    w.write_text("0.5,0.5,0\n0.25,0.5,0.25\n0,0.5,0.5\n")
    v = tmp_path / "v.csv"
    v.write_text("1\n0\n-1\n")
    out = tmp_path / "op"
    code = main([
        "opinions", "--weights", str(w), "--prejudices", str(v),
        "--steps", "5000", "--seed", "2", "--out", str(out),
    ])
    assert code == 0
    body = (out / "trajectory.csv").read_text().splitlines()
    assert body[0] == "step,node,x,x_bar"
