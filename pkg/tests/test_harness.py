import subprocess
import sys
import textwrap

import pytest

from tightpaths import harness
from tightpaths.cli import main


def _cfg(tmp_path, extra=""):
    f = tmp_path / "exp.ini"
    f.write_text(textwrap.dedent(f"""
        [experiment]
        trials = 2
        base_seed = 7
        budget = 200000
        [constants]
        omega = 20
        p0_fraction = 0.7
        {extra}
        [cell.small]
        n = 400
        k = 3
        j = 2
        c = 8, 16
    """))
    return f


def test_load_config_expands_grid(tmp_path):
    cfg = harness.load_config(_cfg(tmp_path))
    assert [c.c for c in cfg.cells] == [8.0, 16.0]
    assert cfg.trials == 2 and cfg.base_seed == 7 and cfg.omega == 20 and cfg.p0_fraction == 0.7


@pytest.mark.parametrize("cell", ["n = 100\nk = 3\nj = 3\nc = 4", "n = 100\nk = 3\nj = 2\nc = 1"])
def test_config_rejects_bad_cells(tmp_path, cell):
    f = tmp_path / "bad.ini"
    f.write_text("[cell.x]\n" + cell + "\n")
    with pytest.raises(ValueError):
        harness.load_config(f)


def test_trials_are_reproducible(tmp_path):
    cfg = harness.load_config(_cfg(tmp_path))
    a = harness.run_trial(cfg.cells[0], 7, cfg)
    b = harness.run_trial(cfg.cells[0], 7, cfg)
    a.wall_time = b.wall_time = 0
    assert a == b
    assert a.L_P > 0 and a.dfs_stop


def test_force_close_certifies(tmp_path):
    cfg = harness.load_config(_cfg(tmp_path))
    cfg.force_close = True
    cfg.close_weak_families = True
    cfg.cert_dir = str(tmp_path / "certs")
    r = harness.run_trial(cfg.cells[1], 1, cfg)
    assert r.closed and r.triples == 1, r.failure
    assert r.L_C >= r.trunk
    from tightpaths.closer import check_certificate
    assert check_certificate(r.cert_path).ok


def test_experiment_csv_and_plot(tmp_path):
    cfg = harness.load_config(_cfg(tmp_path))
    out = tmp_path / "res.csv"
    rows, aggs = harness.run_experiment(cfg, jobs=1, out=out)
    assert len(rows) == 4 and len(aggs) == 2
    assert [r.seed for r in rows] == [7, 8, 7, 8]
    text = out.read_text().splitlines()
    assert text[0] == harness.SCHEMA_LINE
    trials, cells = harness.read_results(out)
    assert len(trials) == 4 and len(cells) == 2
    svg = harness.plot_curve(out, tmp_path / "c.svg")
    assert (tmp_path / "c.svg").read_text().lstrip().startswith("<?xml")


def test_aggregate_counts_failures_as_zero():
    mk = lambda certified, x: harness.TrialResult("c", 10, 3, 2, 4.0, 0, L1=7.5, certified=certified,
                                                  L_C_over_n=x)
    agg = harness.aggregate([mk(True, 0.6), mk(False, 0.5)])[0]
    assert agg["mean_LC_over_n"] == pytest.approx(0.3)
    assert agg["mean_LC_over_n_certified"] == pytest.approx(0.6)
    assert agg["certified_rate"] == 0.5


def test_small_pipeline_dominated_by_brute_force(tmp_path):
    from tightpaths.exact import SmallInstance, brute_longest_cycle, brute_longest_path
    from tightpaths.closer import check_certificate
    inst = SmallInstance.complete(6, 3, 2)
    run = harness.small_pipeline(inst, cert_path=tmp_path / "s.cert")
    assert run.path.length <= brute_longest_path(inst)
    assert run.cycle is not None and run.cycle.length <= brute_longest_cycle(inst)
    assert check_certificate(tmp_path / "s.cert").ok


def test_cli_trial_and_check(tmp_path, capsys):
    code = main(["trial", "--n", "400", "--k", "3", "--j", "2", "--c", "16", "--seed", "1", "--omega", "20",
                 "--p0-fraction", "0.7", "--force-close", "--close-weak", "--cert", str(tmp_path)])
    assert code == 0
    certs = list(tmp_path.glob("*.cert"))
    assert certs
    proc = subprocess.run([sys.executable, "-m", "tightpaths", "check", str(certs[0])], capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
    # forced closure makes round two complete, so tamper with the round instead
    certs[0].write_text(certs[0].read_text().replace("round = 1", "round = 0"))
    proc = subprocess.run([sys.executable, "-m", "tightpaths", "check", str(certs[0])], capture_output=True, text=True)
    assert proc.returncode == 1 and "FAIL" in proc.stdout


def test_cli_bruteforce(tmp_path, capsys):
    f = tmp_path / "e.txt"
    f.write_text("0 1 2\n1 2 3\n2 3 0\n3 0 1\n")
    assert main(["bruteforce", str(f), "--j", "2"]) == 0
    out = capsys.readouterr().out
    assert "longest path: 2" in out and "longest cycle: 4" in out


def test_empty_grid(tmp_path):
    f = tmp_path / "empty.ini"
    f.write_text("[experiment]\ntrials = 3\n")
    out = tmp_path / "e.csv"
    assert main(["run", str(f), "--out", str(out)]) == 0
    trials, cells = harness.read_results(out)
    assert trials == [] and cells == []


def test_parallel_matches_serial(tmp_path):
    cfg = harness.load_config(_cfg(tmp_path))
    cfg.trials = 1
    a, _ = harness.run_experiment(cfg, jobs=1, out=tmp_path / "a.csv")
    b, _ = harness.run_experiment(cfg, jobs=2, out=tmp_path / "b.csv")
    strip = lambda rs: [{**r.__dict__, "wall_time": 0} for r in rs]
    assert strip(a) == strip(b)
