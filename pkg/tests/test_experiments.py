import csv
import io
import math
import subprocess
import sys

import pytest

from gsprecode.cli import main
from gsprecode.config import parse_config
from gsprecode.experiments import CSV_HEADER, run, to_csv
from gsprecode.presets import experiment_catalog, get_preset

CAPACITY = """\
experiment = capacity_vs_snr
n_bs = 64
n_users = 8
snr_db_grid = 0, 10, 20
schemes = zf, gs:2
trials = 5
"""


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_capacity_row_count_and_header():
    recs = run(parse_config(CAPACITY))
    assert len(recs) == 6
    table = rows(to_csv(recs))
    assert tuple(table[0]) == CSV_HEADER
    assert CSV_HEADER == ("experiment", "scheme", "iters", "init", "N", "K", "xi", "snr_db",
                          "metric_name", "value", "trials", "seed")
    assert all(len(r) == 12 for r in table)


def test_golden_csv():
    text = to_csv(run(parse_config(CAPACITY.replace("0, 10, 20", "10") + "seed = 1\n")))
    lines = text.split("\r\n")
    assert lines[0] == "experiment,scheme,iters,init,N,K,xi,snr_db,metric_name,value,trials,seed"
    assert lines[1].startswith("capacity_vs_snr,zf,0,-,64,8,0,10,sum_rate,")
    assert lines[2].startswith("capacity_vs_snr,gs,2,zero,64,8,0,10,sum_rate,")
    assert lines[1].endswith(",5,1")
    assert lines[-1] == ""


def test_same_config_twice_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = parse_config(CAPACITY)
    run(cfg, str(a))
    run(cfg, str(b))
    assert a.read_bytes() == b.read_bytes()


def test_workers_do_not_change_output():
    base = CAPACITY.replace("zf, gs:2", "zf, neumann:2, gs:2")
    one = to_csv(run(parse_config(base + "workers = 1\n")))
    four = to_csv(run(parse_config(base + "workers = 4\n")))
    assert one == four


def test_ber_adaptive_and_schedule_independent():
    text = """\
experiment = ber_vs_snr
n_bs = 64
n_users = 8
snr_db_grid = 4, 30
schemes = gs:2:zone:4
trials = 40
batch_size = 8
min_errors = 50
symbols_per_trial = 5
"""
    serial = run(parse_config(text))
    threaded = run(parse_config(text + "workers = 3\n"))
    assert serial == threaded
    by_metric = {(r.snr_db, r.metric_name): r for r in serial}
    low = by_metric[(4.0, "bit_errors")]
    assert low.value >= 50 and low.trials % 8 == 0 and low.trials < 40
    assert by_metric[(30.0, "bits")].trials == 40
    assert by_metric[(4.0, "ber")].value == pytest.approx(low.value / by_metric[(4.0, "bits")].value)


def test_power_frobenius_beta_and_mult_count():
    power = run(parse_config("experiment = power_vs_n\nn_users = 4\nn_bs_grid = 8, 32\n"
                             "schemes = zf, gs:2\ntrials = 10\n"))
    assert [r.metric_name for r in power] == ["transmit_power"] * 4
    zf = [r.value for r in power if r.scheme == "zf"]
    gs = [r.value for r in power if r.scheme == "gs"]
    assert zf == pytest.approx([4, 4]) and all(g < 4 for g in gs)

    fro = run(parse_config("experiment = frobenius_vs_alpha\nn_users = 8\nalpha_grid = 2, 8\ntrials = 10\n"))
    assert [r.metric_name for r in fro] == ["frobenius_mean", "frobenius_bound"] * 2
    assert fro[3].value == pytest.approx(math.sqrt(56 / 128))

    beta = run(parse_config("experiment = beta_vs_alpha\nn_users = 8\nalpha_grid = 1, 4\ntrials = 10\n"))
    assert beta[1].value == 0 and beta[3].value == pytest.approx(math.sqrt(24))

    mult = run(parse_config("experiment = mult_count_vs_k\nn_bs = 256\nn_users_grid = 16, 32\n"
                            "schemes = gs:2:zone:4, gs:3\n"))
    assert [r.value for r in mult] == [4872, 256 + 4096 + 768, 256 + 8192 + 16 + 2048, 256 + 8192 + 3072]


def test_catalog():
    names = [p.name for p in experiment_catalog()]
    assert names == ["fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"]
    fig8 = get_preset("fig8").values
    assert (fig8["n_bs"], fig8["n_users"]) == (256, 32)
    iters = {(s.name, s.iters) for s in fig8["schemes"]}
    assert {("neumann", i) for i in (2, 3, 4)} <= iters and {("gs", i) for i in (2, 3, 4)} <= iters
    assert get_preset("fig12").values["xi"] == 0.5
    fig3 = get_preset("fig3").values
    assert fig3["experiment"] == "frobenius_vs_alpha" and fig3["n_users"] == 16
    for p in experiment_catalog():
        parse_config("", base=p.config_values())
    with pytest.raises(KeyError):
        get_preset("fig4")


def test_cli_success_and_override(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text(CAPACITY)
    out = tmp_path / "o.csv"
    assert main(["--config", str(cfg), "--set", "snr_db_grid=30", "--out", str(out)]) == 0
    table = rows(out.read_text())
    assert len(table) == 3 and {r[7] for r in table[1:]} == {"30"}


def test_cli_preset_with_set(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["--preset", "fig3", "--set", "trials=2", "--set", "alpha_grid=4", "--out", str(out)]) == 0
    assert len(rows(out.read_text())) == 3


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text(CAPACITY + "bogus = 1\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2
    assert "line 7" in capsys.readouterr().err
    assert main(["--config", str(tmp_path / "missing.txt"), "--out", "x.csv"]) == 3
    cfg.write_text(CAPACITY)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "no" / "dir" / "o.csv")]) == 3
    assert main(["--preset", "fig99", "--out", "x.csv"]) == 2
    assert main(["--config", str(cfg)]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "gsprecode", "--list-presets"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[0].startswith("fig2")
