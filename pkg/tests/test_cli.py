import csv

import pytest

from cfrem.cli import main
from cfrem.rem import best_action, import_store, pattern_key
from cfrem.scenario import bundled_scenario, generate_pattern


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    return list(csv.DictReader(lines[1:]))


def test_sweep_cartesian_product(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--out", str(out), "--seed", "3"]) == 0
    rows = read_csv(out)
    assert len(rows) == 18
    assert list(rows[0]) == ["pa_model", "no_ap", "mean_ee", "n_drops"]
    ee = {(r["pa_model"], int(r["no_ap"])): float(r["mean_ee"]) for r in rows}
    for no_ap in range(1, 7):
        assert ee[("Perfect", no_ap)] > ee[("ClassA", no_ap)]


def test_sweep_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--seed", "5", "--drops", "1", "--actions", "1,2", "--pa", "ClassB"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_pattern_file(tmp_path):
    pf = tmp_path / "p.csv"
    pf.write_text("x,y\n100,100\n400,420\n")
    out = tmp_path / "s.csv"
    assert main(["sweep", "--pattern-file", str(pf), "--actions", "1", "--pa", "Perfect",
                 "--out", str(out)]) == 0
    assert len(read_csv(out)) == 1


def test_config_line_echoes_defaults(tmp_path):
    out = tmp_path / "c.csv"
    main(["cdf", "--out", str(out), "--actions", "1"])
    first = out.read_text().splitlines()[0]
    for item in ("seed=1", "n_ue=40", "pa_model=Perfect", "drops=1", "scenario=default"):
        assert item in first


def test_usage_and_runtime_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep"])
    assert exc.value.code == 1
    assert main(["sweep", "--drops", "0", "--out", str(tmp_path / "x")]) == 1
    assert main(["sweep", "--scenario", str(tmp_path / "missing.yaml"), "--out", str(tmp_path / "x")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("aps: []\n")
    assert main(["sweep", "--scenario", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert "at least one AP required" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()


def test_rl_zero_episodes(tmp_path):
    store, log = tmp_path / "rem.txt", tmp_path / "log.csv"
    assert main(["rl", "--episodes", "0", "--store", str(store), "--out", str(log)]) == 0
    assert read_csv(log) == []
    before = store.read_bytes()
    assert main(["rl", "--episodes", "0", "--store", str(store), "--out", str(log)]) == 0
    assert store.read_bytes() == before


def test_rl_cold_start_covers_every_action(tmp_path):
    store, log = tmp_path / "rem.txt", tmp_path / "log.csv"
    assert main(["rl", "--scenario", "three_ap", "--n-ue", "6", "--patterns", "1,2",
                 "--episodes", "8", "--store", str(store), "--out", str(log)]) == 0
    rows = read_csv(log)
    assert [int(r["episode"]) for r in rows] == list(range(8))
    by_key = {}
    for r in rows:
        by_key.setdefault(r["key"], set()).add(int(r["action"]))
    assert len(by_key) == 2
    assert all(actions == {1, 2, 3} for actions in by_key.values())
    rem = import_store(store)
    assert len(rem) == 2 and set(rem.hardware) == {0, 1, 2}


def test_rl_resumes_existing_store(tmp_path):
    store, log = tmp_path / "rem.txt", tmp_path / "log.csv"
    args = ["rl", "--scenario", "three_ap", "--n-ue", "4", "--store", str(store), "--out", str(log)]
    main(args + ["--episodes", "3"])
    main(args + ["--episodes", "2"])
    (entry,) = import_store(store).entries.values()
    assert sum(s.count for s in entry.stats.values()) == 5


def test_rl_agrees_with_sweep_on_fixed_channel(tmp_path):
    sweep, store, log = tmp_path / "s.csv", tmp_path / "rem.txt", tmp_path / "log.csv"
    common = ["--scenario", "three_ap", "--seed", "4", "--n-ue", "8"]
    assert main(["sweep", *common, "--pa", "Perfect", "--drops", "1", "--out", str(sweep)]) == 0
    assert main(["rl", *common, "--patterns", "4", "--pa", "Perfect", "--fixed-channel",
                 "--episodes", "60", "--store", str(store), "--out", str(log)]) == 0
    rows = read_csv(sweep)
    sweep_best = max(rows, key=lambda r: (float(r["mean_ee"]), -int(r["no_ap"])))
    sc = bundled_scenario("three_ap")
    key = pattern_key(generate_pattern(4, 8, sc.area))
    assert best_action(import_store(store), key) == int(sweep_best["no_ap"])


def test_cdf_rows(tmp_path):
    out = tmp_path / "cdf.csv"
    assert main(["cdf", "--actions", "1,3", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["no_ap", "throughput_bps", "cdf"]
    assert len(rows) == 80
    for no_ap in ("1", "3"):
        group = [r for r in rows if r["no_ap"] == no_ap]
        ords = [float(r["cdf"]) for r in group]
        assert ords == [(i + 1) / 40 for i in range(40)]
        thr = [float(r["throughput_bps"]) for r in group]
        assert thr == sorted(thr)
    assert [r["no_ap"] for r in rows] == ["1"] * 40 + ["3"] * 40
