import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from kaczlab import __version__
from kaczlab.cli import EXPERIMENTS, list_experiments, main, run
from kaczlab.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
TWO_ATOM = {"kind": "atomic", "atoms": [[0.0, 0.5], [0.5, 0.5]]}
THREE_ATOM = {"kind": "atomic", "atoms": [[0.0, 0.5], [1 / 3, 0.25], [2 / 3, 0.25]]}


def write(tmp_path, config, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(config))
    return str(p)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_moments_experiment(tmp_path):
    cfg = write(tmp_path, {"experiment": "moments", "measure": TWO_ATOM, "parameters": {"depth": 8}})
    assert main(["moments", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    table = rows(tmp_path / "moments.csv")
    assert table[0] == ["n", "re", "im"]
    re = [float(r[1]) for r in table[1:]]
    assert len(re) == 9
    assert re == pytest.approx([1, 0, 1, 0, 1, 0, 1, 0, 1], abs=1e-14)


def test_abel_sweep_experiment(tmp_path):
    cfg = str(CONFIGS / "two_atom_abel.json")
    assert main(["abel-sweep", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    table = rows(tmp_path / "abel-sweep.csv")
    assert table[0] == ["r", "depth", "error"]
    errs = [float(r[2]) for r in table[1:]]
    assert errs == pytest.approx([0.261, 0.0294], abs=1e-3)


def test_alpha_experiment(tmp_path):
    cfg = str(CONFIGS / "dirac_alpha.json")
    assert main(["alpha", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    re = [float(r[1]) for r in rows(tmp_path / "alpha.csv")[1:]]
    assert re == pytest.approx([1, -1, 0, 0, 0], abs=1e-15)


def test_list_experiments(capsys):
    text = list_experiments()
    names = [line.split()[0] for line in text.splitlines()]
    assert "abel-sweep" in names and "compare-variants" in names
    assert names == sorted(names) == sorted(EXPERIMENTS)
    assert main(["list"]) == 0
    assert capsys.readouterr().out.strip() == text


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_sample_configs_are_reproducible(path, tmp_path):
    exp = json.loads(path.read_text())["experiment"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([exp, "--config", str(path), "--out", str(a), "--quiet"]) == 0
    assert main([exp, "--config", str(path), "--out", str(b), "--quiet"]) == 0
    assert (a / f"{exp}.csv").read_bytes() == (b / f"{exp}.csv").read_bytes()
    report = json.loads((a / f"{exp}.json").read_text())
    assert report["experiment"] == exp and report["version"] == __version__
    assert report["config"] == json.loads(path.read_text())
    assert report["wall_clock_seconds"] >= 0 and isinstance(report["summary"], dict)


def test_seed_controls_random_truth(tmp_path):
    cfg = {"experiment": "reconstruct", "measure": THREE_ATOM, "truth_vector": "random",
           "parameters": {"N": 50}}
    _, _, s1 = run(cfg, "reconstruct", tmp_path / "1", seed=5)
    _, _, s2 = run(cfg, "reconstruct", tmp_path / "2", seed=5)
    _, _, s3 = run(cfg, "reconstruct", tmp_path / "3", seed=6)
    assert s1["final"] == s2["final"] and s1["final"] != s3["final"]
    assert s1["series_deviation"] < 1e-10


def test_reconstruct_summary(tmp_path):
    cfg = {"experiment": "reconstruct", "measure": THREE_ATOM, "truth_vector": [[1, 0], [0, 1], [2, 0]],
           "parameters": {"N": 100000, "stop_tol": 1e-6}}
    _, json_path, summary = run(cfg, "reconstruct", tmp_path)
    assert summary["final_error"] < 1e-6 and summary["steps"] < 100000


def test_compare_variants(tmp_path):
    _, _, summary = run(json.loads((CONFIGS / "three_atom_compare.json").read_text()), "compare-variants",
                        tmp_path)
    assert summary["augmented_vs_abel"] < 1e-10
    assert summary["relaxed_limit_vs_lss"] < 1e-6


@pytest.mark.parametrize("config,code", [
    ({"experiment": "moments", "measure": TWO_ATOM, "colour": "red"}, 2),
    ({"experiment": "moments", "measure": TWO_ATOM, "parameters": {"depht": 3}}, 2),
    ({"experiment": "moments", "measure": {"kind": "atomic", "atoms": [[0, 0.6], [0.5, 0.6]]}}, 2),
    ({"experiment": "moments", "measure": TWO_ATOM, "output": {"format": "xlsx"}}, 2),
    ({"experiment": "reconstruct", "measure": TWO_ATOM, "truth_vector": "random"}, 2),
    ({"experiment": "reconstruct", "measure": TWO_ATOM, "noise": {"kind": "random_l2", "s": 1.0}}, 2),
    ({"experiment": "abel-sweep", "measure": TWO_ATOM, "parameters": {"r_grid": [1.5]}}, 3),
    ({"experiment": "abel-sweep", "measure": TWO_ATOM, "parameters": {"r_grid": [0.99, 0.9]}}, 3),
    ({"experiment": "moments", "measure": {"kind": "moments", "values": [[1, 0], [0.5, 0]]}, "parameters": {"depth": 5}}, 3),
])
def test_exit_codes(tmp_path, config, code, capsys):
    cfg = write(tmp_path, config)
    assert main([config["experiment"], "--config", cfg, "--out", str(tmp_path), "--quiet"]) == code
    assert capsys.readouterr().err


def test_bad_json_and_missing_config(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert main(["moments", "--config", str(p)]) == 2
    assert main(["moments"]) == 2
    cfg = write(tmp_path, {"experiment": "alpha", "measure": TWO_ATOM})
    assert main(["moments", "--config", cfg]) == 2
    assert main(["moments", "--config", str(tmp_path / "missing.json")]) == 1
    with pytest.raises(ConfigError):
        run({"measure": TWO_ATOM}, "no-such-experiment")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kaczlab", "list"], capture_output=True, text=True, check=True)
    assert "abel-sweep" in out.stdout
