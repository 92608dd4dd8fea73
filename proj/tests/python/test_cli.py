import json
import os
import subprocess

import pytest

CLI = os.environ.get("SECSYN_CLI", "secsyn")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture
def config(tmp_path):
    doc = {
        "schema": 1,
        "attack": {"sigma": 0, "trials": 16, "trials_coarse": 8, "cap": 512},
        "collect": {"samples": 12, "sa_fraction": 0.25, "sa_evaluations": 4},
        "search": {"iterations": 100, "fine_tune_interval": 50, "k": 3},
        "compare": {"direct_evaluations": 2, "monotonicity_recipes": 3, "timing_samples": 3},
        "output": str(tmp_path / "out"),
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def rows(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("#")][1:]


def test_usage_and_config_errors(config, tmp_path):
    assert run().returncode == 2
    assert run("--help").returncode == 0
    r = run("attack", "-c", config, "--set", "attack.nope=1")
    assert r.returncode == 2 and "attack.nope" in r.stderr
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 2}')
    assert run("train", "-c", bad).returncode == 2
    assert run("train", "-c", tmp_path / "missing.json").returncode == 2
    r = run("validate", "-c", config, "--recipe", "b; rw; balanse")
    assert r.returncode == 2 and "balanse" in r.stderr


def test_collect_resume_and_train(config, tmp_path):
    out = tmp_path / "out"
    r = run("collect", "-c", config, "--set", "collect.samples=5", "--limit", "3")
    assert r.returncode == 0 and "3 new" in r.stdout
    r = run("collect", "-c", config, "--set", "collect.samples=5")
    assert r.returncode == 0 and "(2 new, 3 reused" in r.stdout
    assert len(rows(out / "dataset.csv")) == 5

    r = run("train", "-c", config)
    assert r.returncode == 2 and "insufficient samples" in r.stderr

    assert run("collect", "-c", config).returncode == 0
    assert len(rows(out / "dataset.csv")) == 12
    assert run("train", "-c", config).returncode == 0
    first = (out / "model.v1").read_bytes()
    assert run("train", "-c", config).returncode == 0
    assert (out / "model.v1").read_bytes() == first
    assert json.loads(first)["config_hash"]

    r = run("search", "-c", config)
    assert r.returncode == 0, r.stderr
    assert "2 fine-tune rounds" in r.stdout
    actual = int(r.stdout.split(" actual")[0].split(", ")[-1])
    assert actual <= 12
    assert len(rows(out / "search" / "progress.csv")) == 100
    assert (out / "search" / "top_recipes.csv").exists()

    r = run("compare", "-c", config)
    assert r.returncode == 0, r.stderr
    table = rows(out / "reports" / "compare.csv")
    assert len(table) == 12
    assert {row.split(",")[0] for row in table} == {"baseline", "sa_direct", "mcts_direct", "pipeline"}
    for name in ["dataset.csv", "search/progress.csv", "reports/compare.csv", "reports/train_metrics.csv"]:
        assert (out / name).read_text().startswith("# secsyn config_hash=")


def test_validate_and_attack(config, tmp_path):
    out = tmp_path / "out"
    r = run("validate", "-c", config, "--set", "attack.sigma=150", "--set", "countermeasure=elb", "--recipe", "b; rw; rf; b")
    assert r.returncode == 0, r.stderr
    report = rows(out / "reports" / "validate.csv")
    assert [row.split(",")[0] for row in report] == ["recipe", "baseline"]
    for row in report:
        cells = row.split(",")
        assert int(cells[5]) > int(cells[3])

    r = run("attack", "-c", config, "--set", "countermeasure=none")
    assert r.returncode == 0 and "pt_score" in r.stdout
    assert "# pt_score=" in (out / "reports" / "attack.csv").read_text()


def test_verification_failure(config, tmp_path):
    # eight wires: the identity is not the keyed S-box
    aag = tmp_path / "identity.aag"
    lits = [str(2 * (i + 1)) for i in range(8)]
    aag.write_text("aag 8 8 0 8 0\n" + "\n".join(lits + lits) + "\n")
    r = run("attack", "-c", config, "--set", f"design.source={aag}")
    assert r.returncode == 3 and "verification failure" in r.stderr
