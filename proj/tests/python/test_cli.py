import json
import subprocess

import jsonschema
import pytest
from referencing import Registry, Resource


def run(cli, *args, cwd=None):
    return subprocess.run([cli, *args], cwd=cwd, capture_output=True, text=True)


@pytest.fixture(scope="module")
def registry(source_dir):
    reg = Registry()
    schemas = {}
    for path in (source_dir / "schemas").glob("*.json"):
        doc = json.loads(path.read_text())
        schemas[path.name] = doc
        reg = reg.with_resource(doc["$id"], Resource.from_contents(doc))
    return reg, schemas


def validate(instance, name, registry):
    reg, schemas = registry
    jsonschema.Draft202012Validator(schemas[name], registry=reg).validate(instance)


def test_schemas_are_valid(registry):
    for doc in registry[1].values():
        jsonschema.Draft202012Validator.check_schema(doc)


def test_models_and_configs_validate(source_dir, registry):
    for path in (source_dir / "experiments" / "models").glob("*.json"):
        validate(json.loads(path.read_text()), "model.schema.json", registry)
    for path in (source_dir / "experiments" / "acceptance").glob("*.json"):
        validate(json.loads(path.read_text()), "experiment.schema.json", registry)


def test_simulate_estimate_metric(cli, tmp_path, registry):
    assert run(cli, "simulate", "--model", "uniform2", "--n", "20000", "--seed", "4",
               "--out", "s.csv", cwd=tmp_path).returncode == 0
    assert (tmp_path / "s.csv").read_text().startswith("y,z\n")
    r = run(cli, "estimate-fp", "--samples", "s.csv", "--p", "0.3", "--gamma", "0.09", "--eps", "0.04",
            "--out", "f.json", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    out = json.loads((tmp_path / "f.json").read_text())
    validate(out, "estimate.schema.json", registry)
    r = run(cli, "metric", "--a", "f.json", "--b", "f.json", "--kind", "wasserstein1", cwd=tmp_path)
    assert r.returncode == 0
    assert json.loads(r.stdout)["values"] == [0.0, 0.0]


def test_sp_pipeline_diagnostics(cli, tmp_path, registry):
    assert run(cli, "simulate", "--model", "uniform2", "--format", "sp", "--n", "100000", "--seed", "2",
               "--out", "sp.csv", cwd=tmp_path).returncode == 0
    r = run(cli, "estimate-sp", "--samples", "sp.csv", "--alpha", "0.5", "--eta", "2", "--eps", "0.1",
            cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    validate(out, "estimate.schema.json", registry)
    for key in ("T", "macro_endpoints", "gamma_per_interval", "contraction_samples", "clip_rates",
                "isotonic_repair_total"):
        assert key in out["diagnostics"]


def test_sweep_and_lower_bound_reports(cli, tmp_path, registry):
    config = {
        "name": "cli",
        "model": "uniform2",
        "estimator": "fp-full",
        "n": [2000, 20000],
        "seeds": 2,
        "metric": "wasserstein1",
        "params": {"lambda": 1.0, "eps": 0.2},
    }
    (tmp_path / "exp.json").write_text(json.dumps(config))
    r = run(cli, "sweep", "--config", "exp.json", "--out", "rep.json", "--csv", "rep.csv", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    validate(json.loads((tmp_path / "rep.json").read_text()), "report.schema.json", registry)
    assert (tmp_path / "rep.csv").read_text().startswith("n,seed,bidder,error,status")
    r = run(cli, "lower-bound", "--k", "3", "--eps", "0.1", "--lambda", "0.2", "--n", "1000", "--trials", "5")
    assert r.returncode == 0
    validate(json.loads(r.stdout), "lower-bound.schema.json", registry)


def test_exit_codes(cli, tmp_path):
    assert run(cli).returncode == 2
    assert run(cli, "estimate-fp", "--samples", "missing.csv", cwd=tmp_path).returncode == 4
    (tmp_path / "bad.csv").write_text("y,z\n0.5,1\n0.4,0\n")
    r = run(cli, "estimate-fp", "--samples", "bad.csv", "--gamma", "0.5", "--eps", "0.1", cwd=tmp_path)
    assert r.returncode == 2
    assert "bad.csv:3" in r.stderr
    (tmp_path / "ok.csv").write_text("y,z\n0.5,1\n0.4,2\n")
    r = run(cli, "estimate-fp", "--samples", "ok.csv", "--gamma", "0.1", "--eps", "0.3", cwd=tmp_path)
    assert r.returncode == 2
    r = run(cli, "estimate-fp-partial", "--model", "uniform2", "--max-calls", "10", cwd=tmp_path)
    assert r.returncode == 3
