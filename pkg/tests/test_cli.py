import json
import os
import shutil
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from projtrace.cli import corpus_run, main, run_argv

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MANIFEST = os.path.join(ROOT, "corpus", "manifest.json")


@pytest.fixture(scope="module")
def schema():
    text = resources.files("projtrace").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def _ok(argv, schema, stdin=None):
    code, rep = run_argv(argv, stdin)
    assert code == 0, rep
    jsonschema.validate(rep, schema)
    return rep


COMMANDS = [
    ["ring", "show", "--ring", "triangular-2-2"],
    ["ring", "verify", "--ring", "modular-6"],
    ["ring", "export", "--ring", "field-4"],
    ["ring", "quotient", "--ring", "triangular-2-2", "--ideal", "2"],
    ["ideal", "list", "--ring", "triangular-2-2"],
    ["ideal", "list", "--ring", "triangular-2-2", "--filter", "idempotent", "--filter", "trace"],
    ["ideal", "list", "--ring", "triangular-2-2", "--side", "left"],
    ["ideal", "close", "--ring", "triangular-2-2", "--gens", "1", "--side", "left"],
    ["ideal", "op", "--ring", "triangular-2-2", "--op", "product", "--a", "1", "--b", "4"],
    ["ideal", "radical", "--ring", "triangular-2-2"],
    ["ideal", "pure", "--ring", "triangular-2-2", "--ideal", "1"],
    ["trace", "decide", "--ring", "triangular-2-2", "--ideal", "1"],
    ["trace", "decide", "--ring", "triangular-2-2", "--ideal", "2"],
    ["trace", "pure-chain", "--ring", "modular-6", "--ideal", "2"],
    ["trace", "determinant", "--ring", "modular-6", "--j1", "2", "--j2", "2"],
    ["monoid", "gens", "--rows", "2,3;1,2", "--mods", "5,2"],
    ["monoid", "member", "--rows", "2,3;1,2", "--mods", "5,2", "--x", "2,2"],
    ["monoid", "support", "--rows", "2,3;1,2", "--mods", "5,2", "--support", "1"],
    ["tree", "validate", "--ring", "triangular-3-2"],
    ["tree", "build", "--ring", "triangular-3-2", "--depth", "2"],
    ["tree", "multiplicities", "--ring", "triangular-3-2", "--k", "1", "--sequence", "2,1"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=[" ".join(a[:2]) + f"#{i}" for i, a in enumerate(COMMANDS)])
def test_commands_match_schema(argv, schema):
    rep = _ok(argv, schema)
    assert rep["command"] == " ".join(argv[:2])


def test_telescope_pipeline(schema):
    built = _ok(["telescope", "build-whitehead", "--ring", "triangular-2-2", "--gens", "1,2", "--depth", "4"], schema)
    text = json.dumps(built)
    for action in ("verify", "trace", "hom-chain", "strict-ml", "prefix", "dim-vector"):
        _ok(["telescope", action], schema, text)
    tq = _ok(["telescope", "tensor", "--ideal", "4"], schema, text)
    assert tq["result"]["decision"] == "NOT_FG"
    tq = _ok(["telescope", "tensor", "--ideal", "1"], schema, text)
    assert tq["result"]["decision"] == "FINITELY_GENERATED"


def test_lift_default(schema):
    rep = _ok(["telescope", "build-lift", "--ring", "triangular-2-2", "--ideal", "1", "--depth", "3"], schema)
    _ok(["telescope", "verify"], schema, json.dumps(rep))


def test_determinism():
    argv = ["tree", "fairsize", "--ring", "triangular-3-2"]
    a = run_argv(argv)[1]
    b = run_argv(argv)[1]
    a.pop("timing_ms"), b.pop("timing_ms")
    assert a == b


@pytest.mark.parametrize("argv", [
    ["ring", "show", "--ring", "nonsense-ring"],
    ["ideal", "close", "--ring", "triangular-2-2", "--gens", "99"],
    ["monoid", "member", "--rows", "1,2", "--mods", "1"],
    ["telescope", "build-whitehead", "--ring", "triangular-2-2", "--gens", "2"],
    ["ring", "frobnicate", "--ring", "triangular-2-2"],
    ["trace", "decide"],
])
def test_input_errors_exit_2(argv, schema):
    code, rep = run_argv(argv)
    assert code == 2
    assert "error" in rep
    jsonschema.validate(rep, schema)


def test_undetermined_exit_3(schema):
    code, rep = run_argv(["tree", "fairsize", "--ring", "triangular-3-2", "--window", "1"])
    assert code == 3
    jsonschema.validate(rep, schema)


def test_corrupt_pipe_rejected():
    built = run_argv(["telescope", "build-whitehead", "--ring", "triangular-2-2", "--gens", "1,2", "--depth", "3"])[1]
    built["result"]["telescope"]["X"][0][0][0] = 0
    code, rep = run_argv(["telescope", "verify"], json.dumps(built))
    assert code == 2 and rep["error"] == "input_error"


def test_corpus_green():
    ok, results = corpus_run(MANIFEST)
    assert ok, [r for r in results if not r["ok"]]
    assert len(results) >= 12


def test_corpus_mismatch_exit_1(tmp_path, capsys):
    shutil.copytree(os.path.join(ROOT, "corpus"), tmp_path / "corpus")
    golden = tmp_path / "corpus" / "goldens" / "monoid-gens.json"
    data = json.loads(golden.read_text())
    data["result"]["count"] = 8
    golden.write_text(json.dumps(data))
    code = main(["corpus", "run", str(tmp_path / "corpus" / "manifest.json")])
    rep = json.loads(capsys.readouterr().out)
    assert code == 1
    bad = [s for s in rep["result"]["scenarios"] if not s["ok"]]
    assert [s["name"] for s in bad] == ["monoid-gens"]
    assert any("count" in d for d in bad[0]["diff"])


def test_empty_manifest(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"scenarios": []}))
    assert main(["corpus", "run", str(m)]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["count"] == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "projtrace.cli", "ring", "show", "--ring", "triangular-2-2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "ring show"
