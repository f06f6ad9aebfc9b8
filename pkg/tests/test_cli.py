import json
from importlib import resources

import pytest

from kahlerlab import catalog as cat
from kahlerlab import cli
from kahlerlab import document as doc

SHIPPED = sorted(p.name for p in resources.files("kahlerlab").joinpath("data/examples").iterdir() if p.name.endswith(".json"))


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_example(capsys):
    code, out, _ = run(capsys, "check", "--example", "hyperbolic", "--c", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    assert rep["context"]["structures"][0]["s"] == pytest.approx(-8.0)


def test_output_is_deterministic(capsys):
    a = run(capsys, "verify", "--example", "lorentz_tube", "--n", "3")
    b = run(capsys, "verify", "--example", "lorentz_tube", "--n", "3")
    assert a == b and a[0] == 0


def test_flagship_verify(capsys):
    code, out, _ = run(capsys, "verify", "--example", "lorentz_tube", "--n", "4", "--suite", "rstar,gray", "--suite", "theorem0")
    assert code == 0
    names = [r["name"] for r in json.loads(out)["identities"]]
    assert names == ["rstar[kahler]", "rstar[almost_kahler]", "gray[kahler]", "gray[almost_kahler]", "theorem0"]


def test_split_with_deformations_and_einstein(capsys):
    code, out, _ = run(capsys, "split", "--example", "product", "--curvatures", "-1,-2", "--t", "0.1,0.5", "--t", "10", "--einstein")
    assert code == 0
    sp = json.loads(out)["split"]
    assert [d["t"] for d in sp["deformations"]] == [0.1, 0.5, 10.0]
    assert sp["einstein"]["s"] == pytest.approx(-8.0)
    assert sp["einstein"]["inverse_deformation_residual"] < 1e-9


def test_split_not_same_sign_fails(capsys):
    code, out, _ = run(capsys, "split", "--example", "product", "--curvatures", "-1,0", "--einstein")
    assert code == 5
    assert "error" in json.loads(out)["split"]["einstein"]


@pytest.mark.parametrize("argv,code", [
    (["split", "--example", "chn", "--n", "2"], 3),
    (["split", "--example", "product", "--curvatures", "-1,-2,-3"], 4),
    (["verify", "--example", "hyperbolic", "--suite", "nosuch"], 2),
    (["check", "--example", "nosuch"], 2),
    (["check"], 2),
    (["frobnicate"], 2),
    (["check", "--example", "product", "--curvatures", "-1,1"], 2),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    if out:
        assert json.loads(out)["pass"] is False


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_documents(capsys, name):
    path = str(resources.files("kahlerlab").joinpath("data/examples", name))
    code, out, _ = run(capsys, "verify", path)
    assert code == 0, out


def test_export_roundtrip_is_byte_identical(capsys, tmp_path):
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    assert run(capsys, "export", "--example", "lorentz_tube", "--n", "3", "--out", str(p1))[0] == 0
    assert run(capsys, "export", str(p1), "--out", str(p2))[0] == 0
    assert p1.read_text() == p2.read_text()
    from_doc = run(capsys, "verify", str(p1))
    from_cat = run(capsys, "verify", "--example", "lorentz_tube", "--n", "3")
    assert json.loads(from_doc[1])["identities"] == json.loads(from_cat[1])["identities"]


def _write(tmp_path, obj):
    p = tmp_path / "doc.json"
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_malformed_json(capsys, tmp_path):
    code, out, err = run(capsys, "check", _write(tmp_path, '{"dim": 2,'))
    assert code == 2 and "line" in json.loads(out)["error"]["message"]


@pytest.mark.parametrize("bad", [
    {"schema_version": "1.0", "dim": 2, "brackets": [[0, 1, 1, 1.0]]},  # no geometry
    {"schema_version": "1.0", "dim": 2, "brackets": [], "metric": [[1, 0], [0, 1]], "omega": [0, 1]},
    {"schema_version": "2.0", "dim": 2, "brackets": [], "metric": [[1, 0], [0, 1]]},
    {"schema_version": "1.0", "dim": 2, "brackets": [[0, 1, 5, 1.0]], "metric": [[1, 0], [0, 1]]},
    {"schema_version": "1.0", "dim": 2, "brackets": [], "metric": [[1, 0], [0, -1]]},
    {"schema_version": "1.0", "dim": 2, "brackets": [], "metric": [[1, 0], [0, 1]], "extra": 1},
])
def test_invalid_documents(capsys, tmp_path, bad):
    assert run(capsys, "check", _write(tmp_path, bad))[0] == 2


def test_corrupted_brackets_fail_validation(capsys, tmp_path):
    text = doc.dumps(doc.context_document(cat.catalog("hyperbolic")))
    obj = json.loads(text)
    obj["brackets"].append([1, 0, 1, 0.5])  # mirrored triple disagreeing with [e1, e2] = e2
    code, out, _ = run(capsys, "check", _write(tmp_path, obj))
    assert code == 2
    rep = json.loads(out)
    assert rep["pass"] is False
    assert rep["validation"][0]["checks"]["antisymmetry"]["pass"] is False


def test_jacobi_failure_document(capsys, tmp_path):
    obj = {"schema_version": "1.0", "dim": 3, "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
           "brackets": [[0, 1, 2, 1.0], [1, 2, 0, 1.0], [2, 0, 0, 1.0]]}
    assert run(capsys, "check", _write(tmp_path, obj))[0] == 2


def test_metric_only_document(capsys, tmp_path):
    obj = {"schema_version": "1.0", "dim": 3, "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "brackets": [[0, 1, 2, 1.0]]}
    code, out, _ = run(capsys, "check", _write(tmp_path, obj))
    assert code == 0
    assert json.loads(out)["context"]["structures"][0]["s"] == pytest.approx(-0.5)
    assert run(capsys, "verify", _write(tmp_path, obj))[0] == 2


def test_dumps_format():
    text = doc.dumps({"a": 0.1, "b": [1.0, float("nan"), 0.0], "c": {"d": True}})
    assert text == '{\n  "a": 0.10000000000000001,\n  "b": [1.0, null, 0.0],\n  "c": {\n    "d": true\n  }\n}\n'
