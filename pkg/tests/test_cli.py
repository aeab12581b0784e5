import json

import pytest

from app import cli
from app.core import catalog
from app.models.schemas import AltFormSchema, LieSubalgebraSchema

G2_FORM_JSON = {
    "dim": 7, "degree": 3, "mode": "exact",
    "entries": [
        {"idx": [1, 2, 3], "num": 1, "den": 1},
        {"idx": [1, 4, 5], "num": 1, "den": 1},
        {"idx": [1, 6, 7], "num": 1, "den": 1},
        {"idx": [2, 4, 6], "num": 1, "den": 1},
        {"idx": [2, 5, 7], "num": -1, "den": 1},
        {"idx": [3, 4, 7], "num": -1, "den": 1},
        {"idx": [3, 5, 6], "num": -1, "den": 1},
    ],
}


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_list(capsys):
    assert cli.dispatch(["list"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "suites:" in out
    assert "kxk" in out


def test_list_json(capsys):
    assert cli.dispatch(["list", "--json"]) == cli.EXIT_OK
    listing = json.loads(capsys.readouterr().out)
    assert "dim3" in listing["suites"]
    assert "g2-form" in listing["models"]


def test_verify_json(capsys):
    assert cli.dispatch(["verify", "dim3", "--json"]) == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["suite"] == "dim3"
    assert report["failed"] == 0
    assert report["passed"] == len(report["checks"])
    assert all(c["anchor"]["section"] == "dimension three" and c["anchor"]["quote"] for c in report["checks"])


def test_verify_text(capsys):
    assert cli.dispatch(["verify", "dim3"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "0 failed" in out


def test_unknown_suite(capsys):
    assert cli.dispatch(["verify", "nope"]) == cli.EXIT_USAGE
    assert "UnknownSuiteError" in capsys.readouterr().err


def test_stabilizer_of_the_g2_form(tmp_path, capsys):
    path = write_json(tmp_path / "phi.json", G2_FORM_JSON)
    assert cli.dispatch(["stabilizer", "--form", path]) == cli.EXIT_OK
    assert "dimension 14" in capsys.readouterr().out


def test_stabilizer_json_round_trips(tmp_path, capsys):
    path = write_json(tmp_path / "phi.json", G2_FORM_JSON)
    assert cli.dispatch(["stabilizer", "--form", path, "--json"]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["dimension"] == 14
    algebra = LieSubalgebraSchema.model_validate(payload["algebra"]).to_algebra()
    assert algebra.dimension == 14


@pytest.mark.parametrize("entry", [
    {"idx": [2, 1, 3], "num": 1, "den": 1},
    {"idx": [1, 2, 8], "num": 1, "den": 1},
    {"idx": [1, 2], "num": 1, "den": 1},
    {"idx": [1, 2, 3], "num": 1, "den": 0},
    {"idx": [1, 2, 3], "val": 0.5},
])
def test_malformed_form(tmp_path, capsys, entry):
    path = write_json(tmp_path / "bad.json", {"dim": 7, "degree": 3, "mode": "exact", "entries": [entry]})
    assert cli.dispatch(["stabilizer", "--form", path]) == cli.EXIT_USAGE
    assert "bad.json" in capsys.readouterr().err


def test_unreadable_input(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert cli.dispatch(["stabilizer", "--form", str(bad)]) == cli.EXIT_USAGE
    assert cli.dispatch(["stabilizer", "--form", str(tmp_path / "missing.json")]) == cli.EXIT_USAGE


def test_usage_errors(capsys):
    assert cli.dispatch(["verify", "dim3", "--tol", "-1"]) == cli.EXIT_USAGE
    assert cli.dispatch(["verify", "dim3", "--mode", "decimal"]) == cli.EXIT_USAGE
    assert cli.dispatch([]) == cli.EXIT_USAGE
    assert cli.dispatch(["--help"]) == cli.EXIT_OK


def test_model_dump_and_holonomy(tmp_path, capsys):
    dump = tmp_path / "kxk.json"
    assert cli.dispatch(["model", "kxk", "--param", "t=1/2", "--dump", str(dump)]) == cli.EXIT_OK
    assert "kxk: dimension 3" in capsys.readouterr().out
    bundle = json.loads(dump.read_text())
    assert bundle["params"]["t"] == {"num": 1, "den": 2}
    model_path = write_json(tmp_path / "model.json", bundle["model"])
    assert cli.dispatch(["holonomy", "--model", model_path]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "holonomy dimension 3" in out
    assert "metric True" in out


def test_model_rejects_bad_parameters(capsys):
    assert cli.dispatch(["model", "kxk", "--param", "t=abc"]) == cli.EXIT_USAGE
    assert cli.dispatch(["model", "kxk", "--param", "s=1"]) == cli.EXIT_USAGE
    assert cli.dispatch(["model", "nope"]) == cli.EXIT_USAGE


def test_model_in_float_mode(capsys):
    assert cli.dispatch(["model", "dim3", "--mode", "float", "--json"]) == cli.EXIT_OK
    bundle = json.loads(capsys.readouterr().out)
    assert bundle["mode"] == "float"
    assert bundle["tau"]["entries"] == [{"idx": [1, 2, 3], "val": 1.0}]


def test_decompose(tmp_path, capsys):
    g = catalog.build("product-vol3").tensors["g"]
    path = tmp_path / "g.json"
    path.write_text(LieSubalgebraSchema.from_algebra(g).model_dump_json())
    assert cli.dispatch(["decompose", "--algebra", str(path), "--json"]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert sorted(payload["dims"]) == [3, 3]
    assert payload["irreducible"] == [True, True]
    assert len(payload["isotypic"]) == 2


def test_form_schema_round_trip(g2_form):
    wire = AltFormSchema.from_form(g2_form).model_dump()
    assert wire == G2_FORM_JSON
    assert AltFormSchema.model_validate(wire).to_form() == g2_form
