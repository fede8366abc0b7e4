import json
from importlib import resources

import pytest

from kcert.cli import main
from kcert.specdoc import SpecDocument, SpecError


def spec_path(name):
    return str(resources.files("kcert.specs").joinpath(name))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bundled_specs_pass(capsys):
    code, out, err = run_cli(
        capsys, "verify", "--spec", spec_path("trivial_q.json")
    )
    assert code == 0 and "result: pass" in out
    code, out, err = run_cli(
        capsys, "boundary", "--spec", spec_path("quotient_clutching.json")
    )
    assert code == 0 and "result: pass" in out
    code, out, err = run_cli(
        capsys, "exactness", "--spec", spec_path("propagation_cover.json")
    )
    assert code == 0 and "result: pass" in out
    assert "skipped" in out.lower()


def test_exactness_on_clutching(capsys):
    code, out, _ = run_cli(
        capsys, "exactness", "--spec", spec_path("quotient_clutching.json"),
        "--samples", "5",
    )
    assert code == 0
    assert "segment kernel_i: PASS" in out


def test_determinism_bytes(capsys):
    args = ("verify", "--spec", spec_path("trivial_q.json"), "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    args = ("exactness", "--spec", spec_path("quotient_clutching.json"),
            "--samples", "3", "--format", "json")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
    json.loads(out1)


def test_wall_clock_goes_to_stderr(capsys):
    _, out, err = run_cli(capsys, "verify", "--spec", spec_path("trivial_q.json"),
                          "--samples", "5")
    assert "wall-clock" in err
    assert "wall-clock" not in out


def test_report_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "verify", "--spec", spec_path("trivial_q.json"),
        "--samples", "5", "--format", "json", "--report", str(target),
    )
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data["result"] == "pass"
    assert data["command"]["name"] == "verify"


def test_malformed_rational_rejected(tmp_path, capsys):
    doc = {
        "algebra": {"kind": "trivial"},
        "matrices": {"M": {"algebra": "algebra", "size": 1, "entries": [["1/0"]]}},
        "command": {"name": "verify"},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, err = run_cli(capsys, "verify", "--spec", str(path))
    assert code == 2
    assert "spec error" in err


def test_zero_samples_gives_empty_pass(tmp_path, capsys):
    doc = {"algebra": {"kind": "trivial"}, "command": {"name": "verify"}}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "verify", "--spec", str(path), "--samples", "0")
    assert code == 0
    assert "samples=0" in out


def test_claimed_level_validated(tmp_path, capsys):
    doc = {
        "algebra": {"kind": "trivial"},
        "matrices": {
            "M": {"algebra": "algebra", "size": 1, "entries": [["2"]], "level": 3}
        },
        "command": {"name": "verify"},
    }
    path = tmp_path / "bad_level.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "verify", "--spec", str(path))
    assert code == 2 and "level" in err


def test_corrupted_witness_fails_with_residual(tmp_path, capsys):
    base = json.loads(
        resources.files("kcert.specs").joinpath("quotient_clutching.json").read_text()
    )
    base["command"] = {"name": "exactness", "seed": 7, "samples": 2,
                      "corrupt_witness": True}
    del base["matrices"]
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(base))
    code, out, _ = run_cli(capsys, "exactness", "--spec", str(path))
    assert code == 1
    assert "segment kernel_boundary: FAIL" in out
    assert "residual" in out


def test_missing_section_rejected(tmp_path, capsys):
    path = tmp_path / "nodiag.json"
    path.write_text(json.dumps({"algebra": {"kind": "trivial"}}))
    code, _, err = run_cli(capsys, "boundary", "--spec", str(path))
    assert code == 2


def test_boundary_requires_invertible_u(tmp_path, capsys):
    base = json.loads(
        resources.files("kcert.specs").joinpath("quotient_clutching.json").read_text()
    )
    del base["matrices"]["U"]["inverse"]
    path = tmp_path / "no_inverse.json"
    path.write_text(json.dumps(base))
    code, _, err = run_cli(capsys, "boundary", "--spec", str(path))
    assert code == 2 and "inverse" in err


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(SpecError):
        SpecDocument({"algebra": {"kind": "trivial", "bogus": 1}})
    with pytest.raises(SpecError):
        SpecDocument({"unknown_section": {}})


def test_nonjson_rejected(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_cli(capsys, "verify", "--spec", str(path))
    assert code == 2


def test_boundary_rejects_sectionless_first_leg(tmp_path, capsys):
    doc = {
        "diagram": {
            "lambda1": {"kind": "trivial"},
            "lambda2": {"kind": "quotient-pullback-leg"},
            "lambda_prime": {"kind": "quotient-pullback-leg"},
            "j1": {"type": "scalar-inclusion"},
            "j2": {"type": "identity"},
        },
        "matrices": {
            "U": {"algebra": "lambda_prime", "size": 1,
                  "entries": [[["2"]]], "inverse": [[["1/2"]]]}
        },
        "command": {"name": "boundary", "u": "U"},
    }
    path = tmp_path / "no_section.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "boundary", "--spec", str(path))
    assert code == 2 and "surjective" in err
