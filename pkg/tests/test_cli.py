import json
import math
from pathlib import Path

import pytest

from kontext import config
from kontext.cli import main
from kontext.greechie import make_bug, serialize, to_dict

DATA = Path(__file__).parent / "data"
BUG = "bundled:bug"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="d.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return _write


def test_validate_bug(capsys):
    code, out, _ = run(capsys, "validate", BUG)
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_validate_truncated_block(capsys, write):
    doc = to_dict(make_bug())
    doc["blocks"][0] = doc["blocks"][0][:2]
    code, _, err = run(capsys, "validate", write(doc))
    assert code == 2 and "block size" in err


def test_validate_realization_failure(capsys, write):
    s = math.sqrt(1 - 0.1**2)
    doc = {"dimension": 3,
           "atoms": [{"id": "x", "vector": [1, 0, 0]}, {"id": "y", "vector": [0.1, s, 0]},
                     {"id": "z", "vector": [0, 0, 1]}],
           "blocks": [["x", "y", "z"]]}
    code, _, err = run(capsys, "validate", write(doc))
    assert code == 3 and "realization" in err


def test_validate_legality_failure(capsys, write):
    doc = {"dimension": 3, "atoms": list("abcd"), "blocks": [["a", "b", "c"], ["a", "b", "d"]]}
    assert run(capsys, "validate", write(doc))[0] == 3


def test_validate_io_error(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 1


def test_measures(capsys, write):
    single = write({"dimension": 3, "atoms": list("abc"), "blocks": [["a", "b", "c"]]})
    code, out, _ = run(capsys, "measures", single)
    assert code == 0 and len(json.loads(out)) == 3
    code, out, _ = run(capsys, "measures", BUG, "--count-only")
    assert code == 0 and out.strip() == "14"


def test_measures_ks_exit(capsys):
    code, out, err = run(capsys, "measures", str(DATA / "fano.json"))
    assert code == 10 and json.loads(out) == []
    assert run(capsys, "measures", str(DATA / "cabello18.json"), "--count-only")[0] == 10


def test_classify_bug(capsys):
    code, out, _ = run(capsys, "classify", BUG, "--set", "c=1")
    assert code == 0
    status = json.loads(out)["status"]
    assert status["b"] == status["a"] == status["d"] == "Forced0"


def test_classify_contradiction(capsys):
    code, out, err = run(capsys, "classify", BUG, "--set", "c=1", "--set", "b=1")
    assert code == 11
    assert json.loads(out)["contradiction"]["witness"] == "C5"
    assert "C5" in err


def test_classify_star7(capsys):
    code, out, _ = run(capsys, "classify", "bundled:star7", "--set", "c=1")
    status = json.loads(out)["status"]
    assert code == 0
    assert all(v == "Forced0" for k, v in status.items() if k != "c")


@pytest.mark.parametrize("premise", ["c", "c=2", "=1", "c=one"])
def test_classify_bad_premise(capsys, premise):
    assert run(capsys, "classify", BUG, "--set", premise)[0] == 4


def test_classify_unknown_atom(capsys):
    assert run(capsys, "classify", BUG, "--set", "q=1")[0] == 4


def test_born(capsys):
    assert run(capsys, "born", BUG, "c", "b")[1] == "0.111111111111\n"
    assert run(capsys, "born", BUG, "c", "c")[1] == "1.000000000000\n"
    assert run(capsys, "born", BUG, "c", "a")[1] == "0.000000000000\n"


def test_born_missing_coordinates(capsys, write):
    bare = write({"dimension": 3, "atoms": list("abc"), "blocks": [["a", "b", "c"]]})
    assert run(capsys, "born", bare, "a", "b")[0] == 4


def test_qrng_bug(capsys):
    code, out, err = run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:b",
                         "--n", "100000", "--seed", "1")
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["frequency"] - 1 / 9) < 0.004
    assert doc["certified"] is False
    assert "warning" in err


def test_qrng_trivial(capsys, tmp_path):
    code, out, _ = run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:c", "--n", "1000")
    assert json.loads(out)["frequency"] == 1.0
    bits = tmp_path / "bits.bin"
    code, out, _ = run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:a", "--n", "16",
                       "--bits-out", str(bits))
    assert json.loads(out)["frequency"] == 0.0
    assert bits.read_bytes() == b"\x00\x00"


def test_qrng_errors(capsys):
    assert run(capsys, "qrng", "--prep", f"{BUG}:q", "--target", f"{BUG}:b")[0] == 4
    assert run(capsys, "qrng", "--prep", "nocolon", "--target", f"{BUG}:b")[0] == 4
    assert run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:b", "--n", "0")[0] == 4
    assert run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:b",
               "--bounds", "0.9", "0.1")[0] == 4


def test_qrng_custom_bounds(capsys):
    code, out, err = run(capsys, "qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:b",
                         "--n", "10", "--bounds", "0.3", "0.4")
    assert json.loads(out)["certified"] is True and "warning" not in err


def test_export(capsys, write):
    code, out, _ = run(capsys, "export", BUG, "--dot")
    assert code == 0 and out.startswith("graph")
    nodes = [line for line in out.splitlines() if line.strip().endswith("];")
             and "--" not in line and "edge" not in line and "node" not in line]
    assert len(nodes) == 13
    code, out, _ = run(capsys, "export", "bundled:star3")
    assert len([line for line in out.splitlines() if ' -- ' in line and '"c"' in line]) == 3
    empty = write({"dimension": 3, "atoms": list("abc"), "blocks": []})
    assert run(capsys, "export", empty)[0] == 2


def test_export_dimacs(capsys):
    code, out, _ = run(capsys, "export", BUG, "--dimacs")
    assert "p cnf 13 28" in out


def test_generate(capsys):
    code, out, _ = run(capsys, "generate", "bug")
    assert out == serialize(make_bug())
    assert run(capsys, "generate", "star")[0] == 4


@pytest.mark.parametrize("argv", [
    ["validate", BUG], ["measures", BUG], ["classify", BUG, "--set", "c=1", "--format", "table"],
    ["born", BUG, "c", "b"], ["export", BUG],
    ["qrng", "--prep", f"{BUG}:c", "--target", f"{BUG}:b", "--n", "2000", "--seed", "5"],
])
def test_byte_identical_output(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_tolerance_env(capsys, monkeypatch, write):
    s = math.sqrt(1 - 1e-6**2)
    doc = {"dimension": 3,
           "atoms": [{"id": "x", "vector": [1, 0, 0]}, {"id": "y", "vector": [1e-6, s, 0]},
                     {"id": "z", "vector": [0, 0, 1]}],
           "blocks": [["x", "y", "z"]]}
    path = write(doc)
    assert run(capsys, "validate", path)[0] == 3
    monkeypatch.setenv("KONTEXT_TOLERANCE", "1e-5")
    assert run(capsys, "validate", path)[0] == 0
    assert run(capsys, "validate", path, "--tolerance", "1e-9")[0] == 3
    assert config.get_tolerance() == config.DEFAULT_TOLERANCE


def test_bad_tolerance(capsys):
    assert run(capsys, "--tolerance", "-1", "validate", BUG)[0] == 4
