import csv
import io
import json

import pytest

from qrecursive import catalog
from qrecursive.builder import IdentitySystem, format_identities
from qrecursive.cli import main
from qrecursive.core import SequenceOracle, format_definition, load_rep, rep_check


def run(*argv):
    out = io.StringIO()
    status = main(list(argv), out)
    return status, out.getvalue()


def test_eval_stern_7():
    assert run("eval", "stern", "7") == (0, "3\n")


def test_eval_nmax_json():
    status, text = run("eval", "stern", "--nmax", "8", "--json")
    assert status == 0
    obj = json.loads(text)
    # values stay exact: rationals are rendered as strings
    assert obj == {str(n): str(v) for n, v in enumerate([0, 1, 1, 2, 1, 3, 2, 3, 1])}


def test_sum():
    assert run("sum", "stern", "16")[1].strip().endswith("40")


def test_fourier_unbordered_json():
    status, text = run("fourier", "unbordered", "--mu", "0..10", "--json")
    assert status == 0
    table = json.loads(text)[0]
    phi0 = [c for c in table["coefficients"] if c["mu"] == 0][0]
    assert abs(phi0["re"] - 1.081200224751) < 1e-5 and abs(phi0["im"]) < 1e-12
    assert [c["mu"] for c in table["coefficients"]] == list(range(11))


def test_pascal_special_matrices_printed():
    status, text = run("build-rep", "--special", "pascal_z", "--print-matrices")
    assert status == 0
    lines = text.splitlines()
    i = lines.index("B_0 =")
    assert lines[i + 1].split() == ["[", "5/3", "-1/3", "]"]
    assert lines[i + 2].split() == ["[", "4/3", "1/3", "]"]
    assert "." not in "".join(lines[i:i + 6])


def test_round_trip(tmp_path):
    path = tmp_path / "unbordered.json"
    status, _ = run("build-rep", "unbordered", "--special", "--offset-correct", "-o", str(path))
    assert status == 0
    rep, d = load_rep(path)
    assert rep.validity_offset == 0 and rep.dim == 10
    assert rep_check(rep, SequenceOracle(d), 500).ok
    status, text = run("validate", str(path))
    assert status == 0 and text.startswith("ok")
    status, text = run("minimize", str(path), "--json")
    assert status == 0 and json.loads(text)["dim"] == 8


def test_definition_file(tmp_path):
    path = tmp_path / "stern.txt"
    path.write_text(format_definition(catalog.get_entry("stern").definition()))
    assert run("eval", str(path), "9") == (0, "4\n")


def test_disentangle(tmp_path):
    src = tmp_path / "f.ids"
    system = IdentitySystem(2, 3, 2, catalog.UNBORDERED_IDENTITIES,
                            tuple(catalog.unbordered_definition().initial), "unbordered")
    src.write_text(format_identities(system))
    dst = tmp_path / "f.txt"
    status, _ = run("disentangle", str(src), "-o", str(dst))
    assert status == 0
    assert run("eval", str(dst), "24") == (0, "24\n")


def test_fourier_csv_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("fourier", "stern", "--mu=-2..2", "--csv", str(a))[0] == 0
    assert run("fourier", "stern", "--mu=-2..2", "--csv", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(io.StringIO(a.read_text())))
    assert rows[0] == ["eigenvalue", "mu", "re", "im"]
    assert [int(r[1]) for r in rows[1:]] == [-2, -1, 0, 1, 2]
    assert abs(float(rows[3][2]) - 0.5129922721107) < 1e-12


def test_fluctuation_csv(tmp_path):
    path = tmp_path / "fl.csv"
    status, _ = run("fluctuation", "stern", "--umin", "4", "--umax", "5", "--step", "0.5",
                    "--degree", "5", "--csv", str(path))
    assert status == 0
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == ["u", "empirical", "fourier_partial_sum"]
    assert abs(float(rows[1][1]) - 40 / 81) < 1e-12


def test_json_deterministic():
    assert run("jsr", "stern", "--json") == run("jsr", "stern", "--json")
    obj = json.loads(run("jsr", "stern", "--json")[1])
    assert obj["certificate"] == [0, 1] and obj["simple_growth"] is True


def test_jsr_special_scaled():
    status, text = run("jsr", "unbordered", "--special", "--k", "2", "--norm", "row",
                       "--scaling", "2,1/2,1,1", "--json")
    assert status == 0
    obj = json.loads(text)
    assert obj["lower"] == obj["upper"] == 2.0


def test_spectrum_text():
    status, text = run("spectrum", "unbordered", "--special")
    assert status == 0
    assert "2.73205080756888" in text and "-0.732050807568877" in text


def test_asymptotics_text():
    status, text = run("asymptotics", "stern", "--mu-max", "1")
    assert status == 0
    assert "O(N^0.69424191363062)" in text


def test_catalog_lists_entries():
    status, text = run("catalog")
    assert status == 0
    assert all(name in text for name in catalog.ENTRIES)


@pytest.mark.parametrize("argv", [["frobnicate", "stern"], ["eval", "stern", "--bogus"],
                                  ["eval", "no_such_entry", "3"], []])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_domain_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    d = catalog.get_entry("unbordered").definition()
    text = format_definition(d).replace("\n  1 2 2 4 2 4 6 0 4 4 4 4 12 0", "\n  1 2 2 4 2 4 6 0 4 4 4 4 11 0")
    assert text != format_definition(d)
    bad.write_text(text)
    assert run("eval", str(bad), "3")[0] == 1
    assert "InconsistentInitialValues" in capsys.readouterr().err


def test_decimal_input_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text(format_definition(catalog.get_entry("stern").definition()).replace("1 1 1", "1 1 1.0"))
    assert run("eval", str(bad), "3")[0] == 1
    assert "FormatError" in capsys.readouterr().err
