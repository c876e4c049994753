import json
import subprocess
import sys

import pytest

from sadic.cli import main
from sadic.io import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestInfo:
    def test_periodic_leaf(self, capsys):
        code, out, _ = run(capsys, "info", "--input", "periodic_leaf")
        assert code == 0
        assert "2 strata: {a,b} λ≈2.618034, {c} λ=2" in out
        assert "everywhere growing: yes" in out

    def test_thue_morse(self, capsys):
        code, out, _ = run(capsys, "info", "--input", str(fixture_path("thue_morse")))
        assert code == 0 and "primitive, λ=2" in out

    def test_json(self, capsys):
        _, out, _ = run(capsys, "info", "--input", "bkms", "--format", "json")
        data = json.loads(out)
        assert [s["letters"] for s in data["strata"]] == [["a"], ["b", "c"], ["d", "e"]]
        assert data["strata"][0]["accesses"] == ["{b,c}", "{d,e}"]

    def test_malformed(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"alphabet": ["a"], "rules": }')
        code, _, err = run(capsys, "info", "--input", str(p))
        assert code == 2
        assert "ParseError" in err and "bad.json:1:" in err

    def test_missing_input(self, capsys):
        code, _, err = run(capsys, "info")
        assert code == 2 and "--input" in err


class TestMatrix:
    def test_tm(self, capsys):
        _, out, _ = run(capsys, "matrix", "--input", "thue_morse", "--format", "json")
        assert json.loads(out)["entries"] == [[1, 1], [1, 1]]

    def test_fib_augmented(self, capsys):
        _, out, _ = run(capsys, "matrix", "--augmented", "--input", "fibonacci", "--format", "json")
        data = json.loads(out)
        assert data["rows"] == ["a", "b", "aa", "ab", "ba", "bb"]
        assert data["entries"][2] == [0, 0, 0, 0, 1, 1]

    def test_bkms_size(self, capsys):
        _, out, _ = run(capsys, "matrix", "--augmented", "--input", "bkms", "--format", "json")
        entries = json.loads(out)["entries"]
        assert len(entries) == 30 and len(entries[0]) == 30

    def test_table_labels(self, capsys):
        _, out, _ = run(capsys, "matrix", "--augmented", "--input", "thue_morse")
        lines = out.splitlines()
        assert lines[0].split() == ["a", "b", "aa", "ab", "ba", "bb"]
        assert lines[3].split() == ["aa", "0", "0", "0", "0", "1", "0"]


class TestMeasures:
    def test_family_k1(self, capsys):
        _, out, _ = run(capsys, "measures", "--input", "family_k1", "--format", "json")
        data = json.loads(out)
        assert [m["name"] for m in data["measures"]] == ["full", "cd"]
        phi = (1 + 5 ** 0.5) / 2
        a = data["measures"][0]["values"]["a"]
        assert a == pytest.approx(3 * phi ** 3 / (11 * phi + 8), abs=1e-10)

    def test_family_k2(self, capsys):
        _, out, _ = run(capsys, "measures", "--input", "family_k2", "--format", "json")
        phi = (1 + 5 ** 0.5) / 2
        d = json.loads(out)["measures"][0]["values"]["d"]
        assert d == pytest.approx(phi / (10 * phi + 7), abs=1e-10)

    def test_family_k3(self, capsys):
        _, out, _ = run(capsys, "measures", "--input", "family_k3")
        assert out.startswith("1 ergodic measure\n")
        assert "0.6180339887" in out

    def test_exact(self, capsys):
        _, out, _ = run(capsys, "measures", "--input", "thue_morse", "--length", "2", "--exact")
        rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
        assert rows["eigenvalue"] == ["2"]
        assert rows["ab"] == ["1/3"] and rows["bb"] == ["1/6"]

    def test_exact_fallback_note(self, capsys):
        code, out, err = run(capsys, "measures", "--input", "fibonacci", "--exact")
        assert code == 0 and "irrational" in err and "0.6180339887" in out


class TestCylinder:
    def test_baabab(self, capsys):
        _, out, _ = run(capsys, "cylinder", "baabab", "--input", "thue_morse")
        assert out.splitlines()[-1].split() == ["baabab", "0.0833333333"]

    def test_baabab_exact(self, capsys):
        _, out, _ = run(capsys, "cylinder", "baabab", "--input", "thue_morse", "--exact")
        assert out.splitlines()[-1].split() == ["baabab", "1/12"]

    def test_edb(self, capsys):
        # [DERIVED] 1/108 (see the measure tests for the oracle)
        _, out, _ = run(capsys, "cylinder", "edb", "--measure", "full", "--input", "bkms", "--exact")
        assert out.splitlines()[-1].split() == ["edb", "1/108"]

    def test_fib_bb(self, capsys):
        _, out, _ = run(capsys, "cylinder", "bb", "--input", "fibonacci")
        assert out.splitlines()[-1].split() == ["bb", "0.0000000000"]

    def test_precision(self, capsys):
        _, out, _ = run(capsys, "cylinder", "a", "--input", "fibonacci", "--precision", "3")
        assert out.splitlines()[-1].split() == ["a", "0.618"]
        _, out, _ = run(capsys, "cylinder", "a", "--input", "fibonacci", "--precision", "3",
                        "--format", "json")
        assert json.loads(out)["measures"][0]["values"]["a"] == 0.618

    def test_columns_per_measure(self, capsys):
        _, out, _ = run(capsys, "cylinder", "c", "cc", "--input", "periodic_leaf")
        assert out.splitlines()[0].split() == ["word", "full", "c"]

    def test_coeffs(self, capsys):
        _, out, _ = run(capsys, "cylinder", "b", "--coeffs", "1/2,1/4,1/4", "--input", "bkms",
                        "--exact")
        assert out.splitlines()[-1].split() == ["b", "17/72"]

    def test_coeff_count(self, capsys):
        code, _, err = run(capsys, "cylinder", "b", "--coeffs", "1,0", "--input", "bkms")
        assert code == 2 and "3 measures" in err

    def test_unknown_measure(self, capsys):
        code, _, err = run(capsys, "cylinder", "b", "--measure", "zz", "--input", "bkms")
        assert code == 2 and "available" in err

    def test_invalid_letter(self, capsys):
        code, _, err = run(capsys, "cylinder", "az", "--input", "thue_morse")
        assert code == 2 and "InvalidLetter" in err

    def test_budget(self, capsys):
        code, _, err = run(capsys, "cylinder", "abbabaabbaababbabaababbaabbabaab",
                           "--input", "thue_morse", "--budget", "20")
        assert code == 3 and "BudgetExceeded" in err

    def test_precision_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["cylinder", "a", "--input", "thue_morse", "--precision", "51"])
        assert exc.value.code == 2


class TestSadic:
    def test_demo(self, capsys):
        code, out, _ = run(capsys, "sadic", "demo", "--dim", "3", "--levels", "12")
        assert code == 0
        assert "cone dimension: 3" in out and "verified" in out and "not verified" not in out

    def test_demo_B_json(self, capsys):
        _, out, _ = run(capsys, "sadic", "demo", "--dim", "2", "--levels", "40",
                        "--construction", "B", "--format", "json")
        data = json.loads(out)
        assert data["cone_dimension"] == 2 and data["weakly_primitive"]

    def test_dim_stationary(self, capsys):
        _, out, _ = run(capsys, "sadic", "dim", "--input", "thue_morse")
        assert out.strip().endswith(": 1")

    def test_dim_sequence_file(self, capsys):
        _, out, _ = run(capsys, "sadic", "dim", "--input",
                        str(fixture_path("sequences/construction_a_d3")))
        assert out.strip().endswith(": 3")

    def test_weights(self, capsys):
        _, out, _ = run(capsys, "sadic", "weights", "--level", "0", "--depth", "25",
                        "--input", "thue_morse", "--format", "json")
        w = json.loads(out)["weights"]
        assert w["aa"] == pytest.approx(1 / 6, abs=1e-6)
        assert w["ab"] == pytest.approx(1 / 3, abs=1e-6)

    def test_weights_depth(self, capsys):
        code, _, _ = run(capsys, "sadic", "weights", "--level", "5", "--depth", "5",
                         "--input", "thue_morse")
        assert code == 2


class TestCheck:
    def test_default_passes(self, capsys):
        code, out, _ = run(capsys, "check")
        assert code == 0
        assert out.splitlines()[0].startswith("PASS  oracle:")
        assert "worst=" in out

    def test_perturbed_golden(self, capsys, tmp_path):
        data = json.loads(fixture_path("golden").read_text())
        data["fixtures"]["thue_morse"]["values"][6]["value"] = "1/13"
        p = tmp_path / "golden.json"
        p.write_text(json.dumps(data))
        code, out, _ = run(capsys, "check", "--golden", str(p))
        assert code == 1
        assert "FAIL  golden:thue_morse" in out and "full[baabab]" in out

    def test_missing_golden(self, capsys, tmp_path):
        code, _, _ = run(capsys, "check", "--golden", str(tmp_path / "none.json"))
        assert code == 2


def test_deterministic(capsys):
    outs = {run(capsys, "measures", "--input", "bkms", "--length", "2")[1] for _ in range(2)}
    assert len(outs) == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sadic.cli", "info", "--input", "thue_morse"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "primitive, λ=2" in res.stdout
