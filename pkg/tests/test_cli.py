import json
import subprocess
import sys

import pytest

from feyncount.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def coefs(record):
    return {(r["eps"], r["g"]): r["coef"] for r in record["results"]["rows"]}


class TestSeries:
    def test_bell_squared(self, capsys):
        code, out, _ = run(capsys, "series", "--model", "bell-squared", "--eps-order", "6")
        assert code == 0
        assert coefs(json.loads(out))[(5, 0)] == "338/15"

    def test_partitions_order_zero(self, capsys):
        code, out, _ = run(capsys, "series", "--model", "partitions", "--eps-order", "0")
        assert code == 0
        assert coefs(json.loads(out)) == {(0, 0): "1"}

    def test_phi4(self, capsys):
        _, out, _ = run(capsys, "series", "--model", "phi4", "--eps-order", "2", "--g-order", "1")
        assert coefs(json.loads(out)) == {(0, 0): "1", (2, 1): "1/8"}

    def test_connected(self, capsys):
        _, out, _ = run(capsys, "series", "--model", "bell-squared", "--eps-order", "2",
                        "--connected")
        rec = json.loads(out)
        assert rec["results"]["quantity"] == "lnZ"
        assert coefs(rec) == {(1, 0): "1", (2, 0): "3/2"}

    def test_model_file(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({
            "mode": "legs-graded",
            "lines": [{"arity": "all", "amplitude": [{"coef": "1", "eps": "m", "g": 0}]}],
            "vertices": [{"arity": "all", "amplitude": [{"coef": "1", "eps": 0, "g": 0}]}],
        }))
        _, out, _ = run(capsys, "series", "--model", str(path), "--eps-order", "4")
        assert coefs(json.loads(out))[(4, 0)] == "75/8"

    def test_finiteness_exit(self, capsys, tmp_path):
        path = tmp_path / "div.json"
        path.write_text(json.dumps({
            "lines": [{"arity": "all", "amplitude": [{"coef": "1", "eps": 1}]}],
            "vertices": [{"arity": "all", "amplitude": [{"coef": "1", "g": 1}]}],
        }))
        code, out, err = run(capsys, "series", "--model", str(path), "--eps-order", "2",
                             "--g-order", "2")
        assert code == 3 and out == "" and "finiteness" in err

    def test_bad_model_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, _ = run(capsys, "series", "--model", str(path), "--eps-order", "2")
        assert code == 2
        code, _, _ = run(capsys, "series", "--model", "nope", "--eps-order", "2")
        assert code == 2


class TestSeq:
    def test_partitions(self, capsys):
        _, out, _ = run(capsys, "seq", "--name", "partitions", "--n", "6")
        assert json.loads(out)["results"]["values"] == ["1", "1", "2", "3", "5", "7", "11"]

    def test_bell_zero(self, capsys):
        _, out, _ = run(capsys, "seq", "--name", "bell", "--n", "0")
        assert json.loads(out)["results"]["values"] == ["1"]

    def test_bell_squared(self, capsys):
        _, out, _ = run(capsys, "seq", "--name", "bell-squared", "--n", "4")
        rec = json.loads(out)
        assert rec["results"]["values"] == ["1", "1", "4", "25", "225"]
        assert rec["results"]["provenance"] == "series"

    def test_stirling(self, capsys):
        _, out, _ = run(capsys, "seq", "--name", "stirling", "--n", "4")
        rows = json.loads(out)["results"]["rows"]
        assert [r["value"] for r in rows if r["n"] == 4] == ["1", "7", "6", "1"]

    def test_unknown_name(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["seq", "--name", "catalan", "--n", "3"])
        assert exc.value.code == 2


class TestVerify:
    def test_topology(self, capsys):
        code, out, _ = run(capsys, "verify", "--check", "topology-identity", "--n", "4")
        rec = json.loads(out)
        assert code == 0 and rec["status"] == "PASS"
        assert rec["results"]["details"]["t_n"] == "233"

    def test_bell_squared(self, capsys):
        code, out, _ = run(capsys, "verify", "--check", "bell-squared", "--n", "1")
        assert code == 0 and json.loads(out)["status"] == "PASS"

    def test_oracle_agreement(self, capsys):
        code, out, _ = run(capsys, "verify", "--check", "oracle-agreement", "--n", "4")
        rec = json.loads(out)
        assert code == 0 and rec["status"] == "PASS"
        assert rec["results"]["details"]["models"] == 20

    @pytest.mark.parametrize("check", ["stirling-model", "exp-log"])
    def test_others(self, capsys, check):
        code, out, _ = run(capsys, "verify", "--check", check, "--n", "4")
        assert code == 0 and json.loads(out)["status"] == "PASS"

    def test_mismatch_exit(self, capsys, monkeypatch):
        from feyncount import checks

        def broken(n):
            res = checks.CheckResult("bell-squared", n)
            res.expect(False, "forced")
            return res

        monkeypatch.setattr(checks, "check_bell_squared", broken)
        code, out, _ = run(capsys, "verify", "--check", "bell-squared", "--n", "2")
        rec = json.loads(out)
        assert code == 1 and rec["status"] == "FAIL" and rec["results"]["mismatches"] == ["forced"]


class TestEnumerate:
    def test_unlabelled_preorders(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "preorders", "--n", "4", "--unlabelled")
        assert json.loads(out)["results"]["count"] == "33"

    def test_posets_n1(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "posets", "--n", "1")
        assert json.loads(out)["results"]["count"] == "1"

    def test_diagrams(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "diagrams", "--model", "bell-squared",
                        "--n", "3")
        rec = json.loads(out)
        assert rec["results"]["count"] == "10"
        assert rec["results"]["symmetry_sum"] == "25/6"

    def test_representatives(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "posets", "--n", "3", "--connected",
                        "--unlabelled", "--representatives")
        rows = json.loads(out)["results"]["rows"]
        assert len(rows) == 3  # chain, V, and inverted V
        assert sum(int(r["orbit_size"]) for r in rows) == 12

    def test_connected_diagrams(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "diagrams", "--n", "2", "--connected",
                        "--representatives")
        rec = json.loads(out)
        assert rec["results"]["count"] == "3"
        assert all(r["connected"] for r in rec["results"]["rows"])

    def test_cap_exit(self, capsys):
        code, _, err = run(capsys, "enumerate", "--structure", "preorders", "--n", "6")
        assert code == 2 and "capped" in err
        code, _, _ = run(capsys, "enumerate", "--structure", "diagrams", "--n", "9")
        assert code == 2


class TestFormats:
    def test_csv(self, capsys):
        _, out, _ = run(capsys, "series", "--model", "phi4", "--eps-order", "2", "--g-order", "1",
                        "--format", "csv")
        assert out == "eps,g,coef\n0,0,1\n2,1,1/8\n"

    def test_table(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--structure", "posets", "--n", "4", "--format", "table")
        assert out.splitlines()[0] == "enumerate ok  count=219"

    def test_deterministic(self):
        argv = [sys.executable, "-m", "feyncount", "verify", "--check", "oracle-agreement",
                "--n", "3", "--seed", "7"]
        first = subprocess.run(argv, capture_output=True, check=True).stdout
        second = subprocess.run(argv, capture_output=True, check=True).stdout
        assert first == second and b"PASS" in first
