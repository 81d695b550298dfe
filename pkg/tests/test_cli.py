from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from swanbound import cli
from swanbound.errors import IntegralityFailure

GAUSS = {"p": 5, "a": 1, "curve": {"type": "p1"}, "boundary": [{"type": "infinite"}],
         "f": {"num": [0, 0, 1]}}
KLOOSTERMAN = {"p": 3, "curve": {"type": "p1"},
               "boundary": [{"type": "finite", "x": 0}, {"type": "infinite"}],
               "f": {"terms": [[1, 1], [-1, 1]]}}
HYPERELLIPTIC = {"p": 3, "curve": {"type": "hyperelliptic", "h": [0, 1, 0, 0, 0, 1]},
                 "boundary": [{"type": "infinite"}], "f": {"u": {"num": [0, 1]}}}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *args) -> tuple[int, str]:
    code = cli.main(list(args))
    return code, capsys.readouterr().out


def one_json(out: str) -> dict:
    lines = out.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


class TestVerify:
    def test_gauss_exit_zero(self, tmp_path, capsys):
        code, out = run(capsys, "verify", write(tmp_path, "g.json", GAUSS))
        rep = one_json(out)
        assert code == 0 and rep["attained"] is True
        assert rep["newton"] == [[1, 2, 1]]
        jsonschema.validate(rep, cli.load_schema("report"))

    def test_even_characteristic(self, tmp_path, capsys):
        code, out = run(capsys, "verify", write(tmp_path, "p2.json", {**GAUSS, "p": 2}))
        assert code == 2 and one_json(out)["error"]["type"] == "RejectEvenChar"

    def test_missing_pole(self, tmp_path, capsys):
        cfg = {**KLOOSTERMAN, "boundary": [{"type": "infinite"}]}
        code, out = run(capsys, "verify", write(tmp_path, "pole.json", cfg))
        assert code == 2 and one_json(out)["error"]["type"] == "PoleOnV"

    @pytest.mark.parametrize("bad", [
        {"p": 3},
        {**GAUSS, "curve": {"type": "elliptic"}},
        {**GAUSS, "boundary": [{"type": "finite"}]},
        {**GAUSS, "extra": 1},
    ])
    def test_schema_violations(self, tmp_path, capsys, bad):
        code, out = run(capsys, "verify", write(tmp_path, "bad.json", bad))
        assert code == 2 and one_json(out)["error"]["type"] == "ConfigError"

    def test_unreadable_file(self, tmp_path, capsys):
        code, out = run(capsys, "verify", str(tmp_path / "missing.json"))
        assert code == 2
        (tmp_path / "junk.json").write_text("{not json")
        code, out = run(capsys, "verify", str(tmp_path / "junk.json"))
        assert code == 2

    def test_red_alert(self, tmp_path, capsys, monkeypatch):
        def boom(*a, **k):
            raise IntegralityFailure("coefficient b_1 is not integral")

        monkeypatch.setattr(cli, "verify_bound", boom)
        code, out = run(capsys, "verify", write(tmp_path, "g.json", GAUSS))
        rep = one_json(out)
        assert code == 1 and rep["alert"]["type"] == "IntegralityFailure"

    def test_deterministic_output(self, tmp_path, capsys):
        path = write(tmp_path, "k.json", {**KLOOSTERMAN, "options": {"cover": True}})
        first = run(capsys, "verify", path, "--jobs", "3")
        second = run(capsys, "verify", path)
        assert first == second and first[0] == 0

    def test_out_and_csv(self, tmp_path, capsys):
        out_path, csv_path = tmp_path / "r.json", tmp_path / "r.csv"
        code, out = run(capsys, "verify", write(tmp_path, "h.json", HYPERELLIPTIC),
                        "--out", str(out_path), "--csv", str(csv_path), "--slack", "4")
        assert code == 0 and out == ""
        rep = json.loads(out_path.read_text())
        assert rep["degree_rho"] == 5
        rows = csv_path.read_text().splitlines()
        assert rows[0] == "polygon,x,y" and "newton,2,0" in rows

    def test_budget_flag(self, tmp_path, capsys):
        code, out = run(capsys, "verify", write(tmp_path, "g.json", GAUSS), "--budget", "10")
        assert code == 2 and one_json(out)["error"]["type"] == "BudgetExceeded"

    def test_cover_and_oracle_options(self, tmp_path, capsys):
        cfg = {**KLOOSTERMAN, "options": {"cover": True, "oracle": True}}
        code, out = run(capsys, "verify", write(tmp_path, "k.json", cfg))
        rep = one_json(out)
        assert code == 0
        assert rep["cover"]["P_C"] == [1, -2, 7, -6, 9]
        assert rep["oracle"]["match"] is True


class TestSweep:
    def template(self):
        return {"p": 5, "curve": {"type": "p1"},
                "boundary": [{"type": "finite", "x": 0}, {"type": "infinite"}],
                "f": {"terms": [["$d", 1]]}}

    def test_monomial_sweep(self, tmp_path, capsys):
        cfg = {"template": self.template(), "grid": {"d": [1, 2, 3, 4, 6]}}
        code, out = run(capsys, "sweep", write(tmp_path, "s.json", cfg), "--jobs", "2")
        rows = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and len(rows) == 6
        assert [r["params"]["d"] for r in rows[:5]] == [1, 2, 3, 4, 6]
        summary = rows[-1]["summary"]
        assert summary["cases"] == 5 and summary["ok"] == 5
        attained = {k: v["attained"] for k, v in summary["attainment"].items()}
        assert attained == {"p=5;p mod d=0/1": 1, "p=5;p mod d=1/2": 1, "p=5;p mod d=1/4": 1,
                            "p=5;p mod d=2/3": 0, "p=5;p mod d=5/6": 0}

    def test_empty_sweep(self, tmp_path, capsys):
        for grid in ({"d": []}, {}):
            code, out = run(capsys, "sweep", write(tmp_path, "s.json", {"template": self.template(), "grid": grid}))
            rows = [json.loads(line) for line in out.splitlines()]
            assert code == 0 and len(rows) == 1 and rows[0]["summary"]["cases"] == 0

    def test_malformed_case_flagged(self, tmp_path, capsys):
        tpl = {**self.template(), "p": "$p"}
        cfg = {"template": tpl, "grid": {"p": [3, 2], "d": [1]}}
        code, out = run(capsys, "sweep", write(tmp_path, "s.json", cfg))
        rows = [json.loads(line) for line in out.splitlines()]
        assert code == 2
        assert [r["status"] for r in rows[:2]] == ["ok", "input_error"]
        assert rows[-1]["summary"]["input_errors"] == 1

    def test_unknown_placeholder(self, tmp_path, capsys):
        cfg = {"template": self.template(), "grid": {"e": [1]}}
        code, out = run(capsys, "sweep", write(tmp_path, "s.json", cfg))
        rows = [json.loads(line) for line in out.splitlines()]
        assert code == 2 and rows[0]["status"] == "input_error"

    def test_alert_sets_exit_one(self, tmp_path, capsys, monkeypatch):
        calls = []

        def flaky(*a, **k):
            calls.append(1)
            raise IntegralityFailure("synthetic")

        monkeypatch.setattr(cli, "verify_bound", flaky)
        cfg = {"template": self.template(), "grid": {"d": [1, 2]}}
        code, out = run(capsys, "sweep", write(tmp_path, "s.json", cfg))
        assert code == 1 and len(calls) == 2


class TestOracle:
    def test_kloosterman(self, tmp_path, capsys):
        code, out = run(capsys, "oracle", write(tmp_path, "k.json", KLOOSTERMAN))
        rep = one_json(out)
        assert code == 0 and rep["match"] is True
        assert rep["lfun_vertices"] == [[0, "0"], [1, "0"]]

    def test_quartic(self, tmp_path, capsys):
        cfg = {"p": 3, "curve": {"type": "p1"}, "boundary": [{"type": "infinite"}],
               "f": {"num": [0, 1, 0, 0, 1]}}
        code, out = run(capsys, "oracle", write(tmp_path, "q.json", cfg))
        assert code == 0 and one_json(out)["match"] is True

    def test_mismatch_is_red_alert(self, tmp_path, capsys, monkeypatch):
        real = cli.oracle_compare

        def broken(*a, **k):
            rep = real(*a, **k)
            rep.match = False
            return rep

        monkeypatch.setattr(cli, "oracle_compare", broken)
        code, out = run(capsys, "oracle", write(tmp_path, "k.json", KLOOSTERMAN))
        assert code == 1 and one_json(out)["alert"]["type"] == "OracleMismatch"

    @pytest.mark.parametrize("cfg", [
        HYPERELLIPTIC,
        {**GAUSS, "a": 2},
        {**GAUSS, "boundary": [{"type": "finite", "x": 1}, {"type": "infinite"}]},
        {**GAUSS, "f": {"num": [1], "den": [1, 1]}},
    ])
    def test_out_of_scope(self, tmp_path, capsys, cfg):
        code, out = run(capsys, "oracle", write(tmp_path, "x.json", cfg))
        assert code == 2 and one_json(out)["error"]["type"] == "ScopeError"


class TestPolygonCommands:
    def test_lies_above_kloosterman(self, tmp_path, capsys):
        newton = write(tmp_path, "n.json", [[0, 1, 1], [1, 1, 1]])
        hodge = write(tmp_path, "h.json", [[0, 1, 1], [1, 1, 1]])
        code, out = run(capsys, "polygon", "lies_above", newton, hodge)
        assert code == 0 and one_json(out) == {"lies_above": True}

    def test_hull(self, tmp_path, capsys):
        pts = write(tmp_path, "p.json", [[0, 0], [1, 1], [2, "1"]])
        code, out = run(capsys, "polygon", "hull", pts, "--csv", str(tmp_path / "v.csv"))
        assert code == 0 and one_json(out)["slopes"] == [[1, 2, 2]]
        assert (tmp_path / "v.csv").read_text().splitlines() == ["x,y_num,y_den", "0,0,1", "2,1,1"]

    def test_concat_truncate_scale(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", [[0, 1, 1]])
        b = write(tmp_path, "b.json", [[1, 2, 2], [1, 1, 1]])
        assert one_json(run(capsys, "polygon", "concat", a, b)[1])["slopes"] == [[0, 1, 1], [1, 2, 2], [1, 1, 1]]
        assert one_json(run(capsys, "polygon", "truncate", b, "--below", "1")[1])["slopes"] == [[1, 2, 2]]
        assert one_json(run(capsys, "polygon", "scale", b, "--by", "2")[1])["slopes"] == [[1, 2, 4], [1, 1, 2]]

    @pytest.mark.parametrize("args", [
        ["scale", "b.json", "--by", "1/2"],
        ["scale", "b.json"],
        ["truncate", "b.json", "--below", "0"],
        ["hull", "bad.json"],
        ["lies_above", "b.json"],
    ])
    def test_failures(self, tmp_path, capsys, args):
        write(tmp_path, "b.json", [[1, 2, 2], [1, 1, 1]])
        write(tmp_path, "bad.json", [[0, "x"]])
        args = [str(tmp_path / a) if a.endswith(".json") else a for a in args]
        code, out = run(capsys, "polygon", *args)
        assert code == 2 and "error" in one_json(out)


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "g.json", GAUSS)
    proc = subprocess.run([sys.executable, "-m", "swanbound", "verify", path],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["attained"] is True
    assert "exit 0" in proc.stderr
