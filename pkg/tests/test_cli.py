"""End-to-end CLI tests: exit codes, report content and determinism."""
import json

import pytest

from lexstab import fixtures
from lexstab.cli import main
from lexstab.p1 import DEFAULT_Z, sheaf_to_json
from lexstab.quiver import preset_to_json, rep_to_json


@pytest.fixture()
def sheaf_file(tmp_path):
    path = tmp_path / "sheaf.json"
    path.write_text(json.dumps(sheaf_to_json(fixtures.FIX_P1, DEFAULT_Z)))
    return str(path)


@pytest.fixture()
def rep_file(tmp_path):
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(rep_to_json(fixtures.a2_m_rep())))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


class TestValidate:
    def test_good_preset_exits_zero(self, tmp_path, capsys):
        path = tmp_path / "preset.json"
        path.write_text(json.dumps(preset_to_json(fixtures.CP_A2_1)))
        code, report = run(capsys, "validate", str(path))
        assert code == 0 and report["ok"]

    def test_sign_flipped_preset_exits_one(self, tmp_path, capsys):
        data = preset_to_json(fixtures.CP_A2_0)
        data["beta"] = [["-1", "0"]]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        code, report = run(capsys, "validate", str(path))
        assert code == 1 and not report["ok"] and report["offending_dims"]

    def test_malformed_file_exits_two(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == 2

    def test_missing_file_exits_two(self):
        assert main(["validate", "/nonexistent.json"]) == 2


class TestLex:
    def test_sheaf_report(self, sheaf_file, capsys):
        code, report = run(capsys, "lex", sheaf_file)
        assert code == 0
        assert [row["vector"] for row in report["factors"]] == [
            ["inf", "inf"],
            ["3", "2"],
            ["1", "0"],
        ]

    def test_quiver_report(self, rep_file, capsys):
        code, report = run(
            capsys, "lex", rep_file, "--preset", "CP-A2-1", "--t", "1,1"
        )
        assert code == 0
        assert len(report["factors"]) == 1
        assert report["factors"][0]["vector"] == ["1/2", "1/2"]
        assert report["preset"] == "CP-A2-1"

    def test_missing_preset_exits_two(self, rep_file):
        assert main(["lex", rep_file]) == 2

    def test_level_out_of_range_exits_one(self, sheaf_file):
        assert main(["lex", sheaf_file, "--level", "3", "--t", "1,1,1"]) == 1

    def test_unknown_shape_exits_two(self, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps({"foo": 1}))
        assert main(["lex", str(path)]) == 2


class TestSplit:
    def test_sheaf_split(self, tmp_path, capsys):
        path = tmp_path / "mix.json"
        data = sheaf_to_json(fixtures.FIX_P1, DEFAULT_Z)
        data["line_degrees"] = [1, -2]
        data["torsion"] = []
        path.write_text(json.dumps(data))
        code, report = run(capsys, "split", str(path))
        assert code == 0
        assert report["T"]["line_degrees"] == [1]
        assert report["F"]["line_degrees"] == [-2]
        assert report["tilted_positivity"]["ok"]
        assert report["tilted_positivity"]["value"] == "3"
        assert report["tilted_charge"] == {
            "re": "-3", "im": "3", "contract_ok": True,
        }

    def test_quiver_split_reports_hom(self, rep_file, capsys):
        code, report = run(
            capsys, "split", rep_file, "--preset", "CP-A2-0",
            "--cutoff", "1/2", "--t", "1",
        )
        assert code == 0
        assert report["T"]["dims"] == [0, 1] and report["F"]["dims"] == [1, 0]
        assert report["hom_T_F_zero"] is True


class TestScan:
    def test_wall_detection(self, tmp_path, capsys):
        path = tmp_path / "wallrep.json"
        rep = fixtures.a2_m_rep()
        path.write_text(json.dumps(rep_to_json(rep)))
        code, report = run(
            capsys, "scan", str(path), "--preset", "CP-A2-0",
            "--level", "1", "--grid", "1/2,1,2",
        )
        assert code == 0 and len(report["cells"]) == 3

    def test_grid_axis_mismatch_exits_two(self, sheaf_file):
        assert main(["scan", sheaf_file, "--grid", "1,2", "--level", "2"]) == 2

    def test_threads_do_not_change_output(self, sheaf_file, tmp_path):
        out1, out8 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        grid = "1/3,1/2,1,2;1,2"
        assert main(["scan", sheaf_file, "--grid", grid, "--out", out1]) == 0
        assert main(
            ["scan", sheaf_file, "--grid", grid, "--threads", "8", "--out", out8]
        ) == 0
        assert open(out1, "rb").read() == open(out8, "rb").read()


class TestDeterminism:
    def test_lex_byte_identical_across_runs(self, sheaf_file, tmp_path):
        outs = []
        for name in ("r1.json", "r2.json"):
            out = str(tmp_path / name)
            assert main(["lex", sheaf_file, "--out", out]) == 0
            outs.append(open(out, "rb").read())
        assert outs[0] == outs[1]


class TestAuditAndSuite:
    def test_audit_semistable_sheaf(self, tmp_path, capsys):
        path = tmp_path / "line.json"
        path.write_text(json.dumps({"line_degrees": [2]}))
        code, report = run(capsys, "audit", str(path))
        assert code == 0 and report["quadratic"] == {
            "value": "0", "nonnegative": True,
        }

    def test_audit_unstable_exits_one(self, tmp_path):
        path = tmp_path / "line2.json"
        path.write_text(json.dumps({"line_degrees": [1, 0]}))
        assert main(["audit", str(path)]) == 1

    def test_suite_small_run(self, capsys):
        code, report = run(capsys, "suite", "--count", "10")
        assert code == 0 and report["ok"]
        assert all(prop["ok"] for prop in report["properties"])
