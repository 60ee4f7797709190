import json
import subprocess
import sys
from pathlib import Path

import pytest

from cmlattice.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def cli(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, command, fixture, *extra):
    code, out, err = cli(capsys, command, "--input", FIXTURES / fixture, "--format", "json", *extra)
    assert code == 0, err
    return json.loads(out)


def verdicts(doc):
    return {v["name"]: v["value"] for v in doc["verdicts"]}


class TestCommands:
    def test_faces(self, capsys):
        doc = report(capsys, "faces", "square_cone.yaml")
        assert len(doc["data"]["faces"]) == 10
        assert len(doc["data"]["facet_normals"]) == 4
        assert verdicts(doc) == {"simplicial": False, "normality": True}

    def test_analyze_square_boundary(self, capsys):
        v = verdicts(report(capsys, "analyze", "square_boundary.yaml"))
        assert v["cm"] is True and v["gorenstein_star"] is True
        assert v["serre_max"] == "inf"

    def test_analyze_pair_fixture(self, capsys):
        doc = report(capsys, "analyze", "square_pair.yaml")
        assert "cm" in verdicts(doc)
        assert "gorenstein_star" not in verdicts(doc)

    def test_pair(self, capsys):
        assert "cm_pair" in verdicts(report(capsys, "pair", "square_pair.yaml"))

    def test_seqcm_triangle_with_pendant_edge(self, capsys):
        doc = report(capsys, "seqcm", "triangle_pendant.yaml")
        assert doc["seqcm_routes"] == {"ext": True, "duval": True, "filtration": True}
        assert verdicts(doc)["seqcm"] is True

    def test_seqcm_two_edges(self, capsys):
        doc = report(capsys, "seqcm", "two_edges.yaml")
        assert doc["seqcm_routes"] == {"ext": False, "duval": False, "filtration": False}
        strands = {s["l"]: s["acyclic"] for s in doc["data"]["linear_strands"]}
        assert [l for l, ok in strands.items() if not ok] == [1]

    def test_psi(self, capsys):
        doc = report(capsys, "psi", "square_cone.yaml", "--point", "0,0,-1")
        assert verdicts(doc) == {"psi_member": True, "in_cone": False}

    def test_psi_inside(self, capsys):
        doc = report(capsys, "psi", "square_cone.yaml", "--point", "1,0,2")
        assert verdicts(doc)["psi_member"] is False
        assert doc["data"]["face_of_point"] == [0, 3]

    def test_gorenstein_xy(self, capsys):
        assert verdicts(report(capsys, "gorenstein", "xy_orthant2.yaml"))["gorenstein_star"] is True

    def test_localcoh0_xy(self, capsys):
        assert report(capsys, "localcoh0", "xy_orthant2.yaml")["local_coh0"] == [0, 1, 0]

    def test_nu(self, capsys):
        doc = report(capsys, "nu", "xy_orthant2.yaml")
        assert sorted((e["i"], e["face"]) for e in doc["nu_table"]) == [(0, [0]), (0, [1]), (1, [])]

    def test_regularize(self, capsys):
        doc = report(capsys, "regularize", "two_edges.yaml")
        assert verdicts(doc)["regular"] is True
        origin = next(r for r in doc["data"]["values"] if r["face"] == [])
        assert (origin["before"], origin["after"]) == (1, 2)

    def test_nu_analyze(self, capsys):
        code, out, err = cli(capsys, "nu-analyze", "--table", FIXTURES / "nu_table_two_edges.yaml",
                             "--p", 2, "--simplicial", "--format", "json")
        assert code == 0, err
        v = verdicts(json.loads(out))
        assert v["nu_depth"] == 1 and v["nu_cm"] is False and v["nu_gcm"] is True

    def test_text_format(self, capsys):
        code, out, _ = cli(capsys, "analyze", "--input", FIXTURES / "square_boundary.yaml")
        assert code == 0
        assert out.startswith("cmlattice report")
        assert "gorenstein_star" in out

    def test_field_override(self, capsys):
        doc = report(capsys, "analyze", "two_edges.yaml", "--field", "p:2")
        assert doc["field"] == "p:2"


class TestExitCodes:
    def test_missing_input(self, capsys):
        code, _, err = cli(capsys, "analyze")
        assert code == 2 and "missing-input" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = cli(capsys, "analyze", "--input", tmp_path / "nope.yaml")
        assert code == 2 and "io" in err

    def test_bad_yaml_location(self, capsys, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("schema: 1\ngenerators:\n  - [1, 0]\n  - [0, y]\ncomplex: all\n")
        code, _, err = cli(capsys, "analyze", "--input", p)
        assert code == 2 and "line 4" in err

    def test_sigma_not_contained(self, capsys, tmp_path):
        p = tmp_path / "pair.yaml"
        p.write_text("schema: 1\ngenerators: [[1, 0], [0, 1]]\n"
                     "complex: {delta_seeds: [[0]]}\nsigma: {delta_seeds: [[1]]}\n")
        code, _, err = cli(capsys, "analyze", "--input", p)
        assert code == 2 and "sigma-not-contained" in err

    def test_pair_without_sigma(self, capsys):
        code, _, err = cli(capsys, "pair", "--input", FIXTURES / "square_cone.yaml")
        assert code == 2 and "missing-sigma" in err

    def test_psi_without_point(self, capsys):
        code, _, err = cli(capsys, "psi", "--input", FIXTURES / "square_cone.yaml")
        assert code == 2 and "missing-point" in err

    def test_nu_analyze_without_assertion(self, capsys):
        code, _, err = cli(capsys, "nu-analyze", "--table", FIXTURES / "nu_table_two_edges.yaml", "--p", 2)
        assert code == 2 and "ambient-not-asserted" in err

    def test_non_normal_input(self, capsys, tmp_path):
        p = tmp_path / "nn.yaml"
        p.write_text("schema: 1\ngenerators: [[2, 0], [1, 1], [0, 1]]\ncomplex: all\nnormality_box: 2\n")
        code, _, err = cli(capsys, "faces", "--input", p)
        assert code == 2 and "not-normal" in err

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_internal_inconsistency_exits_3(self, capsys, monkeypatch):
        from cmlattice.errors import InternalInconsistency

        def boom(delta):
            raise InternalInconsistency("routes disagree")

        monkeypatch.setattr("cmlattice.cli.seq_cm", boom)
        code, _, err = cli(capsys, "seqcm", "--input", FIXTURES / "two_edges.yaml")
        assert code == 3 and "internal-inconsistency" in err


class TestSelfcheckCommand:
    def test_builtin_fixtures_pass(self, capsys):
        code, out, err = cli(capsys, "selfcheck", "--format", "json")
        assert code == 0, err
        doc = json.loads(out)
        assert doc["data"]["passed"] is True
        assert doc["data"]["failures"] == []

    def test_on_input_geometry(self, capsys):
        code, out, _ = cli(capsys, "selfcheck", "--input", FIXTURES / "pentagon_cone.yaml",
                           "--field", "q", "--format", "json")
        assert code == 0
        assert json.loads(out)["field"] == "q"


def test_console_entry_point_runs_as_a_module():
    proc = subprocess.run(
        [sys.executable, "-m", "cmlattice.cli", "psi", "--input", str(FIXTURES / "square_cone.yaml"),
         "--point", "0,0,-1", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert verdicts(json.loads(proc.stdout))["psi_member"] is True
