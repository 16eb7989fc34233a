import json
import os
import re
from pathlib import Path

import pytest

import ramseykit as rk
from ramseykit import io as rio
from ramseykit.cli import main

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


class TestStructureFormat:
    def test_documented_example(self):
        text = ("signature R/2 S/1\n"
                "structure size=5\n"
                "R: (0,1) (1,2)\n"
                "S: (3)\n")
        s = rio.parse_structure(text)
        assert s.size == 5
        assert s.relation("R") == frozenset({(0, 1), (1, 2)})
        assert s.relation("S") == frozenset({(3,)})
        assert rio.serialize_structure(s) == text

    def test_round_trip_normalizes(self):
        messy = "signature R/2\nstructure size=3\nR: (2,1) (0,1)\n"
        s = rio.parse_structure(messy)
        assert rio.serialize_structure(s) == \
            "signature R/2\nstructure size=3\nR: (0,1) (2,1)\n"

    def test_omitted_relation_is_empty(self):
        s = rio.parse_structure("signature R/2 S/1\nstructure size=2\n")
        assert s.relation("R") == frozenset()
        assert s.relation("S") == frozenset()

    def test_out_of_range_reports_line(self):
        bad = "signature R/2\nstructure size=2\nR: (0,5)\n"
        with pytest.raises(rio.FormatError) as err:
            rio.parse_structure(bad)
        assert err.value.line == 3

    def test_arity_mismatch_reports_line(self):
        bad = "signature R/2\nstructure size=3\nR: (0,1,2)\n"
        with pytest.raises(rio.FormatError) as err:
            rio.parse_structure(bad)
        assert err.value.line == 3

    def test_bad_header(self):
        with pytest.raises(rio.FormatError):
            rio.parse_structure("structure size=3\n")


class TestOtherFormats:
    def test_coloring_round_trip(self):
        verdict = rk.arrow_check(rk.chain(5), rk.chain(3), rk.chain(2), 2, 1)
        text = rio.serialize_coloring(verdict.witness)
        back = rio.parse_coloring(text, rk.chain(5), rk.chain(2))
        assert back == verdict.witness
        assert rio.serialize_coloring(back) == text

    def test_tree_round_trip(self):
        w = rk.build_w0(21)
        text = rio.serialize_tree_set(w)
        assert text.splitlines()[0] == "e"
        assert rio.parse_tree_set(text) == w

    def test_sequence_round_trip(self):
        seq = rk.StructureSequence.chains(2, 3, prefix=(rk.chain(1), rk.chain(2)))
        text = rio.serialize_sequence(seq)
        back = rio.parse_sequence(text)
        assert back == seq
        assert rio.serialize_sequence(back) == text

    def test_elements(self):
        els = rio.parse_elements("const 3\nmin\nmax\nscaled 1/3\nconst 0 prefix 0 1\n")
        assert els[0] == rk.UltraElement.const_index(3)
        assert els[1] == rk.UltraElement.minimum()
        assert els[2] == rk.UltraElement.maximum()
        assert els[3] == rk.UltraElement.scaled(1, 3)
        assert els[4].prefix == (0, 1)

    def test_coloring_rules(self):
        code = rk.canonical_code(rk.chain(2)).hex()
        cc = rio.parse_coloring_rules(
            f"colorings k=3 pattern={code} exclude=0,2\nrule perturbed 1 4:0\n",
            rk.SIG_ORDER)
        assert cc.k == 3 and cc.excluded == frozenset({0, 2})
        assert cc.rule == rk.PerturbedConstantColoring(1, ((4, 0),))

    def test_formula_round_trip(self):
        text = "(exists (x0 x1) (and (rel lt x0 x1) (not (eq x0 x1))))"
        phi = rio.parse_formula(text)
        assert rio.format_formula(phi) == text

    def test_formula_errors(self):
        with pytest.raises(rio.FormatError):
            rio.parse_formula("(exists (x0) (rel lt x0")
        with pytest.raises(rio.FormatError):
            rio.parse_formula("(frobnicate x0)")

    def test_corpus_files_round_trip(self):
        for path in sorted(DATA.glob("*.struct")):
            text = path.read_text()
            s = rio.parse_structure(text)
            assert rio.serialize_structure(s) == text
        for path in sorted(DATA.glob("*.tree")):
            text = path.read_text()
            assert rio.serialize_tree_set(rio.parse_tree_set(text)) == text
        for path in sorted(DATA.glob("*.seq")):
            text = path.read_text()
            assert rio.serialize_sequence(rio.parse_sequence(text)) == text


class TestRunReport:
    def test_json_round_trip(self):
        rep = rio.RunReport("arrow-check", {"k": 2}, {"a.struct": "00ff"},
                            {"holds": True}, elapsed_s=0.25)
        back = rio.RunReport.from_json(rep.to_json())
        assert back == rep


class TestCli:
    def file(self, name):
        return str(DATA / name)

    def test_arrow_check_exit_codes(self, tmp_path):
        assert main(["arrow-check", "--ambient", self.file("chain6.struct"),
                     "--big", self.file("chain3.struct"),
                     "--small", self.file("chain2.struct"),
                     "-k", "2", "-l", "1"]) == 0
        assert main(["arrow-check", "--ambient", self.file("chain5.struct"),
                     "--big", self.file("chain3.struct"),
                     "--small", self.file("chain2.struct"),
                     "-k", "2", "-l", "1",
                     "--witness", str(tmp_path / "w.col")]) == 1
        witness = (tmp_path / "w.col").read_text()
        assert witness.startswith("coloring k=2")

    def test_missing_file_is_usage_error(self):
        assert main(["arrow-check", "--ambient", "/nonexistent.struct",
                     "--big", self.file("chain3.struct"),
                     "--small", self.file("chain2.struct"),
                     "-k", "2", "-l", "1"]) == 2

    def test_malformed_file_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.struct"
        bad.write_text("signature R/2\nstructure size=2\nR: (0,9)\n")
        assert main(["arrow-check", "--ambient", str(bad),
                     "--big", self.file("chain3.struct"),
                     "--small", self.file("chain2.struct"),
                     "-k", "2", "-l", "1"]) == 2

    def test_devlin_enumerate_prints_two_codes(self, capsys):
        assert main(["devlin-enumerate", "-n", "2"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 3  # two codes plus the summary line
        assert "2 Devlin embedding types" in out[-1]

    def test_w0_check(self, tmp_path):
        assert main(["w0", "--depth", "30", "--check",
                     "--out", str(tmp_path / "w.tree")]) == 0

    def test_ultra_eval(self):
        assert main(["ultra-eval", "--seq", self.file("growing.seq"),
                     "--formula", self.file("pair_exists.qf"),
                     "--horizon", "20"]) == 0

    def test_report_determinism(self, tmp_path):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for rpath in (r1, r2):
            assert main(["devlin-enumerate", "-n", "2",
                         "--report", str(rpath)]) == 0
        d1 = json.loads(r1.read_text())
        d2 = json.loads(r2.read_text())
        d1.pop("elapsed_s")
        d2.pop("elapsed_s")
        assert d1 == d2

    def test_report_contents(self, tmp_path):
        rpath = tmp_path / "r.json"
        assert main(["arrow-check", "--ambient", self.file("chain6.struct"),
                     "--big", self.file("chain3.struct"),
                     "--small", self.file("chain2.struct"),
                     "-k", "2", "-l", "1", "--report", str(rpath)]) == 0
        rep = rio.RunReport.from_json(rpath.read_text())
        assert rep.subcommand == "arrow-check"
        assert rep.result["holds"] is True
        assert len(rep.inputs) == 3
        for digest in rep.inputs.values():
            assert re.fullmatch(r"[0-9a-f]{64}", digest)

    def test_transfer_shadow_cli(self):
        assert main(["transfer-shadow", "--seq", self.file("growing.seq"),
                     "-A", self.file("chain2.struct"),
                     "-B", self.file("chain3.struct"),
                     "-k", "2", "-d", "1", "--horizon", "20"]) == 0

    def test_ultra_color_cli(self):
        assert main(["ultra-color", "--seq", self.file("growing.seq"),
                     "--colorings", self.file("constant1.rule"),
                     "--copy", self.file("pair.elem"),
                     "--horizon", "25"]) == 0

    def test_chain_build_cli(self):
        assert main(["chain-build", "--class", "chains", "--length", "5"]) == 0

    def test_degree_search_cli(self, tmp_path):
        assert main(["degree-search", "--small", self.file("chain2.struct"),
                     "--big", self.file("chain3.struct"),
                     "--class", "chains", "-k", "2",
                     "--lmax", "1", "--size-cap", "6",
                     "--out", str(tmp_path / "c.struct")]) == 0
        assert rio.parse_structure((tmp_path / "c.struct").read_text()) == rk.chain(6)

    def test_tree_prune_cli(self, tmp_path):
        w = tmp_path / "w.tree"
        assert main(["w0", "--depth", "30", "--out", str(w)]) == 0
        assert main(["tree-prune", "--in", str(w), "--levels", "2",
                     "--out", str(tmp_path / "z.tree")]) == 0
        pruned = rio.parse_tree_set((tmp_path / "z.tree").read_text())
        assert len(pruned) == 7

    def test_devlin_color_cli(self, tmp_path, capsys):
        t = tmp_path / "pair.tree"
        t.write_text("0\n10\n")
        assert main(["devlin-color", "--set", str(t), "-n", "2"]) == 0
        assert capsys.readouterr().out.strip() in {"0", "1"}
