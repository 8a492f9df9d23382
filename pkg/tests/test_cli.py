import json

import pytest

from ballotree.main import main


class TestBuild:
    def test_match(self, capsys):
        assert main(["build", "match", "--i", "0", "--j", "1"]) == 0
        assert capsys.readouterr().out == "(0 1)\n"

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "b.tree"
        assert main(["build", "baseline", "--n", "4", "--output", str(out)]) == 0
        assert out.read_text() == "((0 1) (2 3))\n"
        assert capsys.readouterr().out == ""

    def test_lambda_against(self, capsys):
        assert main(["build", "lambda", "--i", "0", "--against", "1,2"]) == 0
        assert capsys.readouterr().out == "((0 1) (0 2))\n"

    def test_missing_parameter(self, capsys):
        assert main(["build", "psi"]) == 2
        assert "'psi' needs --n" in capsys.readouterr().err

    def test_bad_shape(self, capsys):
        assert main(["build", "baseline", "--n", "6"]) == 2
        assert "power of two" in capsys.readouterr().err

    def test_unknown_construction(self):
        with pytest.raises(SystemExit) as err:
            main(["build", "nope"])
        assert err.value.code == 2


class TestEval:
    def test_tournament_file(self, tmp_path, capsys):
        tree = tmp_path / "t.tree"
        tree.write_text("((0 1) 2)\n")
        tour = tmp_path / "t.txt"
        tour.write_text("n=3\n101\n")
        assert main(["eval", str(tree), str(tour)]) == 0
        assert capsys.readouterr().out == "2\n"

    def test_direction_with_bindings(self, tmp_path, capsys):
        tree = tmp_path / "add.tree"
        assert main(["build", "add", "--output", str(tree)]) == 0
        capsys.readouterr()
        assert main(["eval", str(tree), "--direction", "clockwise", "--bind", "X=1", "--bind", "Y=1"]) == 0
        assert capsys.readouterr().out == "2\n"

    def test_unbound_variable(self, tmp_path, capsys):
        tree = tmp_path / "v.tree"
        tree.write_text("(X 1)\n")
        assert main(["eval", str(tree), "--direction", "clockwise"]) == 2
        assert "unbound variable 'X'" in capsys.readouterr().err

    def test_needs_exactly_one_tournament(self, tmp_path, capsys):
        tree = tmp_path / "v.tree"
        tree.write_text("(0 1)\n")
        assert main(["eval", str(tree)]) == 2

    def test_parse_error_shows_caret(self, tmp_path, capsys):
        tree = tmp_path / "bad.tree"
        tree.write_text("(0 1 2)")
        assert main(["eval", str(tree), "--direction", "clockwise"]) == 2
        err = capsys.readouterr().err
        assert "(at position 5)" in err
        assert err.rstrip().endswith("^")

    def test_bad_tournament_file(self, tmp_path, capsys):
        tree = tmp_path / "t.tree"
        tree.write_text("(0 1)\n")
        tour = tmp_path / "t.txt"
        tour.write_text("n=3\n10\n")
        assert main(["eval", str(tree), str(tour)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["eval", str(tmp_path / "absent.tree"), "--direction", "clockwise"]) == 2


class TestVerify:
    def test_pass_json(self, capsys):
        argv = ["verify", "baseline", "--n", "4", "--jobs", "1", "--json"]
        assert main(argv) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["schema"] == "ballotree.report/1"
        assert report["passed"] is True
        assert report["argv"] == ["ballotree", *argv]
        assert report["observed"]["min_winner_outdegree"] == 2

    def test_failure_exit_code(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["verify", "manipulator", "--n", "4", "--anchor", "0", "--jobs", "1",
                     "--output", str(out)]) == 1
        report = json.loads(out.read_text())
        assert report["passed"] is False
        assert report["witness"]["pm_spec"].startswith("alpha=")
        assert "❌" in capsys.readouterr().out

    def test_guarantee_on_tree_file(self, tmp_path, capsys):
        tree = tmp_path / "b.tree"
        tree.write_text("((0 1) (2 3))\n")
        assert main(["verify", "guarantee", "--tree", str(tree), "--n", "4", "--k", "2", "--jobs", "1"]) == 0
        assert main(["verify", "guarantee", "--tree", str(tree), "--n", "4", "--k", "3", "--jobs", "1"]) == 1

    def test_guarantee_default_omega(self, capsys):
        assert main(["verify", "guarantee", "--k", "2", "--jobs", "1"]) == 0

    def test_scale_guard(self, capsys):
        assert main(["verify", "phi", "--n", "16", "--jobs", "1"]) == 2
        assert "exceeds the limit" in capsys.readouterr().err

    def test_gates(self, capsys):
        assert main(["verify", "gates", "--samples", "3", "--jobs", "1"]) == 0


class TestCompile:
    def test_tree_to_stdout(self, capsys):
        assert main(["compile", "x"]) == 0
        assert capsys.readouterr().out == "x\n"

    def test_table(self, capsys):
        assert main(["compile", "x*y", "--table"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0].split() == ["direction", "x", "y", "output"]
        assert len(lines) == 19
        assert "(" not in out

    def test_table_with_output(self, tmp_path, capsys):
        out = tmp_path / "sq.tree"
        assert main(["compile", "x^2", "--table", "--output", str(out)]) == 0
        assert out.read_text().endswith("\n")

    def test_undeclared_variable(self, capsys):
        assert main(["compile", "x + y", "--vars", "x"]) == 2
        assert "undeclared variable 'y'" in capsys.readouterr().err

    def test_syntax_error(self, capsys):
        assert main(["compile", "x +"]) == 2
        assert "(at position 3)" in capsys.readouterr().err


class TestStats:
    def test_text(self, tmp_path, capsys):
        tree = tmp_path / "t.tree"
        tree.write_text("(def @0 (0 1))\n(@0 @0)\n")
        assert main(["stats", str(tree)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == ["Leaves:      4", "Depth:       2", "DAG nodes:   4"]

    def test_deep_tree(self, tmp_path, capsys):
        tree = tmp_path / "cat.tree"
        tree.write_text("(" * 2099 + "0 1)" + " 2)" * 2098 + "\n")
        assert main(["stats", str(tree)]) == 0
        assert capsys.readouterr().out.splitlines()[1] == "Depth:       2099"

    def test_json(self, tmp_path, capsys):
        tree = tmp_path / "t.tree"
        tree.write_text("((0 1) 2)\n")
        assert main(["stats", str(tree), "--json"]) == 0
        assert json.loads(capsys.readouterr().out) == {"leaf_count": "3", "depth": 2, "dag_nodes": 5}


def test_no_command(capsys):
    assert main([]) == 2
