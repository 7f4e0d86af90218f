"""End-to-end checks of the command-line front door: JSON documents in,
one sorted-keys JSON document on stdout, exit codes 0/2/3."""

import json
import subprocess
import sys

import pytest
from pytest import raises as assert_raises

from coneq.cli import main


def _write(root, name, payload):
    path = root / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture(scope="module")
def docs(tmp_path_factory):
    """One shared directory of well-formed and deliberately broken documents."""
    root = tmp_path_factory.mktemp("cli_docs")
    good = {
        "D3.json": {"entries": [[0, 0, 0], [0, 1, 0], [0, 0, 2]]},
        "T.json": {"entries": [[2, 0], [1, 1]]},
        "U.json": {"entries": [[1, 1], [0, 1]]},
        "I2.json": {"entries": [[1, 0], [0, 1]]},
        "tenth.json": {"entries": [[0.1]]},
        "e1.json": {"entries": [1, 0]},
        "e2.json": {"entries": [0, 1]},
        "e1_3.json": {"entries": [1, 0, 0]},
        "e3.json": {"entries": [0, 0, 1]},
        "x12.json": {"entries": [1, 2]},
    }
    paths = {name: _write(root, name, payload) for name, payload in good.items()}
    paths["badkey.json"] = _write(root, "badkey.json", {"entries": [[1]], "name": "x"})
    paths["badn.json"] = _write(root, "badn.json", {"entries": [[1, 0], [0, 1]], "n": 3})
    paths["bool.json"] = _write(root, "bool.json", {"entries": [[1, True], [0, 1]]})
    paths["neg.json"] = _write(root, "neg.json", {"entries": [[1, -1], [0, 1]]})
    broken = root / "broken.json"
    broken.write_text("not json")
    paths["broken.json"] = str(broken)
    paths["missing.json"] = str(root / "missing.json")
    return paths


def run_cli(capsys, argv):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert code == 0, err
    assert err == ""
    lines = out.splitlines()
    assert len(lines) == 1  # exactly one JSON document
    return json.loads(lines[0])


class TestDocumentPlumbing:
    @pytest.mark.parametrize(
        "name",
        ["badkey.json", "badn.json", "bool.json", "neg.json", "broken.json", "missing.json"],
    )
    def test_bad_matrix_documents(self, capsys, docs, name):
        code, out, err = run_cli(capsys, ["analyze", docs[name]])
        assert code == 2
        assert out == ""
        assert err.startswith("error: ")

    def test_unknown_key_named_in_message(self, capsys, docs):
        _, _, err = run_cli(capsys, ["analyze", docs["badkey.json"]])
        assert "unknown matrix keys ['name']" in err

    def test_vector_length_mismatch(self, capsys, docs):
        code, _, err = run_cli(
            capsys, ["solve1", "--lambda", "1", "--b", docs["e1.json"], docs["D3.json"]]
        )
        assert code == 2
        assert "vector length 2 != matrix size 3" in err

    def test_decimal_literal_is_exact_in_rational_mode(self, capsys, docs):
        # 0.1 must come through as 1/10, not the nearest double
        doc = run_json(capsys, ["analyze", docs["tenth.json"]])
        assert doc["taxonomy"]["radii"] == ["1/10"]
        doc = run_json(capsys, ["--mode", "float", "analyze", docs["tenth.json"]])
        assert doc["taxonomy"]["radii"] == [0.1]


class TestSolve1:
    def test_unsolvable_between_class_radii(self, capsys, docs):
        doc = run_json(
            capsys, ["solve1", "--lambda", "1", "--b", docs["e3.json"], docs["D3.json"]]
        )
        assert doc == {
            "eigen_freedom": [1],
            "fired_condition": "h",
            "residual_norm": None,
            "rho_b": 2,
            "solvable": False,
            "unique": None,
            "witness_class": 0,
            "x0": None,
        }

    def test_solvable_with_eigen_freedom(self, capsys, docs):
        doc = run_json(
            capsys, ["solve1", "--lambda", "1", "--b", docs["e1_3.json"], docs["D3.json"]]
        )
        assert doc == {
            "eigen_freedom": [1],
            "fired_condition": "g",
            "residual_norm": 0,
            "rho_b": 0,
            "solvable": True,
            "unique": False,
            "witness_class": None,
            "x0": [1, 0, 0],
        }

    def test_float_mode_reports_float_scalars(self, capsys, docs):
        doc = run_json(
            capsys,
            ["--mode", "float", "solve1", "--lambda", "1", "--b", docs["e3.json"], docs["D3.json"]],
        )
        assert doc["solvable"] is False
        assert isinstance(doc["rho_b"], float)
        assert doc["rho_b"] == 2.0


class TestSolve2:
    def test_above_regime(self, capsys, docs):
        doc = run_json(
            capsys, ["solve2", "--lambda", "2", "--b", docs["e2.json"], docs["T.json"]]
        )
        assert doc == {
            "certificate": "cor4_2",
            "regime": "above",
            "rho_b": 1,
            "solvable": True,
            "spectral_pair_of_x": {"order": 1, "rho": 2},
            "x": [1, 0],
        }

    def test_at_regime(self, capsys, docs):
        doc = run_json(
            capsys, ["solve2", "--lambda", "1", "--b", docs["e1.json"], docs["U.json"]]
        )
        assert doc == {
            "certificate": "lp",
            "regime": "at",
            "rho_b": 1,
            "solvable": True,
            "spectral_pair_of_x": {"order": 2, "rho": 1},
            "x": [0, 1],
        }

    def test_zero_shift_rejected(self, capsys, docs):
        code, _, err = run_cli(
            capsys, ["solve2", "--lambda", "0", "--b", docs["e1.json"], docs["U.json"]]
        )
        assert code == 2
        assert err == "error: the shift must be strictly positive\n"


class TestCwAndAlt:
    def test_numbers_with_x(self, capsys, docs):
        doc = run_json(capsys, ["cw", "--x", docs["x12.json"], docs["T.json"]])
        assert doc == {"R_upper": 2, "r_lower": "3/2", "rho_x": 2}

    def test_set_extrema_without_x(self, capsys, docs):
        doc = run_json(capsys, ["cw", docs["T.json"]])
        assert doc == {
            "inf_sigma": 1,
            "inf_sigma1": 2,
            "inf_sigma1_attained": True,
            "sup_omega": 2,
            "sup_omega1": 2,
        }

    def test_alternating_length(self, capsys, docs):
        doc = run_json(
            capsys, ["alt", "--shift", "1", "--x", docs["e2.json"], docs["U.json"]]
        )
        assert doc == {"iterates_checked": 2, "kind": "finite", "value": 2}


class TestAnalyze:
    def test_identity_two_final_basic_classes(self, capsys, docs):
        doc = run_json(capsys, ["analyze", docs["I2.json"]])
        assert doc == {
            "access": [[True, False], [False, True]],
            "classes": [[2], [1]],
            "faces": [
                {"eigenvalue": 1, "eigenvector_face": [1, 2], "necessary_face": []}
            ],
            "spectral": {
                "class_radii": [1, 1],
                "distinguished_eigenvalues": [1],
                "index": {"1": 1},
                "max_distinguished_order": {"1": 1},
                "rho": 1,
            },
            "taxonomy": {
                "basic": [True, True],
                "distinguished": [True, True],
                "distinguished_transpose": [True, True],
                "final": [True, True],
                "initial": [True, True],
                "radii": [1, 1],
                "rho": 1,
                "semi_distinguished": [True, True],
            },
        }


class TestCheck:
    # (property, matrix, exact payload) — small instances where every suite
    # runs in milliseconds and the expected report is known in full
    CASES = [
        ("thm3.1", "T.json", {"cases": 12, "counterexample": None, "pass": True}),
        ("cor4.2", "T.json", {"cases": 7, "counterexample": None, "pass": True}),
        (
            "thm4.13",
            "T.json",
            {
                "issues": [],
                "necessary_face": [2],
                "pass": True,
                "probe": [2],
                "tracedown_witnesses": 1,
            },
        ),
        (
            "cor4.20",
            "T.json",
            {"counterexample": None, "pass": True, "samples": ["5/4", "3/2", "7/4"]},
        ),
        ("thm5.10", "U.json", {"lp_agrees": True, "pass": True, "rho_in_sigma1": False}),
        ("thm5.10", "I2.json", {"lp_agrees": True, "pass": True, "rho_in_sigma1": True}),
        ("thm5.11", "I2.json", {"a": True, "b": True, "c": True, "pass": True}),
        ("cor6.4", "U.json", {"cases": 3, "counterexample": None, "pass": True}),
        (
            "cor4.8-gap",
            "U.json",
            {"cases": 3, "counterexample": None, "gap_examples": 0, "pass": True},
        ),
    ]

    @pytest.mark.parametrize("prop,matrix,expected", CASES)
    def test_property_reports(self, capsys, docs, prop, matrix, expected):
        doc = run_json(capsys, ["check", "--property", prop, docs[matrix]])
        assert doc == expected

    def test_rational_only_suites_reject_float_mode(self, capsys, docs):
        code, _, err = run_cli(
            capsys, ["--mode", "float", "check", "--property", "thm4.13", docs["U.json"]]
        )
        assert code == 2
        assert "rational mode only" in err

    def test_unknown_property_is_a_usage_error(self, capsys, docs):
        with assert_raises(SystemExit) as exc:
            main(["check", "--property", "nope", docs["U.json"]])
        assert exc.value.code == 2

    def test_missing_required_flag_is_a_usage_error(self, capsys, docs):
        with assert_raises(SystemExit) as exc:
            main(["solve1", "--lambda", "1", docs["D3.json"]])
        assert exc.value.code == 2


class TestOutputDiscipline:
    def test_byte_stable_reruns(self, capsys, docs):
        _, first, _ = run_cli(capsys, ["analyze", docs["T.json"]])
        _, second, _ = run_cli(capsys, ["analyze", docs["T.json"]])
        assert first == second
        doc = json.loads(first)
        assert first == json.dumps(doc, sort_keys=True) + "\n"

    def test_module_entry_point(self, docs):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "coneq.cli",
                "solve1",
                "--lambda",
                "1",
                "--b",
                docs["e3.json"],
                docs["D3.json"],
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        doc = json.loads(proc.stdout)
        assert doc["solvable"] is False
        assert doc["rho_b"] == 2
