import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from gal.main import cli, run_cli
from gal.schemas import (
    CentralSolveResult,
    DiagnosticsReport,
    FitResult,
    IndecomposabilityReport,
    IntertwinerWitness,
    IsoResult,
    LawReport,
    ModuleCheckResult,
    QTransformResult,
    SolveOutcome,
)
from tests.test_expr_parser import MALFORMED

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def invoke(runner: CliRunner, *args: str, **kwargs):
    return runner.invoke(cli, list(args), catch_exceptions=False, **kwargs)


def golden(name: str) -> dict:
    return json.loads((GOLDEN / name).read_text(encoding="utf-8"))


class TestGolden:
    def test_iso(self, runner):
        result = invoke(runner, "iso", "--left", "family:g=2", "--right", "family:g=-2", "--window", "8")
        assert result.exit_code == 0
        assert json.loads(result.stdout) == golden("iso_family_opposite.json")

    def test_fit_gamma(self, runner):
        result = invoke(runner, "fit-gamma", "--structure", "family:g=5/2", "--window", "3")
        assert result.exit_code == 0
        assert json.loads(result.stdout) == golden("fit_gamma_family.json")

    def test_check_law_failure(self, runner):
        result = invoke(runner, "check-law", "--law", "witt-commutator", "--phi", "n", "--window", "1")
        assert result.exit_code == 1
        assert json.loads(result.stdout) == golden("check_law_left_index.json")


class TestCheckLaw:
    def test_family_passes(self, runner):
        result = invoke(
            runner, "check-law", "--law", "anti-pre-lie", "--phi=-(g + m + 2*n)", "--param", "g=0", "--window", "6"
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["pass"] is True
        assert report["symbolic_residuals"] == ["0", "0"]

    def test_formal_parameter(self, runner):
        result = invoke(runner, "check-law", "--law", "admissible-novikov", "--phi=-(g + m + 2*n)", "--formal", "g", "--window", "3")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["checked"] == 0

    def test_bracket_of_family_satisfies_jacobi(self, runner):
        result = invoke(runner, "check-law", "--law", "jacobi", "--structure", "family:g=1", "--bracket-of", "--window", "4")
        assert result.exit_code == 0

    def test_output_file(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = invoke(runner, "check-law", "--law", "novikov", "--phi", "m", "--window", "3", "--output", str(out))
        assert result.exit_code == 0
        assert result.stdout == ""
        assert json.loads(out.read_text(encoding="utf-8"))["law"] == "novikov"

    def test_structure_from_file(self, runner, tmp_path):
        path = tmp_path / "phi.json"
        path.write_text('{"kind": "symbolic", "expr": "-(g + m + 2*n)", "params": {"g": "7/3"}}', encoding="utf-8")
        result = invoke(runner, "check-law", "--law", "anti-pre-lie", "--structure", str(path), "--window", "4")
        assert result.exit_code == 0


class TestInputErrors:
    @pytest.mark.parametrize("expr", MALFORMED)
    def test_malformed_expression(self, runner, expr):
        result = invoke(runner, "check-law", "--law", "anti-pre-lie", f"--phi={expr}", "--window", "2")
        assert result.exit_code == 2
        assert "at offset" in result.stderr

    def test_both_structure_flags(self, runner):
        result = invoke(runner, "fit-gamma", "--structure", "family:g=1", "--phi", "m", "--window", "2")
        assert result.exit_code == 2

    def test_unknown_flag(self, runner):
        result = invoke(runner, "iso", "--left", "family:g=1", "--right", "family:g=1", "--window", "2", "--fast")
        assert result.exit_code == 2

    def test_bad_rational(self, runner):
        result = invoke(runner, "virasoro-solve", "--gamma", "1/0", "--window", "4")
        assert result.exit_code == 2

    def test_window_must_be_positive(self, runner):
        result = invoke(runner, "diagnostics", "--structure", "family:g=0", "--window", "0")
        assert result.exit_code == 2

    def test_unknown_family_parameter(self, runner):
        result = invoke(runner, "fit-gamma", "--structure", "family:h=1", "--window", "2")
        assert result.exit_code == 2


class TestTransforms:
    def test_reflection(self, runner):
        result = invoke(runner, "transform", "--structure", "family:g=3", "--epsilon=-1", "--window", "2")
        assert result.exit_code == 0
        table = json.loads(result.stdout)
        assert table["kind"] == "table"
        values = {(e["m"], e["n"]): e["value"] for e in table["entries"]}
        assert values[(1, 1)] == "0"
        assert values[(0, 0)] == "3"

    def test_q_transform_of_formal_family(self, runner):
        result = invoke(runner, "q-transform", "--structure", "family", "--direction", "to_novikov", "--window", "3")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["structure"]["expr"] == "-1/3*g - m"

    def test_diagnostics(self, runner):
        result = invoke(runner, "diagnostics", "--structure", "family:g=2", "--window", "5")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["zero_indices"] == [-1]


class TestModules:
    def test_module_check(self, runner):
        result = invoke(runner, "module-check", "--module", "valphabeta:a=1/2,b=2", "--window", "5")
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert document["report"]["pass"] is True
        assert document["weights"]["0"] == "1/2"

    def test_module_indec(self, runner):
        result = invoke(runner, "module-indec", "--module", "structure:family:g=1", "--window", "4")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["components"] == [list(range(-4, 5))]

    def test_intertwine(self, runner):
        result = invoke(
            runner, "intertwine", "--source", "structure:family:g=5/2", "--target", "valphabeta:a=1/2,b=2", "--window", "8"
        )
        assert result.exit_code == 0
        witness = json.loads(result.stdout)
        assert witness["k"] == 2
        assert set(witness["coefficients"].values()) == {"1"}

    def test_no_intertwiner(self, runner):
        result = invoke(runner, "intertwine", "--source", "structure:family:g=0", "--target", "vbeta:b=0", "--window", "6")
        assert result.exit_code == 1
        assert json.loads(result.stdout)["infeasible"]["reason"] == "forced-zero"


class TestSolvers:
    def test_solve_ansatz(self, runner):
        result = invoke(runner, "solve-ansatz", "--degree", "1", "--pin=-1")
        assert result.exit_code == 0
        outcome = json.loads(result.stdout)
        assert [s["expr"] for s in outcome["solutions"]] == ["-m - 2*n - 1"]

    def test_budget_from_environment(self, runner):
        result = invoke(runner, "solve-ansatz", "--degree", "2", "--pin", "0", env={"GAL_BUDGET": "1"})
        assert result.exit_code == 1
        assert json.loads(result.stdout)["status"] == "budget-exceeded"

    def test_solve_table(self, runner):
        result = invoke(runner, "solve-table", "--window", "4", "--pin=-3")
        assert result.exit_code == 0
        outcome = json.loads(result.stdout)
        assert outcome["mode"] == "table"
        assert len(outcome["solutions"]) == 1


class TestVirasoro:
    def test_solve_gamma_zero(self, runner):
        result = invoke(runner, "virasoro-solve", "--gamma", "0", "--window", "4")
        assert result.exit_code == 1
        document = json.loads(result.stdout)
        assert document["feasible"] is False
        assert document["certificate"]["contradiction"] == "3/4"

    def test_solve_without_cocycle(self, runner):
        result = invoke(runner, "virasoro-solve", "--gamma", "0", "--no-cocycle", "--window", "4")
        assert result.exit_code == 0

    def test_check_forced_psi(self, runner):
        result = invoke(runner, "virasoro-check", "--gamma", "0", "--psi-expr", "1/24*m^3 - 1/24*m", "--window", "4")
        assert result.exit_code == 1
        clauses = {v["clause"] for v in json.loads(result.stdout)["violations"]}
        assert clauses == {"associator"}

    def test_check_psi_json(self, runner):
        psi = json.dumps({str(m): "0" for m in range(-3, 4)})
        result = invoke(runner, "virasoro-check", "--gamma", "1", "--psi", psi, "--no-cocycle", "--window", "3")
        assert result.exit_code == 0


class TestRunCli:
    def test_exit_codes(self, capsys):
        assert run_cli(["iso", "--left", "family:g=1", "--right", "family:g=-1", "--window", "4"]) == 0
        assert run_cli(["virasoro-solve", "--gamma", "0", "--window", "4"]) == 1
        assert run_cli(["fit-gamma", "--phi", "m +", "--window", "2"]) == 2
        assert "at offset" in capsys.readouterr().err


@pytest.mark.parametrize(
    "args, model",
    [
        (["check-law", "--law", "pre-lie", "--phi", "m", "--window", "2"], LawReport),
        (["fit-gamma", "--phi", "m", "--window", "2"], FitResult),
        (["iso", "--left", "family:g=1", "--right", "family:g=2", "--window", "3"], IsoResult),
        (["q-transform", "--structure", "family:g=1", "--direction", "to_admissible", "--window", "2"], QTransformResult),
        (["module-check", "--module", "vbeta:b=1", "--window", "3"], ModuleCheckResult),
        (["module-indec", "--module", "valpha:a=0", "--window", "3"], IndecomposabilityReport),
        (["intertwine", "--source", "valpha:a=1", "--target", "valpha:a=1", "--window", "3"], IntertwinerWitness),
        (["solve-ansatz", "--degree", "1"], SolveOutcome),
        (["virasoro-solve", "--gamma", "2", "--window", "4"], CentralSolveResult),
        (["diagnostics", "--phi", "n", "--window", "2"], DiagnosticsReport),
    ],
)
def test_output_matches_schema(runner, args, model):
    result = invoke(runner, *args)
    assert result.exit_code in (0, 1)
    model.model_validate_json(result.stdout)
