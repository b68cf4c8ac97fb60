"""Entry point and main function"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from gal.config import BUDGET_ENV, DEFAULT_BUDGET, FAMILY_PARAM, LOG_FORMAT
from gal.exact_arith import parse_rational
from gal.expr_parser import ExprSource, parse_expression
from gal.schemas import MODULE_ADAPTER, STRUCTURE_ADAPTER, ModuleCheckResult, SymbolicStructureSpec
from gal.structure_solver import AnsatzProblem, smallest_unique_window, solve_ansatz, solve_table
from gal.virasoro import CentralStructure, check_central, solve_central
from gal.weight_modules import (
    WeightModule,
    build_module,
    check_indecomposable,
    check_module_axiom,
    find_intertwiner,
    from_structure,
    module_weights,
    valpha,
    valphabeta,
    vbeta,
)
from gal.witt_core import (
    LAW_CHECKS,
    GradedStructure,
    Window,
    are_isomorphic,
    bracket_of,
    diagnostics_specializations,
    family_structure,
    fit_family,
    q_transform,
    structure_from_spec,
    structure_to_spec,
    transform_structure,
)

LOG = logging.getLogger("gal")


class InputError(click.ClickException):
    exit_code = 2


class RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            return parse_rational(value)
        except ValueError as err:
            self.fail(str(err), param, ctx)


RATIONAL = RationalType()
WINDOW = click.IntRange(min=1)


def _configure_logging(verbose: bool, debug: bool):
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def command(name: str):
    """Register a subcommand with the shared flags, logging and error mapping."""

    def wrap(func):
        @cli.command(name)
        @click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="Write JSON here instead of stdout.")
        @click.option("--verbose", is_flag=True, help="Log progress to stderr.")
        @click.option("--debug", is_flag=True, help="Log search and elimination details to stderr.")
        @functools.wraps(func)
        def run(output: Optional[Path], verbose: bool, debug: bool, **kwargs):
            _configure_logging(verbose, debug)
            try:
                document, ok = func(**kwargs)
            except (ValueError, OSError) as err:
                raise InputError(str(err)) from err
            text = document if isinstance(document, str) else document.model_dump_json(by_alias=True, indent=2)
            if output is None:
                click.echo(text)
            else:
                output.write_text(text + "\n", encoding="utf-8")
                LOG.info("wrote %s", output)
            click.get_current_context().exit(0 if ok else 1)

        return run

    return wrap


@click.group()
def cli():
    """Exact checks and solvers for graded products on the Witt and Virasoro algebras."""


# input parsing


def _read_json(text: str) -> str:
    if text.lstrip().startswith(("{", "[")):
        return text
    return Path(text).read_text(encoding="utf-8")


def _parse_assignments(text: str) -> dict[str, str]:
    pairs = {}
    for chunk in filter(None, text.split(",")):
        name, sep, value = chunk.partition("=")
        if not sep:
            raise ValueError(f"expected name=value, got '{chunk}'")
        pairs[name.strip()] = value.strip()
    return pairs


def load_structure(text: str) -> GradedStructure:
    if text == "family":
        return family_structure()
    if text.startswith("family:"):
        values = _parse_assignments(text[len("family:") :])
        unknown = set(values) - {FAMILY_PARAM}
        if unknown:
            raise ValueError(f"the family takes only '{FAMILY_PARAM}', got {', '.join(sorted(unknown))}")
        if FAMILY_PARAM not in values:
            return family_structure()
        return family_structure(parse_rational(values[FAMILY_PARAM]))
    return structure_from_spec(STRUCTURE_ADAPTER.validate_json(_read_json(text)))


def load_module(text: str) -> WeightModule:
    kind, sep, rest = text.partition(":")
    if sep and kind == "structure":
        return from_structure(load_structure(rest))
    if sep and kind in ("valpha", "vbeta", "valphabeta"):
        values = {name: parse_rational(v) for name, v in _parse_assignments(rest).items()}
        needs = {"valpha": {"a"}, "vbeta": {"b"}, "valphabeta": {"a", "b"}}[kind]
        if set(values) != needs:
            raise ValueError(f"{kind} needs {', '.join(sorted(needs))}")
        if kind == "valpha":
            return valpha(values["a"])
        if kind == "vbeta":
            return vbeta(values["b"])
        return valphabeta(values["a"], values["b"])
    return build_module(MODULE_ADAPTER.validate_json(_read_json(text)))


def _structure_argument(structure: Optional[str], phi: Optional[str], params: tuple[str, ...], formal: tuple[str, ...]):
    if (structure is None) == (phi is None):
        raise ValueError("give exactly one of --structure or --phi")
    if structure is not None:
        return load_structure(structure)
    bindings = {}
    for item in params:
        bindings.update(_parse_assignments(item))
    spec = SymbolicStructureSpec(expr=phi, params=bindings, formal=list(formal))
    return structure_from_spec(spec)


def structure_options(func):
    func = click.option("--structure", help="family:g=<rational>, inline JSON or a JSON file.")(func)
    func = click.option("--phi", help="Expression for the coefficient of W_n∘W_m, in n, m and parameters.")(func)
    func = click.option("--param", "params", multiple=True, help="Parameter binding name=value.")(func)
    func = click.option("--formal", multiple=True, help="Parameter left as an indeterminate.")(func)
    return func


# subcommands


@command("check-law")
@click.option("--law", type=click.Choice(sorted(LAW_CHECKS)), required=True)
@structure_options
@click.option("--bracket-of", "use_bracket", is_flag=True, help="Check the commutator bracket of the structure (jacobi).")
@click.option("--window", type=WINDOW, required=True)
def check_law(law, structure, phi, params, formal, use_bracket, window):
    s = _structure_argument(structure, phi, params, formal)
    if use_bracket:
        s = bracket_of(s)
    report = LAW_CHECKS[law](s, Window(window))
    return report, report.passed


@command("fit-gamma")
@structure_options
@click.option("--window", type=WINDOW, required=True)
def fit_gamma(structure, phi, params, formal, window):
    result = fit_family(_structure_argument(structure, phi, params, formal), Window(window))
    return result, result.gamma is not None


@command("iso")
@click.option("--left", required=True)
@click.option("--right", required=True)
@click.option("--window", type=WINDOW, required=True)
def iso(left, right, window):
    result = are_isomorphic(load_structure(left), load_structure(right), Window(window))
    return result, result.isomorphic


@command("transform")
@structure_options
@click.option("--epsilon", type=click.Choice(["1", "-1"]), required=True)
@click.option("--lam", type=RATIONAL, default="1", show_default=True)
@click.option("--window", type=WINDOW, required=True)
def transform(structure, phi, params, formal, epsilon, lam, window):
    s = _structure_argument(structure, phi, params, formal)
    out = transform_structure(s, int(epsilon), lam, Window(window))
    return STRUCTURE_ADAPTER.dump_json(structure_to_spec(out), indent=2).decode(), True


@command("q-transform")
@structure_options
@click.option("--direction", type=click.Choice(["to_admissible", "to_novikov"]), required=True)
@click.option("--window", type=WINDOW)
def q_transform_command(structure, phi, params, formal, direction, window):
    s = _structure_argument(structure, phi, params, formal)
    result = q_transform(s, direction, Window(window) if window else None)
    return result, True


@command("module-check")
@click.option("--module", "module_text", required=True)
@click.option("--window", type=WINDOW, required=True)
def module_check(module_text, window):
    w = Window(window)
    module = load_module(module_text)
    report = check_module_axiom(module, w)
    return ModuleCheckResult(report=report, weights=module_weights(module, w)), report.passed


@command("module-indec")
@click.option("--module", "module_text", required=True)
@click.option("--window", type=WINDOW, required=True)
def module_indec(module_text, window):
    result = check_indecomposable(load_module(module_text), Window(window))
    return result, result.indecomposable


@command("intertwine")
@click.option("--source", required=True, help="Module A of the map A -> B.")
@click.option("--target", required=True, help="Module B of the map A -> B.")
@click.option("--window", type=WINDOW, required=True)
def intertwine(source, target, window):
    witness = find_intertwiner(load_module(source), load_module(target), Window(window))
    return witness, witness.found


@command("solve-ansatz")
@click.option("--degree", type=click.IntRange(min=1, max=9), required=True)
@click.option("--pin", type=RATIONAL, help="Value of φ(0,0).")
@click.option("--budget", type=click.IntRange(min=1), envvar=BUDGET_ENV, default=DEFAULT_BUDGET, show_default=True)
def solve_ansatz_command(degree, pin, budget):
    outcome = solve_ansatz(AnsatzProblem(degree, pin), budget)
    return outcome, outcome.status == "complete" and bool(outcome.solutions or outcome.parametric)


@command("solve-table")
@click.option("--window", type=WINDOW, required=True)
@click.option("--pin", type=RATIONAL, required=True, help="Value of φ(0,0).")
@click.option("--budget", type=click.IntRange(min=1), envvar=BUDGET_ENV, default=DEFAULT_BUDGET, show_default=True)
@click.option("--scan-uniqueness", is_flag=True, help="Also record the smallest radius with a unique table.")
def solve_table_command(window, pin, budget, scan_uniqueness):
    outcome = solve_table(Window(window), pin, budget)
    if scan_uniqueness:
        outcome.unique_from_window = smallest_unique_window(pin, window, budget)
    return outcome, outcome.status == "complete" and bool(outcome.solutions)


def _load_psi(psi: Optional[str], psi_expr: Optional[str], w: Window) -> dict[int, object]:
    if (psi is None) == (psi_expr is None):
        raise ValueError("give exactly one of --psi or --psi-expr")
    if psi_expr is not None:
        poly = parse_expression(ExprSource(psi_expr))
        return {m: poly.evaluate({"m": m}) for m in w.indices}
    raw = json.loads(_read_json(psi))
    return {int(m): parse_rational(v) for m, v in raw.items()}


@command("virasoro-check")
@click.option("--gamma", type=RATIONAL, required=True)
@click.option("--psi", help="JSON object index -> rational, inline or a file.")
@click.option("--psi-expr", help="ψ_m as an expression in m.")
@click.option("--no-cocycle", is_flag=True, help="Leave the cocycle normalisation out.")
@click.option("--window", type=WINDOW, required=True)
def virasoro_check(gamma, psi, psi_expr, no_cocycle, window):
    w = Window(window)
    report = check_central(CentralStructure(gamma, _load_psi(psi, psi_expr, w)), w, include_cocycle=not no_cocycle)
    return report, report.passed


@command("virasoro-solve")
@click.option("--gamma", type=RATIONAL, required=True)
@click.option("--no-cocycle", is_flag=True, help="Leave the cocycle normalisation out.")
@click.option("--window", type=WINDOW, required=True)
def virasoro_solve(gamma, no_cocycle, window):
    result = solve_central(gamma, Window(window), include_cocycle=not no_cocycle)
    return result, result.feasible


@command("diagnostics")
@structure_options
@click.option("--window", type=WINDOW, required=True)
def diagnostics(structure, phi, params, formal, window):
    report = diagnostics_specializations(_structure_argument(structure, phi, params, formal), Window(window))
    return report, report.passed


def run_cli(argv: list[str]) -> int:
    """Run one invocation and return its exit code instead of exiting."""
    try:
        code = cli.main(args=argv, prog_name="gal", standalone_mode=False)
    except click.ClickException as err:
        err.show()
        return err.exit_code
    except click.exceptions.Abort:
        return 1
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    cli()
