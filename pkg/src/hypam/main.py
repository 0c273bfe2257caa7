#!/usr/bin/env python
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click

from hypam.errors import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERDICT_FAILED, HypamError, JobError
from hypam.runner import load_job, run_job
from hypam.selftest import run_examples
from hypam.tools.codecs import Job

TOL_PREFIX = "--tol."


def parse_tolerances(args: List[str]) -> Dict[str, float]:
    """Collect ``--tol.<name> value`` and ``--tol.<name>=value`` pairs."""
    found: Dict[str, float] = {}
    rest = list(args)
    while rest:
        arg = rest.pop(0)
        if not arg.startswith(TOL_PREFIX):
            raise JobError(f"Unexpected argument {arg!r}")
        name, eq, value = arg[len(TOL_PREFIX):].partition("=")
        if not eq:
            if not rest:
                raise JobError(f"{arg} needs a value")
            value = rest.pop(0)
        try:
            found[name] = float(value)
        except ValueError as exc:
            raise JobError(f"{arg}: not a number: {value!r}") from exc
    return found


def parse_inputs(pairs: Tuple[str, ...]) -> Dict[str, object]:
    """``name=path`` keeps the path; ``name=<JSON>`` is decoded inline."""
    inputs: Dict[str, object] = {}
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise JobError(f"--input expects name=value, got {pair!r}")
        if value and value[0] in "{[":
            try:
                value = json.loads(value)
            except json.JSONDecodeError as exc:
                raise JobError(f"--input {name}: malformed JSON: {exc}") from exc
        inputs[name] = value
    return inputs


def build_job(command: Optional[str], job_path: Optional[str], overrides: Dict[str, object],
              inputs: Dict[str, object], tolerances: Dict[str, float]) -> Tuple[Job, Path]:
    if job_path is not None:
        job = load_job(job_path)
        base_dir = Path(job_path).resolve().parent
    elif command is not None:
        job = Job(command=command)
        base_dir = Path.cwd()
    else:
        raise JobError("Give a command or --job")
    if command is not None and command != job.command:
        raise JobError(f"The job file runs {job.command!r}, not {command!r}")
    update = {k: v for k, v in overrides.items() if v is not None}
    update["inputs"] = {**job.inputs, **inputs}
    update["tolerances"] = {**job.tolerances, **tolerances}
    return Job(**{**job.model_dump(), **update}), base_dir


def configure_logging(verbose: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def print_examples(command: Optional[str]) -> int:
    outcomes = run_examples(command)
    for outcome in outcomes:
        mark = "ok" if outcome.passed else "FAILED"
        click.echo(f"{mark:6} {outcome.command}: {outcome.name}")
        if outcome.detail:
            click.echo(f"       {outcome.detail}")
    failed = sum(not o.passed for o in outcomes)
    click.echo(f"{len(outcomes) - failed}/{len(outcomes)} examples passed")
    return EXIT_VERDICT_FAILED if failed else EXIT_OK


@click.command(context_settings={"ignore_unknown_options": True, "allow_extra_args": True})
@click.argument("command", required=False)
@click.option("--job", "job_path", type=click.Path(dir_okay=False), help="JSON job file.")
@click.option("--input", "input_pairs", multiple=True, metavar="NAME=VALUE",
              help="Job input: a JSON file path or inline JSON. Repeatable.")
@click.option("--seed", type=int, help="Seed for sampling commands.")
@click.option("--out", type=click.Path(dir_okay=False), help="Artifact path (.ply or .csv).")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              help="Also write the report JSON here.")
@click.option("--density", type=int, help="Points per piece of a spherical complex.")
@click.option("--count", type=int, help="Sample count or grid size.")
@click.option("--starts", type=int, help="Multistart count for membership.")
@click.option("--selftest", "run_selftest", is_flag=True, help="Run the example jobs of COMMAND (or all).")
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
@click.pass_context
def cli(ctx: click.Context, command, job_path, input_pairs, seed, out, report_path, density, count,
        starts, run_selftest, verbose) -> int:
    """Hyperbolic amoebas of lines, curves and surfaces in PSL2(C).

    Extra tolerance overrides are given as --tol.<name> VALUE.
    """
    configure_logging(verbose)
    try:
        if run_selftest:
            return print_examples(command)
        tolerances = parse_tolerances(ctx.args)
        job, base_dir = build_job(command, job_path,
                                  {"seed": seed, "out": out, "density": density, "count": count,
                                   "starts": starts},
                                  parse_inputs(input_pairs), tolerances)
    except HypamError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except ValueError as exc:
        # pydantic validation of the assembled job
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT_ERROR

    report = run_job(job, base_dir)
    text = report.model_dump_json(indent=2)
    click.echo(text)
    if report_path is not None and report.exit_code in (EXIT_OK, EXIT_VERDICT_FAILED):
        target = Path(report_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text + "\n", encoding="utf-8")
    return report.exit_code


def run():
    """Console entry point."""
    try:
        code = cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        code = 1
    except click.ClickException as exc:
        exc.show()
        code = EXIT_INPUT_ERROR
    sys.exit(code if isinstance(code, int) else EXIT_OK)


def selftest():
    """Run every example job."""
    configure_logging(0)
    sys.exit(print_examples(None))


if __name__ == "__main__":
    run()
