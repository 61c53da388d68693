"""Command line for generating, scoring, and exporting contrast sets.

Exit codes: 0 success, 1 usage problems, 2 unreadable or inconsistent data,
3 backend failures (including per-candidate failures after retries, in
which case partial output is still written).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from . import __version__
from .backends import (
    BackendError,
    HttpParseBackend,
    HttpQGBackend,
    HttpRCBackend,
    load_qg_fixtures,
    stub_backend,
)
from .datasets import FORMATS, DatasetError, SchemaError, load_break_map, load_dataset
from .metrics import MissingPrediction, build_report
from .perturb import PerturbationKind
from .pipeline import (
    AugmentConfig,
    augment,
    export_validation_sample,
    generate,
    group_rows,
    load_predictions,
    read_generated,
    read_group_rows,
    rows_to_groups,
    write_generated,
    write_group_rows,
)
from .qdmr import QdmrError

_FORMAT_OPTION = click.option(
    "--format",
    "fmt",
    type=click.Choice(sorted(FORMATS)),
    default="generic-jsonl",
    show_default=True,
    help="Input dataset format.",
)
_SEED_OPTION = click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    envvar="BPB_SEED",
    help="Sampling seed (env: BPB_SEED).",
)


def _rc_backend(spec: str):
    if spec == "off":
        return None
    if spec.startswith("stub:"):
        return _load_fixture(stub_backend, spec[len("stub:") :])
    if spec.startswith(("http://", "https://")):
        return HttpRCBackend(spec)
    raise click.BadParameter("expected off, stub:<path>, or an http(s) URL", param_hint="--rc-backend")


def _qg_backend(spec: str):
    if spec == "off":
        return None
    if spec.startswith("stub:"):
        return _load_fixture(load_qg_fixtures, spec[len("stub:") :])
    if spec.startswith(("http://", "https://")):
        return HttpQGBackend(spec)
    raise click.BadParameter("expected off, stub:<path>, or an http(s) URL", param_hint="--qg-backend")


def _load_fixture(loader, path: str):
    try:
        return loader(path)
    except (OSError, ValueError) as error:
        raise SchemaError(path, f"unreadable fixture file: {error}") from error


def _qdmr_sources(spec: str | None):
    """The --qdmr flag names a decomposition CSV or a parsing service."""
    if spec is None:
        return None, None
    if spec.startswith("backend:"):
        return None, HttpParseBackend(spec[len("backend:") :])
    return load_break_map(spec), None


def _parse_kinds(spec: str) -> list[PerturbationKind] | None:
    if spec == "all":
        return None
    kinds = []
    for name in spec.split(","):
        name = name.strip()
        try:
            kinds.append(PerturbationKind(name.upper()))
        except ValueError:
            known = ", ".join(k.value for k in PerturbationKind)
            raise click.BadParameter(
                f"unknown kind {name!r} (choose from: all, {known})",
                param_hint="--perturbations",
            )
    return kinds


def _echo_jsonl(rows, output: str | None) -> None:
    if output is None or output == "-":
        for row in rows:
            click.echo(json.dumps(row, sort_keys=True))
        return
    with Path(output).open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")


@click.group()
@click.version_option(__version__, prog_name="bpb")
def cli() -> None:
    """Contrast-set generation for reading-comprehension datasets."""


@cli.command("generate")
@click.option("--input", "input_path", required=True, help="Dataset file to rewrite.")
@_FORMAT_OPTION
@click.option(
    "--qdmr",
    "qdmr_spec",
    default=None,
    help="Decompositions as a CSV (question_id,question_text,decomposition) or backend:<url>.",
)
@click.option(
    "--rc-backend",
    "rc_spec",
    default="off",
    show_default=True,
    help="Reading-comprehension answerer: off, stub:<fixtures.json>, or an http(s) URL.",
)
@click.option(
    "--qg-backend",
    "qg_spec",
    default="off",
    show_default=True,
    help="Question generator: off, stub:<fixtures.json>, or an http(s) URL.",
)
@click.option(
    "--perturbations",
    default="all",
    show_default=True,
    help="Comma-separated rewrite kinds to apply, or 'all'.",
)
@_SEED_OPTION
@click.option("--out", "out_path", default="-", show_default=True, help="Generated JSONL ('-' = stdout).")
@click.option("--log", "log_path", default=None, help="Write generation tallies as JSON here.")
@click.option("--groups", "groups_path", default=None, help="Write contrast groups as JSONL here.")
def generate_cmd(
    input_path, fmt, qdmr_spec, rc_spec, qg_spec, perturbations, seed, out_path, log_path, groups_path
) -> None:
    """Rewrite each question and emit answerable variants as JSONL."""
    del seed  # generation is deterministic; the flag exists for interface parity
    records = load_dataset(input_path, fmt)
    qdmr_map, parse_backend = _qdmr_sources(qdmr_spec)
    generated, log = generate(
        records,
        rc_backend=_rc_backend(rc_spec),
        qg_backend=_qg_backend(qg_spec),
        parse_backend=parse_backend,
        qdmr_map=qdmr_map,
        kinds=_parse_kinds(perturbations),
    )
    if out_path == "-":
        _echo_jsonl([g.as_dict() for g in generated], None)
    else:
        write_generated(generated, out_path)
    if log_path:
        Path(log_path).write_text(
            json.dumps(log.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    if groups_path:
        write_group_rows(group_rows(records, generated), groups_path)
    click.echo(log.summary(), err=True)
    if log.backend_failures:
        raise BackendError(
            f"{log.backend_failures} backend call(s) failed; output reflects the rest"
        )


@cli.command("evaluate")
@click.option("--groups", "groups_path", required=True, help="Groups JSONL from 'bpb generate --groups'.")
@click.option(
    "--predictions",
    "predictions_path",
    required=True,
    help="Model predictions: JSON map of id->text, or JSONL rows {id, prediction}.",
)
@click.option("--report", "report_path", default=None, help="Write the report as JSON here.")
def evaluate_cmd(groups_path, predictions_path, report_path) -> None:
    """Score predictions over contrast groups and print the report."""
    groups = rows_to_groups(read_group_rows(groups_path), load_predictions(predictions_path))
    report = build_report(groups)
    if report_path:
        Path(report_path).write_text(
            json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    click.echo(report.format_table())


@cli.command("augment")
@click.option("--train", "train_path", required=True, help="Original training data (generic JSONL).")
@click.option("--generated", "generated_path", required=True, help="JSONL from 'bpb generate'.")
@click.option(
    "--tau",
    type=float,
    required=True,
    help="Per-kind cap as a share of the training set size, in (0, 1].",
)
@_SEED_OPTION
@click.option("--out", "out_path", required=True, help="Training JSONL (originals plus sampled rewrites).")
def augment_cmd(train_path, generated_path, tau, seed, out_path) -> None:
    """Mix sampled answered rewrites into the original training data."""
    try:
        config = AugmentConfig(tau=tau, seed=seed)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--tau")
    train = load_dataset(train_path, "generic-jsonl")
    generated = read_generated(generated_path)
    combined = augment(train, generated, config)
    rows = [
        {
            "id": record.id,
            "question": record.question,
            "context": record.context,
            "answer": record.answer.as_text() if record.answer else None,
            "decomposition": record.decomposition,
        }
        for record in combined
    ]
    _echo_jsonl(rows, out_path)
    click.echo(
        f"wrote {len(rows)} records ({len(rows) - len(train)} sampled rewrites)", err=True
    )


@cli.command("export-validation")
@click.option("--generated", "generated_path", required=True, help="JSONL from 'bpb generate'.")
@click.option("--cap", type=int, default=200, show_default=True, help="Rows sampled per rewrite kind.")
@_SEED_OPTION
@click.option("--out", "out_path", required=True, help="CSV for human review.")
def export_validation_cmd(generated_path, cap, seed, out_path) -> None:
    """Export a stratified sample of rewrites for manual checking."""
    rows = export_validation_sample(read_generated(generated_path), cap, seed)
    fields = ["source_id", "perturbation", "context", "question", "proposed_answer"]
    with Path(out_path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {len(rows)} rows", err=True)


def entry(argv: list[str] | None = None) -> int:
    """Console entry point mapping error families to exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as error:
        return error.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as error:
        error.show()
        return 1
    except (DatasetError, QdmrError, MissingPrediction) as error:
        click.echo(f"error: {error}", err=True)
        return 2
    except BackendError as error:
        click.echo(f"backend error: {error}", err=True)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(entry())
