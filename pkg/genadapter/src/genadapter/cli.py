"""CLI: generate completions for a subject list over the 13 predicates."""

import sys
from pathlib import Path

import click

from .config import FAMILIES, PREDICATES, default_config
from .runner import DEFAULT_PROMPT_TEMPLATE, generate_records


@click.command()
@click.argument("model_ref")
@click.option("--family", type=click.Choice(FAMILIES), default="gpt2xl", show_default=True)
@click.option("--subjects", "subjects_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Subject list, one per line.")
@click.option("--predicates", default="all",
              help='Comma-separated predicate names, or "all".', show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--prompt-template", default=DEFAULT_PROMPT_TEMPLATE, show_default=True,
              help="Serialization of (subject, predicate) fed to the model.")
@click.option("--num-beams", type=int, default=None, help="Override the family default.")
@click.option("--max-length", type=int, default=None, help="Override the family default.")
@click.option("--device", default="cpu", show_default=True)
def main(model_ref, family, subjects_path, predicates, output, prompt_template,
         num_beams, max_length, device):
    """Query MODEL_REF for every (subject, predicate) pair and write
    generation-record JSON-Lines."""
    subjects = [line.strip() for line in subjects_path.read_text(encoding="utf-8").splitlines()
                if line.strip()]
    if predicates == "all":
        names = list(PREDICATES)
    else:
        names = [p.strip() for p in predicates.split(",") if p.strip()]
        unknown = [p for p in names if p not in PREDICATES]
        if unknown:
            raise click.UsageError(f"unknown predicates: {', '.join(unknown)}")
    config = default_config(family)
    if num_beams is not None:
        config = config._replace(num_beams=num_beams)
    if max_length is not None:
        config = config._replace(max_length=max_length)
    with output.open("w", encoding="utf-8") as fh:
        stats = generate_records(
            model_ref, subjects, names, config, fh,
            family=family, prompt_template=prompt_template, device=device,
        )
    click.echo(
        f"{stats.records_written} records from {stats.pairs_total} pairs "
        f"({stats.pairs_failed} failed) -> {output}",
        err=False,
    )
    if stats.records_written == 0:
        sys.exit(1)


if __name__ == "__main__":
    main()
