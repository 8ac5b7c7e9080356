"""Command-line interface. Every option can also be supplied through an
environment variable prefixed CSKB_ (e.g. CSKB_BUILD_TOP_K)."""

import json
import sys
from pathlib import Path

import click

from . import diagnostics as diag
from . import evaluate as ev
from .core import Dimension, ResourceId, ResourceKind, parse_predicate
from .ingest import (
    read_assertion_table,
    read_embeddings,
    read_generation_records,
    read_ground_truth,
)
from .pipeline import PipelineConfig, assign_ranks, build_resource, write_resource
from .query import (
    Catalog,
    Resource,
    aggregate_objects,
    evaluate_conjunctive,
    parse_query,
    search_text,
    top_assertions,
)
from .snapshot import MAGIC, snapshot_load, snapshot_save
from .verbalize import load_templates


def _is_snapshot(path: Path) -> bool:
    try:
        with path.open("rb") as fh:
            return fh.read(len(MAGIC)) == MAGIC
    except OSError:
        return False


def _load_resource(path: Path, name: str | None, kind: str, resource: str | None = None) -> Resource:
    """Load one resource from a snapshot or an assertion TSV (ranks are
    assigned on the fly for TSVs; a .meta.json sidecar supplies name/kind)."""
    if _is_snapshot(path):
        catalog = snapshot_load(path)
        if resource:
            return catalog.get(resource)
        resources = catalog.resources()
        if len(resources) != 1:
            raise click.UsageError(
                f"snapshot {path} holds {len(resources)} resources; pick one with --resource"
            )
        return resources[0]

    sidecar = path.with_name(path.name + ".meta.json")
    meta = {}
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    resource_id = ResourceId(
        name=name or meta.get("name") or path.stem,
        kind=ResourceKind(meta.get("kind", kind) if name is None else kind),
    )
    with path.open("r", encoding="utf-8") as fh:
        assertions, report = read_assertion_table(fh, resource_id)
    if report.records_rejected:
        click.echo(f"warning: {report.summary()} from {path}", err=True)
    return Resource(resource_id, assign_ranks(assertions), meta=meta.get("meta", {}))


def _echo_report(report, limit: int = 10) -> None:
    click.echo(report.summary())
    for line_no, reason in report.rejection_reasons[:limit]:
        click.echo(f"  line {line_no}: {reason}")
    hidden = len(report.rejection_reasons) - limit
    if hidden > 0:
        click.echo(f"  ... and {hidden} more")


path_arg = click.Path(exists=True, dir_okay=False, path_type=Path)
out_path = click.Path(dir_okay=False, path_type=Path)


@click.group(context_settings={"auto_envvar_prefix": "CSKB"})
def main():
    """Materialize, query and evaluate commonsense knowledge bases."""


@main.command()
@click.argument("records", type=path_arg)
def ingest(records: Path):
    """Validate a generation-record JSONL file and print its ingest report."""
    with records.open("r", encoding="utf-8") as fh:
        _, report = read_generation_records(fh)
    _echo_report(report, limit=30)


@main.command()
@click.argument("records", type=path_arg)
@click.option("-o", "--output", type=out_path, required=True, help="Assertion TSV to write.")
@click.option("--name", required=True, help="Resource name, e.g. GPT2-XL-ConceptNet.")
@click.option("--top-k", default=10, show_default=True, help="Completions kept per subject-predicate pair.")
@click.option("--training", type=path_arg, default=None,
              help="Training assertion TSV; exact (s,p,o) matches against it are dropped.")
@click.option("--keep-training-duplicates", is_flag=True, default=False)
@click.option("--snapshot", "snapshot_path", type=out_path, default=None, help="Also write a binary snapshot.")
def build(records, output, name, top_k, training, keep_training_duplicates, snapshot_path):
    """Build a ranked resource from generation records."""
    with records.open("r", encoding="utf-8") as fh:
        parsed, report = read_generation_records(fh)
    if report.records_rejected:
        _echo_report(report)
    training_resource = None
    if training is not None:
        training_resource = _load_resource(training, None, ResourceKind.training.value)
    config = PipelineConfig(
        top_k_per_pair=top_k,
        keep_training_duplicates=keep_training_duplicates,
    )
    resource = build_resource(
        parsed,
        ResourceId(name=name, kind=ResourceKind.generated),
        config,
        training=training_resource,
    )
    write_resource(resource, output)
    click.echo(f"{len(resource)} assertions -> {output}")
    if snapshot_path is not None:
        digest = snapshot_save(Catalog([resource]), snapshot_path)
        click.echo(f"snapshot {snapshot_path} sha256={digest[:12]}...")


_resource_options = [
    click.option("--name", default=None, help="Resource name override (TSV input)."),
    click.option("--kind", default="generated", show_default=True,
                 type=click.Choice([k.value for k in ResourceKind])),
    click.option("--resource", "resource_name", default=None,
                 help="Resource to pick from a multi-resource snapshot."),
]


def resource_options(fn):
    for option in reversed(_resource_options):
        fn = option(fn)
    return fn


@main.command()
@click.argument("path", type=path_arg)
@resource_options
@click.option("--top-n", default=None, type=int, help="Restrict to top-n assertions per subject.")
@click.option("--json", "as_json", is_flag=True, default=False)
def stats(path, name, kind, resource_name, top_n, as_json):
    """Resource statistics: size, per-predicate counts, subjects."""
    r = _load_resource(path, name, kind, resource_name)
    s = diag.resource_stats(r, top_n=top_n)
    if as_json:
        click.echo(json.dumps({
            "resource": r.name,
            "total": s.total,
            "per_predicate": {p.value: n for p, n in s.per_predicate.items()},
            "subjects": s.subjects,
            "mean_objects_per_pair": s.mean_objects_per_pair,
        }, indent=2))
        return
    click.echo(f"{r.name}: {s.total} assertions, {s.subjects} subjects, "
               f"{s.mean_objects_per_pair:.2f} objects/pair")
    for predicate, count in sorted(s.per_predicate.items(), key=lambda kv: kv[0].order):
        click.echo(f"  {predicate.value:<16} {count}")


@main.command()
@click.argument("path", type=path_arg)
@click.argument("subject")
@resource_options
@click.option("-p", "--predicate", default=None)
@click.option("-k", default=10, show_default=True)
def query(path, subject, name, kind, resource_name, predicate, k):
    """Top-k assertions for a subject (optionally one predicate)."""
    r = _load_resource(path, name, kind, resource_name)
    kind_ = parse_predicate(predicate) if predicate else None
    for a in top_assertions(r, subject, kind_, k):
        score = "" if a.score is None else f"\t{a.score!r}"
        click.echo(f"{a.subject}\t{a.predicate.value}\t{a.object}{score}")


@main.command()
@click.argument("path", type=path_arg)
@click.argument("predicate")
@resource_options
@click.option("-k", default=10, show_default=True)
def aggregate(path, predicate, name, kind, resource_name, k):
    """Most frequent objects for a predicate."""
    r = _load_resource(path, name, kind, resource_name)
    for obj, count in aggregate_objects(r, parse_predicate(predicate), k):
        click.echo(f"{obj}\t{count}")


@main.command()
@click.argument("path", type=path_arg)
@resource_options
@click.option("-q", "--pattern", "patterns", multiple=True, required=True,
              help='Pattern, e.g. "(?x, CapableOf, eat ?x)".')
@click.option("--project", default=None, help="Variable to project/aggregate on.")
@click.option("--aggregate", "do_aggregate", is_flag=True, default=False)
@click.option("-k", "--limit", default=None, type=int)
def join(path, name, kind, resource_name, patterns, project, do_aggregate, limit):
    """Evaluate a conjunctive query of one or two patterns."""
    r = _load_resource(path, name, kind, resource_name)
    q = parse_query(patterns, project, do_aggregate)
    result = evaluate_conjunctive(r, q)
    rows = result[:limit] if limit else result
    if do_aggregate:
        for value, count in rows:
            click.echo(f"{value}\t{count}")
    else:
        for binding in rows:
            pairs = ", ".join(f"?{k_}={v}" for k_, v in binding.values)
            flag = "\t[plural fold]" if binding.plural_fold else ""
            click.echo(f"{pairs}{flag}")


@main.command()
@click.argument("needle")
@click.argument("paths", type=path_arg, nargs=-1, required=True)
@click.option("--kind", default="generated", show_default=True,
              type=click.Choice([k.value for k in ResourceKind]))
@click.option("-k", "--limit", default=50, show_default=True)
def search(needle, paths, kind, limit):
    """Search subjects and objects for a token phrase."""
    resources = [_load_resource(p, None, kind) for p in paths]
    for a in search_text(resources, needle)[:limit]:
        rname = a.resource.name if a.resource else "?"
        click.echo(f"{rname}\t{a.subject}\t{a.predicate.value}\t{a.object}")


@main.command("eval-recall")
@click.argument("path", type=path_arg)
@resource_options
@click.option("--ground-truth", type=path_arg, required=True)
@click.option("--embeddings", "embeddings_path", type=path_arg, default=None)
@click.option("--embed-url", default=None, help="Embedding service base URL (POST /embed).")
@click.option("--threshold", "thresholds", multiple=True, type=float,
              default=(0.96, 0.98, 1.0), show_default=True)
@click.option("--top-n", default=100, show_default=True)
@click.option("--curve", default=None, help="Comma-separated n values for a recall curve.")
@click.option("--templates", "templates_path", type=path_arg, default=None)
def eval_recall(path, name, kind, resource_name, ground_truth, embeddings_path, embed_url,
                thresholds, top_n, curve, templates_path):
    """Recall against property-norm ground truth via embedding similarity."""
    r = _load_resource(path, name, kind, resource_name)
    templates = load_templates(templates_path) if templates_path else None
    with ground_truth.open("r", encoding="utf-8") as fh:
        gt, gt_report = read_ground_truth(fh)
    if gt_report.records_rejected:
        _echo_report(gt_report)

    if embeddings_path is not None:
        with embeddings_path.open("r", encoding="utf-8") as fh:
            store, emb_report = read_embeddings(fh)
        if emb_report.records_rejected:
            _echo_report(emb_report)
    elif embed_url is not None:
        from .verbalize import verbalize

        sentences = {g.sentence for g in gt}
        by_subject = r.indexes.by_subject
        limit = max([top_n, *[int(n) for n in curve.split(",")]] if curve else [top_n])
        for g in gt:
            for a in by_subject.get(g.concept, []):
                if a.subject_rank <= limit:
                    sentences.add(verbalize(a, templates))
        store = ev.EmbeddingServiceClient(embed_url).embed(sorted(sentences))
    else:
        raise click.UsageError("provide --embeddings or --embed-url")

    for t in thresholds:
        result = ev.recall_at(r, gt, store, ev.RecallConfig(top_n, t), templates)
        click.echo(
            f"t={t}: recall {result.recall:.4f} ({result.matched}/{result.total}); "
            f"covered-concept recall {result.covered_recall:.4f} "
            f"({result.matched}/{result.covered_total})"
        )
    if curve:
        n_values = sorted(int(n) for n in curve.split(","))
        for n, value in ev.recall_curve(r, gt, store, thresholds[0], n_values, templates):
            click.echo(f"n={n}: recall {value:.4f}")


@main.command()
@click.argument("path", type=path_arg)
@resource_options
@click.option("--dimension", type=click.Choice([d.value for d in Dimension]), required=True)
@click.option("--size", default=500, show_default=True)
@click.option("--top-n", default=None, type=int,
              help="Pool restriction; defaults to 100 (typicality) or 10 (saliency).")
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--output", type=out_path, required=True)
@click.option("--templates", "templates_path", type=path_arg, default=None)
def sample(path, name, kind, resource_name, dimension, size, top_n, seed, output, templates_path):
    """Draw a seeded annotation sample and write the task CSV."""
    r = _load_resource(path, name, kind, resource_name)
    dim = Dimension(dimension)
    config = ev.default_sampling(dim, seed)._replace(sample_size=size)
    if top_n is not None:
        config = config._replace(top_n_per_subject=top_n)
    templates = load_templates(templates_path) if templates_path else None
    samples = ev.sample_for_annotation(r, config, templates)
    with output.open("w", encoding="utf-8", newline="") as fh:
        ev.export_annotation_tasks(samples, dim, fh)
    click.echo(f"{len(samples)} tasks -> {output}")


@main.command("aggregate-judgements")
@click.argument("judgements", type=path_arg)
@click.option("--tasks", type=path_arg, required=True, help="Task CSV written by `sample`.")
@click.option("--dimension", type=click.Choice([d.value for d in Dimension]), required=True)
def aggregate_judgements(judgements, tasks, dimension):
    """Majority-vote precision report from crowd judgements."""
    dim = Dimension(dimension)
    with judgements.open("r", encoding="utf-8", newline="") as jfh, \
         tasks.open("r", encoding="utf-8", newline="") as tfh:
        rows, report = ev.load_judgements(jfh, tfh)
    if report.records_rejected:
        _echo_report(report)
    labels = ev.label_from_judgements(rows, dim)
    p = ev.precision_report(labels, dim)
    positive = "Typical" if dim is Dimension.typicality else "Salient"
    click.echo(f"{positive}: {p.positive_pct}%  Un{positive.lower()}: {p.negative_pct}%  "
               f"unlabelled: {p.unlabelled_pct}%  (n={p.sample_size})")


@main.group()
def snapshot():
    """Create and inspect binary snapshots."""


@snapshot.command("create")
@click.argument("inputs", type=path_arg, nargs=-1, required=True)
@click.option("-o", "--output", type=out_path, required=True)
@click.option("--kind", default="generated", show_default=True,
              type=click.Choice([k.value for k in ResourceKind]))
def snapshot_create(inputs, output, kind):
    """Bundle assertion TSVs (ranks assigned) into one snapshot file."""
    catalog = Catalog([_load_resource(p, None, kind) for p in inputs])
    digest = snapshot_save(catalog, output)
    click.echo(f"{output} sha256={digest}")


@snapshot.command("info")
@click.argument("path", type=path_arg)
def snapshot_info(path):
    """Verify a snapshot's checksum and list its resources."""
    catalog = snapshot_load(path)
    for r in catalog.resources():
        click.echo(f"{r.name}\t{r.kind}\t{len(r)} assertions")


@main.command()
@click.argument("path", type=path_arg)
@resource_options
@click.option("--subject", "subjects", multiple=True,
              help="Subjects for copy-rate analysis (default: all).")
@click.option("--json", "as_json", is_flag=True, default=False)
def diagnose(path, name, kind, resource_name, subjects, as_json):
    """Error-pattern report: subject copying, quantity conflicts, plurals."""
    r = _load_resource(path, name, kind, resource_name)
    report = diag.build_report(r, list(subjects) or None)
    click.echo(report.to_json() if as_json else report.to_text())


@main.command()
@click.argument("training", type=path_arg)
@click.option("--min-assertions", default=2, show_default=True)
@click.option("-o", "--output", type=out_path, default=None)
def subjects(training, min_assertions, output):
    """Emit subjects having at least N assertions in a training KB (the
    generator's query grid), one per line."""
    r = _load_resource(training, None, ResourceKind.training.value)
    names = sorted(
        subject
        for subject, members in r.indexes.by_subject.items()
        if len(members) >= min_assertions
    )
    text = "\n".join(names) + ("\n" if names else "")
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")
        click.echo(f"{len(names)} subjects -> {output}")


@main.command()
@click.option("--snapshot", "snapshots", type=path_arg, multiple=True, required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--embed-url", default=None)
def serve(snapshots, host, port, static_dir, embed_url):
    """Serve the browse/search/aggregate/join API over loaded snapshots."""
    from .server import ServiceConfig
    from .server import serve as run

    run(ServiceConfig(
        snapshot_paths=list(snapshots),
        host=host,
        port=port,
        static_dir=static_dir,
        embedding_service_url=embed_url,
    ))


if __name__ == "__main__":
    main()
