"""Command-line surface for the toolkit.

Every subcommand reads and writes files; warnings go to stderr with
machine-parsable ``W###`` codes.  Exit codes: 0 success, 2 input or schema
error, 3 join error, 4 transport error, 5 degenerate statistics.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click

from . import annotator, emodb, labelmap, pipeline
from .circumplex import default_weight_table, load_weight_table, project
from .errors import DegenerateStatisticsError, InputError, SchemaError, ToolkitError
from .model import ClassProbabilities, CorpusEmotion, SegmentAnnotation, load_bundled_dataset, load_segments


def _toolkit_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ToolkitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_table(table_path, bundled: bool) -> pipeline.AnalysisTable:
    if bundled == (table_path is not None):
        raise InputError("pass exactly one of --table or --bundled")
    if bundled:
        records = load_bundled_dataset("appendix_b")
        return pipeline.table_from_records(records, {"segments": "bundled:appendix_b"})
    table = pipeline.ingest(table_path)
    return table


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log informational messages too.")
def main(verbose: bool) -> None:
    """Three-modality emotion analytics for segmented speech."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
    )


@main.command("project")
@click.option("--probs", "probs_path", required=True, type=click.Path(), help="e2v_probs.json input.")
@click.option("--weights", "weights_path", type=click.Path(), help="weights.json override.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output points JSON.")
@_toolkit_errors
def project_cmd(probs_path, weights_path, out_path) -> None:
    """Project class probabilities to arousal/valence points."""
    doc = pipeline._read_json(probs_path, "e2v probabilities")
    if not isinstance(doc, dict):
        raise SchemaError(f"e2v probabilities file {probs_path} must map segment ids to objects")
    weights = load_weight_table(weights_path) if weights_path else default_weight_table()
    points = {}
    for sid in sorted(doc):
        try:
            probs = ClassProbabilities.from_dict(doc[sid])
        except SchemaError as exc:
            raise SchemaError(f"e2v probabilities for {sid}: {exc}") from None
        points[sid] = project(probs, weights).to_dict()
    _write_text(out_path, json.dumps(points, ensure_ascii=False, indent=1) + "\n")
    click.echo(f"projected {len(points)} segments -> {out_path}")


@main.command()
@click.option("--segments", "segments_path", required=True, type=click.Path())
@click.option("--e2v", "e2v_path", type=click.Path(), help="e2v_probs.json channel file.")
@click.option("--llm", "llm_path", type=click.Path(), help="llm_annotations.json channel file.")
@click.option("--trust", "trust_path", type=click.Path(), help="trust_scores.json channel file.")
@click.option("--weights", "weights_path", type=click.Path(), help="weights.json override.")
@click.option("--filter-relevance", is_flag=True, help="Drop rows flagged not relevant.")
@click.option("--out", "out_path", required=True, type=click.Path())
@_toolkit_errors
def ingest(segments_path, e2v_path, llm_path, trust_path, weights_path, filter_relevance, out_path) -> None:
    """Join channel files onto a segment table and write the result."""
    weights = load_weight_table(weights_path) if weights_path else None
    table = pipeline.ingest(segments_path, e2v_path, llm_path, trust_path, weights=weights)
    if filter_relevance:
        table = pipeline.apply_relevance_filter(table)
    from .model import dump_segments

    _write_text(out_path, dump_segments(table.rows))
    click.echo(f"ingested {len(table.rows)} segments -> {out_path}")


@main.command()
@click.option("--table", "table_path", type=click.Path(), help="Ingested segments.json table.")
@click.option("--bundled", is_flag=True, help="Use the bundled case-study table.")
@click.option("--method", type=click.Choice(["t_approx", "permutation"]), default="t_approx")
@click.option("--filter-relevance", is_flag=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="correlations.csv output.")
@_toolkit_errors
def correlate(table_path, bundled, method, filter_relevance, out_path) -> None:
    """Run the six-comparison correlation suite."""
    table = _load_table(table_path, bundled)
    if filter_relevance:
        table = pipeline.apply_relevance_filter(table)
    result = pipeline.correlation_suite(table, method=method)
    if all(v is None for v in result.as_mapping().values()):
        raise DegenerateStatisticsError("no comparison had enough complete pairs")
    _write_text(out_path, pipeline.correlations_csv(result))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--table", "table_path", type=click.Path())
@click.option("--bundled", is_flag=True)
@click.option("--filter-relevance", is_flag=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="descriptives.csv output.")
@_toolkit_errors
def describe(table_path, bundled, filter_relevance, out_path) -> None:
    """Write per-channel descriptive statistics."""
    table = _load_table(table_path, bundled)
    if filter_relevance:
        table = pipeline.apply_relevance_filter(table)
    stats = pipeline.descriptive_suite(table)
    if not stats:
        raise DegenerateStatisticsError("no channel had any values")
    _write_text(out_path, pipeline.descriptives_csv(stats))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--table", "table_path", type=click.Path())
@click.option("--bundled", is_flag=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="rhetoric.csv output.")
@_toolkit_errors
def rhetoric(table_path, bundled, out_path) -> None:
    """Write the rhetorical-function distribution."""
    table = _load_table(table_path, bundled)
    _write_text(out_path, pipeline.rhetoric_csv(pipeline.rhetoric_distribution(table)))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--table", "table_path", type=click.Path(), help="Ingested segments.json table.")
@click.option("--bundled", is_flag=True, help="Use the bundled index series.")
@click.option("--channels", default=None, help="Comma-separated channel names.")
@click.option("--csv", "csv_path", type=click.Path(), help="CSV output path.")
@click.option("--svg", "svg_path", type=click.Path(), help="SVG output path.")
@_toolkit_errors
def timeseries(table_path, bundled, channels, csv_path, svg_path) -> None:
    """Export index-aligned channels as CSV and/or SVG."""
    if bundled == (table_path is not None):
        raise InputError("pass exactly one of --table or --bundled")
    if not csv_path and not svg_path:
        raise InputError("pass --csv and/or --svg")
    if bundled:
        source = load_bundled_dataset("figure1_series")
        default_channels = list(source)
    else:
        source = pipeline.ingest(table_path)
        default_channels = list(pipeline.CHANNELS)
    names = [c.strip() for c in channels.split(",")] if channels else default_channels
    if csv_path:
        _write_text(csv_path, pipeline.timeseries_export(source, names, "csv"))
        click.echo(f"wrote {csv_path}")
    if svg_path:
        Path(svg_path).write_bytes(pipeline.timeseries_export(source, names, "svg"))
        click.echo(f"wrote {svg_path}")


@main.command("emodb-audit")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(), help="One filename per line.")
@click.option("--convention", "convention_path", type=click.Path(), help="convention.json override.")
@click.option("--match-report", "records_path", type=click.Path(), help="Annotated records JSON for quality flags.")
@click.option("--mapping", "mapping_path", type=click.Path(), help="mapping.json for --match-report.")
@click.option("--gap-threshold", default=1, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(), help="audit.json output.")
@_toolkit_errors
def emodb_audit(manifest_path, convention_path, records_path, mapping_path, gap_threshold, out_path) -> None:
    """Audit an acted-corpus manifest: counts, gaps, imbalance, quality flags."""
    conv = emodb.load_convention(convention_path) if convention_path else emodb.default_convention()
    metas = [emodb.parse_filename(name, conv) for name in emodb.read_manifest(manifest_path)]
    matrix = emodb.build_matrix(metas)
    report_arg = None
    if records_path:
        table = labelmap.load_mapping(mapping_path) if mapping_path else labelmap.default_mapping()
        report_arg = labelmap.match_report(_read_match_records(records_path), table)
    report = emodb.audit_report(
        matrix, report_arg, gap_threshold=gap_threshold, convention_name=conv.name
    )
    _write_text(out_path, json.dumps(report, ensure_ascii=False, indent=1) + "\n")
    click.echo(emodb.render_audit_text(report), nl=False)


def _read_match_records(path) -> list[tuple[CorpusEmotion, SegmentAnnotation]]:
    doc = pipeline._read_json(path, "match records")
    if not isinstance(doc, list):
        raise SchemaError(f"match records file {path} must be a JSON array")
    records = []
    for i, entry in enumerate(doc):
        try:
            gt = CorpusEmotion(entry["gt"])
            ann = SegmentAnnotation.from_dict(entry["annotation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"match records[{i}]: {exc}") from None
        records.append((gt, ann))
    return records


@main.command("match-rate")
@click.option("--records", "records_path", required=True, type=click.Path(),
              help="JSON array of {gt, annotation} objects.")
@click.option("--mapping", "mapping_path", type=click.Path(), help="mapping.json override.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Match report CSV.")
@_toolkit_errors
def match_rate(records_path, mapping_path, out_path) -> None:
    """Compute semantic match rates of annotations against ground truth."""
    table = labelmap.load_mapping(mapping_path) if mapping_path else labelmap.default_mapping()
    report = labelmap.match_report(_read_match_records(records_path), table)
    _write_text(out_path, labelmap.match_report_csv(report))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--segments", "segments_path", required=True, type=click.Path())
@click.option("--audio-ref", required=True, help="Opaque audio reference for the deployment.")
@click.option("--fixture", "fixture_path", type=click.Path(), help="Replay a recorded payload.")
@click.option("--endpoint", help="Live HTTPS endpoint URL.")
@click.option("--retries", default=annotator.DEFAULT_MAX_RETRIES, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(), help="llm_annotations.json output.")
@_toolkit_errors
def annotate(segments_path, audio_ref, fixture_path, endpoint, retries, out_path) -> None:
    """Annotate segments via a fixture replay or a live endpoint.

    Live mode reads its bearer credential from the environment variable
    TRIAFFECT_ANNOTATOR_TOKEN.
    """
    if (fixture_path is None) == (endpoint is None):
        raise InputError("pass exactly one of --fixture or --endpoint")
    segments = load_segments(segments_path)
    request = annotator.build_request(audio_ref, segments)
    transport = (
        annotator.FixtureTransport(fixture_path)
        if fixture_path
        else annotator.HttpTransport(endpoint)
    )
    response = annotator.annotate(request, transport, max_retries=retries)
    _write_text(out_path, annotator.response_to_json(response))
    dropped = f" ({len(response.errors)} dropped)" if response.errors else ""
    click.echo(f"annotated {len(response.annotations)} segments{dropped} -> {out_path}")


if __name__ == "__main__":
    main()
