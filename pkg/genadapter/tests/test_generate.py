import io
import json
import math

import pytest

from genadapter.config import default_config
from genadapter.runner import generate_records

from cskb.ingest import read_generation_records

SUBJECTS = ["rabbit", "cat"]
PREDICATES = ["AtLocation", "CapableOf"]


def small_config(family: str, **overrides):
    config = default_config(family)._replace(num_beams=4, max_length=12)
    return config._replace(**overrides)


@pytest.fixture(scope="module")
def gpt2_run(tiny_gpt2_checkpoint):
    out = io.StringIO()
    stats = generate_records(
        tiny_gpt2_checkpoint, SUBJECTS, PREDICATES, small_config("gpt2xl"), out,
        family="gpt2xl", capture_reported_scores=True,
    )
    return out.getvalue(), stats


@pytest.fixture(scope="module")
def bart_run(tiny_bart_checkpoint):
    out = io.StringIO()
    stats = generate_records(
        tiny_bart_checkpoint, SUBJECTS, PREDICATES, small_config("bart"), out,
        family="bart", capture_reported_scores=True,
    )
    return out.getvalue(), stats


def test_gpt2_output_passes_ingest_with_zero_rejections(gpt2_run):
    text, stats = gpt2_run
    records, report = read_generation_records(io.StringIO(text))
    assert report.records_rejected == 0
    assert report.records_read == stats.records_written
    assert len(records) == stats.records_written
    assert 0 < stats.records_written <= len(SUBJECTS) * len(PREDICATES) * 4


def test_bart_output_passes_ingest_with_zero_rejections(bart_run):
    text, stats = bart_run
    records, report = read_generation_records(io.StringIO(text))
    assert report.records_rejected == 0
    assert len(records) == stats.records_written


def test_beam_indices_distinct_per_pair(gpt2_run):
    text, _ = gpt2_run
    seen: dict[tuple[str, str], list[int]] = {}
    for line in text.splitlines():
        payload = json.loads(line)
        seen.setdefault((payload["subject"], payload["predicate"]), []).append(
            payload["beam_index"]
        )
    assert set(seen) == {(s, p) for s in SUBJECTS for p in PREDICATES}
    for beams in seen.values():
        assert len(beams) == len(set(beams))
        assert all(0 <= b < 4 for b in beams)


@pytest.mark.parametrize("run", ["gpt2_run", "bart_run"])
def test_summed_logprobs_match_decoder_scores(run, request):
    text, stats = request.getfixturevalue(run)
    lines = text.splitlines()
    assert len(stats.reported_scores) == len(lines)
    for line, reported in zip(lines, stats.reported_scores):
        payload = json.loads(line)
        logprobs = payload["token_logprobs"]
        # sequences_scores are length-normalized (length_penalty = 1.0)
        assert math.isclose(
            sum(logprobs), reported * len(logprobs), abs_tol=1e-4
        ), payload


def test_logprobs_are_non_positive(gpt2_run, bart_run):
    for text, _ in (gpt2_run, bart_run):
        for line in text.splitlines():
            payload = json.loads(line)
            assert payload["token_logprobs"]
            assert all(v <= 0 for v in payload["token_logprobs"])


def test_empty_subject_list_is_an_error(tiny_gpt2_checkpoint):
    with pytest.raises(ValueError):
        generate_records(
            tiny_gpt2_checkpoint, [], PREDICATES, small_config("gpt2xl"), io.StringIO()
        )


def test_model_load_failure_is_fatal(tmp_path):
    with pytest.raises(Exception):
        generate_records(
            str(tmp_path / "no-such-model"), SUBJECTS, PREDICATES,
            small_config("gpt2xl"), io.StringIO(),
        )


def test_failing_pair_is_skipped_and_run_continues(tiny_gpt2_checkpoint):
    # An over-long prompt overflows max_length for one pair only.
    subjects = ["rabbit", "cat " * 40]
    out = io.StringIO()
    stats = generate_records(
        tiny_gpt2_checkpoint, subjects, ["AtLocation"],
        small_config("gpt2xl", max_length=8), out, family="gpt2xl",
    )
    assert stats.pairs_total == 2
    assert stats.pairs_failed >= 1
    assert stats.records_written > 0
    records, report = read_generation_records(io.StringIO(out.getvalue()))
    assert report.records_rejected == 0
    assert all(r.subject == "rabbit" for r in records)


def test_prompt_template_override(tiny_gpt2_checkpoint):
    out = io.StringIO()
    generate_records(
        tiny_gpt2_checkpoint, ["rabbit"], ["AtLocation"],
        small_config("gpt2xl"), out, family="gpt2xl",
        prompt_template="{predicate} {subject}",
    )
    records, report = read_generation_records(io.StringIO(out.getvalue()))
    assert report.records_rejected == 0
    assert records
