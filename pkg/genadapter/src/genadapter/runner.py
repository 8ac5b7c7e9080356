"""Batch generation harness: runs beam search over a subject x predicate
grid and emits one JSON line per beam, with raw per-token log-probabilities.

Scores are never pre-aggregated here; the consumer owns the summation rule.
The per-token values are the exact log-softmax terms the beam search
accumulated (transition scores, unrenormalized), so their sum reconciles
with the decoder-reported sequence score.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable

from .config import FAMILIES, DecoderConfig, UnknownFamily

logger = logging.getLogger(__name__)

# Default serialization of a (subject, predicate) query fed to the model.
# Fine-tuned checkpoints may expect a different scheme; override per run.
DEFAULT_PROMPT_TEMPLATE = "{subject} {predicate}"


@dataclass
class GenerationStats:
    pairs_total: int = 0
    pairs_failed: int = 0
    records_written: int = 0
    # Decoder-reported sequence scores (length-normalized), aligned with the
    # emitted records; populated when capture_reported_scores is set.
    reported_scores: list[float] = field(default_factory=list)


def _load(model_ref: str, family: str, device: str):
    if family not in FAMILIES:
        raise UnknownFamily(f"unknown model family {family!r}, expected one of {FAMILIES}")
    from transformers import AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_ref)
    if family == "bart":
        from transformers import AutoModelForSeq2SeqLM

        model = AutoModelForSeq2SeqLM.from_pretrained(model_ref)
    else:
        from transformers import AutoModelForCausalLM

        model = AutoModelForCausalLM.from_pretrained(model_ref)
    return tokenizer, model.to(device).eval()


def _completed_length(tokens: list[int], eos_id: int | None, pad_id: int | None) -> int:
    """Number of real generated tokens: everything up to and including the
    first EOS; finished beams are padded past it."""
    for i, t in enumerate(tokens):
        if eos_id is not None and t == eos_id:
            return i + 1
        if pad_id is not None and t == pad_id:
            return i
    return len(tokens)


def generate_records(
    model_ref: str,
    subjects: list[str],
    predicates: Iterable[str],
    config: DecoderConfig,
    out: IO[str],
    family: str = "gpt2xl",
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
    device: str = "cpu",
    capture_reported_scores: bool = False,
) -> GenerationStats:
    """Generate up to num_beams completions per (subject, predicate) pair
    and write them as JSON-Lines to `out`.

    A model that fails to load is fatal; a pair that fails to generate is
    logged and skipped, and the run continues. Lines are written through
    this single writer, so they never interleave.
    """
    if not subjects:
        raise ValueError("subjects list is empty")
    config = config.validated()
    import torch

    tokenizer, model = _load(model_ref, family, device)
    model_name = str(model_ref)
    stats = GenerationStats()

    for subject in subjects:
        for predicate in predicates:
            stats.pairs_total += 1
            prompt = prompt_template.format(subject=subject, predicate=predicate)
            try:
                written = _generate_pair(
                    tokenizer, model, family, prompt, subject, predicate,
                    config, out, model_name, device, stats, capture_reported_scores, torch,
                )
            except Exception as exc:
                logger.warning("pair (%s, %s) failed: %s", subject, predicate, exc)
                stats.pairs_failed += 1
                continue
            if written == 0:
                logger.warning("pair (%s, %s) produced no completions", subject, predicate)
                stats.pairs_failed += 1
    return stats


def _generate_pair(
    tokenizer, model, family, prompt, subject, predicate, config, out,
    model_name, device, stats, capture_reported_scores, torch,
) -> int:
    inputs = tokenizer(prompt, return_tensors="pt").to(device)
    with torch.no_grad():
        output = model.generate(
            **inputs,
            num_beams=config.num_beams,
            num_return_sequences=config.num_beams,
            temperature=config.temperature,
            top_p=config.top_p,
            repetition_penalty=config.repetition_penalty,
            max_length=config.max_length,
            no_repeat_ngram_size=config.no_repeat_ngram_size,
            early_stopping=config.early_stopping,
            do_sample=config.do_sample,
            length_penalty=1.0,
            output_scores=True,
            return_dict_in_generate=True,
        )
    # normalize_logits=False: beam search accumulated these exact values, so
    # masking processors (e.g. no-repeat-ngram) cannot skew the sums.
    transition = model.compute_transition_scores(
        output.sequences, output.scores, output.beam_indices, normalize_logits=False
    )
    # Decoder-only models echo the prompt; seq2seq sequences start with the
    # decoder start token.
    prompt_len = 1 if family == "bart" else inputs["input_ids"].shape[1]
    eos_id = tokenizer.eos_token_id
    pad_id = tokenizer.pad_token_id

    written = 0
    for beam_index in range(output.sequences.shape[0]):
        generated = output.sequences[beam_index, prompt_len:].tolist()
        length = _completed_length(generated, eos_id, pad_id)
        if length == 0:
            continue
        logprobs = [min(float(v), 0.0) for v in transition[beam_index, :length].tolist()]
        object_text = tokenizer.decode(generated[:length], skip_special_tokens=True).strip()
        out.write(
            json.dumps(
                {
                    "subject": subject,
                    "predicate": predicate,
                    "object_text": object_text,
                    "token_logprobs": logprobs,
                    "model": model_name,
                    "beam_index": beam_index,
                },
                ensure_ascii=False,
            )
            + "\n"
        )
        written += 1
        stats.records_written += 1
        if capture_reported_scores:
            stats.reported_scores.append(float(output.sequences_scores[beam_index]))
    return written
