import pytest

from genadapter.config import DecoderConfig, PREDICATES, UnknownFamily, default_config


def test_gpt2xl_defaults_match_published_table():
    config = default_config("gpt2xl")
    assert config == DecoderConfig(
        num_beams=10,
        temperature=1.0,
        top_p=0.9,
        repetition_penalty=1.0,
        max_length=16,
        no_repeat_ngram_size=0,
        early_stopping=True,
        do_sample=False,
    )


def test_bart_defaults_match_published_table():
    config = default_config("bart")
    assert config == DecoderConfig(
        num_beams=10,
        temperature=1.0,
        top_p=1.0,
        repetition_penalty=1.0,
        max_length=24,
        no_repeat_ngram_size=3,
        early_stopping=True,
        do_sample=False,
    )


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        default_config("t5")


@pytest.mark.parametrize(
    "override",
    [{"num_beams": 0}, {"temperature": 0.0}, {"top_p": 0.0}, {"top_p": 1.5}],
)
def test_config_validation(override):
    with pytest.raises(ValueError):
        default_config("gpt2xl")._replace(**override).validated()


def test_predicate_vocabulary_is_the_closed_13():
    assert len(PREDICATES) == 13
    assert PREDICATES[0] == "AtLocation"
    assert "IsA" not in PREDICATES
