import pytest
from hypothesis import given, strategies as st

from sentcomp.errors import ConfigurationError
from sentcomp.pipeline import default_tagger
from sentcomp.tagger import (
    LEAF_TAGS, PENN_MAP, TaggerModel, map_tag, parse_tagged_line, read_tagged_corpus, shape_tag,
    train_tagger,
)
from sentcomp.tokens import tokenize

PENN_TAGS = [
    "JJ", "JJR", "JJS", "RB", "RBR", "RBS", "CC", "CD", "DT", "EX", "IN",
    "NN", "NNP", "NNPS", "NNS", "PRP", "PRP$", "WP$", "TO",
    "MD", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WRB",
]


def test_penn_map_total_and_closed():
    for tag in PENN_TAGS:
        assert map_tag(tag) in LEAF_TAGS
    assert set(PENN_MAP.values()) <= set(LEAF_TAGS)
    assert map_tag("VBD") == "V"
    assert map_tag("NNS") == "N"
    assert map_tag("JJS") == "ADJ"
    assert map_tag("FOO") is None


def test_single_pair_training():
    model = train_tagger([[("the", "DT")]])
    assert model.tag(["the"]) == ["DT"]
    assert model.tag([]) == []


def test_saw_maps_to_verb():
    model = train_tagger([[("I", "PRP"), ("saw", "VBD"), ("it", "PRP")]])
    assert model.emissions["V"]["saw"] == 1


def test_sample_sentence_tags():
    tags = default_tagger().tag(tokenize("The man saw the dog with the telescope ."))
    assert tags == ["DT", "N", "V", "DT", "N", "IN", "DT", "N", "SYM"]


def test_statement_sentence_tags():
    tags = default_tagger().tag(tokenize("This is an example to test sentence compression with MIP model ."))
    assert tags == ["DT", "V", "DT", "N", "TO", "V", "N", "N", "IN", "N", "N", "SYM"]


def test_unknown_word_shapes():
    model = train_tagger([[("the", "DT"), ("dog", "NN")]])
    assert model.tag(["."]) == ["SYM"]
    assert model.tag(["Zork", "Quux", "Blarg"]) == ["N", "N", "N"]
    assert model.tag(["1984"]) == ["CD"]
    assert shape_tag("!?") == "SYM"


def test_lowercase_fallback():
    model = train_tagger([[("the", "DT"), ("dog", "NN")]])
    assert model.tag(["The", "dog"]) == ["DT", "N"]


def test_skipped_tags_counted_and_all_unmapped_rejected():
    model = train_tagger([[("the", "DT"), ("(", "-LRB-")]])
    assert model.skipped == 1
    with pytest.raises(ConfigurationError):
        train_tagger([[("(", "-LRB-")]])


@given(st.lists(st.sampled_from(["the", "dog", "ran", "Zork", "42", ".", "quickly", "xyz"]), max_size=10))
def test_length_closed_set_determinism(sentence):
    model = default_tagger()
    tags = model.tag(sentence)
    assert len(tags) == len(sentence)
    assert set(tags) <= set(LEAF_TAGS)
    assert model.tag(sentence) == tags


def test_json_roundtrip(tmp_path):
    model = default_tagger()
    p = tmp_path / "tagger.json"
    model.save(p)
    loaded = TaggerModel.load(p)
    s = tokenize("I shot an elephant in my pajamas .")
    assert loaded.tag(s) == model.tag(s)
    p.write_text("{}")
    with pytest.raises(ConfigurationError):
        TaggerModel.load(p)


def test_tagged_line_parsing(tmp_path):
    assert parse_tagged_line("the/DT 1/2/CD") == [("the", "DT"), ("1/2", "CD")]
    with pytest.raises(ConfigurationError):
        parse_tagged_line("nodelimiter")
    p = tmp_path / "t.txt"
    p.write_text("a/DT b/NN\n\nc/VB\n")
    assert read_tagged_corpus(p) == [[("a", "DT"), ("b", "NN")], [("c", "VB")]]
