from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chordrules.corpus import Corpus, Piece, count_windows
from chordrules.errors import NoObservationsError, RuleFormatError
from chordrules.features import IntVector, OrderString, enumerate_features, parse_feature
from chordrules.rules import (Histogram, Rule, RuleSpec, context_marginal, dominating_peak,
                              extract, parse_rule, serialize_rule)
from chordrules.synth import synth_corpus

from oracles import naive_counts

ID1 = parse_feature("window[1] |> id")
ORDER4 = parse_feature("window[1,2,3,4] |> order")
FEATURES3 = enumerate_features(3, 2)


def corpus_of(*pieces):
    return Corpus(tuple(Piece(f"p{i}", tuple(p)) for i, p in enumerate(pieces)))


def v(x):
    return IntVector((x,))


def test_unigram_counts():
    rule = extract(corpus_of([(1,), (1,), (2,)]), RuleSpec(ID1))
    assert rule.histogram == Histogram({v(1): 2, v(2): 1})
    assert rule.histogram.fraction(v(1)) == Fraction(2, 3)
    assert rule.histogram.probability(v(2)) == pytest.approx(1 / 3)


def test_bigram_counts():
    rule = extract(corpus_of([(1,), (2,), (1,), (2,)]), RuleSpec.conditional(ID1))
    assert rule.tables == {(v(1),): Histogram({v(2): 2}), (v(2),): Histogram({v(1): 1})}
    assert rule.tables[(v(1),)].probability(v(2)) == 1


def test_context_defaults_to_target():
    assert RuleSpec.conditional(ORDER4).context == ORDER4
    other = parse_feature("window[1] |> mod12")
    assert RuleSpec.conditional(ORDER4, 3, other).context == other


def test_spec_validation():
    with pytest.raises(ValueError, match="context required"):
        RuleSpec(ID1, 2)
    with pytest.raises(ValueError):
        RuleSpec(ID1, 1, ID1)
    with pytest.raises(ValueError):
        RuleSpec(ID1, 0)


def test_no_crossing_corpus_is_all_descending():
    corpus = synth_corpus(4, 50, pieces=3, seed=11, crossing_rate=0.0)
    rule = extract(corpus, RuleSpec(ORDER4))
    assert rule.histogram == Histogram({OrderString("4<3<2<1"): 150})


def test_no_observations():
    with pytest.raises(NoObservationsError, match="no observations"):
        extract(Corpus(), RuleSpec(ID1))
    with pytest.raises(NoObservationsError):
        extract(corpus_of([(1,)], [(2,)]), RuleSpec.conditional(ID1))


def test_arity_checked():
    with pytest.raises(ValueError):
        extract(corpus_of([(1, 2)]), RuleSpec(ORDER4))


@pytest.mark.parametrize("hist, expected", [
    ({"a": 9, "b": 1}, ("a", 0.9)),
    ({"a": 1, "b": 1}, None),
    ({"a": 4, "b": 3, "c": 3}, None),
    ({"a": 1}, ("a", 1.0)),
    ({"a": 1, "b": 1, "c": 2}, ("c", 0.5)),
    ({"a": 2, "b": 1, "c": 1}, ("a", 0.5)),
])
def test_dominating_peak(hist, expected):
    assert dominating_peak(Histogram(hist), 0.5) == expected


def test_dominating_peak_threshold_range():
    with pytest.raises(ValueError):
        dominating_peak(Histogram({"a": 1}), 0)


def test_context_marginal():
    rule = extract(corpus_of([(1,), (2,), (1,), (2,)]), RuleSpec.conditional(ID1))
    assert context_marginal(rule) == Histogram({(v(1),): 2, (v(2),): 1})
    single = extract(corpus_of([(1,), (2,)]), RuleSpec.conditional(ID1))
    assert context_marginal(single).probabilities() == {(v(1),): 1.0}
    with pytest.raises(ValueError):
        context_marginal(extract(corpus_of([(1,)]), RuleSpec(ID1)))


def test_rule_invariants():
    with pytest.raises(ValueError):
        Rule(RuleSpec(ID1), {})
    with pytest.raises(ValueError):
        Rule(RuleSpec(ID1), {(): Histogram({})})
    with pytest.raises(ValueError):
        Histogram({"a": -1})


# ------------------------------------------------------------------ files


def test_serialize_unigram_format():
    rule = extract(corpus_of([(67, 60, 55, 48)] * 9 + [(67, 60, 48, 55)]), RuleSpec(ORDER4))
    assert serialize_rule(rule) == (
        "feature: window[1,2,3,4] |> order\n"
        "gram: 1\n"
        "4<3<2<1\t9\n"
        "3<4<2<1\t1\n"
    )


def test_serialize_bigram_format():
    spec = RuleSpec(parse_feature("window[1] |> mod12"), 2, parse_feature("window[1,2] |> order"))
    rule = extract(corpus_of([(60, 50), (62, 70), (64, 50), (60, 50), (65, 50)]), spec)
    assert serialize_rule(rule) == (
        "feature: window[1] |> mod12\n"
        "gram: 2\n"
        "context-feature: window[1,2] |> order\n"
        "context: 1<2\n"
        "(4)\t1\n"
        "\n"
        "context: 2<1\n"
        "(0)\t1\n"
        "(2)\t1\n"
        "(5)\t1\n"
    )


def test_serialize_trigram_context_keys():
    spec = RuleSpec.conditional(parse_feature("window[1,2] |> diff"), 3)
    rule = extract(corpus_of([(60, 55), (62, 50), (64, 60)]), spec)
    text = serialize_rule(rule)
    assert "context: (5),(12)\n(4)\t1\n" in text
    assert parse_rule(text) == rule


@pytest.mark.parametrize("text, line, message", [
    ("gram: 1\n", 1, "malformed header"),
    ("feature: window[1] |> id\ngram: x\n", 2, "malformed header"),
    ("feature: window[1] |> nope\ngram: 1\n(1)\t1\n", 1, "malformed header"),
    ("feature: window[1] |> id\ngram: 2\n(1)\t1\n", 3, "malformed header"),
    ("feature: window[1] |> id\ngram: 1\n(1)\t1.5\n", 3, "non-integer count"),
    ("feature: window[1] |> id\ngram: 1\n(1)\t1\n(2)\t3\n(1)\t2\n", 5, "duplicate value line"),
    ("feature: window[1] |> id\ngram: 1\n(1) 1\n", 3, "malformed histogram line"),
    ("feature: window[1] |> id\ngram: 2\ncontext-feature: window[1] |> id\n(1)\t1\n", 4,
     "histogram line before any context"),
    ("feature: window[1] |> id\ngram: 2\ncontext-feature: window[1] |> id\n"
     "context: (1)\n(1)\t1\n\ncontext: (1)\n(2)\t1\n", 7, "duplicate context block"),
])
def test_parse_rule_errors(text, line, message):
    with pytest.raises(RuleFormatError) as info:
        parse_rule(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"{message} at line {line}")


def test_parse_rule_empty_histogram():
    with pytest.raises(RuleFormatError, match="empty histogram"):
        parse_rule("feature: window[1] |> id\ngram: 1\n")


# -------------------------------------------------------------- properties

events = st.one_of(st.none(), st.integers(40, 52))


@st.composite
def small_corpora(draw, n=3, max_chords=50):
    sizes = draw(st.lists(st.integers(1, 12), min_size=1, max_size=5))
    budget, pieces = max_chords, []
    for size in sizes:
        size = min(size, budget)
        if size == 0:
            break
        budget -= size
        pieces.append(draw(st.lists(st.tuples(*[events] * n), min_size=size, max_size=size)))
    return corpus_of(*pieces)


def as_plain(rule):
    return {tuple(map(str, key)): {str(val): n for val, n in h.items()} for key, h in rule.tables.items()}


def as_pair(expr):
    return expr.window.indices, [b.value for b in expr.chain]


@settings(max_examples=150)
@given(small_corpora(), st.sampled_from(FEATURES3), st.sampled_from(FEATURES3), st.integers(1, 3))
def test_matches_naive_counter(corpus, target, context, k):
    spec = RuleSpec(target, k, context if k > 1 else None)
    expected = naive_counts([p.chords for p in corpus.pieces], k, as_pair(target), as_pair(context))
    if not expected:
        with pytest.raises(NoObservationsError):
            extract(corpus, spec)
        return
    assert as_plain(extract(corpus, spec)) == expected


@settings(max_examples=150)
@given(small_corpora(), st.sampled_from(FEATURES3), st.sampled_from(FEATURES3), st.integers(1, 3))
def test_normalization_and_conservation(corpus, target, context, k):
    spec = RuleSpec(target, k, context if k > 1 else None)
    if count_windows(corpus, k) == 0:
        return
    rule = extract(corpus, spec)
    for hist in rule.tables.values():
        assert abs(sum(hist.probabilities().values()) - 1.0) <= 1e-9
        assert sum(hist.fraction(x) for x in hist) == 1
    assert rule.n_observations == count_windows(corpus, k)


@settings(max_examples=150)
@given(small_corpora(), st.sampled_from(FEATURES3), st.sampled_from(FEATURES3))
def test_total_probability(corpus, target, context):
    if count_windows(corpus, 2) == 0:
        return
    bigram = extract(corpus, RuleSpec(target, 2, context))
    # 1-gram over target positions 2..T only
    tail = Corpus(tuple(Piece(p.name, p.chords[1:]) for p in corpus.pieces if len(p) > 1))
    unigram = extract(tail, RuleSpec(target)).histogram
    marginal = context_marginal(bigram)
    mixture = Counter()
    for key, hist in bigram.tables.items():
        assert marginal[key] == hist.total
        mixture.update(hist)
    assert Histogram(dict(mixture)) == unigram
    for val in unigram:
        p = sum(marginal.probability(key) * h.probability(val) for key, h in bigram.tables.items())
        assert abs(p - unigram.probability(val)) <= 1e-9


@settings(max_examples=100)
@given(small_corpora(), st.sampled_from(FEATURES3), st.integers(1, 3), st.randoms())
def test_merge_associativity(corpus, target, k, rnd):
    spec = RuleSpec(target, k, target if k > 1 else None)
    parts = [Corpus((p,)) for p in corpus.pieces if len(p) >= k]
    if not parts:
        return
    whole = extract(corpus, spec)
    rnd.shuffle(parts)
    merged = None
    for part in parts:
        r = extract(part, spec)
        merged = r if merged is None else merged + r
    assert merged == whole
    assert serialize_rule(merged) == serialize_rule(whole)


@settings(max_examples=100)
@given(small_corpora(), st.sampled_from(FEATURES3), st.sampled_from(FEATURES3), st.integers(1, 3))
def test_rule_file_roundtrip(corpus, target, context, k):
    if count_windows(corpus, k) == 0:
        return
    rule = extract(corpus, RuleSpec(target, k, context if k > 1 else None))
    text = serialize_rule(rule)
    assert parse_rule(text) == rule
    assert serialize_rule(parse_rule(text)) == text
    assert "." not in "".join(line.rpartition("\t")[2] for line in text.splitlines())


def test_parallel_extraction_is_identical():
    corpus = synth_corpus(4, 200, pieces=12, seed=3, crossing_rate=0.2)
    spec = RuleSpec.conditional(ORDER4)
    serial = serialize_rule(extract(corpus, spec))
    for workers in (2, 4, 8):
        assert serialize_rule(extract(corpus, spec, workers=workers)) == serial


def test_histogram_mapping_behaviour():
    h = Histogram(["a", "b", "a"])
    assert dict(h) == {"a": 2, "b": 1}
    assert h.total == 3 and len(h) == 2
    assert h + Histogram({"b": 1, "c": 4}) == Histogram({"a": 2, "b": 2, "c": 4})
    assert h.ranked() == [("a", 2), ("b", 1)]
    assert Histogram({"a": 0, "b": 1}) == Histogram({"b": 1})
