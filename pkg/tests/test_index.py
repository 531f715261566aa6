import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldrank.analysis import analyze
from fieldrank.index import (
    INDEX_MAGIC,
    Document,
    IndexBuilder,
    IndexFormatError,
    build_index,
    load_stats,
    open_index,
    read_corpus,
    save_index,
    write_stats,
)
from tests.corpora import CANONICAL, documents, random_corpus, seeded


@pytest.fixture
def canonical():
    return build_index(documents(CANONICAL), ["body"])


def test_three_doc_totals(canonical):
    stats = canonical.stats
    assert stats.n_docs == 3
    assert stats.field_total_len["body"] == 7
    assert stats.field_avg_len["body"] == 7 / 3


def test_empty_body_counts_in_n_only():
    builder = IndexBuilder(["body"])
    builder.add_document(Document("a", {"body": "x y"}))
    builder.add_document(Document("b", {"body": ""}))
    index = builder.commit()
    assert index.stats.n_docs == 2
    assert index.stats.field_total_len["body"] == 2
    assert index.stats.field_avg_len["body"] == 1.0


def test_duplicate_id_rejected_and_builder_unchanged():
    builder = IndexBuilder(["body"])
    builder.add_document(Document("a", {"body": "x"}))
    with pytest.raises(ValueError, match="'a'"):
        builder.add_document(Document("a", {"body": "y"}))
    assert len(builder) == 1
    assert builder.commit().doc_freq("body", "y") == 0


def test_undeclared_field_rejected():
    builder = IndexBuilder(["body"])
    with pytest.raises(ValueError, match="undeclared"):
        builder.add_document(Document("a", {"title": "x"}))
    assert len(builder) == 0


@pytest.mark.parametrize("name", ["", "a\tb", "a\nb"])
def test_bad_field_names(name):
    with pytest.raises(ValueError):
        Document("a", {name: "x"})
    with pytest.raises(ValueError):
        IndexBuilder([name])


def test_empty_commit():
    index = IndexBuilder().commit()
    assert index.n_docs == 0
    assert dict(index.stats.field_avg_len) == {}


def test_doc_freq_and_lengths(canonical):
    assert canonical.doc_freq("body", "dog") == 1
    assert canonical.doc_freq("body", "the") == 2
    assert canonical.doc_freq("body", "zzz") == 0
    assert canonical.doc_freq("nosuchfield", "the") == 0
    assert canonical.postings("nosuchfield", "the") == ()
    assert canonical.field_length(2, "body") == 1
    assert canonical.postings("body", "cat") == ((0, 1), (1, 2))
    with pytest.raises(IndexError):
        canonical.field_length(3, "body")


def test_fields_discovered_late_get_zero_lengths():
    index = build_index([Document("a", {"body": "x"}), Document("b", {"title": "y z"})])
    assert index.fields == ("body", "title")
    assert index.field_length(0, "title") == 0
    assert index.stats.field_avg_len["title"] == 1.0


def test_stats_round_trip(tmp_path, canonical):
    path = tmp_path / "s.stats"
    write_stats(canonical.stats, path)
    assert path.read_text(encoding="utf-8") == "body\t2.3333333333333335\n"
    assert load_stats(path) == {"body": 2.3333333333333335}


def test_stats_sorted_and_empty(tmp_path):
    path = tmp_path / "s.stats"
    write_stats({"z": 1.0, "a": 0.1 + 0.2}, path)
    assert path.read_text().splitlines() == ["a\t0.30000000000000004", "z\t1.0"]
    write_stats({}, path)
    assert path.read_text() == ""
    assert load_stats(path) == {}


@pytest.mark.parametrize(
    "content, lineno",
    [
        ("body\n", 1),
        ("body\t1.0\ntitle\tabc\n", 2),
        ("body\t1.0\nbody\t2.0\n", 2),
        ("a\t1\n\nb\t2\n", 2),
        ("a\t-1\n", 1),
        ("a\tnan\n", 1),
    ],
)
def test_malformed_stats(tmp_path, content, lineno):
    path = tmp_path / "bad.stats"
    path.write_text(content)
    with pytest.raises(IndexFormatError, match=f":{lineno}:"):
        load_stats(path)


def _snapshot(index):
    """Everything query-visible, keyed by external id."""
    ext = index.ext_id
    return (
        index.stats.n_docs,
        dict(index.stats.field_total_len),
        dict(index.stats.field_avg_len),
        {f: dict(d) for f, d in index.stats.doc_freq.items()},
        {
            f: {t: sorted((ext(p.doc), p.tf) for p in index.postings(f, t)) for t in index.terms(f)}
            for f in index.fields
        },
        {f: {ext(i): index.field_length(i, f) for i in range(index.n_docs)} for f in index.fields},
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_index_invariants(seed):
    rng = seeded(seed)
    fields, _, pairs = random_corpus(rng)
    index = build_index(documents(pairs), fields)
    for f in fields:
        assert sum(index.field_length(i, f) for i in range(index.n_docs)) == index.stats.field_total_len[f]
        for i, (_, doc_fields) in enumerate(pairs):
            assert index.field_length(i, f) == len(analyze(doc_fields.get(f, "")))
        for term in index.terms(f):
            plist = index.postings(f, term)
            assert len(plist) == index.doc_freq(f, term) == index.stats.df(f, term)
            assert 0 < len(plist) <= index.n_docs
            assert [p.doc for p in plist] == sorted({p.doc for p in plist})
            for p in plist:
                assert p.tf == Counter(analyze(pairs[p.doc][1].get(f, "")))[term] >= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_insertion_order_does_not_matter(seed):
    rng = seeded(seed)
    fields, _, pairs = random_corpus(rng)
    shuffled = pairs[:]
    random.Random(seed + 1).shuffle(shuffled)
    a = build_index(documents(pairs), fields)
    b = build_index(documents(shuffled), fields)
    assert _snapshot(a) == _snapshot(b)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_index_file_round_trip(tmp_path_factory, seed):
    fields, _, pairs = random_corpus(seeded(seed))
    index = build_index(documents(pairs), fields)
    path = tmp_path_factory.mktemp("idx") / "i.idx"
    save_index(index, path)
    again = open_index(path)
    assert again.fields == index.fields
    assert _snapshot(again) == _snapshot(index)
    assert [again.ext_id(i) for i in range(again.n_docs)] == [index.ext_id(i) for i in range(index.n_docs)]


def test_index_file_rejects_foreign_and_future(tmp_path, canonical):
    path = tmp_path / "i.idx"
    save_index(canonical, path)
    raw = path.read_bytes()
    assert raw.startswith(INDEX_MAGIC)

    path.write_bytes(raw[:8] + b"\x00\x63" + raw[10:])
    with pytest.raises(IndexFormatError, match="version 99"):
        open_index(path)
    path.write_bytes(b"NOTANIDX" + raw[8:])
    with pytest.raises(IndexFormatError, match="not an index"):
        open_index(path)
    path.write_bytes(raw[:20])
    with pytest.raises(IndexFormatError, match="corrupt"):
        open_index(path)


def test_read_corpus(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"id": "a", "fields": {"body": "x"}}\n\n{"id": "b", "fields": {}}\n')
    assert [d.ext_id for d in read_corpus(path)] == ["a", "b"]
    path.write_text('{"id": "a", "fields": {"body": "x"}}\n{"id": "b"}\n')
    with pytest.raises(IndexFormatError, match=":2:"):
        list(read_corpus(path))
    path.write_text("not json\n")
    with pytest.raises(IndexFormatError, match=":1:"):
        list(read_corpus(path))
