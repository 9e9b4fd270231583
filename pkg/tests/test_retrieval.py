import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from openvocab.binio import FormatError
from openvocab.corpus import TokenizedDocument
from openvocab.retrieval import (InvertedIndex, RankedList, UnknownDocument, build_index,
                                 rel_term_freq, search)
from oracles import bm25_oracle


def tdocs(*token_lists):
    return [TokenizedDocument(f"d{i + 1}", tuple(t)) for i, t in enumerate(token_lists)]


def test_build_index_counts():
    idx = build_index(tdocs("a b a".split(), "b c".split()))
    assert idx.df == {"a": 1, "b": 2, "c": 1}
    assert idx.tf("a", "d1") == 2
    assert idx.N == 2
    assert idx.avg_doc_len == 2.5
    for term, plist in idx.postings.items():
        assert idx.df[term] == len(plist)
        assert all(tf >= 1 for _, tf in plist)


def test_single_doc_average():
    assert build_index(tdocs("x y z".split())).avg_doc_len == 3


def test_empty_collection_rejected():
    with pytest.raises(ValueError):
        build_index([])


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        build_index([TokenizedDocument("d", ("a",)), TokenizedDocument("d", ("b",))])


def test_serialization_deterministic_and_lossless(tmp_path):
    docs = tdocs("b a a".split(), "c b".split(), [], "ü ß".split())
    blob = build_index(docs).to_bytes()
    assert blob == build_index(docs).to_bytes()
    assert blob[:4] == b"OVIX"
    back = InvertedIndex.from_bytes(blob)
    assert back.to_bytes() == blob
    assert back.postings == build_index(docs).postings
    path = tmp_path / "idx.bin"
    back.save(path)
    assert InvertedIndex.load(path).doc_len == back.doc_len


@pytest.mark.parametrize("mangle", [
    lambda b: b"XXXX" + b[4:],
    lambda b: b[:4] + b"\x09\x00" + b[6:],
    lambda b: b[:-3],
    lambda b: b + b"\x00",
])
def test_corrupt_index_rejected(mangle):
    blob = build_index(tdocs("a b".split())).to_bytes()
    with pytest.raises(FormatError):
        InvertedIndex.from_bytes(mangle(blob))


def test_absent_term_gives_empty_list():
    assert len(search(build_index(tdocs("a b".split(), "c".split())), ["zzz"], 10)) == 0


def test_sole_term_doc_ranked_first():
    # idf = ln((N - df + .5) / (df + .5)) is exactly 0 at N=2, df=1, so use N=3
    idx = build_index(tdocs(["citrus", "x"], ["y"], ["z"]))
    ranked = search(idx, ["citrus"], 5)
    assert ranked.doc_ids() == ["d1"] and ranked.entries[0][1] > 0
    assert len(search(build_index(tdocs(["citrus"], ["y"])), ["citrus"], 5)) == 0


def test_score_formula_by_hand():
    idx = build_index(tdocs("a a b".split(), "b c".split(), "c d".split()))
    avgdl = 7 / 3
    idf = math.log((3 - 1 + 0.5) / (1 + 0.5))
    expected = 2 * idf * 2 * 2.2 / (2 + 1.2 * (0.25 + 0.75 * 3 / avgdl))
    assert search(idx, ["a", "a"], 1).entries[0] == ("d1", pytest.approx(expected, rel=1e-12))


def test_ties_by_doc_id():
    idx = build_index(tdocs(["q", "x"], ["y"], ["q", "x"], ["z"], ["w"]))
    assert search(idx, ["q"], 10).doc_ids() == ["d1", "d3"]


def test_k_validated():
    with pytest.raises(ValueError):
        search(build_index(tdocs(["a"])), ["a"], 0)


def test_rel_term_freq():
    idx = build_index(tdocs("a a b c".split(), "z z".split()))
    assert rel_term_freq(idx, "a", "d1") == 0.5
    assert rel_term_freq(idx, "q", "d1") == 0.0
    assert rel_term_freq(idx, "z", "d2") == 1.0
    with pytest.raises(UnknownDocument):
        rel_term_freq(idx, "a", "nope")


def random_corpus(rng, n_docs, vocab=25):
    words = [f"w{i}" for i in range(vocab)]
    return [TokenizedDocument(f"d{i:03d}", tuple(rng.choice(words) for _ in range(rng.randint(0, 15))))
            for i in range(n_docs)], words


def test_search_matches_exhaustive_50_docs():
    rng = random.Random(11)
    docs, words = random_corpus(rng, 50)
    idx = build_index(docs)
    for _ in range(20):
        q = [rng.choice(words) for _ in range(rng.randint(1, 5))]
        got = search(idx, q, 10)
        want = bm25_oracle(docs, q, 10)
        assert got.doc_ids() == [d for d, _ in want]
        for (_, s1), (_, s2) in zip(got, want):
            assert abs(s1 - s2) < 1e-9


@given(st.integers(1, 100), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_search_property(n_docs, seed):
    rng = random.Random(seed)
    docs, words = random_corpus(rng, n_docs)
    q = [rng.choice(words + ["unseen"]) for _ in range(rng.randint(1, 6))]
    got = search(build_index(docs), q, 1000)
    assert got.doc_ids() == [d for d, _ in bm25_oracle(docs, q, 1000)]
    scores = [s for _, s in got]
    assert all(s > 0 for s in scores)
    assert scores == sorted(scores, reverse=True)


def test_adding_a_document_keeps_existing_tf():
    rng = random.Random(5)
    docs, _ = random_corpus(rng, 20)
    before = build_index(docs)
    after = build_index(docs + [TokenizedDocument("new", ("w1", "w1", "w2"))])
    for term, plist in before.postings.items():
        for d, tf in plist:
            assert after.tf(term, d) == tf


def test_ranked_list_helpers():
    rl = RankedList((("a", 2.0), ("b", 1.0)))
    assert rl.top(1).doc_ids() == ["a"]
    assert rl.scores() == {"a": 2.0, "b": 1.0}
