"""Inverted index and Okapi BM25 ranking."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .binio import Reader, Writer, check_header
from .corpus import TokenizedDocument

K1 = 1.2
B = 0.75

INDEX_MAGIC = b"OVIX"
INDEX_VERSION = 1


class UnknownDocument(KeyError):
    pass


@dataclass(frozen=True)
class RankedList:
    """``(doc_id, score)`` pairs, best first, ties by ascending doc id."""

    entries: tuple[tuple[str, float], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def doc_ids(self) -> list[str]:
        return [d for d, _ in self.entries]

    def scores(self) -> dict[str, float]:
        return dict(self.entries)

    def top(self, n: int) -> "RankedList":
        return RankedList(self.entries[:n])


def rank(scores: dict[str, float], k: int) -> RankedList:
    ordered = sorted(((d, s) for d, s in scores.items() if s > 0.0), key=lambda p: (-p[1], p[0]))
    return RankedList(tuple(ordered[:k]))


class InvertedIndex:
    """Term postings plus the collection statistics BM25 needs.

    ``postings[term]`` lists ``(doc_id, tf)`` in collection order.
    """

    def __init__(self, doc_ids: Sequence[str], doc_len: Sequence[int],
                 postings: dict[str, list[tuple[str, int]]]):
        self.doc_ids = list(doc_ids)
        self.doc_len = dict(zip(self.doc_ids, doc_len))
        self.postings = postings
        self.df = {t: len(p) for t, p in postings.items()}
        self.N = len(self.doc_ids)
        self.avg_doc_len = sum(doc_len) / self.N if self.N else 0.0
        self._tf_cache: dict[str, dict[str, int]] = {}

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_len

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0)
        if df == 0:
            return 0.0
        return max(0.0, math.log((self.N - df + 0.5) / (df + 0.5)))

    def tf(self, term: str, doc_id: str) -> int:
        tfs = self._tf_cache.get(term)
        if tfs is None:
            tfs = dict(self.postings.get(term, ()))
            self._tf_cache[term] = tfs
        return tfs.get(doc_id, 0)

    def to_bytes(self) -> bytes:
        ordinal = {d: i for i, d in enumerate(self.doc_ids)}
        w = Writer()
        w.raw(INDEX_MAGIC)
        w.u16(INDEX_VERSION)
        w.u32(self.N)
        for d in self.doc_ids:
            w.str(d)
            w.u32(self.doc_len[d])
        w.u32(len(self.postings))
        for term in sorted(self.postings):
            plist = self.postings[term]
            w.str(term)
            w.u32(len(plist))
            for d, tf in plist:
                w.u32(ordinal[d])
                w.u32(tf)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "InvertedIndex":
        r = Reader(data)
        check_header(r, INDEX_MAGIC, INDEX_VERSION)
        n = r.u32()
        ids, lens = [], []
        for _ in range(n):
            ids.append(r.str())
            lens.append(r.u32())
        postings = {}
        for _ in range(r.u32()):
            term = r.str()
            postings[term] = [(ids[r.u32()], r.u32()) for _ in range(r.u32())]
        r.expect_end()
        return cls(ids, lens, postings)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "InvertedIndex":
        return cls.from_bytes(Path(path).read_bytes())


def build_index(docs: Sequence[TokenizedDocument]) -> InvertedIndex:
    if not docs:
        raise ValueError("cannot index an empty collection")
    ids = [d.doc_id for d in docs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate document ids")
    postings: dict[str, list[tuple[str, int]]] = {}
    for doc in docs:
        for term, tf in Counter(doc.tokens).items():
            postings.setdefault(term, []).append((doc.doc_id, tf))
    return InvertedIndex(ids, [d.length for d in docs], postings)


def score_all(index: InvertedIndex, terms: Iterable[str], k1: float = K1, b: float = B) -> dict[str, float]:
    """BM25 score of every document sharing a term with the query.

    Per-document contributions are combined with ``math.fsum`` so equal
    multisets of contributions give bit-identical scores and exact ties.
    """
    qtf = Counter(terms)
    parts: dict[str, list[float]] = {}
    avgdl = index.avg_doc_len
    doc_len = index.doc_len
    for term in sorted(qtf):
        idf = index.idf(term)
        if idf <= 0.0:
            continue
        weight = qtf[term] * idf
        for d, tf in index.postings[term]:
            norm = k1 * (1.0 - b + b * doc_len[d] / avgdl)
            parts.setdefault(d, []).append(weight * tf * (k1 + 1.0) / (tf + norm))
    return {d: math.fsum(p) for d, p in parts.items()}


def search(index: InvertedIndex, terms: Iterable[str], k: int,
           k1: float = K1, b: float = B) -> RankedList:
    if k < 1:
        raise ValueError("k must be at least 1")
    return rank(score_all(index, terms, k1, b), k)


def rel_term_freq(index: InvertedIndex, term: str, doc_id: str) -> float:
    if doc_id not in index.doc_len:
        raise UnknownDocument(f"unknown document {doc_id!r}")
    dl = index.doc_len[doc_id]
    return index.tf(term, doc_id) / dl if dl else 0.0
