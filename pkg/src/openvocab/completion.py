"""Query completion: phonetic candidate lookup over words and word bigrams,
candidate scoring against the first-stage ranking, and fragment replacement.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Collection, Iterable, Mapping, Sequence

from .asr_sim import Fragment, Token, TranscribedQuery, Word
from .binio import Reader, Writer, check_header
from .config import Config
from .corpus import TokenizedDocument
from .kernels import align_counts
from .phonetics import SyllableSeq, encode, syllabify as default_syllabify
from .retrieval import InvertedIndex, RankedList, rel_term_freq

BIGRAM_SEP = " "
CI_MAGIC = b"OVCI"
CI_VERSION = 1


class _Node:
    __slots__ = ("children", "ids")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.ids: list[int] = []


class SyllableTrie:
    """Trie keyed by syllables; ``with_prefix`` returns every id stored at or below a node."""

    def __init__(self):
        self.root = _Node()

    def insert(self, key: Sequence[str], entry_id: int) -> None:
        node = self.root
        for sym in key:
            nxt = node.children.get(sym)
            if nxt is None:
                nxt = node.children[sym] = _Node()
            node = nxt
        node.ids.append(entry_id)

    def with_prefix(self, prefix: Sequence[str]) -> list[int]:
        node = self.root
        for sym in prefix:
            node = node.children.get(sym)
            if node is None:
                return []
        out: list[int] = []
        stack = [node]
        while stack:
            n = stack.pop()
            out.extend(n.ids)
            stack.extend(n.children.values())
        return out


@dataclass
class Entry:
    surface: str
    phon: SyllableSeq
    occurrences: dict[str, int]

    @property
    def is_bigram(self) -> bool:
        return BIGRAM_SEP in self.surface


class CompletionIndex:
    """Words and adjacent-word bigrams reachable by syllable prefix and suffix."""

    def __init__(self, entries: Sequence[Entry], doc_len: Mapping[str, int] | None = None):
        self.entries = list(entries)
        self.doc_len = dict(doc_len or {})
        self.forward = SyllableTrie()
        self.backward = SyllableTrie()
        self.codes: list[list[int]] = []
        self.by_surface: dict[str, int] = {}
        for i, e in enumerate(self.entries):
            self.forward.insert(e.phon, i)
            self.backward.insert(e.phon[::-1], i)
            self.codes.append(encode(e.phon))
            self.by_surface[e.surface] = i

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, w: SyllableSeq, L: int) -> set[int]:
        m = min(L, len(w))
        return set(self.forward.with_prefix(w[:m])) | set(self.backward.with_prefix(w[::-1][:m]))

    def to_bytes(self) -> bytes:
        doc_ids = list(self.doc_len)
        ordinal = {d: i for i, d in enumerate(doc_ids)}
        wr = Writer()
        wr.raw(CI_MAGIC)
        wr.u16(CI_VERSION)
        wr.u32(len(doc_ids))
        for d in doc_ids:
            wr.str(d)
            wr.u32(self.doc_len[d])
        wr.u32(len(self.entries))
        for e in self.entries:
            wr.str(e.surface)
            wr.u16(len(e.phon))
            for s in e.phon:
                wr.str(s)
            wr.u32(len(e.occurrences))
            for d, c in e.occurrences.items():
                wr.u32(ordinal[d])
                wr.u32(c)
        return wr.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompletionIndex":
        r = Reader(data)
        check_header(r, CI_MAGIC, CI_VERSION)
        doc_ids, doc_len = [], {}
        for _ in range(r.u32()):
            d = r.str()
            doc_ids.append(d)
            doc_len[d] = r.u32()
        entries = []
        for _ in range(r.u32()):
            surface = r.str()
            phon = tuple(r.str() for _ in range(r.u16()))
            occ = {}
            for _ in range(r.u32()):
                d = doc_ids[r.u32()]
                occ[d] = r.u32()
            entries.append(Entry(surface, phon, occ))
        r.expect_end()
        return cls(entries, doc_len)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "CompletionIndex":
        return cls.from_bytes(Path(path).read_bytes())


def build_completion_index(docs: Iterable[TokenizedDocument],
                           syllabify: Callable[[str], SyllableSeq] = default_syllabify) -> CompletionIndex:
    occ: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for doc in docs:
        doc_len[doc.doc_id] = doc.length
        toks = doc.tokens
        counts = Counter(toks)
        counts.update(a + BIGRAM_SEP + b for a, b in zip(toks, toks[1:]))
        for surface, c in counts.items():
            occ.setdefault(surface, {})[doc.doc_id] = c
    phon_cache: dict[str, SyllableSeq] = {}

    def phon_of(word: str) -> SyllableSeq:
        p = phon_cache.get(word)
        if p is None:
            p = phon_cache[word] = tuple(syllabify(word))
        return p

    entries = []
    for surface in sorted(occ):
        if BIGRAM_SEP in surface:
            a, b = surface.split(BIGRAM_SEP)
            phon = phon_of(a) + phon_of(b)
        else:
            phon = phon_of(surface)
        entries.append(Entry(surface, phon, occ[surface]))
    return CompletionIndex(entries, doc_len)


@dataclass(frozen=True)
class Candidate:
    surface: str
    phon: SyllableSeq
    p_wt: float
    occurrences: Mapping[str, int] = field(default_factory=dict, compare=False, repr=False)
    score: float = 0.0
    # alignment edit count between fragment and candidate
    edits: int = 0


def generate_candidates(ci: CompletionIndex, w: SyllableSeq, D_q: Collection[str],
                        theta: float = 0.5, L: int = 2) -> list[Candidate]:
    """Entries in ``D_q`` sharing a length-``min(L, |w|)`` prefix or suffix
    with ``w`` and phonetic similarity at least ``theta``; sorted by surface."""
    if not w:
        raise ValueError("empty fragment")
    if L < 1:
        raise ValueError("L must be at least 1")
    dq = D_q if isinstance(D_q, (set, frozenset)) else set(D_q)
    wc = encode(w)
    out = []
    for eid in ci.lookup(tuple(w), L):
        e = ci.entries[eid]
        if dq.isdisjoint(e.occurrences):
            continue
        m, sub, dele, ins = align_counts(wc, ci.codes[eid])
        p = m / len(wc)
        if p >= theta:
            out.append(Candidate(e.surface, e.phon, p, e.occurrences, edits=sub + dele + ins))
    out.sort(key=lambda c: c.surface)
    return out


def term_doc_prob(index: InvertedIndex, surface: str, doc_id: str, count: int | None = None) -> float:
    """Relative frequency of a word or bigram in a document."""
    if BIGRAM_SEP not in surface:
        return rel_term_freq(index, surface, doc_id)
    pairs = index.doc_len[doc_id] - 1
    return count / pairs if pairs > 0 and count else 0.0


def score_candidate(cand: Candidate, index: InvertedIndex, first_stage: RankedList,
                    D_q: Collection[str], epsilon: float = 1e-9, aggregate: str = "sum") -> float:
    """Sum of ``p_wt * ln(P(t|d) * P(d|q))`` over the ``D_q`` documents containing the term."""
    dq_scores = first_stage.scores()
    dq = D_q if isinstance(D_q, (set, frozenset)) else set(D_q)
    total = 0.0
    n = 0
    for d, _ in first_stage:
        if d not in dq:
            continue
        count = cand.occurrences.get(d)
        if not count:
            continue
        ptd = term_doc_prob(index, cand.surface, d, count)
        pdq = max(dq_scores.get(d, 0.0), epsilon)
        total += cand.p_wt * math.log(ptd * pdq)
        n += 1
    # D_q members missing from the ranked list
    for d in sorted(dq.difference(dq_scores)):
        count = cand.occurrences.get(d)
        if count:
            total += cand.p_wt * math.log(term_doc_prob(index, cand.surface, d, count) * epsilon)
            n += 1
    if n == 0:
        raise ValueError(f"candidate {cand.surface!r} occurs in no document of D_q")
    return total / n if aggregate == "mean" else total


def selection_key(c: Candidate, policy: str = "phonetic"):
    """Sort key putting the preferred candidate first.

    ``score``: highest Eq.-3 score, then higher ``p_wt``, then surface.
    ``phonetic``: higher ``p_wt``, then fewer alignment edits, then score,
    then surface.  Log terms are usually negative, so the plain score
    favours low-similarity and rarely occurring terms (including a bigram
    that merely contains the right word); the phonetic order keeps the
    document evidence for separating equally good sound matches.
    """
    if policy == "score":
        return (-c.score, -c.p_wt, c.surface)
    return (-c.p_wt, c.edits, -c.score, c.surface)


@dataclass
class Resolution:
    position: int
    fragment: Fragment
    choice: Candidate | None
    n_candidates: int
    seconds: float


def resolve_fragments(q: TranscribedQuery, index: InvertedIndex, ci: CompletionIndex,
                      first_stage: RankedList, config: Config | None = None) -> list[Resolution]:
    """Pick the best-scoring candidate for every fragment of ``q``."""
    cfg = config or Config()
    D_q = frozenset(first_stage.top(cfg.N).doc_ids())
    out = []
    for pos, frag in q.fragments():
        t0 = time.perf_counter()
        best = None
        cands = []
        if frag.syllables and D_q:
            cands = generate_candidates(ci, frag.syllables, D_q, cfg.theta, cfg.L)
            scored = [replace(c, score=score_candidate(c, index, first_stage, D_q, cfg.epsilon, cfg.aggregate))
                      for c in cands]
            if scored:
                best = min(scored, key=lambda c: selection_key(c, cfg.selection))
        out.append(Resolution(pos, frag, best, len(cands), time.perf_counter() - t0))
    return out


def apply_resolutions(q: TranscribedQuery, resolutions: Sequence[Resolution]) -> TranscribedQuery:
    chosen = {r.position: r.choice for r in resolutions}
    tokens: list[Token] = []
    for i, tok in enumerate(q.tokens):
        if isinstance(tok, Word):
            tokens.append(tok)
            continue
        cand = chosen.get(i)
        if cand is not None:
            tokens.extend(Word(s) for s in cand.surface.split(BIGRAM_SEP))
    return TranscribedQuery(q.query_id, tokens, [], q.oov_total)


def complete_query(q: TranscribedQuery, index: InvertedIndex, ci: CompletionIndex,
                   first_stage: RankedList, config: Config | None = None) -> TranscribedQuery:
    """Replace each fragment by its best candidate; fragments without one are dropped."""
    return apply_resolutions(q, resolve_fragments(q, index, ci, first_stage, config))
