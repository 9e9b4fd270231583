"""Seeded synthetic test collections with topical structure.

Each document belongs to a subtopic.  Documents mix frequent background
words, words of their topic, and one or two rare words specific to their
subtopic.  A query names its topic's words plus the rare words of one
subtopic, and the subtopic's documents are the relevant set.  With a
vocabulary cut between topic-word and rare-word frequencies, the rare
query words are exactly the out-of-vocabulary ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import RawDocument
from .phonetics import VOWELS, syllabify, unsyllabify

ONSETS = ("", "k", "s", "t", "n", "h", "m", "r", "g", "d", "b", "p", "y", "w", "ch", "sh", "ts")
NUCLEI = ("a", "i", "u", "e", "o")
FILLERS = ("the", "of", "and", "in", "to", "a", "is")


@dataclass
class Collection:
    docs: list[RawDocument]
    queries: list[RawDocument]
    qrels: dict[str, frozenset[str]]
    rare_words: dict[str, tuple[str, ...]]
    topic_words: list[tuple[str, ...]]
    vocab_size: int


def make_word(rng: random.Random, n_syl: int) -> str:
    parts = []
    for k in range(n_syl):
        onset = rng.choice(ONSETS)
        if k > 0 and onset == "" and parts[-1][-1] in VOWELS:
            onset = "k"
        v = rng.choice(NUCLEI)
        part = onset + v
        r = rng.random()
        if r < 0.08:
            part += v
        elif r < 0.16 and k < n_syl - 1:
            part += "n"
        parts.append(part)
    return "".join(parts)


def _fresh_words(rng: random.Random, n: int, lo: int, hi: int, taken: set[str]) -> list[str]:
    out = []
    while len(out) < n:
        w = make_word(rng, rng.randint(lo, hi))
        if w in taken or w in FILLERS or unsyllabify(syllabify(w)) != w:
            continue
        taken.add(w)
        out.append(w)
    return out


def generate(n_docs: int = 500, n_topics: int = 20, subtopics: int = 5, n_queries: int = 20,
             topic_size: int = 12, n_background: int = 120, doc_len: tuple[int, int] = (40, 80),
             seed: int = 0) -> Collection:
    rng = random.Random(seed)
    taken: set[str] = set()
    background = _fresh_words(rng, n_background, 1, 3, taken)
    topics = [tuple(_fresh_words(rng, topic_size, 2, 4, taken)) for _ in range(n_topics)]
    rare: dict[tuple[int, int], tuple[str, ...]] = {}
    for t in range(n_topics):
        for s in range(subtopics):
            rare[t, s] = tuple(_fresh_words(rng, 2, 3, 5, taken))
    bg_weights = [1.0 / (r + 1) ** 0.8 for r in range(n_background)]

    slots = [(t, s) for t in range(n_topics) for s in range(subtopics)]
    docs = []
    members: dict[tuple[int, int], list[str]] = {k: [] for k in slots}
    for i in range(n_docs):
        t, s = slots[i % len(slots)] if i < len(slots) else rng.choice(slots)
        doc_id = f"d{i:05d}"
        length = rng.randint(*doc_len)
        n_topic = int(length * 0.45)
        toks = rng.choices(background, bg_weights, k=length - n_topic)
        toks += [rng.choice(topics[t]) for _ in range(n_topic)]
        for w in rare[t, s]:
            if rng.random() < 0.8:
                toks += [w] * rng.randint(1, 2)
        rng.shuffle(toks)
        words = []
        for tok in toks:
            if rng.random() < 0.15:
                words.append(rng.choice(FILLERS))
            words.append(tok)
        docs.append(RawDocument(doc_id, " ".join(words) + "."))
        members[t, s].append(doc_id)

    queries, qrels, rare_by_query = [], {}, {}
    topic_order = list(range(n_topics))
    rng.shuffle(topic_order)
    for qi in range(n_queries):
        t = topic_order[qi % n_topics]
        s = rng.randrange(subtopics)
        qid = f"q{qi:03d}"
        oov = rare[t, s][: rng.randint(1, 2)]
        words = rng.sample(topics[t], 5) + list(oov)
        rng.shuffle(words)
        text = " ".join(words[:2]) + " of the " + " ".join(words[2:])
        queries.append(RawDocument(qid, text))
        qrels[qid] = frozenset(members[t, s])
        rare_by_query[qid] = oov

    # vocabulary cut: every word more frequent than the most frequent rare word
    cf: dict[str, int] = {}
    for d in docs:
        for w in d.text.rstrip(".").split():
            cf[w] = cf.get(w, 0) + 1
    rare_set = {w for ws in rare.values() for w in ws}
    ceiling = max(cf.get(w, 0) for w in rare_set)
    vocab_size = sum(1 for w, c in cf.items() if c > ceiling and w not in FILLERS)
    return Collection(docs, queries, qrels, rare_by_query, topics, vocab_size)
