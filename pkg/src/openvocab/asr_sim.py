"""Closed-vocabulary recognizer surrogate with a seeded syllable noise channel.

In-vocabulary query words pass through as words; every other word comes out
as a syllable fragment after per-syllable substitution, deletion or
insertion.  The gold records remember what each fragment really was.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, Union

from .corpus import RawDocument, StopList, TokenizedDocument, split_terms
from .phonetics import SyllableSeq, syllabify as default_syllabify


@dataclass(frozen=True)
class Word:
    surface: str


@dataclass(frozen=True)
class Fragment:
    syllables: SyllableSeq


Token = Union[Word, Fragment]


@dataclass(frozen=True)
class GoldRecord:
    position: int
    surface: str
    true_oov: bool = True


@dataclass
class TranscribedQuery:
    query_id: str
    tokens: list[Token]
    gold: list[GoldRecord] = field(default_factory=list)
    # true OOV words in the spoken query, including ones the channel erased
    oov_total: int = 0

    def words(self) -> list[str]:
        """In-vocabulary query terms; a bigram word contributes both halves."""
        out = []
        for tok in self.tokens:
            if isinstance(tok, Word):
                out.extend(tok.surface.split(" "))
        return out

    def fragments(self) -> list[tuple[int, Fragment]]:
        return [(i, t) for i, t in enumerate(self.tokens) if isinstance(t, Fragment)]

    def to_json(self) -> dict:
        return {
            "id": self.query_id,
            "tokens": [t.surface if isinstance(t, Word) else {"oov": list(t.syllables)}
                       for t in self.tokens],
            "gold": [{"position": g.position, "surface": g.surface, "oov": g.true_oov}
                     for g in self.gold],
            "oov_total": self.oov_total,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "TranscribedQuery":
        tokens: list[Token] = []
        for t in obj["tokens"]:
            if isinstance(t, str):
                tokens.append(Word(t))
            elif isinstance(t, dict) and isinstance(t.get("oov"), list):
                tokens.append(Fragment(tuple(t["oov"])))
            else:
                raise ValueError(f"bad token {t!r}")
        gold = [GoldRecord(g["position"], g["surface"], g.get("oov", True)) for g in obj.get("gold", [])]
        return cls(obj["id"], tokens, gold, obj.get("oov_total", sum(g.true_oov for g in gold)))


def write_transcribed(queries: Iterable[TranscribedQuery], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps(q.to_json(), ensure_ascii=False) + "\n")


def read_transcribed(path: str | Path) -> list[TranscribedQuery]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(TranscribedQuery.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    return out


@dataclass(frozen=True)
class VocabularyModel:
    words: frozenset[str]
    ranked: tuple[str, ...] = ()

    @property
    def K(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(w + "\n" for w in self.ranked), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "VocabularyModel":
        with open(path, encoding="utf-8") as fh:
            ranked = tuple(ln.strip() for ln in fh if ln.strip())
        return cls(frozenset(ranked), ranked)


def collection_frequencies(docs: Iterable[TokenizedDocument]) -> Counter:
    cf: Counter = Counter()
    for d in docs:
        cf.update(d.tokens)
    return cf


def build_vocabulary(docs: Iterable[TokenizedDocument], K: int) -> VocabularyModel:
    """Top-``K`` words by collection frequency; ties go to the smaller word."""
    if K < 1:
        raise ValueError("K must be at least 1")
    cf = collection_frequencies(docs)
    ranked = tuple(w for w, _ in sorted(cf.items(), key=lambda p: (-p[1], p[0]))[:K])
    return VocabularyModel(frozenset(ranked), ranked)


def syllable_inventory(words: Iterable[str], syllabify: Callable[[str], SyllableSeq] = default_syllabify) -> tuple[str, ...]:
    inv: set[str] = set()
    for w in set(words):
        inv.update(syllabify(w))
    return tuple(sorted(inv))


@dataclass(frozen=True)
class NoiseConfig:
    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    p_false_oov: float = 0.0
    seed: int = 0
    # fixed replacements applied when a substitution fires on a listed syllable
    substitutions: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("p_sub", "p_del", "p_ins", "p_false_oov"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.p_sub + self.p_del + self.p_ins > 1.0 + 1e-12:
            raise ValueError("p_sub + p_del + p_ins must not exceed 1")


def corrupt(syllables: Sequence[str], noise: NoiseConfig, inventory: Sequence[str],
            rng: random.Random) -> list[str]:
    """Apply one mutually exclusive noise event per syllable.

    A single uniform draw per syllable selects substitution, deletion or
    insertion-after (in that order of the unit interval) or nothing.
    """
    out: list[str] = []
    cut_sub = noise.p_sub
    cut_del = cut_sub + noise.p_del
    cut_ins = cut_del + noise.p_ins
    for syl in syllables:
        u = rng.random()
        if u < cut_sub:
            out.append(_substitute(syl, noise, inventory, rng))
        elif u < cut_del:
            continue
        elif u < cut_ins:
            out.append(syl)
            out.append(rng.choice(inventory) if inventory else syl)
        else:
            out.append(syl)
    return out


def _substitute(syl: str, noise: NoiseConfig, inventory: Sequence[str], rng: random.Random) -> str:
    fixed = noise.substitutions.get(syl)
    if fixed is not None:
        return fixed
    others = [s for s in inventory if s != syl]
    return rng.choice(others) if others else syl


def transcribe(query_text: str, vocab: VocabularyModel, noise: NoiseConfig,
               syllabify: Callable[[str], SyllableSeq] = default_syllabify,
               inventory: Sequence[str] = (), stop: StopList | None = None,
               query_id: str = "", seed: int | None = None) -> TranscribedQuery:
    """Simulate recognition of one query; ``seed`` defaults to ``noise.seed``."""
    rng = random.Random(noise.seed if seed is None else seed)
    tokens: list[Token] = []
    gold: list[GoldRecord] = []
    oov_total = 0
    for word in split_terms(query_text, stop):
        if word in vocab:
            # always consume the draw so p_false_oov does not shift the stream
            if rng.random() < noise.p_false_oov:
                gold.append(GoldRecord(len(tokens), word, False))
                tokens.append(Fragment(tuple(syllabify(word))))
            else:
                tokens.append(Word(word))
            continue
        oov_total += 1
        syls = corrupt(syllabify(word), noise, inventory, rng)
        if syls:
            gold.append(GoldRecord(len(tokens), word, True))
            tokens.append(Fragment(tuple(syls)))
    return TranscribedQuery(query_id, tokens, gold, oov_total)


def simulate_queries(queries: Sequence[RawDocument], vocab: VocabularyModel, noise: NoiseConfig,
                     syllabify: Callable[[str], SyllableSeq] = default_syllabify,
                     inventory: Sequence[str] = (), stop: StopList | None = None) -> list[TranscribedQuery]:
    """Transcribe a query set; query ``i`` uses seed ``noise.seed ^ i``."""
    return [transcribe(q.text, vocab, noise, syllabify, inventory, stop, q.doc_id, noise.seed ^ i)
            for i, q in enumerate(queries)]
