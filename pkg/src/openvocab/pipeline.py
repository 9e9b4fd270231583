"""Two-stage retrieval and the four-method experiment runner.

Methods: 1 searches with the written query; 2 forces every fragment onto
its nearest dictionary word; 3 drops fragments; 4 completes fragments from
the first-stage documents and searches again.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .asr_sim import (NoiseConfig, TranscribedQuery, VocabularyModel, Word,
                      build_vocabulary, simulate_queries, syllable_inventory)
from .completion import (CompletionIndex, Resolution, apply_resolutions,
                         build_completion_index, resolve_fragments)
from .config import Config
from .corpus import RawDocument, StopList, TokenizedDocument, default_stoplist, split_terms, tokenize_all
from .metrics import OovCounts, RunResult
from .phonetics import SyllableSeq, distance, syllabify as default_syllabify, similarity
from .retrieval import InvertedIndex, RankedList, build_index, search

log = logging.getLogger(__name__)

METHODS = (1, 2, 3, 4)


def noise_from(config: Config) -> NoiseConfig:
    return NoiseConfig(config.p_sub, config.p_del, config.p_ins, config.p_false_oov, config.seed)


@dataclass
class System:
    """Everything built once from a collection."""

    index: InvertedIndex
    completion: CompletionIndex
    vocab: VocabularyModel
    stop: StopList
    syllabify: Callable[[str], SyllableSeq] = default_syllabify
    inventory: tuple[str, ...] = ()
    _vocab_phon: list[tuple[str, SyllableSeq]] | None = field(default=None, repr=False)

    @classmethod
    def from_tokenized(cls, docs: Sequence[TokenizedDocument], config: Config,
                       stop: StopList | None = None,
                       syllabify: Callable[[str], SyllableSeq] = default_syllabify) -> "System":
        index = build_index(docs)
        ci = build_completion_index(docs, syllabify)
        vocab = build_vocabulary(docs, config.K)
        inventory = syllable_inventory(index.postings, syllabify)
        return cls(index, ci, vocab, stop if stop is not None else default_stoplist(), syllabify, inventory)

    @classmethod
    def build(cls, docs: Sequence[RawDocument], config: Config, stop: StopList | None = None,
              syllabify: Callable[[str], SyllableSeq] = default_syllabify) -> "System":
        stop = stop if stop is not None else default_stoplist()
        return cls.from_tokenized(tokenize_all(docs, stop), config, stop, syllabify)

    def vocab_phon(self) -> list[tuple[str, SyllableSeq]]:
        if self._vocab_phon is None:
            self._vocab_phon = [(w, tuple(self.syllabify(w))) for w in sorted(self.vocab.words)]
        return self._vocab_phon


def first_stage(q: TranscribedQuery, index: InvertedIndex, N: int = 300,
                config: Config | None = None) -> RankedList:
    """Search with the in-vocabulary words only."""
    cfg = config or Config()
    terms = q.words()
    if not terms:
        log.info("query %s has no in-vocabulary words; first stage is empty", q.query_id)
        return RankedList()
    return search(index, terms, N, cfg.k1, cfg.b)


@dataclass
class TwoStageOutcome:
    run: RunResult
    first: RankedList
    completed: TranscribedQuery
    resolutions: list[Resolution]


def two_stage(q: TranscribedQuery, index: InvertedIndex, ci: CompletionIndex,
              config: Config | None = None) -> TwoStageOutcome:
    cfg = config or Config()
    first = first_stage(q, index, cfg.N, cfg)
    resolutions = resolve_fragments(q, index, ci, first, cfg)
    completed = apply_resolutions(q, resolutions)
    terms = completed.words()
    final = search(index, terms, cfg.N_final, cfg.k1, cfg.b) if terms else RankedList()
    return TwoStageOutcome(RunResult(q.query_id, final, 4), first, completed, resolutions)


def two_stage_retrieve(q: TranscribedQuery, index: InvertedIndex, ci: CompletionIndex,
                       config: Config | None = None) -> RunResult:
    return two_stage(q, index, ci, config).run


def snap_to_vocabulary(q: TranscribedQuery, vocab_phon: Sequence[tuple[str, SyllableSeq]]) -> TranscribedQuery:
    """Closed-vocabulary decoding: each fragment becomes its most similar dictionary word."""
    tokens = []
    for tok in q.tokens:
        if isinstance(tok, Word):
            tokens.append(tok)
            continue
        w = tok.syllables
        best = min(vocab_phon, key=lambda wp: (-similarity(w, wp[1]), distance(w, wp[1]), wp[0]),
                   default=None)
        if best is not None:
            tokens.append(Word(best[0]))
    return TranscribedQuery(q.query_id, tokens, [], q.oov_total)


@dataclass
class ExperimentResult:
    method: int
    runs: list[RunResult]
    oov: OovCounts = OovCounts(0, 0, 0, 0)
    completion_seconds: list[float] = field(default_factory=list)
    per_query: dict[str, OovCounts] = field(default_factory=dict)

    @property
    def ms_per_fragment(self) -> float:
        s = self.completion_seconds
        return 1000.0 * sum(s) / len(s) if s else 0.0


def _count_detection(q: TranscribedQuery, resolutions: Sequence[Resolution] | None) -> OovCounts:
    gold = {g.position: g for g in q.gold}
    frags = q.fragments()
    correct = sum(1 for pos, _ in frags if pos in gold and gold[pos].true_oov)
    completed = 0
    if resolutions is not None:
        completed = sum(1 for r in resolutions
                        if r.choice is not None and r.position in gold and r.choice.surface == gold[r.position].surface)
    return OovCounts(len(frags), correct, completed, q.oov_total)


def transcribe_all(queries: Sequence[RawDocument], system: System, config: Config) -> list[TranscribedQuery]:
    return simulate_queries(queries, system.vocab, noise_from(config), system.syllabify,
                            system.inventory, system.stop)


def run_experiment(queries: Sequence[RawDocument], system: System, method: int,
                   config: Config | None = None,
                   transcribed: Sequence[TranscribedQuery] | None = None) -> ExperimentResult:
    """Run one method over a query set; runs come back ordered by query id."""
    cfg = config or Config()
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    runs: list[RunResult] = []
    result = ExperimentResult(method, runs)
    if method == 1:
        for q in queries:
            terms = split_terms(q.text, system.stop)
            runs.append(RunResult(q.doc_id, search(system.index, terms, cfg.N_final, cfg.k1, cfg.b), 1))
    else:
        tqs = list(transcribed) if transcribed is not None else transcribe_all(queries, system, cfg)
        for tq in tqs:
            if method == 2:
                snapped = snap_to_vocabulary(tq, system.vocab_phon())
                ranked = search(system.index, snapped.words(), cfg.N_final, cfg.k1, cfg.b) \
                    if snapped.words() else RankedList()
                runs.append(RunResult(tq.query_id, ranked, 2))
            elif method == 3:
                runs.append(RunResult(tq.query_id, first_stage(tq, system.index, cfg.N_final, cfg), 3))
                result.per_query[tq.query_id] = _count_detection(tq, None)
            else:
                out = two_stage(tq, system.index, system.completion, cfg)
                runs.append(out.run)
                result.per_query[tq.query_id] = _count_detection(tq, out.resolutions)
                result.completion_seconds.extend(r.seconds for r in out.resolutions)
        for c in result.per_query.values():
            result.oov = result.oov + c
    runs.sort(key=lambda r: r.query_id)
    return result
