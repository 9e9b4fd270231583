"""Evaluation: non-interpolated average precision, OOV detection/completion
rates, and TREC-style run and qrels files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .retrieval import RankedList

Qrels = dict[str, frozenset[str]]


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class RunResult:
    query_id: str
    ranked: RankedList
    method: int


def load_qrels(path: str | Path) -> Qrels:
    """Read ``query_id 0 doc_id relevance`` lines; relevance > 0 counts."""
    rel: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise EvaluationError(f"line {lineno}: expected 4 fields")
            qid, _, doc, grade = parts
            try:
                g = int(grade)
            except ValueError:
                raise EvaluationError(f"line {lineno}: relevance must be an integer") from None
            bucket = rel.setdefault(qid, set())
            if g > 0:
                bucket.add(doc)
    return {q: frozenset(d) for q, d in rel.items()}


def write_qrels(qrels: Mapping[str, Iterable[str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid in sorted(qrels):
            for doc in sorted(qrels[qid]):
                fh.write(f"{qid} 0 {doc} 1\n")


def average_precision(run: RunResult | RankedList, relevant: Iterable[str]) -> float:
    rel = set(relevant)
    if not rel:
        raise EvaluationError("no relevant documents for query")
    ranked = run.ranked if isinstance(run, RunResult) else run
    hits = 0
    total = 0.0
    for i, (doc, _) in enumerate(ranked, 1):
        if doc in rel:
            hits += 1
            total += hits / i
    return total / len(rel)


def evaluate_runs(runs: Iterable[RunResult], qrels: Qrels) -> dict[str, float]:
    out = {}
    for r in runs:
        if r.query_id not in qrels:
            raise EvaluationError(f"no qrels for query {r.query_id}")
        out[r.query_id] = average_precision(r, qrels[r.query_id])
    return out


def mean(values: Iterable[float]) -> float:
    vals = list(values)
    return sum(vals) / len(vals) if vals else 0.0


@dataclass(frozen=True)
class OovCounts:
    detected: int
    correct: int
    completed: int
    gold_total: int

    def __add__(self, other: "OovCounts") -> "OovCounts":
        return OovCounts(self.detected + other.detected, self.correct + other.correct,
                         self.completed + other.completed, self.gold_total + other.gold_total)


def oov_metrics(c: OovCounts) -> tuple[float, float, float]:
    """(recall, precision, accuracy) of OOV detection and completion."""
    if c.detected < 1 or c.gold_total < 1:
        raise EvaluationError("detected and gold_total must be positive")
    return c.correct / c.gold_total, c.correct / c.detected, c.completed / c.detected


def format_run(runs: Iterable[RunResult], tag: str | None = None) -> str:
    lines = []
    for r in sorted(runs, key=lambda r: r.query_id):
        label = tag or f"method{r.method}"
        for rank, (doc, score) in enumerate(r.ranked, 1):
            lines.append(f"{r.query_id} Q0 {doc} {rank} {score:.6f} {label}\n")
    return "".join(lines)


def write_run(runs: Iterable[RunResult], path: str | Path, tag: str | None = None) -> None:
    Path(path).write_text(format_run(runs, tag), encoding="utf-8")


def read_run(path: str | Path) -> list[RunResult]:
    rows: dict[str, list[tuple[int, str, float]]] = {}
    methods: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise EvaluationError(f"line {lineno}: expected 6 fields")
            qid, _, doc, rank, score, tag = parts
            rows.setdefault(qid, []).append((int(rank), doc, float(score)))
            digits = tag.removeprefix("method")
            methods[qid] = int(digits) if digits.isdigit() else 0
    return [RunResult(q, RankedList(tuple((d, s) for _, d, s in sorted(rows[q]))), methods[q])
            for q in sorted(rows)]
