"""Document ingestion and tokenization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

_SPLIT = re.compile(r"[\W_]+")


class CorpusError(ValueError):
    """Malformed corpus, query or stoplist input."""


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    text: str


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: str
    tokens: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class StopList:
    entries: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_stoplist(path: str | Path) -> StopList:
    with open(path, encoding="utf-8") as fh:
        return StopList(frozenset(ln.strip().lower() for ln in fh if ln.strip()))


def default_stoplist() -> StopList:
    text = resources.files("openvocab").joinpath("data/stoplist.txt").read_text("utf-8")
    return StopList(frozenset(ln.strip() for ln in text.splitlines() if ln.strip()))


def read_jsonl_records(path: str | Path) -> list[RawDocument]:
    """Read ``{"id", "text"}`` records, one per line, rejecting bad lines."""
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                raise CorpusError(f"line {lineno}: empty line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"line {lineno}: expected an object")
            for key in ("id", "text"):
                if key not in obj:
                    raise CorpusError(f"line {lineno}: missing field {key}")
                if not isinstance(obj[key], str):
                    raise CorpusError(f"line {lineno}: field {key} must be a string")
            if not obj["text"]:
                raise CorpusError(f"line {lineno}: empty field text")
            if obj["id"] in seen:
                raise CorpusError(f"line {lineno}: duplicate id {obj['id']}")
            seen.add(obj["id"])
            docs.append(RawDocument(obj["id"], obj["text"]))
    return docs


def ingest(path: str | Path, format: str = "jsonl") -> list[RawDocument]:
    if format != "jsonl":
        raise CorpusError(f"unsupported corpus format: {format}")
    return read_jsonl_records(path)


def dump_jsonl(docs: Iterable[RawDocument]) -> str:
    return "".join(
        json.dumps({"id": d.doc_id, "text": d.text}, ensure_ascii=False) + "\n" for d in docs
    )


def write_jsonl(docs: Iterable[RawDocument], path: str | Path) -> None:
    Path(path).write_text(dump_jsonl(docs), encoding="utf-8")


def split_terms(text: str, stop: StopList | None = None) -> list[str]:
    """Lowercase, split on whitespace/punctuation and drop stopwords."""
    stop_entries = stop.entries if stop is not None else frozenset()
    return [t for t in _SPLIT.split(text.lower()) if t and t not in stop_entries]


def tokenize(doc: RawDocument, stop: StopList | None = None) -> TokenizedDocument:
    return TokenizedDocument(doc.doc_id, tuple(split_terms(doc.text, stop)))


def tokenize_all(docs: Iterable[RawDocument], stop: StopList | None = None) -> list[TokenizedDocument]:
    return [tokenize(d, stop) for d in docs]
