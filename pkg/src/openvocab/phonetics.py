"""Syllable segmentation and syllable-level DP alignment.

A term's phonetic form is a tuple of syllable symbols.  The default
segmenter handles romanized text: every vowel closes a syllable together
with the consonants before it, a repeated vowel becomes the long-vowel
mark ``:`` and a coda ``n`` becomes the moraic ``N``::

    >>> syllabify("kankitsu")
    ('ka', 'N', 'ki', 'tsu')
    >>> syllabify("gureepu")
    ('gu', 're', ':', 'pu')
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .kernels import align_counts, edit_distance

SyllableSeq = tuple[str, ...]

VOWELS = frozenset("aeiou")
LONG_VOWEL = ":"
MORAIC_N = "N"

# Process-wide symbol table for handing syllables to the int kernel.
_CODES: dict[str, int] = {}


def encode(seq: Sequence[str]) -> list[int]:
    codes = _CODES
    out = []
    for s in seq:
        c = codes.get(s)
        if c is None:
            c = codes.setdefault(s, len(codes))
        out.append(c)
    return out


def syllabify(surface: str) -> SyllableSeq:
    if not surface:
        raise ValueError("cannot syllabify an empty surface")
    s = surface.lower()
    if not any(ch in VOWELS for ch in s):
        return (s,)
    out: list[str] = []
    onset = ""
    i, n = 0, len(s)
    while i < n:
        ch = s[i]
        if ch in VOWELS:
            out.append(onset + ch)
            onset = ""
            i += 1
            if i < n and s[i] == ch:
                out.append(LONG_VOWEL)
                i += 1
            continue
        # coda n: follows a vowel and precedes a consonant or the word end
        if ch == "n" and not onset and i > 0 and s[i - 1] in VOWELS and (i + 1 == n or s[i + 1] not in VOWELS):
            out.append(MORAIC_N)
        else:
            onset += ch
        i += 1
    if onset:
        out.append(onset)
    return tuple(out)


def unsyllabify(seq: Sequence[str]) -> str:
    """Invert the default segmenter (letters only)."""
    parts = []
    for sym in seq:
        if sym == LONG_VOWEL:
            parts.append(parts[-1][-1] if parts else "")
        elif sym == MORAIC_N:
            parts.append("n")
        else:
            parts.append(sym)
    return "".join(parts)


def load_lexicon(path: str | Path) -> dict[str, SyllableSeq]:
    """Read ``surface<TAB>syl syl ...`` override lines."""
    lex: dict[str, SyllableSeq] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            surface, sep, syls = line.partition("\t")
            if not sep or not syls.split():
                raise ValueError(f"line {lineno}: expected 'surface<TAB>syllables'")
            lex[surface] = tuple(syls.split())
    return lex


class Syllabifier:
    """Phonetizer consulting an override lexicon before a rule-based fallback."""

    def __init__(self, lexicon: Mapping[str, SyllableSeq] | None = None,
                 fallback: Callable[[str], SyllableSeq] = syllabify):
        self.lexicon = dict(lexicon or {})
        self.fallback = fallback

    @classmethod
    def from_file(cls, path: str | Path) -> "Syllabifier":
        return cls(load_lexicon(path))

    def __call__(self, surface: str) -> SyllableSeq:
        hit = self.lexicon.get(surface)
        if hit is not None:
            return hit
        return self.fallback(surface)


@dataclass(frozen=True)
class Alignment:
    """Edit-operation counts; deletions and insertions are relative to ``w``."""

    matches: int
    substitutions: int
    deletions: int
    insertions: int

    @property
    def cost(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def align(w: Sequence[str], t: Sequence[str]) -> Alignment:
    return Alignment(*align_counts(encode(w), encode(t)))


def distance(w: Sequence[str], t: Sequence[str]) -> int:
    return edit_distance(encode(w), encode(t))


def similarity_codes(w: Sequence[int], t: Sequence[int]) -> float:
    if not w:
        raise ValueError("similarity undefined for an empty fragment")
    return align_counts(w, t)[0] / len(w)


def similarity(w: Sequence[str], t: Sequence[str]) -> float:
    """Share of ``w``'s syllables matched when aligning it against ``t``."""
    if not w:
        raise ValueError("similarity undefined for an empty fragment")
    return align(w, t).matches / len(w)
