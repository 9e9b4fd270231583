"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache

import numpy as np

from openvocab import _align_py

ORDER = {"M": 1, "S": 2, "D": 3, "I": 4}


@lru_cache(maxsize=None)
def paths(n: int, m: int) -> tuple[str, ...]:
    """Every edit path from (0, 0) to (n, m): X diagonal, D down, I right."""
    if n == 0 and m == 0:
        return ("",)
    out = []
    if n and m:
        out += [p + "X" for p in paths(n - 1, m - 1)]
    if n:
        out += [p + "D" for p in paths(n - 1, m)]
    if m:
        out += [p + "I" for p in paths(n, m - 1)]
    return tuple(out)


def brute_align(a, b):
    """Minimal-cost alignment by enumeration; ties go to the path whose op
    sequence, read from the end, is lexicographically smallest under M<S<D<I."""
    best = None
    for p in paths(len(a), len(b)):
        i = j = 0
        ops = []
        for op in p:
            if op == "X":
                ops.append("M" if a[i] == b[j] else "S")
                i += 1
                j += 1
            elif op == "D":
                ops.append("D")
                i += 1
            else:
                ops.append("I")
                j += 1
        key = (sum(o != "M" for o in ops), [ORDER[o] for o in reversed(ops)])
        if best is None or key < best[0]:
            best = (key, ops)
    ops = best[1]
    return ops.count("M"), ops.count("S"), ops.count("D"), ops.count("I")


def naive_levenshtein(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(naive_levenshtein(a[1:], b) + 1,
               naive_levenshtein(a, b[1:]) + 1,
               naive_levenshtein(a[1:], b[1:]) + (a[0] != b[0]))


def enumerate_all_pairs(n: int, m: int, alphabet: int = 3, chunk: int = 4096):
    """Vectorised ``brute_align`` over every pair of sequences of lengths n, m.

    Yields ``(a, b, (matches, subs, dels, ins))``.  Each path's objective is
    cost * 5**10 + its reversed op string read as a base-5 number, so the
    arg-min picks the same path as ``brute_align``.
    """
    A = np.array(list(itertools.product(range(alphabet), repeat=n)), dtype=np.int64).reshape(alphabet ** n, n)
    Bs = np.array(list(itertools.product(range(alphabet), repeat=m)), dtype=np.int64).reshape(alphabet ** m, m)
    P = paths(n, m)
    top = 5 ** 10
    lmax = 10
    nm = max(n * m, 1)
    base = np.zeros(len(P))
    V = np.zeros((len(P), nm))
    diag = np.zeros((len(P), nm))
    dels = np.zeros(len(P), dtype=np.int64)
    ins = np.zeros(len(P), dtype=np.int64)
    for k, p in enumerate(P):
        i = j = 0
        steps = []
        for op in p:
            if op == "X":
                steps.append(("X", i, j))
                i += 1
                j += 1
            elif op == "D":
                steps.append(("D", i, j))
                i += 1
            else:
                steps.append(("I", i, j))
                j += 1
        for pos, (op, i, j) in enumerate(reversed(steps)):
            w = 5 ** (lmax - 1 - pos)
            if op == "X":
                base[k] += ORDER["M"] * w
                V[k, i * m + j] = top + w  # added when the symbols differ
                diag[k, i * m + j] = 1
            else:
                base[k] += top + ORDER[op] * w
        dels[k] = p.count("D")
        ins[k] = p.count("I")
    const = base + V.sum(axis=1)
    pairs = [(ai, bi) for ai in range(len(A)) for bi in range(len(Bs))]
    for start in range(0, len(pairs), chunk):
        sl = pairs[start:start + chunk]
        ai = np.array([p[0] for p in sl])
        bi = np.array([p[1] for p in sl])
        if n and m:
            E = (A[ai][:, :, None] == Bs[bi][:, None, :]).reshape(len(sl), n * m).astype(float)
        else:
            E = np.zeros((len(sl), nm))
        obj = const[None, :] - E @ V.T
        best = obj.argmin(axis=1)
        matches = (E * diag[best]).sum(axis=1).astype(np.int64)
        ndiag = diag[best].sum(axis=1).astype(np.int64)
        for r in range(len(sl)):
            k = best[r]
            yield (tuple(A[ai[r]]), tuple(Bs[bi[r]]),
                   (int(matches[r]), int(ndiag[r] - matches[r]), int(dels[k]), int(ins[k])))


def bm25_oracle(docs, query, k, k1=1.2, b=0.75):
    """Score every document directly from its token list."""
    N = len(docs)
    avgdl = sum(len(d.tokens) for d in docs) / N
    qtf = Counter(query)
    scored = []
    for d in docs:
        contrib = []
        for t, q in qtf.items():
            df = sum(1 for e in docs if t in e.tokens)
            if df == 0:
                continue
            idf = max(0.0, math.log((N - df + 0.5) / (df + 0.5)))
            tf = d.tokens.count(t)
            if tf == 0:
                continue
            contrib.append(q * idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(d.tokens) / avgdl)))
        s = math.fsum(contrib)
        if s > 0:
            scored.append((d.doc_id, s))
    scored.sort(key=lambda p: (-p[1], p[0]))
    return scored[:k]


def candidates_oracle(docs, syllabify, w, D_q, theta, L):
    """Scan every word and bigram of the collection."""
    occ: dict[str, set[str]] = {}
    for d in docs:
        for tok in d.tokens:
            occ.setdefault(tok, set()).add(d.doc_id)
        for x, y in zip(d.tokens, d.tokens[1:]):
            occ.setdefault(f"{x} {y}", set()).add(d.doc_id)
    m = min(L, len(w))
    wc = list(w)
    out = {}
    for surface, ds in occ.items():
        if not ds & set(D_q):
            continue
        phon = tuple(s for part in surface.split(" ") for s in syllabify(part))
        if len(phon) < m:
            continue
        if phon[:m] != tuple(w[:m]) and phon[len(phon) - m:] != tuple(w[len(w) - m:]):
            continue
        p = _align_py.align_counts(wc, list(phon))[0] / len(w)
        if p >= theta:
            out[surface] = p
    return out


def naive_average_precision(ranking, relevant):
    precisions = []
    for i in range(len(ranking)):
        if ranking[i] in relevant:
            prefix = ranking[: i + 1]
            precisions.append(len([d for d in prefix if d in relevant]) / len(prefix))
    return sum(precisions) / len(relevant)
