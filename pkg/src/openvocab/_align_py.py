"""Pure-Python DP alignment kernel, used when the compiled module is unavailable."""


def _table(a, b):
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row, prev = d[i], d[i - 1]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best
    return d


def align_counts(a, b):
    """Return (matches, substitutions, deletions, insertions) for int sequences.

    Backtrace from the end prefers match, then substitution, then deletion,
    then insertion, among moves that stay on a minimal-cost path.
    """
    d = _table(a, b)
    i, j = len(a), len(b)
    mat = sub = dele = ins = 0
    while i > 0 or j > 0:
        cur = d[i][j]
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and cur == d[i - 1][j - 1]:
            mat += 1
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and cur == d[i - 1][j - 1] + 1:
            sub += 1
            i -= 1
            j -= 1
        elif i > 0 and cur == d[i - 1][j] + 1:
            dele += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return mat, sub, dele, ins


def edit_distance(a, b):
    """Unit-cost Levenshtein distance between int sequences."""
    return _table(a, b)[len(a)][len(b)]
