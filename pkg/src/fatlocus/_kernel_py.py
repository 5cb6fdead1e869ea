"""Pure-Python fraction-free elimination kernel.

Both entry points take a list of integer rows (mutated in place is avoided:
the rows are copied) and return ``(rank, pivots, rows)`` where ``rows`` holds
the first ``rank`` rows of the eliminated matrix.

The elimination is Bareiss' one-step fraction-free scheme: every division is
exact, so intermediate entries stay integers bounded by minors of the input.
"""


def _choose_pivot(m, r, c, nrows):
    best = -1
    best_abs = 0
    for i in range(r, nrows):
        v = m[i][c]
        if v:
            a = v if v > 0 else -v
            if a > best_abs:
                best = i
                best_abs = a
    return best


def _eliminate(rows, ncols, reduced):
    m = [list(row) for row in rows]
    nrows = len(m)
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        best = _choose_pivot(m, r, c, nrows)
        if best < 0:
            continue
        if best != r:
            m[r], m[best] = m[best], m[r]
        prow = m[r]
        p = prow[c]
        for i in range(r + 1, nrows):
            row = m[i]
            a = row[c]
            if a:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - a * prow[j]) // prev
            elif p != prev:
                for j in range(c + 1, ncols):
                    x = row[j]
                    if x:
                        row[j] = (p * x) // prev
            row[c] = 0
        if reduced:
            # rows above carry entries left of c, so the whole row is updated;
            # prow is zero there and earlier pivots turn from prev into p
            for i in range(r):
                row = m[i]
                a = row[c]
                for j in range(ncols):
                    if j != c:
                        row[j] = (p * row[j] - a * prow[j]) // prev
                row[c] = 0
        prev = p
        pivots.append(c)
        r += 1
    return r, pivots, m[:r]


def echelon(rows, ncols):
    """Row echelon form; the pivot of row k is the leading (k+1)-minor."""
    return _eliminate(rows, ncols, False)


def rref(rows, ncols):
    """Fraction-free reduced echelon form: every pivot equals the last one."""
    return _eliminate(rows, ncols, True)
