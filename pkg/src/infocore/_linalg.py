from fractions import Fraction


def solve_exact(A, b):
    """Solve ``A x = b`` over the rationals for a full-column-rank system.

    Returns ``None`` when the columns are dependent or the system is
    inconsistent.  ``A`` is a list of rows; rows may outnumber columns.
    """
    rows = [[Fraction(x) for x in r] + [Fraction(bi)] for r, bi in zip(A, b)]
    m = len(rows)
    k = len(rows[0]) - 1 if rows else 0
    r = 0
    pivcols = []
    for c in range(k):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            return None
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        pivcols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, m)):
        return None
    return [rows[i][k] for i in range(k)]
