"""Pure-Python elimination kernels.

Same signatures as the compiled ``_kernels`` module; used when the
extension is not built or when ``MONADFORGE_PURE=1``.
"""


def rank_mod_p(rows, p):
    """Rank of a dense integer matrix over ``F_p`` (``p`` prime, < 2**31)."""
    a = [[x % p for x in row] for row in rows]
    m = len(a)
    if m == 0:
        return 0
    n = len(a[0])
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if a[r][col]:
                piv = r
                break
        if piv < 0:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        inv = pow(prow[col], p - 2, p)
        for r in range(rank + 1, m):
            row = a[r]
            f = row[col]
            if f:
                f = f * inv % p
                for c in range(col, n):
                    if prow[c]:
                        row[c] = (row[c] - f * prow[c]) % p
        rank += 1
    return rank


def rank_integer(rows):
    """Exact rank of a dense integer matrix by Bareiss elimination."""
    a = [list(row) for row in rows]
    m = len(a)
    if m == 0:
        return 0
    n = len(a[0])
    rank = 0
    prev = 1
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if a[r][col]:
                piv = r
                break
        if piv < 0:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        pv = prow[col]
        for r in range(rank + 1, m):
            row = a[r]
            f = row[col]
            for c in range(col + 1, n):
                row[c] = (pv * row[c] - f * prow[c]) // prev
            row[col] = 0
        # rows above the pivot row are never touched again
        prev = pv
        rank += 1
    return rank
