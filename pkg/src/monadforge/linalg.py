"""Exact and modular rank computations.

The dense kernels come from the compiled ``_kernels`` extension when it is
importable, otherwise from ``_kernels_py``.  Set ``MONADFORGE_PURE=1`` to
force the pure-Python path.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import _kernels_py

DEFAULT_PRIME = 1000003

if os.environ.get("MONADFORGE_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _check_prime(p: int) -> None:
    if not (2 <= p < 2 ** 31):
        raise ValueError(f"prime must lie in [2, 2**31), got {p}")


def rank_mod_p(rows: Sequence[Sequence[int]], p: int = DEFAULT_PRIME) -> int:
    _check_prime(p)
    if not rows or not rows[0]:
        return 0
    return _impl.rank_mod_p(rows, p)


def rank_integer(rows: Sequence[Sequence[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    return _impl.rank_integer(rows)


def rank_rational(rows: Sequence[Sequence]) -> int:
    """Exact rank over Q; rows are scaled to integers first."""
    int_rows = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
        int_rows.append([int(x * den) for x in row])
    return rank_integer(int_rows)


# -- sparse elimination -----------------------------------------------------

SparseRow = Dict[int, int]


def _primitive(row: SparseRow) -> SparseRow:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def sparse_rank(rows: List[SparseRow], p: Optional[int] = None) -> int:
    """Rank of a sparse integer matrix given as ``{col: value}`` rows.

    ``p=None`` works exactly over Q (fraction-free, rows kept primitive);
    otherwise arithmetic is over ``F_p``.  Rows are inserted one at a time
    into an echelon basis keyed by leading column.
    """
    if p is not None:
        _check_prime(p)
    pivots: Dict[int, SparseRow] = {}
    for row in sorted(rows, key=len):
        if p is None:
            r = {c: v for c, v in row.items() if v}
        else:
            r = {c: v % p for c, v in row.items() if v % p}
        while r:
            lead = min(r)
            prow = pivots.get(lead)
            if prow is None:
                if p is None:
                    pivots[lead] = _primitive(r)
                else:
                    inv = pow(r[lead], p - 2, p)
                    pivots[lead] = {c: v * inv % p for c, v in r.items()}
                break
            if p is None:
                a, b = prow[lead], r[lead]
                g = math.gcd(a, b)
                fa, fb = a // g, b // g
                out = {c: fa * v for c, v in r.items()}
                for c, v in prow.items():
                    nv = out.get(c, 0) - fb * v
                    if nv:
                        out[c] = nv
                    else:
                        out.pop(c, None)
                r = _primitive(out) if out else out
            else:
                f = r[lead]
                for c, v in prow.items():
                    nv = (r.get(c, 0) - f * v) % p
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
    return len(pivots)
