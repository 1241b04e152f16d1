"""Sparse polynomials and polynomial matrices in the variable groups.

Variables are ``x{i}_{j}`` and ``y{i}_{j}`` for group ``i`` (1-based) and
coordinate ``j``; the x-family of group ``i`` lives on slot ``2(i-1)``, the
y-family on slot ``2(i-1)+1``.

Matrix dump format, one nonzero entry per line::

    # <name> <rows> <cols>
    <r> <c> <poly>

with ``<poly>`` a run of terms such as ``+1·x1_0^2·y1_1^1-3/2·x2_0^1``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from . import linalg

Coeff = Union[int, Fraction]


class Var(NamedTuple):
    group: int
    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}{self.group}_{self.index}"

    @property
    def slot(self) -> int:
        return 2 * (self.group - 1) + (0 if self.family == "x" else 1)


Monomial = Tuple[Tuple[Var, int], ...]

ONE: Monomial = ()


class _Inhomogeneous:
    def __repr__(self) -> str:
        return "INHOMOGENEOUS"


INHOMOGENEOUS = _Inhomogeneous()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def mono_pow(m: Monomial, k: int) -> Monomial:
    return tuple((v, e * k) for v, e in m) if k else ONE


def mono_degree(m: Monomial, nslots: int) -> Tuple[int, ...]:
    deg = [0] * nslots
    for v, e in m:
        deg[v.slot] += e
    return tuple(deg)


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class Poly:
    """Finite sum of rational-coefficient monomials (zero terms never stored)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Coeff]] = None):
        self.terms: Dict[Monomial, Coeff] = {
            m: _norm_coeff(c) for m, c in (terms or {}).items() if c != 0
        }

    @classmethod
    def var(cls, v: Var, exp: int = 1, coeff: Coeff = 1) -> "Poly":
        return cls({((v, exp),) if exp else ONE: coeff})

    @classmethod
    def const(cls, c: Coeff) -> "Poly":
        return cls({ONE: c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: Dict[Monomial, Coeff] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, point: Mapping[Var, Coeff], p: Optional[int] = None) -> Coeff:
        total = 0
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                try:
                    x = point[v]
                except KeyError:
                    raise ValueError(f"variable {v} is not assigned") from None
                val = val * (pow(x, e, p) if p is not None else x ** e)
            total += val
        if p is not None:
            if isinstance(total, Fraction):
                total = total.numerator * pow(total.denominator, p - 2, p)
            return total % p
        return _norm_coeff(total)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self) or '0'})"


def multidegree(p: Poly, nslots: int):
    """Common per-slot degree of all terms, or ``INHOMOGENEOUS``."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no multidegree")
    degs = {mono_degree(m, nslots) for m in p.terms}
    if len(degs) > 1:
        return INHOMOGENEOUS
    return degs.pop()


# -- matrices ---------------------------------------------------------------

class PolyMatrix:
    """Sparse ``rows x cols`` matrix of polynomials."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[Tuple[int, int], Poly]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), p in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r},{c}) outside {rows}x{cols}")
            if not p.is_zero():
                clean[(r, c)] = p
        self.entries: Dict[Tuple[int, int], Poly] = clean

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Poly]]) -> "PolyMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {(r, c): p for r, row in enumerate(rows) for c, p in enumerate(row)}
        return cls(nr, nc, ent)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, rc: Tuple[int, int]) -> Poly:
        return self.entries.get(rc, _ZERO)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, {k: -p for k, p in self.entries.items()})

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = dict(self.entries)
        for k, p in other.entries.items():
            out[k] = out[k] + p if k in out else p
        return PolyMatrix(self.rows, self.cols, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.shape == other.shape and self.entries == other.entries

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        return mat_mul(self, other)

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows, {(c, r): p for (r, c), p in self.entries.items()})

    def column(self, c: int) -> Dict[int, Poly]:
        return {r: p for (r, cc), p in self.entries.items() if cc == c}

    def variables(self) -> set:
        out = set()
        for p in self.entries.values():
            out |= p.variables()
        return out

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


_ZERO = Poly()


def vstack(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    cols = {b.cols for b in blocks}
    if len(cols) > 1:
        raise ValueError(f"cannot stack blocks with column counts {sorted(cols)}")
    out = {}
    off = 0
    for b in blocks:
        for (r, c), p in b.entries.items():
            out[(r + off, c)] = p
        off += b.rows
    return PolyMatrix(off, cols.pop() if cols else 0, out)


def hstack(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    rows = {b.rows for b in blocks}
    if len(rows) > 1:
        raise ValueError(f"cannot concatenate blocks with row counts {sorted(rows)}")
    out = {}
    off = 0
    for b in blocks:
        for (r, c), p in b.entries.items():
            out[(r, c + off)] = p
        off += b.cols
    return PolyMatrix(rows.pop() if rows else 0, off, out)


def mat_mul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    by_row: Dict[int, List[Tuple[int, Poly]]] = {}
    for (k, c), p in B.entries.items():
        by_row.setdefault(k, []).append((c, p))
    acc: Dict[Tuple[int, int], Dict[Monomial, Coeff]] = {}
    for (r, k), pa in A.entries.items():
        for c, pb in by_row.get(k, ()):
            cell = acc.setdefault((r, c), {})
            for m1, c1 in pa.terms.items():
                for m2, c2 in pb.terms.items():
                    m = mono_mul(m1, m2)
                    cell[m] = cell.get(m, 0) + c1 * c2
    return PolyMatrix(A.rows, B.cols, {rc: Poly(t) for rc, t in acc.items()})


def evaluate(M: PolyMatrix, point: Mapping[Var, Coeff], p: Optional[int] = None) -> List[List[Coeff]]:
    """Entrywise evaluation over Q (``p=None``) or ``F_p``."""
    missing = M.variables() - set(point)
    if missing:
        raise ValueError(f"unassigned variables: {', '.join(sorted(map(str, missing)))}")
    out: List[List[Coeff]] = [[0] * M.cols for _ in range(M.rows)]
    for (r, c), poly in M.entries.items():
        out[r][c] = poly.evaluate(point, p)
    return out


def numeric_rank(M: Sequence[Sequence[Coeff]], p: Optional[int] = None) -> int:
    """Exact rank over Q (fraction-free) or over ``F_p``."""
    if p is None:
        return linalg.rank_rational(M)
    return linalg.rank_mod_p([[int(x) for x in row] for row in M], p)


# -- text format ------------------------------------------------------------

def format_poly(p: Poly) -> str:
    parts = []
    for m in sorted(p.terms):
        c = p.terms[m]
        sign = "-" if c < 0 else "+"
        term = sign + str(abs(c))
        for v, e in m:
            term += f"·{v}^{e}"
        parts.append(term)
    return "".join(parts)


_TERM = re.compile(r"([+-])(\d+(?:/\d+)?)((?:·[xy]\d+_\d+\^\d+)*)")
_FACTOR = re.compile(r"·([xy])(\d+)_(\d+)\^(\d+)")


def parse_poly(text: str) -> Poly:
    pos = 0
    terms: Dict[Monomial, Coeff] = {}
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if mt is None or mt.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        sign, coeff, factors = mt.groups()
        c = Fraction(coeff)
        if sign == "-":
            c = -c
        exps: Dict[Var, int] = {}
        for fam, g, j, e in _FACTOR.findall(factors):
            v = Var(int(g), fam, int(j))
            exps[v] = exps.get(v, 0) + int(e)
        m = tuple(sorted((v, e) for v, e in exps.items() if e))
        terms[m] = terms.get(m, 0) + c
        pos = mt.end()
    return Poly(terms)


def dump_matrix(name: str, M: PolyMatrix, fmt: str = "txt") -> str:
    lines = []
    if fmt == "txt":
        lines.append(f"# {name} {M.rows} {M.cols}")
        for (r, c) in sorted(M.entries):
            lines.append(f"{r} {c} {format_poly(M.entries[(r, c)])}")
    elif fmt == "csv":
        lines.append(f"# {name} {M.rows} {M.cols}")
        lines.append("row,col,poly")
        for (r, c) in sorted(M.entries):
            lines.append(f"{r},{c},{format_poly(M.entries[(r, c)])}")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
    return "\n".join(lines) + "\n"


def parse_matrices(text: str) -> Dict[str, PolyMatrix]:
    """Parse one or more dumped matrices (txt or csv)."""
    out: Dict[str, PolyMatrix] = {}
    name = None
    shape = (0, 0)
    entries: Dict[Tuple[int, int], Poly] = {}

    def flush():
        if name is not None:
            out[name] = PolyMatrix(shape[0], shape[1], entries)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line == "row,col,poly":
            continue
        if line.startswith("#"):
            flush()
            _, nm, nr, nc = line.split()
            name, shape, entries = nm, (int(nr), int(nc)), {}
            continue
        if name is None:
            raise ValueError("matrix entry before header line")
        r, c, poly = re.split(r"[ ,]", line, maxsplit=2)
        entries[(int(r), int(c))] = parse_poly(poly)
    flush()
    return out

