"""Brute-force global sections of kernel sheaves.

Sections of ``O_X(a)`` are identified with multihomogeneous monomials, so
``H^0`` of a sum is a concatenation of monomial bases and a map given by a
polynomial matrix becomes an explicit integer matrix.  Left exactness of
``H^0`` then gives

    h^0(wedge^q K(B)) = dim ker( H^0(wedge^q M(B)) -> H^0(wedge^{q-1} M (x) T (B)) )

for ``0 -> K -> M -> T -> 0``, the second arrow being the contraction with
the surjection.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from math import comb, prod
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .monad import MonadDescriptor, homogeneity_check
from .picard import SpaceSpec, Twist, add
from .polyalg import Monomial, Var, mono_mul

DEFAULT_BUDGET = 20000
DENSE_LIMIT = 2_000_000


class OracleRefused(ValueError):
    """The descriptor is not a well-formed sheaf map, so sections are undefined."""


@dataclass(frozen=True)
class SectionBasis:
    twist: Twist
    monomials: Tuple[Monomial, ...]

    def __len__(self) -> int:
        return len(self.monomials)


@lru_cache(maxsize=4096)
def _basis(slot_dims: Tuple[int, ...], a: Tuple[int, ...]) -> Tuple[Tuple[Monomial, ...], Dict[Monomial, int]]:
    if any(x < 0 for x in a):
        return (), {}
    per_slot = []
    for slot, (n, d) in enumerate(zip(slot_dims, a)):
        group, fam = slot // 2 + 1, "xy"[slot % 2]
        monos = []
        for combo in combinations_with_replacement(range(n + 1), d):
            exps: Dict[int, int] = {}
            for j in combo:
                exps[j] = exps.get(j, 0) + 1
            monos.append(tuple((Var(group, fam, j), e) for j, e in sorted(exps.items())))
        per_slot.append(sorted(monos))
    # slots are already in variable order, so concatenation stays sorted
    monos = tuple(sum(parts, ()) for parts in product(*per_slot))
    return monos, {m: i for i, m in enumerate(monos)}


def section_basis(space: SpaceSpec, a: Sequence[int]) -> SectionBasis:
    a = space.check_twist(a)
    return SectionBasis(a, _basis(space.slot_dims, a)[0])


def h0_count(space: SpaceSpec, a: Sequence[int]) -> int:
    if any(x < 0 for x in a):
        return 0
    return prod(comb(n + x, n) for n, x in zip(space.slot_dims, a))


def serre_h_top(space: SpaceSpec, a: Sequence[int]) -> int:
    """``h^D(O(a))`` as the size of the monomial basis of ``O(-a - n - 1)``."""
    a = space.check_twist(a)
    dual = tuple(-x - n - 1 for x, n in zip(a, space.slot_dims))
    return len(section_basis(space, dual))


@dataclass(frozen=True)
class OracleResult:
    value: Optional[int]
    q: int
    twist: Twist
    domain_size: int
    codomain_size: int
    rank: Optional[int]
    method: str
    exact: bool

    @property
    def too_large(self) -> bool:
        return self.method == "too-large"

    def to_dict(self) -> dict:
        return {
            "q": self.q, "B": list(self.twist), "h0": self.value, "domain": self.domain_size,
            "codomain": self.codomain_size, "rank": self.rank, "method": self.method, "exact": self.exact,
        }


_homog_cache: "weakref.WeakKeyDictionary[MonadDescriptor, bool]" = weakref.WeakKeyDictionary()


def is_well_formed(md: MonadDescriptor) -> bool:
    ok = _homog_cache.get(md)
    if ok is None:
        ok = homogeneity_check(md).passed
        _homog_cache[md] = ok
    return ok


def _matrix_rank(rows: List[Dict[int, int]], ncols: int, p: Optional[int]) -> int:
    nrows = len(rows)
    if p is not None and nrows * ncols <= DENSE_LIMIT:
        dense = [[0] * ncols for _ in range(nrows)]
        for i, r in enumerate(rows):
            for c, v in r.items():
                dense[i][c] = v
        return linalg.rank_mod_p(dense, p)
    return linalg.sparse_rank(rows, p)


def h0_wedge_kernel(md: MonadDescriptor, q: int, B: Sequence[int], budget: int = DEFAULT_BUDGET,
                    prime: int = linalg.DEFAULT_PRIME, hard_limit: Optional[int] = None) -> OracleResult:
    """``h^0(wedge^q K(B))`` for ``K = ker(b_mat)``.

    The induced matrix is first ranked over ``F_p``; full column rank there
    already proves injectivity over Q.  Otherwise the exact rank is computed
    while the domain stays within ``budget``; beyond it the modular value is
    returned and flagged as not exact.  Past ``hard_limit`` (default ten
    times the budget) nothing is computed.
    """
    space = md.space
    B = space.check_twist(B)
    mid = md.middle.copies()
    tgt = md.target.copies()
    if not 1 <= q <= len(mid):
        raise ValueError(f"q={q} outside 1..{len(mid)}")
    if not is_well_formed(md):
        raise OracleRefused("descriptor fails the homogeneity check; induced maps on sections are undefined")
    if hard_limit is None:
        hard_limit = 10 * budget
    dims = space.slot_dims

    domain: List[Tuple[Tuple[int, ...], Twist, int]] = []
    size = 0
    for S in combinations(range(len(mid)), q):
        tw = add(B, *(mid[t] for t in S))
        n = h0_count(space, tw)
        if n:
            domain.append((S, tw, size))
            size += n
    codomain_size = sum(
        h0_count(space, add(B, tg, *(mid[t] for t in R)))
        for R in combinations(range(len(mid)), q - 1)
        for tg in tgt
    )
    if size == 0:
        return OracleResult(0, q, B, 0, codomain_size, 0, "empty-domain", True)
    if size > hard_limit:
        return OracleResult(None, q, B, size, codomain_size, None, "too-large", False)

    bcols: Dict[int, List[Tuple[int, Dict[Monomial, int]]]] = {}
    for (u, t), poly in md.b_mat.entries.items():
        bcols.setdefault(t, []).append((u, poly.terms))

    cod_index: Dict[Tuple[Tuple[int, ...], int], Tuple[int, Dict[Monomial, int]]] = {}
    cod_next = 0
    rows: List[Dict[int, int]] = []
    for S, tw, _ in domain:
        monos = _basis(dims, tw)[0]
        images: List[Dict[int, int]] = [dict() for _ in monos]
        for pos, t in enumerate(S):
            sign = -1 if pos % 2 else 1
            R = S[:pos] + S[pos + 1:]
            for u, terms in bcols.get(t, ()):
                key = (R, u)
                blk = cod_index.get(key)
                if blk is None:
                    ctw = add(B, tgt[u], *(mid[r] for r in R))
                    blk = (cod_next, _basis(dims, ctw)[1])
                    cod_index[key] = blk
                    cod_next += len(blk[1])
                off, idx = blk
                for mono, coeff in terms.items():
                    for i, m in enumerate(monos):
                        target_mono = mono_mul(m, mono)
                        col = off + idx[target_mono]
                        v = images[i].get(col, 0) + sign * coeff
                        if v:
                            images[i][col] = v
                        else:
                            del images[i][col]
        rows.extend(images)

    ncols = max(cod_next, 1)
    rank_p = _matrix_rank(rows, ncols, prime)
    if rank_p == size:
        return OracleResult(0, q, B, size, codomain_size, rank_p, "modular-injective", True)
    if size <= budget:
        rank = _matrix_rank(rows, ncols, None)
        return OracleResult(size - rank, q, B, size, codomain_size, rank, "exact", True)
    return OracleResult(size - rank_p, q, B, size, codomain_size, rank_p, "modular-probabilistic", False)


def h0_kernel(md: MonadDescriptor, B: Sequence[int], budget: int = DEFAULT_BUDGET,
              prime: int = linalg.DEFAULT_PRIME) -> OracleResult:
    return h0_wedge_kernel(md, 1, B, budget=budget, prime=prime)


def h0_sum(space: SpaceSpec, twists: Sequence[Twist]) -> int:
    """Brute-force ``h^0`` of a sum of line bundles by basis enumeration."""
    return sum(len(section_basis(space, t)) for t in twists)
