"""Line-bundle cohomology on products of projective spaces.

Each factor contributes the Bott formula on ``P^n``; the product is the
Künneth convolution over all ``2s`` slots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, prod
from typing import Dict, Iterable, List, Sequence, Tuple

from .picard import SpaceSpec, Twist, add, scale


def bott(n: int, d: int, q: int) -> int:
    """``h^q(P^n, O(d))``."""
    if n < 1:
        raise ValueError(f"projective dimension must be >= 1, got {n}")
    if q == 0:
        return comb(n + d, n) if d >= 0 else 0
    if q == n:
        return comb(-d - 1, n) if -d - n - 1 >= 0 else 0
    return 0


@lru_cache(maxsize=1 << 16)
def _line_table(slot_dims: Tuple[int, ...], a: Tuple[int, ...]) -> Tuple[int, ...]:
    table = [1]
    for n, d in zip(slot_dims, a):
        factor = [bott(n, d, q) for q in range(n + 1)]
        out = [0] * (len(table) + n)
        for i, x in enumerate(table):
            if x:
                for j, y in enumerate(factor):
                    if y:
                        out[i + j] += x * y
        table = out
    return tuple(table)


def line_table(space: SpaceSpec, a: Sequence[int]) -> Tuple[int, ...]:
    """``(h^0, ..., h^D)`` of ``O_X(a)``."""
    return _line_table(space.slot_dims, space.check_twist(a))


def line_cohomology(space: SpaceSpec, a: Sequence[int], q: int) -> int:
    if q < 0 or q > space.D:
        return 0
    return line_table(space, a)[q]


class LineBundleSum:
    """Ordered direct sum ``O(t_1)^{m_1} + O(t_2)^{m_2} + ...``.

    Order matters: expanded copies index the rows and columns of the monad
    matrices.
    """

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Tuple[Sequence[int], int]] = ()):
        clean = []
        for t, m in parts:
            m = int(m)
            if m < 1:
                raise ValueError(f"multiplicity must be >= 1, got {m}")
            clean.append((tuple(int(x) for x in t), m))
        lengths = {len(t) for t, _ in clean}
        if len(lengths) > 1:
            raise ValueError(f"summands have inconsistent twist lengths {sorted(lengths)}")
        self.parts: Tuple[Tuple[Twist, int], ...] = tuple(clean)

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.parts)

    def c1(self, nslots: int) -> Twist:
        out = (0,) * nslots
        for t, m in self.parts:
            out = add(out, scale(m, t))
        return out

    def copies(self) -> List[Twist]:
        return [t for t, m in self.parts for _ in range(m)]

    def twisted(self, B: Sequence[int]) -> "LineBundleSum":
        return LineBundleSum((add(t, tuple(B)), m) for t, m in self.parts)

    def dual(self) -> "LineBundleSum":
        return LineBundleSum((tuple(-x for x in t), m) for t, m in self.parts)

    def merged(self) -> Dict[Twist, int]:
        out: Dict[Twist, int] = {}
        for t, m in self.parts:
            out[t] = out.get(t, 0) + m
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LineBundleSum) and self.parts == other.parts

    def __repr__(self) -> str:
        return "LineBundleSum(" + " + ".join(f"O{t}^{m}" for t, m in self.parts) + ")"

    def to_list(self) -> list:
        return [[list(t), m] for t, m in self.parts]


@dataclass(frozen=True)
class CohomologyTable:
    bundle: LineBundleSum
    dims: Tuple[int, ...]

    def __getitem__(self, q: int) -> int:
        return self.dims[q] if 0 <= q < len(self.dims) else 0

    def euler(self) -> int:
        return sum((-1) ** q * h for q, h in enumerate(self.dims))


def sum_cohomology(space: SpaceSpec, S: LineBundleSum) -> CohomologyTable:
    dims = [0] * (space.D + 1)
    for t, m in S.parts:
        for q, h in enumerate(line_table(space, t)):
            dims[q] += m * h
    return CohomologyTable(S, tuple(dims))


def exterior_power(S: LineBundleSum, q: int) -> LineBundleSum:
    """``wedge^q`` of a sum of line bundles, collected by twist.

    A count vector ``m`` (``0 <= m_t <= mult_t``, ``sum m = q``) contributes
    ``O(sum m_t t)`` with multiplicity ``prod C(mult_t, m_t)``.
    """
    if not 0 <= q <= S.rank:
        raise ValueError(f"exterior power {q} out of range 0..{S.rank}")
    merged = list(S.merged().items())
    if not merged:
        return LineBundleSum([((), 1)]) if q == 0 else LineBundleSum()
    nslots = len(merged[0][0])
    out: Dict[Twist, int] = {}
    for counts in product(*(range(m + 1) for _, m in merged)):
        if sum(counts) != q:
            continue
        tw = (0,) * nslots
        mult = 1
        for (t, m), c in zip(merged, counts):
            if c:
                tw = add(tw, scale(c, t))
                mult *= comb(m, c)
        out[tw] = out.get(tw, 0) + mult
    return LineBundleSum(sorted(out.items()))


def _binomial_poly(n: int, a: int) -> int:
    # C(n+a, n) read as the polynomial (a+1)...(a+n)/n!, valid for every integer a
    num = prod(a + i for i in range(1, n + 1))
    den = prod(range(1, n + 1))
    return num // den


def euler_characteristic(space: SpaceSpec, S: LineBundleSum) -> int:
    """Alternating sum of the cohomology table.

    Raises ``ArithmeticError`` if it disagrees with the Hilbert-polynomial
    product, which would mean the engine is broken.
    """
    chi = sum_cohomology(space, S).euler()
    closed = sum(
        m * prod(_binomial_poly(n, a) for n, a in zip(space.slot_dims, t))
        for t, m in S.parts
    )
    if chi != closed:
        raise ArithmeticError(f"euler characteristic mismatch: {chi} vs {closed} for {S!r}")
    return chi


def euler_closed_form(space: SpaceSpec, a: Sequence[int]) -> int:
    return prod(_binomial_poly(n, x) for n, x in zip(space.slot_dims, a))
