"""Picard lattice, truncated intersection ring and slope arithmetic.

A twist is a plain tuple of ``2s`` integers in slot order
``(1,1), (1,2), (2,1), (2,2), ..., (s,1), (s,2)``; slot ``2(i-1)`` and
``2(i-1)+1`` both live on a copy of ``P^{n_i}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Sequence, Tuple

Twist = Tuple[int, ...]


class NormalizationError(RuntimeError):
    """Raised when the normalization window check fails."""


@dataclass(frozen=True)
class SpaceSpec:
    """``X = (P^{n_1})^2 x ... x (P^{n_s})^2``."""

    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise ValueError("a space needs at least one factor pair (s >= 1)")
        if any(n < 1 for n in dims):
            raise ValueError(f"factor dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def s(self) -> int:
        return len(self.dims)

    @property
    def nslots(self) -> int:
        return 2 * len(self.dims)

    @property
    def slot_dims(self) -> Tuple[int, ...]:
        return tuple(n for n in self.dims for _ in (0, 1))

    @property
    def D(self) -> int:
        return 2 * sum(self.dims)

    def zero(self) -> Twist:
        return (0,) * self.nslots

    def unit(self, j: int) -> Twist:
        e = [0] * self.nslots
        e[j] = 1
        return tuple(e)

    def check_twist(self, B: Sequence[int]) -> Twist:
        B = tuple(int(b) for b in B)
        if len(B) != self.nslots:
            raise ValueError(f"twist {B} has length {len(B)}, expected {self.nslots}")
        return B


@dataclass(frozen=True)
class Polarization:
    alphas: Tuple[int, ...]

    def __post_init__(self):
        alphas = tuple(int(a) for a in self.alphas)
        if any(a < 1 for a in alphas):
            # alpha_i = 0 gives a nef but non-ample class; slopes would be meaningless
            raise ValueError(f"polarization exponents must be >= 1, got {alphas}")
        object.__setattr__(self, "alphas", alphas)

    @property
    def expansion(self) -> Twist:
        return tuple(a for a in self.alphas for _ in (0, 1))


@dataclass(frozen=True)
class BundleInvariants:
    rank: int
    c1: Twist
    degree: int
    slope: Fraction

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "c1": list(self.c1),
            "degree": self.degree,
            "slope": str(self.slope),
        }


# -- twist arithmetic -------------------------------------------------------

def add(*twists: Twist) -> Twist:
    return tuple(sum(t) for t in zip(*twists))


def sub(a: Twist, b: Twist) -> Twist:
    return tuple(x - y for x, y in zip(a, b))


def scale(c: int, a: Twist) -> Twist:
    return tuple(c * x for x in a)


def neg(a: Twist) -> Twist:
    return tuple(-x for x in a)


# -- truncated intersection ring -------------------------------------------

class ChowClass:
    """Integer polynomial in ``h_1..h_{2s}`` modulo ``h_j^{n(j)+1} = 0``.

    Reduction happens on every product so a class never holds more than
    ``prod(n(j)+1)`` terms.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: SpaceSpec, terms: Dict[Tuple[int, ...], int] | None = None):
        self.space = space
        self.terms = self._reduce(space, terms or {})

    @staticmethod
    def _reduce(space, terms):
        bound = space.slot_dims
        return {
            e: c
            for e, c in terms.items()
            if c != 0 and all(x <= b for x, b in zip(e, bound))
        }

    @classmethod
    def one(cls, space: SpaceSpec) -> "ChowClass":
        return cls(space, {space.zero(): 1})

    @classmethod
    def linear(cls, space: SpaceSpec, B: Sequence[int]) -> "ChowClass":
        """The divisor class ``sum_j B_j h_j``."""
        B = space.check_twist(B)
        return cls(space, {space.unit(j): b for j, b in enumerate(B) if b})

    def __add__(self, other: "ChowClass") -> "ChowClass":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return ChowClass(self.space, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return ChowClass(self.space, {e: other * c for e, c in self.terms.items()})
        bound = self.space.slot_dims
        out: Dict[Tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x > b for x, b in zip(e, bound)):
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        return ChowClass(self.space, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ChowClass":
        if k < 0:
            raise ValueError("negative power")
        result = ChowClass.one(self.space)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, ChowClass) and self.space == other.space and self.terms == other.terms

    def __repr__(self) -> str:
        return f"ChowClass({self.terms!r})"


def top_coefficient(space: SpaceSpec, cls: ChowClass) -> int:
    """Coefficient of the point class ``prod_j h_j^{n(j)}``."""
    return cls.terms.get(space.slot_dims, 0)


def polarization_class(space: SpaceSpec, pol: Polarization) -> ChowClass:
    if len(pol.alphas) != space.s:
        raise ValueError(f"polarization has {len(pol.alphas)} exponents, space has s={space.s}")
    return ChowClass.linear(space, pol.expansion)


@lru_cache(maxsize=None)
def slot_weights(space: SpaceSpec, pol: Polarization) -> Twist:
    """``w_j = h_j . L^{D-1}``; delta is the dot product with these."""
    Lpow = polarization_class(space, pol) ** (space.D - 1)
    return tuple(
        top_coefficient(space, ChowClass.linear(space, space.unit(j)) * Lpow)
        for j in range(space.nslots)
    )


def delta(space: SpaceSpec, pol: Polarization, B: Sequence[int]) -> int:
    """Degree of ``O_X(B)`` against the polarization."""
    B = space.check_twist(B)
    return sum(b * w for b, w in zip(B, slot_weights(space, pol)))


def degree_and_slope(space: SpaceSpec, pol: Polarization, rank: int, c1: Sequence[int]) -> BundleInvariants:
    if rank < 1:
        raise ValueError(f"rank must be positive, got {rank}")
    c1 = space.check_twist(c1)
    deg = delta(space, pol, c1)
    return BundleInvariants(rank=rank, c1=c1, degree=deg, slope=Fraction(deg, rank))


def normalize(space: SpaceSpec, pol: Polarization, inv: BundleInvariants) -> Tuple[int, int]:
    """Return ``(k_E, deg E(-k_E, 0, ..., 0))``.

    The twisted degree must land in ``[1 - d*rk, 0]`` with ``d`` the degree
    of ``O(1, 0, ..., 0)``; anything else means the arithmetic is broken.
    """
    d = delta(space, pol, space.unit(0))
    if d <= 0:
        raise NormalizationError(f"degree of O(1,0,...,0) is {d}, expected > 0")
    k_e = math.ceil(inv.slope / d)
    normalized = inv.degree - k_e * d * inv.rank
    if not (1 - d * inv.rank <= normalized <= 0):
        raise NormalizationError(
            f"normalized degree {normalized} outside [{1 - d * inv.rank}, 0] "
            f"(rank={inv.rank}, degree={inv.degree}, d={d}, k_E={k_e})"
        )
    return k_e, normalized


def sum_invariants(space: SpaceSpec, pol: Polarization, summands: Iterable[Tuple[Twist, int]]) -> BundleInvariants:
    """Invariants of a direct sum of line bundles ``O(t)^m``."""
    rank = 0
    c1 = space.zero()
    for t, m in summands:
        rank += m
        c1 = add(c1, scale(m, t))
    return degree_and_slope(space, pol, rank, c1)
