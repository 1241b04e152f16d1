"""Deliberately broken descriptors, used to show the checks can fail."""
from __future__ import annotations

from dataclasses import replace

from .cohom import LineBundleSum
from .monad import MonadDescriptor, build_monad
from .picard import Polarization, SpaceSpec
from .polyalg import PolyMatrix


def sign_flipped(md: MonadDescriptor) -> MonadDescriptor:
    """Negate the reversed x-block of the second map, so the telescoping no longer cancels."""
    if not md.k:
        raise ValueError("needs k >= 1")
    blk = md.blocks[0]
    cols = range(blk.x_offset, blk.x_offset + blk.n + md.k)
    ent = {(r, c): (-p if c in cols else p) for (r, c), p in md.b_mat.entries.items()}
    return replace(md, b_mat=PolyMatrix(md.b_mat.rows, md.b_mat.cols, ent),
                   notes=md.notes + ("x-block of b_mat sign-flipped",))


def duplicated_column(md: MonadDescriptor) -> MonadDescriptor:
    """Overwrite the last column of the first map by its first one (needs k >= 2)."""
    if md.k < 2:
        raise ValueError("needs k >= 2")
    last = md.a_mat.cols - 1
    ent = {(r, c): p for (r, c), p in md.a_mat.entries.items() if c != last}
    for (r, c), p in md.a_mat.entries.items():
        if c == 0:
            ent[(r, last)] = p
    return replace(md, a_mat=PolyMatrix(md.a_mat.rows, md.a_mat.cols, ent),
                   notes=md.notes + ("a_mat column duplicated",))


def trivial_summand(md: MonadDescriptor) -> MonadDescriptor:
    """Append ``O(0,...,0)`` to the middle, untouched by both maps.

    The kernel then splits off a trivial line bundle, whose constant section
    destabilizes it once the slope is negative.
    """
    zero = md.space.zero()
    middle = LineBundleSum(md.middle.parts + ((zero, 1),))
    a = PolyMatrix(md.a_mat.rows + 1, md.a_mat.cols, dict(md.a_mat.entries))
    b = PolyMatrix(md.b_mat.rows, md.b_mat.cols + 1, dict(md.b_mat.entries))
    return replace(md, middle=middle, a_mat=a, b_mat=b, notes=md.notes + ("trivial middle summand",))


def homogeneous_instance(n: int = 1, alpha: int = 1, k: int = 1) -> MonadDescriptor:
    return build_monad(SpaceSpec((n,)), Polarization((alpha,)), k, "homogeneous")
