"""Banded monad matrices, monad descriptors and their hypothesis checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .cohom import LineBundleSum
from .picard import (
    BundleInvariants,
    Polarization,
    SpaceSpec,
    Twist,
    degree_and_slope,
    polarization_class,
    sub,
    top_coefficient,
)
from .polyalg import (
    INHOMOGENEOUS,
    Poly,
    PolyMatrix,
    Var,
    evaluate,
    hstack,
    mat_mul,
    multidegree,
    vstack,
)

PROFILES = ("paper", "homogeneous")


class ProfileError(ValueError):
    """Profile cannot be applied to the requested space."""


def banded_block(n: int, k: int, alpha: int, family: str, group: int, orientation: str) -> PolyMatrix:
    """Shifted-diagonal block of pure powers ``v_j^alpha``.

    ``forward`` is ``(n+k) x k`` with ``(r, c) -> v_{r-c}``; ``reversed`` is
    ``k x (n+k)`` with ``(r, t) -> v_{n-(t-r)}``.  Only the reversed
    orientation makes the composition telescope.
    """
    if n < 1 or k < 1 or alpha < 1:
        raise ValueError(f"banded_block needs n, k, alpha >= 1 (got n={n}, k={k}, alpha={alpha})")
    if family not in ("x", "y"):
        raise ValueError(f"family must be 'x' or 'y', got {family!r}")
    ent = {}
    if orientation == "forward":
        for c in range(k):
            for j in range(n + 1):
                ent[(c + j, c)] = Poly.var(Var(group, family, j), alpha)
        return PolyMatrix(n + k, k, ent)
    if orientation == "reversed":
        for r in range(k):
            for d in range(n + 1):
                ent[(r, r + d)] = Poly.var(Var(group, family, n - d), alpha)
        return PolyMatrix(k, n + k, ent)
    raise ValueError(f"orientation must be 'forward' or 'reversed', got {orientation!r}")


@dataclass(frozen=True)
class GroupBlock:
    """Where group ``i``'s band blocks sit among the middle copies."""

    group: int
    n: int
    alpha: int
    x_offset: int
    y_offset: int


@dataclass(frozen=True, eq=False)
class MonadDescriptor:
    space: SpaceSpec
    pol: Polarization
    k: int
    profile: str
    source: LineBundleSum
    middle: LineBundleSum
    target: LineBundleSum
    a_mat: PolyMatrix
    b_mat: PolyMatrix
    blocks: Tuple[GroupBlock, ...] = ()
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.a_mat.shape != (self.middle.rank, self.source.rank):
            raise ValueError(
                f"first map is {self.a_mat.rows}x{self.a_mat.cols}, "
                f"expected {self.middle.rank}x{self.source.rank}"
            )
        if self.b_mat.shape != (self.target.rank, self.middle.rank):
            raise ValueError(
                f"second map is {self.b_mat.rows}x{self.b_mat.cols}, "
                f"expected {self.target.rank}x{self.middle.rank}"
            )

    def describe(self) -> dict:
        return {
            "s": self.space.s,
            "n": list(self.space.dims),
            "alpha": list(self.pol.alphas),
            "k": self.k,
            "profile": self.profile,
            "source": self.source.to_list(),
            "middle": self.middle.to_list(),
            "target": self.target.to_list(),
            "notes": list(self.notes),
        }


def _profile_sums(space: SpaceSpec, pol: Polarization, k: int, profile: str):
    z = space.zero()
    L = pol.expansion
    middle = []
    if profile == "paper":
        for i, (n, a) in enumerate(zip(space.dims, pol.alphas)):
            for slot in (2 * i, 2 * i + 1):
                t = list(z)
                t[slot] = -a
                if n + k:
                    middle.append((tuple(t), n + k))
        source = [(tuple(-x for x in L), k)] if k else []
        target = [(L, k)] if k else []
    elif profile == "homogeneous":
        if space.s != 1:
            raise ProfileError(f"the homogeneous profile needs s = 1, got s = {space.s}")
        n, a = space.dims[0], pol.alphas[0]
        # x-rows carry O(0,-a): an x^a entry from O(-a,-a) lands there homogeneously
        middle = [((0, -a), n + k), ((-a, 0), n + k)]
        source = [((-a, -a), k)] if k else []
        target = [((0, 0), k)] if k else []
    else:
        raise ProfileError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    return LineBundleSum(source), LineBundleSum(middle), LineBundleSum(target)


def build_monad(
    space: SpaceSpec,
    pol: Polarization,
    k: int,
    profile: str = "paper",
    overrides: Optional[Dict[str, LineBundleSum]] = None,
    exponent_shifts: Optional[Sequence[int]] = None,
) -> MonadDescriptor:
    """Assemble the banded matrices and the twist bookkeeping for a profile.

    ``overrides`` may replace any of ``source``/``middle``/``target`` by a
    user-supplied sum of the same rank.
    """
    if len(pol.alphas) != space.s:
        raise ValueError(f"polarization has {len(pol.alphas)} exponents for s={space.s}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if exponent_shifts is not None and any(int(a) != 0 for a in exponent_shifts):
        raise ValueError("only zero exponent shifts are supported (per-column exponents break homogeneity)")
    source, middle, target = _profile_sums(space, pol, k, profile)

    a_blocks, b_blocks, blocks = [], [], []
    offset = 0
    for i, (n, a) in enumerate(zip(space.dims, pol.alphas), start=1):
        if k:
            xf = banded_block(n, k, a, "x", i, "forward")
            yf = banded_block(n, k, a, "y", i, "forward")
            yr = banded_block(n, k, a, "y", i, "reversed")
            xr = banded_block(n, k, a, "x", i, "reversed")
        else:
            xf = yf = PolyMatrix(n, 0)
            yr = xr = PolyMatrix(0, n)
        a_blocks += [xf, yf]
        b_blocks += [yr, -xr]
        blocks.append(GroupBlock(i, n, a, offset, offset + n + k))
        offset += 2 * (n + k)
    a_mat = vstack(a_blocks)
    b_mat = hstack(b_blocks)

    notes = []
    if overrides:
        for key, val in overrides.items():
            ref = {"source": source, "middle": middle, "target": target}[key]
            if val.rank != ref.rank:
                raise ValueError(f"override for {key} has rank {val.rank}, expected {ref.rank}")
            notes.append(f"{key} twists overridden")
        source = overrides.get("source", source)
        middle = overrides.get("middle", middle)
        target = overrides.get("target", target)
    return MonadDescriptor(space, pol, k, profile, source, middle, target, a_mat, b_mat, tuple(blocks), tuple(notes))


# -- checks -----------------------------------------------------------------

@dataclass
class ComposeResult:
    passed: bool
    first_nonzero: Optional[Tuple[int, int, str]] = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "first_nonzero": list(self.first_nonzero) if self.first_nonzero else None}


def compose_check(md: MonadDescriptor) -> ComposeResult:
    """Symbolic check that ``b_mat . a_mat`` vanishes."""
    prod_ = mat_mul(md.b_mat, md.a_mat)
    if prod_.is_zero():
        return ComposeResult(True)
    r, c = min(prod_.entries)
    return ComposeResult(False, (r, c, str(prod_.entries[(r, c)])))


@dataclass
class EntryCheck:
    matrix: str
    row: int
    col: int
    degree: object
    required: Twist
    ok: bool

    def to_dict(self) -> dict:
        deg = list(self.degree) if isinstance(self.degree, tuple) else repr(self.degree)
        return {"matrix": self.matrix, "row": self.row, "col": self.col,
                "degree": deg, "required": list(self.required), "ok": self.ok}


@dataclass
class HomogeneityReport:
    entries: List[EntryCheck]

    @property
    def mismatches(self) -> List[EntryCheck]:
        return [e for e in self.entries if not e.ok]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def homogeneity_check(md: MonadDescriptor) -> HomogeneityReport:
    """Compare each entry's multidegree with the twist difference it must carry."""
    ns = md.space.nslots
    src, mid, tgt = md.source.copies(), md.middle.copies(), md.target.copies()
    out = []
    for name, M, rows, cols in (("a_mat", md.a_mat, mid, src), ("b_mat", md.b_mat, tgt, mid)):
        for (r, c) in sorted(M.entries):
            deg = multidegree(M.entries[(r, c)], ns)
            req = sub(rows[r], cols[c])
            out.append(EntryCheck(name, r, c, deg, req, deg is not INHOMOGENEOUS and deg == req))
    return HomogeneityReport(out)


def _in_lower_ideal(p: Poly, group: int, family: str, j: int) -> bool:
    # every term involves some v_i with i < j, so p vanishes where v_0..v_{j-1} do
    for m in p.terms:
        if not any(v.group == group and v.family == family and v.index < j for v, _ in m):
            return False
    return True


def _structural_witnesses(md: MonadDescriptor) -> List[dict]:
    k = md.k
    out = []
    for blk in md.blocks:
        for family in ("x", "y"):
            a_off = blk.x_offset if family == "x" else blk.y_offset
            # b carries y-entries over the x-rows and (negated) x-entries over the y-rows
            b_off = blk.y_offset if family == "x" else blk.x_offset
            for j in range(blk.n + 1):
                v = Var(blk.group, family, j)
                diag = Poly.var(v, blk.alpha)
                problems = []
                for mat, pick in (("a_mat", lambda row, col: md.a_mat[(a_off + row + j, col)]),
                                  ("b_mat", lambda row, col: md.b_mat[(row, b_off + col + blk.n - j)])):
                    for row in range(k):
                        for col in range(k):
                            p = pick(row, col)
                            if row == col:
                                if p != diag and p != -diag:
                                    problems.append(f"{mat} diagonal {row}: {p!r}")
                            elif col > row and not _in_lower_ideal(p, blk.group, family, j):
                                problems.append(f"{mat} entry ({row},{col}) does not vanish: {p!r}")
                out.append({
                    "group": blk.group, "family": family, "leading_index": j,
                    "diagonal": f"±{v}^{blk.alpha}", "ok": not problems, "problems": problems,
                })
    return out


def random_point(space: SpaceSpec, rng: random.Random, p: int) -> Dict[Var, int]:
    """A point of ``X`` over ``F_p`` with every coordinate nonzero."""
    pt = {}
    for i, n in enumerate(space.dims, start=1):
        for fam in ("x", "y"):
            for j in range(n + 1):
                pt[Var(i, fam, j)] = rng.randrange(1, p)
    return pt


@dataclass
class RankCertificate:
    passed: bool
    structural: List[dict]
    trials: int
    prime: int
    seed: int
    failures: List[dict] = field(default_factory=list)
    expected: Tuple[int, int] = (0, 0)

    @property
    def structural_ok(self) -> bool:
        return bool(self.structural) and all(w["ok"] for w in self.structural)

    @property
    def randomized_ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "structural_ok": self.structural_ok,
            "structural_witnesses": len(self.structural),
            "structural_problems": [w for w in self.structural if not w["ok"]],
            "randomized_ok": self.randomized_ok,
            "trials": self.trials,
            "prime": self.prime,
            "seed": self.seed,
            "expected_ranks": list(self.expected),
            "failures": self.failures,
        }


def rank_certificate(md: MonadDescriptor, trials: int = 100, prime: int = linalg.DEFAULT_PRIME,
                     seed: int = 0) -> RankCertificate:
    """Maximal rank of both maps: triangular witnesses plus random points."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    structural = _structural_witnesses(md) if md.k else []
    exp_a = min(md.a_mat.shape)
    exp_b = min(md.b_mat.shape)
    failures = []
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        pt = random_point(md.space, rng, prime)
        ra = linalg.rank_mod_p(evaluate(md.a_mat, pt, prime), prime) if exp_a else 0
        rb = linalg.rank_mod_p(evaluate(md.b_mat, pt, prime), prime) if exp_b else 0
        if ra != exp_a or rb != exp_b:
            failures.append({"trial": t, "rank_a": ra, "rank_b": rb,
                             "point": {str(v): x for v, x in sorted(pt.items())}})
    struct_ok = (not md.k) or (bool(structural) and all(w["ok"] for w in structural))
    return RankCertificate(struct_ok and not failures, structural, trials, prime, seed, failures, (exp_a, exp_b))


@dataclass(frozen=True)
class KernelInvariants:
    K: BundleInvariants
    E: Optional[BundleInvariants]
    rank_K: int
    rank_E: int

    def to_dict(self) -> dict:
        return {"K": self.K.to_dict(), "E": self.E.to_dict() if self.E else None,
                "rank_K": self.rank_K, "rank_E": self.rank_E}


def kernel_invariants(md: MonadDescriptor) -> KernelInvariants:
    ns = md.space.nslots
    rank_k = md.middle.rank - md.target.rank
    rank_e = rank_k - md.source.rank
    c1_k = sub(md.middle.c1(ns), md.target.c1(ns))
    c1_e = sub(c1_k, md.source.c1(ns))
    K = degree_and_slope(md.space, md.pol, rank_k, c1_k)
    E = degree_and_slope(md.space, md.pol, rank_e, c1_e) if rank_e >= 1 else None
    return KernelInvariants(K, E, rank_k, rank_e)


# closed forms quoted by the construction, used as cross-checks only

def expected_rank_K(space: SpaceSpec, k: int) -> int:
    return 2 * sum(space.dims) + (2 * space.s - 1) * k


def expected_rank_E(space: SpaceSpec, k: int) -> int:
    return 2 * sum(space.dims) + 2 * k * (space.s - 1)


def expected_c1_K(space: SpaceSpec, pol: Polarization, k: int) -> Twist:
    return tuple(-(n + 2 * k) * a for n, a in zip(space.dims, pol.alphas) for _ in (0, 1))


def quoted_degree_K(space: SpaceSpec, k: int) -> int:
    """``-(sum n_i + 2sk) * L^D`` at ``alpha = 1``, as quoted for the kernel degree."""
    L = polarization_class(space, Polarization((1,) * space.s))
    return -(sum(space.dims) + 2 * space.s * k) * top_coefficient(space, L ** space.D)


def floystad_check(a: int, b: int, c: int, N: int) -> bool:
    """Existence test for linear monads ``O(-1)^a -> O^b -> O(1)^c`` on ``P^N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return (b >= a + c and b >= 2 * c + N - 1) or b >= a + c + N
