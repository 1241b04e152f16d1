"""Audited certificates for the monad claims.

Every certificate is a list of evidence steps; its status is ``falsified``
if any step is, ``verified`` only if every step is, and ``inconclusive``
otherwise.  Material that is informative but not part of the argument goes
into ``supplementary`` and never affects the status.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

from . import linalg
from .cohom import LineBundleSum, exterior_power, sum_cohomology
from .monad import (
    MonadDescriptor,
    compose_check,
    expected_c1_K,
    expected_rank_E,
    expected_rank_K,
    homogeneity_check,
    kernel_invariants,
    quoted_degree_K,
    rank_certificate,
)
from .oracle import DEFAULT_BUDGET, h0_count, h0_wedge_kernel, is_well_formed
from .picard import (
    NormalizationError,
    Polarization,
    SpaceSpec,
    Twist,
    add,
    degree_and_slope,
    delta,
    normalize,
    scale,
    slot_weights,
)

VERIFIED, FALSIFIED, INCONCLUSIVE = "verified", "falsified", "inconclusive"
LISTING_CAP = 20


@dataclass
class Step:
    statement: str
    rule: str
    status: str
    inputs: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"statement": self.statement, "rule": self.rule, "status": self.status,
                "inputs": self.inputs, "values": self.values}


def combine(statuses: Sequence[str]) -> str:
    if not statuses:
        return INCONCLUSIVE
    if FALSIFIED in statuses:
        return FALSIFIED
    if all(s == VERIFIED for s in statuses):
        return VERIFIED
    return INCONCLUSIVE


@dataclass
class Certificate:
    claim: str
    instance: dict
    steps: List[Step] = field(default_factory=list)
    supplementary: List[Step] = field(default_factory=list)

    @property
    def status(self) -> str:
        return combine([s.status for s in self.steps])

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "status": self.status,
            "instance": self.instance,
            "evidence": [s.to_dict() for s in self.steps],
            "supplementary": [s.to_dict() for s in self.supplementary],
        }


def _fmt_sum(S: LineBundleSum) -> str:
    return " + ".join(f"O({','.join(map(str, t))})^{m}" for t, m in S.parts) or "0"


# -- twist regions ----------------------------------------------------------

@dataclass(frozen=True)
class TwistRegion:
    q: int
    bound: Fraction
    strict: bool
    twists: Tuple[Twist, ...]
    lower: Twist
    truncated: bool

    def __contains__(self, B) -> bool:
        return tuple(B) in set(self.twists)

    def __len__(self) -> int:
        return len(self.twists)

    def to_dict(self) -> dict:
        return {
            "q": self.q, "bound": str(self.bound), "strict": self.strict, "size": len(self.twists),
            "truncated": self.truncated, "lower_bounds": list(self.lower),
        }


def _bounded_vectors(weights: Sequence[int], slack: Fraction, strict: bool) -> Iterator[Tuple[int, ...]]:
    # u >= 0 with sum w_j u_j < slack (or <= slack)
    n = len(weights)

    def rec(j, rem, acc):
        if j == n:
            yield tuple(acc)
            return
        w = weights[j]
        u = 0
        while (u * w < rem) if strict else (u * w <= rem):
            acc.append(u)
            yield from rec(j + 1, rem - u * w, acc)
            acc.pop()
            u += 1

    if (slack > 0) if strict else (slack >= 0):
        yield from rec(0, slack, [])


def candidate_region(space: SpaceSpec, pol: Polarization, middle: LineBundleSum, q: int,
                     bound, strict: bool = True, limit: Optional[int] = None) -> TwistRegion:
    """Twists ``B`` where ``h^0(wedge^q K(B))`` could be nonzero and ``delta(B)`` is below ``bound``.

    ``B`` must lift some summand ``O(t)`` of ``wedge^q middle`` to all slots
    ``>= 0`` (otherwise the ambient sections, and hence those of the
    subsheaf, vanish).  Writing ``B = -t + u`` with ``u >= 0``, positivity of
    the slot weights leaves finitely many ``u``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    weights = slot_weights(space, pol)
    if any(w <= 0 for w in weights):
        raise ValueError(f"slot weights must be positive, got {weights}")
    bound = Fraction(bound)
    summands = sorted(exterior_power(middle, q).merged())
    found = set()
    truncated = False
    for t in summands:
        base = tuple(-x for x in t)
        slack = bound - delta(space, pol, base)
        for u in _bounded_vectors(weights, slack, strict):
            found.add(add(base, u))
            if limit is not None and len(found) >= limit:
                truncated = True
                break
        if truncated:
            break
    lower = tuple(min(-t[j] for t in summands) for j in range(space.nslots)) if summands else space.zero()
    return TwistRegion(q, bound, strict, tuple(sorted(found)), lower, truncated)


def ambient_h0(md: MonadDescriptor, q: int, B: Sequence[int], wedge: Optional[LineBundleSum] = None) -> int:
    """``h^0(wedge^q middle (B))``, which bounds ``h^0(wedge^q K(B))`` from above."""
    wedge = wedge if wedge is not None else exterior_power(md.middle, q)
    return sum(m * h0_count(md.space, add(t, B)) for t, m in wedge.parts)


# -- stability ----------------------------------------------------------------

def _check_twists(md, q, region, budget, prime, falsify_on_q1):
    """Decide ``h^0(wedge^q K(B)) = 0`` for every ``B`` in the region."""
    results = []
    undecided = []
    status = VERIFIED
    witness = None
    well_formed = is_well_formed(md)
    wedge = exterior_power(md.middle, q)
    for B in region.twists:
        if not well_formed:
            # region members always have ambient sections, so only the oracle could decide
            undecided.append(list(B))
            status = INCONCLUSIVE
            continue
        amb = ambient_h0(md, q, B, wedge)
        if amb == 0:
            results.append({"B": list(B), "ambient_h0": 0, "path": "ambient"})
            continue
        res = h0_wedge_kernel(md, q, B, budget=budget, prime=prime)
        entry = {"B": list(B), "ambient_h0": amb, "path": "oracle", **{
            k: v for k, v in res.to_dict().items() if k not in ("q", "B")}}
        results.append(entry)
        if res.value == 0:
            continue
        if res.exact and q == 1 and falsify_on_q1:
            # a section of K(B) with delta(B) < -slope is a destabilizing line subsheaf
            status = FALSIFIED
            witness = witness or {"q": q, "B": list(B), "h0": res.value}
        else:
            status = combine([status, INCONCLUSIVE])
            witness = witness or {"q": q, "B": list(B), "h0": res.value, "exact": res.exact}
    if region.truncated:
        status = combine([status, INCONCLUSIVE])
    values = {
        "region": region.to_dict(),
        "checked": results,
        "undecided_count": len(undecided),
        "undecided": undecided[:LISTING_CAP],
    }
    if witness:
        values["witness"] = witness
    return status, values


def certify_stability(md: MonadDescriptor, pol: Optional[Polarization] = None, *, trials: int = 100,
                      prime: int = linalg.DEFAULT_PRIME, seed: int = 0, budget: int = DEFAULT_BUDGET,
                      max_q: Optional[int] = None, region_limit: int = 10000, jobs: int = 1) -> Certificate:
    """Stability of ``K = ker(b_mat)`` by the generalized Hoppe criterion.

    For each ``1 <= q < rk K`` every twist with ``delta(B) < -q * slope(K)``
    must kill ``H^0(wedge^q K(B))``.  Twists outside the candidate region
    are handled by the ambient vanishing; the rest go to the oracle.
    """
    pol = pol or md.pol
    space = md.space
    cert = Certificate("kernel-stability", md.describe())

    comp = compose_check(md)
    rc = rank_certificate(md, trials=trials, prime=prime, seed=seed)
    ok = comp.passed and rc.passed
    cert.steps.append(Step(
        "the maps form a monad (composition zero, both maps of maximal rank)",
        "monad-hypotheses", VERIFIED if ok else INCONCLUSIVE,
        {"trials": trials, "prime": prime, "seed": seed},
        {"composition_zero": comp.passed, "rank_structural": rc.structural_ok,
         "rank_randomized": rc.randomized_ok},
    ))
    inv = kernel_invariants(md)
    K = degree_and_slope(space, pol, inv.rank_K, inv.K.c1) if inv.rank_K >= 1 else None
    if K is None:
        cert.steps.append(Step("kernel has positive rank", "rank-count", INCONCLUSIVE, {}, {"rank_K": inv.rank_K}))
        return cert
    cert.steps.append(Step(
        "degree of K is negative", "degree-by-intersection",
        VERIFIED if K.degree < 0 else INCONCLUSIVE, {"c1": list(K.c1)},
        {"rank": K.rank, "degree": K.degree, "slope": str(K.slope)},
    ))
    if K.rank < 2:
        cert.steps.append(Step("a line bundle is stable", "rank-one", VERIFIED, {}, {"rank_K": K.rank}))
        return cert

    top = K.rank - 1
    qmax = top if max_q is None else min(top, max_q)
    args = [(md, pol, q, -q * K.slope, budget, prime, region_limit) for q in range(1, qmax + 1)]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map keeps submission order, so the output does not depend on scheduling
            cert.steps.extend(pool.map(_hoppe_step, args))
    else:
        cert.steps.extend(map(_hoppe_step, args))
    if qmax < top:
        cert.steps.append(Step(
            f"exterior powers {qmax + 1}..{top} not examined", "generalized-hoppe-criterion",
            INCONCLUSIVE, {"max_q": max_q}, {"skipped": list(range(qmax + 1, top + 1))},
        ))

    cert.supplementary.extend(_normalized_variant(md, pol, K, qmax, budget, prime, region_limit))
    return cert


def _hoppe_step(args) -> Step:
    md, pol, q, bound, budget, prime, region_limit = args
    region = candidate_region(md.space, pol, md.middle, q, bound, strict=True, limit=region_limit)
    status, values = _check_twists(md, q, region, budget, prime, falsify_on_q1=True)
    return Step(
        f"h0(wedge^{q} K(B)) = 0 for all B with delta(B) < {bound}",
        "generalized-hoppe-criterion", status,
        {"q": q, "bound": str(bound), "weights": list(slot_weights(md.space, pol))}, values,
    )


def _normalized_variant(md, pol, K, qmax, budget, prime, region_limit) -> List[Step]:
    """The ``delta(B) <= 0`` variant applied to ``wedge^q K`` without retwisting.

    Alongside it, record whether each ``wedge^q K`` is in fact already
    normalized, which is what makes the variant applicable.
    """
    space = md.space
    out = []
    for q in range(1, qmax + 1):
        rank_q = comb(K.rank, q)
        c1_q = scale(comb(K.rank - 1, q - 1), K.c1)
        inv_q = degree_and_slope(space, pol, rank_q, c1_q)
        try:
            k_q, norm_deg = normalize(space, pol, inv_q)
            norm = {"k": k_q, "normalized_degree": norm_deg, "already_normalized": k_q == 0}
        except NormalizationError as exc:
            norm = {"error": str(exc), "already_normalized": False}
        out.append(Step(
            f"wedge^{q} K is its own normalization", "normalization-window",
            VERIFIED if norm["already_normalized"] else FALSIFIED,
            {"q": q, "rank": rank_q, "c1": list(c1_q)}, norm,
        ))
        region = candidate_region(space, pol, md.middle, q, 0, strict=False, limit=region_limit)
        status, values = _check_twists(md, q, region, budget, prime, falsify_on_q1=False)
        out.append(Step(
            f"h0(wedge^{q} K(B)) = 0 for all B with delta(B) <= 0",
            "hoppe-normalized-variant", status, {"q": q}, values,
        ))
    return out


# -- simplicity ---------------------------------------------------------------

def _vanishing_step(space, S: LineBundleSum, degrees: Sequence[int], statement: str, rule: str) -> Step:
    table = sum_cohomology(space, S)
    dims = {f"h{q}": table[q] for q in degrees}
    bad = [(q, table[q]) for q in degrees if table[q] != 0]
    values = {"bundle": _fmt_sum(S), **dims}
    if bad:
        q, d = bad[0]
        # report the summand responsible, not just the total
        for t, m in S.parts:
            h = m * sum_cohomology(space, LineBundleSum([(t, 1)]))[q]
            if h:
                values["witness"] = {"summand": f"O({','.join(map(str, t))})^{m}", "q": q, "dim": h}
                break
    return Step(statement, rule, INCONCLUSIVE if bad else VERIFIED, {"bundle": S.to_list()}, values)


def certify_simplicity(md: MonadDescriptor, pol: Optional[Polarization] = None,
                       stability: Optional[Certificate] = None) -> Certificate:
    """Simplicity of ``E`` through ``1 <= h0(E (x) E*) <= h0(E (x) K*) = h0(K (x) K*) = 1``.

    Failure of a required vanishing leaves the claim ``inconclusive``: it is
    a sufficient condition, not a refutation.
    """
    space = md.space
    cert = Certificate("cohomology-bundle-simple", md.describe())
    if len(md.source.parts) != 1:
        cert.steps.append(Step("source is a multiple of a single line bundle", "display-diagram",
                               INCONCLUSIVE, {}, {"source": md.source.to_list()}))
        return cert
    sigma = md.source.parts[0][0]

    displayed = md.middle.twisted(sigma)
    dual = md.middle.dual().twisted(sigma)
    left = md.target.dual().twisted(sigma)
    s1 = _vanishing_step(space, displayed, (0, 1),
                         "h0 = h1 = 0 for the middle sum twisted by the source line bundle",
                         "kunneth-bott")
    s1b = _vanishing_step(space, dual, (0, 1),
                          "h0 = h1 = 0 for the dual middle sum twisted by the source line bundle",
                          "kunneth-bott")
    s2 = _vanishing_step(space, left, (1, 2),
                         "h1 = h2 = 0 for the dual target twisted by the source line bundle",
                         "kunneth-bott")
    cert.steps += [s1, s1b, s2]

    ok3 = all(s.status == VERIFIED for s in (s1, s1b, s2))
    cert.steps.append(Step(
        "h0(K*(sigma)) = h1(K*(sigma)) = 0", "long-exact-sequence",
        VERIFIED if ok3 else INCONCLUSIVE, {"sigma": list(sigma)},
        {"sequence": f"0 -> {_fmt_sum(left)} -> {_fmt_sum(dual)} -> K*(sigma) -> 0"},
    ))
    cert.steps.append(Step(
        "h0(K (x) K*) = h0(E (x) K*)", "long-exact-sequence",
        VERIFIED if ok3 else INCONCLUSIVE, {},
        {"sequence": "0 -> K*(sigma)^k -> K (x) K* -> E (x) K* -> 0"},
    ))
    stab = stability.status if stability is not None else None
    cert.steps.append(Step(
        "h0(K (x) K*) = 1", "stable-implies-simple",
        VERIFIED if stab == VERIFIED else INCONCLUSIVE, {}, {"stability_status": stab},
    ))
    chain_ok = all(s.status == VERIFIED for s in cert.steps)
    cert.steps.append(Step(
        "1 <= h0(E (x) E*) <= h0(E (x) K*) = h0(K (x) K*) = 1", "identity-endomorphism",
        VERIFIED if chain_ok else INCONCLUSIVE, {},
        {"h0_EE*": 1 if chain_ok else None},
    ))
    return cert


# -- matrix-level and bookkeeping claims --------------------------------------

def certify_composition(md: MonadDescriptor) -> Certificate:
    cert = Certificate("composition-zero", md.describe())
    res = compose_check(md)
    cert.steps.append(Step("b_mat . a_mat = 0 symbolically", "symbolic-product",
                           VERIFIED if res.passed else FALSIFIED, {}, res.to_dict()))
    return cert


def certify_homogeneity(md: MonadDescriptor) -> Certificate:
    cert = Certificate("sheaf-well-formed", md.describe())
    rep = homogeneity_check(md)
    cert.steps.append(Step(
        "every entry has the multidegree target twist - source twist", "homogeneity",
        VERIFIED if rep.passed else INCONCLUSIVE, {},
        {"entries": len(rep.entries), "mismatches": len(rep.mismatches),
         "first_mismatches": [e.to_dict() for e in rep.mismatches[:LISTING_CAP]]},
    ))
    return cert


def certify_rank(md: MonadDescriptor, trials: int = 100, prime: int = linalg.DEFAULT_PRIME,
                 seed: int = 0) -> Certificate:
    cert = Certificate("maximal-rank", md.describe())
    rc = rank_certificate(md, trials=trials, prime=prime, seed=seed)
    d = rc.to_dict()
    cert.steps.append(Step(
        "triangular k x k minors with a pure-power diagonal at every leading coordinate",
        "structural-minor", VERIFIED if rc.structural_ok or not md.k else FALSIFIED, {},
        {"witnesses": d["structural_witnesses"], "problems": d["structural_problems"]},
    ))
    cert.steps.append(Step(
        "full rank at random points over F_p", "random-evaluation",
        VERIFIED if rc.randomized_ok else FALSIFIED,
        {"trials": trials, "prime": prime, "seed": seed},
        {"expected_ranks": d["expected_ranks"], "failures": d["failures"][:LISTING_CAP]},
    ))
    return cert


def certify_bookkeeping(md: MonadDescriptor) -> Certificate:
    """Ranks, first Chern classes and degree sign of ``K`` and ``E``."""
    space, pol, k = md.space, md.pol, md.k
    cert = Certificate("kernel-bookkeeping", md.describe())
    inv = kernel_invariants(md)
    vals = inv.to_dict()
    rank_ok = inv.rank_K == expected_rank_K(space, k) and inv.rank_E == expected_rank_E(space, k)
    cert.steps.append(Step(
        "rank K = 2 sum n_i + (2s-1)k and rank E = 2 sum n_i + 2k(s-1)", "rank-count",
        VERIFIED if rank_ok else FALSIFIED, {},
        {"rank_K": inv.rank_K, "rank_E": inv.rank_E,
         "expected_rank_K": expected_rank_K(space, k), "expected_rank_E": expected_rank_E(space, k)},
    ))
    if md.profile == "paper" and not md.notes:
        exp = expected_c1_K(space, pol, k)
        cert.steps.append(Step(
            "c1(K) has slots -(n_i + 2k) alpha_i", "additivity-of-c1",
            VERIFIED if tuple(inv.K.c1) == exp else FALSIFIED, {},
            {"c1_K": list(inv.K.c1), "expected": list(exp)},
        ))
    cert.steps.append(Step(
        "deg K < 0", "degree-by-intersection", VERIFIED if inv.K.degree < 0 else FALSIFIED, {},
        {"K": vals["K"], "E": vals["E"]},
    ))
    if md.profile == "paper" and not md.notes and all(a == 1 for a in pol.alphas):
        quoted = quoted_degree_K(space, k)
        cert.supplementary.append(Step(
            "deg K = -(sum n_i + 2sk) L^D at alpha = 1", "quoted-closed-form",
            VERIFIED if quoted == inv.K.degree else FALSIFIED, {},
            {"computed": inv.K.degree, "closed_form": quoted},
        ))
    try:
        k_e, nd = normalize(space, pol, inv.K)
        cert.supplementary.append(Step("normalization of K", "normalization-window", VERIFIED, {},
                                       {"k": k_e, "normalized_degree": nd}))
    except NormalizationError as exc:
        cert.supplementary.append(Step("normalization of K", "normalization-window", FALSIFIED, {},
                                       {"error": str(exc)}))
    return cert


__all__ = [
    "Certificate", "Step", "TwistRegion", "candidate_region", "certify_stability",
    "certify_simplicity", "certify_composition", "certify_homogeneity", "certify_rank",
    "certify_bookkeeping", "ambient_h0", "combine",
]
