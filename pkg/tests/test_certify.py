import random
from fractions import Fraction

import pytest

from monadforge.certify import (
    FALSIFIED, INCONCLUSIVE, VERIFIED, Certificate, Step, ambient_h0, candidate_region,
    certify_bookkeeping, certify_composition, certify_homogeneity, certify_rank,
    certify_simplicity, certify_stability, combine,
)
from monadforge.cohom import LineBundleSum, exterior_power
from monadforge.fixtures import duplicated_column, sign_flipped, trivial_summand
from monadforge.oracle import h0_wedge_kernel
from monadforge.picard import delta

from conftest import make


def test_combine():
    assert combine([]) == INCONCLUSIVE
    assert combine([VERIFIED, VERIFIED]) == VERIFIED
    assert combine([VERIFIED, INCONCLUSIVE]) == INCONCLUSIVE
    assert combine([INCONCLUSIVE, FALSIFIED, VERIFIED]) == FALSIFIED
    cert = Certificate("x", {}, [Step("a", "r", VERIFIED)], [Step("b", "r", FALSIFIED)])
    assert cert.status == VERIFIED  # supplementary steps never count


def test_region_example(hom11):
    region = candidate_region(hom11.space, hom11.pol, hom11.middle, 1, Fraction(4, 3))
    assert region.twists == ((0, 1), (1, 0))
    assert all(delta(hom11.space, hom11.pol, B) < Fraction(4, 3) for B in region.twists)
    assert region.lower == (0, 0)
    # (1,-1) is below the bound but every middle summand keeps a negative slot,
    # so the ambient argument settles it outside the region
    assert ambient_h0(hom11, 1, (1, -1)) == 0


def test_region_empty_for_nonpositive_bound(hom11, paper11):
    for md in (hom11, paper11, make((2, 1), (1, 2), 2)):
        for q in range(1, 4):
            assert len(candidate_region(md.space, md.pol, md.middle, q, 0, strict=False)) == 0


def test_region_rejects_q_zero(hom11):
    with pytest.raises(ValueError):
        candidate_region(hom11.space, hom11.pol, hom11.middle, 0, 1)


def test_region_completeness(hom11):
    md = make((1, 1), (1, 2), 1)
    rng = random.Random(7)
    for q in (1, 2, 3):
        bound = Fraction(7, 2) * q
        region = set(candidate_region(md.space, md.pol, md.middle, q, bound).twists)
        wedge = exterior_power(md.middle, q)
        hits = 0
        while hits < 200:
            B = tuple(rng.randint(-8, 8) for _ in range(md.space.nslots))
            if B in region:
                continue
            hits += 1
            lifts = any(all(t + b >= 0 for t, b in zip(tw, B)) for tw, _ in wedge.parts)
            assert delta(md.space, md.pol, B) >= bound or not lifts


def test_region_monotone(hom11):
    md = make((2,), (1,), 1, "homogeneous")
    small = set(candidate_region(md.space, md.pol, md.middle, 2, 3).twists)
    large = set(candidate_region(md.space, md.pol, md.middle, 2, 5).twists)
    assert small <= large


def test_stability_homogeneous_instance(hom11):
    cert = certify_stability(hom11, trials=20)
    slope = cert.steps[1].values["slope"]
    assert slope == "-4/3"
    assert cert.status == VERIFIED
    assert [s.rule for s in cert.steps[2:]] == ["generalized-hoppe-criterion"] * 2


def test_ambient_shortcut_is_sound():
    md = make((1,), (1,), 2, "homogeneous")
    for q in (1, 2, 3):
        for B in [(0, 0), (-1, 2), (2, -1), (0, 1)]:
            if ambient_h0(md, q, B) == 0:
                assert h0_wedge_kernel(md, q, B).value == 0


def test_trivial_summand_is_falsified(hom11):
    cert = certify_stability(trivial_summand(hom11), trials=10)
    assert cert.status == FALSIFIED
    witness = next(s.values["witness"] for s in cert.steps if "witness" in s.values)
    assert witness["q"] == 1 and witness["B"] == [0, 0] and witness["h0"] >= 1


def test_paper_profile_stability_is_undecided(paper11):
    cert = certify_stability(paper11, trials=10)
    assert cert.status == INCONCLUSIVE
    hoppe = [s for s in cert.steps if s.rule == "generalized-hoppe-criterion"]
    assert all(s.values["undecided_count"] > 0 for s in hoppe)
    # the non-strict variant has nothing to check: the region is empty
    variant = [s for s in cert.supplementary if s.rule == "hoppe-normalized-variant"]
    assert variant and all(s.status == VERIFIED and s.values["region"]["size"] == 0 for s in variant)
    norm = [s for s in cert.supplementary if s.rule == "normalization-window"]
    assert norm[0].values["k"] == -2 and norm[0].status == FALSIFIED


def test_max_q_truncation_is_inconclusive():
    md = make((2,), (1,), 1, "homogeneous")
    cert = certify_stability(md, trials=5, max_q=1)
    assert cert.status == INCONCLUSIVE
    assert cert.steps[-1].values["skipped"] == [2, 3, 4]


def test_parallel_matches_serial():
    md = make((1,), (1,), 2, "homogeneous")
    a = certify_stability(md, trials=5).to_dict()
    b = certify_stability(md, trials=5, jobs=2).to_dict()
    assert a == b


def test_simplicity_p2_steps_verified():
    md = make((2,), (1,), 1)
    cert = certify_simplicity(md, stability=certify_stability(md, trials=5))
    s1, s1b, s2 = cert.steps[:3]
    assert s1.status == s1b.status == s2.status == VERIFIED
    assert "O(-2,-1)" in s1.values["bundle"] and "O(-1,-2)" in s1.values["bundle"]
    assert (s2.values["h1"], s2.values["h2"]) == (0, 0)
    assert cert.status == INCONCLUSIVE  # stability of the paper twists cannot be decided


def test_simplicity_p1_inconclusive_with_witness(paper11):
    cert = certify_simplicity(paper11, stability=certify_stability(paper11, trials=5))
    assert cert.status == INCONCLUSIVE
    s2 = cert.steps[2]
    assert s2.status == INCONCLUSIVE and s2.values["h2"] == 1
    assert s2.values["witness"] == {"summand": "O(-2,-2)^1", "q": 2, "dim": 1}


def test_simplicity_verified_on_homogeneous(hom11):
    cert = certify_simplicity(hom11, stability=certify_stability(hom11, trials=5))
    assert cert.status == VERIFIED


def test_simplicity_propagates_falsified_stability(hom11):
    stab = certify_stability(trivial_summand(hom11), trials=5)
    cert = certify_simplicity(hom11, stability=stab)
    assert stab.status == FALSIFIED and cert.status == INCONCLUSIVE
    assert FALSIFIED not in [s.status for s in cert.steps]


def test_simplicity_without_uniform_source():
    md = make((1,), (1,), 0)
    assert certify_simplicity(md).status == INCONCLUSIVE


def test_matrix_level_certificates(hom11):
    assert certify_composition(hom11).status == VERIFIED
    assert certify_composition(sign_flipped(hom11)).status == FALSIFIED
    assert certify_rank(hom11, trials=10).status == VERIFIED
    assert certify_rank(duplicated_column(make((1,), (1,), 2, "homogeneous")), trials=5).status == FALSIFIED
    assert certify_homogeneity(hom11).status == VERIFIED
    assert certify_homogeneity(make((1,), (1,), 1)).status == INCONCLUSIVE


def test_bookkeeping_quoted_degree():
    assert certify_bookkeeping(make((1,), (1,), 1)).supplementary[0].status == VERIFIED
    # the closed form misses the multinomial factor once s >= 2
    quoted = certify_bookkeeping(make((1, 1), (1, 1), 1)).supplementary[0]
    assert quoted.status == FALSIFIED
    assert (quoted.values["computed"], quoted.values["closed_form"]) == (-72, -144)


def test_certificate_serializes(hom11):
    d = certify_stability(hom11, trials=5).to_dict()
    assert set(d) == {"claim", "status", "instance", "evidence", "supplementary"}
    for step in d["evidence"]:
        assert set(step) == {"statement", "rule", "status", "inputs", "values"}


def test_line_bundle_sum_instance_echo(hom11):
    assert certify_composition(hom11).instance["middle"] == [[[0, -1], 2], [[-1, 0], 2]]
    assert isinstance(hom11.middle, LineBundleSum)
