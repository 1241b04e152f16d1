from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from monadforge.picard import (
    ChowClass, NormalizationError, Polarization, SpaceSpec, add, degree_and_slope, delta,
    normalize, polarization_class, slot_weights, sum_invariants, top_coefficient,
)

P1 = SpaceSpec((1,))
P1P2 = SpaceSpec((1, 2))


def test_top_coefficient_examples():
    L = ChowClass.linear(P1, (1, 1))
    assert top_coefficient(P1, L ** 2) == 2
    assert top_coefficient(P1, ChowClass.linear(P1, (1, 0)) * ChowClass.linear(P1, (0, 1))) == 1
    assert top_coefficient(P1P2, ChowClass.linear(P1P2, (1, 1, 1, 1)) ** 6) == 180


def test_top_coefficient_missing_term_is_zero():
    assert top_coefficient(P1, ChowClass.linear(P1, (1, 0))) == 0


def test_truncation_relations():
    h1 = ChowClass.linear(P1, (1, 0))
    assert (h1 * h1).terms == {}
    assert (h1 ** 0) == ChowClass.one(P1)
    with pytest.raises(ValueError):
        h1 ** -1


def test_delta_examples():
    assert delta(P1, Polarization((1,)), (1, 0)) == 1
    assert delta(P1P2, Polarization((1, 1)), (0, 0, 0, 0)) == 0
    assert delta(P1P2, Polarization((1, 1)), (1, 0, 0, 0)) == 30


def _sympy_top(dims, alphas):
    # expand L^D without any truncation and read off the point-class coefficient
    hs = sympy.symbols(f"h0:{2 * len(dims)}")
    L = sum(a * (hs[2 * i] + hs[2 * i + 1]) for i, a in enumerate(alphas))
    D = 2 * sum(dims)
    poly = sympy.Poly(sympy.expand(L ** D), *hs)
    expo = tuple(n for n in dims for _ in (0, 1))
    return int(poly.coeff_monomial(expo))


SMALL_SPACES = [(1,), (2,), (3,), (4,), (1, 1), (1, 2), (2, 1), (2, 2), (1, 1, 1), (1, 1, 2)]


@pytest.mark.parametrize("dims", SMALL_SPACES)
def test_top_of_polarization_matches_untruncated_expansion(dims):
    space = SpaceSpec(dims)
    for alphas in product((1, 2), repeat=len(dims)):
        pol = Polarization(alphas)
        L = polarization_class(space, pol)
        assert top_coefficient(space, L ** space.D) == _sympy_top(dims, alphas)


@pytest.mark.parametrize("dims", SMALL_SPACES)
def test_weights_positive(dims):
    space = SpaceSpec(dims)
    for alphas in product((1, 2), repeat=len(dims)):
        assert all(w > 0 for w in slot_weights(space, Polarization(alphas)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4),
       st.lists(st.integers(-6, 6), min_size=4, max_size=4),
       st.integers(-3, 3))
def test_delta_is_linear(a, b, c):
    pol = Polarization((1, 2))
    lhs = delta(P1P2, pol, add(tuple(a), tuple(c * x for x in b)))
    assert lhs == delta(P1P2, pol, a) + c * delta(P1P2, pol, b)


def test_degree_and_slope_examples():
    pol = Polarization((1,))
    inv = degree_and_slope(P1, pol, 3, (-3, -3))
    assert (inv.degree, inv.slope) == (-6, -2)
    inv = degree_and_slope(P1, pol, 4, (-2, -2))
    assert (inv.degree, inv.slope) == (-4, -1)
    inv = degree_and_slope(P1P2, Polarization((1, 1)), 5, (0, 0, 0, 0))
    assert (inv.degree, inv.slope) == (0, 0)
    assert isinstance(degree_and_slope(P1, pol, 3, (-2, -2)).slope, Fraction)


def test_rank_zero_rejected():
    with pytest.raises(ValueError):
        degree_and_slope(P1, Polarization((1,)), 0, (0, 0))


def test_normalize_examples():
    pol = Polarization((1,))
    assert normalize(P1, pol, degree_and_slope(P1, pol, 3, (-3, -3))) == (-2, 0)
    assert normalize(P1, pol, degree_and_slope(P1, pol, 3, (-2, -2))) == (-1, -1)
    assert normalize(P1, pol, degree_and_slope(P1, pol, 7, (0, 0))) == (0, 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.lists(st.integers(-40, 40), min_size=4, max_size=4),
       st.sampled_from([(1, 1), (1, 2), (2, 1), (2, 2)]))
def test_normalization_window(rank, c1, alphas):
    pol = Polarization(alphas)
    inv = degree_and_slope(P1P2, pol, rank, c1)
    k, deg = normalize(P1P2, pol, inv)
    d = delta(P1P2, pol, (1, 0, 0, 0))
    assert 1 - d * rank <= deg <= 0
    assert deg == inv.degree - k * d * rank


def test_normalization_error_is_runtime_error():
    assert issubclass(NormalizationError, RuntimeError)


def test_sum_invariants_additive():
    pol = Polarization((1, 2))
    parts = [((-1, 0, 0, 0), 2), ((0, 0, -2, 1), 3)]
    inv = sum_invariants(P1P2, pol, parts)
    assert inv.rank == 5
    assert inv.degree == sum(m * delta(P1P2, pol, t) for t, m in parts)


@pytest.mark.parametrize("bad", [(), (0,), (1, -1)])
def test_space_validation(bad):
    with pytest.raises(ValueError):
        SpaceSpec(bad)


def test_alpha_zero_rejected():
    with pytest.raises(ValueError):
        Polarization((0,))


def test_twist_length_checked():
    with pytest.raises(ValueError):
        delta(P1, Polarization((1,)), (1, 0, 0))
