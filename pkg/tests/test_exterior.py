import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from nilg2.errors import (DegreeError, DimensionMismatch, ExactnessError,
                          KindMismatch)
from nilg2.exterior import (KForm, Metric, contract, endo_to_two_form,
                            form_inner, hodge_star, is_skew_for_metric,
                            sd_asd_split, star4_on_block, two_form_to_endo,
                            wedge)
from nilg2.g2 import standard_phi
from nilg2.liealg import basis_vector, sigma_plus
import nilg2.linalg as la

from conftest import random_form

E = lambda *idx: KForm.basis(7, idx)


def form_terms(dim, degree, entries):
    return KForm.from_terms(dim, degree, entries)


# -- constructors and canonicalization ---------------------------------------

def test_canonicalization_sorts_and_signs():
    a = KForm.from_terms(7, 2, [((2, 1), 1)])
    assert a.coeffs == {(1, 2): Fraction(-1)}
    assert KForm.from_terms(7, 2, [((3, 3), 5)]).is_zero()


def test_no_zero_coefficients_stored():
    a = form_terms(7, 2, [((1, 2), 1), ((1, 2), -1)])
    assert a.coeffs == {}


def test_mixed_kind_rejected():
    a = E(1, 2)
    b = KForm.from_terms(7, 2, [((1, 3), 0.5)])
    with pytest.raises(KindMismatch):
        wedge(a, b)
    with pytest.raises(KindMismatch):
        a + b


def test_dimension_mismatch_rejected():
    a = KForm.basis(6, (1, 2))
    with pytest.raises(DimensionMismatch):
        wedge(a, E(1, 2))


# -- wedge --------------------------------------------------------------------

def test_wedge_basis_case():
    assert wedge(E(1), E(2)).coeffs == {(1, 2): Fraction(1)}


def test_wedge_repeated_index_vanishes():
    assert wedge(E(1, 2), E(1, 3)).is_zero()


def test_wedge_shuffle_sign():
    assert wedge(E(2), E(1)).coeffs == {(1, 2): Fraction(-1)}
    assert wedge(E(3, 4), E(1, 2)).coeffs == {(1, 2, 3, 4): Fraction(1)}


def test_heisenberg_phi_wedge_dphi_vanishes():
    # a = b = 1 witness of pure coclosedness: the top coefficient of
    # phi ^ d(phi) vanishes because the trace 1 + 1 - 2 does
    from nilg2.liealg import LieAlgebra

    phi = standard_phi()
    de7 = form_terms(7, 2, [((1, 2), 1), ((3, 4), 1), ((5, 6), -2)])
    L = LieAlgebra.from_differentials(7, {7: de7})
    top = wedge(phi, L.differential(phi))
    assert top.coefficient(tuple(range(1, 8))) == 0
    # nonzero trace gives a nonzero top coefficient
    de7b = form_terms(7, 2, [((1, 2), 1), ((3, 4), 1), ((5, 6), 1)])
    Lb = LieAlgebra.from_differentials(7, {7: de7b})
    assert wedge(phi, Lb.differential(phi)).coefficient(
        tuple(range(1, 8))) == 6


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_wedge_graded_commutativity(data):
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    p = data.draw(st.integers(1, 3))
    q = data.draw(st.integers(1, 3))
    a = random_form(rng, 7, p)
    b = random_form(rng, 7, q)
    lhs = wedge(a, b)
    rhs = wedge(b, a)
    sign = (-1) ** (p * q)
    assert (lhs - rhs.scale(sign)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_wedge_associative(seed):
    rng = random.Random(seed)
    a = random_form(rng, 7, 1)
    b = random_form(rng, 7, 2)
    c = random_form(rng, 7, 2)
    assert (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).is_zero()


# -- contraction ---------------------------------------------------------------

def test_contract_basis():
    x = basis_vector(7, 1)
    assert contract(x, E(1, 2)).coeffs == {(2,): Fraction(1)}


def test_contract_e7_phi():
    got = contract(basis_vector(7, 7), standard_phi())
    assert got.coeffs == (E(1, 2) + E(3, 4) + E(5, 6)).coeffs


def test_contract_squares_to_zero():
    rng = random.Random(5)
    for _ in range(10):
        a = random_form(rng, 7, 3)
        x = tuple(Fraction(rng.randint(-3, 3)) for _ in range(7))
        assert contract(x, contract(x, a)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_contract_antiderivation(seed):
    rng = random.Random(seed)
    a = random_form(rng, 7, 2)
    b = random_form(rng, 7, 2)
    x = tuple(Fraction(rng.randint(-3, 3)) for _ in range(7))
    lhs = contract(x, wedge(a, b))
    rhs = wedge(contract(x, a), b) + wedge(a, contract(x, b))
    assert (lhs - rhs).is_zero()


# -- Hodge star ----------------------------------------------------------------

def test_star_basis_one_form(metric7):
    assert hodge_star(E(1), metric7).coeffs == {(2, 3, 4, 5, 6, 7): Fraction(1)}


def test_star_phi_is_model_four_form(metric7):
    psi = hodge_star(standard_phi(), metric7)
    expected = (E(1, 2, 3, 4) + E(1, 2, 5, 6) + E(3, 4, 5, 6) + E(1, 3, 6, 7)
                + E(1, 4, 5, 7) + E(2, 3, 5, 7) - E(2, 4, 6, 7))
    assert psi.coeffs == expected.coeffs


def test_star_star_identity_all_degrees(metric7):
    for k in range(0, 8):
        for idx in combinations(range(1, 8), k):
            a = KForm.from_terms(7, k, [(idx, 1)])
            assert (hodge_star(hodge_star(a, metric7), metric7) - a).is_zero()


def test_exact_star_requires_identity_metric():
    g = Metric.from_rows([[Fraction(2) if i == j else Fraction(0)
                           for j in range(7)] for i in range(7)])
    with pytest.raises(ExactnessError):
        hodge_star(E(1), g)


def test_float_star_general_metric_round_trip():
    rows = [[2.0 if i == j else 0.0 for j in range(7)] for i in range(7)]
    rows[0][1] = rows[1][0] = 0.5
    g = Metric.from_rows(rows)
    a = KForm.from_terms(7, 2, [((1, 2), 1.0), ((3, 5), -2.0)])
    twice = hodge_star(hodge_star(a, g), g)
    assert (twice - a).is_zero(1e-9)


# -- inner products -------------------------------------------------------------

def test_inner_orthonormal_basis_forms(metric7):
    assert form_inner(E(1, 2), E(1, 2), metric7) == 1
    assert form_inner(E(1, 2), E(1, 3), metric7) == 0


def test_inner_sigma_basis_orthogonal(metric7):
    # frozen from direct expansion: <e13 - e24, -e14 - e23> = 0 and
    # each sigma has squared norm 2
    s1, s2 = sigma_plus(1), sigma_plus(2)
    assert form_inner(s1, s2, metric7) == 0
    assert form_inner(s1, s1, metric7) == 2


def test_inner_scaled_sigma(metric7):
    nu = Fraction(7, 3)
    assert form_inner(sigma_plus(1), sigma_plus(1).scale(nu), metric7) / 2 == nu


def test_degree_mismatch_rejected(metric7):
    with pytest.raises(DegreeError):
        form_inner(E(1), E(1, 2), metric7)


# -- 2-forms vs skew endomorphisms ----------------------------------------------

def test_endo_convention(metric7):
    a = two_form_to_endo(E(1, 2), metric7)
    # alpha(x, y) = g(A x, y): A e1 = e2, A e2 = -e1
    assert la.mat_vec(a, basis_vector(7, 1)) == basis_vector(7, 2)
    assert la.mat_vec(a, basis_vector(7, 2)) == tuple(
        -x for x in basis_vector(7, 1))


def test_endo_round_trip_all_basis_two_forms(metric7):
    for idx in combinations(range(1, 8), 2):
        a = KForm.from_terms(7, 2, [(idx, 1)])
        back = endo_to_two_form(two_form_to_endo(a, metric7), metric7)
        assert back.coeffs == a.coeffs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_endo_round_trip_random(seed, ):
    rng = random.Random(seed)
    m = Metric.euclidean(7)
    a = random_form(rng, 7, 2)
    assert (endo_to_two_form(two_form_to_endo(a, m), m) - a).is_zero()
    assert is_skew_for_metric(two_form_to_endo(a, m), m)


# -- self-dual / anti-self-dual splitting -----------------------------------------

def test_split_e13():
    plus, minus = sd_asd_split(E(1, 3))
    half = Fraction(1, 2)
    assert plus.coeffs == sigma_plus(1).scale(half).coeffs
    assert minus.coeffs == form_terms(7, 2, [((1, 3), half), ((2, 4), half)]).coeffs


def test_split_sigma_plus_is_self_dual():
    plus, minus = sd_asd_split(sigma_plus(3))
    assert plus.coeffs == sigma_plus(3).coeffs
    assert minus.is_zero()


def test_split_star_eigenvectors_and_recombination():
    rng = random.Random(9)
    for _ in range(15):
        entries = [(tuple(sorted(rng.sample(range(1, 5), 2))),
                    Fraction(rng.randint(-5, 5))) for _ in range(3)]
        a = form_terms(7, 2, entries)
        plus, minus = sd_asd_split(a)
        assert (star4_on_block(plus) - plus).is_zero()
        assert (star4_on_block(minus) + minus).is_zero()
        assert (plus + minus - a).is_zero()


def test_split_free_two_step_pattern():
    # d e^5 = -2 nu e^24 has self-dual part nu sigma_1^+
    nu = Fraction(1)
    de5 = form_terms(7, 2, [((2, 4), -2 * nu)])
    plus, _ = sd_asd_split(de5)
    assert plus.coeffs == sigma_plus(1).scale(nu).coeffs


def test_split_rejects_support_outside_block():
    with pytest.raises(DimensionMismatch):
        sd_asd_split(E(1, 5))
