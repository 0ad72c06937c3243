import random
from fractions import Fraction
from itertools import combinations

import pytest

import nilg2.linalg as la
from nilg2.errors import InputError
from nilg2.exterior import KForm, Metric, two_form_to_endo, wedge
from nilg2.families import builtin_family
from nilg2.g2 import standard_phi
from nilg2.liealg import (LieAlgebra, Subspace, basis_vector, flat,
                          is_adapted_position, j_map, j_split, sigma_plus,
                          split_brackets, tau_map)

from conftest import random_form


def qheis(nu=Fraction(1)):
    return builtin_family("qheis", nu)[0]


def heis(a, b):
    return builtin_family("heis", a, b)[0]


def n32(nu=Fraction(1)):
    return builtin_family("n32", nu)[0]


METRIC = Metric.euclidean(7)


# -- validation ----------------------------------------------------------------

def test_abelian_valid():
    rep = LieAlgebra.abelian(7).validate()
    assert rep.valid and rep.dim_commutator == 0
    assert rep.nilpotency_step == 1 and not rep.two_step


def test_heisenberg_two_step():
    rep = heis(1, 0).validate()
    assert rep.two_step and rep.nilpotency_step == 2
    assert rep.dim_commutator == 1


def test_quaternionic_structure():
    rep = qheis().validate()
    assert rep.two_step and rep.dim_commutator == 3 and rep.dim_center == 3


def test_jacobi_violation_reported():
    # d e^3 = e^12 with d e^5 = e^34 gives d(d e^5) = e^124 != 0
    bad = LieAlgebra.from_differentials(
        7, {3: KForm.from_terms(7, 2, [((1, 2), 1)]),
            5: KForm.from_terms(7, 2, [((3, 4), 1)])})
    rep = bad.validate()
    assert not rep.jacobi_ok
    assert any(m == 5 for m, _ in rep.jacobi_failures)


def test_solvable_non_nilpotent_reported():
    # [e1, e2] = -e2 satisfies Jacobi but is not nilpotent
    L = LieAlgebra.from_differentials(
        7, {2: KForm.from_terms(7, 2, [((1, 2), 1)])})
    rep = L.validate()
    assert rep.jacobi_ok and rep.nilpotency_step is None and not rep.two_step


def test_antisymmetry_folding_and_conflict():
    L = LieAlgebra.from_bracket_entries(7, [(2, 1, 7, 1)])
    assert L.c[0][1][6] == -1
    with pytest.raises(InputError):
        LieAlgebra.from_bracket_entries(7, [(1, 2, 7, 1), (2, 1, 7, 1)])


def test_three_step_detected():
    L = LieAlgebra.from_bracket_entries(7, [(1, 2, 3, 1), (1, 3, 4, 1)])
    rep = L.validate()
    assert rep.jacobi_ok and rep.nilpotency_step == 3 and not rep.two_step


# -- differential ---------------------------------------------------------------

def test_differential_generator_display():
    L = LieAlgebra.from_differentials(
        7, {7: KForm.from_terms(7, 2, [((1, 2), 1), ((3, 4), 2), ((5, 6), -3)])})
    assert L.d1(7).coeffs == {(1, 2): Fraction(1), (3, 4): Fraction(2),
                              (5, 6): Fraction(-3)}
    assert L.d1(1).is_zero()


def test_differential_leibniz_on_quaternionic():
    L = qheis()
    e5, e6 = KForm.basis(7, (5,)), KForm.basis(7, (6,))
    lhs = L.differential(wedge(e5, e6))
    rhs = wedge(L.d1(5), e6) - wedge(e5, L.d1(6))
    assert (lhs - rhs).is_zero()


def test_differential_alternating_sum_oracle():
    # the derivation-style differential agrees with the alternating-sum
    # formula  da(x0..xk) = sum_{i<j} (-1)^(i+j) a([xi,xj], .. hat .. )
    rng = random.Random(17)
    L = qheis(Fraction(3, 2))
    for degree in (1, 2, 3):
        for _ in range(6):
            a = random_form(rng, 7, degree)
            da = L.differential(a)
            vectors = [tuple(Fraction(rng.randint(-2, 2)) for _ in range(7))
                       for _ in range(degree + 1)]
            expected = Fraction(0)
            for i in range(degree + 1):
                for j in range(i + 1, degree + 1):
                    rest = [vectors[t] for t in range(degree + 1)
                            if t not in (i, j)]
                    br = L.bracket(vectors[i], vectors[j])
                    expected += (-1) ** (i + j) * a.evaluate([br] + rest)
            assert da.evaluate(vectors) == expected


def test_differential_leibniz_random_pairs():
    rng = random.Random(23)
    L = n32(Fraction(2))
    for _ in range(10):
        p = rng.choice((1, 2))
        a = random_form(rng, 7, p)
        b = random_form(rng, 7, 2)
        lhs = L.differential(wedge(a, b))
        rhs = wedge(L.differential(a), b) + wedge(a, L.differential(b)).scale(
            Fraction((-1) ** p))
        assert (lhs - rhs).is_zero()


def test_dd_zero_iff_jacobi_randomized():
    rng = random.Random(31)
    hits_valid = hits_broken = 0
    for _ in range(30):
        entries = []
        for _ in range(rng.randint(1, 4)):
            i, j = rng.sample(range(1, 8), 2)
            k = rng.randint(1, 7)
            if k in (i, j):
                continue
            entries.append((i, j, k, Fraction(rng.randint(-2, 2))))
        L = LieAlgebra.from_bracket_entries(7, entries)
        dd_zero = all(L.differential(L.d1(m)).is_zero() for m in range(1, 8))
        # direct Jacobi identity on all basis triples
        jacobi = True
        for a in range(1, 8):
            for b in range(a + 1, 8):
                for c in range(b + 1, 8):
                    ea, eb, ec = (basis_vector(7, t) for t in (a, b, c))
                    cyc = [L.bracket(L.bracket(ea, eb), ec),
                           L.bracket(L.bracket(eb, ec), ea),
                           L.bracket(L.bracket(ec, ea), eb)]
                    total = tuple(sum(v[t] for v in cyc) for t in range(7))
                    if any(x != 0 for x in total):
                        jacobi = False
        assert dd_zero == jacobi
        hits_valid += jacobi
        hits_broken += not jacobi
    assert hits_valid and hits_broken


def test_image_of_d_in_complement_of_commutator():
    for L in (heis(2, 3), qheis(), n32()):
        gprime = L.commutator_subspace()
        r = gprime.orthogonal_complement(METRIC)
        for m in range(1, 8):
            for idx in L.d1(m).coeffs:
                for i in idx:
                    assert r.contains(basis_vector(7, i))


# -- subspaces -------------------------------------------------------------------

def test_commutator_center_heis():
    L = heis(1, 0)
    gprime = L.commutator_subspace()
    z = L.center_subspace()
    assert gprime.dim == 1
    assert z.contains(basis_vector(7, 7))
    assert z.contains_subspace(gprime)


def test_center_n32():
    L = n32()
    z = L.center_subspace()
    gprime = L.commutator_subspace()
    assert z.dim == 4 and gprime.dim == 3
    assert z.contains(basis_vector(7, 1))


def test_abelian_factor():
    L = n32()
    a = L.abelian_factor(METRIC)
    assert a.dim == 1 and a.contains(basis_vector(7, 1))
    assert LieAlgebra.abelian(7).center_subspace().dim == 7


def test_subspace_operations():
    s1 = Subspace.from_vectors(7, [basis_vector(7, 1), basis_vector(7, 2)])
    s2 = Subspace.from_vectors(7, [basis_vector(7, 2), basis_vector(7, 3)])
    inter = s1.intersection(s2)
    assert inter.dim == 1 and inter.contains(basis_vector(7, 2))
    comp = s1.orthogonal_complement(METRIC)
    assert comp.dim == 5 and not comp.contains(basis_vector(7, 1))
    with pytest.raises(InputError):
        Subspace.from_vectors(7, [basis_vector(7, 1), basis_vector(7, 1)])


# -- j maps ----------------------------------------------------------------------

CENTRAL = Subspace.from_vectors(7, [basis_vector(7, i) for i in (5, 6, 7)])


def test_j_quaternionic_displays():
    L = qheis()
    nu = Fraction(1)
    expected = {
        5: ((0, 0, 1, 0), (0, 0, 0, -1), (-1, 0, 0, 0), (0, 1, 0, 0)),
        6: ((0, 0, 0, -1), (0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0)),
        7: ((0, 1, 0, 0), (-1, 0, 0, 0), (0, 0, 0, 1), (0, 0, -1, 0)),
    }
    for i, rows in expected.items():
        j = j_map(L, METRIC, CENTRAL, basis_vector(7, i))
        for r in range(4):
            for c in range(4):
                assert j[r][c] == nu * rows[r][c]
        # extension by zero on the central block
        for r in range(4, 7):
            assert all(j[r][c] == 0 for c in range(7))


def test_j_free_two_step_kills_abelian_direction():
    L = n32()
    for i in (5, 6, 7):
        j = j_map(L, METRIC, CENTRAL, basis_vector(7, i))
        assert la.mat_vec(j, basis_vector(7, 1)) == tuple([Fraction(0)] * 7)


def test_j_vanishes_on_abelian_factor_direction():
    L = n32()
    z4 = L.center_subspace()
    ab = L.abelian_factor(METRIC)
    j = j_map(L, METRIC, z4, ab.vectors[0])
    assert la.is_zero_matrix(j)


def test_dual_differential_corresponds_to_minus_j():
    for L in (heis(1, 2), qheis(Fraction(-2)), n32(Fraction(3))):
        center = L.center_subspace()
        gprime = L.commutator_subspace()
        for i in (5, 6, 7):
            z = basis_vector(7, i)
            if not center.contains(z):
                continue
            a = two_form_to_endo(L.differential(flat(z, METRIC)), METRIC)
            j = j_map(L, METRIC, center, z)
            assert la.is_zero_matrix(la.mat_add(a, j))


def test_j_requires_central_subspace():
    L = qheis()
    bad = Subspace.from_vectors(7, [basis_vector(7, 1), basis_vector(7, 2),
                                    basis_vector(7, 3)])
    with pytest.raises(InputError):
        j_map(L, METRIC, bad, basis_vector(7, 1))


# -- split bracket maps ------------------------------------------------------------

def test_quaternionic_anti_self_dual_part_vanishes():
    L = qheis()
    for i in (5, 6, 7):
        _, jm, _ = j_split(L, METRIC, basis_vector(7, i))
        assert la.is_zero_matrix(jm)


def test_reference_map_is_sigma_plus():
    L = qheis()
    for i in (5, 6, 7):
        _, _, j0 = j_split(L, METRIC, basis_vector(7, i))
        assert j0 == two_form_to_endo(sigma_plus(i - 4), METRIC)


def test_split_sum_and_diagonal_relation():
    nu = Fraction(2)
    L = n32(nu)
    c = Subspace.from_vectors(7, [basis_vector(7, i) for i in (5, 6, 7)])
    for i in (5, 6, 7):
        z = basis_vector(7, i)
        jp, jm, j0 = j_split(L, METRIC, z)
        j = j_map(L, METRIC, c, z)
        assert la.mat_add(jp, jm) == j
        # diagonal coupling: j(e_a)^+ = -d_a j(e_a)^0 with d_a = nu
        assert la.is_zero_matrix(
            la.mat_add(jp, la.mat_scale(nu, j0)))


def test_split_commutation_relations():
    rng = random.Random(41)
    # random adapted structure: diagonal self-dual part + random asd part
    diffs = {}
    for i in (1, 2, 3):
        form = sigma_plus(i).scale(Fraction(rng.randint(-3, 3)))
        diffs[i + 4] = form + KForm.from_terms(
            7, 2, [((1, 3), Fraction(rng.randint(-2, 2))),
                   ((2, 4), Fraction(rng.randint(-2, 2)))])
    L = LieAlgebra.from_differentials(7, diffs)
    assert is_adapted_position(L)
    for a in (5, 6, 7):
        for b in (5, 6, 7):
            _, jma, j0a = j_split(L, METRIC, basis_vector(7, a))
            jpb, jmb, _ = j_split(L, METRIC, basis_vector(7, b))
            assert la.is_zero_matrix(la.commutator(j0a, jmb))
            assert la.is_zero_matrix(la.commutator(jpb, jma))


def test_split_requires_adapted_position():
    L = heis(1, 0)  # d e^7 involves e^56: not supported on the 4-block
    with pytest.raises(InputError):
        split_brackets(L)


# -- tau -------------------------------------------------------------------------

def test_tau_cross_product_rules():
    phi = standard_phi()
    t5 = tau_map(phi, CENTRAL, METRIC, basis_vector(7, 5))
    t6 = tau_map(phi, CENTRAL, METRIC, basis_vector(7, 6))
    t7 = tau_map(phi, CENTRAL, METRIC, basis_vector(7, 7))
    assert la.mat_vec(t5, basis_vector(7, 6)) == basis_vector(7, 7)
    assert la.mat_vec(t5, basis_vector(7, 5)) == tuple([Fraction(0)] * 7)
    assert la.commutator(t5, t6) == t7
    assert la.commutator(t6, t7) == t5


def test_tau_requires_orthonormal_basis():
    phi = standard_phi()
    skew = Subspace.from_vectors(7, [basis_vector(7, 5),
                                     tuple(x + y for x, y in
                                           zip(basis_vector(7, 5),
                                               basis_vector(7, 6))),
                                     basis_vector(7, 7)])
    with pytest.raises(InputError):
        tau_map(phi, skew, METRIC, basis_vector(7, 5))


# -- isomorphism obstruction spectra ----------------------------------------------

def test_j_squared_spectra_heisenberg():
    a, b = Fraction(1), Fraction(2)
    L = heis(a, b)
    gprime = L.commutator_subspace()
    j = j_map(L, METRIC, gprime, basis_vector(7, 7))
    poly = la.char_poly(la.mat_mul(j, j))
    # char poly of j(z)^2 on 7 dims: x (x + a^2)^2 (x + b^2)^2 (x + (a+b)^2)^2
    x = [Fraction(0), Fraction(1)]

    def mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, pi in enumerate(p):
            for j2, qj in enumerate(q):
                out[i + j2] += pi * qj
        return out

    expect = [Fraction(0), Fraction(1)]
    for lam in (a * a, b * b, (a + b) ** 2):
        expect = mul(expect, mul([lam, Fraction(1)], [lam, Fraction(1)]))
    assert poly == expect


def test_j_squared_spectra_quaternionic():
    nu = Fraction(3)
    L = qheis(nu)
    gprime = L.commutator_subspace()
    j = j_map(L, METRIC, gprime, basis_vector(7, 5))
    jj = la.mat_mul(j, j)
    for r in range(4):
        for c in range(4):
            assert jj[r][c] == (-nu * nu if r == c else 0)
