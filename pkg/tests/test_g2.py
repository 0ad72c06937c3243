import random
from fractions import Fraction
from itertools import combinations

import pytest

import nilg2.linalg as la
from nilg2.errors import NoCharacteristicConnection, NotPositiveThreeForm
from nilg2.exterior import KForm, Metric, hodge_star, wedge
from nilg2.families import builtin_family
from nilg2.frames import random_structure_preserving_map, pullback
from nilg2.g2 import (G2Structure, CalibrationReport, calibrates,
                      char_torsion, lambda2_membership, metric_from_phi,
                      standard_phi, star_scalar, torsion_forms)
from nilg2.liealg import LieAlgebra, Subspace, basis_vector

from conftest import random_fraction

E = lambda *idx: KForm.basis(7, idx)
TOP = tuple(range(1, 8))


def rational_circle_point(t: Fraction):
    denom = 1 + t * t
    return (2 * t / denom, (1 - t * t) / denom)


# -- induced metric ---------------------------------------------------------------

def test_model_metric_identity():
    g, vol = metric_from_phi(standard_phi())
    assert g.is_identity()
    assert vol.coeffs == {TOP: Fraction(1)}


def test_rotated_three_form_metric_identity():
    # the (r, s) rotation of the model form for rational circle points
    for t in (Fraction(1, 2), Fraction(2), Fraction(-1, 3)):
        r, s = rational_circle_point(t)
        _, g2 = builtin_family("n37A", 1, 1, 1, r, s)
        assert g2.metric.is_identity()
        assert g2.vol.coeffs == {TOP: Fraction(1)}


def test_negative_three_form_rejected():
    with pytest.raises(NotPositiveThreeForm):
        metric_from_phi(standard_phi().scale(Fraction(-1)))


def test_degenerate_three_form_rejected():
    with pytest.raises(NotPositiveThreeForm):
        metric_from_phi(KForm.from_terms(7, 3, [((1, 2, 3), 1)]))


def test_scaled_model_falls_back_to_float():
    g, vol = metric_from_phi(standard_phi().scale(Fraction(2)))
    assert g.kind == "float"
    # scaling phi by t^3 scales the metric by t^2: t = 2^(1/3)
    expect = 2.0 ** (2.0 / 3.0)
    for i in range(7):
        assert abs(g.matrix[i][i] - expect) < 1e-12


def test_ninth_power_scale_stays_exact():
    # phi = 2^9 phi0 = (2^3)^3 phi0 has exact metric 2^6 id
    g, _ = metric_from_phi(standard_phi().scale(Fraction(512)))
    assert g.kind == "exact"
    assert g.matrix[0][0] == Fraction(64)


def test_structure_map_images_keep_identity_metric():
    rng = random.Random(77)
    phi = standard_phi()
    for _ in range(5):
        m = random_structure_preserving_map(rng)
        g, _ = metric_from_phi(pullback(m, phi))
        assert g.is_identity()


def test_psi_matches_model_dual():
    g2 = G2Structure.standard()
    expected = (E(1, 2, 3, 4) + E(1, 2, 5, 6) + E(3, 4, 5, 6) + E(1, 3, 6, 7)
                + E(1, 4, 5, 7) + E(2, 3, 5, 7) - E(2, 4, 6, 7))
    assert g2.psi.coeffs == expected.coeffs


def test_defining_identity_of_the_metric():
    g2 = G2Structure.standard()
    from nilg2.exterior import contract

    for i in range(1, 8):
        for j in range(1, 8):
            w = wedge(wedge(contract(basis_vector(7, i), g2.phi),
                            contract(basis_vector(7, j), g2.phi)), g2.phi)
            expect = 6 * g2.metric.matrix[i - 1][j - 1]
            assert w.coefficient(TOP) == expect


# -- torsion forms ------------------------------------------------------------------

def test_heisenberg_purely_coclosed():
    L, g2 = builtin_family("heis", 1, 0)
    tc = torsion_forms(g2, L)
    assert tc.tau0 == 0 and tc.tau1.is_zero() and tc.tau2.is_zero()
    assert not tc.tau3.is_zero()
    assert tc.coclosed and tc.purely_coclosed and not tc.torsion_free


def test_dim1_tau0_value():
    L, g2 = builtin_family("dim1", 1, 1, 1)
    tc = torsion_forms(g2, L)
    assert star_scalar(wedge(g2.phi, L.differential(g2.phi)), g2) == 6
    assert tc.tau0 == Fraction(6, 7)
    assert tc.coclosed and not tc.purely_coclosed


def test_abelian_torsion_free():
    L = LieAlgebra.abelian(7)
    tc = torsion_forms(G2Structure.standard(), L)
    assert tc.torsion_free


def test_torsion_reconstruction_random_families():
    rng = random.Random(13)
    g2 = G2Structure.standard()
    for _ in range(25):
        name = rng.choice(["heis", "dim1", "qheis", "n32", "sdiag", "h3r4",
                           "n37A"])
        if name == "heis":
            L, g = builtin_family(name, random_fraction(rng), random_fraction(rng))
        elif name == "dim1":
            L, g = builtin_family(name, random_fraction(rng),
                                  random_fraction(rng), random_fraction(rng))
        elif name == "sdiag":
            L, g = builtin_family(name, random_fraction(rng),
                                  random_fraction(rng), random_fraction(rng))
        elif name == "n37A":
            r, s = rational_circle_point(random_fraction(rng))
            d = [random_fraction(rng) or Fraction(1) for _ in range(3)]
            d = [x if x != 0 else Fraction(1) for x in d]
            L, g = builtin_family(name, d[0], d[1], d[2], r, s)
        else:
            L, g = builtin_family(name, random_fraction(rng) or Fraction(1))
        try:
            L, _ = (L, g)
        except Exception:
            continue
        tc = torsion_forms(g, L)
        dphi = L.differential(g.phi)
        dpsi = L.differential(g.psi)
        lhs1 = (g.psi.scale(tc.tau0) + wedge(tc.tau1, g.phi).scale(Fraction(3))
                + hodge_star(tc.tau3, g.metric))
        assert (dphi - lhs1).is_zero()
        lhs2 = wedge(tc.tau1, g.psi).scale(Fraction(4)) + wedge(tc.tau2, g.phi)
        assert (dpsi - lhs2).is_zero()
        assert tc.coclosed == dpsi.is_zero()
        top = wedge(g.phi, dphi).coefficient(TOP)
        assert tc.purely_coclosed == (tc.coclosed and top == 0)


# -- characteristic torsion -----------------------------------------------------------

def test_char_torsion_heisenberg_display():
    L, g2 = builtin_family("heis", 1, 0)
    T = char_torsion(g2, L)
    assert T.coeffs == wedge(L.d1(7), E(7)).coeffs


def test_char_torsion_heisenberg_general_params():
    L, g2 = builtin_family("heis", 2, 3)
    T = char_torsion(g2, L)
    assert T.coeffs == wedge(L.d1(7), E(7)).coeffs


def test_char_torsion_quaternionic_display():
    nu = Fraction(1)
    L, g2 = builtin_family("qheis", nu)
    T = char_torsion(g2, L)
    expect = KForm.from_terms(7, 3, [((5, 6, 7), -4 * nu)])
    for i in (5, 6, 7):
        expect = expect + wedge(L.d1(i), E(i))
    assert T.coeffs == expect.coeffs


def test_char_torsion_free_two_step_display():
    nu = Fraction(2)
    L, g2 = builtin_family("n32", nu)
    T = char_torsion(g2, L)
    expect = KForm.from_terms(7, 3, [((5, 6, 7), -4 * nu)])
    for i in (5, 6, 7):
        expect = expect + wedge(L.d1(i), E(i))
    assert T.coeffs == expect.coeffs


def test_char_torsion_dim1_closed_form():
    # mu / 3 (e135 - e146 - e236 - e245)
    # + 1/3 [(a-2b-2c) e12 - (2a-b+2c) e34 - (2a+2b-c) e56] ^ e7
    rng = random.Random(19)
    for _ in range(10):
        a, b, c = (random_fraction(rng) for _ in range(3))
        if a == 0 and b == 0 and c == 0:
            continue
        L, g2 = builtin_family("dim1", a, b, c)
        T = char_torsion(g2, L)
        mu = a + b + c
        third = Fraction(1, 3)
        rho = KForm.from_terms(7, 3, [((1, 3, 5), 1), ((1, 4, 6), -1),
                                      ((2, 3, 6), -1), ((2, 4, 5), -1)])
        corr = KForm.from_terms(7, 2, [
            ((1, 2), (a - 2 * b - 2 * c) * third),
            ((3, 4), -(2 * a - b + 2 * c) * third),
            ((5, 6), -(2 * a + 2 * b - c) * third)])
        expect = rho.scale(mu * third) + wedge(corr, E(7))
        assert (T - expect).is_zero()


def test_char_torsion_three_formulas_agree_on_adapted():
    # general formula == coclosed specialization == adapted closed form
    rng = random.Random(29)
    g2 = G2Structure.standard()
    for _ in range(8):
        d5, d6, d7 = (random_fraction(rng) for _ in range(3))
        if d5 == 0 and d6 == 0 and d7 == 0:
            continue
        L, _ = builtin_family("sdiag", d5 or Fraction(1), d6, d7)
        T = char_torsion(g2, L)
        dphi = L.differential(g2.phi)
        # coclosed specialization: (1/6) star(dphi ^ phi) phi - star dphi
        lead = g2.phi.scale(
            star_scalar(wedge(dphi, g2.phi), g2) * Fraction(1, 6))
        spec = lead - hodge_star(dphi, g2.metric)
        assert (T - spec).is_zero()
        # adapted closed form: -(4/3) mu e^567
        #   + sum (-alpha_i^+ + alpha_i^- + (2/3) mu sigma_(i-4)^+) ^ e^i
        from nilg2.exterior import sd_asd_split
        from nilg2.liealg import sigma_plus

        mu = star_scalar(wedge(g2.phi, dphi), g2) / 4
        adapted = KForm.from_terms(7, 3, [((5, 6, 7), -Fraction(4, 3) * mu)])
        for i in (5, 6, 7):
            plus, minus = sd_asd_split(L.d1(i))
            piece = (minus - plus
                     + sigma_plus(i - 4).scale(Fraction(2, 3) * mu))
            adapted = adapted + wedge(piece, E(i))
        assert (T - adapted).is_zero()


def test_char_torsion_requires_tau2_zero():
    # a closed non-coclosed structure: d e^1 = e^67 keeps phi0 positive
    # but tau2 != 0
    L = LieAlgebra.from_differentials(
        7, {1: KForm.from_terms(7, 2, [((6, 7), 1)])})
    g2 = G2Structure.standard()
    tc = torsion_forms(g2, L)
    assert not tc.tau2.is_zero()
    with pytest.raises(NoCharacteristicConnection):
        char_torsion(g2, L)


# -- 2-form decomposition ---------------------------------------------------------------

def test_membership_cases():
    g2 = G2Structure.standard()
    from nilg2.exterior import contract

    assert lambda2_membership(E(1, 2) - E(5, 6), g2).component == "14"
    assert lambda2_membership(
        contract(basis_vector(7, 7), g2.phi), g2).component == "7"
    mixed = lambda2_membership(E(1, 2), g2)
    assert mixed.component == "mixed"
    assert (mixed.part7 + mixed.part14 - E(1, 2)).is_zero()
    assert wedge(mixed.part14, g2.psi).is_zero()


def test_membership_dimensions_by_exact_rank():
    g2 = G2Structure.standard()
    basis2 = list(combinations(range(1, 8), 2))
    basis7 = list(combinations(range(1, 8), 6))
    rows = []
    for idx in basis2:
        w = wedge(KForm.from_terms(7, 2, [(idx, 1)]), g2.psi)
        rows.append([w.coefficient(c6) for c6 in
                     [tuple(sorted(set(range(1, 8)) - {m})) for m in range(1, 8)]])
    # rows index the 21 basis 2-forms: the wedge map has rank 7 and its
    # kernel (the 14-dimensional module) has dimension 14
    assert la.rank(rows) == 7
    assert len(la.kernel_basis(la.transpose(rows))) == 14


# -- calibration --------------------------------------------------------------------------

def test_calibration_standard_cases():
    g2 = G2Structure.standard()
    c567 = Subspace.from_vectors(7, [basis_vector(7, i) for i in (5, 6, 7)])
    rep = calibrates(g2.phi, c567, g2.metric)
    assert rep.calibrated and rep.value == 1
    c123 = Subspace.from_vectors(7, [basis_vector(7, i) for i in (1, 2, 3)])
    rep2 = calibrates(g2.phi, c123, g2.metric)
    assert not rep2.calibrated and rep2.value == 0


def test_calibration_rotated_structure():
    # r = 1, s = 0: the central block evaluates to s = 0
    _, g2 = builtin_family("n37A", 1, 1, 1, 1, 0)
    c567 = Subspace.from_vectors(7, [basis_vector(7, i) for i in (5, 6, 7)])
    rep = calibrates(g2.phi, c567, g2.metric)
    assert not rep.calibrated and rep.value == 0


def test_calibration_non_orthonormal_basis_still_decides():
    g2 = G2Structure.standard()
    stretched = Subspace.from_vectors(
        7, [tuple(2 * x for x in basis_vector(7, 5)),
            basis_vector(7, 6), basis_vector(7, 7)])
    rep = calibrates(g2.phi, stretched, g2.metric)
    assert rep.calibrated and rep.value is None and rep.value_squared == 1
