"""G2-structure layer: positivity and the induced metric/volume, the dual
4-form, torsion forms and torsion-class flags, the characteristic torsion
3-form, membership in the 14-dimensional 2-form module, and calibration
tests for 3-dimensional subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg, scalars
from .errors import (DegreeError, ExactnessError, InputError,
                     NoCharacteristicConnection, NotPositiveThreeForm)
from .exterior import (KForm, Metric, contract, form_inner, hodge_star,
                       volume_form, wedge)
from .liealg import LieAlgebra, Subspace, basis_vector
from .scalars import EXACT, FLOAT, Scalar

#: The model positive 3-form in an adapted orthonormal coframe.
PHI0_TERMS = (
    ((1, 2, 7), 1), ((3, 4, 7), 1), ((5, 6, 7), 1),
    ((1, 3, 5), 1), ((1, 4, 6), -1), ((2, 3, 6), -1), ((2, 4, 5), -1),
)


def standard_phi(kind: str = EXACT) -> KForm:
    return KForm.from_terms(7, 3, PHI0_TERMS, kind)


def metric_from_phi(phi: KForm):
    """Metric and volume induced by a positive 3-form.

    B_ij is the top-degree coefficient of (e_i . phi) ^ (e_j . phi) ^ phi;
    the metric is 6^(-2/9) (det B)^(-1/9) B and the volume form is
    (det g)^(1/2) e^(1..7).  In exact mode only multiples B = 6 s Id with
    s^(2/9) rational are accepted; anything else falls back to float.

    Raises NotPositiveThreeForm when B fails to be positive definite.
    """
    if phi.dim != 7 or phi.degree != 3:
        raise DegreeError("a G2-structure is a 3-form in dimension 7")
    n = 7
    top = tuple(range(1, n + 1))
    b = []
    for i in range(1, n + 1):
        row = []
        ci = contract(basis_vector(n, i, phi.kind), phi)
        for j in range(1, n + 1):
            cj = contract(basis_vector(n, j, phi.kind), phi)
            w = wedge(wedge(ci, cj), phi)
            row.append(w.coefficient(top))
        b.append(tuple(row))
    b = tuple(b)
    tol = None if phi.kind == EXACT else 1e-12
    if not linalg.is_positive_definite(b, tol):
        raise NotPositiveThreeForm(
            "not a positive 3-form: induced bilinear form is not positive definite")

    if phi.kind == EXACT:
        six = Fraction(6)
        s = b[0][0] / six
        is_multiple = all(
            b[i][j] == (six * s if i == j else 0)
            for i in range(n) for j in range(n))
        if is_multiple:
            root = scalars.exact_nth_root(Fraction(s) ** 2, 9)
            if root is not None:
                g = Metric.from_rows(
                    [[root if i == j else Fraction(0) for j in range(n)]
                     for i in range(n)], EXACT)
                return g, volume_form(g)
        # exact representation impossible: fall back to float
        phi = phi.to_float()
        b = tuple(tuple(float(x) for x in row) for row in b)

    detb = linalg.det(b, 1e-300)
    scale = (6.0 ** (-2.0 / 9.0)) * (detb ** (-1.0 / 9.0))
    g = Metric.from_rows([[scale * x for x in row] for row in b], FLOAT)
    return g, volume_form(g)


@dataclass(frozen=True)
class G2Structure:
    phi: KForm
    metric: Metric
    vol: KForm
    psi: KForm

    @classmethod
    def from_phi(cls, phi: KForm) -> "G2Structure":
        g, vol = metric_from_phi(phi)
        if g.kind == FLOAT and phi.kind == EXACT:
            phi = phi.to_float()
        psi = hodge_star(phi, g)
        return cls(phi, g, vol, psi)

    @classmethod
    def standard(cls, kind: str = EXACT) -> "G2Structure":
        return cls.from_phi(standard_phi(kind))

    @property
    def kind(self) -> str:
        return self.phi.kind

    def to_float(self) -> "G2Structure":
        return G2Structure(self.phi.to_float(), self.metric.to_float(),
                           self.vol.to_float(), self.psi.to_float())


def star_scalar(a: KForm, g: G2Structure) -> Scalar:
    """Hodge star of a top-degree form, as a scalar (its coefficient
    against the volume form)."""
    if a.degree != a.dim:
        raise DegreeError("expected a top-degree form")
    top = tuple(range(1, a.dim + 1))
    return a.coefficient(top) / g.vol.coefficient(top)


@dataclass(frozen=True)
class TorsionClass:
    tau0: Scalar
    tau1: KForm
    tau2: KForm
    tau3: KForm
    closed: bool
    coclosed: bool
    purely_coclosed: bool
    torsion_free: bool


def torsion_forms(g2: G2Structure, L: LieAlgebra,
                  tol: float | None = None) -> TorsionClass:
    """The four torsion components of d(phi) and d(psi), with flags set by
    exact (or toleranced) zero tests."""
    phi, psi, g = g2.phi, g2.psi, g2.metric
    dphi = L.differential(phi)
    dpsi = L.differential(psi)
    tau0 = star_scalar(wedge(phi, dphi), g2) / 7
    # tau1 = (1/12) star(phi ^ star dphi)
    tau1 = hodge_star(wedge(phi, hodge_star(dphi, g)), g).scale(
        Fraction(1, 12) if phi.kind == EXACT else 1.0 / 12.0)
    four = scalars.promote(4, phi.kind)
    tau2 = hodge_star(wedge(tau1, psi), g).scale(four) - hodge_star(dpsi, g)
    tau3 = hodge_star(dphi, g) - phi.scale(tau0) \
        - hodge_star(wedge(tau1, phi), g).scale(scalars.promote(3, phi.kind))
    closed = dphi.is_zero(tol)
    coclosed = dpsi.is_zero(tol)
    purely = coclosed and scalars.is_zero(tau0, tol)
    free = closed and coclosed and scalars.is_zero(tau0, tol) \
        and tau1.is_zero(tol) and tau3.is_zero(tol)
    return TorsionClass(tau0, tau1, tau2, tau3, closed, coclosed, purely, free)


def char_torsion(g2: G2Structure, L: LieAlgebra,
                 tol: float | None = None) -> KForm:
    """Torsion 3-form of the unique metric connection with totally skew
    torsion that parallelizes phi; exists iff tau2 = 0."""
    t = torsion_forms(g2, L, tol)
    if not t.tau2.is_zero(tol):
        raise NoCharacteristicConnection(
            "characteristic connection does not exist: tau2 != 0")
    phi, g = g2.phi, g2.metric
    dphi = L.differential(phi)
    sixth = Fraction(1, 6) if phi.kind == EXACT else 1.0 / 6.0
    lead = phi.scale(star_scalar(wedge(dphi, phi), g2) * sixth)
    corr = hodge_star(wedge(t.tau1, phi), g).scale(scalars.promote(4, phi.kind))
    return lead - hodge_star(dphi, g) + corr


@dataclass(frozen=True)
class TwoFormClass:
    component: str            # "7", "14", or "mixed"
    part7: KForm
    part14: KForm


def lambda2_membership(a: KForm, g2: G2Structure,
                       tol: float | None = None) -> TwoFormClass:
    """Locate a 2-form in the 7 + 14 decomposition.

    The 14-dimensional module is the kernel of wedging with psi; the
    7-part is (a + star(a ^ phi)) / 3 and the two projections recombine
    to a.
    """
    if a.degree != 2:
        raise DegreeError("membership test applies to 2-forms")
    third = Fraction(1, 3) if a.kind == EXACT else 1.0 / 3.0
    sap = hodge_star(wedge(a, g2.phi), g2.metric)
    part7 = (a + sap).scale(third)
    part14 = a - part7
    in7 = part14.is_zero(tol)
    in14 = part7.is_zero(tol)
    if in14:
        comp = "14"
    elif in7:
        comp = "7"
    else:
        comp = "mixed"
    return TwoFormClass(comp, part7, part14)


@dataclass(frozen=True)
class CalibrationReport:
    calibrated: bool
    value_squared: Scalar
    value: Scalar | None
    basis: tuple | None


def calibrates(phi: KForm, c: Subspace, metric: Metric,
               tol: float | None = None) -> CalibrationReport:
    """Does phi restrict to +-(volume) on the 3-plane c?

    The squared evaluation phi(v1,v2,v3)^2 / det Gram(v1,v2,v3) is
    basis-independent and computed exactly; a witness orthonormal basis
    (and the signed value on it) is returned when the given basis is
    already orthonormal.
    """
    if c.dim != 3:
        raise InputError("calibration applies to 3-dimensional subspaces")
    v1, v2, v3 = c.vectors
    val = phi.evaluate([v1, v2, v3])
    gram = [[metric.inner(u, v) for v in c.vectors] for u in c.vectors]
    detg = linalg.det(gram, tol)
    vsq = val * val / detg
    one = scalars.one(phi.kind)
    calibrated = scalars.is_zero(vsq - one, tol)
    orthonormal = all(
        scalars.is_zero(gram[i][j] - (one if i == j else 0), tol)
        for i in range(3) for j in range(3))
    if orthonormal:
        return CalibrationReport(calibrated, vsq, val, c.vectors)
    return CalibrationReport(calibrated, vsq, None, None)
