"""Built-in algebra families with their reference coclosed structures.

Each constructor returns (LieAlgebra, G2Structure) over exact scalars; the
basis is orthonormal for the induced metric and the 3-form is the model
one (or its two-parameter rotation for the non-calibrated family).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError
from .exterior import KForm
from .g2 import G2Structure, standard_phi
from .liealg import LieAlgebra, sigma_plus
from .scalars import EXACT


def _f(x) -> Fraction:
    if isinstance(x, float):
        raise InputError("family parameters must be exact rationals")
    return Fraction(x)


def heisenberg_pair(a, b) -> tuple[LieAlgebra, G2Structure]:
    """d e^7 = a (e^12 - e^56) + b (e^34 - e^56); commutator dimension 1,
    purely coclosed for every (a, b) != (0, 0)."""
    a, b = _f(a), _f(b)
    if a == 0 and b == 0:
        raise InputError("parameters must not both vanish")
    d7 = KForm.from_terms(7, 2, [((1, 2), a), ((3, 4), b), ((5, 6), -(a + b))])
    return (LieAlgebra.from_differentials(7, {7: d7}),
            G2Structure.standard())


def dim1_family(a, b, c) -> tuple[LieAlgebra, G2Structure]:
    """d e^7 = a e^12 + b e^34 + c e^56 with the model 3-form; coclosed for
    all parameters, purely coclosed iff a + b + c = 0."""
    a, b, c = _f(a), _f(b), _f(c)
    if a == 0 and b == 0 and c == 0:
        raise InputError("parameters must not all vanish")
    d7 = KForm.from_terms(7, 2, [((1, 2), a), ((3, 4), b), ((5, 6), c)])
    return (LieAlgebra.from_differentials(7, {7: d7}),
            G2Structure.standard())


def quaternionic_heisenberg(nu) -> tuple[LieAlgebra, G2Structure]:
    """d e^5 = nu (e^13 - e^24), d e^6 = nu (-e^14 - e^23),
    d e^7 = nu (e^12 + e^34)."""
    nu = _f(nu)
    if nu == 0:
        raise InputError("parameter must be nonzero")
    diffs = {i + 4: sigma_plus(i).scale(nu) for i in (1, 2, 3)}
    return (LieAlgebra.from_differentials(7, diffs),
            G2Structure.standard())


def free_two_step(nu) -> tuple[LieAlgebra, G2Structure]:
    """d e^5 = -2 nu e^24, d e^6 = -2 nu e^23, d e^7 = 2 nu e^34; the free
    2-step algebra on three generators plus a 1-dimensional abelian factor."""
    nu = _f(nu)
    if nu == 0:
        raise InputError("parameter must be nonzero")
    diffs = {
        5: KForm.from_terms(7, 2, [((2, 4), -2 * nu)]),
        6: KForm.from_terms(7, 2, [((2, 3), -2 * nu)]),
        7: KForm.from_terms(7, 2, [((3, 4), 2 * nu)]),
    }
    return (LieAlgebra.from_differentials(7, diffs),
            G2Structure.standard())


def selfdual_diagonal(d5, d6, d7) -> tuple[LieAlgebra, G2Structure]:
    """d e^(i+4) = d_(i+4) sigma_i^+; the diagonal normal form of the
    self-dual coupling matrix."""
    d5, d6, d7 = _f(d5), _f(d6), _f(d7)
    diffs = {}
    for i, val in ((1, d5), (2, d6), (3, d7)):
        if val != 0:
            diffs[i + 4] = sigma_plus(i).scale(val)
    if not diffs:
        raise InputError("at least one coefficient must be nonzero")
    return (LieAlgebra.from_differentials(7, diffs),
            G2Structure.standard())


def non_calibrated(d2, d3, d4, r, s) -> tuple[LieAlgebra, G2Structure]:
    """d e^5 = d3 e^13, d e^6 = -d4 e^14, d e^7 = d2 e^12 with the
    two-parameter rotated 3-form (r^2 + s^2 = 1); the 3-dimensional
    commutator is not calibrated when r != 0."""
    d2, d3, d4, r, s = map(_f, (d2, d3, d4, r, s))
    if d2 == 0 or d3 == 0 or d4 == 0:
        raise InputError("all three coefficients must be nonzero")
    if r * r + s * s != 1:
        raise InputError("requires r^2 + s^2 = 1")
    diffs = {
        5: KForm.from_terms(7, 2, [((1, 3), d3)]),
        6: KForm.from_terms(7, 2, [((1, 4), -d4)]),
        7: KForm.from_terms(7, 2, [((1, 2), d2)]),
    }
    phi = KForm.from_terms(7, 3, [
        ((1, 2, 7), 1), ((1, 3, 5), 1), ((1, 4, 6), -1),
        ((2, 3, 4), -r), ((2, 5, 6), -r), ((3, 6, 7), -r), ((4, 5, 7), -r),
        ((2, 3, 6), -s), ((2, 4, 5), -s), ((3, 4, 7), s), ((5, 6, 7), s),
    ])
    return (LieAlgebra.from_differentials(7, diffs),
            G2Structure.from_phi(phi))


def heis3_r4(nu=1) -> tuple[LieAlgebra, G2Structure]:
    """d e^7 = nu e^12: the 3-dimensional Heisenberg algebra plus an
    abelian 4-dimensional factor, with the model 3-form (coclosed but
    never purely coclosed)."""
    nu = _f(nu)
    if nu == 0:
        raise InputError("parameter must be nonzero")
    d7 = KForm.from_terms(7, 2, [((1, 2), nu)])
    return (LieAlgebra.from_differentials(7, {7: d7}),
            G2Structure.standard())


FAMILY_BUILDERS = {
    "heis": (heisenberg_pair, ("a", "b")),
    "dim1": (dim1_family, ("a", "b", "c")),
    "qheis": (quaternionic_heisenberg, ("nu",)),
    "n32": (free_two_step, ("nu",)),
    "sdiag": (selfdual_diagonal, ("d5", "d6", "d7")),
    "n37A": (non_calibrated, ("d2", "d3", "d4", "r", "s")),
    "h3r4": (heis3_r4, ("nu",)),
}


def builtin_family(name: str, *args, **kwargs):
    """Look up a family by name and build it from positional or named
    parameters."""
    if name not in FAMILY_BUILDERS:
        raise InputError(f"unknown family {name!r}; available: "
                         + ", ".join(sorted(FAMILY_BUILDERS)))
    builder, argnames = FAMILY_BUILDERS[name]
    if args and kwargs:
        raise InputError("pass parameters positionally or by name, not both")
    if kwargs:
        missing = [a for a in argnames if a not in kwargs]
        if missing and len(kwargs) != len(argnames):
            raise InputError(f"family {name} needs parameters {argnames}")
        args = tuple(kwargs[a] for a in argnames)
    if len(args) != len(argnames):
        raise InputError(f"family {name} needs {len(argnames)} parameters "
                         f"{argnames}, got {len(args)}")
    return builder(*args)
