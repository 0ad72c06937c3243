"""Input and report documents.

One JSON document format covers both directions: inputs carry structure
constants (or a named family) plus the 3-form, with exact coefficients as
canonical fraction strings "p/q" so exactness survives serialization;
reports echo the input and add one section per computation.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import scalars
from .errors import InputError, KindMismatch
from .exterior import KForm
from .families import FAMILY_BUILDERS, builtin_family
from .g2 import G2Structure, standard_phi
from .liealg import LieAlgebra
from .scalars import EXACT, FLOAT

INPUT_VERSION = "1"

INPUT_SCHEMA = {
    "type": "object",
    "required": ["version"],
    "properties": {
        "version": {"type": "string"},
        "scalar_mode": {"enum": ["exact", "float"]},
        "basis_dim": {"const": 7},
        "family": {
            "type": "object",
            "required": ["name", "params"],
            "properties": {
                "name": {"type": "string"},
                "params": {"type": "object"},
            },
        },
        "brackets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "j", "k", "coeff"],
                "properties": {
                    "i": {"type": "integer"},
                    "j": {"type": "integer"},
                    "k": {"type": "integer"},
                    "coeff": {"type": ["string", "number"]},
                },
            },
        },
        "phi": {},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["input", "scalar_mode"],
    "properties": {
        "input": {"type": "object"},
        "scalar_mode": {"enum": ["exact", "float"]},
        "validation": {"type": "object"},
        "torsion": {"type": "object"},
        "instanton": {"type": "object"},
        "classification": {"type": "object"},
        "holonomy": {"type": "object"},
        "naturally_reductive": {"type": ["boolean", "null"]},
    },
}


def render_scalar(x) -> str | float:
    """Exact scalars render as canonical fraction strings, floats as
    numbers."""
    if isinstance(x, (Fraction, int)):
        return scalars.format_scalar(x)
    return float(x)


def form_to_entries(form: KForm):
    return [{"indices": list(idx), "coeff": render_scalar(c)}
            for idx, c in sorted(form.coeffs.items())]


def _parse_coeff(raw, mode: str):
    value = scalars.parse_scalar(raw)
    if mode == EXACT and scalars.kind_of(value) == FLOAT:
        raise InputError(
            f"decimal literal {raw!r} in an exact-mode document; use \"p/q\"")
    if mode == FLOAT:
        value = float(value)
    return value


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise exc


def parse_input(doc: dict):
    """(LieAlgebra, G2Structure, mode) from a parsed input document."""
    if not isinstance(doc, dict):
        raise InputError("input document must be a JSON object")
    if str(doc.get("version", "")) != INPUT_VERSION:
        raise InputError(f"unsupported document version {doc.get('version')!r}")
    mode = doc.get("scalar_mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise InputError(f"unknown scalar_mode {mode!r}")
    dim = doc.get("basis_dim", 7)
    if dim != 7:
        raise InputError("only basis_dim = 7 is supported")

    family = doc.get("family")
    brackets = doc.get("brackets")
    if family is not None and brackets is not None:
        raise InputError("named family and explicit brackets are mutually "
                         "exclusive")

    if family is not None:
        name = family.get("name")
        params = family.get("params", {})
        parsed = {k: _parse_coeff(v, EXACT) for k, v in params.items()}
        L, g2 = builtin_family(name, **parsed)
        if mode == FLOAT:
            L, g2 = L.to_float(), g2.to_float()
        return L, g2, mode

    entries = []
    for ent in brackets or []:
        try:
            i, j, k = int(ent["i"]), int(ent["j"]), int(ent["k"])
            coeff = _parse_coeff(ent["coeff"], mode)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed bracket entry {ent!r}") from exc
        entries.append((i, j, k, coeff))
    L = LieAlgebra.from_bracket_entries(dim, entries,
                                        EXACT if mode == EXACT else FLOAT)

    phi_spec = doc.get("phi", "standard")
    if phi_spec == "standard":
        g2 = G2Structure.standard(EXACT)
        phi = g2.phi
        if mode == FLOAT:
            g2 = g2.to_float()
    else:
        terms = []
        for ent in phi_spec:
            idx = tuple(int(x) for x in ent["indices"])
            if list(idx) != sorted(idx) or len(set(idx)) != len(idx):
                raise InputError(f"form indices {idx} must be strictly "
                                 "increasing")
            terms.append((idx, _parse_coeff(ent["coeff"], mode)))
        phi = KForm.from_terms(7, 3, terms,
                               EXACT if mode == EXACT else FLOAT)
        g2 = G2Structure.from_phi(phi)
    return L, g2, mode


def family_document(name: str, params: dict, mode: str = EXACT,
                    expanded: bool = False) -> dict:
    """Schema-valid input document for a built-in family; `expanded`
    writes the structure constants as explicit bracket entries instead of
    the family reference."""
    if name not in FAMILY_BUILDERS:
        raise InputError(f"unknown family {name!r}")
    L, g2 = builtin_family(name, **params)
    doc = {
        "version": INPUT_VERSION,
        "scalar_mode": mode,
        "basis_dim": 7,
    }
    std = standard_phi()
    doc["phi"] = "standard" if g2.phi.coeffs == std.coeffs \
        else form_to_entries(g2.phi)
    if expanded:
        brackets = []
        for i in range(7):
            for j in range(i + 1, 7):
                for k in range(7):
                    c = L.c[i][j][k]
                    if c != 0:
                        brackets.append({"i": i + 1, "j": j + 1, "k": k + 1,
                                         "coeff": render_scalar(c)})
        doc["brackets"] = brackets
    else:
        doc["family"] = {"name": name,
                         "params": {k: render_scalar(Fraction(v))
                                    for k, v in params.items()}}
    return doc


def matrix_to_json(m):
    return [[render_scalar(x) for x in row] for row in m]
