"""Monomial invariants from the weight lattice of translation/scaling generators.

A scaling generator assigns a rational weight to every base coordinate; jet
coordinates inherit weight(u) - sum of the weights of the differentiation
directions.  Monomials with zero weight under every scaling generator and
free of every translated coordinate are invariants; they form the integer
kernel lattice of the weight matrix.  Similarity substitutions for single
translation/scaling generators come from the same data.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr, linalg
from .errors import UnsupportedGeneratorError
from .expr import GROUP, JET, ParamExp, Power, Symbol
from .prolongation import prolong

TRANSLATION = "translation"
SCALING = "scaling"


def classify_generator(vf):
    """('translation', translated coords) or ('scaling', weight per coord)."""
    coords = vf.coordinates
    translated = []
    weights = {}
    kind = None
    for sym, coeff in zip(coords, vf.coefficients):
        if expr.is_zero(coeff):
            continue
        const = expr.constant_value(coeff)
        if const is not None:
            if kind == SCALING:
                raise UnsupportedGeneratorError(
                    f"generator mixes translation and scaling at {sym.name}"
                )
            kind = TRANSLATION
            translated.append(sym)
            continue
        ratio = expr.constant_value(expr.normalize(coeff / sym))
        if ratio is not None:
            if kind == TRANSLATION:
                raise UnsupportedGeneratorError(
                    f"generator mixes translation and scaling at {sym.name}"
                )
            kind = SCALING
            weights[sym] = ratio
            continue
        raise UnsupportedGeneratorError(
            f"coefficient {coeff} of d/d{sym.name} is neither constant nor "
            f"proportional to {sym.name}"
        )
    if kind is None:
        raise UnsupportedGeneratorError("zero generator has no invariant theory")
    if kind == TRANSLATION:
        return TRANSLATION, tuple(translated)
    return SCALING, weights


class WeightSystem:
    """Weights of all coordinates (base plus jets) under scaling generators.

    `masked` marks coordinates translated by some generator; invariant
    monomials may not involve them.
    """

    def __init__(self, space, order, coordinates, weight_rows, masked, generators):
        self.space = space
        self.order = order
        self.coordinates = tuple(coordinates)
        self.weight_rows = tuple(tuple(r) for r in weight_rows)
        self.masked = frozenset(masked)
        self.generators = tuple(generators)

    def weight(self, generator_index, sym):
        return self.weight_rows[generator_index][self.coordinates.index(sym)]

    def free_coordinates(self):
        return tuple(c for c in self.coordinates if c not in self.masked)


def weight_system(generators, js, order):
    """Weight data for a family of translation/scaling generators.

    Jet weights are read off the prolonged coefficients and cross-checked
    against the additivity rule weight(u_J) = weight(u) - sum_J weight(x_i).
    """
    coordinates = list(js.independent) + list(js.dependent) + [
        s for s in js.coordinates(order, min_order=1)
    ]
    masked = set()
    rows = []
    scaling_gens = []
    for vf in generators:
        kind, data = classify_generator(vf)
        if kind == TRANSLATION:
            masked.update(data)
            continue
        pr = prolong(vf, order, js)
        row = []
        base_weights = {}
        for sym in js.independent + js.dependent:
            base_weights[sym] = data.get(sym, Fraction(0))
        for sym in coordinates:
            if sym.role == JET:
                dep = next(d for d in js.dependent if d.name == sym.base)
                w = base_weights[dep] - sum(
                    c * base_weights[x] for c, x in zip(sym.multi, js.independent)
                )
                coeff = pr.coefficient(sym)
                if not expr.equal(coeff, expr.Rational(w) * sym):
                    raise AssertionError(
                        f"prolonged coefficient of {sym.name} disagrees with the "
                        "additive weight rule"
                    )
            else:
                w = base_weights[sym]
            row.append(w)
        rows.append(row)
        scaling_gens.append(vf)
    return WeightSystem(js, order, coordinates, rows, masked, tuple(generators))


class MonomialInvariant:
    """Integer exponent vector over the non-masked coordinates."""

    def __init__(self, coordinates, exponents):
        self.coordinates = tuple(coordinates)
        self.exponents = tuple(exponents)

    def expression(self):
        e = expr.ONE
        for sym, k in zip(self.coordinates, self.exponents):
            if k:
                e = e * Power(sym, k)
        return expr.normalize(e)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialInvariant)
            and self.coordinates == other.coordinates
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.coordinates, self.exponents))

    def __str__(self):
        return expr.render(self.expression())

    __repr__ = __str__


def monomial_invariants(ws):
    """Lattice basis of zero-weight monomials in the non-masked coordinates."""
    free = ws.free_coordinates()
    idx = [ws.coordinates.index(c) for c in free]
    rows = [[row[i] for i in idx] for row in ws.weight_rows]
    if not rows:
        kernel = [
            tuple(1 if j == i else 0 for j in range(len(free)))
            for i in range(len(free))
        ]
    else:
        kernel = linalg.integer_kernel(rows)
    return [MonomialInvariant(free, vec) for vec in kernel]


def exponent_vector(e, coordinates):
    """Exponent vector of a monomial expression, or None if not a monomial."""
    poly = expr._to_poly(expr._lift(e))
    if len(poly) != 1:
        return None
    ((powers, pexps), coeff), = poly.items()
    if pexps or coeff != 1:
        return None
    exps = [0] * len(coordinates)
    index = {c: i for i, c in enumerate(coordinates)}
    for atom, k in powers:
        if atom not in index:
            return None
        exps[index[atom]] = k
    return tuple(exps)


def in_invariant_lattice(ws, invariants, e):
    """Whether a monomial expression lies in the computed lattice."""
    free = ws.free_coordinates()
    vec = exponent_vector(e, free)
    if vec is None:
        return False
    basis = [inv.exponents for inv in invariants]
    return linalg.in_integer_lattice(basis, vec)


def verify_invariant(e, generators, js=None):
    """True iff every prolonged generator annihilates the expression."""
    e = expr.normalize(expr._lift(e))
    if not generators:
        return True
    js = js or generators[0].space
    order = max(
        (s.order for s in js.jet_symbols_in(e) if s.role == JET), default=0
    )
    for g in generators:
        pr = prolong(g, order, js)
        if not expr.is_zero(pr.apply(e)):
            return False
    return True


class SimilarityForm:
    """Change of coordinates induced by a single translation/scaling generator.

    For a scaling generator the scaled independent variable becomes e^s and
    every dependent variable picks up the matching power of e^s in front of
    a function of the invariant coordinate r; for a translation along an
    independent variable the solutions depend on the other coordinate only.
    """

    def __init__(self, generator, kind, substitutions, note=""):
        self.generator = generator
        self.kind = kind
        self.substitutions = substitutions  # list of (symbol, expression or None)
        self.note = note

    def __str__(self):
        if self.note and not self.substitutions:
            return self.note
        body = ", ".join(
            f"{sym.name} = {expr.render(e)}" for sym, e in self.substitutions
        )
        return body if not self.note else f"{body}  ({self.note})"

    __repr__ = __str__


def similarity_form(vf, function_names=("f", "g", "h")):
    """Similarity substitution for one translation or scaling generator."""
    js = vf.space
    kind, data = classify_generator(vf)
    r = Symbol("r", expr.INDEPENDENT)
    s = Symbol("s", GROUP)
    names = list(function_names) + [
        f"F{k + 1}" for k in range(len(function_names), js.q)
    ]
    if kind == TRANSLATION:
        translated = set(data)
        dep_translated = [c for c in translated if c.role == expr.DEPENDENT]
        if dep_translated:
            names_text = ", ".join(c.name for c in dep_translated)
            return SimilarityForm(
                vf, TRANSLATION, [],
                note=f"translation on {names_text} is the similarity",
            )
        if len(translated) != 1 or js.p != 2:
            raise UnsupportedGeneratorError(
                "similarity form needs exactly one translated independent variable"
            )
        moving = next(iter(translated))
        fixed = next(z for z in js.independent if z != moving)
        subs = [(moving, s), (fixed, r)]
        for dep, name in zip(js.dependent, names):
            subs.append((dep, expr.FunctionApplication(name, (r,))))
        return SimilarityForm(vf, TRANSLATION, subs)
    weights = data
    scaled_ind = [z for z in js.independent if weights.get(z)]
    if len(scaled_ind) != 1 or js.p != 2:
        raise UnsupportedGeneratorError(
            "similarity form needs exactly one scaled independent variable"
        )
    moving = scaled_ind[0]
    fixed = next(z for z in js.independent if z != moving)
    w0 = weights[moving]
    subs = [(moving, ParamExp(s, 1)), (fixed, r)]
    for dep, name in zip(js.dependent, names):
        k = weights.get(dep, Fraction(0)) / w0
        f = expr.FunctionApplication(name, (r,))
        subs.append((dep, expr.normalize(ParamExp(s, k) * f)))
    return SimilarityForm(vf, SCALING, subs)
