"""Exact symbolic expression trees over the rationals.

The expression language is deliberately small: rational constants, tagged
symbols, sums, products, integer powers, exponentials of a group parameter,
and opaque function applications.  Every expression normalizes to a unique
expanded form (a sorted sum of monomials with rational coefficients), which
is what makes exact golden-value testing of the downstream algebra possible.

Coefficient arithmetic is `fractions.Fraction` throughout; floats are
rejected.  Division is supported only by nonzero monomials (negative integer
powers), never by general sums.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DegenerateInputError,
    NonPolynomialError,
    UnsupportedCompositionError,
    UnsupportedDivisionError,
)

# Symbol role tags.  The numeric values define the first component of the
# canonical symbol order: role, then name, then derivative multi-index
# (graded lexicographic).
INDEPENDENT = 0
DEPENDENT = 1
JET = 2
PARAMETER = 3
UNKNOWN = 4
GROUP = 5

ROLE_NAMES = {
    INDEPENDENT: "independent",
    DEPENDENT: "dependent",
    JET: "jet",
    PARAMETER: "parameter",
    UNKNOWN: "unknown",
    GROUP: "group",
}


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not allowed in exact expressions")
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class Expr:
    """Base class of all expression nodes.

    Nodes are immutable; equality and hashing go through a precomputed
    structural key, which is also the total order used for canonical
    sorting.
    """

    __slots__ = ("_key", "_hash")

    def _setkey(self, key):
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    def __eq__(self, other):
        return isinstance(other, Expr) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    # Arithmetic sugar.  Operators build raw trees; call normalize() (or use
    # the module helpers) to obtain the canonical form.
    def __add__(self, other):
        return Sum((self, _lift(other)))

    def __radd__(self, other):
        return Sum((_lift(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Rational(-1), _lift(other)))))

    def __rsub__(self, other):
        return Sum((_lift(other), Product((Rational(-1), self))))

    def __mul__(self, other):
        return Product((self, _lift(other)))

    def __rmul__(self, other):
        return Product((_lift(other), self))

    def __truediv__(self, other):
        return Product((self, Power(_lift(other), -1)))

    def __rtruediv__(self, other):
        return Product((_lift(other), Power(self, -1)))

    def __pow__(self, n):
        return Power(self, n)

    def __neg__(self):
        return Product((Rational(-1), self))

    def __str__(self):
        return render(self)

    __repr__ = __str__


def _lift(x):
    if isinstance(x, Expr):
        return x
    return Rational(_as_fraction(x))


class Rational(Expr):
    """Exact rational constant."""

    __slots__ = ("value",)

    def __init__(self, num, den=1):
        value = Fraction(_as_fraction(num), _as_fraction(den))
        object.__setattr__(self, "value", value)
        self._setkey((0, value))


class Symbol(Expr):
    """Named atom with a role tag.

    Jet coordinates carry the name of their dependent variable in `base`
    and the derivative multi-index (one count per independent variable)
    in `multi`.
    """

    __slots__ = ("name", "role", "base", "multi")

    def __init__(self, name, role, base=None, multi=()):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "base", base if base is not None else name)
        object.__setattr__(self, "multi", tuple(multi))
        self._setkey((1, role, self.base, sum(self.multi), self.multi, name))

    @property
    def order(self):
        return sum(self.multi)


class ParamExp(Expr):
    """exp(k * eps) for a group parameter symbol eps and rational k."""

    __slots__ = ("param", "k")

    def __init__(self, param, k):
        if not (isinstance(param, Symbol) and param.role == GROUP):
            raise TypeError("ParamExp parameter must be a group-parameter symbol")
        object.__setattr__(self, "param", param)
        object.__setattr__(self, "k", _as_fraction(k))
        self._setkey((2, param._key, self.k))


class FunctionApplication(Expr):
    """Opaque function application, e.g. f(x, y).

    `derivatives[i]` is the order of formal differentiation with respect to
    argument slot i.  Nonzero derivative counts are only ever produced by
    differentiating applications whose arguments are plain symbols.
    """

    __slots__ = ("name", "args", "derivatives")

    def __init__(self, name, args, derivatives=None):
        args = tuple(_lift(a) for a in args)
        if derivatives is None:
            derivatives = (0,) * len(args)
        derivatives = tuple(derivatives)
        if len(derivatives) != len(args):
            raise ValueError("derivative counts must align with arguments")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "derivatives", derivatives)
        self._setkey(
            (3, name, len(args), sum(derivatives), derivatives,
             tuple(a._key for a in args))
        )


class Power(Expr):
    """Integer power of a subexpression."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        if not isinstance(exponent, int):
            raise TypeError("power exponents must be plain integers")
        base = _lift(base)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)
        self._setkey((4, base._key, exponent))


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        factors = tuple(_lift(f) for f in factors)
        object.__setattr__(self, "factors", factors)
        self._setkey((5, tuple(f._key for f in factors)))


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        terms = tuple(_lift(t) for t in terms)
        object.__setattr__(self, "terms", terms)
        self._setkey((6, tuple(t._key for t in terms)))


ZERO = Rational(0)
ONE = Rational(1)


# ---------------------------------------------------------------------------
# Polynomial normal form.
#
# A monomial is a pair (powers, pexps):
#   powers: sorted tuple of (atom, integer exponent), atom a Symbol or
#           FunctionApplication with normalized arguments;
#   pexps:  sorted tuple of (group symbol, rational exponent coefficient)
#           representing a product of ParamExp factors.
# A polynomial is a dict monomial -> Fraction.
# ---------------------------------------------------------------------------

_EMPTY_MONO = ((), ())


def _mono_mul(m1, m2):
    p1, e1 = m1
    p2, e2 = m2
    if not p2 and not e2:
        return m1
    if not p1 and not e1:
        return m2
    powers = {}
    for atom, exp in p1 + p2:
        powers[atom] = powers.get(atom, 0) + exp
    pexps = {}
    for sym, k in e1 + e2:
        pexps[sym] = pexps.get(sym, Fraction(0)) + k
    return (
        tuple(sorted(((a, e) for a, e in powers.items() if e != 0),
                     key=lambda it: it[0]._key)),
        tuple(sorted(((s, k) for s, k in pexps.items() if k != 0),
                     key=lambda it: it[0]._key)),
    )


def _mono_pow(m, n):
    powers, pexps = m
    return (
        tuple((a, e * n) for a, e in powers),
        tuple((s, k * n) for s, k in pexps),
    )


def _poly_add_inplace(target, poly, scale=Fraction(1)):
    for mono, coeff in poly.items():
        c = target.get(mono, Fraction(0)) + coeff * scale
        if c:
            target[mono] = c
        else:
            target.pop(mono, None)


def _poly_mul(p1, p2):
    if not p1 or not p2:
        return {}
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = _mono_mul(m1, m2)
            c = out.get(m, Fraction(0)) + c1 * c2
            if c:
                out[m] = c
            else:
                out.pop(m, None)
    return out


def _poly_pow(p, n):
    result = {_EMPTY_MONO: Fraction(1)}
    base = p
    while n:
        if n & 1:
            result = _poly_mul(result, base)
        n >>= 1
        if n:
            base = _poly_mul(base, base)
    return result


def _poly_invert_monomial(p):
    """Invert a single-monomial polynomial; error otherwise."""
    if not p:
        raise DegenerateInputError("division by zero expression")
    if len(p) != 1:
        raise UnsupportedDivisionError(
            "division is only supported by nonzero monomials, not by sums"
        )
    (mono, coeff), = p.items()
    return {_mono_pow(mono, -1): Fraction(1) / coeff}


def _to_poly(e):
    if isinstance(e, Rational):
        return {_EMPTY_MONO: e.value} if e.value else {}
    if isinstance(e, Symbol):
        return {(((e, 1),), ()): Fraction(1)}
    if isinstance(e, ParamExp):
        if e.k == 0:
            return {_EMPTY_MONO: Fraction(1)}
        return {((), ((e.param, e.k),)): Fraction(1)}
    if isinstance(e, FunctionApplication):
        atom = FunctionApplication(
            e.name, tuple(normalize(a) for a in e.args), e.derivatives
        )
        return {(((atom, 1),), ()): Fraction(1)}
    if isinstance(e, Sum):
        out = {}
        for t in e.terms:
            _poly_add_inplace(out, _to_poly(t))
        return out
    if isinstance(e, Product):
        out = {_EMPTY_MONO: Fraction(1)}
        for f in e.factors:
            out = _poly_mul(out, _to_poly(f))
        return out
    if isinstance(e, Power):
        p = _to_poly(e.base)
        if e.exponent >= 0:
            return _poly_pow(p, e.exponent)
        return _poly_pow(_poly_invert_monomial(p), -e.exponent)
    raise TypeError(f"unknown expression node {e!r}")


def _mono_sort_key(mono):
    powers, pexps = mono
    return (
        tuple((a._key, e) for a, e in powers),
        tuple((s._key, k) for s, k in pexps),
    )


def _term_expr(mono, coeff):
    powers, pexps = mono
    factors = []
    if coeff != 1 or (not powers and not pexps):
        factors.append(Rational(coeff))
    for atom, exp in powers:
        factors.append(atom if exp == 1 else Power(atom, exp))
    for sym, k in pexps:
        factors.append(ParamExp(sym, k))
    if len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


def _from_poly(poly):
    if not poly:
        return ZERO
    items = sorted(poly.items(), key=lambda it: _mono_sort_key(it[0]))
    terms = tuple(_term_expr(m, c) for m, c in items)
    if len(terms) == 1:
        return terms[0]
    return Sum(terms)


def normalize(e):
    """Return the unique canonical form of `e`.

    Semantically equal polynomial expressions map to identical trees.
    """
    return _from_poly(_to_poly(_lift(e)))


def is_zero(e):
    return not _to_poly(_lift(e))


def equal(a, b):
    """Exact semantic equality after normalization."""
    return _to_poly(_lift(a) - _lift(b)) == {}


def constant_value(e):
    """The Fraction value of a constant expression, or None."""
    p = _to_poly(_lift(e))
    if not p:
        return Fraction(0)
    if len(p) == 1 and _EMPTY_MONO in p:
        return p[_EMPTY_MONO]
    return None


def free_symbols(e):
    """All symbols occurring in `e`, including inside function arguments."""
    out = set()
    _collect_symbols(_lift(e), out)
    return out


def _collect_symbols(e, out):
    if isinstance(e, Symbol):
        out.add(e)
    elif isinstance(e, ParamExp):
        out.add(e.param)
    elif isinstance(e, FunctionApplication):
        for a in e.args:
            _collect_symbols(a, out)
    elif isinstance(e, Power):
        _collect_symbols(e.base, out)
    elif isinstance(e, Product):
        for f in e.factors:
            _collect_symbols(f, out)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_symbols(t, out)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def _atom_diff(atom, s):
    """Derivative of a monomial atom with respect to symbol s, as a poly."""
    if isinstance(atom, Symbol):
        return {_EMPTY_MONO: Fraction(1)} if atom == s else {}
    if isinstance(atom, FunctionApplication):
        if s not in free_symbols(atom):
            return {}
        if not all(isinstance(a, Symbol) for a in atom.args):
            raise UnsupportedCompositionError(
                f"cannot differentiate {atom} with composite arguments by {s.name}"
            )
        if len(set(atom.args)) != len(atom.args):
            raise UnsupportedCompositionError(
                f"cannot differentiate {atom} with repeated arguments"
            )
        slot = atom.args.index(s)
        d = list(atom.derivatives)
        d[slot] += 1
        bumped = FunctionApplication(atom.name, atom.args, tuple(d))
        return {(((bumped, 1),), ()): Fraction(1)}
    raise TypeError(f"unexpected monomial atom {atom!r}")


def _poly_diff(poly, s):
    out = {}
    for (powers, pexps), coeff in poly.items():
        for idx, (atom, exp) in enumerate(powers):
            datom = _atom_diff(atom, s)
            if not datom:
                continue
            rest = list(powers)
            if exp == 1:
                del rest[idx]
            else:
                rest[idx] = (atom, exp - 1)
            base = {(tuple(rest), pexps): coeff * exp}
            _poly_add_inplace(out, _poly_mul(base, datom))
        if isinstance(s, Symbol) and s.role == GROUP:
            for sym, k in pexps:
                if sym == s:
                    _poly_add_inplace(out, {(powers, pexps): coeff * k})
    return out


def diff(e, s):
    """Exact partial derivative; all other symbols are held constant."""
    if not isinstance(s, Symbol):
        raise TypeError("can only differentiate with respect to a Symbol")
    return _from_poly(_poly_diff(_to_poly(_lift(e)), s))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def substitute(e, rules):
    """Simultaneous, non-recursive substitution of symbols, then normalize."""
    for target in rules:
        if not isinstance(target, Symbol):
            raise TypeError("substitution targets must be symbols")
    rules = {t: _lift(v) for t, v in rules.items()}
    return normalize(_sub(_lift(e), rules))


def _sub(e, rules):
    if isinstance(e, Symbol):
        return rules.get(e, e)
    if isinstance(e, Rational) or isinstance(e, ParamExp):
        return e
    if isinstance(e, FunctionApplication):
        return FunctionApplication(
            e.name, tuple(_sub(a, rules) for a in e.args), e.derivatives
        )
    if isinstance(e, Power):
        return Power(_sub(e.base, rules), e.exponent)
    if isinstance(e, Product):
        return Product(tuple(_sub(f, rules) for f in e.factors))
    if isinstance(e, Sum):
        return Sum(tuple(_sub(t, rules) for t in e.terms))
    raise TypeError(f"unknown expression node {e!r}")


# ---------------------------------------------------------------------------
# Coefficient collection
# ---------------------------------------------------------------------------

class MonomialMap:
    """Decomposition of an expression as sum(coefficient * monomial).

    Keys are exponent tuples aligned with the sorted variable tuple; the
    coefficients are free of those variables.
    """

    def __init__(self, variables, terms):
        self.variables = variables
        self.terms = terms

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def coefficient(self, exponents):
        return self.terms.get(tuple(exponents), ZERO)

    def reassemble(self):
        total = ZERO
        for exps, coeff in self.terms.items():
            mono = ONE
            for var, e in zip(self.variables, exps):
                if e:
                    mono = mono * Power(var, e)
            total = total + coeff * mono
        return normalize(total)


def collect(e, variables):
    """Collect `e` as a polynomial in `variables`.

    Raises NonPolynomialError if `e` depends on any of the variables other
    than through nonnegative integer powers.
    """
    variables = tuple(sorted(set(variables), key=lambda s: s._key))
    index = {v: i for i, v in enumerate(variables)}
    buckets = {}
    for (powers, pexps), coeff in _to_poly(_lift(e)).items():
        exps = [0] * len(variables)
        rest = []
        for atom, exp in powers:
            if isinstance(atom, Symbol) and atom in index:
                if exp < 0:
                    raise NonPolynomialError(
                        f"negative power of {atom.name} is not polynomial"
                    )
                exps[index[atom]] = exp
            else:
                if free_symbols(atom) & set(variables):
                    raise NonPolynomialError(
                        f"{atom} depends non-polynomially on the collection variables"
                    )
                rest.append((atom, exp))
        key = tuple(exps)
        bucket = buckets.setdefault(key, {})
        _poly_add_inplace(bucket, {(tuple(rest), pexps): coeff})
    terms = {}
    for key, poly in buckets.items():
        if poly:
            terms[key] = _from_poly(poly)
    return MonomialMap(variables, terms)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _render_fraction(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_factor(atom, exp):
    if isinstance(atom, (Symbol, FunctionApplication)):
        base = _render_atom(atom)
    else:
        base = f"({render(atom)})"
    if exp == 1:
        return base
    return f"{base}^{exp}"


def _render_atom(atom):
    if isinstance(atom, Symbol):
        return atom.name
    name = atom.name
    sub = "".join(
        (a.name if isinstance(a, Symbol) else "?") * d
        for a, d in zip(atom.args, atom.derivatives)
    )
    if sub:
        name = f"{name}_{sub}"
    return f"{name}({', '.join(render(a) for a in atom.args)})"


def _render_pexp(sym, k):
    if k == 1:
        return f"exp({sym.name})"
    if k == -1:
        return f"exp(-{sym.name})"
    return f"exp({_render_fraction(k)}*{sym.name})"


def _render_term(mono, coeff):
    powers, pexps = mono
    pieces = [_render_factor(a, e) for a, e in powers]
    pieces.extend(_render_pexp(s, k) for s, k in pexps)
    if not pieces:
        return _render_fraction(coeff)
    body = "*".join(pieces)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    return f"{_render_fraction(coeff)}*{body}"


def render(e):
    """Stable human-readable form of the normalized expression."""
    poly = _to_poly(_lift(e))
    if not poly:
        return "0"
    items = sorted(poly.items(), key=lambda it: _mono_sort_key(it[0]))
    parts = []
    for mono, coeff in items:
        text = _render_term(mono, coeff)
        if not parts:
            parts.append(text)
        elif text.startswith("-"):
            parts.append(f" - {text[1:]}")
        else:
            parts.append(f" + {text}")
    return "".join(parts)
