"""Finite-dimensional Lie-algebra structure analysis over exact rationals.

Algebras are given by structure constants (optionally realized by vector
fields); subspaces are stored with reduced-row-echelon canonical bases so
equality is decidable and reports are stable.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr, linalg
from .errors import NotASubalgebraError
from .fields import bracket as field_bracket


class Subspace:
    """Subspace of a Lie algebra, canonicalized to an RREF basis."""

    def __init__(self, algebra, vectors):
        self.algebra = algebra
        rows = [tuple(Fraction(x) for x in v) for v in vectors]
        reduced, pivots = linalg.rref(rows)
        self.basis = tuple(reduced)
        self.pivots = tuple(pivots)

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, vector):
        return linalg.in_span(self.basis, tuple(Fraction(x) for x in vector))

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.basis)

    def reduce_vector(self, vector):
        """Residual of `vector` after eliminating the subspace basis."""
        v = [Fraction(x) for x in vector]
        for row, pc in zip(self.basis, self.pivots):
            if v[pc] != 0:
                f = v[pc]
                v = [a - f * b for a, b in zip(v, row)]
        return tuple(v)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __str__(self):
        if not self.basis:
            return "{0}"
        return "span{" + "; ".join(
            self.algebra.format_vector(v) for v in self.basis
        ) + "}"

    __repr__ = __str__


class LieAlgebra:
    """Lie algebra with rational structure constants C^k_{ij}.

    Antisymmetry and the Jacobi identity are asserted at construction;
    when a vector-field realization is supplied, its brackets are checked
    against the constants.
    """

    def __init__(self, constants, labels=None, realization=None, check_realization=True):
        self.n = len(constants)
        self.constants = tuple(
            tuple(tuple(Fraction(x) for x in row) for row in plane)
            for plane in constants
        )
        self.labels = tuple(labels) if labels else tuple(
            f"v{i + 1}" for i in range(self.n)
        )
        self.realization = tuple(realization) if realization else None
        self._check_antisymmetry()
        self._check_jacobi()
        if self.realization and check_realization:
            self._check_realization()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_brackets(cls, n, entries, labels=None):
        """Build from sparse entries {(i, j): coefficient vector}, 0-indexed."""
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in entries.items():
            for k, x in enumerate(vec):
                c[i][j][k] = Fraction(x)
                c[j][i][k] = -Fraction(x)
        return cls(c, labels=labels)

    def _check_antisymmetry(self):
        for i in range(self.n):
            for j in range(self.n):
                for k in range(self.n):
                    if self.constants[i][j][k] != -self.constants[j][i][k]:
                        raise ValueError(
                            f"structure constants are not antisymmetric at ({i},{j},{k})"
                        )

    def _check_jacobi(self):
        for i in range(self.n):
            for j in range(i + 1, self.n):
                for k in range(j + 1, self.n):
                    for l in range(self.n):
                        s = Fraction(0)
                        for m in range(self.n):
                            s += (
                                self.constants[i][j][m] * self.constants[m][k][l]
                                + self.constants[j][k][m] * self.constants[m][i][l]
                                + self.constants[k][i][m] * self.constants[m][j][l]
                            )
                        if s != 0:
                            raise ValueError(
                                f"Jacobi identity fails on basis triple ({i},{j},{k})"
                            )

    def _check_realization(self):
        for i in range(self.n):
            for j in range(i + 1, self.n):
                br = field_bracket(self.realization[i], self.realization[j])
                combo = None
                for k in range(self.n):
                    term = self.realization[k].scale(self.constants[i][j][k])
                    combo = term if combo is None else combo + term
                if not (br - combo).is_zero():
                    raise ValueError(
                        f"realization bracket [{self.labels[i]},{self.labels[j]}] "
                        "does not match the structure constants"
                    )

    # -- basic operations ------------------------------------------------------

    def bracket_coords(self, a, b):
        """Bracket of two coordinate vectors, as a coordinate vector."""
        out = [Fraction(0)] * self.n
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k in range(self.n):
                    c = self.constants[i][j][k]
                    if c:
                        out[k] += ai * bj * c
        return tuple(out)

    def ad(self, a):
        """Matrix of ad(sum a_i e_i): column j holds [a, e_j] in coordinates."""
        cols = []
        for j in range(self.n):
            e_j = [Fraction(0)] * self.n
            e_j[j] = Fraction(1)
            cols.append(self.bracket_coords(a, e_j))
        return tuple(tuple(cols[j][k] for j in range(self.n)) for k in range(self.n))

    def subspace(self, vectors):
        return Subspace(self, vectors)

    def whole(self):
        eye = [[Fraction(1 if i == j else 0) for j in range(self.n)]
               for i in range(self.n)]
        return Subspace(self, eye)

    def format_vector(self, vec):
        parts = []
        for c, label in zip(vec, self.labels):
            if c == 0:
                continue
            if c == 1:
                parts.append(label)
            elif c == -1:
                parts.append(f"-{label}")
            else:
                parts.append(f"{c}*{label}")
        if not parts:
            return "0"
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text


def structure_constants(basis, labels=None):
    """Lie algebra spanned by the given vector fields.

    Raises NotASubalgebraError (naming the offending pair) if some bracket
    leaves the span.
    """
    basis = list(basis)
    n = len(basis)
    coords = _field_coordinates(basis)
    constants = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            br = field_bracket(basis[i], basis[j])
            sol = _express_in_basis(br, basis, coords)
            if sol is None:
                raise NotASubalgebraError(
                    f"bracket of elements {i + 1} and {j + 1} is outside the span",
                    pair=(i, j),
                )
            for k, c in enumerate(sol):
                constants[i][j][k] = c
                constants[j][i][k] = -c
    return LieAlgebra(constants, labels=labels, realization=basis,
                      check_realization=False)


def _field_coordinates(fields):
    """A common rational coordinate system for polynomial vector fields.

    Coordinates are indexed by (coefficient slot, monomial over every symbol
    appearing in the coefficients).
    """
    keys = []
    key_index = {}
    rows = []
    for vf in fields:
        rows.append(_field_row(vf, keys, key_index))
    width = len(keys)
    return {
        "keys": keys,
        "index": key_index,
        "rows": [row + [Fraction(0)] * (width - len(row)) for row in rows],
    }


def _field_row(vf, keys, key_index):
    row = [Fraction(0)] * len(keys)
    for slot, coeff in enumerate(vf.coefficients):
        poly = expr._to_poly(coeff)
        for mono, c in poly.items():
            key = (slot, mono)
            if key not in key_index:
                key_index[key] = len(keys)
                keys.append(key)
                row.append(Fraction(0))
            row[key_index[key]] = c
    return row


def _express_in_basis(vf, basis, coords):
    row = _field_row(vf, coords["keys"], coords["index"])
    width = len(coords["keys"])
    mat = [r + [Fraction(0)] * (width - len(r)) for r in coords["rows"]]
    row = row + [Fraction(0)] * (width - len(row))
    cols = list(zip(*mat)) if mat else []
    return linalg.solve(cols, row)


# ---------------------------------------------------------------------------
# Structure theory
# ---------------------------------------------------------------------------

def killing_form(L):
    """K(e_i, e_j) = trace(ad e_i . ad e_j), exact and symmetric."""
    ads = []
    for i in range(L.n):
        e_i = [Fraction(0)] * L.n
        e_i[i] = Fraction(1)
        ads.append(L.ad(e_i))
    out = []
    for i in range(L.n):
        row = []
        for j in range(L.n):
            t = Fraction(0)
            for a in range(L.n):
                for b in range(L.n):
                    t += ads[i][a][b] * ads[j][b][a]
            row.append(t)
        out.append(tuple(row))
    return tuple(out)


def product_space(L, S, T):
    """[S, T] as a subspace."""
    vectors = []
    for a in S.basis:
        for b in T.basis:
            vectors.append(L.bracket_coords(a, b))
    return L.subspace(vectors)


def derived_series(L):
    """g, [g,g], [[g,g],[g,g]], ... until stabilization."""
    series = [L.whole()]
    while True:
        nxt = product_space(L, series[-1], series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
        if nxt.dim == 0:
            break
    return series


def lower_central_series(L):
    series = [L.whole()]
    while True:
        nxt = product_space(L, L.whole(), series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
        if nxt.dim == 0:
            break
    return series


def is_solvable(L):
    return derived_series(L)[-1].dim == 0


def is_nilpotent(L):
    return lower_central_series(L)[-1].dim == 0


def is_semisimple(L):
    return linalg.det(killing_form(L)) != 0


def center(L):
    """{x : [x, e_j] = 0 for all j}."""
    rows = []
    for j in range(L.n):
        for k in range(L.n):
            rows.append(tuple(L.constants[i][j][k] for i in range(L.n)))
    return L.subspace(linalg.nullspace(rows, L.n))


def radical(L):
    """Killing-orthogonal of the derived algebra (Cartan's criterion)."""
    K = killing_form(L)
    derived = product_space(L, L.whole(), L.whole())
    rows = []
    for d in derived.basis:
        rows.append(tuple(
            sum((K[i][j] * d[j] for j in range(L.n)), Fraction(0))
            for i in range(L.n)
        ))
    if not rows:
        return L.whole()
    return L.subspace(linalg.nullspace(rows, L.n))


def is_abelian(L, S=None):
    S = S if S is not None else L.whole()
    for a in S.basis:
        for b in S.basis:
            if any(L.bracket_coords(a, b)):
                return False
    return True


def subalgebra_check(L, S):
    """Whether the subspace closes under the bracket."""
    for a in S.basis:
        for b in S.basis:
            if not S.contains(L.bracket_coords(a, b)):
                return False
    return True


def is_ideal(L, S):
    for i in range(L.n):
        e_i = [Fraction(0)] * L.n
        e_i[i] = Fraction(1)
        for b in S.basis:
            if not S.contains(L.bracket_coords(e_i, b)):
                return False
    return True


def normalizer(L, S):
    """{y : [y, S] is contained in S}."""
    rows = []
    for b in S.basis:
        # linear map y -> [y, b]; its residual modulo S must vanish
        residuals = []
        for i in range(L.n):
            e_i = [Fraction(0)] * L.n
            e_i[i] = Fraction(1)
            residuals.append(S.reduce_vector(L.bracket_coords(e_i, b)))
        for k in range(L.n):
            rows.append(tuple(residuals[i][k] for i in range(L.n)))
    if not rows:
        return L.whole()
    return L.subspace(linalg.nullspace(rows, L.n))


# ---------------------------------------------------------------------------
# JSON structure-constants interchange
# ---------------------------------------------------------------------------

def algebra_from_json(doc):
    """Build a LieAlgebra from {"dim": n, "brackets": [{"i", "j", "coeffs"}]}.

    Indices are 1-based; missing brackets are zero; antisymmetric partners
    are filled in automatically.
    """
    n = doc["dim"]
    entries = {}
    for item in doc.get("brackets", []):
        i, j = item["i"] - 1, item["j"] - 1
        coeffs = [_parse_rational(x) for x in item["coeffs"]]
        if len(coeffs) != n:
            raise ValueError("bracket coefficient vector has wrong length")
        entries[(i, j)] = coeffs
    labels = doc.get("labels")
    return LieAlgebra.from_brackets(n, entries, labels=labels)


def _parse_rational(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise ValueError(f"rationals must be integers or 'num/den' strings, got {x!r}")
