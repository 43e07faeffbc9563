"""Exact adjoint matrices, one-parameter flows, and solution transforms.

Everything lives in the ring of finite sums  c * prod_i eps_i^m_i * e^(k_i eps_i)
with rational c, k (class ExpPolynomial).  Matrix exponentials are computed
by the Jordan-Chevalley splitting A = S + N with S diagonalizable over the
rationals and N nilpotent, so exponentials of matrices with rational
spectrum are exact and closed in this ring.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import expr
from .errors import UnsupportedSpectrumError
from .expr import GROUP, ParamExp, Power, Symbol, ZERO

EPS = "eps"
DELTA = "delta"


class ExpPolynomial:
    """Finite sum of terms c * e^r * prod_i eps_i^m_i * e^(k_i * eps_i).

    `params` is a sorted tuple of parameter names; term keys are
    (r, (m_i,...), (k_i,...)) with rational r (a constant exponent produced
    by evaluating a parameter at a rational point) and integer m_i.
    """

    __slots__ = ("params", "terms")

    def __init__(self, params, terms=None):
        self.params = tuple(params)
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, value, params=(EPS,)):
        value = Fraction(value)
        n = len(params)
        if not value:
            return cls(params, {})
        return cls(params, {(Fraction(0), (0,) * n, (Fraction(0),) * n): value})

    @classmethod
    def term(cls, c, m, k, params=(EPS,), param=EPS):
        """c * eps^m * e^(k*eps) in the named parameter."""
        n = len(params)
        i = params.index(param)
        ms = tuple(m if j == i else 0 for j in range(n))
        ks = tuple(Fraction(k) if j == i else Fraction(0) for j in range(n))
        return cls(params, {(Fraction(0), ms, ks): Fraction(c)})

    def promote(self, params):
        """The same element viewed over a larger parameter tuple."""
        params = tuple(params)
        if params == self.params:
            return self
        pos = [params.index(p) for p in self.params]
        n = len(params)
        out = {}
        for (r, ms, ks), c in self.terms.items():
            new_m = [0] * n
            new_k = [Fraction(0)] * n
            for src, dst in enumerate(pos):
                new_m[dst] = ms[src]
                new_k[dst] = ks[src]
            out[(r, tuple(new_m), tuple(new_k))] = c
        return ExpPolynomial(params, out)

    # -- ring operations --------------------------------------------------------

    def _align(self, other):
        if not isinstance(other, ExpPolynomial):
            other = ExpPolynomial.constant(other, self.params)
        if self.params == other.params:
            return self, other
        merged = tuple(sorted(set(self.params) | set(other.params)))
        return self.promote(merged), other.promote(merged)

    def __add__(self, other):
        a, b = self._align(other)
        out = dict(a.terms)
        for key, c in b.terms.items():
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return ExpPolynomial(a.params, out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPolynomial(self.params, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._align(other)
        return b + (-a)

    def __mul__(self, other):
        a, b = self._align(other)
        out = {}
        for (r1, m1, k1), c1 in a.terms.items():
            for (r2, m2, k2), c2 in b.terms.items():
                key = (
                    r1 + r2,
                    tuple(x + y for x, y in zip(m1, m2)),
                    tuple(x + y for x, y in zip(k1, k2)),
                )
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return ExpPolynomial(a.params, out)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.params, frozenset(self.terms.items())))

    # -- calculus ----------------------------------------------------------------

    def derivative(self, param=EPS):
        i = self.params.index(param)
        out = ExpPolynomial(self.params, {})
        for (r, ms, ks), c in self.terms.items():
            if ms[i] > 0:
                m2 = tuple(m - 1 if j == i else m for j, m in enumerate(ms))
                out = out + ExpPolynomial(self.params, {(r, m2, ks): c * ms[i]})
            if ks[i]:
                out = out + ExpPolynomial(self.params, {(r, ms, ks): c * ks[i]})
        return out

    def integrate(self, param=EPS):
        """Definite integral from 0 to `param`, exact in the ring."""
        i = self.params.index(param)
        out = ExpPolynomial(self.params, {})
        for (r, ms, ks), c in self.terms.items():
            out = out + self._integrate_term(r, ms, ks, c, i)
        return out

    def _integrate_term(self, r, ms, ks, c, i):
        m, k = ms[i], ks[i]
        if k == 0:
            m2 = tuple(x + 1 if j == i else x for j, x in enumerate(ms))
            return ExpPolynomial(self.params, {(r, m2, ks): c / (m + 1)})
        # int_0^t s^m e^(ks) ds = t^m e^(kt)/k - (m/k) * int_0^t s^(m-1) e^(ks) ds
        head = ExpPolynomial(self.params, {(r, ms, ks): c / k})
        if m == 0:
            zero_ks = tuple(Fraction(0) if j == i else x for j, x in enumerate(ks))
            return head - ExpPolynomial(self.params, {(r, ms, zero_ks): c / k})
        m2 = tuple(x - 1 if j == i else x for j, x in enumerate(ms))
        return head - self._integrate_term(r, m2, ks, c * m / k, i)

    # -- substitution --------------------------------------------------------------

    def substitute(self, param, value):
        """Evaluate one parameter at an exact rational point.

        e^(k*eps) at eps=q becomes the exact constant exponential e^(k*q),
        carried in the constant-exponent slot of each term.
        """
        value = Fraction(value)
        i = self.params.index(param)
        rest = tuple(p for p in self.params if p != param)
        out = {}
        for (r, ms, ks), c in self.terms.items():
            new_c = c * value ** ms[i]
            if not new_c:
                continue
            new_r = r + ks[i] * value
            new_m = tuple(m for j, m in enumerate(ms) if j != i)
            new_k = tuple(k for j, k in enumerate(ks) if j != i)
            key = (new_r, new_m, new_k)
            s = out.get(key, Fraction(0)) + new_c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return ExpPolynomial(rest, out)

    def substitute_sum(self, param, parts):
        """Replace one parameter by a sum of fresh parameters, exactly.

        (a+b)^m expands binomially; e^(k(a+b)) = e^(ka) e^(kb).
        """
        i = self.params.index(param)
        rest = [p for p in self.params if p != param]
        new_params = tuple(sorted(set(rest) | set(parts)))
        out = ExpPolynomial(new_params, {})
        for (r, ms, ks), c in self.terms.items():
            base = {(r,
                     tuple(m for j, m in enumerate(ms) if j != i),
                     tuple(k for j, k in enumerate(ks) if j != i)): c}
            term = ExpPolynomial(tuple(rest), base).promote(new_params)
            # exponential part
            for p in parts:
                if ks[i]:
                    term = term * ExpPolynomial.term(1, 0, ks[i], new_params, p)
            # polynomial part (sum of parts)^m
            linear = ExpPolynomial(new_params, {})
            for p in parts:
                linear = linear + ExpPolynomial.term(1, 1, 0, new_params, p)
            for _ in range(ms[i]):
                term = term * linear
            out = out + term
        return out

    def value_at_zero(self):
        """Exact value with every parameter set to 0 (must be rational)."""
        v = self
        for p in list(v.params):
            v = v.substitute(p, 0)
        total = Fraction(0)
        for (r, _, _), c in v.terms.items():
            if r != 0:
                raise ValueError("value involves a non-rational constant exponential")
            total += c
        return total

    def rational_value(self):
        """The Fraction this element equals, or None if not a plain rational."""
        if not self.terms:
            return Fraction(0)
        zero_key = (Fraction(0), (0,) * len(self.params),
                    (Fraction(0),) * len(self.params))
        if set(self.terms) == {zero_key}:
            return self.terms[zero_key]
        return None

    def to_expression(self, param_symbols):
        """Convert to an Expr using the given name -> group symbol mapping."""
        total = ZERO
        for (r, ms, ks), c in sorted(self.terms.items()):
            if r != 0:
                raise ValueError("constant exponentials have no expression form")
            term = expr.Rational(c)
            for name, m, k in zip(self.params, ms, ks):
                sym = param_symbols[name]
                if m:
                    term = term * Power(sym, m)
                if k:
                    term = term * ParamExp(sym, k)
            total = total + term
        return expr.normalize(total)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (r, ms, ks), c in sorted(self.terms.items()):
            factors = []
            if r:
                factors.append(f"e^({r})")
            for name, m, k in zip(self.params, ms, ks):
                if m == 1:
                    factors.append(name)
                elif m:
                    factors.append(f"{name}^{m}")
                if k == 1:
                    factors.append(f"exp({name})")
                elif k == -1:
                    factors.append(f"exp(-{name})")
                elif k:
                    factors.append(f"exp({k}*{name})")
            body = "*".join(factors)
            if not body:
                text = str(c)
            elif c == 1:
                text = body
            elif c == -1:
                text = f"-{body}"
            else:
                text = f"{c}*{body}"
            if not parts:
                parts.append(text)
            elif text.startswith("-"):
                parts.append(f" - {text[1:]}")
            else:
                parts.append(f" + {text}")
        return "".join(parts)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Univariate rational polynomials (for the Jordan-Chevalley splitting)
# ---------------------------------------------------------------------------

def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and _poly_trim(list(a)):
        a = _poly_trim(a)
        if len(a) < len(b):
            break
        coeff = a[-1] / b[-1]
        deg = len(a) - len(b)
        q[deg] = coeff
        for i, y in enumerate(b):
            a[deg + i] -= coeff * y
        a = _poly_trim(a)
    return _poly_trim(q), _poly_trim(a)


def _poly_gcdext(a, b):
    """(g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = list(a), list(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while _poly_trim(list(r1)):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    if r0:
        lead = r0[-1]
        r0 = [x / lead for x in r0]
        s0 = [x / lead for x in s0]
        t0 = [x / lead for x in t0]
    return r0, s0, t0


def _poly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return _poly_trim(out)


def char_poly(A):
    """Characteristic polynomial coefficients (low to high) via Faddeev-LeVerrier."""
    n = len(A)
    # coefficients: p(x) = x^n + c_{n-1} x^(n-1) + ... + c_0
    M = [[Fraction(0)] * n for _ in range(n)]
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    I = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    Mk = [row[:] for row in I]
    for k in range(1, n + 1):
        AM = _mat_mul_frac(A, Mk)
        tr = sum(AM[i][i] for i in range(n))
        ck = -tr / k
        c[n - k] = ck
        Mk = [[AM[i][j] + (ck if i == j else 0) for j in range(n)] for i in range(n)]
    return c


def _mat_mul_frac(A, B):
    n = len(A)
    m = len(B[0])
    inner = len(B)
    return [
        [sum((A[i][t] * B[t][j] for t in range(inner)), Fraction(0)) for j in range(m)]
        for i in range(n)
    ]


def rational_eigenvalues(c):
    """Roots of a rational-coefficient polynomial with multiplicities.

    Raises UnsupportedSpectrumError if the polynomial does not split over
    the rationals; the message carries the stuck factor.
    """
    p = list(c)
    roots = {}
    # strip roots at 0
    while len(p) > 1 and p[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        p = p[1:]
    while len(p) > 1:
        root = _find_rational_root(p)
        if root is None:
            raise UnsupportedSpectrumError(
                "characteristic polynomial does not split over the rationals; "
                f"stuck factor has coefficients {[str(x) for x in p]}"
            )
        roots[root] = roots.get(root, 0) + 1
        p, rem = _poly_divmod(p, [-root, Fraction(1)])
        if rem:
            raise AssertionError("exact deflation left a remainder")
    return roots


def _find_rational_root(p):
    scale = 1
    for x in p:
        scale = scale * x.denominator // math.gcd(scale, x.denominator)
    ints = [int(x * scale) for x in p]
    a0, an = ints[0], ints[-1]
    if a0 == 0:
        return Fraction(0)
    for num in _divisors(abs(a0)):
        for den in _divisors(abs(an)):
            for sign in (1, -1):
                cand = Fraction(sign * num, den)
                if _poly_eval(p, cand) == 0:
                    return cand
    return None


def _divisors(n):
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _poly_eval(p, x):
    acc = Fraction(0)
    for coeff in reversed(p):
        acc = acc * x + coeff
    return acc


def matrix_exp(A, param=EPS):
    """Exact exp(param * A) for a rational matrix with rational spectrum.

    Jordan-Chevalley: A = S + N with S = p(A) diagonalizable (computed from
    spectral projectors via CRT interpolation) and N nilpotent; then
    exp(tA) = sum_s e^(lambda_s t) P_s * sum_j t^j N^j / j!.
    """
    n = len(A)
    A = [[Fraction(x) for x in row] for row in A]
    roots = rational_eigenvalues(char_poly(A))
    # CRT: find r_s(x) = 1 mod (x-l_s)^m_s, 0 mod the others; P_s = r_s(A).
    projectors = {}
    factors = {
        lam: _poly_power([-lam, Fraction(1)], m) for lam, m in roots.items()
    }
    for lam in roots:
        g = [Fraction(1)]
        for other, f in factors.items():
            if other != lam:
                g = _poly_mul(g, f)
        _, _, t = _poly_gcdext(factors[lam], g)
        r = _poly_mul(g, t)
        projectors[lam] = _poly_of_matrix(r, A)
    S = [[Fraction(0)] * n for _ in range(n)]
    for lam, P in projectors.items():
        for i in range(n):
            for j in range(n):
                S[i][j] += lam * P[i][j]
    N = [[A[i][j] - S[i][j] for j in range(n)] for i in range(n)]
    # exp(tN): finite series.
    zero = ExpPolynomial.constant(0, (param,))
    result = [[zero for _ in range(n)] for _ in range(n)]
    Nk = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    exp_n = [[zero for _ in range(n)] for _ in range(n)]
    fact = 1
    for power in range(n + 1):
        coeff = Fraction(1, fact)
        for i in range(n):
            for j in range(n):
                if Nk[i][j]:
                    exp_n[i][j] = exp_n[i][j] + ExpPolynomial.term(
                        Nk[i][j] * coeff, power, 0, (param,), param
                    )
        if power < n:
            Nk = _mat_mul_frac(N, Nk)
            if all(all(x == 0 for x in row) for row in Nk):
                break
            fact *= power + 1
    for lam, P in projectors.items():
        scale = ExpPolynomial.term(1, 0, lam, (param,), param)
        PE = [
            [
                ExpPolynomial.term(P[i][j], 0, 0, (param,), param)
                if P[i][j] else zero
                for j in range(n)
            ]
            for i in range(n)
        ]
        block = mat_mul(PE, exp_n)
        for i in range(n):
            for j in range(n):
                result[i][j] = result[i][j] + scale * block[i][j]
    return [tuple(row) for row in result]


def _poly_power(p, m):
    out = [Fraction(1)]
    for _ in range(m):
        out = _poly_mul(out, p)
    return out


def _poly_of_matrix(p, A):
    n = len(A)
    out = [[Fraction(0)] * n for _ in range(n)]
    Ak = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for coeff in p:
        if coeff:
            for i in range(n):
                for j in range(n):
                    out[i][j] += coeff * Ak[i][j]
        Ak = _mat_mul_frac(A, Ak)
    return out


def mat_mul(A, B):
    """Product of ExpPolynomial matrices."""
    n = len(A)
    m = len(B[0])
    inner = len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(inner):
                term = A[i][t] * B[t][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(tuple(row))
    return out


def mat_apply_row(vec, M):
    """Row vector times matrix; entries may be Fractions or ExpPolynomials."""
    n = len(M)
    out = []
    for j in range(len(M[0])):
        acc = None
        for i in range(n):
            term = M[i][j] * vec[i] if isinstance(M[i][j], ExpPolynomial) else (
                vec[i] * M[i][j]
            )
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


def ad_matrix(L, a):
    """Matrix of ad(sum a_i e_i): column j = [a, e_j] in coordinates."""
    return L.ad(tuple(Fraction(x) for x in a))


def ad_exp(L, i, param=EPS):
    """Adjoint matrix of exp(param * v_i), in the row convention.

    Row r holds the coordinates of Ad(exp(param v_i)) v_r, so a coordinate
    row vector transforms as a -> a . M.  Computed from the Lie series
    Ad(exp(t v_i)) v_j = v_j - t [v_i, v_j] + t^2/2 [v_i,[v_i,v_j]] - ...
    Results are cached on the algebra (it, and they, are immutable).
    """
    cache = getattr(L, "_ad_exp_cache", None)
    if cache is None:
        cache = {}
        setattr(L, "_ad_exp_cache", cache)
    key = (i, param)
    if key not in cache:
        e_i = [Fraction(0)] * L.n
        e_i[i] = Fraction(1)
        ad = L.ad(e_i)
        neg = [[-x for x in row] for row in ad]
        col = matrix_exp(neg, param)  # column convention: image of e_j in column j
        cache[key] = [tuple(col[j][r] for j in range(L.n)) for r in range(L.n)]
    return cache[key]


# ---------------------------------------------------------------------------
# Flows of affine vector fields
# ---------------------------------------------------------------------------

class FlowMap:
    """Affine map z -> M z + c with ExpPolynomial entries.

    Rows and columns are indexed by the base coordinates of the jet space.
    """

    def __init__(self, coords, matrix, translation):
        self.coords = tuple(coords)
        self.matrix = [tuple(row) for row in matrix]
        self.translation = tuple(translation)

    def component(self, sym):
        """The image of coordinate `sym` as an expression-valued description."""
        i = self.coords.index(sym)
        return self.matrix[i], self.translation[i]

    def component_expression(self, sym, param_symbols):
        row, c = self.component(sym)
        total = c.to_expression(param_symbols)
        for z, entry in zip(self.coords, row):
            total = total + entry.to_expression(param_symbols) * z
        return expr.normalize(total)

    def substitute(self, param, value):
        return FlowMap(
            self.coords,
            [[e.substitute(param, value) for e in row] for row in self.matrix],
            [e.substitute(param, value) for e in self.translation],
        )

    def substitute_sum(self, param, parts):
        return FlowMap(
            self.coords,
            [[e.substitute_sum(param, parts) for e in row] for row in self.matrix],
            [e.substitute_sum(param, parts) for e in self.translation],
        )

    def __eq__(self, other):
        return (
            isinstance(other, FlowMap)
            and self.coords == other.coords
            and all(
                a == b
                for ra, rb in zip(self.matrix, other.matrix)
                for a, b in zip(ra, rb)
            )
            and all(a == b for a, b in zip(self.translation, other.translation))
        )

    def __str__(self):
        names = {}
        pieces = []
        for sym in self.coords:
            row, c = self.component(sym)
            parts = []
            if not c.is_zero():
                parts.append(str(c))
            for z, entry in zip(self.coords, row):
                if entry.is_zero():
                    continue
                body = str(entry)
                if body == "1":
                    parts.append(z.name)
                elif "+" in body or " - " in body:
                    parts.append(f"({body})*{z.name}")
                else:
                    parts.append(f"{body}*{z.name}")
            pieces.append(f"{sym.name} -> {' + '.join(parts) if parts else '0'}")
        return ", ".join(pieces)

    __repr__ = __str__


def flow(vf, param=EPS):
    """Exact flow of a vector field with affine rational coefficients.

    Solves dz/dt = A z + b as z(t) = exp(tA) z0 + (int_0^t exp(sA) ds) b.
    """
    coords = vf.coordinates
    n = len(coords)
    A = []
    b = []
    zero_subs = {z: ZERO for z in coords}
    for coeff in vf.coefficients:
        row = []
        for z in coords:
            d = expr.diff(coeff, z)
            val = expr.constant_value(d)
            if val is None:
                raise ValueError(
                    f"flow requires affine coefficients with rational slopes; got {coeff}"
                )
            row.append(val)
        const = expr.constant_value(expr.substitute(coeff, zero_subs))
        if const is None:
            raise ValueError(
                f"flow requires affine coefficients with rational constants; got {coeff}"
            )
        A.append(row)
        b.append(const)
    # check affineness exactly
    for coeff, row, const in zip(vf.coefficients, A, b):
        linear = expr.Rational(const)
        for z, a in zip(coords, row):
            linear = linear + expr.Rational(a) * z
        if not expr.equal(coeff, linear):
            raise ValueError(f"coefficient {coeff} is not affine in the base variables")
    E = matrix_exp(A, param)
    integrated = [[entry.integrate(param) for entry in row] for row in E]
    translation = []
    for i in range(n):
        acc = ExpPolynomial.constant(0, (param,))
        for j in range(n):
            if b[j]:
                acc = acc + integrated[i][j] * ExpPolynomial.constant(b[j], (param,))
        translation.append(acc)
    return FlowMap(coords, E, translation)


def compose(f, g):
    """Map composition f after g, exact in the ExpPolynomial ring."""
    if f.coords != g.coords:
        raise ValueError("flow maps live on different coordinate systems")
    matrix = mat_mul(f.matrix, g.matrix)
    translation = []
    for i in range(len(f.coords)):
        acc = f.translation[i]
        for j in range(len(f.coords)):
            acc = acc + f.matrix[i][j] * g.translation[j]
        translation.append(acc)
    return FlowMap(f.coords, matrix, translation)


def identity_flow(coords, params=(EPS,)):
    zero = ExpPolynomial.constant(0, params)
    one = ExpPolynomial.constant(1, params)
    n = len(coords)
    return FlowMap(
        coords,
        [[one if i == j else zero for j in range(n)] for i in range(n)],
        [zero] * n,
    )


def transform_solution(flow_map, space, function_names=("f", "g", "h")):
    """New solution functions produced by a flow, in the baseline orientation.

    The arguments of each solution function are pushed forward through the
    flow; each dependent value is rescaled by the inverse of its linear
    coefficient while translation parts are kept forward, so e.g. a flow
    scaling u by e^t transforms u = f(x, y) into e^(-t) f(x e^t, y).
    """
    coords = flow_map.coords
    p = space.p
    names = list(function_names) + [
        f"F{k + 1}" for k in range(len(function_names), space.q)
    ]
    group_syms = {
        name: Symbol(name, GROUP)
        for entry in flow_map.matrix for e in entry for name in e.params
    }
    for e in flow_map.translation:
        for name in e.params:
            group_syms.setdefault(name, Symbol(name, GROUP))
    # forward-transformed independent arguments
    args = []
    for i, z in enumerate(space.independent):
        row, c = flow_map.component(z)
        for j in range(p, len(coords)):
            if not row[j].is_zero():
                raise ValueError(
                    "independent coordinates must transform among themselves"
                )
        args.append(flow_map.component_expression(z, group_syms))
    out = {}
    for a, dep in enumerate(space.dependent):
        row, c = flow_map.component(dep)
        idx = coords.index(dep)
        for j, entry in enumerate(row):
            if j != idx and not entry.is_zero():
                raise ValueError(
                    f"dependent coordinate {dep.name} mixes with other coordinates; "
                    "no diagonal solution transform exists"
                )
        lam = row[idx]
        lam_inv = _invert_monomial_exp(lam)
        func = expr.FunctionApplication(names[a], tuple(args))
        value = lam_inv.to_expression(group_syms) * func + c.to_expression(group_syms)
        out[dep] = expr.normalize(value)
    return out


def _invert_monomial_exp(e):
    if len(e.terms) != 1:
        raise ValueError(f"cannot invert non-monomial coefficient {e}")
    (key, c), = e.terms.items()
    r, ms, ks = key
    if any(ms) or r != 0:
        raise ValueError(f"cannot invert polynomial coefficient {e}")
    return ExpPolynomial(e.params, {(r, ms, tuple(-k for k in ks)): Fraction(1) / c})
