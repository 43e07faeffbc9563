"""Adjoint-orbit normalization and verification of subalgebra tables.

The adjoint group of the algebra acts on coordinate row vectors through the
matrices of `adjoint.ad_exp`.  This module provides exact orbit steps
(nilpotent directions with rational parameters, scaling directions with
rational multipliers q = e^t), a deterministic greedy normal form for
one-dimensional subalgebras, and per-entry verification of proposed
optimal-system tables: closure, abelian/ideal flags, and conjugacy-invariant
fingerprints that expose coverage gaps mechanically.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg, structure
from .adjoint import EPS, ExpPolynomial, ad_exp, mat_apply_row


def adjoint_apply(L, i, epsilon, a):
    """Exact image of the coordinate row vector `a` under Ad(exp(eps v_i)).

    `epsilon` may be a Fraction (components stay exact, possibly with
    constant exponentials) or the string name of a symbolic parameter.
    Components of `a` may be rationals or ExpPolynomial values from an
    earlier step.
    """
    M = ad_exp(L, i, param=EPS)
    vec = [
        x if isinstance(x, ExpPolynomial) else ExpPolynomial.constant(x, (EPS,))
        for x in a
    ]
    image = mat_apply_row(vec, M)
    if isinstance(epsilon, str):
        if epsilon != EPS:
            image = tuple(e.substitute_sum(EPS, (epsilon,)) for e in image)
        return image
    return tuple(e.substitute(EPS, Fraction(epsilon)) for e in image)


def _scaling_multiplier_apply(L, i, q, a):
    """Apply Ad(exp(t v_i)) with e^t = q (rational, positive), exactly.

    Only valid when the adjoint matrix of v_i is diagonal with integer
    exponents; components transform by integer powers of q.
    """
    exps = _diagonal_exponents(L, i)
    return tuple(x * q ** k for x, k in zip(a, exps))


def _diagonal_exponents(L, i):
    M = ad_exp(L, i, param=EPS)
    n = L.n
    exps = []
    for r in range(n):
        for c in range(n):
            if r != c and not M[r][c].is_zero():
                raise ValueError(f"adjoint matrix of direction {i} is not diagonal")
        (key, coeff), = M[r][r].terms.items()
        _, ms, ks = key
        if any(ms) or coeff != 1:
            raise ValueError(f"adjoint matrix of direction {i} is not a pure scaling")
        k = ks[0]
        if k.denominator != 1:
            raise ValueError("non-integer scaling exponent")
        exps.append(int(k))
    return exps


def invariant_components(L):
    """Indices whose component is fixed by every adjoint action."""
    out = []
    for j in range(L.n):
        fixed = True
        for i in range(L.n):
            M = ad_exp(L, i, param=EPS)
            for r in range(L.n):
                expected = ExpPolynomial.constant(1 if r == j else 0, (EPS,))
                if M[r][j] != expected:
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            out.append(j)
    return tuple(out)


def classify_directions(L):
    """(nilpotent indices, diagonal-scaling indices) of the basis adjoints."""
    nilpotent = []
    scaling = []
    for i in range(L.n):
        e_i = [Fraction(0)] * L.n
        e_i[i] = Fraction(1)
        ad = L.ad(e_i)
        if _is_nilpotent_matrix(ad):
            if any(any(row) for row in ad):
                nilpotent.append(i)
            continue
        try:
            _diagonal_exponents(L, i)
        except ValueError:
            continue
        scaling.append(i)
    return tuple(nilpotent), tuple(scaling)


def _is_nilpotent_matrix(A):
    n = len(A)
    M = [list(row) for row in A]
    for _ in range(n):
        if all(all(x == 0 for x in row) for row in M):
            return True
        M = [
            [sum((M[i][t] * A[t][j] for t in range(n)), Fraction(0)) for j in range(n)]
            for i in range(n)
        ]
    return all(all(x == 0 for x in row) for row in M)


class OrbitStep:
    """One recorded adjoint action.

    kind 'translate': parameter is the exact epsilon of a nilpotent
    direction.  kind 'scale': parameter is the exact rational multiplier
    q = e^epsilon of a diagonal scaling direction.
    """

    def __init__(self, kind, index, parameter, before, after):
        self.kind = kind
        self.index = index
        self.parameter = parameter
        self.before = tuple(before)
        self.after = tuple(after)

    def replay(self, L, a):
        if self.kind == "translate":
            image = adjoint_apply(L, self.index, self.parameter, a)
            out = []
            for e in image:
                v = e.rational_value()
                if v is None:
                    raise ValueError("translate step left a non-rational component")
                out.append(v)
            return tuple(out)
        return _scaling_multiplier_apply(L, self.index, self.parameter, a)

    def describe(self, L):
        if self.kind == "translate":
            return f"Ad(exp({self.parameter} {L.labels[self.index]}))"
        return f"Ad(exp(t {L.labels[self.index]})) with e^t = {self.parameter}"


class NormalFormReport:
    """Input, normalized output, recorded steps, and the invariant fingerprint."""

    def __init__(self, input_vector, output_vector, steps, negated, fingerprint_indices):
        self.input = tuple(input_vector)
        self.output = tuple(output_vector)
        self.steps = tuple(steps)
        self.negated = negated
        self.fingerprint_indices = tuple(fingerprint_indices)

    def fingerprint(self, vector=None):
        v = self.input if vector is None else vector
        return tuple(v[j] for j in self.fingerprint_indices)

    def replay(self, L):
        v = self.input
        for step in self.steps:
            v = step.replay(L, v)
        if self.negated:
            v = tuple(-x for x in v)
        return v


def _power_free_multiplier(value, k):
    """Largest rational q > 0 with q^|k| dividing |value| exactly.

    Used to shrink a component a -> a / q^|k| toward its |k|-th-power-free
    part; q = |a|^(1/|k|) exactly when |a| is a perfect |k|-th power.
    """
    k = abs(k)
    num = _int_power_part(abs(value.numerator), k)
    den = _int_power_part(value.denominator, k)
    return Fraction(num, den)


def _int_power_part(n, k):
    if n in (0, 1):
        return max(n, 1)
    out = 1
    d = 2
    while d * d <= n:
        count = 0
        while n % d == 0:
            n //= d
            count += 1
        out *= d ** (count // k)
        d += 1
    if n > 1:
        out *= n ** (1 // k)
    return out


def normal_form_1d(L, a):
    """Deterministic greedy adjoint normalization of a nonzero vector.

    Nilpotent directions zero their own component whenever the linear
    elimination coefficient is nonzero; diagonal scalings then shrink each
    remaining free component to its power-free canonical magnitude (+-1
    whenever the magnitude is a perfect power); finally the sign is fixed
    when no adjoint-invariant component pins it.
    """
    a = tuple(Fraction(x) for x in a)
    if all(x == 0 for x in a):
        raise ValueError("normal form of the zero vector is undefined")
    inv = invariant_components(L)
    nilpotent, scalings = classify_directions(L)
    steps = []
    current = a
    for i in nilpotent:
        if i in inv or current[i] == 0:
            continue
        image = adjoint_apply(L, i, EPS, current)
        comp = image[i]
        # component must be affine in eps: a_i + c*eps
        c = comp.derivative(EPS)
        if not all(k == (Fraction(0), (0,), (Fraction(0),)) for k in c.terms):
            continue
        cval = c.rational_value()
        if cval is None or cval == 0:
            continue
        epsilon = -current[i] / cval
        after = OrbitStep("translate", i, epsilon, current, ()).replay(L, current)
        steps.append(OrbitStep("translate", i, epsilon, current, after))
        current = after
    # Sweep the scaling directions to a fixpoint: each direction shrinks its
    # first eligible component to power-free magnitude; a step by one
    # direction can disturb another's component, so sweep until stable.
    for _ in range(50):
        changed = False
        for i in scalings:
            exps = _diagonal_exponents(L, i)
            target = next(
                (
                    j
                    for j in range(L.n)
                    if j not in inv and current[j] != 0 and exps[j] != 0
                ),
                None,
            )
            if target is None:
                continue
            k = exps[target]
            q = _power_free_multiplier(current[target], k)
            if k > 0:
                q = Fraction(1) / q
            if q != 1:
                after = _scaling_multiplier_apply(L, i, q, current)
                steps.append(OrbitStep("scale", i, q, current, after))
                current = after
                changed = True
        if not changed:
            break
    negated = False
    if all(current[j] == 0 for j in inv):
        first = next((x for x in current if x != 0), Fraction(1))
        if first < 0:
            negated = True
            current = tuple(-x for x in current)
    return NormalFormReport(a, current, steps, negated, inv)


class OptimalTableEntry:
    """Verification result for one proposed subalgebra."""

    def __init__(self, label, vectors, closed, offending, dim, abelian, ideal,
                 derived_intersection_dim, invariant_signature):
        self.label = label
        self.vectors = vectors
        self.closed = closed
        self.offending = offending
        self.dim = dim
        self.abelian = abelian
        self.ideal = ideal
        self.derived_intersection_dim = derived_intersection_dim
        self.invariant_signature = invariant_signature


def verify_optimal_table(L, entries):
    """Check every proposed subalgebra and compute conjugacy fingerprints.

    `entries` is a list of (label, vectors).  The fingerprint couples the
    dimension of the intersection with the derived algebra with the span of
    the adjoint-invariant components; entries of equal dimension and equal
    fingerprints are flagged as not mutually distinguishable.
    """
    derived = structure.product_space(L, L.whole(), L.whole())
    inv = invariant_components(L)
    results = []
    for label, vectors in entries:
        S = L.subspace(vectors)
        closed = structure.subalgebra_check(L, S)
        offending = None
        if not closed:
            for a in S.basis:
                for b in S.basis:
                    if not S.contains(L.bracket_coords(a, b)):
                        offending = (a, b)
                        break
                if offending:
                    break
        inter = _intersection_dim(L, S, derived)
        sig = _invariant_signature(L, S, inv)
        results.append(
            OptimalTableEntry(
                label, [tuple(Fraction(x) for x in v) for v in vectors],
                closed, offending, S.dim,
                structure.is_abelian(L, S), structure.is_ideal(L, S),
                inter, sig,
            )
        )
    collisions = []
    by_key = {}
    for r in results:
        key = (r.dim, r.derived_intersection_dim, r.invariant_signature)
        by_key.setdefault(key, []).append(r.label)
    for key, labels in sorted(by_key.items()):
        if len(labels) > 1:
            collisions.append(labels)
    return results, collisions


def _intersection_dim(L, S, T):
    # dim(S cap T) = dim S + dim T - dim(S + T)
    union = L.subspace(list(S.basis) + list(T.basis))
    return S.dim + T.dim - union.dim


def _invariant_signature(L, S, inv):
    """RREF of the subalgebra's projection onto the invariant components."""
    rows = [tuple(v[j] for j in inv) for v in S.basis]
    reduced, _ = linalg.rref(rows)
    return tuple(reduced)


def coverage_gaps(L, representatives, probes=None):
    """Probe directions the 1D representative list cannot reach.

    A representative can only be adjoint-conjugate (up to span scaling) to a
    vector with a proportional invariant-component signature; probes whose
    signature is proportional to no representative's are reported.
    """
    inv = invariant_components(L)
    if probes is None:
        probes = []
        for j in range(L.n):
            e = [Fraction(0)] * L.n
            e[j] = Fraction(1)
            probes.append((L.labels[j], tuple(e)))
    rep_sigs = []
    for vec in representatives:
        rep_sigs.append(tuple(Fraction(vec[j]) for j in inv))
    gaps = []
    for label, probe in probes:
        sig = tuple(Fraction(probe[j]) for j in inv)
        if all(x == 0 for x in sig):
            covered = any(all(x == 0 for x in rs) for rs in rep_sigs)
        else:
            covered = any(_proportional(sig, rs) for rs in rep_sigs)
        if not covered:
            gaps.append(label)
    return gaps


def _proportional(a, b):
    if all(x == 0 for x in b):
        return False
    ratio = None
    for x, y in zip(a, b):
        if y == 0:
            if x != 0:
                return False
            continue
        r = Fraction(x) / Fraction(y)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return ratio is not None and ratio != 0
