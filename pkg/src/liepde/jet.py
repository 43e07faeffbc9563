"""Jet-space model of a PDE system: total derivatives and reduction.

A jet space enumerates derivative coordinates u^a_J for each dependent
variable up to a maximum order (with a little slack so prolongation can
raise the order).  A PDE system additionally carries a solved form: an
orientation of each equation as "leading coordinate = right-hand side",
which drives reduction modulo the system.
"""

from __future__ import annotations

import itertools

from . import expr
from .errors import IllPosedSystemError, OrderLimitError
from .expr import DEPENDENT, INDEPENDENT, JET, Symbol

_REDUCTION_PASS_LIMIT = 500


def _multi_name(dep, independent, multi):
    suffix = "".join(ind.name * c for ind, c in zip(independent, multi))
    return f"{dep.name}_{suffix}" if suffix else dep.name


class JetSpace:
    """Independent/dependent variables plus derivative coordinates.

    `max_order` is the declared order of the system; coordinates up to
    `max_order + slack` can be created on demand (prolongation and
    reduction need a couple of extra orders).
    """

    def __init__(self, independent, dependent, max_order, slack=2):
        self.independent = tuple(independent)
        self.dependent = tuple(dependent)
        if not self.independent or not self.dependent:
            raise ValueError("need at least one independent and one dependent variable")
        for s in self.independent:
            if s.role != INDEPENDENT:
                raise ValueError(f"{s.name} is not an independent-variable symbol")
        for s in self.dependent:
            if s.role != DEPENDENT:
                raise ValueError(f"{s.name} is not a dependent-variable symbol")
        if max_order < 1:
            raise ValueError("maximum derivative order must be at least 1")
        self.max_order = max_order
        self.limit = max_order + slack
        self._dep_index = {s.name: i for i, s in enumerate(self.dependent)}

    @property
    def p(self):
        return len(self.independent)

    @property
    def q(self):
        return len(self.dependent)

    def coordinate(self, dep, multi):
        """The jet symbol u^dep_multi; the dependent symbol itself at order 0."""
        if isinstance(dep, int):
            dep = self.dependent[dep]
        multi = tuple(multi)
        if len(multi) != self.p or any(c < 0 for c in multi):
            raise ValueError(f"bad multi-index {multi}")
        order = sum(multi)
        if order == 0:
            return dep
        if order > self.limit:
            raise OrderLimitError(
                f"derivative order {order} exceeds the configured limit {self.limit}"
            )
        return Symbol(
            _multi_name(dep, self.independent, multi), JET, base=dep.name, multi=multi
        )

    def lift(self, sym, i):
        """The coordinate obtained by one more derivative in direction i."""
        if sym.role == DEPENDENT:
            multi = [0] * self.p
        elif sym.role == JET:
            multi = list(sym.multi)
        else:
            raise ValueError(f"{sym.name} is not a jet coordinate")
        multi[i] += 1
        dep = self.dependent[self._dep_index[sym.base]]
        return self.coordinate(dep, multi)

    def multi_indices(self, order):
        """All multi-indices of exactly the given order, graded-lex sorted."""
        out = []
        for combo in itertools.combinations_with_replacement(range(self.p), order):
            multi = [0] * self.p
            for i in combo:
                multi[i] += 1
            out.append(tuple(multi))
        return sorted(out, reverse=True)

    def coordinates(self, max_order, min_order=0):
        """Jet symbols of all dependents, orders min_order..max_order."""
        out = []
        for order in range(min_order, max_order + 1):
            for multi in self.multi_indices(order):
                for dep in self.dependent:
                    out.append(self.coordinate(dep, multi))
        return out

    def jet_symbols_in(self, e):
        """Dependent and jet symbols occurring in an expression."""
        return {
            s for s in expr.free_symbols(e) if s.role in (DEPENDENT, JET)
        }


def total_derivative(e, i, js):
    """Total derivative D_i: d/dx_i plus the chain through all jet coordinates."""
    if isinstance(i, Symbol):
        i = js.independent.index(i)
    result = expr.diff(e, js.independent[i])
    for s in sorted(js.jet_symbols_in(e), key=lambda s: s._key):
        partial = expr.diff(e, s)
        if expr.is_zero(partial):
            continue
        result = result + js.lift(s, i) * partial
    return expr.normalize(result)


def total_derivative_multi(e, multi, js):
    for i, count in enumerate(multi):
        for _ in range(count):
            e = total_derivative(e, i, js)
    return e


class PDESystem:
    """A polynomial PDE system with an explicit solved form.

    `solved` is an ordered tuple of (leading jet coordinate, right-hand
    side); reduction replaces every occurrence of a leading coordinate or
    of any of its total-derivative consequences until none remain.
    """

    def __init__(self, space, equations, solved, parameters=(), validate=True):
        self.space = space
        self.equations = tuple(expr.normalize(e) for e in equations)
        self.solved = tuple((lead, expr.normalize(rhs)) for lead, rhs in solved)
        self.parameters = tuple(parameters)
        self._derived_cache = {}
        if validate:
            self._validate()

    def _validate(self):
        for lead, rhs in self.solved:
            reduced = self.reduce(rhs)
            for s in self.space.jet_symbols_in(reduced):
                if self._matching_rule(s) is not None:
                    raise IllPosedSystemError(
                        f"solved form for {lead.name} still contains the "
                        f"leading coordinate {s.name} after reduction"
                    )
        for eq in self.equations:
            if not expr.is_zero(self.reduce(eq)):
                raise IllPosedSystemError(
                    f"equation {eq} does not reduce to zero under the solved form"
                )

    def _matching_rule(self, s):
        """Index of a solved rule whose lead divides the coordinate s."""
        if s.role not in (DEPENDENT, JET):
            return None
        smulti = s.multi if s.role == JET else (0,) * self.space.p
        for idx, (lead, _) in enumerate(self.solved):
            if lead.base != s.base:
                continue
            lmulti = lead.multi if lead.role == JET else (0,) * self.space.p
            if all(a >= b for a, b in zip(smulti, lmulti)):
                return idx
        return None

    def _derived_rhs(self, rule_idx, extra):
        key = (rule_idx, extra)
        if key not in self._derived_cache:
            _, rhs = self.solved[rule_idx]
            self._derived_cache[key] = total_derivative_multi(rhs, extra, self.space)
        return self._derived_cache[key]

    def reduce(self, e):
        """Normal form of `e` modulo the system (no leading coordinates left)."""
        e = expr.normalize(e)
        for _ in range(_REDUCTION_PASS_LIMIT):
            candidates = []
            for s in self.space.jet_symbols_in(e):
                idx = self._matching_rule(s)
                if idx is not None:
                    candidates.append((s, idx))
            if not candidates:
                return e
            # Rewrite the highest coordinate first (graded order) so each pass
            # makes strict progress.
            s, idx = max(candidates, key=lambda c: c[0]._key)
            lead, _ = self.solved[idx]
            lmulti = lead.multi if lead.role == JET else (0,) * self.space.p
            smulti = s.multi if s.role == JET else (0,) * self.space.p
            extra = tuple(a - b for a, b in zip(smulti, lmulti))
            e = expr.substitute(e, {s: self._derived_rhs(idx, extra)})
        raise IllPosedSystemError("reduction did not terminate; rules may cycle")
