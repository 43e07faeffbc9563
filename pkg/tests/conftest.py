import random
from fractions import Fraction

import pytest

from liepde import expr, reference, structure
from liepde.fields import VectorField


@pytest.fixture(scope="session")
def golden():
    """Jet space, PDE system, and reference generators of the golden fixture."""
    space, system = reference.fixture_system()
    gens = reference.generators(space)
    return space, system, gens


@pytest.fixture(scope="session")
def algebra(golden):
    space, _, gens = golden
    return structure.structure_constants(
        gens, labels=[f"v{i + 1}" for i in range(5)]
    )


@pytest.fixture(scope="session")
def symmetry_basis(golden):
    from liepde.prolongation import build_determining, solve_determining

    _, system, _ = golden
    return solve_determining(build_determining(system, 1))


def random_expression(rng, symbols, depth=3):
    """Random expression tree over the given symbols, small exact coefficients."""
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return expr.Rational(rng.randint(-4, 4))
        if kind == 1:
            return expr.Rational(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
        return rng.choice(symbols)
    kind = rng.randrange(4)
    if kind == 0:
        return random_expression(rng, symbols, depth - 1) + random_expression(
            rng, symbols, depth - 1
        )
    if kind == 1:
        return random_expression(rng, symbols, depth - 1) * random_expression(
            rng, symbols, depth - 1
        )
    if kind == 2:
        return random_expression(rng, symbols, depth - 1) - random_expression(
            rng, symbols, depth - 1
        )
    return expr.Power(random_expression(rng, symbols, depth - 1), rng.randint(0, 2))


def random_affine_field(rng, space):
    """Random vector field with affine coefficients over the base variables."""
    base = space.independent + space.dependent
    coeffs = []
    for _ in range(space.p + space.q):
        c = expr.Rational(rng.randint(-3, 3))
        for sym in base:
            if rng.random() < 0.4:
                c = c + expr.Rational(rng.randint(-2, 2)) * sym
        coeffs.append(c)
    return VectorField(space, tuple(coeffs[: space.p]), tuple(coeffs[space.p:]))
