from liepde import expr
from liepde.expr import DEPENDENT, INDEPENDENT, Symbol
from liepde.jet import JetSpace, PDESystem
from liepde.prolongation import (
    build_determining,
    solve_determining,
    span_contains,
    symmetry_residual,
)
from liepde.reference import extra_generator, generators


class TestBuildDetermining:
    def test_unknown_count_forced_by_ansatz(self, golden):
        # 5 coefficient functions x 6 affine monomials in (x, y, u, v, p)
        _, system, _ = golden
        ds = build_determining(system, 1)
        assert len(ds.ansatz.unknowns) == 30

    def test_equations_are_linear_homogeneous(self, golden):
        _, system, _ = golden
        ds = build_determining(system, 1)
        assert ds.raw_count >= ds.deduped_count > 0
        unknowns = set(ds.ansatz.unknowns)
        for form in ds.equations:
            assert form
            for sym, coeff in form.items():
                assert sym in unknowns
                assert not (expr.free_symbols(coeff) & unknowns)

    def test_degree_zero_counts(self, golden):
        _, system, _ = golden
        ds = build_determining(system, 0)
        assert len(ds.ansatz.unknowns) == 5


class TestSolveDetermining:
    def test_degree_one_span_contains_reference_generators(
        self, golden, symmetry_basis
    ):
        _, system, gens = golden
        for vf in gens:
            assert span_contains(symmetry_basis, vf, system)

    def test_degree_one_span_contains_extra_field(self, golden, symmetry_basis):
        space, system, _ = golden
        assert span_contains(symmetry_basis, extra_generator(space), system)

    def test_dimension_reported(self, golden, symmetry_basis):
        # the exact degree-1 dimension; the baseline count is 5 and the
        # delta is carried as a pipeline note, not forced here
        assert len(symmetry_basis) == 6

    def test_every_solution_has_zero_residual(self, golden, symmetry_basis):
        _, system, _ = golden
        for vf in symmetry_basis:
            assert all(expr.is_zero(r) for r in symmetry_residual(vf, system))

    def test_xi1_depends_linearly_on_x_only(self, golden, symmetry_basis):
        # every solved field has xi_1 = a + b*x
        space, system, _ = golden
        x = space.independent[0]
        others = [s for s in space.independent + space.dependent if s != x]
        for vf in symmetry_basis:
            xi1 = vf.xi[0]
            for s in others:
                assert expr.is_zero(expr.diff(xi1, s))
            assert expr.is_zero(expr.diff(expr.diff(xi1, x), x))

    def test_degree_zero_gives_translations(self, golden):
        space, system, _ = golden
        basis = solve_determining(build_determining(system, 0))
        assert len(basis) == 3
        gens = generators(space)
        for vf in gens[:3]:
            assert span_contains(basis, vf, system)

    def test_single_equation_system_self_consistency(self):
        # u_x = 0 in two independent variables: every returned field has
        # zero residual (the self-check contract)
        x = Symbol("x", INDEPENDENT)
        y = Symbol("y", INDEPENDENT)
        u = Symbol("u", DEPENDENT)
        space = JetSpace((x, y), (u,), 1)
        ux = space.coordinate(u, (1, 0))
        system = PDESystem(space, (ux,), ((ux, expr.ZERO),))
        basis = solve_determining(build_determining(system, 1))
        assert basis
        for vf in basis:
            assert all(expr.is_zero(r) for r in symmetry_residual(vf, system))
