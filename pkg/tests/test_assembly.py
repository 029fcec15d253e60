import math

import numpy as np
import pytest

from conftest import ADMISSIBLE_SPECS, make_colloc
from kansa_collocation import problems
from kansa_collocation.assembly import (
    assemble_matrix,
    assemble_rhs,
    assemble_system,
    bordered_matrix,
    evaluate_solution,
)
from kansa_collocation.exceptions import DimensionMismatchError, DuplicatePointError, NonFiniteValueError
from kansa_collocation.geometry import Ball, CollocationSet
from kansa_collocation.kernels import KernelSpec, ell, ell0, kernel_matrix, phi
from kansa_collocation.linalg import det_sign_logabs, lu_solve
from kansa_collocation.models import Coefficients
from kansa_collocation.problems import PoissonProblem


class TestAssembleMatrix:
    def test_single_interior_single_boundary_gaussian(self, gaussian):
        colloc = CollocationSet(np.array([[0.5, 0.5]]), np.array([[0.0, 0.0]]))
        matrix = assemble_matrix(gaussian, colloc).matrix
        expected = [[-4.0, -2.0 * math.exp(-0.5)], [math.exp(-0.5), 1.0]]
        np.testing.assert_allclose(matrix, expected, rtol=1e-14)

    def test_no_interior_points_gives_interpolation_matrix(self, unit_square, gaussian):
        colloc = make_colloc(unit_square, 0, 12)
        system = assemble_matrix(gaussian, colloc)
        np.testing.assert_array_equal(system.matrix, kernel_matrix(gaussian, colloc.boundary, colloc.boundary))
        np.testing.assert_array_equal(system.rhs, np.zeros(12))

    @pytest.mark.parametrize("spec", ADMISSIBLE_SPECS, ids=lambda s: s.label)
    @pytest.mark.parametrize("seed", range(5))
    def test_block_structure(self, unit_square, spec, seed):
        colloc = make_colloc(unit_square, 9, 8, seed=seed)
        system = assemble_matrix(spec, colloc)
        assert system.matrix.shape == (17, 17)
        pde, boundary = system.pde_block, system.boundary_block
        np.testing.assert_allclose(pde, pde.T, rtol=1e-14, atol=0.0)
        np.testing.assert_allclose(boundary, boundary.T, rtol=1e-14, atol=0.0)
        np.testing.assert_allclose(np.diag(pde), spec.epsilon**2 * ell0(spec, 2), rtol=1e-14)
        np.testing.assert_allclose(np.diag(boundary), 1.0, rtol=1e-14)

    def test_entries_follow_row_and_column_roles(self, unit_square):
        spec = KernelSpec(family="gimq", beta=-1.0, epsilon=2.0)
        colloc = make_colloc(unit_square, 3, 4, seed=2)
        matrix = assemble_matrix(spec, colloc).matrix
        p, q = colloc.interior[1], colloc.boundary[2]
        assert matrix[1, 3 + 2] == pytest.approx(4.0 * ell(spec, 2, np.linalg.norm(p - q)), rel=1e-14)
        assert matrix[3 + 2, 1] == pytest.approx(phi(spec, np.linalg.norm(p - q)), rel=1e-14)

    def test_three_dimensional_ball(self):
        ball = Ball((0.0, 0.0, 0.0), 1.0)
        spec = KernelSpec(family="matern", nu=2.5, epsilon=2.0)
        system = assemble_matrix(spec, make_colloc(ball, 6, 10, seed=1))
        assert system.matrix.shape == (16, 16)
        assert np.all(np.isfinite(system.matrix))


class TestAssembleRhs:
    def test_constant_boundary_data(self, unit_square):
        colloc = make_colloc(unit_square, 2, 3)
        rhs = assemble_rhs(problems.constant(unit_square, 1.0), colloc)
        np.testing.assert_array_equal(rhs, [0.0, 0.0, 1.0, 1.0, 1.0])

    def test_manufactured_sine(self, unit_square):
        colloc = make_colloc(unit_square, 5, 8)
        problem = problems.manufactured_sine(unit_square)
        rhs = assemble_rhs(problem, colloc)
        np.testing.assert_allclose(rhs[:5], -2 * math.pi**2 * problem.exact(colloc.interior))
        np.testing.assert_allclose(rhs[5:], problem.exact(colloc.boundary))

    def test_boundary_only(self, unit_square):
        colloc = make_colloc(unit_square, 0, 4)
        rhs = assemble_rhs(problems.affine(unit_square, (1.0, 0.0)), colloc)
        np.testing.assert_allclose(rhs, colloc.boundary[:, 0])

    def test_non_finite_data_rejected(self, unit_square):
        problem = PoissonProblem(unit_square, lambda p: np.full(len(p), np.nan), lambda p: np.zeros(len(p)))
        with pytest.raises(NonFiniteValueError, match=r"\[0, 1\]"):
            assemble_rhs(problem, make_colloc(unit_square, 2, 4))

    def test_dimension_mismatch(self, unit_square, unit_disk):
        ball = Ball((0.0, 0.0, 0.0), 1.0)
        with pytest.raises(DimensionMismatchError):
            assemble_rhs(problems.zero(ball), make_colloc(unit_disk, 2, 4))


class TestEvaluateSolution:
    def test_zero_coefficients(self, unit_square, gaussian):
        colloc = make_colloc(unit_square, 3, 4)
        coeffs = Coefficients(np.zeros(3), np.zeros(4))
        np.testing.assert_array_equal(evaluate_solution(gaussian, colloc, coeffs, np.random.rand(5, 2)), 0.0)

    def test_single_basis_function(self, gaussian):
        colloc = CollocationSet(np.empty((0, 2)), np.array([[0.0, 0.0]]))
        coeffs = Coefficients(np.empty(0), np.array([1.0]))
        assert evaluate_solution(gaussian, colloc, coeffs, np.array([0.0, 0.0])) == 1.0
        assert isinstance(evaluate_solution(gaussian, colloc, coeffs, np.array([0.0, 0.0])), float)

    def test_solution_reproduces_boundary_data(self, unit_square):
        spec = KernelSpec(family="gaussian", epsilon=4.0)
        problem = problems.manufactured_sine(unit_square)
        colloc = make_colloc(unit_square, 20, 16, seed=3)
        system = assemble_system(spec, problem, colloc)
        x, _, _ = lu_solve(system.matrix, system.rhs)
        coeffs = Coefficients.from_vector(x, colloc.n)
        values = evaluate_solution(spec, colloc, coeffs, colloc.boundary)
        np.testing.assert_allclose(values, problem.g(colloc.boundary), atol=1e-8)

    def test_coefficient_lengths_checked(self, unit_square, gaussian):
        colloc = make_colloc(unit_square, 3, 4)
        with pytest.raises(DimensionMismatchError):
            evaluate_solution(gaussian, colloc, Coefficients(np.zeros(2), np.zeros(4)), np.array([0.5, 0.5]))


class TestBorderedMatrix:
    @pytest.mark.parametrize("spec", ADMISSIBLE_SPECS, ids=lambda s: s.label)
    @pytest.mark.parametrize("seed", range(4))
    def test_determinant_matches_grown_matrix(self, unit_square, spec, seed):
        colloc = make_colloc(unit_square, 6, 10, seed=seed)
        candidate = np.random.default_rng(100 + seed).uniform(0.05, 0.95, size=2)
        _, bordered_log = det_sign_logabs(bordered_matrix(spec, colloc, candidate))
        _, grown_log = det_sign_logabs(assemble_matrix(spec, colloc.append_interior(candidate)).matrix)
        assert bordered_log == pytest.approx(grown_log, abs=1e-8)

    def test_corner_and_border(self, unit_square, gaussian):
        colloc = make_colloc(unit_square, 2, 4)
        p = np.array([0.3, 0.6])
        bordered = bordered_matrix(gaussian, colloc, p)
        assert bordered.shape == (7, 7)
        assert bordered[6, 6] == -4.0
        grown = assemble_matrix(gaussian, colloc.append_interior(p)).matrix
        np.testing.assert_allclose(bordered[6, :6], grown[2, [0, 1, 3, 4, 5, 6]], rtol=1e-14)
        np.testing.assert_allclose(bordered[:6, 6], grown[[0, 1, 3, 4, 5, 6], 2], rtol=1e-14)

    def test_distant_candidate_decouples(self, unit_square):
        spec = KernelSpec(family="gimq", beta=-1.0, epsilon=1.0)
        colloc = make_colloc(unit_square, 3, 6)
        bordered = bordered_matrix(spec, colloc, np.array([100.5, 0.5]))
        nearest = 99.0
        bound = max(phi(spec, nearest), abs(ell(spec, 2, nearest)))
        assert np.all(np.abs(bordered[:-1, -1]) <= bound)
        assert np.all(np.abs(bordered[-1, :-1]) <= bound)

    def test_permutation_of_interior_points_keeps_determinant(self, unit_square, gaussian):
        spec = gaussian.with_epsilon(4.0)
        colloc = make_colloc(unit_square, 7, 8, seed=6)
        shuffled = colloc.with_interior(colloc.interior[::-1])
        _, a = det_sign_logabs(assemble_matrix(spec, colloc).matrix)
        _, b = det_sign_logabs(assemble_matrix(spec, shuffled).matrix)
        assert a == pytest.approx(b, abs=1e-10)

    def test_duplicate_candidate_rejected(self, unit_square, gaussian):
        colloc = make_colloc(unit_square, 2, 4)
        with pytest.raises(DuplicatePointError):
            bordered_matrix(gaussian, colloc, colloc.boundary[1])
