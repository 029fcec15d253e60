import numpy as np
import pytest

import kansa_collocation.harness.accuracy as accuracy
from conftest import ADMISSIBLE_SPECS, make_colloc
from kansa_collocation import problems
from kansa_collocation.assembly import assemble_matrix
from kansa_collocation.exceptions import ConfigurationError, DomainError, SingularMatrixError
from kansa_collocation.geometry import Ball, BoundaryStrategy, Box, Density, sample_interior
from kansa_collocation.harness import (
    NEAR_SINGULAR_RATIO,
    convergence_study,
    epsilon_sweep,
    farfield_gaps_decrease,
    farfield_limit_check,
    incremental_growth,
    interpolation_matrix_check,
    kernel_check,
    mc_unisolvence,
    median_rms,
    near_singular_search,
    relative_log_gap,
    run_parallel,
)
from kansa_collocation.kernels import KernelSpec, ell0
from kansa_collocation.linalg import det_sign_logabs, svd_extremes
from kansa_collocation.models import STATUS_CONFIG_ERROR, STATUS_SINGULAR, FarfieldRow

EQUISPACED = BoundaryStrategy.equispaced()
UNIFORM = Density.uniform()

GAUSSIAN_WIDE = KernelSpec(family="gaussian", epsilon=4.0)
FARFIELD_SPECS = [
    KernelSpec(family="gaussian", epsilon=3.0),
    KernelSpec(family="gimq", beta=-1.0, epsilon=3.0),
    KernelSpec(family="matern", nu=2.5, epsilon=3.0),
]


class TestMcUnisolvence:
    def test_boundary_only_trials_are_identical(self, unit_square):
        summary, records = mc_unisolvence(GAUSSIAN_WIDE, unit_square, UNIFORM, 16, EQUISPACED, 0, 10, seed0=1)
        assert summary.trials == 10 and summary.failures == 0
        assert {r.log_abs_det for r in records} == {records[0].log_abs_det}
        assert all(r.det_sign == 1 for r in records)

    def test_small_run_has_no_failures(self, unit_square):
        summary, records = mc_unisolvence(GAUSSIAN_WIDE, unit_square, UNIFORM, 16, EQUISPACED, 32, 50, seed0=42)
        assert summary.failures == 0
        assert [r.trial_index for r in records] == list(range(50))
        assert [r.seed for r in records] == [42 + t for t in range(50)]
        assert summary.min_sigma_min == min(r.sigma_min for r in records)
        assert summary.worst_trial.ratio == min(r.ratio for r in records)
        assert "failures=0" in summary.summary_line()

    def test_thread_count_does_not_change_results(self, unit_disk):
        args = (GAUSSIAN_WIDE, unit_disk, UNIFORM, 12, EQUISPACED, 10, 16)
        _, serial = mc_unisolvence(*args, seed0=3, threads=1)
        _, threaded = mc_unisolvence(*args, seed0=3, threads=4)
        assert [(r.trial_index, r.seed, r.sigma_min, r.log_abs_det) for r in serial] == [
            (r.trial_index, r.seed, r.sigma_min, r.log_abs_det) for r in threaded
        ]

    def test_duplicate_points_are_configuration_errors(self, unit_square):
        def duplicating_sampler(domain, density, n, seed):
            points = sample_interior(domain, density, n, seed)
            points[1] = points[0]
            return points

        summary, records = mc_unisolvence(
            GAUSSIAN_WIDE, unit_square, UNIFORM, 8, EQUISPACED, 4, 5, seed0=0, interior_sampler=duplicating_sampler
        )
        assert all(r.status == STATUS_CONFIG_ERROR for r in records)
        assert all("DuplicatePointError" in r.error for r in records)
        assert summary.failures == 0 and summary.config_errors == 5
        assert summary.worst_trial is None
        assert "config_errors=5" in summary.summary_line()

    def test_trials_must_be_positive(self, unit_square):
        with pytest.raises(DomainError):
            mc_unisolvence(GAUSSIAN_WIDE, unit_square, UNIFORM, 8, EQUISPACED, 4, 0, seed0=0)

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "spec, trials",
        [
            (KernelSpec(family="gaussian", epsilon=2.0), 1000),
            (KernelSpec(family="gimq", beta=-0.5, epsilon=1.0), 300),
            (KernelSpec(family="matern", nu=2.5, epsilon=3.0), 300),
        ],
        ids=lambda value: value.label if isinstance(value, KernelSpec) else str(value),
    )
    def test_no_singular_trials(self, unit_square, spec, trials):
        summary, _ = mc_unisolvence(spec, unit_square, UNIFORM, 16, EQUISPACED, 32, trials, seed0=42)
        assert summary.failures == 0, summary.summary_line()
        assert summary.config_errors == 0 and summary.errors == 0


class TestIncrementalGrowth:
    def test_bordered_identity_at_every_step(self, unit_square):
        spec = KernelSpec(family="gaussian", epsilon=6.0)
        records = incremental_growth(spec, unit_square, UNIFORM, 16, EQUISPACED, 14, seed=5)
        assert [r.n for r in records] == list(range(15))
        assert records[0].det_sign == 1
        assert np.isnan(records[0].bordered_log_gap)
        assert all(r.bordered_log_gap < 1e-8 for r in records[1:])
        assert not any(r.singular_flag for r in records)

    def test_bordered_gap_is_relative_to_the_log_magnitude(self, unit_square):
        spec = KernelSpec(family="matern", nu=2.5, epsilon=3.0)
        records = incremental_growth(spec, unit_square, UNIFORM, 16, BoundaryStrategy.random(11), 14, seed=11)
        assert all(r.ok for r in records)
        assert max(r.bordered_log_gap for r in records[1:]) < 1e-8

    def test_relative_log_gap(self):
        assert relative_log_gap(-100.0, -100.0 + 1e-7) == pytest.approx(1e-9)
        assert relative_log_gap(0.25, 0.25 + 1e-9) == pytest.approx(1e-9)
        assert relative_log_gap(-3.0, -3.0) == 0.0

    def test_steps_share_the_interior_stream(self, unit_square):
        spec = KernelSpec(family="gaussian", epsilon=6.0)
        records = incremental_growth(spec, unit_square, UNIFORM, 8, EQUISPACED, 5, seed=2)
        interior = sample_interior(unit_square, UNIFORM, 5, 2)
        np.testing.assert_array_equal(records[-1].points[:5], interior)
        np.testing.assert_array_equal(records[3].points[:3], interior[:3])

    def test_negative_size_rejected(self, unit_square):
        with pytest.raises(DomainError):
            incremental_growth(GAUSSIAN_WIDE, unit_square, UNIFORM, 8, EQUISPACED, -1, seed=0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_bordered_identity_suite(self, unit_square, seed):
        spec = [KernelSpec(family="gaussian", epsilon=6.0), KernelSpec(family="matern", nu=2.5, epsilon=3.0)][seed % 2]
        records = incremental_growth(spec, unit_square, UNIFORM, 16, BoundaryStrategy.random(seed), 14, seed=seed)
        assert all(r.ok and not r.singular_flag for r in records)
        assert max(r.bordered_log_gap for r in records[1:]) < 1e-8


class TestFarfield:
    @pytest.mark.parametrize("spec", FARFIELD_SPECS, ids=lambda s: s.label)
    def test_gap_vanishes_as_candidate_recedes(self, unit_square, spec):
        colloc = make_colloc(unit_square, 6, 8, seed=11)
        rows = farfield_limit_check(spec, colloc, [10.0, 20.0, 40.0])
        assert [row.radius for row in rows] == [10.0, 20.0, 40.0]
        assert rows[-1].relative_gap < 1e-6
        assert farfield_gaps_decrease(rows)
        assert rows[0].distance == pytest.approx(10.0 / spec.epsilon)

    def test_limit_is_corner_times_base_determinant(self, unit_square):
        spec = FARFIELD_SPECS[1]
        colloc = make_colloc(unit_square, 4, 8, seed=1)
        rows = farfield_limit_check(spec, colloc, [40.0])
        _, base = det_sign_logabs(assemble_matrix(spec, colloc).matrix)
        expected = np.log(spec.epsilon**2 * abs(ell0(spec, 2))) + base
        assert rows[0].limit_log_abs_det == pytest.approx(expected, abs=1e-12)
        assert rows[0].log_abs_det == pytest.approx(expected, abs=1e-5)

    def test_boundary_only_limit(self, unit_square):
        spec = FARFIELD_SPECS[2]
        colloc = make_colloc(unit_square, 0, 10)
        rows = farfield_limit_check(spec, colloc, [20.0, 40.0])
        assert rows[-1].relative_gap < 1e-12

    def test_radii_must_increase(self, unit_square):
        with pytest.raises(DomainError):
            farfield_limit_check(GAUSSIAN_WIDE, make_colloc(unit_square, 2, 4), [20.0, 10.0])

    def test_gap_sequence_rules(self):
        def rows(*gaps):
            return [FarfieldRow(1.0, 1.0, 0.0, 0.0, g) for g in gaps]

        assert farfield_gaps_decrease(rows(1e-3, 1e-6, 0.0, 0.0))
        assert not farfield_gaps_decrease(rows(1e-3, 1e-3))
        assert not farfield_gaps_decrease(rows(1e-6, 1e-3))


class TestConvergence:
    def test_zero_data_gives_zero_solution(self, unit_square):
        rows = convergence_study(GAUSSIAN_WIDE, problems.zero(unit_square), [(10, 12), (20, 16)], 50, seed=0)
        assert [(row.n, row.m, row.N) for row in rows] == [(10, 12, 22), (20, 16, 36)]
        assert all(row.ok and row.rms_error < 1e-12 for row in rows)

    def test_singular_solves_become_missing_rows(self, unit_square, monkeypatch):
        def singular(system):
            raise SingularMatrixError("pivot 3 is 0.000e+00, below the singularity threshold", pivot_index=3)

        monkeypatch.setattr(accuracy, "solve_system", singular)
        rows = convergence_study(GAUSSIAN_WIDE, problems.zero(unit_square), [(4, 8)], 10, seed=0)
        assert rows[0].status == STATUS_SINGULAR
        assert "pivot 3" in rows[0].reason
        assert np.isnan(rows[0].rms_error)
        assert np.isnan(median_rms(rows))

    def test_flagged_solves_are_recorded_without_errors(self, unit_square, monkeypatch):
        solve = accuracy.solve_system

        def flagged(system):
            report = solve(system)
            report.singular_flag = True
            return report

        monkeypatch.setattr(accuracy, "solve_system", flagged)
        rows = convergence_study(GAUSSIAN_WIDE, problems.manufactured_sine(unit_square), [(6, 8), (10, 12)], 20, seed=2)
        assert all(row.status == STATUS_SINGULAR for row in rows)
        assert all("sigma_min" in row.reason for row in rows)
        assert all(np.isnan(row.rms_error) and np.isnan(row.max_error) for row in rows)
        assert all(row.cond2 > 1.0 for row in rows)
        assert np.isnan(median_rms(rows))

    def test_flat_kernel_rows_are_singular(self, unit_square):
        rows = epsilon_sweep(
            KernelSpec(family="gaussian", epsilon=1.0), problems.manufactured_sine(unit_square), 30, 20, [0.05], seed=1
        )
        assert rows[0].status == STATUS_SINGULAR
        assert np.isnan(rows[0].rms_error)

    def test_schedule_must_not_shrink(self, unit_square):
        with pytest.raises(DomainError):
            convergence_study(GAUSSIAN_WIDE, problems.zero(unit_square), [(20, 16), (4, 8)], 10, seed=0)

    def test_exact_solution_required(self, unit_square):
        problem = problems.tabulated(unit_square, np.array([[0.0, 0.5], [1.0, 0.5]]), [0.0, 1.0])
        with pytest.raises(ConfigurationError):
            convergence_study(GAUSSIAN_WIDE, problem, [(4, 2)], 10, seed=0)

    def test_tabulated_boundary_points_are_used(self, unit_square):
        boundary = np.array([[0.0, 0.5], [1.0, 0.5], [0.5, 0.0], [0.5, 1.0]])
        problem = problems.tabulated(unit_square, boundary, [1.0, 1.0, 1.0, 1.0])
        problem.exact = problems.constant(unit_square, 1.0).exact
        rows = convergence_study(GAUSSIAN_WIDE, problem, [(6, 99)], 20, seed=0)
        assert rows[0].m == 4

    @pytest.mark.slow
    def test_manufactured_sine_error_drops_with_refinement(self, unit_square):
        spec = KernelSpec(family="gaussian", epsilon=6.0)
        problem = problems.manufactured_sine(unit_square)
        coarse, fine = [], []
        for seed in range(5):
            rows = convergence_study(spec, problem, [(8, 12), (160, 40)], 500, seed=seed)
            coarse.append(rows[0])
            fine.append(rows[1])
        assert all(row.ok for row in fine)
        assert median_rms(fine) * 10.0 <= median_rms(coarse)


class TestEpsilonSweep:
    def test_conditioning_improves_with_epsilon(self, unit_square):
        epsilons = list(np.geomspace(3.0, 30.0, 6))
        rows = epsilon_sweep(
            KernelSpec(family="gaussian", epsilon=1.0), problems.manufactured_sine(unit_square), 34, 16, epsilons, seed=4
        )
        assert [row.epsilon for row in rows] == epsilons
        assert {row.N for row in rows} == {50}
        conds = [row.cond2 for row in rows]
        inversions = sum(1 for a, b in zip(conds[:-1], conds[1:]) if b > a)
        assert inversions <= 1

    def test_large_epsilon_is_nearly_diagonal(self, unit_square):
        rows = epsilon_sweep(GAUSSIAN_WIDE, problems.manufactured_sine(unit_square), 10, 8, [1e3], seed=0)
        assert rows[0].cond2 == pytest.approx(4e6, rel=1e-6)

    def test_deterministic(self, unit_square):
        args = (GAUSSIAN_WIDE, problems.manufactured_sine(unit_square), 12, 12, [2.0, 4.0, 8.0])
        first = [row.to_row() for row in epsilon_sweep(*args, seed=9)]
        second = [row.to_row() for row in epsilon_sweep(*args, seed=9)]
        assert first == second

    def test_epsilons_must_be_sorted(self, unit_square):
        with pytest.raises(DomainError):
            epsilon_sweep(GAUSSIAN_WIDE, problems.zero(unit_square), 4, 8, [2.0, 1.0], seed=0)


class TestNearSingularSearch:
    def test_without_steps_returns_initial_configuration(self, unit_square):
        result = near_singular_search(GAUSSIAN_WIDE, unit_square, 12, 8, restarts=1, steps=0, seed=3)
        assert result.best is result.initial
        assert result.objective_history == [result.initial.ratio]
        np.testing.assert_array_equal(result.interior, sample_interior(unit_square, UNIFORM, 8, 3))

    def test_objective_never_increases(self, unit_square):
        result = near_singular_search(GAUSSIAN_WIDE, unit_square, 12, 8, restarts=2, steps=25, seed=3)
        history = result.objective_history
        assert all(b <= a for a, b in zip(history[:-1], history[1:]))
        assert result.objective <= result.initial.ratio
        assert len(history) == 2 * (25 + 1)
        sigma_min, sigma_max = svd_extremes(
            assemble_matrix(GAUSSIAN_WIDE, make_colloc(unit_square, 0, 12).with_interior(result.interior)).matrix
        )
        assert sigma_min / sigma_max == pytest.approx(result.objective, rel=1e-8)

    def test_near_duplicate_pair_is_flagged(self, unit_square):
        interior = np.array([[0.3, 0.3], [0.3 + 1e-9, 0.3], [0.6, 0.7], [0.5, 0.2]])
        result = near_singular_search(
            GAUSSIAN_WIDE, unit_square, 12, 4, restarts=1, steps=0, seed=0, initial_interior=interior
        )
        assert result.objective < NEAR_SINGULAR_RATIO
        assert result.best.singular_flag or result.best.near_singular

    def test_budget_validated(self, unit_square):
        with pytest.raises(DomainError):
            near_singular_search(GAUSSIAN_WIDE, unit_square, 8, 4, restarts=0, steps=1, seed=0)


class TestChecks:
    @pytest.mark.parametrize("spec", ADMISSIBLE_SPECS, ids=lambda s: s.label)
    @pytest.mark.parametrize("domain", [Box.unit(2), Ball((0.0, 0.0), 1.0)], ids=["square", "disk"])
    def test_interpolation_matrices_positive_definite(self, spec, domain):
        check = interpolation_matrix_check(spec, domain, m_max=30, sets=10, seed=1)
        assert check.passed, check.detail

    @pytest.mark.parametrize(
        "spec, d",
        [
            (KernelSpec(family="gaussian", epsilon=1.0), 2),
            (KernelSpec(family="gimq", beta=-1.0, epsilon=1.0), 2),
            (KernelSpec(family="matern", nu=2.5, epsilon=2.0), 3),
        ],
    )
    def test_kernel_check_passes(self, spec, d):
        report = kernel_check(spec, d, seed=0)
        assert report.passed, report.to_dict()
        assert len(report.checks) == 6


def test_run_parallel_keeps_order():
    assert run_parallel(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]
    with pytest.raises(ConfigurationError):
        run_parallel(lambda x: x, [1], threads=0)
