"""Run orchestration: builds inputs from a Configuration, runs the requested
computation and hands the results to the ResultsRepository.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from kansa_collocation.assembly import assemble_system, evaluate_solution
from kansa_collocation.config import Configuration
from kansa_collocation.config.run_config import (
    ConvergenceConfig,
    EpsilonSweepConfig,
    FarfieldConfig,
    IncrementalGrowthConfig,
    McUnisolvenceConfig,
    NearSingularConfig,
)
from kansa_collocation.exceptions import ConfigurationError, SingularMatrixError
from kansa_collocation.geometry import CollocationSet, Domain, sample_boundary, sample_interior
from kansa_collocation.harness import (
    convergence_study,
    epsilon_sweep,
    farfield_gaps_decrease,
    farfield_limit_check,
    incremental_growth,
    kernel_check,
    mc_unisolvence,
    median_rms,
    near_singular_search,
)
from kansa_collocation.linalg import condition_number, solve_system, svd_extremes
from kansa_collocation.models import ConvergenceRow, FarfieldRow, TrialRecord
from kansa_collocation.repositories import ResultsRepository

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SINGULAR = 2
EXIT_ADMISSIBILITY_FAILURE = 3


@dataclass
class RunOutcome:
    exit_code: int
    summary: str


class ExperimentRunner:
    """Coordinates one CLI invocation"""

    def __init__(self, config: Configuration, repository: Optional[ResultsRepository] = None):
        self.config = config
        self.run = config.run
        self.spec = config.kernel
        self.seed = config.seed
        self.repository = repository or ResultsRepository(config)

    def solve(self, dump_matrix: bool = False) -> RunOutcome:
        domain = self.config.build_domain()
        problem = self.config.build_problem()
        colloc = self._collocation(domain, problem.boundary_points)
        system = assemble_system(self.spec, problem, colloc)
        stem = self.repository.file_stem("solve", self.spec, self.seed)
        self.repository.write_points(f"{stem}-points", colloc)
        if dump_matrix:
            self.repository.write_matrix(f"{stem}-matrix", system, self.spec, colloc.dimension)

        try:
            report = solve_system(system)
        except SingularMatrixError as e:
            sigma_min, sigma_max = svd_extremes(system.matrix)
            self.repository.write_json(
                f"{stem}-diagnostics",
                {
                    "error": str(e),
                    "pivot_index": e.pivot_index,
                    "sigma_min": sigma_min,
                    "sigma_max": sigma_max,
                    "cond2": condition_number(sigma_min, sigma_max),
                    "n": colloc.n,
                    "m": colloc.m,
                    "setup": self._setup(),
                },
            )
            return RunOutcome(EXIT_SINGULAR, f"solve: singular system ({e})")

        self.repository.write_coefficients(f"{stem}-coefficients", report.coefficients)
        payload = {
            "kernel": self.spec.to_dict(),
            "problem": problem.name,
            "setup": self._setup(),
            **report.to_dict(),
        }
        if problem.exact is not None and colloc.n:
            error = evaluate_solution(self.spec, colloc, report.coefficients, colloc.interior) - problem.exact(
                colloc.interior
            )
            payload["max_error_at_interior_points"] = float(np.max(np.abs(error)))
        if self.run.solve.grid:
            grid = _evaluation_grid(domain, self.run.solve.grid)
            values = evaluate_solution(self.spec, colloc, report.coefficients, grid)
            self.repository.write_grid(f"{stem}-grid", grid, values)
        self.repository.write_json(f"{stem}-report", payload)

        summary = (
            f"solve: N={colloc.size} sigma_min={report.sigma_min:.6g} cond2={report.cond2:.6g} "
            f"residual_inf={report.residual_inf:.3g}"
        )
        if report.singular_flag:
            self.repository.write_json(f"{stem}-diagnostics", payload)
            return RunOutcome(EXIT_SINGULAR, summary + " singular=true")
        return RunOutcome(EXIT_OK, summary)

    def experiment(self) -> RunOutcome:
        experiment = self.run.experiment
        if experiment is None:
            raise ConfigurationError("configuration has no experiment section")
        stem = self.repository.file_stem(experiment.name, self.spec, self.seed)
        logger.info("running experiment %s", stem)
        if isinstance(experiment, McUnisolvenceConfig):
            return self._mc_unisolvence(experiment, stem)
        if isinstance(experiment, IncrementalGrowthConfig):
            return self._incremental_growth(experiment, stem)
        if isinstance(experiment, FarfieldConfig):
            return self._farfield(experiment, stem)
        if isinstance(experiment, ConvergenceConfig):
            return self._convergence(experiment, stem)
        if isinstance(experiment, EpsilonSweepConfig):
            return self._epsilon_sweep(experiment, stem)
        if isinstance(experiment, NearSingularConfig):
            return self._near_singular(experiment, stem)
        raise ConfigurationError(f"unknown experiment {experiment.name!r}")

    def kernel_check(self) -> RunOutcome:
        d = self.config.dimension
        report = kernel_check(self.spec, d, seed=self.seed)
        self.repository.write_json(self.repository.file_stem("kernel-check", self.spec, self.seed), report.to_dict())
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in report.checks]
        lines.append(f"kernel-check {self.spec.label} d={d}: {'pass' if report.passed else 'fail'}")
        return RunOutcome(EXIT_OK if report.passed else EXIT_ADMISSIBILITY_FAILURE, "\n".join(lines))

    def _mc_unisolvence(self, experiment: McUnisolvenceConfig, stem: str) -> RunOutcome:
        summary, records = mc_unisolvence(
            self.spec,
            self.config.build_domain(),
            self.config.build_density(),
            self.run.boundary.m,
            self.config.build_boundary_strategy(),
            self.run.interior.n,
            experiment.trials,
            self.seed,
            threads=self.config.threads,
        )
        self._write_trials(stem, records)
        self.repository.write_json(stem, {**summary.to_dict(), "setup": self._setup()})
        return RunOutcome(EXIT_OK, summary.summary_line())

    def _incremental_growth(self, experiment: IncrementalGrowthConfig, stem: str) -> RunOutcome:
        records = incremental_growth(
            self.spec,
            self.config.build_domain(),
            self.config.build_density(),
            self.run.boundary.m,
            self.config.build_boundary_strategy(),
            experiment.n_max,
            self.seed,
        )
        self._write_trials(stem, records)
        gaps = [r.bordered_log_gap for r in records if r.ok and r.n > 0]
        failures = sum(1 for r in records if r.singular_flag)
        self.repository.write_json(
            stem,
            {
                "steps": len(records),
                "failures": failures,
                "max_bordered_log_gap": max(gaps) if gaps else 0.0,
                "min_sigma_min": min((r.sigma_min for r in records if r.ok), default=float("nan")),
                "setup": self._setup(),
            },
        )
        return RunOutcome(
            EXIT_OK,
            f"steps={len(records)} failures={failures} max_bordered_log_gap={max(gaps) if gaps else 0.0:.3g}",
        )

    def _farfield(self, experiment: FarfieldConfig, stem: str) -> RunOutcome:
        colloc = self._collocation(self.config.build_domain())
        rows = farfield_limit_check(self.spec, colloc, experiment.radii)
        self.repository.write_table(stem, FarfieldRow.COLUMNS, [row.to_row() for row in rows])
        decreasing = farfield_gaps_decrease(rows)
        self.repository.write_json(
            stem,
            {
                "rows": [row.to_dict() for row in rows],
                "gaps_decrease": decreasing,
                "final_gap": rows[-1].relative_gap,
                "setup": self._setup(),
            },
        )
        return RunOutcome(
            EXIT_OK, f"radii={len(rows)} final_gap={rows[-1].relative_gap:.3g} gaps_decrease={decreasing}"
        )

    def _convergence(self, experiment: ConvergenceConfig, stem: str) -> RunOutcome:
        rows = convergence_study(
            self.spec,
            self.config.build_problem(),
            experiment.schedule,
            experiment.test_points,
            self.seed,
            density=self.config.build_density(),
            boundary_strategy=self.config.build_boundary_strategy(),
            threads=self.config.threads,
        )
        return self._write_accuracy(stem, rows)

    def _epsilon_sweep(self, experiment: EpsilonSweepConfig, stem: str) -> RunOutcome:
        rows = epsilon_sweep(
            self.spec,
            self.config.build_problem(),
            self.run.interior.n,
            self.run.boundary.m,
            experiment.epsilons,
            self.seed,
            test_points=experiment.test_points,
            density=self.config.build_density(),
            boundary_strategy=self.config.build_boundary_strategy(),
            threads=self.config.threads,
        )
        return self._write_accuracy(stem, rows)

    def _near_singular(self, experiment: NearSingularConfig, stem: str) -> RunOutcome:
        result = near_singular_search(
            self.spec,
            self.config.build_domain(),
            self.run.boundary.m,
            self.run.interior.n,
            experiment.restarts,
            experiment.steps,
            self.seed,
            density=self.config.build_density(),
            boundary_strategy=self.config.build_boundary_strategy(),
            jitter=experiment.jitter,
        )
        self._write_trials(stem, [result.initial, result.best])
        self.repository.write_points(f"{stem}-points", CollocationSet(result.interior, result.boundary))
        self.repository.write_json(stem, {**result.to_dict(), "setup": self._setup()})
        return RunOutcome(
            EXIT_OK,
            f"objective={result.objective:.3e} initial={result.initial.ratio:.3e} "
            f"accepted_steps={result.accepted_steps}",
        )

    def _write_trials(self, stem: str, records) -> None:
        self.repository.write_table(stem, TrialRecord.COLUMNS, [r.to_row() for r in records])
        for record in records:
            if record.singular_flag and record.points is not None:
                name = f"counterexample-{self.spec.label}-{self.seed}-{record.trial_index}"
                self.repository.write_points(name, CollocationSet(record.points[: record.n], record.points[record.n :]))
                logger.warning("singular trial %d dumped to %s.csv", record.trial_index, name)

    def _write_accuracy(self, stem: str, rows) -> RunOutcome:
        self.repository.write_table(stem, ConvergenceRow.COLUMNS, [row.to_row() for row in rows])
        solved = sum(1 for row in rows if row.ok)
        self.repository.write_json(
            stem,
            {
                "rows": [row.to_dict() for row in rows],
                "solved": solved,
                "median_rms": median_rms(rows),
                "setup": self._setup(),
            },
        )
        last = next((row for row in reversed(rows) if row.ok), None)
        tail = f" last_rms={last.rms_error:.3e} last_cond2={last.cond2:.3e}" if last else ""
        return RunOutcome(EXIT_OK, f"rows={len(rows)} solved={solved}{tail}")

    def _collocation(self, domain: Domain, boundary: Optional[np.ndarray] = None) -> CollocationSet:
        if boundary is None:
            boundary = sample_boundary(domain, self.run.boundary.m, self.config.build_boundary_strategy())
        interior = sample_interior(domain, self.config.build_density(), self.run.interior.n, self.seed)
        return CollocationSet.on_domain(domain, interior, boundary)

    def _setup(self) -> Dict[str, Any]:
        """Domain, density and boundary strategy as built from the configuration"""
        return {
            "domain": self.config.build_domain().to_dict(),
            "density": self.config.build_density().to_dict(),
            "boundary_strategy": self.config.build_boundary_strategy().to_dict(),
        }


def _evaluation_grid(domain: Domain, per_axis: int) -> np.ndarray:
    """Uniform grid over the bounding box, restricted to interior points"""
    lo, hi = domain.bounding_box
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dimension)
    return grid[domain.contains(grid)]
