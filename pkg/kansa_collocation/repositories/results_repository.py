"""Results repository: CSV tables, JSON reports, matrix dumps and point sets"""
import csv
import json
import logging
import math
import os
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from kansa_collocation import __version__
from kansa_collocation.config import Configuration
from kansa_collocation.geometry import CollocationSet
from kansa_collocation.kernels import KernelSpec
from kansa_collocation.models import Coefficients, KansaSystem

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"


@contextmanager
def open_output(path: str):
    """Write through a temporary file that replaces `path` only on success"""
    tmp_path = f"{path}.tmp"
    f = open(tmp_path, "w", newline="")
    try:
        yield f
        f.close()
        os.replace(tmp_path, path)
    except Exception:
        f.close()
        os.remove(tmp_path)
        raise


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays; NaN becomes null and infinities strings"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


class ResultsRepository:
    """Writes run outputs under the configured output directory.

    Every CSV gets a ``<stem>.meta.json`` sidecar and every JSON report a
    ``metadata`` field, both carrying the package version and resolved config.
    """

    def __init__(self, config: Configuration):
        self.output_dir = config.output_dir
        self.seed = config.seed
        self.metadata = {"version": __version__, "config": config.resolved()}
        os.makedirs(self.output_dir, exist_ok=True)

    @staticmethod
    def file_stem(experiment: str, spec: KernelSpec, seed: int) -> str:
        return f"{experiment}-{spec.label}-{seed}"

    def path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def write_table(
        self, stem: str, columns: Sequence[str], rows: Iterable[Sequence[Any]], extra: Optional[Dict[str, Any]] = None
    ) -> str:
        path = self.path(f"{stem}.csv")
        with open_output(path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
        self._write_sidecar(stem, {"columns": list(columns), **(extra or {})})
        logger.info("wrote %s", path)
        return path

    def write_json(self, stem: str, payload: Dict[str, Any]) -> str:
        path = self.path(f"{stem}.json")
        document = {**jsonable(payload), "metadata": jsonable(self.metadata)}
        with open_output(path) as f:
            json.dump(document, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info("wrote %s", path)
        return path

    def write_matrix(self, stem: str, system: KansaSystem, spec: KernelSpec, dimension: int) -> str:
        """Row-major CSV without header, 17 significant digits"""
        path = self.path(f"{stem}.csv")
        with open_output(path) as f:
            np.savetxt(f, system.matrix, fmt="%.17g", delimiter=",")
        self._write_sidecar(
            stem, {"n": system.n, "m": system.m, "d": dimension, "kernel": spec.to_dict(), "seed": self.seed}
        )
        logger.info("wrote %s", path)
        return path

    def write_points(self, stem: str, colloc: CollocationSet) -> str:
        """Point set CSV with header x1..xd,role, interior rows first"""
        columns = [f"x{i + 1}" for i in range(colloc.dimension)] + ["role"]
        rows = [list(p) + [role] for p, role in zip(colloc.points.tolist(), colloc.roles)]
        return self.write_table(stem, columns, rows)

    def write_coefficients(self, stem: str, coefficients: Coefficients) -> str:
        return self.write_table(stem, ["block", "index", "value"], coefficients.to_rows())

    def write_grid(self, stem: str, points: np.ndarray, values: np.ndarray) -> str:
        columns = [f"x{i + 1}" for i in range(points.shape[1])] + ["u"]
        rows = [list(p) + [v] for p, v in zip(points.tolist(), values.tolist())]
        return self.write_table(stem, columns, rows)

    def _write_sidecar(self, stem: str, extra: Dict[str, Any]) -> None:
        with open_output(self.path(f"{stem}.meta.json")) as f:
            json.dump(jsonable({**self.metadata, **extra}), f, indent=2, sort_keys=True)
            f.write("\n")
