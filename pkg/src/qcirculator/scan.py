"""Sweeps of the fiber coupling along the critical-coupling line ``kappa_a = kappa_b + kappa_0``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .model import ModelKind, SystemParams
from .observables import CirculatorMetrics, Direction, TransmissionMatrix, metrics, transmission_matrix

DEFAULT_GRID = (1.1, 8.0, 40)


class Objective(Enum):
    FIDELITY = "fidelity"
    FIDELITY_TIMES_ETA = "fidelity*eta"


@dataclass(frozen=True)
class ScanPoint:
    kappa_tot_over_2kappa0: float
    kappa_a: float
    kappa_b: float
    transmissions: TransmissionMatrix
    metrics: CirculatorMetrics

    def score(self, objective: Objective) -> float:
        if objective is Objective.FIDELITY:
            return self.metrics.fidelity
        return self.metrics.fidelity * self.metrics.eta


@dataclass(frozen=True)
class ScanResult:
    points: tuple[ScanPoint, ...]
    optimum: int
    objective: Objective


def default_ratio_grid() -> np.ndarray:
    lo, hi, n = DEFAULT_GRID
    return np.geomspace(lo, hi, n)


def _point(base: SystemParams, ratio: float, kind: ModelKind, direction: Direction) -> ScanPoint:
    p = base.at_ratio(ratio)
    t = transmission_matrix(p, kind)
    return ScanPoint(float(ratio), p.kappa_a, p.kappa_b, t, metrics(t, direction))


def _argmax(points: Sequence[ScanPoint], objective: Objective) -> int:
    if not points:
        raise ValueError("empty scan")
    # ties go to the smallest kappa_tot (least fiber loading)
    order = sorted(range(len(points)), key=lambda k: (-points[k].score(objective), points[k].kappa_tot_over_2kappa0))
    return order[0]


def scan_coupling(
    base: SystemParams,
    ratio_grid: Sequence[float] | None = None,
    model_kind: ModelKind = ModelKind.TWO_MODE,
    objective: Objective = Objective.FIDELITY,
    direction: Direction = Direction.FORWARD,
    max_workers: int | None = None,
) -> ScanResult:
    ratios = default_ratio_grid() if ratio_grid is None else np.asarray(ratio_grid, dtype=float)
    if ratios.size == 0:
        raise ValueError("empty ratio grid")
    if np.any(ratios < 1):
        raise ValueError("ratios must be >= 1 (kappa_b would be negative)")
    kind, objective, direction = ModelKind(model_kind), Objective(objective), Direction(direction)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            points = list(pool.map(lambda r: _point(base, r, kind, direction), ratios))
    else:
        points = [_point(base, r, kind, direction) for r in ratios]
    return ScanResult(tuple(points), _argmax(points, objective), objective)


def find_optimum(scan: ScanResult) -> ScanPoint:
    return scan.points[_argmax(scan.points, scan.objective)]
