"""Port amplitudes, transmission matrices and circulator figures of merit."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import ModelInstance, ModelKind, SystemParams, build_model, port_output_map
from .quantum import DensityMatrix, build_liouvillian, expect, steady_state

PORTS = (1, 2, 3, 4)


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True, eq=False)
class TransmissionMatrix:
    """Port-to-port power transmissions, rows = input port, columns = output port."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.shape != (4, 4):
            raise ValueError(f"transmission matrix must be 4x4, got {t.shape}")
        if np.any(t < 0) or np.any(t > 1 + 1e-9):
            raise ValueError("transmissions must lie in [0, 1]")
        if np.any(t.sum(axis=1) > 1 + 1e-9):
            raise ValueError("row sums exceed 1: the device would have gain")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    def __getitem__(self, ij):
        i, j = ij
        return self.t[i - 1, j - 1]

    @property
    def T(self) -> "TransmissionMatrix":
        return TransmissionMatrix(self.t.T)

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.t - self.t.T)) <= tol)


@dataclass(frozen=True)
class CirculatorMetrics:
    fidelity: float
    eta_per_port: tuple[float, float, float, float]
    eta: float
    isolations: tuple[float, float, float, float]
    direction: Direction


def ideal_matrix(direction: Direction = Direction.FORWARD) -> np.ndarray:
    step = 1 if Direction(direction) is Direction.FORWARD else -1
    ideal = np.zeros((4, 4))
    for i in range(4):
        ideal[i, (i + step) % 4] = 1.0
    return ideal


def output_amplitudes(model: ModelInstance, rho_ss: DensityMatrix) -> dict[int, complex]:
    """Output field amplitude at each port reachable in ``model``."""
    eps = complex(model.epsilon)
    if eps == 0:
        raise ValueError("epsilon = 0: transmissions are undefined without a probe")
    out = {}
    for port, ch in port_output_map(model.input).items():
        if ch.mode not in model.mode_ops:
            continue
        rate = model.params.fiber_rate(ch.fiber)
        field = -1j * math.sqrt(2.0 * rate) * expect(model.mode_ops[ch.mode], rho_ss)
        out[port] = (eps if ch.includes_drive else 0.0) + field
    return out


def transmissions(model: ModelInstance, rho_ss: DensityMatrix) -> dict[int, float]:
    eps2 = abs(complex(model.epsilon)) ** 2
    return {p: abs(a) ** 2 / eps2 for p, a in output_amplitudes(model, rho_ss).items()}


def solve_model(model: ModelInstance) -> DensityMatrix:
    return steady_state(build_liouvillian(model.hamiltonian, model.collapse_ops))


def _row(params: SystemParams, kind: ModelKind, port: int) -> np.ndarray:
    model = build_model(params, port, kind)
    row = np.zeros(4)
    for j, tij in transmissions(model, solve_model(model)).items():
        row[j - 1] = tij
    return row


def transmission_matrix(
    params: SystemParams,
    model_kind: ModelKind = ModelKind.TWO_MODE,
    max_workers: int | None = None,
) -> TransmissionMatrix:
    """Steady-state 4x4 transmission matrix; the simplified model has no backscatter entries."""
    kind = ModelKind(model_kind)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            rows = list(pool.map(lambda p: _row(params, kind, p), PORTS))
    else:
        rows = [_row(params, kind, p) for p in PORTS]
    t = np.vstack(rows)
    # Rounding can push an entry a few ulp below zero or a lossless row just past 1.
    return TransmissionMatrix(np.clip(t, 0.0, None))


def metrics(t: TransmissionMatrix | np.ndarray, direction: Direction = Direction.FORWARD) -> CirculatorMetrics:
    """Fidelity, survival probabilities and isolations of a transmission matrix.

    The fidelity is one minus an eighth of the L1 distance between the
    row-normalised matrix and the ideal circulator. A row with zero survival
    contributes the full distance of its ideal row. Isolations are
    ``10 log10(T[i, i+1] / T[i+1, i])`` for the matrix as given; a vanishing
    denominator yields ``inf``.
    """
    if not isinstance(t, TransmissionMatrix):
        t = TransmissionMatrix(t)
    direction = Direction(direction)
    m = t.t
    eta_i = m.sum(axis=1)
    ideal = ideal_matrix(direction)
    normed = np.zeros_like(m)
    alive = eta_i > 0
    normed[alive] = m[alive] / eta_i[alive, None]
    fidelity = 1.0 - np.abs(normed - ideal).sum() / 8.0

    iso = []
    for i in range(4):
        fwd, bwd = m[i, (i + 1) % 4], m[(i + 1) % 4, i]
        if bwd == 0:
            iso.append(math.inf if fwd > 0 else math.nan)
        elif fwd == 0:
            iso.append(-math.inf)
        else:
            iso.append(10.0 * math.log10(fwd / bwd))
    return CirculatorMetrics(
        fidelity=float(fidelity),
        eta_per_port=tuple(float(x) for x in eta_i),
        eta=float(eta_i.mean()),
        isolations=tuple(iso),
        direction=direction,
    )


def relabel_reversed(t: TransmissionMatrix | np.ndarray) -> np.ndarray:
    """Relabel ports ``i -> -i mod 4`` so a forward circulator reads as a backward one."""
    m = t.t if isinstance(t, TransmissionMatrix) else np.asarray(t)
    perm = [2, 1, 0, 3]  # zero-based image of ports 1..4 under i -> -i (mod 4)
    out = np.empty_like(m)
    for i in range(4):
        for j in range(4):
            out[perm[i], perm[j]] = m[i, j]
    return out
