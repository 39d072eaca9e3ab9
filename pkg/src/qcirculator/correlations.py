"""Second-order correlations of the output fields via the quantum regression theorem."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelInstance, ModelKind, SystemParams, build_model, port_output_map
from .quantum import QOp, build_liouvillian, evolve_trajectory, expect, identity, steady_state

#: Empty-resonator intracavity photon number used to size the probe for g2 runs.
CORRELATION_PHOTON_NUMBER = 1e-4

#: Output ports whose transmission falls below this are refused as too dark.
DARK_PORT_THRESHOLD = 1e-8


class DarkPortError(ValueError):
    """The requested output port carries (almost) no light."""


@dataclass(frozen=True, eq=False)
class OutputField:
    """Output field ``offset * 1 + field`` of one port, in sqrt(photons/us)."""

    offset: complex
    field: QOp

    @property
    def operator(self) -> QOp:
        return self.offset * identity(self.field.space) + self.field


@dataclass(frozen=True, eq=False)
class CorrelationTrace:
    input_port: int
    output_port: int
    tau_grid: np.ndarray
    g2: np.ndarray
    g2_zero: float
    normalization: float

    def symmetric(self) -> tuple[np.ndarray, np.ndarray]:
        """Trace mirrored to negative delays, using g2(-tau) = g2(tau)."""
        tau = np.concatenate([-self.tau_grid[:0:-1], self.tau_grid])
        return tau, np.concatenate([self.g2[:0:-1], self.g2])

    def settled(self, tol: float = 0.05) -> bool:
        return abs(self.g2[-1] - 1.0) < tol


def correlation_epsilon(params: SystemParams, photon_number: float = CORRELATION_PHOTON_NUMBER) -> float:
    """Probe amplitude giving ``photon_number`` in the empty, resonant resonator fed via fiber A."""
    rate = params.kappa_a if params.kappa_a > 0 else params.kappa_b
    return math.sqrt(photon_number) * params.kappa_tot / math.sqrt(2.0 * rate)


def default_tau_grid(params: SystemParams, points: int = 64, span: float = 5.0) -> np.ndarray:
    return np.linspace(0.0, span / params.kappa_tot, points)


def correlation_model(
    params: SystemParams,
    input_port: int,
    epsilon: float | None = None,
    kind: ModelKind = ModelKind.TWO_MODE,
) -> ModelInstance:
    eps = correlation_epsilon(params) if epsilon is None else epsilon
    return build_model(params.replace(epsilon=eps), input_port, kind)


def output_operator(model: ModelInstance, output_port: int) -> OutputField:
    routes = port_output_map(model.input)
    if output_port not in routes or routes[output_port].mode not in model.mode_ops:
        raise ValueError(f"port {output_port} is not reachable from input {model.input.port} in this model")
    ch = routes[output_port]
    rate = model.params.fiber_rate(ch.fiber)
    field = (-1j * math.sqrt(2.0 * rate)) * model.mode_ops[ch.mode]
    offset = complex(model.epsilon) if ch.includes_drive else 0j
    return OutputField(offset, field)


def g2(model: ModelInstance, output_port: int, tau_grid=None, **evolve_kwargs) -> CorrelationTrace:
    """Normalised intensity correlation of ``output_port`` on a grid of delays (us)."""
    liou = build_liouvillian(model.hamiltonian, model.collapse_ops)
    rho = steady_state(liou)
    out = output_operator(model, output_port).operator
    n_op = out.dag() @ out
    flux = expect(n_op, rho).real
    t = max(flux, 0.0) / abs(complex(model.epsilon)) ** 2
    if t < DARK_PORT_THRESHOLD:
        raise DarkPortError(
            f"port {model.input.port} -> {output_port} is too dark for a correlation "
            f"measurement (transmission {t:.1e})"
        )
    tau = default_tau_grid(model.params) if tau_grid is None else np.asarray(tau_grid, dtype=float)
    conditioned = out.matrix @ rho.matrix @ out.matrix.conj().T
    states = evolve_trajectory(liou, conditioned, tau, **evolve_kwargs)
    vals = np.einsum("ij,tji->t", n_op.matrix, states).real / flux**2
    g0 = expect(n_op, conditioned).real / flux**2
    return CorrelationTrace(
        input_port=model.input.port,
        output_port=output_port,
        tau_grid=tau,
        g2=vals,
        g2_zero=float(g0),
        normalization=float(flux),
    )


def g2_zero(model: ModelInstance, output_port: int) -> float:
    """Zero-delay value only; skips the time integration."""
    return g2(model, output_port, tau_grid=[0.0]).g2_zero
