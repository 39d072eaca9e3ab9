"""Shared fixtures and independent oracles.

The oracles here never touch the master-equation code paths: they solve the
weak-drive amplitude equations or a perturbative pure-state problem directly.
"""

import math

import numpy as np
import pytest

from qcirculator.model import TWO_PI, Fiber, PortSpec, ResonatorMode, SystemParams, port_output_map


@pytest.fixture
def defaults():
    return SystemParams()


def linear_response_row(params: SystemParams, port: int) -> dict[int, float]:
    """Transmissions from the weak-excitation amplitude equations (a, b, sigma)."""
    spec = PortSpec(port)
    ga = params.coupling(ResonatorMode.CCW)
    gb = params.coupling(ResonatorMode.CW)
    kc = params.kappa_tot + 1j * params.delta_rl
    gc = params.gamma + 1j * params.delta_al
    m = np.array(
        [
            [-kc, 0, -1j * ga],
            [0, -kc, -1j * gb],
            [-1j * ga, -1j * gb, -gc],
        ]
    )
    drive = -1j * math.sqrt(2 * params.fiber_rate(spec.fiber))
    rhs = np.zeros(3, dtype=complex)
    rhs[0 if spec.driven_mode is ResonatorMode.CCW else 1] = -drive
    amp = np.linalg.solve(m, rhs)
    field = {ResonatorMode.CCW: amp[0], ResonatorMode.CW: amp[1]}
    out = {}
    for j, ch in port_output_map(spec).items():
        k = params.kappa_a if ch.fiber is Fiber.A else params.kappa_b
        a_out = (1.0 if ch.includes_drive else 0.0) - 1j * math.sqrt(2 * k) * field[ch.mode]
        out[j] = abs(a_out) ** 2
    return out


def linear_response_matrix(params: SystemParams) -> np.ndarray:
    t = np.zeros((4, 4))
    for i in range(1, 5):
        for j, v in linear_response_row(params, i).items():
            t[i - 1, j - 1] = v
    return t


def weak_drive_g2_zero(model, output_port: int) -> float:
    """Leading-order g2(0) from the pure-state perturbative steady state.

    Solves (H0 - i/2 sum c^+c) psi_n = -V psi_{n-1} manifold by manifold
    starting from vacuum, where V is the photon-creating half of the drive.
    """
    from qcirculator.correlations import output_operator

    space = model.space
    h0 = model.hamiltonian.matrix - model.drive_term.matrix
    heff = h0 - 0.5j * sum(c.matrix.conj().T @ c.matrix for c in model.collapse_ops)
    a = model.mode_ops[model.input.driven_mode].matrix
    eps = complex(model.epsilon)
    rate = model.params.fiber_rate(model.input.fiber)
    v = math.sqrt(2 * rate) * eps * a.conj().T
    d = space.dim
    psi0 = np.zeros(d, dtype=complex)
    psi0[0] = 1.0
    excited = np.ones(d, dtype=bool)
    excited[0] = False
    sub = heff[np.ix_(excited, excited)]
    psi = [psi0]
    for _ in range(2):
        rhs = -(v @ psi[-1])[excited]
        nxt = np.zeros(d, dtype=complex)
        nxt[excited] = np.linalg.solve(sub, rhs)
        psi.append(nxt)
    state = psi[0] + psi[1] + psi[2]
    o = output_operator(model, output_port).operator.matrix
    one = o @ state
    two = o @ one
    # keep only the leading order in epsilon of <O^+O> and <O^+O^+OO>
    n1 = np.vdot(one, one).real / np.vdot(state, state).real
    n2 = np.vdot(two, two).real / np.vdot(state, state).real
    return n2 / n1**2


def mhz(x):
    return TWO_PI * x
