"""Closed-form low-saturation results for the circulator.

Everything here is homogeneous in the rates, so any consistent unit works;
the :class:`SystemParams` fields are angular.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

from .model import Fiber, SystemParams


class Coupling(Enum):
    STRONG = "strong"
    WEAK = "weak"


class AnalyticTransmission(NamedTuple):
    t_trans: float
    t_cross: float
    atom_loss: complex


class AnalyticMetrics(NamedTuple):
    eta_fw: float
    eta_bw: float
    fidelity: float
    eta: float


def atom_induced_loss(g: float, gamma: float, delta_al: float = 0.0) -> complex:
    """Extra resonator field decay ``g^2 / (gamma + i delta_al)`` caused by the atom."""
    if gamma == 0 and delta_al == 0:
        if g == 0:
            return 0j
        raise ZeroDivisionError("gamma = 0 and delta_al = 0 with g > 0")
    return g * g / complex(gamma, delta_al)


def _mode_coupling(params: SystemParams, coupling: Coupling) -> float:
    strong = params.strong_mode()
    if strong is None:
        return 0.0
    mode = strong if coupling is Coupling.STRONG else strong.counter
    return params.coupling(mode)


def analytic_transmissions(
    params: SystemParams,
    coupling: Coupling = Coupling.STRONG,
    fiber: Fiber = Fiber.A,
) -> AnalyticTransmission:
    """Through-fiber and cross-fiber power transmission of the single-mode model.

    ``coupling`` selects whether the driven mode is the one coupled to the
    strong transition; ``fiber`` is the fiber the probe is launched into.
    """
    g_eff = _mode_coupling(params, Coupling(coupling))
    loss = atom_induced_loss(g_eff, params.gamma, params.delta_al)
    k_in, k_out = (params.kappa_a, params.kappa_b) if fiber is Fiber.A else (params.kappa_b, params.kappa_a)
    denom = abs(loss + 1j * params.delta_rl + params.kappa_tot) ** 2
    num = abs(loss + 1j * params.delta_rl + params.kappa_0 + k_out - k_in) ** 2
    return AnalyticTransmission(num / denom, 4.0 * params.kappa_a * params.kappa_b / denom, loss)


def analytic_metrics(params: SystemParams) -> AnalyticMetrics:
    """Survival probabilities and fidelity for equal fiber couplings on resonance.

    ``eta_bw`` is the survival of light launched into the mode that couples
    to the strong transition (ports 1 and 3 for ``m_F = +3``); ``eta_fw`` is
    the survival for the weakly coupled mode. The polarisation overlap enters
    through ``alpha^2`` with ``beta^2 = 1 - alpha^2``.
    """
    if abs(params.kappa_a - params.kappa_b) > 1e-12 * max(1.0, params.kappa_a):
        raise ValueError("closed forms require kappa_a == kappa_b")
    kt, k0, gam, g = params.kappa_tot, params.kappa_0, params.gamma, params.g
    a2 = params.alpha**2
    g2 = g * g
    s = gam * kt + g2
    denom = kt**2 * s**2

    eta_fw = 1.0 - 2.0 * (kt - k0) * (
        gam**2 * k0 * kt**2 + g2 * g2 * k0 * a2 + g2 * gam * kt * (a2 * (2.0 * k0 - kt) + kt)
    ) / denom
    eta_bw = (
        (gam**2 * (kt - k0) ** 2 + (gam * k0 + g2) ** 2) * kt**2
        - 2.0 * g2 * (kt - k0) * (1.0 - a2) * (gam * kt * (2.0 * k0 - kt) + g2 * k0)
    ) / denom
    # through-fiber transmission of the strong mode, cross transmission of the weak mode
    t_strong = (g2 * (k0 + a2 * (kt - k0)) + gam * k0 * kt) ** 2
    t_weak = (kt - k0) ** 2 * (a2 * g2 + gam * kt) ** 2
    fidelity = (t_strong / eta_bw + t_weak / eta_fw) / (2.0 * denom)
    eta = 1.0 - (kt - k0) * (
        2.0 * gam**2 * kt**2 * k0 + g2 * g2 * k0 + gam * g2 * kt * (kt + 2.0 * k0)
    ) / denom
    return AnalyticMetrics(eta_fw, eta_bw, fidelity, eta)


def empty_cross_transmission(params: SystemParams) -> float:
    """On-resonance add-drop transmission ``1 - 2 kappa_0 / kappa_tot`` at critical coupling."""
    return 1.0 - 2.0 * params.kappa_0 / params.kappa_tot


__all__ = [
    "Coupling",
    "AnalyticTransmission",
    "AnalyticMetrics",
    "atom_induced_loss",
    "analytic_transmissions",
    "analytic_metrics",
    "empty_cross_transmission",
]
