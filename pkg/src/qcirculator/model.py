"""Circulator parameters, port geometry and model construction.

Port layout (fiber A carries ports 1 and 2, fiber B ports 3 and 4)::

    input 1 -> ccw mode   input 2 -> cw mode
    input 3 -> ccw mode   input 4 -> cw mode

Light in the ccw mode leaves through port 2 (fiber A) and port 4 (fiber B);
light in the cw mode leaves through port 1 (fiber A) and port 3 (fiber B).
The operating cycle with the atom in ``m_F = +3`` is 1 -> 2 -> 3 -> 4 -> 1.

Basis ordering is always ``Atom (x) CCW mode (x) CW mode``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

from .quantum import (
    Atom,
    HilbertSpace,
    Mode,
    QOp,
    make_annihilation,
    make_sigma_minus,
)

TWO_PI = 2.0 * math.pi

#: Default probe amplitude in sqrt(photons/us); keeps the intracavity photon
#: number near 1e-10 so transmissions sit in the linear-response limit.
DEFAULT_EPSILON = 1e-4


class AtomState(Enum):
    M_PLUS_3 = "m+3"
    M_MINUS_3 = "m-3"
    NO_ATOM = "none"


class Fiber(Enum):
    A = "A"
    B = "B"


class ResonatorMode(Enum):
    CCW = "ccw"
    CW = "cw"

    @property
    def counter(self) -> "ResonatorMode":
        return ResonatorMode.CW if self is ResonatorMode.CCW else ResonatorMode.CCW


class ModelKind(Enum):
    SIMPLIFIED = "simplified"
    TWO_MODE = "two-mode"


# Angular-rate fields converted by 2*pi when reading MHz values.
RATE_FIELDS = ("kappa_0", "kappa_a", "kappa_b", "gamma", "g", "delta_rl", "delta_al", "g_strong", "g_weak")


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters; all rates and detunings in rad/us.

    Use :meth:`from_mhz` to build from values quoted as ``omega / 2 pi`` in
    MHz. ``g`` is the coupling of the strong (sigma+) transition; the mode
    couplings are ``alpha * g`` and ``beta * g`` unless ``g_strong`` /
    ``g_weak`` override them.
    """

    kappa_0: float = TWO_PI * 5.0
    kappa_a: float = TWO_PI * 11.0
    kappa_b: float = TWO_PI * 6.0
    gamma: float = TWO_PI * 3.0
    g: float = TWO_PI * 12.0
    alpha: float = math.sqrt(0.97)
    beta: float = math.sqrt(0.03)
    delta_rl: float = 0.0
    delta_al: float = 0.0
    epsilon: complex = DEFAULT_EPSILON
    n_max: int = 4
    atom_state: AtomState = AtomState.M_PLUS_3
    g_strong: Optional[float] = None
    g_weak: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.atom_state, AtomState):
            object.__setattr__(self, "atom_state", AtomState(self.atom_state))
        for name in ("kappa_0", "kappa_a", "kappa_b", "gamma", "g"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("g_strong", "g_weak"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 <= self.alpha <= 1 or not 0 <= self.beta <= 1:
            raise ValueError("alpha and beta must lie in [0, 1]")
        if abs(self.alpha**2 + self.beta**2 - 1) > 1e-9:
            raise ValueError(f"alpha^2 + beta^2 = {self.alpha**2 + self.beta**2:.12g}, expected 1")
        if self.atom_state is not AtomState.NO_ATOM and self.gamma <= 0:
            raise ValueError("gamma must be positive when an atom is present")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be a positive integer")

    @property
    def kappa_tot(self) -> float:
        return self.kappa_0 + self.kappa_a + self.kappa_b

    @classmethod
    def from_mhz(cls, **values) -> "SystemParams":
        """Build from rates in MHz (omega / 2 pi); missing fields take the defaults.

        ``alpha`` and ``beta`` are amplitudes; if only one is given the other
        is completed to ``alpha^2 + beta^2 = 1``.
        """
        unknown = set(values) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        kw = {}
        for k, v in values.items():
            if k in RATE_FIELDS and v is not None:
                v = TWO_PI * float(v)
            elif k == "atom_state":
                v = AtomState(v)
            kw[k] = v
        return cls(**_complete_overlaps(kw))

    def to_mhz(self) -> dict:
        """Field values with rates expressed in MHz (omega / 2 pi)."""
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name in RATE_FIELDS and v is not None:
                v = v / TWO_PI
            elif isinstance(v, Enum):
                v = v.value
            elif isinstance(v, complex):
                v = v.real if v.imag == 0 else [v.real, v.imag]
            out[f.name] = v
        return out

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **_complete_overlaps(changes))

    def at_ratio(self, ratio: float) -> "SystemParams":
        """Working point ``kappa_tot / 2 kappa_0 = ratio`` with ``kappa_a = kappa_b + kappa_0``."""
        if ratio < 1:
            raise ValueError(f"ratio must be >= 1 so that kappa_b >= 0, got {ratio}")
        kappa_b = self.kappa_0 * (ratio - 1.0)
        return dataclasses.replace(self, kappa_b=kappa_b, kappa_a=kappa_b + self.kappa_0)

    def fiber_rate(self, fiber: Fiber) -> float:
        return self.kappa_a if fiber is Fiber.A else self.kappa_b

    def strong_mode(self) -> Optional[ResonatorMode]:
        return {
            AtomState.M_PLUS_3: ResonatorMode.CCW,
            AtomState.M_MINUS_3: ResonatorMode.CW,
            AtomState.NO_ATOM: None,
        }[self.atom_state]

    def coupling(self, mode: ResonatorMode) -> float:
        """Atom coupling of ``mode`` for the current atom state (0 without atom)."""
        strong = self.strong_mode()
        if strong is None:
            return 0.0
        if mode is strong:
            return self.g * self.alpha if self.g_strong is None else self.g_strong
        return self.g * self.beta if self.g_weak is None else self.g_weak


def _complete_overlaps(kw: dict) -> dict:
    if "alpha" in kw and "beta" not in kw:
        kw["beta"] = math.sqrt(max(0.0, 1.0 - float(kw["alpha"]) ** 2))
    elif "beta" in kw and "alpha" not in kw:
        kw["alpha"] = math.sqrt(max(0.0, 1.0 - float(kw["beta"]) ** 2))
    return kw


@dataclass(frozen=True)
class PortSpec:
    port: int

    def __post_init__(self):
        if self.port not in (1, 2, 3, 4):
            raise ValueError(f"invalid port {self.port!r}; ports are 1..4")

    @property
    def fiber(self) -> Fiber:
        return Fiber.A if self.port in (1, 2) else Fiber.B

    @property
    def driven_mode(self) -> ResonatorMode:
        return ResonatorMode.CCW if self.port in (1, 3) else ResonatorMode.CW


class OutputChannel(NamedTuple):
    mode: ResonatorMode
    fiber: Fiber
    includes_drive: bool


# Output port reached by each resonator mode through each fiber.
_EXIT_PORT = {
    (ResonatorMode.CCW, Fiber.A): 2,
    (ResonatorMode.CCW, Fiber.B): 4,
    (ResonatorMode.CW, Fiber.A): 1,
    (ResonatorMode.CW, Fiber.B): 3,
}


def port_output_map(input: PortSpec) -> dict[int, OutputChannel]:
    """Which mode amplitude and fiber rate feed each output port for ``input``."""
    out = {}
    for mode in (input.driven_mode, input.driven_mode.counter):
        for fiber in (Fiber.A, Fiber.B):
            includes_drive = mode is input.driven_mode and fiber is input.fiber
            out[_EXIT_PORT[mode, fiber]] = OutputChannel(mode, fiber, includes_drive)
    return dict(sorted(out.items()))


def transmitted_port(input_port: int) -> int:
    return next(p for p, ch in port_output_map(PortSpec(input_port)).items() if ch.includes_drive)


def cross_port(input_port: int) -> int:
    spec = PortSpec(input_port)
    other = Fiber.B if spec.fiber is Fiber.A else Fiber.A
    return _EXIT_PORT[spec.driven_mode, other]


@dataclass(frozen=True, eq=False)
class ModelInstance:
    kind: ModelKind
    space: HilbertSpace
    hamiltonian: QOp
    drive_term: QOp
    collapse_ops: tuple[QOp, ...]
    mode_ops: dict
    atom_op: QOp
    input: PortSpec
    params: SystemParams

    @property
    def epsilon(self) -> complex:
        return self.params.epsilon

    def mode_op(self, mode: ResonatorMode) -> QOp:
        try:
            return self.mode_ops[mode]
        except KeyError:
            raise KeyError(f"{mode.value} mode is not part of the {self.kind.value} model") from None


def _drive(params: SystemParams, input: PortSpec, a: QOp) -> QOp:
    # sqrt(2 kappa_x) (eps a^+ + eps^* a): gives <a>_ss = -i sqrt(2 kappa_x) eps / kappa_tot
    # for the empty resonator, consistent with a_out = a_in - i sqrt(2 kappa) <a>.
    eps = complex(params.epsilon)
    amp = math.sqrt(2.0 * params.fiber_rate(input.fiber))
    return amp * (eps * a.dag() + eps.conjugate() * a)


def _jc(g: float, a: QOp, sm: QOp) -> QOp:
    return g * (a.dag() @ sm + a @ sm.dag())


def build_simplified(params: SystemParams, input: PortSpec | int) -> ModelInstance:
    """Single resonator mode coupled to a two-level atom (Jaynes-Cummings)."""
    if not isinstance(input, PortSpec):
        input = PortSpec(input)
    space = HilbertSpace(Atom(2), Mode(params.n_max))
    sm = make_sigma_minus(space, 0)
    a = make_annihilation(space, 1)
    g_eff = params.coupling(input.driven_mode)
    h0 = params.delta_rl * (a.dag() @ a) + params.delta_al * (sm.dag() @ sm) + _jc(g_eff, a, sm)
    drive = _drive(params, input, a)
    collapse = [math.sqrt(2.0 * params.kappa_tot) * a]
    if params.gamma > 0:
        collapse.append(math.sqrt(2.0 * params.gamma) * sm)
    return ModelInstance(
        kind=ModelKind.SIMPLIFIED,
        space=space,
        hamiltonian=h0 + drive,
        drive_term=drive,
        collapse_ops=tuple(collapse),
        mode_ops={input.driven_mode: a},
        atom_op=sm,
        input=input,
        params=params,
    )


def build_two_mode(params: SystemParams, input: PortSpec | int) -> ModelInstance:
    """Both counter-propagating modes coupled to the sigma+ transition."""
    if not isinstance(input, PortSpec):
        input = PortSpec(input)
    if params.atom_state is not AtomState.NO_ATOM and params.n_max < 2:
        raise ValueError("two-mode model with an atom needs n_max >= 2")
    space = HilbertSpace(Atom(2), Mode(params.n_max), Mode(params.n_max))
    sm = make_sigma_minus(space, 0)
    a = make_annihilation(space, 1)
    b = make_annihilation(space, 2)
    ops = {ResonatorMode.CCW: a, ResonatorMode.CW: b}
    h0 = (
        params.delta_rl * (a.dag() @ a + b.dag() @ b)
        + params.delta_al * (sm.dag() @ sm)
        + _jc(params.coupling(ResonatorMode.CCW), a, sm)
        + _jc(params.coupling(ResonatorMode.CW), b, sm)
    )
    drive = _drive(params, input, ops[input.driven_mode])
    rate = math.sqrt(2.0 * params.kappa_tot)
    collapse = [rate * a, rate * b]
    if params.gamma > 0:
        collapse.append(math.sqrt(2.0 * params.gamma) * sm)
    return ModelInstance(
        kind=ModelKind.TWO_MODE,
        space=space,
        hamiltonian=h0 + drive,
        drive_term=drive,
        collapse_ops=tuple(collapse),
        mode_ops=ops,
        atom_op=sm,
        input=input,
        params=params,
    )


def build_model(params: SystemParams, input: PortSpec | int, kind: ModelKind = ModelKind.TWO_MODE) -> ModelInstance:
    kind = ModelKind(kind)
    if kind is ModelKind.SIMPLIFIED:
        return build_simplified(params, input)
    return build_two_mode(params, input)


def is_undercoupled(params: SystemParams, margin: float = 1.0) -> bool:
    """True when both fiber rates are below ``margin`` times the strong-mode atom-induced loss."""
    strong = params.strong_mode()
    if strong is None:
        return False
    g = params.coupling(strong)
    loss = (g * g / complex(params.gamma, params.delta_al)).real
    return max(params.kappa_a, params.kappa_b) < margin * loss


__all__ = [
    "TWO_PI",
    "DEFAULT_EPSILON",
    "AtomState",
    "Fiber",
    "ResonatorMode",
    "ModelKind",
    "SystemParams",
    "PortSpec",
    "OutputChannel",
    "ModelInstance",
    "port_output_map",
    "transmitted_port",
    "cross_port",
    "build_simplified",
    "build_two_mode",
    "build_model",
    "is_undercoupled",
]
