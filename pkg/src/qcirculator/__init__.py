"""Master-equation and closed-form simulator of a single-atom chiral WGM circulator."""

from .analytic import (
    Coupling,
    analytic_metrics,
    analytic_transmissions,
    atom_induced_loss,
    empty_cross_transmission,
)
from .correlations import CorrelationTrace, DarkPortError, correlation_model, g2, output_operator
from .model import (
    AtomState,
    Fiber,
    ModelKind,
    PortSpec,
    ResonatorMode,
    SystemParams,
    build_model,
    build_simplified,
    build_two_mode,
    port_output_map,
)
from .observables import (
    CirculatorMetrics,
    Direction,
    TransmissionMatrix,
    metrics,
    output_amplitudes,
    transmission_matrix,
)
from .scan import Objective, ScanResult, find_optimum, scan_coupling

__version__ = "0.1.0"
