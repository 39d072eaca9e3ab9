"""Operator algebra, Liouvillians and master-equation solvers.

Conventions
-----------
* Hilbert spaces are ordered tensor products of ``Atom`` and ``Mode`` factors;
  the basis of an ``Atom`` is ``(g, e)`` and a ``Mode`` uses Fock states
  ``0..n_max``.
* Rates are angular (rad/us); the Hamiltonian is given in the same units
  (hbar absorbed).
* Density matrices are vectorised by column stacking,
  ``vec(A X B) = (B^T kron A) vec(X)``.
* Collapse operators carry their rate: a channel with field decay rate
  ``kappa`` on mode ``a`` is passed as ``sqrt(2 kappa) a`` and enters the
  standard dissipator ``c rho c^+ - {c^+ c, rho}/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

__all__ = [
    "Atom",
    "Mode",
    "HilbertSpace",
    "QOp",
    "DensityMatrix",
    "Liouvillian",
    "SteadyStateError",
    "EvolutionError",
    "identity",
    "make_annihilation",
    "make_sigma_minus",
    "fock_state",
    "build_liouvillian",
    "steady_state",
    "evolve",
    "evolve_trajectory",
    "expect",
    "vec",
    "unvec",
]


class SteadyStateError(RuntimeError):
    """No unique steady state could be computed."""


class EvolutionError(RuntimeError):
    """Time integration of the master equation failed."""


@dataclass(frozen=True)
class Atom:
    levels: int = 2

    def __post_init__(self):
        if self.levels != 2:
            raise ValueError("only two-level atoms are supported")

    @property
    def dim(self) -> int:
        return self.levels


@dataclass(frozen=True)
class Mode:
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"Mode needs n_max >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


Factor = Union[Atom, Mode]


@dataclass(frozen=True)
class HilbertSpace:
    factors: tuple[Factor, ...]

    def __init__(self, *factors: Factor):
        if len(factors) == 1 and isinstance(factors[0], (tuple, list)):
            factors = tuple(factors[0])
        if not factors:
            raise ValueError("a Hilbert space needs at least one factor")
        for f in factors:
            if not isinstance(f, (Atom, Mode)):
                raise TypeError(f"unknown factor {f!r}")
        object.__setattr__(self, "factors", tuple(factors))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def embed(self, local: np.ndarray, index: int) -> np.ndarray:
        """Kronecker-embed a single-factor matrix, identity elsewhere."""
        mats = [np.eye(d) for d in self.dims]
        mats[index] = local
        return reduce(np.kron, mats)

    def _factor(self, index: int) -> Factor:
        if not -len(self.factors) <= index < len(self.factors):
            raise IndexError(f"factor index {index} out of range for {len(self.factors)} factors")
        return self.factors[index]


@dataclass(frozen=True, eq=False)
class QOp:
    """Dense operator on a :class:`HilbertSpace`."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match space dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def dag(self) -> "QOp":
        return QOp(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def _other(self, other: "QOp") -> np.ndarray:
        if other.space != self.space:
            raise ValueError("operators act on different spaces")
        return other.matrix

    def __add__(self, other):
        if isinstance(other, QOp):
            return QOp(self.space, self.matrix + self._other(other))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QOp):
            return QOp(self.space, self.matrix - self._other(other))
        return NotImplemented

    def __neg__(self):
        return QOp(self.space, -self.matrix)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return QOp(self.space, scalar * self.matrix)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QOp):
            return QOp(self.space, self.matrix @ self._other(other))
        return NotImplemented


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match space dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def check(self, herm_tol: float = 1e-10, trace_tol: float = 1e-10, eig_tol: float = 1e-8) -> None:
        """Raise ``ValueError`` unless the matrix is a valid state within tolerances."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > herm_tol:
            raise ValueError(f"density matrix not Hermitian (deviation {herm:.2e})")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise ValueError(f"density matrix trace {tr} != 1")
        lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
        if lam < -eig_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lam:.2e}")


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of the master equation in column-stacked superoperator form.

    ``superoperator`` is stored as a sparse CSC matrix; call :meth:`dense`
    for the full ``d^2 x d^2`` array.
    """

    space: HilbertSpace
    superoperator: sp.csc_matrix
    hamiltonian: QOp
    collapse_ops: tuple[QOp, ...] = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dense(self) -> np.ndarray:
        return self.superoperator.toarray()

    def apply(self, rho) -> np.ndarray:
        """Return ``L[rho]`` as a matrix."""
        m = _as_matrix(rho)
        return unvec(self.superoperator @ vec(m), self.dim)


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, (QOp, DensityMatrix)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def identity(space: HilbertSpace) -> QOp:
    return QOp(space, np.eye(space.dim))


def make_annihilation(space: HilbertSpace, factor_index: int) -> QOp:
    """Annihilation operator of the Mode at ``factor_index``, embedded in ``space``."""
    f = space._factor(factor_index)
    if not isinstance(f, Mode):
        raise TypeError(f"factor {factor_index} is {f!r}, not a Mode")
    local = np.diag(np.sqrt(np.arange(1, f.dim)), 1)
    return QOp(space, space.embed(local, factor_index))


def make_sigma_minus(space: HilbertSpace, factor_index: int) -> QOp:
    """Atomic lowering operator ``|g><e|`` of the Atom at ``factor_index``."""
    f = space._factor(factor_index)
    if not isinstance(f, Atom):
        raise TypeError(f"factor {factor_index} is {f!r}, not an Atom")
    local = np.array([[0.0, 1.0], [0.0, 0.0]])
    return QOp(space, space.embed(local, factor_index))


def fock_state(space: HilbertSpace, levels: Sequence[int]) -> DensityMatrix:
    """Projector onto the product basis state with the given per-factor levels."""
    if len(levels) != len(space.factors):
        raise ValueError("need one level per factor")
    idx = int(np.ravel_multi_index(tuple(levels), space.dims))
    m = np.zeros((space.dim, space.dim), dtype=complex)
    m[idx, idx] = 1.0
    return DensityMatrix(space, m)


def build_liouvillian(h: QOp, collapse_ops: Sequence[QOp] = ()) -> Liouvillian:
    """Assemble ``L[rho] = -i[H, rho] + sum_k D[c_k] rho``."""
    space = h.space
    for c in collapse_ops:
        if c.space != space:
            raise ValueError("collapse operator acts on a different space than the Hamiltonian")
    d = space.dim
    eye = sp.identity(d, dtype=complex, format="csr")
    hs = sp.csr_matrix(h.matrix)
    sup = -1j * (sp.kron(eye, hs) - sp.kron(hs.T, eye))
    for c in collapse_ops:
        cs = sp.csr_matrix(c.matrix)
        cdc = (cs.conj().T @ cs).tocsr()
        sup = sup + sp.kron(cs.conj(), cs) - 0.5 * (sp.kron(eye, cdc) + sp.kron(cdc.T, eye))
    sup = sp.csc_matrix(sup)
    sup.eliminate_zeros()
    return Liouvillian(space, sup, h, tuple(collapse_ops))


def steady_state(l: Liouvillian, residual_tol: float = 1e-9) -> DensityMatrix:
    """Unique steady state from an LU solve with the first row set to the trace constraint."""
    d = l.dim
    n = d * d
    keep = np.ones(n)
    keep[0] = 0.0
    trace_row = sp.csr_matrix(
        (np.ones(d, dtype=complex), (np.zeros(d, dtype=int), np.arange(d) * (d + 1))),
        shape=(n, n),
    )
    a = (sp.diags(keep) @ l.superoperator + trace_row).tocsc()
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0
    try:
        lu = spla.splu(a)
    except RuntimeError as exc:
        raise SteadyStateError(f"steady state is not unique (singular system: {exc})") from exc
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SteadyStateError("steady-state solve produced non-finite values")
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho)
    residual = np.max(np.abs(l.superoperator @ vec(rho)))
    if residual > residual_tol:
        raise SteadyStateError(
            f"steady-state residual {residual:.2e} exceeds {residual_tol:.0e}; "
            "the steady state may not be unique"
        )
    return DensityMatrix(l.space, rho)


def evolve_trajectory(
    l: Liouvillian,
    rho0,
    times: Sequence[float],
    rtol: float = 1e-10,
    atol: float = 1e-13,
    method: str = "DOP853",
) -> np.ndarray:
    """Propagate ``rho0`` under ``l`` and sample it at ``times``.

    ``rho0`` may be any square operator (quantum regression evolves
    non-states). Returns an array of shape ``(len(times), d, d)``. ``atol`` is
    relative to the largest entry of ``rho0``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-negative and sorted")
    d = l.dim
    m0 = _as_matrix(rho0)
    if m0.shape != (d, d):
        raise ValueError(f"operator shape {m0.shape} does not match dimension {d}")
    scale = np.max(np.abs(m0))
    out = np.empty((times.size, d, d), dtype=complex)
    if scale == 0.0:
        out[:] = 0.0
        return out
    y0 = vec(m0) / scale
    if times[-1] == 0.0:
        out[:] = m0
        return out
    s = l.superoperator

    def rhs(_t, y):
        return s @ y

    sol = solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        y0,
        method=method,
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if sol.status != 0:
        raise EvolutionError(
            f"integration failed ({sol.message}); the generator may be too stiff for "
            f"{method}: rescale rates to smaller units or pass method='BDF'"
        )
    for k in range(times.size):
        out[k] = unvec(sol.y[:, k], d) * scale
    return out


def evolve(l: Liouvillian, rho0, t: float, **kwargs) -> np.ndarray:
    """Return ``exp(L t)[rho0]``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return evolve_trajectory(l, rho0, [t], **kwargs)[0]


def expect(op: QOp, rho) -> complex:
    """``Tr(op rho)``."""
    m = _as_matrix(rho)
    if m.shape != op.matrix.shape:
        raise ValueError(f"dimension mismatch: {op.matrix.shape} vs {m.shape}")
    return complex(np.einsum("ij,ji->", op.matrix, m))
