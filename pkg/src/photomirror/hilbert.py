"""Dense state vectors, density matrices and operators on truncated Fock spaces.

Composite spaces are ordered (photon, mirror) with the photon index varying
slowest, so amplitude ``(i, j)`` of a two-part state lives at ``i * d_m + j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CutoffTooSmall, DimensionMismatch, NotHermitian, NotNormalized

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
# below this deviation a moment is treated as sharp
SHARP_TOL = 1e-12


def cutoff_adequate(alpha: complex, n_max: int) -> bool:
    a = abs(alpha)
    return a * a + 6.0 * a <= n_max


def default_cutoff(alpha_max: float) -> int:
    """Fock cutoff that keeps the coherent-state tail for ``|alpha| <= alpha_max``
    negligible: mean photon number plus six standard deviations plus ten."""
    a = abs(alpha_max)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm pure state over one or more subsystems.

    Args:
        dims: subsystem dimensions, e.g. ``(2, n_max + 1)``.
        amps: complex amplitudes in row-major subsystem order.
    """

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if int(np.prod(dims)) != amps.size:
            raise DimensionMismatch(f"dims {dims} do not match {amps.size} amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm is {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, dims: Sequence[int], amps) -> StateVector:
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise NotNormalized("cannot normalize the zero vector")
        return cls(tuple(dims), amps / norm)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), dims=self.dims)

    def with_phase(self, phase: complex) -> StateVector:
        return StateVector(self.dims, self.amps * phase)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    ``dims`` records the subsystem split; it defaults to a single subsystem.
    """

    entries: np.ndarray
    dims: tuple[int, ...] = field(default=())
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        dims = tuple(int(d) for d in self.dims) or (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionMismatch(f"dims {dims} do not match size {m.shape[0]}")
        if self.check:
            if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
                raise NotHermitian("density matrix is not Hermitian")
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise NotNormalized(f"density matrix trace is {tr!r}")
            if np.linalg.eigvalsh(m).min() < -PSD_TOL:
                raise NotNormalized("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class Operator:
    """Square matrix tagged as ``hermitian``, ``unitary`` or ``general``.

    The tag is checked on construction.
    """

    entries: np.ndarray
    tag: str = "general"

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {m.shape}")
        if self.tag == "hermitian":
            if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
                raise NotHermitian("operator tagged hermitian is not Hermitian")
        elif self.tag == "unitary":
            defect = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])), initial=0.0)
            if defect > HERMITIAN_TOL:
                raise ValueError(f"operator tagged unitary has defect {defect:.3g}")
        elif self.tag != "general":
            raise ValueError(f"unknown operator tag {self.tag!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def basis_state(dims: Sequence[int] | int, index: Sequence[int] | int) -> StateVector:
    """Computational basis vector; ``index`` is a tuple over subsystems."""
    if isinstance(dims, int):
        dims = (dims,)
    dims = tuple(dims)
    if isinstance(index, int):
        index = (index,)
    flat = int(np.ravel_multi_index(tuple(index), dims))
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[flat] = 1.0
    return StateVector(dims, amps)


def fock_state(n: int, n_max: int) -> StateVector:
    return basis_state(n_max + 1, n)


def coherent_state(alpha: complex, n_max: int | None = None) -> StateVector:
    """Coherent state |alpha> truncated to Fock levels 0..n_max.

    Amplitudes follow alpha**n / sqrt(n!) and are renormalized after
    truncation. With ``n_max=None`` the default cutoff for ``alpha`` is used.

    Raises:
        CutoffTooSmall: if ``|alpha|**2 + 6|alpha| > n_max``.
    """
    alpha = complex(alpha)
    if n_max is None:
        n_max = default_cutoff(abs(alpha))
    if n_max < 1:
        raise CutoffTooSmall(f"n_max must be >= 1, got {n_max}")
    if not cutoff_adequate(alpha, n_max):
        a = abs(alpha)
        raise CutoffTooSmall(
            f"n_max={n_max} too small for |alpha|={a:.6g} "
            f"(needs >= {a * a + 6 * a:.6g})"
        )
    # running product alpha**n / sqrt(n!) avoids factorial overflow
    steps = alpha / np.sqrt(np.arange(1, n_max + 1, dtype=float))
    amps = np.concatenate(([1.0 + 0j], np.cumprod(steps)))
    return StateVector.normalized((n_max + 1,), amps)


def _require_same_dims(a, b):
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims {a.dims} and {b.dims} differ")


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>, antilinear in ``a``."""
    _require_same_dims(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(overlap(a, b)) ** 2


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    return StateVector.normalized(a.dims + b.dims, np.kron(a.amps, b.amps))


def partial_trace(state: StateVector | DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced density matrix of subsystem ``keep`` of a bipartite state."""
    if len(state.dims) != 2:
        raise DimensionMismatch(f"expected two subsystems, got dims {state.dims}")
    if keep not in (0, 1):
        raise DimensionMismatch(f"keep must be 0 or 1, got {keep}")
    d0, d1 = state.dims
    if isinstance(state, StateVector):
        psi = state.amps.reshape(d0, d1)
        red = psi @ psi.conj().T if keep == 0 else psi.T @ psi.conj()
    else:
        rho = state.entries.reshape(d0, d1, d0, d1)
        red = np.einsum("ijkj->ik", rho) if keep == 0 else np.einsum("ijil->jl", rho)
    # symmetrize away rounding before validation
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(red)


def purity(rho: DensityMatrix) -> float:
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho.entries) ** 2))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    diff = a.entries - b.entries
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def mixture(states: Sequence[StateVector], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination of pure-state projectors."""
    if len(states) != len(weights):
        raise DimensionMismatch("states and weights differ in length")
    dims = states[0].dims
    rho = np.zeros((states[0].dim, states[0].dim), dtype=complex)
    for s, w in zip(states, weights):
        if s.dims != dims:
            raise DimensionMismatch(f"dims {s.dims} and {dims} differ")
        rho += w * np.outer(s.amps, s.amps.conj())
    return DensityMatrix(rho, dims=dims)


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def number_operator(n_max: int) -> Operator:
    return Operator(np.diag(np.arange(n_max + 1, dtype=float)), "hermitian")


def rotated_quadrature(n_max: int, theta: float) -> Operator:
    """X_theta = (b e^{-i theta} + b^dag e^{i theta}) / sqrt(2).

    theta=0 gives X, theta=pi/2 gives P.
    """
    b = annihilation(n_max)
    m = (b * np.exp(-1j * theta) + b.conj().T * np.exp(1j * theta)) / math.sqrt(2.0)
    return Operator(0.5 * (m + m.conj().T), "hermitian")


def quadrature_observables(n_max: int) -> tuple[Operator, Operator]:
    """Position- and momentum-like quadratures X and P on the truncated space."""
    if n_max < 1:
        raise CutoffTooSmall(f"n_max must be >= 1, got {n_max}")
    b = annihilation(n_max)
    bd = b.conj().T
    x = (b + bd) / math.sqrt(2.0)
    p = 1j * (bd - b) / math.sqrt(2.0)
    return Operator(x, "hermitian"), Operator(p, "hermitian")


def moments(psi: StateVector, op: Operator) -> tuple[float, float]:
    """Mean and standard deviation of a Hermitian observable in ``psi``."""
    if op.tag != "hermitian":
        raise NotHermitian("moments need an operator tagged hermitian")
    if op.dim != psi.dim:
        raise DimensionMismatch(f"operator dim {op.dim} vs state dim {psi.dim}")
    a_psi = op.entries @ psi.amps
    mean = np.vdot(psi.amps, a_psi).real
    second = np.vdot(a_psi, a_psi).real
    return float(mean), math.sqrt(max(0.0, second - mean * mean))
