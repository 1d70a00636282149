"""Von Neumann premeasurement, wave-packet criteria and branch selection.

A premeasurement correlates an object basis with pointer packets without
touching the expansion coefficients. Branch selection ("selfdecoherence")
is only admitted when the pointer packets are weakly interfering; it then
picks one branch with its Born weight from a seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotNormalized, PacketsInterfere
from .hilbert import (
    NORM_TOL,
    SHARP_TOL,
    Operator,
    StateVector,
    mixture,
    moments,
    overlap,
    tensor_product,
    trace_distance,
)
from .propagator import check_orthonormal

DEFAULT_THRESHOLD = 10.0
# coherent-state overlap at one width of separation is exp(-1/2) ~ 0.6065
DEFAULT_OVERLAP_TOL = 0.61
WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PointerBasis:
    """Pointer packets with their phase-space centers and common width."""

    packets: tuple[StateVector, ...]
    centers: tuple[complex, ...]
    width: float = 1.0

    def __post_init__(self):
        packets = tuple(self.packets)
        centers = tuple(complex(c) for c in self.centers)
        if len(packets) != len(centers):
            raise DimensionMismatch("packets and centers differ in length")
        for p in packets:
            if p.dims != packets[0].dims:
                raise DimensionMismatch("pointer packets live on different spaces")
        object.__setattr__(self, "packets", packets)
        object.__setattr__(self, "centers", centers)

    def __len__(self):
        return len(self.packets)


@dataclass(frozen=True, eq=False)
class BranchOutcome:
    index: int
    object_state: StateVector
    pointer_state: StateVector
    weight: float
    product: StateVector = field(repr=False, default=None)


def ready_state(
    coeffs: Sequence[complex],
    object_basis: Sequence[StateVector],
    pointer_basis: PointerBasis,
    ready_index: int = 0,
) -> StateVector:
    """Uncorrelated object+pointer state before the measurement interaction."""
    obj = _object_state(coeffs, object_basis)
    return tensor_product(obj, pointer_basis.packets[ready_index])


def _object_state(coeffs, object_basis) -> StateVector:
    coeffs = np.asarray(coeffs, dtype=complex)
    total = float(np.sum(np.abs(coeffs) ** 2))
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"sum |c_n|^2 = {total!r}")
    if len(coeffs) != len(object_basis):
        raise DimensionMismatch("coefficients and object basis differ in length")
    check_orthonormal(object_basis)
    amps = sum(c * b.amps for c, b in zip(coeffs, object_basis))
    return StateVector(object_basis[0].dims, amps)


def premeasure(
    coeffs: Sequence[complex],
    object_basis: Sequence[StateVector],
    pointer_basis: PointerBasis,
    ready_index: int = 0,
) -> StateVector:
    """Correlated state sum_n c_n |o_n> (x) |m_n> produced by an ideal
    premeasurement from the ready pointer state ``ready_index``."""
    _object_state(coeffs, object_basis)
    if len(pointer_basis) < len(coeffs):
        raise DimensionMismatch("fewer pointer packets than object basis states")
    if not 0 <= ready_index < len(pointer_basis):
        raise DimensionMismatch(f"ready_index {ready_index} out of range")
    amps = sum(
        c * np.kron(o.amps, m.amps)
        for c, o, m in zip(coeffs, object_basis, pointer_basis.packets)
    )
    dims = object_basis[0].dims + pointer_basis.packets[0].dims
    return StateVector.normalized(dims, amps)


def differs_from_mixture(
    correlated: StateVector,
    branches: Sequence[StateVector],
    weights: Sequence[float],
) -> float:
    """Trace distance between the correlated pure state and the Born mixture
    of its product branches."""
    total = float(np.sum(weights))
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"weights sum to {total!r}")
    for b in branches:
        if b.dims != correlated.dims:
            raise DimensionMismatch(f"branch dims {b.dims} vs {correlated.dims}")
    return trace_distance(correlated.density(), mixture(branches, weights))


def wave_packet_ratio(psi: StateVector, op: Operator) -> float:
    """|<A>| / Delta A; ``inf`` for a sharp nonzero mean, 0 for a zero mean."""
    mean, dev = moments(psi, op)
    if mean == 0.0:
        return 0.0
    if dev <= SHARP_TOL:
        return math.inf
    return abs(mean) / dev


def is_wave_packet(
    psi: StateVector,
    observables: Sequence[Operator],
    threshold: float = DEFAULT_THRESHOLD,
    rtol: float = 1e-9,
) -> bool:
    """True iff every observable's ratio reaches ``threshold``.

    ``rtol`` absorbs rounding for states sitting exactly on the threshold.
    """
    if not threshold > 1:
        raise ValueError(f"threshold must exceed 1, got {threshold}")
    floor = threshold * (1.0 - rtol)
    return all(wave_packet_ratio(psi, a) >= floor for a in observables)


def interference_violation(
    basis: PointerBasis, overlap_tol: float = DEFAULT_OVERLAP_TOL
) -> tuple[int, int, float, float] | None:
    """First packet pair breaking weak interference, as (i, j, |overlap|,
    separation), or None when every pair is fine."""
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            sep = abs(basis.centers[i] - basis.centers[j])
            ov = abs(overlap(basis.packets[i], basis.packets[j]))
            if sep < basis.width or ov > overlap_tol:
                return i, j, ov, sep
    return None


def is_weakly_interfering(
    basis: PointerBasis, overlap_tol: float = DEFAULT_OVERLAP_TOL
) -> bool:
    """Every pair of packets is at least one width apart and overlaps by no
    more than ``overlap_tol``."""
    if not 0 < overlap_tol < 1:
        raise ValueError(f"overlap_tol must lie in (0, 1), got {overlap_tol}")
    return interference_violation(basis, overlap_tol) is None


def _branch_components(correlated: StateVector, object_basis) -> np.ndarray:
    if len(correlated.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite state, got dims {correlated.dims}")
    d0, d1 = correlated.dims
    for o in object_basis:
        if o.dims != (d0,):
            raise DimensionMismatch(f"object state dims {o.dims} vs ({d0},)")
    check_orthonormal(object_basis)
    psi = correlated.amps.reshape(d0, d1)
    return np.array([o.amps.conj() @ psi for o in object_basis])


def born_weights(correlated: StateVector, object_basis: Sequence[StateVector]) -> np.ndarray:
    """Squared norms of the pointer components paired with each object state."""
    comps = _branch_components(correlated, object_basis)
    w = np.sum(np.abs(comps) ** 2, axis=1)
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise NotNormalized(f"Born weights sum to {w.sum()!r}; object basis incomplete")
    return w


def _gate(pointer_basis: PointerBasis, overlap_tol: float) -> None:
    if len(pointer_basis) < 2:
        raise ValueError("branch selection needs at least two pointer packets")
    bad = interference_violation(pointer_basis, overlap_tol)
    if bad is not None:
        i, j, ov, sep = bad
        raise PacketsInterfere((i, j), ov, sep)


def draw_branches(
    correlated: StateVector,
    object_basis: Sequence[StateVector],
    pointer_basis: PointerBasis,
    n_draws: int,
    seed: int,
    overlap_tol: float = DEFAULT_OVERLAP_TOL,
) -> np.ndarray:
    """Indices of ``n_draws`` independent branch selections from one seeded
    generator. The first entry is what :func:`selfdecohere` returns."""
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    _gate(pointer_basis, overlap_tol)
    w = born_weights(correlated, object_basis)
    rng = np.random.default_rng(seed)
    return rng.choice(len(w), size=n_draws, p=w / w.sum())


def selfdecohere(
    correlated: StateVector,
    object_basis: Sequence[StateVector],
    pointer_basis: PointerBasis,
    overlap_tol: float = DEFAULT_OVERLAP_TOL,
    seed: int = 0,
) -> BranchOutcome:
    """Select one branch of a correlated object+pointer state.

    Raises:
        PacketsInterfere: if the pointer packets are not weakly interfering.
    """
    n = int(draw_branches(correlated, object_basis, pointer_basis, 1, seed, overlap_tol)[0])
    comps = _branch_components(correlated, object_basis)
    w = float(np.sum(np.abs(comps[n]) ** 2))
    pointer = StateVector.normalized(pointer_basis.packets[0].dims, comps[n])
    obj = object_basis[n]
    return BranchOutcome(n, obj, pointer, w, tensor_product(obj, pointer))
