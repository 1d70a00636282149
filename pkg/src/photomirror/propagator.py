"""Unitary evolution under time-independent Hamiltonians.

Besides the generic ``evolve`` this module builds the single-photon
optomechanical Hamiltonian (in units of hbar)::

    H = omega_p * 1 + omega_m * b^dag b - k * omega_m * Pi_A (b + b^dag)

whose exact solution is the closed-form photon/mirror state in
:mod:`photomirror.mirror_model`. Evolving numerically under it gives an
independent check on that closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BasisNotOrthonormal, DimensionMismatch, NotHermitian
from .hilbert import HERMITIAN_TOL, Operator, StateVector, annihilation

ARM_B = 0
ARM_A = 1


@dataclass(frozen=True)
class HamiltonianSpec:
    omega_p: float
    omega_m: float
    k: float
    n_max: int

    def __post_init__(self):
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")


def build_hamiltonian(spec: HamiltonianSpec) -> Operator:
    """Composite (photon, mirror) Hamiltonian of dimension 2 * (n_max + 1)."""
    d = spec.n_max + 1
    b = annihilation(spec.n_max)
    bd = b.conj().T
    proj_a = np.diag([0.0, 1.0]).astype(complex)
    h = spec.omega_p * np.eye(2 * d, dtype=complex)
    h += spec.omega_m * np.kron(np.eye(2), bd @ b)
    h -= spec.k * spec.omega_m * np.kron(proj_a, b + bd)
    return Operator(h, "hermitian")


def _check_hermitian(h: Operator) -> None:
    m = h.entries
    if h.tag != "hermitian" and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("evolution requires a Hermitian generator")


class Evolver:
    """Spectral decomposition of H, reused across many evolution times."""

    def __init__(self, h: Operator):
        _check_hermitian(h)
        m = 0.5 * (h.entries + h.entries.conj().T)
        self.dim = h.dim
        self.energies, self.vectors = np.linalg.eigh(m)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.energies * t)
        return (self.vectors * phases) @ self.vectors.conj().T

    def __call__(self, t: float, psi0: StateVector) -> StateVector:
        if psi0.dim != self.dim:
            raise DimensionMismatch(f"state dim {psi0.dim} vs generator dim {self.dim}")
        coeffs = self.vectors.conj().T @ psi0.amps
        amps = self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)
        # rounding in the eigenbasis leaves norm errors near 1e-15
        return StateVector.normalized(psi0.dims, amps)


def evolve(h: Operator, t: float, psi0: StateVector) -> StateVector:
    """psi(t) = exp(-i H t) psi0 via the eigendecomposition of H."""
    if t == 0:
        _check_hermitian(h)
        if psi0.dim != h.dim:
            raise DimensionMismatch(f"state dim {psi0.dim} vs generator dim {h.dim}")
        return psi0
    return Evolver(h)(t, psi0)


def unitarity_defect(h: Operator, t: float) -> float:
    """max |U^dag U - I| for U = exp(-i H t)."""
    u = Evolver(h).unitary(t)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(h.dim))))


def check_orthonormal(basis: Sequence[StateVector], tol: float = 1e-10) -> None:
    mat = np.array([s.amps for s in basis])
    gram = mat.conj() @ mat.T
    if np.max(np.abs(gram - np.eye(len(basis))), initial=0.0) > tol:
        raise BasisNotOrthonormal("basis vectors are not orthonormal")


def coefficient_conservation(
    h: Operator, basis: Sequence[StateVector], psi0: StateVector, t: float
) -> float:
    """Largest change in expansion-coefficient magnitude when both the basis
    and the state are carried along by the same evolution."""
    check_orthonormal(basis)
    ev = Evolver(h)
    psi_t = ev(t, psi0)
    worst = 0.0
    for vec in basis:
        before = abs(np.vdot(vec.amps, psi0.amps))
        after = abs(np.vdot(ev(t, vec).amps, psi_t.amps))
        worst = max(worst, abs(after - before))
    return worst
