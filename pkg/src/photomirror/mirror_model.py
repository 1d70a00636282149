"""Single photon in a Michelson interferometer with a movable mirror in arm A.

The photon (arm B = index 0, arm A = index 1) and the mirror oscillator
start in ((|B> + |A>)/sqrt 2) (x) |0>. Radiation pressure displaces the
mirror only in the arm-A branch::

    |psi(t)> = e^{-i w_p t}/sqrt 2 (|B>|0> + f(t) |A>|beta(t)>)
    f(t)     = exp(i k^2 (w_m t - sin w_m t))
    beta(t)  = k (1 - e^{-i w_m t})

Fringe visibility is exp(-k^2 (1 - cos w_m t)) and revives fully at every
mirror period T_m = 2 pi / w_m. Environmental dephasing is modeled by a
single factor exp(-gamma t) on the photon coherence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CutoffTooSmall, PreconditionFailed, Unreachable
from .hilbert import (
    DensityMatrix,
    StateVector,
    basis_state,
    coherent_state,
    cutoff_adequate,
    default_cutoff,
    partial_trace,
    purity,
    tensor_product,
)
from .measurement import PointerBasis
from .propagator import ARM_A, ARM_B, HamiltonianSpec

DEFAULT_REVIVAL_TOL = 0.01
DEFAULT_SUPPRESSION_TOL = 0.2
DEFAULT_WINDOW_THRESHOLD = 0.5

RELATIVE = "RelativeDecoherence"
ABSOLUTE = "AbsoluteDecoherence"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ModelParams:
    """Experiment parameters.

    ``n_max=None`` picks the default cutoff for the largest mirror
    displacement 2k. ``gamma`` is an absolute rate (1/time).
    """

    k: float = 1.0
    omega_m: float = 1.0
    omega_p: float = 0.0
    n_max: int | None = None
    gamma: float = 0.0

    def __post_init__(self):
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_cutoff(2 * self.k))
        elif self.n_max < 1:
            raise CutoffTooSmall(f"n_max must be >= 1, got {self.n_max}")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega_m

    def check_cutoff(self) -> None:
        """Raise CutoffTooSmall unless n_max covers the peak displacement 2k."""
        if not cutoff_adequate(2 * self.k, self.n_max):
            a = 2 * self.k
            raise CutoffTooSmall(
                f"n_max={self.n_max} too small for peak displacement {a:.6g} "
                f"(needs >= {a * a + 6 * a:.6g})"
            )

    def hamiltonian_spec(self) -> HamiltonianSpec:
        return HamiltonianSpec(self.omega_p, self.omega_m, self.k, self.n_max)


@dataclass(frozen=True)
class VisibilityCurve:
    times: np.ndarray
    visibility: np.ndarray
    phase: np.ndarray
    mirror_purity: np.ndarray
    overlap: np.ndarray

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class Verdict:
    label: str
    mid_visibility: float
    revival_visibility: float


def arm_states() -> tuple[StateVector, StateVector]:
    """Photon arm basis (|B>, |A>)."""
    return basis_state(2, ARM_B), basis_state(2, ARM_A)


def initial_state(params: ModelParams) -> StateVector:
    amps = np.zeros(2, dtype=complex)
    amps[ARM_B] = amps[ARM_A] = 1 / math.sqrt(2)
    photon = StateVector((2,), amps)
    return tensor_product(photon, basis_state(params.n_max + 1, 0))


def kerr_phase(params: ModelParams, t: float) -> complex:
    wt = params.omega_m * t
    return complex(np.exp(1j * params.k**2 * (wt - math.sin(wt))))


def mirror_displacement(params: ModelParams, t: float) -> complex:
    return params.k * (1 - complex(np.exp(-1j * params.omega_m * t)))


def _mirror_packet(params: ModelParams, t: float) -> StateVector:
    params.check_cutoff()
    return coherent_state(mirror_displacement(params, t), params.n_max)


def joint_state(params: ModelParams, t: float) -> StateVector:
    """Exact photon+mirror state at time ``t``.

    Raises:
        CutoffTooSmall: if n_max cannot hold displacements up to 2k.
    """
    d = params.n_max + 1
    packet = _mirror_packet(params, t)
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1.0
    # rows ordered (B, A)
    amps = np.concatenate([vac, kerr_phase(params, t) * packet.amps])
    amps *= np.exp(-1j * params.omega_p * t) / math.sqrt(2)
    return StateVector((2, d), amps)


def _dephasing_factor(gamma: float, t) -> np.ndarray | float:
    return np.exp(-gamma * np.asarray(t, dtype=float))


def _photon_visibility(state: StateVector) -> float:
    rho_p = partial_trace(state, keep=0)
    return 2 * abs(rho_p.entries[ARM_B, ARM_A])


def visibility(params: ModelParams, t: float) -> float:
    """Fringe visibility 2|rho_BA| of the reduced photon state, including
    dephasing at rate ``params.gamma``."""
    v = _photon_visibility(joint_state(params, t)) * _dephasing_factor(params.gamma, t)
    return float(min(v, 1.0))


def visibility_curve(
    params: ModelParams, t_start: float, t_end: float, samples: int
) -> VisibilityCurve:
    """Sweep visibility, fringe phase, mirror purity and <0|beta(t)> over an
    inclusive uniform grid."""
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    params.check_cutoff()
    times = np.linspace(t_start, t_end, samples)
    vis = np.empty(samples)
    phase = np.empty(samples)
    pur = np.empty(samples)
    ovl = np.empty(samples, dtype=complex)
    for i, t in enumerate(times):
        psi = joint_state(params, t)
        ovl[i] = _mirror_packet(params, t).amps[0]
        rho_p = partial_trace(psi, keep=0)
        vis[i] = min(2 * abs(rho_p.entries[ARM_B, ARM_A]), 1.0)
        phase[i] = float(np.angle(kerr_phase(params, t)))
        # both halves of a pure state share one Schmidt spectrum
        pur[i] = purity(rho_p)
    vis = vis * _dephasing_factor(params.gamma, times)
    return VisibilityCurve(times, vis, phase, pur, ovl)


def correlation_window(
    params: ModelParams, threshold: float = DEFAULT_WINDOW_THRESHOLD
) -> float:
    """First time at which visibility falls to ``threshold`` (half the
    correlation window). The search covers the first half period, where
    visibility decreases monotonically; bisection runs to 1e-10 T_m.

    Raises:
        Unreachable: if visibility stays above ``threshold`` up to T_m / 2.
    """
    if threshold >= 1:
        return 0.0
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if params.k <= 0:
        raise Unreachable("no coupling: visibility never drops")
    period = params.period
    lo, hi = 0.0, period / 2
    v_min = visibility(params, hi)
    if v_min > threshold:
        raise Unreachable(f"minimum visibility {v_min:.6g} exceeds threshold {threshold}")
    while hi - lo > 1e-10 * period:
        mid = 0.5 * (lo + hi)
        if visibility(params, mid) > threshold:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def distinguishability_ok(params: ModelParams) -> bool:
    return params.k**2 >= 1


def pointer_set(params: ModelParams, t: float) -> PointerBasis:
    """The two mirror packets {|0>, |beta(t)>} correlated with arms B and A."""
    params.check_cutoff()
    beta = mirror_displacement(params, t)
    packets = (coherent_state(0.0, params.n_max), coherent_state(beta, params.n_max))
    return PointerBasis(packets, (0.0, beta), 1.0)


def apply_dephasing(obj, gamma: float, t: float | None = None):
    """Damp the photon coherence by exp(-gamma t).

    Accepts a VisibilityCurve (each sample damped at its own time, ``t``
    ignored), a joint StateVector or a joint DensityMatrix (both returned as
    DensityMatrix, since a dephased pure state is mixed).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    if isinstance(obj, VisibilityCurve):
        return replace(obj, visibility=obj.visibility * _dephasing_factor(gamma, obj.times))
    if t is None:
        raise ValueError("t is required when dephasing a state")
    if isinstance(obj, StateVector):
        if gamma == 0:
            return obj.density()
        obj = obj.density()
    if not isinstance(obj, DensityMatrix):
        raise TypeError(f"cannot dephase {type(obj).__name__}")
    if gamma == 0:
        return obj
    d0, d1 = obj.dims
    rho = obj.entries.reshape(d0, d1, d0, d1).copy()
    factor = math.exp(-gamma * t)
    for i in range(d0):
        for j in range(d0):
            if i != j:
                rho[i, :, j, :] *= factor
    return DensityMatrix(rho.reshape(d0 * d1, d0 * d1), dims=obj.dims)


def discriminate(
    params: ModelParams,
    revival_tol: float = DEFAULT_REVIVAL_TOL,
    suppression_tol: float = DEFAULT_SUPPRESSION_TOL,
) -> Verdict:
    """Compare mid-period suppression with the full-period revival.

    Suppressed then revived visibility means the loss of coherence was
    relative; suppressed and never restored means it was absolute.

    Raises:
        PreconditionFailed: if k^2 < 1, so the branches never separate.
    """
    if not distinguishability_ok(params):
        raise PreconditionFailed(f"k^2 = {params.k**2:.6g} < 1: branches never separate")
    for name, tol in (("revival_tol", revival_tol), ("suppression_tol", suppression_tol)):
        if not 0 < tol < 1:
            raise ValueError(f"{name} must lie in (0, 1), got {tol}")
    v_mid = visibility(params, params.period / 2)
    v_rev = visibility(params, params.period)
    if v_mid <= suppression_tol:
        label = RELATIVE if v_rev >= 1 - revival_tol else ABSOLUTE
    else:
        label = INCONCLUSIVE
    return Verdict(label, v_mid, v_rev)


__all__ = [
    "ABSOLUTE",
    "INCONCLUSIVE",
    "RELATIVE",
    "ModelParams",
    "Verdict",
    "VisibilityCurve",
    "apply_dephasing",
    "arm_states",
    "correlation_window",
    "discriminate",
    "distinguishability_ok",
    "initial_state",
    "joint_state",
    "kerr_phase",
    "mirror_displacement",
    "pointer_set",
    "visibility",
    "visibility_curve",
]
