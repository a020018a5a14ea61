"""Closed-form pulse primitives and their matrix-exponential cross-check.

Every primitive follows the -i*sin rotation convention:

  cavity exchange   |g, n+1>  ->  cos(L sqrt(n+1) t)|g, n+1> - i sin(...)|e, n>
  g-e drive         |g>       ->  cos(W t)|g> - i sin(W t)|e>
  i-e drive         |i>       ->  cos(W t)|i> - i sin(W t)|e>
  free evolution    |i>       ->  exp(-i w_gi t)|i>

The two-pulse (Raman) map on {|g>, |i>} with drive phase difference
dphi = phi1 - phi2 reads

  |g>  ->  cos(L' t)|g> + i exp(-i dphi) exp(-i w_gi t) sin(L' t)|i>
  |i>  ->  i exp(+i dphi) sin(L' t)|g> + exp(-i w_gi t) cos(L' t)|i>

which factors exactly as free_evolution(t) applied after the plain
rotation exp(+i L' t M), M = exp(i dphi)|g><i| + h.c.  The factored form
is what ``build_generator`` exposes: the Raman generator is the coupling
factor -L'M, and composing its exponential with the free-evolution
generator's exponential reproduces the map above.  No single
time-independent Hermitian generator can, because the map is not a
one-parameter group in t.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import LeakageError
from .hilbert import (
    LEVEL_E,
    LEVEL_G,
    LEVEL_I,
    BasisSpec,
    PureState,
    _check_squid,
    basis_index,
    basis_tuple,
)

E_LEAK_TOL = 1e-10


@dataclass(frozen=True)
class CouplingConfig:
    """Rates of the pulse primitives.

    lam            cavity exchange rate (resonant SQUID-cavity coupling)
    omega_ge       classical g-e drive Rabi rate
    omega_ie       classical i-e drive Rabi rate
    lambda_prime   effective two-pulse (Raman) rotation rate
    omega_gi       g-i level splitting, sets the free phase on |i>
    delta          common one-photon detuning of the two-pulse drives;
                   recorded for bookkeeping, never used by the maps
    """

    lam: float = 1.0
    omega_ge: float = 1.0
    omega_ie: float = 1.0
    lambda_prime: float = 1.0
    omega_gi: float = 20.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lam", "omega_ge", "omega_ie", "lambda_prime", "omega_gi"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")


DEFAULT_COUPLINGS = CouplingConfig()


class PulseVariant(str, enum.Enum):
    JC = "jc"
    DRIVE_GE = "drive_ge"
    DRIVE_IE = "drive_ie"
    RAMAN = "raman"
    FREE_EVOLVE = "free_evolve"


@dataclass(frozen=True)
class PulseOp:
    """One primitive pulse on one SQUID (plus the cavity for ``JC``)."""

    variant: PulseVariant
    squid: int
    duration: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self) -> None:
        if self.squid < 1:
            raise ValueError(f"squid index must be >= 1, got {self.squid}")
        if self.duration < 0.0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "target": self.squid,
            "duration": self.duration,
            "phi1": self.phi1,
            "phi2": self.phi2,
        }


def _axis_slices(ndim: int, assignments: dict[int, int]) -> tuple:
    sl: list = [slice(None)] * ndim
    for axis, value in assignments.items():
        sl[axis] = value
    return tuple(sl)


def _mix_pair(arr: np.ndarray, idx_a: tuple, idx_b: tuple, theta: float) -> None:
    # |a> -> cos|a> - i sin|b>, |b> -> cos|b> - i sin|a>, in place.
    a = arr[idx_a].copy()
    b = arr[idx_b]
    c, s = math.cos(theta), math.sin(theta)
    arr[idx_a] = c * a - 1j * s * b
    arr[idx_b] = c * b - 1j * s * a


def apply_jc(
    state: PureState, squid: int, duration: float, cfg: CouplingConfig = DEFAULT_COUPLINGS
) -> PureState:
    """Resonant cavity exchange on one SQUID's g-e transition.

    Each excitation sector {|g, n+1>, |e, n>} rotates by the angle
    lam * sqrt(n+1) * duration; |i, n> and |g, 0> are dark.  Within the
    truncated space |e, fock_cutoff> has no partner and stays put.
    """
    _check_squid(state.spec, squid)
    arr = state.tensor().copy()
    axis = squid - 1
    cavity_axis = state.spec.num_squids
    for n in range(state.spec.fock_cutoff):
        theta = cfg.lam * math.sqrt(n + 1) * duration
        idx_g = _axis_slices(arr.ndim, {axis: LEVEL_G, cavity_axis: n + 1})
        idx_e = _axis_slices(arr.ndim, {axis: LEVEL_E, cavity_axis: n})
        _mix_pair(arr, idx_g, idx_e, theta)
    return PureState(arr.reshape(-1), state.spec)


def _apply_drive(state: PureState, squid: int, theta: float, lower: int) -> PureState:
    _check_squid(state.spec, squid)
    arr = state.tensor().copy()
    axis = squid - 1
    idx_lo = _axis_slices(arr.ndim, {axis: lower})
    idx_e = _axis_slices(arr.ndim, {axis: LEVEL_E})
    _mix_pair(arr, idx_lo, idx_e, theta)
    return PureState(arr.reshape(-1), state.spec)


def apply_drive_ge(
    state: PureState, squid: int, duration: float, cfg: CouplingConfig = DEFAULT_COUPLINGS
) -> PureState:
    """Classical drive on the g-e transition; |i> is a spectator."""
    return _apply_drive(state, squid, cfg.omega_ge * duration, LEVEL_G)


def apply_drive_ie(
    state: PureState, squid: int, duration: float, cfg: CouplingConfig = DEFAULT_COUPLINGS
) -> PureState:
    """Classical drive on the i-e transition; |g> is a spectator."""
    return _apply_drive(state, squid, cfg.omega_ie * duration, LEVEL_I)


def apply_raman(
    state: PureState,
    squid: int,
    duration: float,
    phi1: float,
    phi2: float,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    e_tol: float = E_LEAK_TOL,
) -> PureState:
    """Effective two-pulse rotation between |g> and |i> (module docstring map).

    Valid only when the target carries no e population, since the level
    was eliminated from the effective model; a violation raises
    ``LeakageError``.  Pass ``e_tol=math.inf`` to skip the guard (the e
    amplitudes are then simply left untouched).
    """
    _check_squid(state.spec, squid)
    e_pop = state.level_population(squid, LEVEL_E)
    if e_pop >= e_tol:
        raise LeakageError(
            f"squid{squid} e-level population {e_pop} exceeds {e_tol}; "
            "two-pulse map undefined outside the g-i subspace"
        )
    arr = state.tensor().copy()
    axis = squid - 1
    dphi = phi1 - phi2
    c = math.cos(cfg.lambda_prime * duration)
    s = math.sin(cfg.lambda_prime * duration)
    free = cmath.exp(-1j * cfg.omega_gi * duration)
    idx_g = _axis_slices(arr.ndim, {axis: LEVEL_G})
    idx_i = _axis_slices(arr.ndim, {axis: LEVEL_I})
    g_old = arr[idx_g].copy()
    i_old = arr[idx_i]
    arr[idx_g] = c * g_old + 1j * cmath.exp(1j * dphi) * s * i_old
    arr[idx_i] = free * (1j * cmath.exp(-1j * dphi) * s * g_old + c * i_old)
    return PureState(arr.reshape(-1), state.spec)


def apply_free_evolution(
    state: PureState, squid: int, duration: float, cfg: CouplingConfig = DEFAULT_COUPLINGS
) -> PureState:
    """Free phase accumulation: |i> -> exp(-i omega_gi t)|i>, |g> and |e> fixed."""
    _check_squid(state.spec, squid)
    arr = state.tensor().copy()
    idx_i = _axis_slices(arr.ndim, {squid - 1: LEVEL_I})
    arr[idx_i] = cmath.exp(-1j * cfg.omega_gi * duration) * arr[idx_i]
    return PureState(arr.reshape(-1), state.spec)


def apply_pulse_op(
    state: PureState,
    op: PulseOp,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    e_tol: float = E_LEAK_TOL,
) -> PureState:
    if op.variant is PulseVariant.JC:
        return apply_jc(state, op.squid, op.duration, cfg)
    if op.variant is PulseVariant.DRIVE_GE:
        return apply_drive_ge(state, op.squid, op.duration, cfg)
    if op.variant is PulseVariant.DRIVE_IE:
        return apply_drive_ie(state, op.squid, op.duration, cfg)
    if op.variant is PulseVariant.RAMAN:
        return apply_raman(state, op.squid, op.duration, op.phi1, op.phi2, cfg, e_tol=e_tol)
    if op.variant is PulseVariant.FREE_EVOLVE:
        return apply_free_evolution(state, op.squid, op.duration, cfg)
    raise ValueError(f"unknown pulse variant {op.variant!r}")


def _embed_single_squid(spec: BasisSpec, squid: int, mat: np.ndarray) -> np.ndarray:
    """Lift a 3x3 single-SQUID operator to the full register."""
    full = np.zeros((spec.dimension, spec.dimension), dtype=np.complex128)
    for col in range(spec.dimension):
        levels, photons = basis_tuple(spec, col)
        src = levels[squid - 1]
        for dst in range(3):
            val = mat[dst, src]
            if val == 0.0:
                continue
            out = list(levels)
            out[squid - 1] = dst
            full[basis_index(spec, out, photons), col] = val
    return full


def build_generator(op: PulseOp, spec: BasisSpec, cfg: CouplingConfig = DEFAULT_COUPLINGS) -> np.ndarray:
    """Hermitian generator H whose exponential exp(-i H t) realizes ``op``.

    For ``RAMAN`` this is the coupling factor of the exact two-factor
    split described in the module docstring; compose its exponential
    with the ``FREE_EVOLVE`` generator's exponential (same target, same
    duration, free factor applied last) to rebuild the full map.
    """
    _check_squid(spec, op.squid)
    if op.variant is PulseVariant.JC:
        full = np.zeros((spec.dimension, spec.dimension), dtype=np.complex128)
        for col in range(spec.dimension):
            levels, photons = basis_tuple(spec, col)
            if levels[op.squid - 1] != LEVEL_E or photons + 1 > spec.fock_cutoff:
                continue
            out = list(levels)
            out[op.squid - 1] = LEVEL_G
            row = basis_index(spec, out, photons + 1)
            elem = cfg.lam * math.sqrt(photons + 1)
            full[row, col] = elem
            full[col, row] = elem
        return full
    mat = np.zeros((3, 3), dtype=np.complex128)
    if op.variant is PulseVariant.DRIVE_GE:
        mat[LEVEL_G, LEVEL_E] = mat[LEVEL_E, LEVEL_G] = cfg.omega_ge
    elif op.variant is PulseVariant.DRIVE_IE:
        mat[LEVEL_I, LEVEL_E] = mat[LEVEL_E, LEVEL_I] = cfg.omega_ie
    elif op.variant is PulseVariant.RAMAN:
        coupling = cmath.exp(1j * (op.phi1 - op.phi2))
        mat[LEVEL_G, LEVEL_I] = -cfg.lambda_prime * coupling
        mat[LEVEL_I, LEVEL_G] = -cfg.lambda_prime * coupling.conjugate()
    elif op.variant is PulseVariant.FREE_EVOLVE:
        mat[LEVEL_I, LEVEL_I] = cfg.omega_gi
    else:
        raise ValueError(f"unknown pulse variant {op.variant!r}")
    return _embed_single_squid(spec, op.squid, mat)


def evolve_exact(state: PureState, generator: np.ndarray, duration: float) -> PureState:
    """Apply exp(-i * generator * duration) via Hermitian eigendecomposition."""
    ham = np.asarray(generator, dtype=np.complex128)
    dim = state.spec.dimension
    if ham.shape != (dim, dim):
        raise ValueError(f"generator shape {ham.shape} does not match dimension {dim}")
    if float(np.max(np.abs(ham - ham.conj().T))) >= 1e-12:
        raise ValueError("generator is not Hermitian within 1e-12")
    evals, evecs = np.linalg.eigh(ham)
    phases = np.exp(-1j * evals * duration)
    amps = evecs @ (phases * (evecs.conj().T @ state.amplitudes))
    return PureState(amps, state.spec)
