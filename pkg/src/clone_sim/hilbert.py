"""Basis indexing, state vectors, partial traces, and fidelity measures.

The register holds ``num_squids`` three-level systems (levels g, i, e,
encoded 0, 1, 2) sharing one cavity mode truncated at ``fock_cutoff``
photons.  The flat index convention is fixed once, here: SQUID 1 is the
slowest axis and the cavity photon number is the fastest, so

    index = ((l1 * 3 + l2) * 3 + ... + lN) * (fock_cutoff + 1) + n

State vectors are immutable once constructed.  Operations never
renormalize silently; a drifted norm raises ``NormalizationError`` and
``PureState.from_amplitudes(..., normalize=True)`` is the one explicit
way to rescale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import LeakageError, NormalizationError

LEVEL_G, LEVEL_I, LEVEL_E = 0, 1, 2
LEVEL_NAMES = ("g", "i", "e")
NUM_LEVELS = 3

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
E_LEAK_TOL = 1e-10

# Qubit basis over (g, i): |+> = (|i> + |g>)/sqrt(2), |-> = (|i> - |g>)/sqrt(2).
PLUS_GI = np.array([1.0, 1.0]) / math.sqrt(2.0)
MINUS_GI = np.array([-1.0, 1.0]) / math.sqrt(2.0)


def level_code(level: int | str) -> int:
    """Map 'g'/'i'/'e' (or 0/1/2) to the numeric level code."""
    if isinstance(level, str):
        try:
            return LEVEL_NAMES.index(level)
        except ValueError:
            raise ValueError(f"unknown level {level!r}; expected one of {LEVEL_NAMES}") from None
    code = int(level)
    if code not in (LEVEL_G, LEVEL_I, LEVEL_E):
        raise ValueError(f"level code {level!r} outside 0..2")
    return code


@dataclass(frozen=True)
class BasisSpec:
    """Shape of the register: SQUID count and cavity photon cutoff."""

    num_squids: int = 3
    fock_cutoff: int = 2

    def __post_init__(self) -> None:
        if self.num_squids < 1:
            raise ValueError(f"num_squids must be >= 1, got {self.num_squids}")
        if self.fock_cutoff < 1:
            raise ValueError(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")

    @property
    def dimension(self) -> int:
        return NUM_LEVELS**self.num_squids * (self.fock_cutoff + 1)

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return (NUM_LEVELS,) * self.num_squids + (self.fock_cutoff + 1,)

    @property
    def factor_labels(self) -> tuple[str, ...]:
        return tuple(f"squid{k}" for k in range(1, self.num_squids + 1)) + ("cavity",)


def basis_index(spec: BasisSpec, levels: Sequence[int | str], photons: int) -> int:
    """Flat index of the product basis state with the given SQUID levels and photon number."""
    if len(levels) != spec.num_squids:
        raise ValueError(f"expected {spec.num_squids} levels, got {len(levels)}")
    if not 0 <= photons <= spec.fock_cutoff:
        raise ValueError(f"photon number {photons} outside 0..{spec.fock_cutoff}")
    idx = 0
    for lev in levels:
        idx = idx * NUM_LEVELS + level_code(lev)
    return idx * (spec.fock_cutoff + 1) + photons


def basis_tuple(spec: BasisSpec, index: int) -> tuple[tuple[int, ...], int]:
    """Inverse of ``basis_index``: (levels, photons) for a flat index."""
    if not 0 <= index < spec.dimension:
        raise ValueError(f"index {index} outside 0..{spec.dimension - 1}")
    index, photons = divmod(index, spec.fock_cutoff + 1)
    levels = []
    for _ in range(spec.num_squids):
        index, lev = divmod(index, NUM_LEVELS)
        levels.append(lev)
    return tuple(reversed(levels)), photons


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over a ``BasisSpec`` register.

    The amplitude array is copied on construction and marked read-only.
    Construction fails if the norm is off unity by more than ``NORM_TOL``.
    """

    amplitudes: np.ndarray
    spec: BasisSpec

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (self.spec.dimension,):
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, "
                f"basis dimension is {self.spec.dimension}"
            )
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) >= NORM_TOL:
            raise NormalizationError(
                f"state norm is {nrm!r}; use from_amplitudes(..., normalize=True) to rescale"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(
        cls, amplitudes: Iterable[complex], spec: BasisSpec, normalize: bool = False
    ) -> "PureState":
        amps = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes)
        amps = amps.astype(np.complex128).reshape(-1)
        if normalize:
            nrm = float(np.linalg.norm(amps))
            if nrm == 0.0:
                raise ValueError("cannot normalize a zero vector")
            amps = amps / nrm
        return cls(amps, spec)

    @classmethod
    def basis_state(cls, spec: BasisSpec, levels: Sequence[int | str], photons: int) -> "PureState":
        amps = np.zeros(spec.dimension, dtype=np.complex128)
        amps[basis_index(spec, levels, photons)] = 1.0
        return cls(amps, spec)

    def tensor(self) -> np.ndarray:
        """Read-only view shaped (3, ..., 3, fock_cutoff + 1)."""
        return self.amplitudes.reshape(self.spec.factor_dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def renormalized(self) -> "PureState":
        return PureState.from_amplitudes(self.amplitudes, self.spec, normalize=True)

    def level_population(self, squid: int, level: int | str) -> float:
        """Total probability of finding the given SQUID in the given level."""
        _check_squid(self.spec, squid)
        sl = [slice(None)] * (self.spec.num_squids + 1)
        sl[squid - 1] = level_code(level)
        return float(np.sum(np.abs(self.tensor()[tuple(sl)]) ** 2))

    def photon_tail_population(self, min_photons: int) -> float:
        """Total probability of the cavity holding at least ``min_photons`` photons."""
        if min_photons <= 0:
            return 1.0
        if min_photons > self.spec.fock_cutoff:
            return 0.0
        return float(np.sum(np.abs(self.tensor()[..., min_photons:]) ** 2))

    def to_dict(self) -> dict:
        return {
            "basis": {"num_squids": self.spec.num_squids, "fock_cutoff": self.spec.fock_cutoff},
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PureState":
        basis = payload["basis"]
        spec = BasisSpec(int(basis["num_squids"]), int(basis["fock_cutoff"]))
        amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
        return cls(amps, spec)


def _check_squid(spec: BasisSpec, squid: int) -> None:
    if not 1 <= squid <= spec.num_squids:
        raise ValueError(f"squid index {squid} outside 1..{spec.num_squids}")


def _check_same_spec(a: PureState, b: PureState) -> None:
    if a.spec != b.spec:
        raise ValueError(f"basis mismatch: {a.spec} vs {b.spec}")


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    _check_same_spec(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity_pure(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 between two pure states on the same register."""
    return abs(inner_product(a, b)) ** 2


def phase_aligned_distance(a: PureState, b: PureState) -> float:
    """min over theta of ||a - exp(i theta) b||.

    The minimizing phase is theta = arg <a|b>; the residual norm is then
    measured directly, which stays exact down to machine precision where
    the algebraic shortcut sqrt(2 - 2|<a|b>|) bottoms out near 1e-8.
    """
    ip = inner_product(a, b)
    # minimizer of ||a - e^{i theta} b||: e^{i theta} = conj(<a|b>)/|<a|b>|
    phase = ip.conjugate() / abs(ip) if abs(ip) > 0.0 else 1.0
    return float(np.linalg.norm(a.amplitudes - phase * b.amplitudes))


def equal_up_to_global_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """Whether min over theta of ||a - exp(i theta) b|| falls below ``tol``."""
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return phase_aligned_distance(a, b) < tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced density matrix over a subset of register factors.

    ``subsystem`` lists the kept factor labels in canonical register
    order (squid1, squid2, ..., cavity).  Construction validates
    Hermiticity, unit trace, and positivity up to small tolerances.
    """

    entries: np.ndarray
    subsystem: tuple[str, ...]
    spec: BasisSpec

    def __post_init__(self) -> None:
        mat = np.array(self.entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        expected = 1
        labels = self.spec.factor_labels
        dims = dict(zip(labels, self.spec.factor_dims))
        order = {label: k for k, label in enumerate(labels)}
        if not self.subsystem:
            raise ValueError("subsystem must name at least one kept factor")
        for label in self.subsystem:
            if label not in dims:
                raise ValueError(f"unknown factor {label!r}; expected one of {labels}")
            expected *= dims[label]
        if list(self.subsystem) != sorted(self.subsystem, key=order.__getitem__):
            raise ValueError(f"subsystem labels must follow register order, got {self.subsystem}")
        if mat.shape[0] != expected:
            raise ValueError(f"matrix dimension {mat.shape[0]} != subsystem dimension {expected}")
        if float(np.max(np.abs(mat - mat.conj().T))) >= HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(float(np.trace(mat).real) - 1.0) >= NORM_TOL:
            raise ValueError(f"density matrix trace {np.trace(mat)!r} != 1 within tolerance")
        low = float(np.min(np.linalg.eigvalsh(mat)))
        if low < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has eigenvalue {low} below {EIGENVALUE_FLOOR}")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)


def partial_trace(state: PureState, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every factor not named in ``keep``.

    ``keep`` is a non-empty subset of the register's factor labels
    ("squid1", ..., "cavity"); the kept axes stay in register order.
    """
    labels = state.spec.factor_labels
    requested = list(keep)
    if not requested:
        raise ValueError("keep must name at least one factor")
    seen = set()
    for label in requested:
        if label not in labels:
            raise ValueError(f"unknown factor {label!r}; expected one of {labels}")
        if label in seen:
            raise ValueError(f"duplicate factor {label!r} in keep")
        seen.add(label)
    keep_axes = [k for k, label in enumerate(labels) if label in seen]
    traced_axes = [k for k in range(len(labels)) if k not in keep_axes]
    arr = state.tensor()
    rho = np.tensordot(arr, arr.conj(), axes=(traced_axes, traced_axes))
    dim = int(np.prod([state.spec.factor_dims[k] for k in keep_axes], dtype=int))
    rho = rho.reshape(dim, dim)
    kept_labels = tuple(labels[k] for k in keep_axes)
    return DensityMatrix(rho, kept_labels, state.spec)


def fidelity_against_dm(psi: Sequence[complex], rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a (g, i) qubit state against a single-SQUID density matrix.

    ``psi`` is a normalized length-2 vector of (g, i) amplitudes.  The
    matrix must sit on exactly one SQUID and carry negligible population
    in the e level; otherwise the qubit reading is invalid and a
    ``LeakageError`` is raised.
    """
    if len(rho.subsystem) != 1 or not rho.subsystem[0].startswith("squid"):
        raise ValueError(f"expected a single-SQUID density matrix, got subsystem {rho.subsystem}")
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if vec.shape != (2,):
        raise ValueError(f"psi must be a length-2 (g, i) vector, got shape {vec.shape}")
    if abs(float(np.linalg.norm(vec)) - 1.0) >= NORM_TOL:
        raise ValueError("psi must be normalized")
    e_pop = float(rho.entries[LEVEL_E, LEVEL_E].real)
    if e_pop > E_LEAK_TOL:
        raise LeakageError(f"e-level population {e_pop} exceeds {E_LEAK_TOL}")
    block = rho.entries[:2, :2]
    return float(np.real(vec.conj() @ block @ vec))
