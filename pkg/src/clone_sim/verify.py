"""Reference states and measures for checking a cloning run.

The reference for each protocol step is assembled symbolically from
per-factor amplitude vectors, never by running pulses, so agreement
between a trace and these states is a genuine two-route check.  Clone
quality is the overlap of each copy's reduced density matrix with the
input qubit; the ideal machine puts both at exactly 5/6.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import DEFAULT_COUPLINGS, CouplingConfig
from .hilbert import BasisSpec, PureState, inner_product, partial_trace
from .protocol import STEP_LABELS, InputQubit, Schedule, StepTrace, run_uqcm

_G = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
_I = np.array([0.0, 1.0, 0.0], dtype=np.complex128)
_E = np.array([0.0, 0.0, 1.0], dtype=np.complex128)
_PLUS = np.array([1.0, 1.0, 0.0], dtype=np.complex128) / math.sqrt(2.0)
_MINUS = np.array([-1.0, 1.0, 0.0], dtype=np.complex128) / math.sqrt(2.0)

_R23 = math.sqrt(2.0 / 3.0)
_R13 = math.sqrt(1.0 / 3.0)
_R16 = math.sqrt(1.0 / 6.0)


def _fock(spec: BasisSpec, n: int) -> np.ndarray:
    vec = np.zeros(spec.fock_cutoff + 1, dtype=np.complex128)
    vec[n] = 1.0
    return vec


def _assemble(spec: BasisSpec, terms) -> PureState:
    """Sum of product terms (coeff, squid1, squid2, squid3, cavity)."""
    if spec.num_squids != 3:
        raise ValueError(f"references are defined for 3 SQUIDs, got {spec.num_squids}")
    vec = np.zeros(spec.dimension, dtype=np.complex128)
    for coeff, s1, s2, s3, cav in terms:
        vec += coeff * np.kron(np.kron(np.kron(s1, s2), s3), cav)
    return PureState(vec, spec)


def _phi_terms(coeff: complex, s1: np.ndarray, cav: np.ndarray):
    # The symmetric two-SQUID state (|+->+|-+>)/sqrt(2) on SQUIDs 2, 3.
    half = coeff / math.sqrt(2.0)
    return [(half, s1, _PLUS, _MINUS, cav), (half, s1, _MINUS, _PLUS, cav)]


def reference_step_state(label: str, q: InputQubit, spec: BasisSpec | None = None) -> PureState:
    """Closed-form state expected after the labelled step, for input ``q``."""
    spec = spec or BasisSpec()
    a, b = q.alpha, q.beta
    f0, f1 = _fock(spec, 0), _fock(spec, 1)
    sig = a * _PLUS + b * _MINUS  # the input qubit on a single SQUID
    swp = a * _MINUS + b * _PLUS  # the same with plus/minus exchanged

    if label == "input":
        terms = [(1.0, sig, _G, _G, f0)]
    elif label == "step1":
        terms = [(_R23, sig, _G, _G, f0), (1j * _R13, sig, _E, _G, f0)]
    elif label == "step2":
        terms = [(_R23, sig, _G, _G, f0), (_R13, sig, _G, _G, f1)]
    elif label == "step3":
        terms = [(_R23, sig, _G, _G, f0), (_R13, swp, _G, _G, f1)]
    elif label == "step4":
        terms = [
            (_R23, sig, _G, _G, f0),
            (_R16, swp, _G, _G, f1),
            (-1j * _R16, swp, _E, _G, f0),
        ]
    elif label == "step5":
        terms = [
            (_R23, sig, _G, _G, f0),
            (-1j * _R16, swp, _G, _E, f0),
            (-1j * _R16, swp, _E, _G, f0),
        ]
    elif label == "step6":
        terms = [
            (_R23, sig, _G, _G, f0),
            (-_R16, swp, _G, _I, f0),
            (-_R16, swp, _I, _G, f0),
        ]
    elif label == "step7":
        terms = [(_R23, -a * _I + b * _G, _MINUS, _MINUS, f0)]
        terms += _phi_terms(_R13, a * _G - b * _I, f0)
    elif label == "step8":
        terms = [(_R23, 1j * a * _E + b * _G, _MINUS, _MINUS, f0)]
        terms += _phi_terms(_R13, a * _G + 1j * b * _E, f0)
    elif label == "step9":
        terms = [(_R23 * a, _G, _MINUS, _MINUS, f1), (_R23 * b, _G, _MINUS, _MINUS, f0)]
        terms += _phi_terms(_R13 * a, _G, f0)
        terms += _phi_terms(_R13 * b, _G, f1)
    elif label == "step10":
        terms = [(_R23 * a, _G, _PLUS, _PLUS, f1), (_R23 * b, _G, _MINUS, _MINUS, f0)]
        terms += _phi_terms(_R13 * a, _G, f0)
        terms += _phi_terms(_R13 * b, _G, f1)
    else:
        raise ValueError(f"unknown step label {label!r}")
    return _assemble(spec, terms)


def target_state(q: InputQubit, spec: BasisSpec | None = None) -> PureState:
    """Ideal cloning output: both copies at fidelity 5/6, ancilla on squid1+cavity."""
    return reference_step_state("step10", q, spec)


def computational_leakage(state: PureState) -> float:
    """Population outside levels {g, i} and photon numbers {0, 1}."""
    arr = state.tensor()
    comp = arr[(slice(0, 2),) * state.spec.num_squids + (slice(0, 2),)]
    return max(0.0, 1.0 - float(np.sum(np.abs(comp) ** 2)))


def _gi_block_fidelity(psi: np.ndarray, rho: np.ndarray) -> float:
    # e-row/column excluded; any e population shows up in the leakage field.
    block = rho[:2, :2]
    return float(np.real(psi.conj() @ block @ psi))


def _ancilla_overlap(spec: BasisSpec) -> float:
    empty = np.kron(_G, _fock(spec, 0))
    loaded = np.kron(_G, _fock(spec, 1))
    return float(abs(np.vdot(empty, loaded)))


@dataclass(frozen=True)
class CloneReport:
    """Quality measures of one cloning run; every field lies in [0, 1]."""

    fidelity_squid2: float
    fidelity_squid3: float
    target_overlap: float
    ancilla_orthogonality: float
    leakage: float

    def __post_init__(self) -> None:
        for name in ("fidelity_squid2", "fidelity_squid3", "target_overlap",
                     "ancilla_orthogonality", "leakage"):
            value = getattr(self, name)
            if not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValueError(f"{name} = {value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "fidelity_squid2": self.fidelity_squid2,
            "fidelity_squid3": self.fidelity_squid3,
            "target_overlap": self.target_overlap,
            "ancilla_orthogonality": self.ancilla_orthogonality,
            "leakage": self.leakage,
        }


def clone_fidelities(final: PureState, q: InputQubit) -> CloneReport:
    """Reduce the final state onto each copy and score it against the input."""
    psi = q.gi_vector()
    rho2 = partial_trace(final, ("squid2",))
    rho3 = partial_trace(final, ("squid3",))
    target = target_state(q, final.spec)
    return CloneReport(
        fidelity_squid2=_gi_block_fidelity(psi, rho2.entries),
        fidelity_squid3=_gi_block_fidelity(psi, rho3.entries),
        target_overlap=float(abs(inner_product(final, target))),
        ancilla_orthogonality=_ancilla_overlap(final.spec),
        leakage=computational_leakage(final),
    )


def step_conformance(trace: StepTrace, q: InputQubit) -> list[tuple[str, float]]:
    """Per-step overlap |<snapshot|reference>| for a run trace of input ``q``."""
    out = []
    for label in ("input",) + STEP_LABELS:
        entry = trace.entry(label)
        ref = reference_step_state(label, q, entry.state.spec)
        out.append((label, float(abs(inner_product(entry.state, ref)))))
    return out


@dataclass(frozen=True)
class SweepRow:
    sample: int
    theta: float
    phi: float
    f2: float
    f3: float
    target_overlap: float
    leakage: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    seed: int
    n: int

    def summary(self) -> dict:
        """Statistics of the squid2 clone fidelity (population variance)."""
        f2 = np.array([row.f2 for row in self.rows])
        return {
            "min": float(np.min(f2)),
            "max": float(np.max(f2)),
            "mean": float(np.mean(f2)),
            "variance": float(np.var(f2)),
            "seed": self.seed,
            "n": self.n,
        }

    def to_csv(self) -> str:
        lines = ["sample,theta,phi,f2,f3,target_overlap,leakage"]
        for row in self.rows:
            lines.append(
                f"{row.sample},{row.theta:.12g},{row.phi:.12g},{row.f2:.12g},"
                f"{row.f3:.12g},{row.target_overlap:.12g},{row.leakage:.12g}"
            )
        return "\n".join(lines) + "\n"


def universality_sweep(
    n: int,
    seed: int,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    fock_cutoff: int = 2,
    jobs: int = 1,
    schedule_factory=None,
    enforce_preconditions: bool = True,
) -> SweepResult:
    """Clone ``n`` Bloch-uniform inputs drawn from a seeded PCG64 stream.

    theta = arccos(1 - 2u), phi = 2 pi v with u, v uniform on [0, 1).
    All randomness is drawn up front, so results are identical for any
    ``jobs`` count and bit-identical across repeat calls with one seed.
    ``schedule_factory(k)``, when given, supplies the schedule for
    sample k; the CLI uses this hook to inject timing perturbations.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    rng = np.random.default_rng(seed)
    thetas = np.arccos(1.0 - 2.0 * rng.random(n))
    phis = 2.0 * math.pi * rng.random(n)

    def one(k: int) -> SweepRow:
        q = InputQubit.from_bloch(float(thetas[k]), float(phis[k]))
        schedule: Schedule | None = schedule_factory(k) if schedule_factory else None
        final, _ = run_uqcm(
            q, cfg, fock_cutoff=fock_cutoff, schedule=schedule,
            enforce_preconditions=enforce_preconditions,
        )
        report = clone_fidelities(final, q)
        return SweepRow(
            sample=k, theta=float(thetas[k]), phi=float(phis[k]),
            f2=report.fidelity_squid2, f3=report.fidelity_squid3,
            target_overlap=report.target_overlap, leakage=report.leakage,
        )

    if jobs == 1:
        rows = [one(k) for k in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, range(n)))
    return SweepResult(tuple(rows), seed=seed, n=n)
