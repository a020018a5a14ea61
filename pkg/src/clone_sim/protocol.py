"""The ten-step cloning schedule and its building blocks.

A run starts from |g, g, g> with an empty cavity, writes the input qubit
onto SQUID 1 in the (g, i) basis, and then walks a fixed schedule of
pulse slots.  Slots hold one or more tracks; a track is a back-to-back
sequence of primitive pulses on a single target, and tracks within a
slot address pairwise distinct SQUIDs so they commute.  Snapshots are
recorded after the last slot of each named step, giving a trace with
labels "input", "step1", ..., "step10".

Step roles, in schedule order:

  step1   g-e drive puts SQUID 2 into sqrt(2/3)|g> + i sqrt(1/3)|e>
  step2   quarter-period exchange loads that excitation into the cavity
  step3   full-period exchange: cavity-photon-controlled flip of SQUID 1
  step4   eighth-period exchange splits SQUID 2 against the cavity
  step5   quarter-period exchange moves the photon share onto SQUID 3
  step6   i-e drives park the e amplitudes of SQUIDs 2, 3 in |i>
  step7   two-pulse rotations on all three SQUIDs (plus/minus basis maps)
  step8   i-e drive lifts SQUID 1's |i> into |e>
  step9   quarter-period exchange emits SQUID 1's share into the cavity
  step10  two controlled flips copy the cavity bit onto SQUIDs 2 and 3
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import (
    DEFAULT_COUPLINGS,
    E_LEAK_TOL,
    CouplingConfig,
    PulseOp,
    PulseVariant,
    apply_free_evolution,
    apply_jc,
    apply_pulse_op,
    apply_raman,
)
from .errors import LeakageError, PhysicsError, PreconditionError
from .hilbert import LEVEL_E, LEVEL_G, LEVEL_I, BasisSpec, PureState, _check_squid

PROCESS_ONE_PHASE = 3.0 * math.pi / 2.0
PROCESS_TWO_PHASE = math.pi / 2.0
STEP_LABELS = ("step1", "step2", "step3", "step4", "step5",
               "step6", "step7", "step8", "step9", "step10")


@dataclass(frozen=True)
class InputQubit:
    """Input qubit alpha|+> + beta|-> in the plus/minus basis of one SQUID."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) >= 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {total}, must be 1")

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "InputQubit":
        return cls(complex(math.cos(theta / 2.0)),
               cmath.exp(1j * phi) * math.sin(theta / 2.0))

    def gi_vector(self) -> np.ndarray:
        """(g, i) amplitudes of the same state: |+-> = (|i> +- |g>)/sqrt(2)."""
        root = math.sqrt(2.0)
        return np.array([(self.alpha - self.beta) / root,
                         (self.alpha + self.beta) / root])


@dataclass(frozen=True)
class Slot:
    """One schedule slot: parallel tracks of pulses on disjoint SQUIDs."""

    step: str
    description: str
    tracks: tuple[tuple[PulseOp, ...], ...]
    duration: float = -1.0  # sentinel; resolved to the longest track

    def __post_init__(self) -> None:
        if not self.tracks or any(not track for track in self.tracks):
            raise ValueError("each slot needs at least one non-empty track")
        targets = []
        jc_count = 0
        longest = 0.0
        for track in self.tracks:
            squids = {op.squid for op in track}
            if len(squids) != 1:
                raise ValueError(f"track mixes targets {sorted(squids)}")
            targets.append(squids.pop())
            jc_count += sum(op.variant is PulseVariant.JC for op in track)
            longest = max(longest, sum(op.duration for op in track))
        if len(set(targets)) != len(targets):
            raise ValueError(f"slot tracks must target distinct SQUIDs, got {targets}")
        if jc_count > 1:
            raise ValueError("at most one cavity-exchange pulse per slot")
        if self.duration < 0.0:
            object.__setattr__(self, "duration", longest)
        elif self.duration + 1e-12 < longest:
            raise ValueError(
                f"slot duration {self.duration} shorter than longest track {longest}"
            )

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "description": self.description,
            "duration": self.duration,
            "tracks": [[op.to_dict() for op in track] for track in self.tracks],
        }


@dataclass(frozen=True)
class Schedule:
    """Ordered slot sequence; an empty schedule is legal and does nothing."""

    slots: tuple[Slot, ...]

    @property
    def total_duration(self) -> float:
        return float(sum(slot.duration for slot in self.slots))

    def to_dict(self) -> dict:
        return {"slots": [slot.to_dict() for slot in self.slots]}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def total_duration(schedule: Schedule) -> float:
    return schedule.total_duration


@dataclass(frozen=True)
class TraceEntry:
    label: str
    t_elapsed: float
    state: PureState

    def to_dict(self) -> dict:
        return {"label": self.label, "t_elapsed": self.t_elapsed, "state": self.state.to_dict()}


@dataclass(frozen=True)
class StepTrace:
    entries: tuple[TraceEntry, ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(entry.label for entry in self.entries)

    def entry(self, label: str) -> TraceEntry:
        for item in self.entries:
            if item.label == label:
                return item
        raise ValueError(f"trace has no entry labelled {label!r}")

    def to_dict(self) -> list[dict]:
        return [entry.to_dict() for entry in self.entries]

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _require_in_g(state: PureState, squid: int) -> None:
    pop = state.level_population(squid, LEVEL_G)
    if abs(pop - 1.0) > 1e-10:
        raise PreconditionError(f"squid{squid} must start in |g> (population {pop})")


def prepare_input(
    state: PureState,
    squid: int,
    q: InputQubit,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    mode: str = "ideal",
) -> PureState:
    """Write the input qubit onto a SQUID currently resting in |g>.

    "ideal" injects the (g, i) amplitudes directly.  "pulsed" realizes
    the same state with one two-pulse rotation plus free evolution to
    the next phase closure; the result then matches the ideal state up
    to a global phase.
    """
    _check_squid(state.spec, squid)
    _require_in_g(state, squid)
    target = q.gi_vector()
    if mode == "ideal":
        arr = state.tensor().copy()
        axis = squid - 1
        idx_g = [slice(None)] * arr.ndim
        idx_g[axis] = LEVEL_G
        idx_i = list(idx_g)
        idx_i[axis] = LEVEL_I
        g_old = arr[tuple(idx_g)].copy()
        arr[tuple(idx_g)] = target[0] * g_old
        arr[tuple(idx_i)] = target[1] * g_old
        return PureState(arr.reshape(-1), state.spec)
    if mode == "pulsed":
        a_g, a_i = complex(target[0]), complex(target[1])
        ref = cmath.phase(a_g) if abs(a_g) > 0.0 else 0.0
        b_i = a_i * cmath.exp(-1j * ref)
        t_pulse = math.acos(min(1.0, abs(a_g))) / cfg.lambda_prime
        if abs(a_i) > 0.0:
            dphi = -cmath.phase(b_i / (1j * abs(a_i)))
        else:
            dphi = 0.0
        periods = math.ceil(cfg.omega_gi * t_pulse / (2.0 * math.pi))
        t_idle = 2.0 * math.pi * periods / cfg.omega_gi - t_pulse
        state = apply_raman(state, squid, t_pulse, dphi, 0.0, cfg)
        return apply_free_evolution(state, squid, t_idle, cfg)
    raise ValueError(f"unknown preparation mode {mode!r}")


def step1_prepare_squid2(state: PureState, cfg: CouplingConfig = DEFAULT_COUPLINGS) -> PureState:
    """Drive SQUID 2 from |g> to sqrt(2/3)|g> + i sqrt(1/3)|e>.

    The pulse angle 2 pi - arcsin(sqrt(1/3)) leaves cos at +sqrt(2/3)
    while -i sin comes out at +i sqrt(1/3), which is the sign the rest
    of the schedule relies on.
    """
    _require_in_g(state, 2)
    return apply_pulse_op(state, _step1_op(cfg), cfg)


def _step1_op(cfg: CouplingConfig) -> PulseOp:
    angle = 2.0 * math.pi - math.asin(math.sqrt(1.0 / 3.0))
    return PulseOp(PulseVariant.DRIVE_GE, 2, angle / cfg.omega_ge)


def cnot_cavity_control(
    state: PureState,
    squid: int,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    leak_tol: float = 1e-10,
) -> PureState:
    """Full-period cavity exchange: flips |+> <-> |-> of the target iff one photon.

    Defined on cavity support {0, 1} and target support {g, i}; the
    photon-2 sector would rotate by an irrational angle and the e level
    would dump population into the cavity, so either kind of occupation
    raises ``LeakageError``.
    """
    tail = state.photon_tail_population(2)
    if tail > leak_tol:
        raise LeakageError(f"photon population {tail} above one-photon subspace")
    e_pop = state.level_population(squid, LEVEL_E)
    if e_pop > leak_tol:
        raise LeakageError(f"squid{squid} e-level population {e_pop} breaks the controlled flip")
    return apply_jc(state, squid, math.pi / cfg.lam, cfg)


def process_times(cfg: CouplingConfig = DEFAULT_COUPLINGS) -> tuple[float, float]:
    """(pulse time, idle time) of the basis-rotation processes.

    The pulse lasts 3 pi / (4 lambda_prime); the idle stretch extends
    the total to the first whole number of 2 pi / omega_gi phase
    periods at or after the pulse end, so the |i> phase closes.
    """
    t_pulse = 3.0 * math.pi / (4.0 * cfg.lambda_prime)
    periods = math.ceil(cfg.omega_gi * t_pulse / (2.0 * math.pi))
    t_idle = 2.0 * math.pi * periods / cfg.omega_gi - t_pulse
    return t_pulse, t_idle


def _process_track(squid: int, dphi: float, cfg: CouplingConfig) -> tuple[PulseOp, ...]:
    t_pulse, t_idle = process_times(cfg)
    return (
        PulseOp(PulseVariant.RAMAN, squid, t_pulse, phi1=dphi, phi2=0.0),
        PulseOp(PulseVariant.FREE_EVOLVE, squid, t_idle),
    )


def _run_process(
    state: PureState, squid: int, dphi: float, cfg: CouplingConfig, e_tol: float
) -> tuple[PureState, float]:
    elapsed = 0.0
    for op in _process_track(squid, dphi, cfg):
        state = apply_pulse_op(state, op, cfg, e_tol=e_tol)
        elapsed += op.duration
    return state, elapsed


def process_one(
    state: PureState,
    squid: int,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    e_tol: float = E_LEAK_TOL,
) -> tuple[PureState, float]:
    """Basis rotation |+> -> -|i>, |-> -> |g> (drive phase difference 3 pi / 2)."""
    return _run_process(state, squid, PROCESS_ONE_PHASE, cfg, e_tol)


def process_two(
    state: PureState,
    squid: int,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    e_tol: float = E_LEAK_TOL,
) -> tuple[PureState, float]:
    """Basis rotation |g> -> |->, |i> -> -|+> (drive phase difference pi / 2)."""
    return _run_process(state, squid, PROCESS_TWO_PHASE, cfg, e_tol)


def build_uqcm_schedule(cfg: CouplingConfig = DEFAULT_COUPLINGS) -> Schedule:
    """The eleven-slot cloning schedule for a three-SQUID register.

    One slot per step, except step10 whose two controlled flips share
    the cavity and therefore run in consecutive slots (their order does
    not matter for the final state).
    """
    quarter = math.pi / (2.0 * cfg.lam)
    eighth = math.pi / (4.0 * cfg.lam)
    full = math.pi / cfg.lam
    ie_quarter = math.pi / (2.0 * cfg.omega_ie)

    def jc(squid: int, duration: float) -> tuple[tuple[PulseOp, ...], ...]:
        return ((PulseOp(PulseVariant.JC, squid, duration),),)

    def ie(squid: int) -> tuple[PulseOp, ...]:
        return (PulseOp(PulseVariant.DRIVE_IE, squid, ie_quarter),)

    slots = (
        Slot("step1", "drive squid2 toward e", ((_step1_op(cfg),),)),
        Slot("step2", "load squid2 excitation into the cavity", jc(2, quarter)),
        Slot("step3", "photon-controlled flip of squid1", jc(1, full)),
        Slot("step4", "split squid2 against the cavity", jc(2, eighth)),
        Slot("step5", "move the photon share onto squid3", jc(3, quarter)),
        Slot("step6", "park e amplitudes of squid2, squid3 in i", (ie(2), ie(3))),
        Slot(
            "step7",
            "basis rotations: squid1 plus/minus readout, squid2, squid3 encode",
            (
                _process_track(1, PROCESS_ONE_PHASE, cfg),
                _process_track(2, PROCESS_TWO_PHASE, cfg),
                _process_track(3, PROCESS_TWO_PHASE, cfg),
            ),
        ),
        Slot("step8", "lift squid1 i into e", (ie(1),)),
        Slot("step9", "emit squid1 excitation into the cavity", jc(1, quarter)),
        Slot("step10", "copy the cavity bit onto squid2", jc(2, full)),
        Slot("step10", "copy the cavity bit onto squid3", jc(3, full)),
    )
    return Schedule(slots)


def execute_schedule(
    state: PureState,
    schedule: Schedule,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    observer: Callable[[str, PulseOp, PureState], None] | None = None,
    enforce_preconditions: bool = True,
) -> tuple[PureState, StepTrace]:
    """Run the slots in order, snapshotting after the last slot of each step.

    ``observer`` is called after every primitive pulse.  With
    ``enforce_preconditions`` off, the two-pulse leakage guard is
    skipped, which perturbed (timing-jittered) schedules need.
    """
    e_tol = E_LEAK_TOL if enforce_preconditions else math.inf
    entries: list[TraceEntry] = []
    elapsed = 0.0
    for k, slot in enumerate(schedule.slots):
        for track in slot.tracks:
            for op in track:
                try:
                    state = apply_pulse_op(state, op, cfg, e_tol=e_tol)
                except PhysicsError as exc:
                    raise type(exc)(f"{slot.step}: {exc}") from exc
                if observer is not None:
                    observer(slot.step, op, state)
        elapsed += slot.duration
        if k + 1 == len(schedule.slots) or schedule.slots[k + 1].step != slot.step:
            entries.append(TraceEntry(slot.step, elapsed, state))
    return state, StepTrace(tuple(entries))


def run_uqcm(
    q: InputQubit,
    cfg: CouplingConfig = DEFAULT_COUPLINGS,
    fock_cutoff: int = 2,
    schedule: Schedule | None = None,
    prep_mode: str = "ideal",
    observer: Callable[[str, PulseOp, PureState], None] | None = None,
    enforce_preconditions: bool = True,
) -> tuple[PureState, StepTrace]:
    """Clone ``q``: prepare SQUID 1, run the schedule, return (final, trace).

    The trace starts with the prepared state under the label "input"
    followed by one snapshot per step.  The default cutoff of two
    photons is one more than the protocol ever uses, so any truncation
    artifact would show up as photon-2 population instead of being
    silently projected away.
    """
    spec = BasisSpec(num_squids=3, fock_cutoff=fock_cutoff)
    state = PureState.basis_state(spec, (LEVEL_G, LEVEL_G, LEVEL_G), 0)
    state = prepare_input(state, 1, q, cfg, mode=prep_mode)
    if schedule is None:
        schedule = build_uqcm_schedule(cfg)
    final, trace = execute_schedule(
        state, schedule, cfg, observer=observer, enforce_preconditions=enforce_preconditions
    )
    entries = (TraceEntry("input", 0.0, state),) + trace.entries
    return final, StepTrace(entries)
