"""Reference states, clone scoring, and the seeded universality sweep."""

import math

import numpy as np
import pytest

from clone_sim import (
    BasisSpec,
    CloneReport,
    InputQubit,
    PureState,
    basis_index,
    clone_fidelities,
    computational_leakage,
    partial_trace,
    reference_step_state,
    run_uqcm,
    step_conformance,
    target_state,
    universality_sweep,
)
from clone_sim.protocol import STEP_LABELS, StepTrace
from conftest import brute_force_partial_trace

RT6 = math.sqrt(6.0)
FIVE_SIXTHS = 5.0 / 6.0


def amp(state, levels, photons):
    return state.amplitudes[basis_index(state.spec, levels, photons)]


# ---------------------------------------------------------- reference states


def test_target_state_alpha_branch_amplitudes():
    # every nonzero amplitude of the plus-input target is +-1/sqrt(6):
    # four copy terms with one photon, two correlated terms with none
    psi = target_state(InputQubit(1.0, 0.0))
    for levels in (("g", "g", "g"), ("g", "g", "i"), ("g", "i", "g"), ("g", "i", "i")):
        assert abs(amp(psi, levels, 1) - 1.0 / RT6) < 1e-14
    assert abs(amp(psi, ("g", "g", "g"), 0) - (-1.0 / RT6)) < 1e-14
    assert abs(amp(psi, ("g", "i", "i"), 0) - 1.0 / RT6) < 1e-14
    assert abs(amp(psi, ("g", "g", "i"), 0)) < 1e-14
    assert np.count_nonzero(np.abs(psi.amplitudes) > 1e-14) == 6


def test_target_state_beta_branch_amplitudes():
    psi = target_state(InputQubit(0.0, 1.0))
    signs = {("g", "g", "g"): 1.0, ("g", "g", "i"): -1.0,
             ("g", "i", "g"): -1.0, ("g", "i", "i"): 1.0}
    for levels, sign in signs.items():
        assert abs(amp(psi, levels, 0) - sign / RT6) < 1e-14
    assert abs(amp(psi, ("g", "g", "g"), 1) - (-1.0 / RT6)) < 1e-14
    assert abs(amp(psi, ("g", "i", "i"), 1) - 1.0 / RT6) < 1e-14


def test_reference_states_are_normalized_for_arbitrary_inputs():
    rng = np.random.default_rng(71)
    for _ in range(6):
        q = InputQubit.from_bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        for label in ("input",) + STEP_LABELS:
            ref = reference_step_state(label, q)
            assert abs(ref.norm() - 1.0) < 1e-12


def test_reference_step_state_rejects_unknown_label():
    with pytest.raises(ValueError):
        reference_step_state("step11", InputQubit(1.0, 0.0))


# ------------------------------------------------------------- clone scoring


def test_target_state_scores_five_sixths_for_random_inputs():
    rng = np.random.default_rng(73)
    for _ in range(8):
        q = InputQubit.from_bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        report = clone_fidelities(target_state(q), q)
        assert abs(report.fidelity_squid2 - FIVE_SIXTHS) < 1e-12
        assert abs(report.fidelity_squid3 - FIVE_SIXTHS) < 1e-12
        assert abs(report.fidelity_squid2 - report.fidelity_squid3) < 1e-12
        assert abs(report.target_overlap - 1.0) < 1e-12
        assert report.ancilla_orthogonality == 0.0
        assert report.leakage < 1e-10


def test_perfect_copies_would_score_one():
    q = InputQubit.from_bloch(0.8, 1.1)
    spec = BasisSpec(3, 2)
    g = np.array([1.0, 0.0, 0.0])
    qubit = np.append(q.gi_vector(), 0.0)
    f0 = np.zeros(3)
    f0[0] = 1.0
    vec = np.kron(np.kron(np.kron(g, qubit), qubit), f0)
    impossible = PureState(vec, spec)
    report = clone_fidelities(impossible, q)
    assert abs(report.fidelity_squid2 - 1.0) < 1e-12
    assert abs(report.fidelity_squid3 - 1.0) < 1e-12


def test_reduced_copy_matches_brute_force_partial_trace():
    psi = target_state(InputQubit(1.0, 0.0))
    rho = partial_trace(psi, ("squid3",))
    assert np.max(np.abs(rho.entries - brute_force_partial_trace(psi, ("squid3",)))) < 1e-13


def test_computational_leakage_flags_the_right_populations():
    spec = BasisSpec(3, 2)
    assert computational_leakage(PureState.basis_state(spec, ("g", "i", "g"), 1)) == 0.0
    assert abs(computational_leakage(PureState.basis_state(spec, ("g", "e", "g"), 0)) - 1.0) < 1e-15
    assert abs(computational_leakage(PureState.basis_state(spec, ("g", "g", "g"), 2)) - 1.0) < 1e-15


def test_clone_report_rejects_out_of_range_fields():
    with pytest.raises(ValueError):
        CloneReport(1.2, 0.5, 0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        CloneReport(0.5, 0.5, 0.5, 0.0, -0.1)


# ----------------------------------------------------------- step conformance


def test_step_conformance_reports_unit_overlaps():
    for q in (InputQubit(1.0, 0.0), InputQubit(0.0, 1.0)):
        _, trace = run_uqcm(q)
        rows = step_conformance(trace, q)
        assert [label for label, _ in rows] == ["input"] + list(STEP_LABELS)
        for _, overlap in rows:
            assert overlap > 1.0 - 1e-10


def test_step_conformance_requires_complete_traces():
    q = InputQubit(1.0, 0.0)
    _, trace = run_uqcm(q)
    truncated = StepTrace(trace.entries[:4])
    with pytest.raises(ValueError):
        step_conformance(truncated, q)


# -------------------------------------------------------------------- sweep


def test_sweep_is_deterministic_and_job_count_invariant():
    a = universality_sweep(12, seed=99)
    b = universality_sweep(12, seed=99)
    c = universality_sweep(12, seed=99, jobs=4)
    assert a.rows == b.rows == c.rows
    assert a.to_csv() == b.to_csv()


def test_sweep_fidelities_are_universal():
    result = universality_sweep(25, seed=2027)
    f2 = np.array([row.f2 for row in result.rows])
    f3 = np.array([row.f3 for row in result.rows])
    assert np.max(np.abs(f2 - FIVE_SIXTHS)) < 1e-9
    assert np.max(np.abs(f3 - FIVE_SIXTHS)) < 1e-9
    assert float(np.var(f2)) < 1e-18
    for row in result.rows:
        assert row.target_overlap > 1.0 - 1e-9
        assert row.leakage < 1e-10


def test_sweep_csv_schema_and_precision():
    result = universality_sweep(3, seed=5)
    lines = result.to_csv().strip().split("\n")
    assert lines[0] == "sample,theta,phi,f2,f3,target_overlap,leakage"
    assert len(lines) == 4
    for line, row in zip(lines[1:], result.rows):
        fields = line.split(",")
        assert int(fields[0]) == row.sample
        assert abs(float(fields[1]) - row.theta) <= 1e-11 * max(1.0, abs(row.theta))
        assert abs(float(fields[3]) - row.f2) <= 1e-11


def test_sweep_summary_contents():
    result = universality_sweep(10, seed=31)
    summary = result.summary()
    assert set(summary) == {"min", "max", "mean", "variance", "seed", "n"}
    assert summary["seed"] == 31 and summary["n"] == 10
    f2 = [row.f2 for row in result.rows]
    assert summary["min"] == min(f2) and summary["max"] == max(f2)


def test_sweep_validates_arguments():
    with pytest.raises(ValueError):
        universality_sweep(0, seed=1)
    with pytest.raises(ValueError):
        universality_sweep(5, seed=1, jobs=0)


def test_sweep_with_perturbed_schedules_reports_degradation():
    from clone_sim.cli import perturbed_schedule
    from clone_sim.protocol import build_uqcm_schedule

    def factory(sample):
        rng = np.random.default_rng([404, sample])
        return perturbed_schedule(build_uqcm_schedule(), 0.01, rng)

    result = universality_sweep(4, seed=404, schedule_factory=factory,
                                enforce_preconditions=False)
    for row in result.rows:
        assert abs(row.f2 - FIVE_SIXTHS) > 1e-6  # visibly off the ideal value
        assert row.leakage > 0.0
