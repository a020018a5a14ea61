"""Shared helpers: independent oracles the unit tests check the package against."""

import itertools

import numpy as np
import pytest

from clone_sim import BasisSpec, PureState


def random_pure_state(seed, spec: BasisSpec) -> PureState:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=spec.dimension) + 1j * rng.normal(size=spec.dimension)
    return PureState.from_amplitudes(amps, spec, normalize=True)


def brute_force_partial_trace(state: PureState, keep) -> np.ndarray:
    """Reference partial trace: explicit sum over basis-index pairs.

    Deliberately written with loops and mixed-radix index arithmetic so
    it shares nothing with the tensordot route under test.
    """
    spec = state.spec
    dims = spec.factor_dims
    labels = spec.factor_labels
    keep_set = set(keep)
    keep_axes = [k for k, lab in enumerate(labels) if lab in keep_set]
    traced_axes = [k for k in range(len(labels)) if k not in keep_axes]

    def flatten(tup, axes):
        out = 0
        for ax in axes:
            out = out * dims[ax] + tup[ax]
        return out

    dim = 1
    for ax in keep_axes:
        dim *= dims[ax]
    rho = np.zeros((dim, dim), dtype=np.complex128)
    amps = state.amplitudes
    tuples = list(itertools.product(*(range(d) for d in dims)))
    every_axis = range(len(dims))
    for ta in tuples:
        for tb in tuples:
            if any(ta[ax] != tb[ax] for ax in traced_axes):
                continue
            rho[flatten(ta, keep_axes), flatten(tb, keep_axes)] += (
                amps[flatten(ta, every_axis)] * np.conj(amps[flatten(tb, every_axis)])
            )
    return rho


@pytest.fixture
def spec331() -> BasisSpec:
    return BasisSpec(num_squids=3, fock_cutoff=1)


@pytest.fixture
def spec332() -> BasisSpec:
    return BasisSpec(num_squids=3, fock_cutoff=2)
