import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from homwitness import (
    DEFAULT_CUTOFF,
    DensityMatrix,
    FockCutoff,
    SourceModel,
    beamsplitter_matrix,
    dephase,
    fock_ket,
    fock_ket2,
    interfere,
    interfere_arm_states,
    make_arm_state,
    poisson_distribution,
    superposition,
)
from homwitness.fock import pair_index

from conftest import random_density
from oracles import four_mode_interference, trace_out_orthogonal


def test_source_model_validation():
    with pytest.raises(ValueError):
        SourceModel(arm1=(0.5, 0.6))  # not normalized
    with pytest.raises(ValueError):
        SourceModel(arm1=(-0.1, 1.1))
    with pytest.raises(ValueError):
        SourceModel(overlap=1.5)
    with pytest.raises(ValueError):
        SourceModel(transmittance=-0.2)


def test_make_arm_state_examples():
    cut = DEFAULT_CUTOFF
    pure = make_arm_state((0.0, 1.0), cut)
    assert_allclose(pure.entries, fock_ket(cut, 1).to_density().entries, atol=0)
    eta = make_arm_state((0.36, 0.64), cut)
    assert eta.entries[0, 0].real == pytest.approx(0.36)
    assert eta.entries[1, 1].real == pytest.approx(0.64)
    mixed = make_arm_state((0.3, 0.6, 0.1), cut)
    assert abs(mixed.trace() - 1.0) < 1e-12
    with pytest.raises(ValueError):
        make_arm_state((0.3, 0.3), cut)


def test_dephase_leaves_fock_states_alone():
    cut = DEFAULT_CUTOFF
    one = fock_ket(cut, 1).to_density()
    assert_allclose(dephase(one).entries, one.entries, atol=0)


def test_dephase_kills_coherences():
    cut = DEFAULT_CUTOFF
    plus = superposition(cut, {0: 1.0, 1: 1.0}).to_density()
    out = dephase(plus)
    assert out.entries[0, 1] == 0
    assert out.entries[0, 0].real == pytest.approx(0.5)
    assert out.entries[1, 1].real == pytest.approx(0.5)


@given(st.integers(0, 2**32 - 1))
def test_dephase_idempotent(seed):
    rng = np.random.default_rng(seed)
    cut = FockCutoff(3)
    rho = DensityMatrix(random_density(rng, cut.dim), cut, 1)
    once = dephase(rho)
    twice = dephase(once)
    assert_allclose(twice.entries, once.entries, atol=0)


def test_beamsplitter_preserves_vacuum():
    for t, phi in [(0.5, 0.0), (0.3, 1.1), (0.9, -2.0)]:
        u = beamsplitter_matrix(t, phi)
        col = u[:, 0]
        assert abs(col[0] - 1.0) < 1e-12
        assert np.abs(col[1:]).max() < 1e-12


@pytest.mark.parametrize("phi", [0.0, math.pi / 3, math.pi])
def test_beamsplitter_bunches_photon_pair(phi):
    cut = DEFAULT_CUTOFF
    u = beamsplitter_matrix(0.5, phi, cut)
    out = u @ fock_ket2(cut, 1, 1).amplitudes
    amp20 = out[pair_index(cut, 2, 0)]
    amp02 = out[pair_index(cut, 0, 2)]
    assert abs(amp20 - 1 / math.sqrt(2)) < 1e-12
    assert abs(amp02 + np.exp(1j * phi) / math.sqrt(2)) < 1e-12
    rest = np.delete(out, [pair_index(cut, 2, 0), pair_index(cut, 0, 2)])
    assert np.abs(rest).max() < 1e-12


@given(st.floats(0.0, 1.0), st.floats(-math.pi, math.pi))
def test_beamsplitter_unitary(t, phi):
    u = beamsplitter_matrix(t, phi, FockCutoff(4))
    eye = u @ u.conj().T
    assert np.abs(eye - np.eye(len(u))).max() < 1e-10


def test_beamsplitter_block_diagonal_in_photon_number():
    cut = FockCutoff(4)
    u = beamsplitter_matrix(0.37, 0.9, cut)
    d = cut.dim
    totals = (np.repeat(np.arange(d), d) + np.tile(np.arange(d), d))
    mask = totals[:, None] != totals[None, :]
    assert np.abs(u[mask]).max() < 1e-12


def test_interfere_ideal_photons_gives_bunched_state(ideal_state):
    cut = ideal_state.measured.cutoff
    expected = superposition(cut, {(2, 0): 1.0, (0, 2): -1.0}).to_density()
    assert np.abs(ideal_state.measured.entries - expected.entries).max() < 1e-12
    assert all(b.orth_photons == (0, 0) for b in ideal_state.branches)


def test_interfere_with_phase():
    phi = 1.3
    st_ = interfere(SourceModel(arm1=(0, 1), arm2=(0, 1), phase=phi))
    cut = st_.measured.cutoff
    expected = superposition(
        cut, {(2, 0): 1.0, (0, 2): -np.exp(1j * phi)}
    ).to_density()
    assert np.abs(st_.measured.entries - expected.entries).max() < 1e-12


def test_interfere_distinguishable_photons(distinguishable_state):
    # measured state is a pure delocalized single photon; one orthogonal
    # photon is spread over the spatial outputs
    cut = distinguishable_state.measured.cutoff
    expected = superposition(cut, {(1, 0): 1.0, (0, 1): -1.0}).to_density()
    assert np.abs(distinguishable_state.measured.entries - expected.entries).max() < 1e-12
    orth = sorted(b.orth_photons for b in distinguishable_state.branches)
    assert orth == [(0, 1), (1, 0)]
    for b in distinguishable_state.branches:
        assert b.weight == pytest.approx(0.5)


@pytest.mark.parametrize("xi", [0.0, 0.35, 0.8, 1.0])
def test_interfere_matches_four_mode_oracle(xi):
    arm1, arm2 = (0.2, 0.8), (0.36, 0.64)
    st_ = interfere(SourceModel(arm1=arm1, arm2=arm2, overlap=xi, phase=0.7))
    dim = 4
    rho4 = four_mode_interference(arm1, arm2, xi, 0.5, 0.7, dim)
    oracle = trace_out_orthogonal(rho4, dim)
    d = st_.measured.cutoff.dim
    got = st_.measured.entries.reshape(d, d, d, d)[:dim, :dim, :dim, :dim]
    assert np.abs(got.reshape(dim * dim, dim * dim) - oracle).max() < 1e-9


def test_interfere_vacuum_mixture_convex_expansion(imperfect_state):
    assert all(b.orth_photons == (0, 0) for b in imperfect_state.branches)
    ideal = interfere(SourceModel(arm1=(0, 1), arm2=(0, 1))).measured.entries
    vac = interfere(SourceModel(arm1=(1,), arm2=(1,))).measured.entries
    sp1 = interfere(SourceModel(arm1=(0, 1), arm2=(1,))).measured.entries
    sp2 = interfere(SourceModel(arm1=(1,), arm2=(0, 1))).measured.entries
    expected = 0.4096 * ideal + 0.2304 * (sp1 + sp2) + 0.1296 * vac
    assert np.abs(imperfect_state.measured.entries - expected).max() < 1e-12


def test_interfere_conserves_photon_number():
    for src in [
        SourceModel(arm1=(0.2, 0.7, 0.1), arm2=(0.1, 0.8, 0.1), overlap=0.6),
        SourceModel(arm1=(0.36, 0.64), arm2=(0.36, 0.64), overlap=0.0),
        SourceModel(arm1=(0, 1), arm2=(0, 1), overlap=0.3, transmittance=0.7),
    ]:
        st_ = interfere(src)
        mean_in = sum(n * p for n, p in enumerate(src.arm1))
        mean_in += sum(n * p for n, p in enumerate(src.arm2))
        assert abs(st_.mean_photons_total() - mean_in) < 1e-10


def test_interfere_overlap_continuity():
    base = interfere(SourceModel(arm1=(0, 1), arm2=(0, 1), overlap=1.0)).measured.entries
    prev = None
    for xi in (0.9, 0.99, 0.999):
        cur = interfere(SourceModel(arm1=(0, 1), arm2=(0, 1), overlap=xi)).measured.entries
        dev = np.abs(cur - base).max()
        assert dev <= 2.0 * (1 - xi**2)
        if prev is not None:
            assert dev < prev
        prev = dev


def test_interfere_overlap_convex_mixture():
    # for single-photon-or-vacuum arms the measured state interpolates
    # linearly in xi^2 between the matched and orthogonal extremes
    arm = (0.3, 0.7)
    matched = interfere(SourceModel(arm1=arm, arm2=arm, overlap=1.0)).measured.entries
    ortho = interfere(SourceModel(arm1=arm, arm2=arm, overlap=0.0)).measured.entries
    for xi in (0.25, 0.6, 0.85):
        got = interfere(SourceModel(arm1=arm, arm2=arm, overlap=xi)).measured.entries
        mix = xi**2 * matched + (1 - xi**2) * ortho
        assert np.abs(got - mix).max() < 1e-9


def test_interfere_dephasing_is_builtin():
    src = SourceModel(arm1=(0.36, 0.64), arm2=(0.2, 0.8), overlap=0.7)
    a = interfere(src)
    b = interfere(src, phase_randomize=False)  # arms already diagonal
    assert np.abs(a.measured.entries - b.measured.entries).max() < 1e-12


def test_interfere_rejects_small_cutoff():
    with pytest.raises(ValueError):
        interfere(SourceModel(arm1=(0, 0, 1), arm2=(0, 0, 1)), FockCutoff(3))


def test_interfere_branches_reconstruct_measured(imperfect_state):
    total = sum(b.weight for b in imperfect_state.branches)
    assert abs(total - 1.0) < 1e-9


def test_interfere_arm_states_with_coherence():
    # a squeezed-like superposition sneaks below the vacuum level unless
    # the built-in phase randomization is applied
    cut = DEFAULT_CUTOFF
    eps = 0.3
    arm = superposition(cut, {0: 1.0, 2: -eps}).to_density()
    vac = fock_ket(cut, 0).to_density()
    out = interfere_arm_states(arm, vac, phase_randomize=False, cutoff=cut)
    from homwitness import exact_conditional_second_moment

    vals = [
        exact_conditional_second_moment(out.measured, 0.0, x)
        for x in np.arange(0.0, 2.0, 0.1)
    ]
    assert min(vals) < 0.5  # the false positive the randomization suppresses
    randomized = interfere_arm_states(arm, vac, phase_randomize=True, cutoff=cut)
    vals_r = [
        exact_conditional_second_moment(randomized.measured, 0.0, x)
        for x in np.arange(0.0, 2.0, 0.1)
    ]
    assert min(vals_r) >= 0.5 - 1e-9


def test_poisson_distribution_tail_guard():
    dist = poisson_distribution(1.0, 12)
    assert abs(sum(dist) - 1.0) < 1e-12
    assert dist[1] == pytest.approx(dist[0])
    with pytest.raises(ValueError):
        poisson_distribution(1.0, 4)  # leakage above tolerance
