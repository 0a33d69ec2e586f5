"""Source preparation, channels, and beam-splitter interference.

The interferometer couples two spatial arms. Distinguishability between the
arms' photons is modeled with two internal (temporal/spectral) modes per
arm: arm 1 defines the "matched" internal mode that the homodyne local
oscillator projects onto; a photon in arm 2 occupies
``xi * matched + sqrt(1 - xi^2) * orthogonal``. The spatial beam splitter
acts identically on both internal modes (a four-mode computation), the
orthogonal modes are traced out of the homodyne-visible state, and their
photon content per spatial output is retained for broadband click counting.

Beam-splitter convention (single-photon transfer matrix, columns = inputs):

    S = [[ sqrt(T),                  sqrt(1-T)          ],
         [-sqrt(1-T) e^{i phi/2},    sqrt(T) e^{i phi/2}]]

With T = 1/2 the |1,1> input maps exactly to (|2,0> - e^{i phi}|0,2>)/sqrt(2),
phi being the relative phase between the output modes.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .fock import (
    DEFAULT_CUTOFF,
    DensityMatrix,
    FockCutoff,
    PureState,
    annihilation_matrix,
)

DIST_TOL = 1e-12
BRANCH_TOL = 1e-9
WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class SourceModel:
    """Two-arm source configuration.

    Each arm carries a photon-number distribution (index = occupation).
    ``overlap`` is the internal-mode overlap xi in [0, 1] (1 = fully
    indistinguishable), ``transmittance`` the beam-splitter T, and
    ``phase`` the relative output phase phi in radians.
    """

    arm1: tuple = (0.0, 1.0)
    arm2: tuple = (0.0, 1.0)
    overlap: float = 1.0
    transmittance: float = 0.5
    phase: float = 0.0

    def __post_init__(self):
        for name, dist in (("arm1", self.arm1), ("arm2", self.arm2)):
            arr = np.asarray(dist, dtype=float)
            if arr.ndim != 1 or len(arr) == 0:
                raise ValueError(f"{name} must be a nonempty distribution")
            if arr.min() < -DIST_TOL:
                raise ValueError(f"{name} entries must be nonnegative")
            if abs(arr.sum() - 1.0) > DIST_TOL:
                raise ValueError(f"{name} must sum to 1 within {DIST_TOL}")
            object.__setattr__(self, name, tuple(float(p) for p in arr))
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("overlap must lie in [0, 1]")
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError("transmittance must lie in [0, 1]")
        if not math.isfinite(self.phase):
            raise ValueError("phase must be finite")

    def max_photons(self) -> int:
        return (len(self.arm1) - 1) + (len(self.arm2) - 1)


def make_arm_state(dist, cutoff: FockCutoff = DEFAULT_CUTOFF) -> DensityMatrix:
    """Diagonal single-mode state from a photon-number distribution."""
    arr = np.asarray(dist, dtype=float)
    if arr.ndim != 1 or len(arr) == 0 or len(arr) > cutoff.dim:
        raise ValueError("distribution must be nonempty and fit the cutoff")
    if arr.min() < -DIST_TOL:
        raise ValueError("distribution entries must be nonnegative")
    if abs(arr.sum() - 1.0) > DIST_TOL:
        raise ValueError("distribution must sum to 1")
    return DensityMatrix.diagonal(arr, cutoff)


def poisson_distribution(mean: float, max_n: int, tail_tol: float = 1e-10) -> tuple:
    """Truncated, renormalized Poissonian; rejects truncation leakage > tail_tol."""
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    if mean == 0:
        return (1.0,) + (0.0,) * max_n
    n = np.arange(max_n + 1)
    logw = n * math.log(mean) - mean - np.array([math.lgamma(k + 1) for k in n])
    w = np.exp(logw)
    tail = 1.0 - w.sum()
    if tail > tail_tol:
        raise ValueError(
            f"truncation leakage {tail:.3e} exceeds {tail_tol}; raise max_n"
        )
    return tuple(w / w.sum())


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Uniform-phase average: zeroes Fock off-diagonals, keeps the diagonal.

    Leaves Fock states (in particular single photons) unchanged; idempotent.
    """
    if rho.n_modes != 1:
        raise ValueError("dephase acts on single-mode states")
    return DensityMatrix(
        np.diag(rho.entries.diagonal()), rho.cutoff, 1, _assume_psd=True
    )


def transfer_matrix(transmittance: float, phase: float) -> np.ndarray:
    """2x2 single-photon transfer matrix S (columns = input arms)."""
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    rt = math.sqrt(transmittance)
    rr = math.sqrt(1.0 - transmittance)
    ph = np.exp(1j * phase / 2.0)
    return np.array([[rt, rr], [-rr * ph, rt * ph]])


def beamsplitter_matrix(
    transmittance: float, phase: float, cutoff: FockCutoff = DEFAULT_CUTOFF
) -> np.ndarray:
    """Two-mode beam-splitter unitary on the truncated product basis.

    Unitary on the whole truncated space and exact (to rounding) on every
    total-photon-number block that fits the cutoff; blocks with more photons
    than n_max are clipped by the truncation but remain unitary.
    """
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    d = cutoff.dim
    a = annihilation_matrix(cutoff)
    adag = a.T
    tau = math.atan2(math.sqrt(1.0 - transmittance), math.sqrt(transmittance))
    # Generator i*tau*(b†a - a†b) conserves total photon number.
    ham = 1j * tau * (np.kron(a, adag) - np.kron(adag, a))
    vals, vecs = np.linalg.eigh(ham)
    u_rot = (vecs * np.exp(1j * vals)) @ vecs.conj().T
    n2 = np.tile(np.arange(d), d)
    return np.exp(1j * phase / 2.0 * n2)[:, None] * u_rot


@dataclass(frozen=True)
class Branch:
    """One pure component of the post-splitter state.

    ``state`` lives on the two homodyne-matched output modes;
    ``orth_photons`` counts photons in the orthogonal internal mode at each
    spatial output (they are invisible to homodyne but click broadband
    detectors).
    """

    weight: float
    state: PureState
    orth_photons: tuple

    def __post_init__(self):
        q1, q2 = self.orth_photons
        if q1 < 0 or q2 < 0 or q1 != int(q1) or q2 != int(q2):
            raise ValueError("orthogonal-mode photon counts must be nonneg integers")
        if self.weight < 0:
            raise ValueError("branch weight must be nonnegative")


@dataclass(frozen=True)
class InterferenceState:
    """Post-beam-splitter state: homodyne-visible matrix plus click bookkeeping."""

    measured: DensityMatrix
    branches: tuple = field(repr=False)

    def __post_init__(self):
        total = sum(b.weight for b in self.branches)
        if abs(total - 1.0) > BRANCH_TOL:
            raise ValueError(f"branch weights sum to {total}, expected 1")
        recon = np.zeros_like(self.measured.entries)
        for b in self.branches:
            v = b.state.amplitudes
            recon = recon + b.weight * np.outer(v, v.conj())
        err = np.abs(recon - self.measured.entries).max()
        if err > BRANCH_TOL:
            raise ValueError(f"branches do not reconstruct measured state ({err:.3e})")

    def mean_photons_total(self) -> float:
        """Mean photon number over all four output modes."""
        d = self.measured.cutoff.dim
        n1 = np.repeat(np.arange(d), d)
        n2 = np.tile(np.arange(d), d)
        total = 0.0
        for b in self.branches:
            probs = np.abs(b.state.amplitudes) ** 2
            total += b.weight * (
                float(probs @ (n1 + n2)) + b.orth_photons[0] + b.orth_photons[1]
            )
        return total


def _apply_combo(vec: dict, combo: list) -> dict:
    """Apply sum_j c_j a_j† to an occupation->amplitude map over four modes."""
    out = defaultdict(complex)
    for occ, amp in vec.items():
        for mode, c in combo:
            lst = list(occ)
            lst[mode] += 1
            out[tuple(lst)] += amp * c * math.sqrt(lst[mode])
    return out


def _mode_polynomial(start: dict, combo: list, coeffs: np.ndarray) -> dict:
    """Apply sum_m coeffs[m] (sum_j c_j a_j†)^m / sqrt(m!) to ``start``."""
    acc = defaultdict(complex)
    cur = start
    factorial = 1.0
    for m, c in enumerate(coeffs):
        if m > 0:
            cur = _apply_combo(cur, combo)
            factorial *= m
        if c == 0:
            continue
        scale = c / math.sqrt(factorial)
        for occ, amp in cur.items():
            acc[occ] += scale * amp
    return acc


def _arm_components(rho: DensityMatrix):
    """Decompose an arm state into pure components (weight, amplitude vector)."""
    mat = rho.entries
    off = np.abs(mat - np.diag(mat.diagonal())).max()
    if off < 1e-15:
        for n, p in enumerate(mat.diagonal().real):
            if p > WEIGHT_FLOOR:
                vec = np.zeros(rho.cutoff.dim, dtype=complex)
                vec[n] = 1.0
                yield p, vec
        return
    vals, vecs = np.linalg.eigh(mat)
    for k in range(len(vals)):
        if vals[k] > WEIGHT_FLOOR:
            yield float(vals[k]), vecs[:, k]


def interfere(
    source: SourceModel,
    cutoff: FockCutoff = DEFAULT_CUTOFF,
    phase_randomize: bool = True,
) -> InterferenceState:
    """Interfere the two source arms on the beam splitter.

    Arm states are dephased before interference (the witness precondition);
    ``phase_randomize=False`` skips that step and exists only for
    false-positive demonstrations.
    """
    arm1 = make_arm_state(source.arm1, cutoff)
    arm2 = make_arm_state(source.arm2, cutoff)
    return interfere_arm_states(
        arm1,
        arm2,
        overlap=source.overlap,
        transmittance=source.transmittance,
        phase=source.phase,
        cutoff=cutoff,
        phase_randomize=phase_randomize,
    )


def interfere_arm_states(
    arm1: DensityMatrix,
    arm2: DensityMatrix,
    overlap: float = 1.0,
    transmittance: float = 0.5,
    phase: float = 0.0,
    cutoff: FockCutoff = DEFAULT_CUTOFF,
    phase_randomize: bool = True,
) -> InterferenceState:
    """General entry point accepting explicit single-mode arm states."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    if arm1.n_modes != 1 or arm2.n_modes != 1:
        raise ValueError("arm states must be single-mode")
    if phase_randomize:
        arm1 = dephase(arm1)
        arm2 = dephase(arm2)
    total = arm1.max_occupation() + arm2.max_occupation()
    if total > cutoff.n_max:
        raise ValueError(
            f"cutoff n_max={cutoff.n_max} too small for {total} input photons"
        )

    s = transfer_matrix(transmittance, phase)
    xi = overlap
    ortho = math.sqrt(max(0.0, 1.0 - xi * xi))
    # Output modes: 0 = arm1 matched, 1 = arm2 matched, 2/3 = orthogonal.
    combo1 = [(j, s[j, 0]) for j in range(2) if s[j, 0] != 0]
    combo2 = [(j, xi * s[j, 1]) for j in range(2) if xi * s[j, 1] != 0]
    combo2 += [(j + 2, ortho * s[j, 1]) for j in range(2) if ortho * s[j, 1] != 0]

    d = cutoff.dim
    vacuum = {(0, 0, 0, 0): 1.0 + 0.0j}
    measured = np.zeros((d * d, d * d), dtype=complex)
    branches = []
    for w1, vec1 in _arm_components(arm1):
        half = _mode_polynomial(vacuum, combo1, vec1)
        for w2, vec2 in _arm_components(arm2):
            full = _mode_polynomial(half, combo2, vec2)
            groups = defaultdict(list)
            for occ, amp in full.items():
                groups[(occ[2], occ[3])].append((occ[0], occ[1], amp))
            for orth, entries in groups.items():
                v = np.zeros(d * d, dtype=complex)
                for n1, n2, amp in entries:
                    v[n1 * d + n2] += amp
                weight = w1 * w2 * float(np.vdot(v, v).real)
                if weight < WEIGHT_FLOOR:
                    continue
                v /= np.linalg.norm(v)
                measured += weight * np.outer(v, v.conj())
                branches.append(Branch(weight, PureState(v, cutoff, 2), orth))

    measured_dm = DensityMatrix(measured, cutoff, 2, _assume_psd=True)
    return InterferenceState(measured_dm, tuple(branches))
