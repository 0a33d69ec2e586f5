"""Truncated Fock-space states and operator matrices.

Conventions used throughout the package:

* quadratures X = (a + a†)/√2 and P = i(a† − a)/√2, so [X, P] = i and the
  vacuum quadrature variance is 1/2;
* two-mode product states are indexed (n1, n2) with mode 1 as the slow
  index, i.e. flat index n1 * (n_max + 1) + n2.

All values are immutable after construction and every operation is a pure
function, so the module is safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
PSD_FLOOR = -1e-9
NORM_TOL = 1e-12
SUPPORT_TOL = 1e-14

VACUUM_VARIANCE = 0.5


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FockCutoff:
    """Highest retained Fock index per mode; basis dimension is n_max + 1."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


DEFAULT_CUTOFF = FockCutoff(6)


def pair_index(cutoff: FockCutoff, n1: int, n2: int) -> int:
    """Flat index of |n1, n2> (mode 1 slow)."""
    return n1 * cutoff.dim + n2


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on one or two truncated modes."""

    amplitudes: np.ndarray = field(repr=False)
    cutoff: FockCutoff
    n_modes: int = 1

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise ValueError("only single- and two-mode states are supported")
        amps = _readonly(self.amplitudes)
        expected = self.cutoff.dim**self.n_modes
        if amps.shape != (expected,):
            raise ValueError(f"amplitude vector must have length {expected}")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state not normalized (norm {norm}); use from_amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, raw, cutoff: FockCutoff, n_modes: int = 1) -> "PureState":
        raw = np.asarray(raw, dtype=complex)
        norm = np.linalg.norm(raw)
        if norm < 1e-300:
            raise ValueError("cannot normalize a zero vector")
        return cls(raw / norm, cutoff, n_modes)

    def normalize(self) -> "PureState":
        return PureState.from_amplitudes(self.amplitudes, self.cutoff, self.n_modes)

    def norm_error(self) -> float:
        return abs(np.vdot(self.amplitudes, self.amplitudes).real - 1.0)

    def to_density(self) -> "DensityMatrix":
        proj = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix(proj, self.cutoff, self.n_modes, _assume_psd=True)


def fock_ket(cutoff: FockCutoff, n: int) -> PureState:
    """Single-mode Fock state |n>; rejects occupation beyond the cutoff."""
    if not 0 <= n <= cutoff.n_max:
        raise ValueError(f"occupation {n} exceeds cutoff n_max={cutoff.n_max}")
    v = np.zeros(cutoff.dim, dtype=complex)
    v[n] = 1.0
    return PureState(v, cutoff, 1)


def fock_ket2(cutoff: FockCutoff, n1: int, n2: int) -> PureState:
    """Two-mode Fock state |n1, n2>; total photon number must fit the cutoff."""
    if min(n1, n2) < 0 or n1 + n2 > cutoff.n_max:
        raise ValueError(
            f"total photon number {n1 + n2} exceeds cutoff n_max={cutoff.n_max}"
        )
    v = np.zeros(cutoff.dim**2, dtype=complex)
    v[pair_index(cutoff, n1, n2)] = 1.0
    return PureState(v, cutoff, 2)


def superposition(cutoff: FockCutoff, terms: dict) -> PureState:
    """Normalized superposition from {n: amp} or {(n1, n2): amp}."""
    two_mode = any(isinstance(k, tuple) for k in terms)
    size = cutoff.dim**2 if two_mode else cutoff.dim
    v = np.zeros(size, dtype=complex)
    for key, amp in terms.items():
        idx = pair_index(cutoff, *key) if isinstance(key, tuple) else key
        v[idx] = amp
    return PureState.from_amplitudes(v, cutoff, 2 if two_mode else 1)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on the Fock basis.

    Validation tolerances: Hermiticity 1e-12 entrywise, trace 1e-9,
    smallest eigenvalue >= -1e-9.
    """

    entries: np.ndarray = field(repr=False)
    cutoff: FockCutoff
    n_modes: int = 1
    _assume_psd: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise ValueError("only single- and two-mode matrices are supported")
        mat = _readonly(self.entries)
        d = self.cutoff.dim**self.n_modes
        if mat.shape != (d, d):
            raise ValueError(f"matrix must be {d}x{d}")
        if not np.all(np.isfinite(mat.view(float))):
            raise ValueError("matrix entries must be finite")
        herm_err = np.abs(mat - mat.conj().T).max()
        if herm_err > HERMITIAN_TOL:
            raise ValueError(f"matrix not Hermitian (max asymmetry {herm_err:.3e})")
        tr = mat.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1 within {TRACE_TOL} (got {tr!r})")
        if not self._assume_psd:
            lo = np.linalg.eigvalsh(mat).min()
            if lo < PSD_FLOOR:
                raise ValueError(f"matrix not positive semidefinite (min eig {lo:.3e})")
        object.__setattr__(self, "entries", mat)

    @classmethod
    def from_unnormalized(
        cls, mat, cutoff: FockCutoff, n_modes: int = 1, assume_psd: bool = False
    ) -> "DensityMatrix":
        mat = np.asarray(mat, dtype=complex)
        tr = mat.trace().real
        if tr < 1e-300:
            raise ValueError("cannot normalize matrix with vanishing trace")
        return cls(mat / tr, cutoff, n_modes, _assume_psd=assume_psd)

    @classmethod
    def diagonal(cls, weights, cutoff: FockCutoff) -> "DensityMatrix":
        """Single-mode diagonal mixture with the given Fock weights."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) > cutoff.dim:
            raise ValueError("weights must be a 1-d vector fitting the cutoff")
        if w.min() < -1e-12:
            raise ValueError("weights must be nonnegative")
        full = np.zeros(cutoff.dim)
        full[: len(w)] = np.clip(w, 0.0, None)
        return cls(np.diag(full).astype(complex), cutoff, 1, _assume_psd=True)

    def trace(self) -> float:
        return self.entries.trace().real

    def normalize(self) -> "DensityMatrix":
        return DensityMatrix.from_unnormalized(
            self.entries, self.cutoff, self.n_modes, assume_psd=True
        )

    def diagonal_weights(self) -> np.ndarray:
        return np.clip(self.entries.diagonal().real, 0.0, None)

    def max_occupation(self) -> int:
        """Largest Fock index (per mode summed for two modes) with support."""
        diag = self.entries.diagonal().real
        occupied = np.nonzero(diag > SUPPORT_TOL)[0]
        if len(occupied) == 0:
            return 0
        if self.n_modes == 1:
            return int(occupied.max())
        n1, n2 = np.divmod(occupied, self.cutoff.dim)
        return int((n1 + n2).max())


def tensor(a, b):
    """Kronecker composition of two single-mode states or matrices.

    Index convention: (n1, n2) with mode 1 (the first argument) as the slow
    index. Raises on cutoff mismatch or if the combined photon-number
    support exceeds the cutoff.
    """
    if a.cutoff != b.cutoff:
        raise ValueError("cutoff mismatch between tensor factors")
    if a.n_modes != 1 or b.n_modes != 1:
        raise ValueError("tensor composes exactly two single-mode factors")
    if isinstance(a, PureState) and isinstance(b, PureState):
        support = _vector_support(a.amplitudes) + _vector_support(b.amplitudes)
        if support > a.cutoff.n_max:
            raise ValueError(
                f"combined photon number {support} exceeds cutoff {a.cutoff.n_max}"
            )
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.cutoff, 2)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        support = a.max_occupation() + b.max_occupation()
        if support > a.cutoff.n_max:
            raise ValueError(
                f"combined photon number {support} exceeds cutoff {a.cutoff.n_max}"
            )
        return DensityMatrix(
            np.kron(a.entries, b.entries), a.cutoff, 2, _assume_psd=True
        )
    raise TypeError("tensor arguments must both be PureState or both DensityMatrix")


def _vector_support(v: np.ndarray) -> int:
    occupied = np.nonzero(np.abs(v) > 1e-9)[0]
    return int(occupied.max()) if len(occupied) else 0


def partial_trace(rho: DensityMatrix, mode: int) -> DensityMatrix:
    """Trace out one mode of a two-mode matrix; preserves trace and Hermiticity."""
    if rho.n_modes != 2:
        raise ValueError("partial_trace requires a two-mode matrix")
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    d = rho.cutoff.dim
    four = rho.entries.reshape(d, d, d, d)
    reduced = np.einsum("nmnl->ml", four) if mode == 1 else np.einsum("nmkm->nk", four)
    return DensityMatrix(reduced, rho.cutoff, 1, _assume_psd=True)


def annihilation_matrix(cutoff: FockCutoff) -> np.ndarray:
    """Ladder operator a with a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, cutoff.dim)), k=1)


def number_matrix(cutoff: FockCutoff) -> np.ndarray:
    return np.diag(np.arange(cutoff.dim, dtype=float))


def x_matrix(cutoff: FockCutoff) -> np.ndarray:
    a = annihilation_matrix(cutoff)
    return (a + a.T) / math.sqrt(2.0)


def p_matrix(cutoff: FockCutoff) -> np.ndarray:
    a = annihilation_matrix(cutoff)
    return 1j * (a.T - a) / math.sqrt(2.0)


def x_squared_matrix(cutoff: FockCutoff) -> np.ndarray:
    """Matrix of X^2 = (a + a†)^2 / 2 in the Fock basis.

    Real, symmetric, pentadiagonal: diagonal n + 1/2, and
    (X^2)_{k-2,k} = sqrt(k(k-1))/2 on the |n-k| = 2 band.
    """
    d = cutoff.dim
    m = np.zeros((d, d))
    n = np.arange(d)
    m[n, n] = n + 0.5
    k = np.arange(2, d)
    band = 0.5 * np.sqrt(k * (k - 1))
    m[k - 2, k] = band
    m[k, k - 2] = band
    return m


def phase_rotation(cutoff: FockCutoff, theta: float) -> np.ndarray:
    """Diagonal of exp(-i n theta): maps operators to the rotated quadrature frame."""
    return np.exp(-1j * theta * np.arange(cutoff.dim))


def expect(rho: DensityMatrix, op: np.ndarray) -> float:
    """Tr[rho O] for Hermitian O; the imaginary residue must stay below 1e-9."""
    op = np.asarray(op)
    if not np.all(np.isfinite(op.view(float) if op.dtype == complex else op)):
        raise ValueError("operator entries must be finite")
    if np.abs(op - op.conj().T).max() > 1e-10:
        raise ValueError("expect requires a Hermitian operator")
    val = np.einsum("ij,ji->", rho.entries, op)
    if abs(val.imag) > 1e-9:
        raise ValueError(f"expectation has non-negligible imaginary part {val.imag:.3e}")
    return float(val.real)
