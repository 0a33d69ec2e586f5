"""Quadrature wavefunctions, joint/conditional densities, and the sampler.

Phase convention: the quadrature eigenstate at local-oscillator phase theta
satisfies <x|theta, n> = exp(-i n theta) psi_n(x), where psi_n are the real
harmonic-oscillator eigenfunctions. For states with phase-randomized inputs
only the differential phase ``delta_theta`` = theta1 - theta2 matters, so the
densities take a single phase applied to mode 1 with mode 2 measured at
phase 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fock import DensityMatrix

LEAKAGE_TOL = 1e-6


class QuadratureSample(NamedTuple):
    """One joint homodyne record (vacuum-variance-1/2 units)."""

    x1: float
    x2: float


@dataclass(frozen=True)
class HomodyneSetting:
    """Differential LO phase and the evaluation grid for densities/sampling."""

    delta_theta: float = 0.0
    grid_range: float = 6.0
    grid_step: float = 0.01

    def __post_init__(self):
        if not math.isfinite(self.delta_theta):
            raise ValueError("delta_theta must be finite")
        if self.grid_range <= 0 or self.grid_step <= 0:
            raise ValueError("grid_range and grid_step must be positive")
        if self.grid_range / self.grid_step < 100:
            raise ValueError("grid_range/grid_step must be at least 100")

    @property
    def n_cells(self) -> int:
        return int(round(2.0 * self.grid_range / self.grid_step))

    def centers(self) -> np.ndarray:
        """Cell midpoints covering [-grid_range, grid_range]."""
        i = np.arange(self.n_cells)
        return -self.grid_range + (i + 0.5) * self.grid_step


def psi_n(n: int, x):
    """Harmonic-oscillator eigenfunction psi_n(x) (unit L2 norm).

    psi_0(x) = pi^{-1/4} exp(-x^2/2); higher n by the stable upward
    recurrence psi_n = x sqrt(2/n) psi_{n-1} - sqrt((n-1)/n) psi_{n-2}.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"Fock index must be a nonnegative integer, got {n!r}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return psi_table(n, x)[n]


def psi_table(n_max: int, x) -> np.ndarray:
    """All psi_n(x) for n = 0..n_max, shape (n_max + 1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(2, n_max + 1):
        out[n] = x * math.sqrt(2.0 / n) * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


def _four_index(state: DensityMatrix) -> np.ndarray:
    if state.n_modes != 2:
        raise ValueError("a two-mode state is required")
    d = state.cutoff.dim
    return state.entries.reshape(d, d, d, d)  # [n, m, k, l] = <n m|rho|k l>


def joint_density_two_phase(
    state: DensityMatrix, theta1: float, theta2: float, x1: float, x2: float
) -> float:
    """Joint quadrature density with independent LO phases on both modes."""
    rho4 = _four_index(state)
    d = state.cutoff.dim
    n = np.arange(d)
    u1 = psi_table(d - 1, np.asarray(x1, dtype=float)) * np.exp(-1j * n * theta1)
    u2 = psi_table(d - 1, np.asarray(x2, dtype=float)) * np.exp(-1j * n * theta2)
    val = np.einsum("nmkl,n,k,m,l->", rho4, u1, u1.conj(), u2, u2.conj())
    if abs(val.imag) > 1e-10:
        raise ValueError(f"density has imaginary residue {val.imag:.3e}")
    p = val.real
    if p < -1e-10:
        raise ValueError(f"density negative beyond tolerance ({p:.3e})")
    return max(p, 0.0)


def joint_density(state: DensityMatrix, delta_theta: float, x1: float, x2: float) -> float:
    """P(x1, x2) with mode 1 at phase delta_theta and mode 2 at phase 0."""
    return joint_density_two_phase(state, delta_theta, 0.0, x1, x2)


def joint_density_grid(state: DensityMatrix, setting: HomodyneSetting) -> np.ndarray:
    """Joint density on the full grid; entry [i, j] is P(x1 = c_i, x2 = c_j)."""
    rho4 = _four_index(state)
    d = state.cutoff.dim
    centers = setting.centers()
    tbl = psi_table(d - 1, centers)  # (d, M)
    ph = np.exp(-1j * np.arange(d) * setting.delta_theta)
    t1 = tbl * ph[:, None]
    g1 = (t1[:, None, :] * t1.conj()[None, :, :]).reshape(d * d, -1)
    g2 = (tbl[:, None, :] * tbl[None, :, :]).reshape(d * d, -1)
    middle = rho4.transpose(0, 2, 1, 3).reshape(d * d, d * d)  # [(n,k),(m,l)]
    grid = (g1.T @ middle @ g2).real
    np.clip(grid, 0.0, None, out=grid)
    return grid


def marginal_density(state: DensityMatrix, x2, delta_theta: float = 0.0) -> np.ndarray:
    """Marginal density of the mode-2 quadrature (phase-0); independent of delta_theta."""
    rho4 = _four_index(state)
    d = state.cutoff.dim
    sigma = np.einsum("nmnl->ml", rho4)
    tbl = psi_table(d - 1, np.asarray(x2, dtype=float))
    vals = np.einsum("ml,m...,l...->...", sigma, tbl, tbl).real
    return np.clip(vals, 0.0, None)


def conditional_state(state: DensityMatrix, delta_theta: float, x2: float) -> np.ndarray:
    """Unnormalized mode-1 state after measuring x2 on mode 2 (phase 0).

    The mode-1 phase is absorbed: plain X^2 expectations on the returned
    kernel give moments of X1(delta_theta). Its trace equals the marginal
    density of x2.
    """
    rho4 = _four_index(state)
    d = state.cutoff.dim
    v2 = psi_table(d - 1, np.asarray(x2, dtype=float))
    kernel = np.einsum("nmkl,m,l->nk", rho4, v2, v2)
    ph = np.exp(-1j * np.arange(d) * delta_theta)
    return kernel * np.outer(ph, ph.conj())


class QuadratureSampler:
    """Seeded inverse-CDF sampler over the gridded joint density.

    Precomputes the density once; ``draw`` picks the mode-2 cell from the
    gridded marginal, then the mode-1 cell from the gridded conditional,
    and jitters each value uniformly within its cell. Concurrent use
    requires distinct seeds per draw; results are deterministic per seed.
    """

    def __init__(self, state: DensityMatrix, setting: HomodyneSetting):
        self.setting = setting
        self.centers = setting.centers()
        h = setting.grid_step
        grid = joint_density_grid(state, setting)
        mass = grid.sum() * h * h
        if abs(mass - state.trace()) > LEAKAGE_TOL:
            raise ValueError(
                f"gridded density mass {mass!r} deviates from the state trace; "
                "truncation leakage exceeds tolerance"
            )
        marg = grid.sum(axis=0)
        self._cum2 = np.cumsum(marg)
        self._cum2 /= self._cum2[-1]
        cond = np.cumsum(grid, axis=0).T  # row i2: cumulative over x1 cells
        totals = cond[:, -1].copy()
        live = totals > 0
        cond[live] /= totals[live, None]
        self._cond_cum = cond

    def draw(self, n: int, seed) -> np.ndarray:
        """Return an (n, 2) array of (x1, x2) records."""
        if n < 1:
            raise ValueError("sample count must be at least 1")
        rng = np.random.default_rng(seed)
        u = rng.random((int(n), 4))
        h = self.setting.grid_step
        i2 = np.searchsorted(self._cum2, u[:, 0], side="right")
        i2 = np.minimum(i2, len(self.centers) - 1)
        i1 = np.empty(int(n), dtype=np.intp)
        order = np.argsort(i2, kind="stable")
        sorted_i2 = i2[order]
        starts = np.flatnonzero(np.r_[True, sorted_i2[1:] != sorted_i2[:-1]])
        bounds = np.r_[starts, len(sorted_i2)]
        for s, e in zip(bounds[:-1], bounds[1:]):
            cell = sorted_i2[s]
            idx = order[s:e]
            picks = np.searchsorted(self._cond_cum[cell], u[idx, 2], side="right")
            i1[idx] = np.minimum(picks, len(self.centers) - 1)
        x1 = self.centers[i1] + (u[:, 3] - 0.5) * h
        x2 = self.centers[i2] + (u[:, 1] - 0.5) * h
        return np.column_stack([x1, x2])


def sample(state: DensityMatrix, setting: HomodyneSetting, n: int, seed) -> np.ndarray:
    """Draw n joint quadrature records; see QuadratureSampler."""
    return QuadratureSampler(state, setting).draw(n, seed)
