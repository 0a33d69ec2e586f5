"""Independent reference computations used to pin expected test values.

Everything here is deliberately built by a different route than the package:
dense Kronecker operators on the full four-mode space, scipy matrix
exponentials, and direct enumeration, so agreement is meaningful.
"""

import math

import numpy as np
from scipy.linalg import expm


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


def bs_pair_unitary(transmittance, phase, dim):
    """Two-mode beam-splitter unitary via scipy expm (matches the package convention)."""
    a = ladder(dim)
    adag = a.conj().T
    tau = np.arctan2(np.sqrt(1 - transmittance), np.sqrt(transmittance))
    gen = tau * (np.kron(adag, a) - np.kron(a, adag))  # a†b - b†a
    u_rot = expm(gen)
    n2 = np.tile(np.arange(dim), dim)
    return np.exp(1j * phase / 2.0 * n2)[:, None] * u_rot


def _op_on(mat, slot, dim):
    """Embed a single-mode operator at position ``slot`` of four modes."""
    ops = [np.eye(dim)] * 4
    ops[slot] = mat
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def four_mode_interference(arm1_dist, arm2_dist, xi, transmittance, phase, dim):
    """Brute-force four-mode output density matrix.

    Mode order (m1, m2, o1, o2): matched internal mode of both spatial
    outputs, then orthogonal internal mode of both. Returns the full
    dim^4 density matrix after the beam splitter.
    """
    adag_m1 = _op_on(ladder(dim).conj().T, 0, dim)
    adag_m2 = _op_on(ladder(dim).conj().T, 1, dim)
    adag_o2 = _op_on(ladder(dim).conj().T, 3, dim)
    u2 = bs_pair_unitary(transmittance, phase, dim)
    u4 = np.kron(u2, u2)  # spatial splitter acts on (m1,m2) and on (o1,o2)
    # Mode ordering for kron(u2, u2) is (m1, m2, o1, o2) only after regrouping:
    # kron(u2, u2) acts on (m1, m2) x (o1, o2) with m-pair slow, matching _op_on order
    # because _op_on uses index order (m1, m2, o1, o2).
    vac = np.zeros(dim**4)
    vac[0] = 1.0
    wavepacket2 = xi * adag_m2 + np.sqrt(max(0.0, 1 - xi**2)) * adag_o2
    rho = np.zeros((dim**4, dim**4), dtype=complex)
    for n, p1 in enumerate(arm1_dist):
        if p1 <= 0:
            continue
        for m, p2 in enumerate(arm2_dist):
            if p2 <= 0:
                continue
            ket = vac.astype(complex)
            for _ in range(n):
                ket = adag_m1 @ ket
            for _ in range(m):
                ket = wavepacket2 @ ket
            ket = ket / math.sqrt(math.factorial(n) * math.factorial(m))
            out = u4 @ ket
            rho += p1 * p2 * np.outer(out, out.conj())
    return rho


def trace_out_orthogonal(rho4, dim):
    """Reduce the four-mode matrix to the matched pair (m1, m2)."""
    t = rho4.reshape(dim, dim, dim, dim, dim, dim, dim, dim)
    return np.einsum("nmabklab->nmkl", t).reshape(dim * dim, dim * dim)


def click_probabilities(rho4, dim):
    """Coincidence table from the four-mode diagonal: a spatial output clicks
    when matched + orthogonal occupation there is at least one photon."""
    diag = np.real(np.diag(rho4)).reshape(dim, dim, dim, dim)
    table = np.zeros((2, 2))
    for n_m1 in range(dim):
        for n_m2 in range(dim):
            for n_o1 in range(dim):
                for n_o2 in range(dim):
                    c1 = int(n_m1 + n_o1 >= 1)
                    c2 = int(n_m2 + n_o2 >= 1)
                    table[c1, c2] += diag[n_m1, n_m2, n_o1, n_o2]
    return table
