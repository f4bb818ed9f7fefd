"""Winding numbers, gap indices, the (M, phi) phase map, and the geometric oracle.

Winding numbers are accumulated from unwrapped angle increments of the planar
frame vector nx + i nz around the Brillouin zone.  The geometric integral of
the same vector provides an independent route to -W/2 and is used to
cross-check both the winding code and the dynamical mean-chiral-displacement
probes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GapClosedOnContour, ParityError
from .model import ModelParams, TimeFrame, frame_vector_components

MODULUS_FLOOR = 1e-8
RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class TopologicalInvariants:
    """Frame windings, gap indices, and the raw-integral residuals at one point."""

    W1: int
    W2: int
    nu0: int
    nupi: int
    residual1: float
    residual2: float


@dataclass(frozen=True, eq=False)
class PhaseMapResult:
    """Winding and gap-index grids over (M, phi); closed marks gap-closing cells."""

    M_grid: np.ndarray
    phi_grid: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    nu0: np.ndarray
    nupi: np.ndarray
    residual1: np.ndarray
    residual2: np.ndarray
    closed: np.ndarray

    def cell(self, i: int, j: int) -> TopologicalInvariants | None:
        """Invariants at grid cell (i, j), or None when the cell is marked closed."""
        if self.closed[i, j]:
            return None
        return TopologicalInvariants(
            int(self.W1[i, j]), int(self.W2[i, j]),
            int(self.nu0[i, j]), int(self.nupi[i, j]),
            float(self.residual1[i, j]), float(self.residual2[i, j]),
        )


def _momentum_grid(N: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(N) / N


def winding_number(p: ModelParams, frame: TimeFrame | int, N: int = 4096) -> tuple[int, float]:
    """Winding of arg(nx + i nz) over the Brillouin zone, with its residual.

    The increments between successive grid points are mapped into (-pi, pi],
    which keeps branch cuts out of the sum as long as the per-step phase change
    stays well below pi; N >= 256 is required for that reason.
    """
    if N < 256:
        raise ValueError(f"need N >= 256 grid points, got {N}")
    k = _momentum_grid(N)
    nx, nz = frame_vector_components(p, k, frame)
    w = nx + 1j * nz
    modulus = np.abs(w)
    if modulus.min() <= MODULUS_FLOOR:
        raise GapClosedOnContour(
            f"min |n| = {modulus.min():.3e} on the contour; winding undefined at a gap closing"
        )
    increments = np.angle(np.roll(w, -1) / w)
    raw = float(increments.sum() / (2.0 * np.pi))
    W = int(np.rint(raw))
    return W, abs(raw - W)


def gap_indices(W1: int, W2: int) -> tuple[int, int]:
    """Gap indices nu0 = (W1 + W2)/2 and nupi = (W1 - W2)/2."""
    if (W1 + W2) % 2 != 0:
        raise ParityError(f"W1 + W2 = {W1 + W2} is odd; upstream winding failed")
    return (W1 + W2) // 2, (W1 - W2) // 2


def invariants_at(p: ModelParams, N: int = 4096) -> TopologicalInvariants:
    """Both frame windings and the derived gap indices at a single point."""
    W1, r1 = winding_number(p, TimeFrame.FRAME1, N)
    W2, r2 = winding_number(p, TimeFrame.FRAME2, N)
    nu0, nupi = gap_indices(W1, W2)
    return TopologicalInvariants(W1, W2, nu0, nupi, r1, r2)


def _winding_row(p_base: ModelParams, M: float, phis: np.ndarray, frame: TimeFrame, N: int):
    """Vectorized winding for one row of the map: all phi at fixed M.

    Returns (W, residual, closed) arrays of length len(phis).
    """
    k = _momentum_grid(N)[None, :]
    phis = phis[:, None]
    theta1 = p_base.T * p_base.t1 * np.sin(k - phis)
    theta2 = 0.5 * p_base.T * (M + 2.0 * p_base.t2 * np.cos(k))
    if frame is TimeFrame.FRAME1:
        nx, nz = np.sin(theta2), np.cos(theta2) * np.sin(theta1)
    else:
        nx, nz = np.cos(theta1) * np.sin(theta2), np.sin(theta1)
    nx = np.broadcast_to(nx, theta1.shape)
    nz = np.broadcast_to(nz, theta1.shape)
    w = nx + 1j * nz
    closed = np.abs(w).min(axis=1) <= MODULUS_FLOOR
    safe = np.where(closed[:, None], 1.0, w)
    increments = np.angle(np.roll(safe, -1, axis=1) / safe)
    raw = increments.sum(axis=1) / (2.0 * np.pi)
    W = np.rint(raw).astype(int)
    residual = np.abs(raw - W)
    closed = closed | (residual >= RESIDUAL_TOL)
    return W, residual, closed


def phase_map(
    p_base: ModelParams,
    M_range: tuple[float, float],
    phi_range: tuple[float, float],
    nM: int,
    nphi: int,
    N: int = 1024,
    threads: int = 1,
) -> PhaseMapResult:
    """Evaluate both frame windings on an (M, phi) grid.

    Cells where the planar vector dips below the modulus floor in either frame
    (or where the raw integral is not an integer, which never happens away from
    a closing) are marked closed; these trace the phase boundaries.  A single
    grid point per axis is allowed, which degenerates to a point evaluation.
    Rows of the map are independent and are distributed over `threads` workers.
    """
    if nM < 1 or nphi < 1:
        raise ValueError(f"grid sizes must be >= 1, got nM={nM}, nphi={nphi}")
    Ms = np.linspace(M_range[0], M_range[1], nM)
    phis = np.linspace(phi_range[0], phi_range[1], nphi)
    W1 = np.zeros((nM, nphi), dtype=int)
    W2 = np.zeros_like(W1)
    r1 = np.zeros((nM, nphi))
    r2 = np.zeros_like(r1)
    closed = np.zeros((nM, nphi), dtype=bool)

    def fill_row(i: int):
        w1, res1, c1 = _winding_row(p_base, float(Ms[i]), phis, TimeFrame.FRAME1, N)
        w2, res2, c2 = _winding_row(p_base, float(Ms[i]), phis, TimeFrame.FRAME2, N)
        W1[i], W2[i], r1[i], r2[i] = w1, w2, res1, res2
        closed[i] = c1 | c2 | (((w1 + w2) % 2) != 0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, range(nM)))
    else:
        for i in range(nM):
            fill_row(i)

    nu0 = np.where(closed, 0, (W1 + W2) // 2)
    nupi = np.where(closed, 0, (W1 - W2) // 2)
    return PhaseMapResult(Ms, phis, W1, W2, nu0, nupi, r1, r2, closed)


def geometric_mcd_integral(p: ModelParams, frame: TimeFrame | int, N: int = 8192) -> float:
    """Geometric time-average target -(1/4pi) * integral of d(arg n)/dk = -W/2.

    The integrand uses central finite differences with periodic wraparound; the
    quantized value gives an absolute accuracy check, so spectral-order
    derivatives are unnecessary.
    """
    k = _momentum_grid(N)
    h = 2.0 * np.pi / N
    nx, nz = frame_vector_components(p, k, frame)
    modulus2 = nx**2 + nz**2
    if modulus2.min() <= MODULUS_FLOOR**2:
        raise GapClosedOnContour(
            f"min |n| = {np.sqrt(modulus2.min()):.3e} on the contour; integral undefined"
        )
    dnx = (np.roll(nx, -1) - np.roll(nx, 1)) / (2.0 * h)
    dnz = (np.roll(nz, -1) - np.roll(nz, 1)) / (2.0 * h)
    integrand = (nx * dnz - nz * dnx) / modulus2
    return float(-0.5 * integrand.sum() * h / (2.0 * np.pi))
