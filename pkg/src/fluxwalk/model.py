"""Momentum-space definition of the two-substep flux-controlled walk.

The walk over one period is U(k) = exp(-i theta2(k) sigma_x) exp(-i theta1(k) sigma_z)
with a coin-dependent drift angle theta1 and a momentum-dependent mixing angle
theta2.  Everything downstream (winding numbers, real-space operators, dynamical
probes) is controlled by the five numbers collected in ModelParams.

Conventions fixed here once for all modules:
  * coin basis ordering (A, B); sigma_y = [[0, -i], [i, 0]],
  * quasienergy branch eps in (-pi/T, pi/T], computed as -arg(lambda)/T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import NonUnitaryInput, NumericalInconsistency, WrongParameters

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

UNITARITY_TOL = 1e-12
ARCCOS_CLAMP_TOL = 1e-12


class TimeFrame(Enum):
    """The two symmetric time frames of the chiral walk."""

    FRAME1 = 1
    FRAME2 = 2


class Gap(Enum):
    """Which quasienergy gap a band touching closes."""

    ZERO = "zero"
    PI = "pi"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the walk; t1 = t2 = 1 and T = 2 are the defaults."""

    M: float
    phi: float
    t1: float = 1.0
    t2: float = 1.0
    T: float = 2.0

    def __post_init__(self):
        vals = (self.M, self.phi, self.t1, self.t2, self.T)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"all parameters must be finite, got {vals}")
        if self.T <= 0:
            raise ValueError(f"drive period must be positive, got T={self.T}")


class BlochDecomposition(NamedTuple):
    """Pauli content of a 2x2 unitary: u = d0*I - i (dx sx + dy sy + dz sz)."""

    d0: float
    dx: float
    dy: float
    dz: float


class FrameVector(NamedTuple):
    """Planar axis vector (n0, nx, nz) of a symmetric-frame walk operator."""

    frame: TimeFrame
    n0: float
    nx: float
    nz: float


@dataclass(frozen=True)
class GapClosing:
    """A band touching at momentum kstar with theta1 = m*pi and theta2 = n*pi."""

    kstar: float
    m_index: int
    n_index: int
    gap: Gap


def angles(p: ModelParams, k):
    """Drift and mixing angles theta1 = T t1 sin(k - phi), theta2 = (T/2)(M + 2 t2 cos k).

    Accepts a scalar or an array of momenta and returns matching shapes.
    """
    k = np.asarray(k, dtype=float)
    theta1 = p.T * p.t1 * np.sin(k - p.phi)
    theta2 = 0.5 * p.T * (p.M + 2.0 * p.t2 * np.cos(k))
    if k.ndim == 0:
        return float(theta1), float(theta2)
    return theta1, theta2


def _rot_x(theta):
    """exp(-i theta sigma_x), vectorized over a trailing-free theta array."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    u = np.zeros(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 1, 1] = c
    u[..., 0, 1] = -1j * s
    u[..., 1, 0] = -1j * s
    return u


def _rot_z(theta):
    """exp(-i theta sigma_z), vectorized."""
    theta = np.asarray(theta, dtype=float)
    u = np.zeros(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * theta)
    u[..., 1, 1] = np.exp(1j * theta)
    return u


def bloch_unitaries(p: ModelParams, k) -> np.ndarray:
    """Stack of walk unitaries U(k) = Rx(theta2) Rz(theta1) over an array of momenta."""
    theta1, theta2 = angles(p, np.asarray(k, dtype=float))
    return _rot_x(theta2) @ _rot_z(theta1)


def bloch_unitary(p: ModelParams, k: float) -> np.ndarray:
    """The 2x2 walk unitary at a single momentum."""
    return bloch_unitaries(p, np.float64(k))


def frame_unitaries(p: ModelParams, k, frame: TimeFrame | int) -> np.ndarray:
    """Symmetric-frame unitaries over an array of momenta.

    Frame 1 splits the drift factor, U1 = Rz(theta1/2) Rx(theta2) Rz(theta1/2);
    frame 2 splits the mixing factor.  Both are similar to U(k), so they share
    its spectrum, and both are palindromic, which is what makes the chiral
    relation sigma_y U_l sigma_y = U_l^{-1} exact.
    """
    frame = TimeFrame(frame)
    theta1, theta2 = angles(p, np.asarray(k, dtype=float))
    if frame is TimeFrame.FRAME1:
        half = _rot_z(0.5 * np.asarray(theta1))
        return half @ _rot_x(theta2) @ half
    half = _rot_x(0.5 * np.asarray(theta2))
    return half @ _rot_z(theta1) @ half


def frame_unitary(p: ModelParams, k: float, frame: TimeFrame | int) -> np.ndarray:
    """Symmetric-frame 2x2 unitary at a single momentum."""
    return frame_unitaries(p, np.float64(k), frame)


def pauli_decompose(u: np.ndarray) -> BlochDecomposition:
    """Split a 2x2 unitary into d0*I - i d.sigma with real coefficients.

    Raises NonUnitaryInput when u fails the unitarity check, and
    NumericalInconsistency when the real-coefficient reconstruction does not
    reproduce u (a global U(1) phase, i.e. det != 1, shows up here).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise NonUnitaryInput(f"expected a 2x2 matrix, got shape {u.shape}")
    residual = np.abs(u.conj().T @ u - IDENTITY_2).max()
    if residual >= UNITARITY_TOL:
        raise NonUnitaryInput(f"unitarity residual {residual:.3e} exceeds {UNITARITY_TOL:.0e}")
    d0 = float(np.real(np.trace(u))) / 2.0
    dx = float(np.real(0.5j * np.trace(u @ SIGMA_X)))
    dy = float(np.real(0.5j * np.trace(u @ SIGMA_Y)))
    dz = float(np.real(0.5j * np.trace(u @ SIGMA_Z)))
    recon = d0 * IDENTITY_2 - 1j * (dx * SIGMA_X + dy * SIGMA_Y + dz * SIGMA_Z)
    err = np.abs(recon - u).max()
    if err >= 1e-12:
        raise NumericalInconsistency(
            f"Pauli reconstruction residual {err:.3e}; input is unitary but not SU(2)"
        )
    return BlochDecomposition(d0, dx, dy, dz)


def _clamped_arccos(x):
    """arccos with roundoff excursions beyond [-1, 1] clamped, bigger ones fatal."""
    x = np.asarray(x, dtype=float)
    excess = np.abs(x) - 1.0
    worst = excess.max() if x.size else -1.0
    if worst > ARCCOS_CLAMP_TOL:
        raise NumericalInconsistency(
            f"arccos argument exceeds [-1, 1] by {worst:.3e}; this is not roundoff"
        )
    return np.arccos(np.clip(x, -1.0, 1.0))


def quasienergies(p: ModelParams, k):
    """Band energies eps_-(k) <= eps_+(k) from the trace formula.

    cos(eps T) = cos(theta1) cos(theta2); values lie in [-pi/T, pi/T].
    """
    theta1, theta2 = angles(p, np.asarray(k, dtype=float))
    e = _clamped_arccos(np.cos(theta1) * np.cos(theta2)) / p.T
    if np.ndim(e) == 0:
        return float(-e), float(e)
    return -e, e


def frame_vector(p: ModelParams, k: float, frame: TimeFrame | int) -> FrameVector:
    """Axis vector of the symmetric-frame operator; the y component vanishes."""
    frame = TimeFrame(frame)
    theta1, theta2 = angles(p, float(k))
    n0 = math.cos(theta1) * math.cos(theta2)
    if frame is TimeFrame.FRAME1:
        nx = math.sin(theta2)
        nz = math.cos(theta2) * math.sin(theta1)
    else:
        nx = math.cos(theta1) * math.sin(theta2)
        nz = math.sin(theta1)
    return FrameVector(frame, n0, nx, nz)


def frame_vector_components(p: ModelParams, k, frame: TimeFrame | int):
    """(nx, nz) arrays over a momentum grid; the workhorse for winding integrals."""
    frame = TimeFrame(frame)
    theta1, theta2 = angles(p, np.asarray(k, dtype=float))
    if frame is TimeFrame.FRAME1:
        return np.sin(theta2), np.cos(theta2) * np.sin(theta1)
    return np.cos(theta1) * np.sin(theta2), np.sin(theta1)


def _bisect_root(f, lo: float, hi: float, flo: float, iters: int = 80) -> float:
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _level_set_roots(f, level: float, n_intervals: int = 2048) -> list[float]:
    """All k in [-pi, pi] with f(k) = level, by sign-change bisection on a grid."""
    grid = np.linspace(-np.pi, np.pi, n_intervals + 1)
    vals = f(grid) - level
    roots = []
    for i in range(n_intervals):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            g = lambda k: f(k) - level
            roots.append(_bisect_root(g, float(grid[i]), float(grid[i + 1]), float(vals[i])))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def gap_closings(p: ModelParams, tol: float = 1e-9) -> list[GapClosing]:
    """All momenta where both angles hit integer multiples of pi simultaneously.

    theta1(k) = m*pi level sets are located by bisection (plus a tangency check
    at the extrema of theta1), then theta2's residual from the nearest n*pi is
    tested against tol.  m + n even closes the 0 gap, odd closes the pi gap.
    Returns an empty list when the point is gapped.
    """
    th1 = lambda k: p.T * p.t1 * np.sin(np.asarray(k, float) - p.phi)
    th2 = lambda k: 0.5 * p.T * (p.M + 2.0 * p.t2 * np.cos(np.asarray(k, float)))
    amp1 = abs(p.T * p.t1)
    amp2_flat = abs(p.t2) < 1e-15

    candidates: list[tuple[float, int]] = []
    if amp1 < 1e-15:
        # theta1 is identically zero: the m = 0 condition holds everywhere and
        # the closings are the theta2 = n*pi level sets instead.
        if amp2_flat:
            theta2_const = 0.5 * p.T * p.M
            n = round(theta2_const / math.pi)
            if abs(theta2_const - n * math.pi) < tol:
                raise NumericalInconsistency(
                    "both angles are constant multiples of pi: the gap is closed at every k"
                )
            return []
        lo = 0.5 * p.T * (p.M - 2.0 * abs(p.t2))
        hi = 0.5 * p.T * (p.M + 2.0 * abs(p.t2))
        for n in range(math.ceil(lo / math.pi - 1), math.floor(hi / math.pi + 1) + 1):
            for k in _level_set_roots(th2, n * math.pi):
                candidates.append((k, 0))
    else:
        m_max = math.floor((amp1 + tol) / math.pi)
        for m in range(-m_max, m_max + 1):
            for k in _level_set_roots(th1, m * math.pi):
                candidates.append((k, m))
        # grazing contact: theta1 only touches m*pi at its extrema, where the
        # sign-change scan is blind
        for ke in (p.phi + np.pi / 2, p.phi - np.pi / 2):
            ke = float((ke + np.pi) % (2 * np.pi) - np.pi)
            m = round(float(th1(ke)) / math.pi)
            if abs(float(th1(ke)) - m * math.pi) < tol:
                candidates.append((ke, m))

    out: list[GapClosing] = []
    accepted: list[float] = []
    for k, m in candidates:
        k = float((k + np.pi) % (2 * np.pi) - np.pi)
        if any(abs(k - a) < 1e-8 or abs(abs(k - a) - 2 * np.pi) < 1e-8 for a in accepted):
            continue
        t2_val = float(th2(k))
        n = round(t2_val / math.pi)
        if abs(t2_val - n * math.pi) < tol:
            accepted.append(k)
            gap = Gap.ZERO if (m + n) % 2 == 0 else Gap.PI
            out.append(GapClosing(kstar=k, m_index=m, n_index=n, gap=gap))
    out.sort(key=lambda c: c.kstar)
    return out


# Benchmark critical points (t1 = t2 = 1, T = 2): a representative 0-gap
# closing and a representative pi-gap closing.
C0_PARAMS = ModelParams(M=0.0, phi=math.pi / 2)
CPI_PARAMS = ModelParams(M=math.pi - 2.0, phi=0.0)


def critical_expansion_error(p: ModelParams, benchmark: str, q: float) -> float:
    """Max-norm distance between U near the benchmark closing and its linear expansion.

    benchmark "C0":  || U(pi/2 + q) - (I - 2iq (sigma_z - sigma_x)) ||_max
    benchmark "Cpi": || U(q) - (-I + 2iq sigma_z) ||_max
    Both are O(q^2), so error(q)/q^2 is bounded as q -> 0.
    """
    if benchmark not in ("C0", "Cpi"):
        raise ValueError(f"benchmark must be 'C0' or 'Cpi', got {benchmark!r}")
    if not abs(q) < 0.3:
        raise ValueError(f"expansion is only meaningful for |q| < 0.3, got {q}")
    ref = C0_PARAMS if benchmark == "C0" else CPI_PARAMS
    fields = ("M", "phi", "t1", "t2", "T")
    if any(abs(getattr(p, f) - getattr(ref, f)) > 1e-12 for f in fields):
        raise WrongParameters(f"parameters {p} are not the {benchmark} benchmark point {ref}")
    if benchmark == "C0":
        u = bloch_unitary(p, math.pi / 2 + q)
        approx = IDENTITY_2 - 2j * q * (SIGMA_Z - SIGMA_X)
    else:
        u = bloch_unitary(p, q)
        approx = -IDENTITY_2 + 2j * q * SIGMA_Z
    return float(np.abs(u - approx).max())
