"""Real-space operators: substep Hamiltonians, Floquet operators, projectors.

The chain has L unit cells with two sublattices (A, B) interleaved as
index(n, s) = 2(n-1) + s for n = 1..L, s = 0 (A) or 1 (B).  That ordering
makes the chiral operator I_L (x) sigma_y block-trivial and keeps projectors
index-local.  Everything is stored dense; the target sizes (L up to a few
hundred) fit comfortably.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, EvenLength, NumericalInconsistency
from .model import SIGMA_Y, ModelParams, TimeFrame

UNITARITY_TOL = 1e-11


class BoundaryCondition(Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class OperatorKind(Enum):
    PERIOD = "period"
    FRAME1 = "frame1"
    FRAME2 = "frame2"
    HAMILTONIAN_H1 = "h1"
    HAMILTONIAN_H2 = "h2"
    PROJECTOR = "projector"
    POSITION = "position"
    CHIRAL = "chiral"


@dataclass(frozen=True)
class LatticeSpec:
    """Chain geometry: L cells, boundary condition, and edge-window width ne."""

    L: int
    bc: BoundaryCondition = BoundaryCondition.OPEN
    ne: int = 5

    def __post_init__(self):
        if self.L < 4:
            raise ValueError(f"need at least 4 cells, got L={self.L}")
        if not 1 <= self.ne <= self.L // 2:
            raise ValueError(f"edge window must satisfy 1 <= ne <= L/2, got ne={self.ne}")

    @property
    def dim(self) -> int:
        return 2 * self.L

    @property
    def periodic(self) -> bool:
        return self.bc is BoundaryCondition.PERIODIC

    @property
    def center_cell(self) -> int:
        """The 1-based launch cell n0 = (L+1)/2; only defined for odd L."""
        if self.L % 2 == 0:
            raise EvenLength(f"no center cell for even L={self.L}")
        return (self.L + 1) // 2


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    """A dense operator on the chain together with its provenance."""

    matrix: np.ndarray
    spec: LatticeSpec
    kind: OperatorKind
    params: ModelParams | None = None


def basis_index(n: int, s: int) -> int:
    """Row index of sublattice s (0 = A, 1 = B) in cell n (1-based)."""
    return 2 * (n - 1) + s


def _bond_cells(spec: LatticeSpec):
    """(n, n+1) cell pairs, 0-based, including the wraparound bond if periodic."""
    last = spec.L if spec.periodic else spec.L - 1
    return [(n, (n + 1) % spec.L) for n in range(last)]


def build_h1(p: ModelParams, spec: LatticeSpec) -> LatticeOperator:
    """Drift Hamiltonian: flux-dressed intra-sublattice hopping, opposite sign on B.

    H1 = -i t1 sum_n (e^{-i phi} a_{n+1}^+ a_n - e^{i phi} a_n^+ a_{n+1})
         +i t1 sum_n (e^{-i phi} b_{n+1}^+ b_n - e^{i phi} b_n^+ b_{n+1})
    """
    H = np.zeros((spec.dim, spec.dim), dtype=complex)
    fwd = -1j * p.t1 * np.exp(-1j * p.phi)
    for n, n1 in _bond_cells(spec):
        H[2 * n1, 2 * n] += fwd
        H[2 * n, 2 * n1] += np.conj(fwd)
        H[2 * n1 + 1, 2 * n + 1] += -fwd
        H[2 * n + 1, 2 * n1 + 1] += -np.conj(fwd)
    return LatticeOperator(H, spec, OperatorKind.HAMILTONIAN_H1, p)


def build_h2(p: ModelParams, spec: LatticeSpec) -> LatticeOperator:
    """Mixing Hamiltonian: onsite M and neighbor t2 couplings, purely A <-> B."""
    H = np.zeros((spec.dim, spec.dim), dtype=complex)
    for n in range(spec.L):
        H[2 * n, 2 * n + 1] += p.M
        H[2 * n + 1, 2 * n] += p.M
    for n, n1 in _bond_cells(spec):
        # t2 (a_{n+1}^+ b_n + a_n^+ b_{n+1} + h.c.)
        H[2 * n1, 2 * n + 1] += p.t2
        H[2 * n + 1, 2 * n1] += p.t2
        H[2 * n, 2 * n1 + 1] += p.t2
        H[2 * n1 + 1, 2 * n] += p.t2
    return LatticeOperator(H, spec, OperatorKind.HAMILTONIAN_H2, p)


def _expm_hermitian(H: np.ndarray, coeff: float) -> np.ndarray:
    """exp(-i coeff H) for Hermitian H via eigendecomposition (unitary to roundoff)."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * coeff * w)) @ V.conj().T


def _check_unitary(u: np.ndarray, what: str) -> np.ndarray:
    residual = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if residual >= UNITARITY_TOL:
        raise NumericalInconsistency(f"{what} unitarity residual {residual:.3e}")
    return u


def floquet_operator(p: ModelParams, spec: LatticeSpec) -> LatticeOperator:
    """One-period walk operator U_T = exp(-i(T/2)H2) exp(-i(T/2)H1)."""
    u = _expm_hermitian(build_h2(p, spec).matrix, p.T / 2) @ _expm_hermitian(
        build_h1(p, spec).matrix, p.T / 2
    )
    return LatticeOperator(_check_unitary(u, "U_T"), spec, OperatorKind.PERIOD, p)


def frame_floquet_operator(
    p: ModelParams, spec: LatticeSpec, frame: TimeFrame | int
) -> LatticeOperator:
    """Symmetric-frame walk operator; frame 1 splits the H1 substep, frame 2 the H2."""
    frame = TimeFrame(frame)
    H1 = build_h1(p, spec).matrix
    H2 = build_h2(p, spec).matrix
    if frame is TimeFrame.FRAME1:
        half = _expm_hermitian(H1, p.T / 4)
        u = half @ _expm_hermitian(H2, p.T / 2) @ half
        kind = OperatorKind.FRAME1
    else:
        half = _expm_hermitian(H2, p.T / 4)
        u = half @ _expm_hermitian(H1, p.T / 2) @ half
        kind = OperatorKind.FRAME2
    return LatticeOperator(_check_unitary(u, f"U_{frame.value}"), spec, kind, p)


def chiral_operator(spec: LatticeSpec) -> LatticeOperator:
    """Gamma = I_L (x) sigma_y."""
    return LatticeOperator(np.kron(np.eye(spec.L), SIGMA_Y), spec, OperatorKind.CHIRAL)


def position_operator(spec: LatticeSpec, n0: int | None = None) -> LatticeOperator:
    """diag(n - n0) on both sublattices, measured from the center cell.

    Requires odd L (so the center cell is unique) unless n0 is given explicitly.
    """
    if n0 is None:
        if spec.L % 2 == 0:
            raise EvenLength(f"position needs odd L for a unique center, got L={spec.L}")
        n0 = spec.center_cell
    diag = np.repeat(np.arange(1, spec.L + 1) - n0, 2).astype(float)
    return LatticeOperator(np.diag(diag), spec, OperatorKind.POSITION)


def cell_projector(spec: LatticeSpec, n: int) -> LatticeOperator:
    """Projector onto both sublattices of cell n (1-based)."""
    if not 1 <= n <= spec.L:
        raise DimensionMismatch(f"cell {n} outside 1..{spec.L}")
    diag = np.zeros(spec.dim)
    diag[basis_index(n, 0)] = 1.0
    diag[basis_index(n, 1)] = 1.0
    return LatticeOperator(np.diag(diag), spec, OperatorKind.PROJECTOR)


def window_projector(spec: LatticeSpec, ne: int | None = None) -> LatticeOperator:
    """Projector onto cells 1..ne; defaults to the spec's edge window.

    An explicit ne may span the whole chain (up to L), e.g. for completeness
    checks, even though the spec's own window is capped at L/2.
    """
    ne = spec.ne if ne is None else ne
    if not 1 <= ne <= spec.L:
        raise DimensionMismatch(f"window {ne} outside 1..{spec.L}")
    diag = np.zeros(spec.dim)
    diag[: 2 * ne] = 1.0
    return LatticeOperator(np.diag(diag), spec, OperatorKind.PROJECTOR)


class StaticOperators:
    """Bundle of the parameter-independent operators used by the dynamical probes."""

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        self.chiral = chiral_operator(spec)
        self.pi1 = cell_projector(spec, 1)
        self.pie = window_projector(spec)

    def pin(self, n: int) -> LatticeOperator:
        """Projector onto cell n; pin(spec.center_cell) is the return projector."""
        return cell_projector(self.spec, n)

    @cached_property
    def position(self) -> LatticeOperator:
        return position_operator(self.spec)


def static_operators(spec: LatticeSpec) -> StaticOperators:
    return StaticOperators(spec)


def basis_state(spec: LatticeSpec, n: int, s: int) -> np.ndarray:
    """Normalized amplitude vector for |n, s> with s = 0 (A) or 1 (B)."""
    if not (1 <= n <= spec.L and s in (0, 1)):
        raise DimensionMismatch(f"no basis state (n={n}, s={s}) on {spec.L} cells")
    psi = np.zeros(spec.dim, dtype=complex)
    psi[basis_index(n, s)] = 1.0
    return psi


def bloch_momenta(L: int) -> np.ndarray:
    """The L momentum sectors k_j = 2 pi j / L of a periodic chain."""
    return 2.0 * np.pi * np.arange(L) / L
