"""fluxwalk: a flux-controlled anomalous Floquet quantum walk, end to end.

Bulk band structure and dual-gap topology, open-boundary 0/pi edge modes and
their logical-subspace dynamics, and the bulk dynamical probes (frame-resolved
mean chiral displacement, benchmark critical dynamics), with independent
cross-checking oracles and a CLI.
"""

__version__ = "0.1.0"

from .catalog import GAP_INDEX_TARGETS, POINTS, WINDING_TARGETS, model_params
from .dynamics import (
    Sector,
    SectorLabel,
    TimeSeries,
    classify_sector,
    even_odd_split,
    evolve_series,
    mcd_series,
    pre_reflection_window,
    return_benchmark,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    EvenLength,
    FluxWalkError,
    GapClosedOnContour,
    NonUnitary,
    NonUnitaryInput,
    NoPiMode,
    NoZeroMode,
    NumericalInconsistency,
    ParityError,
    SeriesTooShort,
    WindowExceeded,
    WrongParameters,
    ZeroOverlap,
)
from .lattice import (
    BoundaryCondition,
    LatticeOperator,
    LatticeSpec,
    OperatorKind,
    basis_index,
    basis_state,
    bloch_momenta,
    build_h1,
    build_h2,
    cell_projector,
    chiral_operator,
    floquet_operator,
    frame_floquet_operator,
    position_operator,
    static_operators,
    window_projector,
)
from .model import (
    BlochDecomposition,
    FrameVector,
    Gap,
    GapClosing,
    ModelParams,
    TimeFrame,
    angles,
    bloch_unitaries,
    bloch_unitary,
    critical_expansion_error,
    frame_unitaries,
    frame_unitary,
    frame_vector,
    gap_closings,
    pauli_decompose,
    quasienergies,
)
from .spectra import (
    EdgeModePair,
    QuasienergySpectrum,
    edge_mode_presence,
    find_edge_pair,
    find_mode,
    logical_projection,
    optimized_superposition,
    quasienergy_spectrum,
)
from .topology import (
    PhaseMapResult,
    TopologicalInvariants,
    gap_indices,
    geometric_mcd_integral,
    invariants_at,
    phase_map,
    winding_number,
)
