"""Exception types shared across the package."""


class FluxWalkError(Exception):
    """Base class for all fluxwalk errors."""


class NonUnitaryInput(FluxWalkError):
    """A matrix that must be unitary failed the unitarity check."""


class NonUnitary(FluxWalkError):
    """A lattice operator drifted too far from unitarity to diagonalize safely."""


class NumericalInconsistency(FluxWalkError):
    """A quantity violated a bound that only a logic bug (not roundoff) can explain."""


class WrongParameters(FluxWalkError):
    """Parameters do not match the benchmark point the operation requires."""


class GapClosedOnContour(FluxWalkError):
    """The planar frame vector vanishes on the momentum grid; winding undefined."""


class ParityError(FluxWalkError):
    """W1 + W2 came out odd, which flags an upstream winding failure."""


class EvenLength(FluxWalkError):
    """An operation requiring an odd number of cells got an even-length chain."""


class DimensionMismatch(FluxWalkError):
    """Operator, state, or projector dimensions are incompatible."""


class SeriesTooShort(FluxWalkError):
    """The time series does not cover the requested analysis window."""


class WindowExceeded(FluxWalkError):
    """Requested more periods than the pre-reflection window allows."""


class ZeroOverlap(FluxWalkError):
    """The cross matrix element needed for phase matching vanishes."""


class NoZeroMode(FluxWalkError):
    """No left-edge state pinned at quasienergy 0 (expected in trivial/pi-only sectors)."""


class NoPiMode(FluxWalkError):
    """No left-edge state pinned at quasienergy pi/T (expected in trivial/0-only sectors)."""


class ConfigError(FluxWalkError):
    """Invalid run configuration (CLI exits with code 2)."""
