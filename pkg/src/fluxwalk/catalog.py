"""The named parameter points used throughout: P1..P4, Q1..Q4, C0, Cpi.

These coordinates are fixed by the model study (t1 = t2 = 1, T = 2 throughout)
and must never be retyped by hand: always resolve a label through this module.
P points anchor the open-boundary runs, Q points the frame-resolved bulk
probes, and C points the two critical benchmarks.
"""

from __future__ import annotations

import math

from .model import C0_PARAMS, CPI_PARAMS, ModelParams

POINTS: dict[str, ModelParams] = {
    "P1": ModelParams(M=-1.60, phi=0.50 * math.pi),
    "P2": ModelParams(M=-2.50, phi=0.125 * math.pi),
    "P3": ModelParams(M=-0.10, phi=0.1875 * math.pi),
    "P4": ModelParams(M=-1.65, phi=0.0625 * math.pi),
    "Q1": ModelParams(M=-1.50, phi=math.pi / 3),
    "Q2": ModelParams(M=0.0, phi=math.pi / 3),
    "Q3": ModelParams(M=-2.50, phi=0.0),
    "Q4": ModelParams(M=-1.50, phi=0.0),
    "C0": C0_PARAMS,
    "Cpi": CPI_PARAMS,
}

# marker shapes used on the phase map: circles for open-boundary points,
# squares for bulk-probe points, diamonds for the critical benchmarks
MARKER_KINDS: dict[str, str] = {
    **{name: "circle" for name in ("P1", "P2", "P3", "P4")},
    **{name: "square" for name in ("Q1", "Q2", "Q3", "Q4")},
    **{name: "diamond" for name in ("C0", "Cpi")},
}

# (W1, W2) realized at the bulk-probe points; the quantized MCD targets
WINDING_TARGETS: dict[str, tuple[int, int]] = {
    "Q1": (0, 0),
    "Q2": (1, 1),
    "Q3": (1, -1),
    "Q4": (2, 0),
}

# (nu0, nupi) realized at the open-boundary points
GAP_INDEX_TARGETS: dict[str, tuple[int, int]] = {
    "P1": (0, 0),
    "P2": (0, 1),
    "P3": (1, 0),
    "P4": (1, 1),
}


def model_params(name: str) -> ModelParams:
    """Resolve a catalog label to its exact parameters."""
    try:
        return POINTS[name]
    except KeyError:
        raise KeyError(
            f"unknown point label {name!r}; known labels: {', '.join(POINTS)}"
        ) from None


def catalog_entries() -> list[dict]:
    """JSON-ready list of every named point with coordinates and marker kind."""
    return [
        {
            "name": name,
            "M": p.M,
            "phi": p.phi,
            "marker": MARKER_KINDS[name],
        }
        for name, p in POINTS.items()
    ]
