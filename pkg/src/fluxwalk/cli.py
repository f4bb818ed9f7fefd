"""Command-line surface: parameter sweeps, spectra, dynamics, and verification.

One command per invocation; every run writes its data as CSV plus a JSON
manifest listing each output with the parameters that produced it.  A JSON
config file can supply any option; explicit flags override the file.  Exit
codes: 0 success, 2 configuration errors, 3 when a required edge mode is
absent.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog
from .dynamics import (
    classify_sector,
    even_odd_split,
    evolve_series,
    mcd_series,
    pre_reflection_window,
    return_benchmark,
)
from .errors import ConfigError, FluxWalkError, NoPiMode, NoZeroMode
from .lattice import (
    BoundaryCondition,
    LatticeSpec,
    basis_state,
    cell_projector,
    floquet_operator,
    window_projector,
)
from .model import ModelParams, TimeFrame
from .output import RunManifest, lattice_dict, params_dict, write_csv, write_json
from .spectra import (
    edge_mode_presence,
    find_edge_pair,
    find_mode,
    logical_projection,
    optimized_superposition,
    quasienergy_spectrum,
)
from .topology import phase_map
from .verify import run_all, write_report

_COMMON_DEFAULTS = {"out": "out", "threads": 1}

_DEFAULTS: dict[str, dict] = {
    "phase-map": {
        **_COMMON_DEFAULTS,
        "m_range": (-4.0, 2.0),
        "phi_range": (0.0, math.pi / 2),
        "nm": 201,
        "nphi": 201,
        "nk": 1024,
    },
    "obc-spectrum": {
        **_COMMON_DEFAULTS,
        "point": None,
        "m": None,
        "phi": None,
        "length": 60,
        "ne": 5,
    },
    "edge-dynamics": {
        **_COMMON_DEFAULTS,
        "points": "P1,P2,P3,P4",
        "length": 60,
        "ne": 5,
        "periods": 200,
        "tail": 50,
        "initial": "both",
    },
    "mcd": {
        **_COMMON_DEFAULTS,
        "points": "Q1,Q2,Q3,Q4",
        "frames": "1,2",
        "length": 401,
        "periods": None,
    },
    "critical-benchmark": {
        **_COMMON_DEFAULTS,
        "length": 401,
        "periods": 31,
        "window": (1, 30),
    },
    "verify": {**_COMMON_DEFAULTS, "fast": False},
}


def _parse_range(value) -> tuple[float, float]:
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return float(value[0]), float(value[1])
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) == 2:
            try:
                return float(parts[0]), float(parts[1])
            except ValueError:
                pass
    raise ConfigError(f"expected a range 'lo:hi' or [lo, hi], got {value!r}")


def _parse_names(value, allowed) -> list[str]:
    names = value if isinstance(value, (list, tuple)) else str(value).split(",")
    names = [str(n).strip() for n in names if str(n).strip()]
    bad = [n for n in names if n not in allowed]
    if bad or not names:
        raise ConfigError(f"unknown point labels {bad}; allowed: {sorted(allowed)}")
    return names


def _parse_frames(value) -> list[TimeFrame]:
    raw = value if isinstance(value, (list, tuple)) else str(value).split(",")
    frames, seen = [], set()
    for item in raw:
        try:
            f = TimeFrame(int(item))
        except (ValueError, KeyError):
            raise ConfigError(f"frames must be from {{1, 2}}, got {item!r}") from None
        if f.value not in seen:
            seen.add(f.value)
            frames.append(f)
    if not frames:
        raise ConfigError("no time frames selected")
    return frames


def _resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS[command])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _resolve_point(cfg) -> tuple[str, ModelParams]:
    """(label, params) from either a catalog name or explicit M/phi values."""
    if cfg.get("point"):
        name = cfg["point"]
        try:
            return name, catalog.model_params(name)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    if cfg.get("m") is None or cfg.get("phi") is None:
        raise ConfigError("need either --point NAME or both --m and --phi")
    m, phi = float(cfg["m"]), float(cfg["phi"])
    return f"M{m:g}_phi{phi:g}", ModelParams(M=m, phi=phi)


def _series_rows(values: np.ndarray) -> list[list]:
    return [[m, float(v)] for m, v in enumerate(values)]


def _write_series(out: Path, name: str, values, p, spec, manifest, kind, **meta):
    path = out / f"{name}.csv"
    write_csv(path, ["m", "value"], _series_rows(np.asarray(values)))
    sidecar = {"label": name, "params": params_dict(p), "lattice": lattice_dict(spec)}
    sidecar.update({k: v for k, v in meta.items()})
    write_json(out / f"{name}.json", sidecar)
    manifest.add_output(path, kind, params=params_dict(p), lattice=lattice_dict(spec), **meta)


def cmd_phase_map(cfg) -> int:
    out = Path(cfg["out"])
    m_range = _parse_range(cfg["m_range"])
    phi_range = _parse_range(cfg["phi_range"])
    nm, nphi, nk = int(cfg["nm"]), int(cfg["nphi"]), int(cfg["nk"])
    base = ModelParams(M=0.0, phi=0.0)
    result = phase_map(base, m_range, phi_range, nm, nphi, N=nk, threads=int(cfg["threads"]))

    rows = []
    for i, Mv in enumerate(result.M_grid):
        for j, phiv in enumerate(result.phi_grid):
            if result.closed[i, j]:
                rows.append([float(Mv), float(phiv), "", "", "", "", 1])
            else:
                rows.append(
                    [
                        float(Mv), float(phiv),
                        int(result.W1[i, j]), int(result.W2[i, j]),
                        int(result.nu0[i, j]), int(result.nupi[i, j]), 0,
                    ]
                )
    manifest = RunManifest("phase-map", __version__, cfg)
    path = out / "phase_map.csv"
    write_csv(path, ["M", "phi", "W1", "W2", "nu0", "nupi", "closed_flag"], rows)
    manifest.add_output(path, "phase_map", nM=nm, nphi=nphi, nk=nk)

    hits = []
    for name, p in catalog.POINTS.items():
        i = np.flatnonzero(np.abs(result.M_grid - p.M) < 1e-9)
        j = np.flatnonzero(np.abs(result.phi_grid - p.phi) < 1e-9)
        if i.size and j.size:
            cell = result.cell(int(i[0]), int(j[0]))
            hits.append(
                {"name": name, "M": p.M, "phi": p.phi,
                 "invariants": None if cell is None else cell}
            )
    manifest.add_note("catalog_hits", hits)
    manifest.add_note("catalog", catalog.catalog_entries())
    manifest.write(out)
    return 0


def cmd_obc_spectrum(cfg) -> int:
    out = Path(cfg["out"])
    label, p = _resolve_point(cfg)
    spec = LatticeSpec(int(cfg["length"]), BoundaryCondition.OPEN, ne=int(cfg["ne"]))
    s = quasienergy_spectrum(floquet_operator(p, spec))

    flags = [""] * spec.dim
    modes = {}
    for which, err in (("zero", NoZeroMode), ("pi", NoPiMode)):
        try:
            state, eps_eff, weight = find_mode(s, which)
        except err:
            continue
        overlaps = np.abs(s.states.conj().T @ state) ** 2
        flags[int(np.argmax(overlaps))] = which
        modes[which] = {"eps": eps_eff, "weight": weight}

    rows = [
        [i, float(s.eps[i]), float(s.edge_weights[i]), flags[i]]
        for i in range(spec.dim)
    ]
    manifest = RunManifest("obc-spectrum", __version__, cfg)
    path = out / f"spectrum_{label}.csv"
    write_csv(path, ["index", "eps", "edge_weight_left", "edge_flag"], rows)
    manifest.add_output(path, "obc_spectrum", params=params_dict(p), lattice=lattice_dict(spec))
    manifest.add_note("edge_modes", modes)
    manifest.write(out)
    return 0


def cmd_edge_dynamics(cfg) -> int:
    out = Path(cfg["out"])
    initial = cfg["initial"]
    if initial not in ("site", "optimized", "both"):
        raise ConfigError(f"initial must be 'site', 'optimized' or 'both', got {initial!r}")
    names = _parse_names(cfg["points"], catalog.POINTS)
    spec = LatticeSpec(int(cfg["length"]), BoundaryCondition.OPEN, ne=int(cfg["ne"]))
    periods = int(cfg["periods"])
    tail = int(cfg["tail"])
    manifest = RunManifest("edge-dynamics", __version__, cfg)
    classification: dict = {}
    edge_pairs: dict = {}

    for name in names:
        p = catalog.model_params(name)
        op = floquet_operator(p, spec)
        if initial in ("site", "both"):
            psi0 = basis_state(spec, 1, 0)
            p1 = evolve_series(op, psi0, cell_projector(spec, 1), periods, label="p1")
            pe = evolve_series(op, psi0, window_projector(spec), periods, label="pe")
            _write_series(out, f"p1_{name}", p1.values, p, spec, manifest, "boundary_series")
            _write_series(out, f"pe_{name}", pe.values, p, spec, manifest, "boundary_series")
            if periods >= 2 * tail:
                sector = classify_sector(p1, tail)
                classification[name] = {
                    "sector": sector.value.value, "dc": sector.dc,
                    "ac": sector.ac, "tail_std": sector.tail_std,
                }
        if initial in ("optimized", "both"):
            try:
                pair = find_edge_pair(quasienergy_spectrum(op))
            except (NoZeroMode, NoPiMode):
                if initial == "optimized":
                    raise  # an explicit optimized request demands the pair
                continue
            psi0 = optimized_superposition(pair, cell_projector(spec, 1))
            p1 = evolve_series(op, psi0, cell_projector(spec, 1), periods, label="p1_optimized")
            _write_series(
                out, f"p1_optimized_{name}", p1.values, p, spec, manifest, "boundary_series"
            )
            gate = logical_projection(op, pair)
            edge_pairs[name] = {
                "eps0": pair.eps0, "epspi": pair.epspi,
                "weight0": pair.weight0, "weightpi": pair.weightpi,
                "gate_deviation": float(np.abs(gate - np.diag([1.0, -1.0])).max()),
            }
    if classification:
        manifest.add_note("classification", classification)
    if edge_pairs:
        manifest.add_note("edge_pairs", edge_pairs)
    manifest.write(out)
    return 0


def cmd_mcd(cfg) -> int:
    out = Path(cfg["out"])
    names = _parse_names(cfg["points"], catalog.POINTS)
    frames = _parse_frames(cfg["frames"])
    length = int(cfg["length"])
    if length % 2 == 0:
        raise ConfigError(f"the bulk probe needs an odd chain length, got {length}")
    spec = LatticeSpec(length, BoundaryCondition.PERIODIC)
    manifest = RunManifest("mcd", __version__, cfg)
    for name in names:
        p = catalog.model_params(name)
        window = pre_reflection_window(p, spec)
        periods = window if cfg["periods"] is None else int(cfg["periods"])
        targets = catalog.WINDING_TARGETS.get(name)
        for frame in frames:
            _, averaged = mcd_series(p, spec, frame, m_max=periods)
            target = None if targets is None else targets[frame.value - 1]
            _write_series(
                out, f"mcd_{name}_frame{frame.value}", -2.0 * averaged.values,
                p, spec, manifest, "mcd_series",
                frame=frame.value, window=window,
                transform="-2 * running_average", winding_target=target,
            )
    manifest.write(out)
    return 0


def cmd_critical_benchmark(cfg) -> int:
    out = Path(cfg["out"])
    length = int(cfg["length"])
    if length % 2 == 0:
        raise ConfigError(f"the bulk probe needs an odd chain length, got {length}")
    spec = LatticeSpec(length, BoundaryCondition.PERIODIC)
    periods = int(cfg["periods"])
    lo, hi = (int(v) for v in _parse_range(cfg["window"]))
    manifest = RunManifest("critical-benchmark", __version__, cfg)
    staggering = {}
    for name in ("C0", "Cpi"):
        p = catalog.model_params(name)
        ts = return_benchmark(p, spec, periods)
        _write_series(out, f"pret_{name}", ts.values, p, spec, manifest, "return_series")
        even, odd, stag = even_odd_split(ts, lo, hi)
        staggering[name] = stag
        rows = []
        for m, v in zip(range(lo, hi + 1, 2) if lo % 2 == 0 else range(lo + 1, hi + 1, 2), even.values):
            rows.append([m, "even", float(v)])
        for m, v in zip(range(lo + 1, hi + 1, 2) if lo % 2 == 0 else range(lo, hi + 1, 2), odd.values):
            rows.append([m, "odd", float(v)])
        rows.sort(key=lambda r: r[0])
        path = out / f"evenodd_{name}.csv"
        write_csv(path, ["m", "parity", "value"], rows)
        manifest.add_output(path, "even_odd_split", params=params_dict(p),
                            lattice=lattice_dict(spec), window=[lo, hi])
    manifest.add_note(
        "staggering",
        {"C0": staggering["C0"], "Cpi": staggering["Cpi"],
         "ratio": staggering["Cpi"] / staggering["C0"]},
    )
    manifest.write(out)
    return 0


def cmd_verify(cfg) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    results = run_all(
        fast=bool(cfg["fast"]),
        progress=lambda r: print(
            f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.measured} "
            f"(bound: {r.bound}) [{r.seconds:.2f}s]"
        ),
    )
    report = write_report(results, out)
    manifest = RunManifest("verify", __version__, cfg)
    manifest.add_output(report, "verify_report")
    manifest.add_note("all_passed", all(r.passed for r in results))
    manifest.write(out)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 1


_HANDLERS = {
    "phase-map": cmd_phase_map,
    "obc-spectrum": cmd_obc_spectrum,
    "edge-dynamics": cmd_edge_dynamics,
    "mcd": cmd_mcd,
    "critical-benchmark": cmd_critical_benchmark,
    "verify": cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxwalk",
        description="Flux-controlled anomalous Floquet walk: spectra, topology, dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"fluxwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file; flags override its entries")
        sp.add_argument("--out", help="output directory (default: ./out)")
        sp.add_argument("--threads", type=int, help="max parallel workers")

    sp = sub.add_parser("phase-map", help="winding/gap-index map over the (M, phi) plane")
    common(sp)
    sp.add_argument("--m-range", dest="m_range", help="M range as lo:hi")
    sp.add_argument("--phi-range", dest="phi_range", help="phi range as lo:hi")
    sp.add_argument("--nm", type=int, help="grid points along M")
    sp.add_argument("--nphi", type=int, help="grid points along phi")
    sp.add_argument("--nk", type=int, help="momentum points per winding integral")

    sp = sub.add_parser("obc-spectrum", help="open-boundary quasienergy spectrum")
    common(sp)
    sp.add_argument("--point", help="catalog label (P1..P4, Q1..Q4, C0, Cpi)")
    sp.add_argument("--m", type=float, help="onsite mixing M (with --phi)")
    sp.add_argument("--phi", type=float, help="flux phase (with --m)")
    sp.add_argument("--length", type=int, help="number of unit cells")
    sp.add_argument("--ne", type=int, help="edge-window cells")

    sp = sub.add_parser("edge-dynamics", help="boundary probabilities under stroboscopic evolution")
    common(sp)
    sp.add_argument("--points", help="comma-separated catalog labels (default P1..P4)")
    sp.add_argument("--length", type=int, help="number of unit cells")
    sp.add_argument("--ne", type=int, help="edge-window cells")
    sp.add_argument("--periods", type=int, help="number of periods")
    sp.add_argument("--tail", type=int, help="classification tail window")
    sp.add_argument("--initial", choices=("site", "optimized", "both"),
                    help="launch |1,A>, the phase-matched edge superposition, or both")

    sp = sub.add_parser("mcd", help="frame-resolved mean chiral displacement traces")
    common(sp)
    sp.add_argument("--points", help="comma-separated catalog labels (default Q1..Q4)")
    sp.add_argument("--frames", help="comma-separated time frames from {1,2}")
    sp.add_argument("--length", type=int, help="odd chain length")
    sp.add_argument("--periods", type=int, help="periods (default: pre-reflection window)")

    sp = sub.add_parser("critical-benchmark", help="return probability at the C0/Cpi closings")
    common(sp)
    sp.add_argument("--length", type=int, help="odd chain length")
    sp.add_argument("--periods", type=int, help="number of periods")
    sp.add_argument("--window", help="even/odd analysis window as lo:hi")

    sp = sub.add_parser("verify", help="run the acceptance criteria battery")
    common(sp)
    sp.add_argument("--fast", action="store_const", const=True,
                    help="reduced lattice sizes with recalibrated tolerances")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _resolve_config(args.command, args)
        Path(cfg["out"]).mkdir(parents=True, exist_ok=True)
        return _HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoZeroMode, NoPiMode) as exc:
        print(f"edge mode unavailable: {exc}", file=sys.stderr)
        return 3
    except FluxWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
