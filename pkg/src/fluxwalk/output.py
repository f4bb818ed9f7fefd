"""Deterministic CSV/JSON export: fixed float formatting, LF endings, UTF-8.

Identical inputs must produce byte-identical files, so floats are rendered
with a fixed 17-significant-digit format and nothing time- or host-dependent
is ever written.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

from .lattice import LatticeSpec
from .model import ModelParams


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    """Write rows (floats get the fixed format, everything else str())."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_float(v) if isinstance(v, float) else str(v) for v in row]
            )


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def params_dict(p: ModelParams) -> dict:
    return asdict(p)


def lattice_dict(spec: LatticeSpec) -> dict:
    return {"L": spec.L, "bc": spec.bc.value, "ne": spec.ne}


def jsonable(value):
    """Best-effort recursive conversion of result objects for manifests."""
    if is_dataclass(value) and not isinstance(value, type):
        return {k: jsonable(v) for k, v in asdict(value).items()}
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "value") and value.__class__.__module__ != "builtins":
        return value.value
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


class RunManifest:
    """Collects the outputs of one CLI run and writes manifest_<command>.json.

    The filename is command-specific so that several commands can populate one
    output directory (the figure pipeline does exactly that) without clobbering
    each other's manifests.
    """

    def __init__(self, command: str, version: str, config: dict):
        self.command = command
        self.payload: dict = {
            "command": command,
            "version": version,
            "config": {k: jsonable(v) for k, v in config.items()},
            "outputs": [],
        }

    def add_output(self, path: Path, kind: str, **meta) -> None:
        entry = {"path": path.name, "kind": kind}
        entry.update({k: jsonable(v) for k, v in meta.items()})
        self.payload["outputs"].append(entry)

    def add_note(self, key: str, value) -> None:
        self.payload[key] = jsonable(value)

    def write(self, out_dir: Path) -> Path:
        path = out_dir / f"manifest_{self.command.replace('-', '_')}.json"
        write_json(path, self.payload)
        return path
