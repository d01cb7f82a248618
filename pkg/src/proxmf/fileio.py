"""Stable on-disk formats: model JSON, trace CSV, manifests, reports.

All real numbers in model and trace files are written with 17
significant digits, which round-trips IEEE doubles losslessly, and all
emission is fully deterministic (fixed key order, fixed float
formatting, no timestamps) so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .model import EnergyModel, ModelError
from .solver import IterationTrace, TraceRecord

PathLike = Union[str, Path]

MANIFEST_FORMAT = "proxmf-manifest/1"
REPORT_FORMAT = "proxmf-report/1"


def format_real(x: float) -> str:
    """17-significant-digit decimal form; parses back to the same double."""
    return format(float(x), ".17g")


# ----------------------------------------------------------------------
# Model files
# ----------------------------------------------------------------------


def model_to_json(model: EnergyModel) -> str:
    """Serialize a model to its canonical JSON text."""
    lines = ["{"]
    lines.append(f'  "n": {model.n},')
    priors = ", ".join(format_real(p) for p in model.priors)
    lines.append(f'  "priors": [{priors}],')
    if model.terms:
        lines.append('  "terms": [')
        body = []
        for vs, c in model.terms:
            vars_txt = ", ".join(str(v) for v in vs)
            body.append(
                f'    {{"vars": [{vars_txt}], "coeff": {format_real(c)}}}'
            )
        lines.append(",\n".join(body))
        lines.append("  ]")
    else:
        lines.append('  "terms": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_model(model: EnergyModel, path: PathLike) -> None:
    model.validate()
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def model_from_json(text: str) -> EnergyModel:
    """Parse and validate a model document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    for key in ("n", "priors", "terms"):
        if key not in doc:
            raise ModelError(f"model document missing field {key!r}")
    try:
        terms = [(tuple(t["vars"]), t["coeff"]) for t in doc["terms"]]
        model = EnergyModel(n=doc["n"], terms=terms, priors=doc["priors"])
    except (TypeError, KeyError) as exc:
        raise ModelError(f"malformed model document: {exc}") from exc
    model.validate()
    return model


def read_model(path: PathLike) -> EnergyModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))


# ----------------------------------------------------------------------
# Trace files (CSV + JSON manifest sidecar)
# ----------------------------------------------------------------------


def trace_to_csv(trace: IterationTrace) -> str:
    n = trace.records[0].q.shape[0]
    header = "sweep,g,grad_norm,step_norm," + ",".join(
        f"q_{i}" for i in range(n)
    )
    rows = [header]
    for rec in trace.records:
        fields = [
            str(rec.sweep),
            format_real(rec.g),
            format_real(rec.grad_norm),
            format_real(rec.step_norm),
        ]
        fields.extend(format_real(v) for v in rec.q)
        rows.append(",".join(fields))
    return "\n".join(rows) + "\n"


def write_trace(trace: IterationTrace, path: PathLike) -> None:
    Path(path).write_text(trace_to_csv(trace), encoding="utf-8")


def manifest_path_for(trace_path: PathLike) -> Path:
    """Sidecar manifest location for a trace file: ``<trace>.manifest.json``."""
    return Path(str(trace_path) + ".manifest.json")


def read_trace(csv_path: PathLike, manifest: dict[str, Any]) -> IterationTrace:
    """Rebuild an :class:`IterationTrace` from a CSV file and its manifest."""
    lines = Path(csv_path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"trace file {csv_path} is empty")
    header = lines[0].split(",")
    if header[:4] != ["sweep", "g", "grad_norm", "step_norm"]:
        raise ValueError(f"trace file {csv_path} has an unexpected header")
    n = len(header) - 4
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4 + n:
            raise ValueError(f"trace row has {len(parts)} fields, expected {4 + n}")
        records.append(
            TraceRecord(
                sweep=int(parts[0]),
                q=np.array([float(v) for v in parts[4:]]),
                g=float(parts[1]),
                grad_norm=float(parts[2]),
                step_norm=float(parts[3]),
            )
        )
    if not records:
        raise ValueError(f"trace file {csv_path} has no data rows")
    result = manifest.get("result", {})
    return IterationTrace(
        records=tuple(records),
        reason=result.get("termination", "unknown"),
        lam=float(manifest.get("config", {}).get("lambda", 0.0)),
        init_within_box=bool(result.get("init_within_box", True)),
    )


# ----------------------------------------------------------------------
# Manifests and reports (plain JSON documents)
# ----------------------------------------------------------------------


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json_document(doc: dict[str, Any], path: PathLike) -> None:
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_json_document(path: PathLike) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
