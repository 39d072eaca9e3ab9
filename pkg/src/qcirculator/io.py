"""CSV/JSON serialisation and parameter files.

Parameter files are JSON objects whose keys are :class:`SystemParams` field
names. Rates are read as MHz (omega / 2 pi) unless ``angular=True``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np

from .correlations import CorrelationTrace
from .model import RATE_FIELDS, SystemParams
from .observables import CirculatorMetrics, TransmissionMatrix
from .scan import ScanResult

# T_{i,j} columns in the order used by scan CSV files
SCAN_T_COLUMNS = [
    (1, 2), (1, 4), (2, 1), (2, 3), (3, 2), (3, 4), (4, 1), (4, 3),
    (1, 1), (1, 3), (2, 2), (2, 4), (3, 1), (3, 3), (4, 2), (4, 4),
]


class ConfigError(ValueError):
    """Invalid or unknown configuration."""


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def load_params(path: str | Path | None = None, overrides: dict | None = None, angular: bool = False) -> SystemParams:
    """Read a parameter file and apply overrides; unknown keys raise :class:`ConfigError`."""
    values = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("parameter file must hold a JSON object")
        values.update(raw)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in dataclasses.fields(SystemParams)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(unknown)}")
    if "epsilon" in values and isinstance(values["epsilon"], list):
        re, im = values["epsilon"]
        values["epsilon"] = complex(re, im)
    try:
        if angular:
            return SystemParams().replace(**values)
        return SystemParams.from_mhz(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def params_snapshot(params: SystemParams) -> dict:
    snap = params.to_mhz()
    snap["units"] = "MHz (omega/2pi)"
    snap["kappa_tot"] = params.kappa_tot / (2 * math.pi)
    return snap


def matrix_csv(t: TransmissionMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in t.t:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def read_matrix_csv(path: str | Path) -> TransmissionMatrix:
    rows = [r for r in csv.reader(Path(path).read_text().splitlines()) if r and not r[0].startswith("#")]
    try:
        return TransmissionMatrix(np.array([[float(x) for x in r] for r in rows]))
    except ValueError as exc:
        raise ConfigError(f"bad transmission matrix in {path}: {exc}") from exc


def metrics_dict(m: CirculatorMetrics) -> dict:
    return {
        "direction": m.direction.value,
        "fidelity": m.fidelity,
        "eta": m.eta,
        "eta_per_port": list(m.eta_per_port),
        "isolations_db": list(m.isolations),
    }


def matrix_json(t: TransmissionMatrix, m: CirculatorMetrics, params: SystemParams | None, model_kind: str | None) -> str:
    doc = {"transmissions": t.t.tolist(), "metrics": metrics_dict(m)}
    if params is not None:
        doc["params"] = params_snapshot(params)
    if model_kind is not None:
        doc["model"] = model_kind
    return dumps(doc)


def scan_csv(scan: ScanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ratio", "kappa_a", "kappa_b"] + [f"T_{i}{j}" for i, j in SCAN_T_COLUMNS] + ["fidelity", "eta"])
    two_pi = 2 * math.pi
    for p in scan.points:
        w.writerow(
            [_fmt(p.kappa_tot_over_2kappa0), _fmt(p.kappa_a / two_pi), _fmt(p.kappa_b / two_pi)]
            + [_fmt(p.transmissions[i, j]) for i, j in SCAN_T_COLUMNS]
            + [_fmt(p.metrics.fidelity), _fmt(p.metrics.eta)]
        )
    return buf.getvalue()


def scan_json(scan: ScanResult, params: SystemParams, model_kind: str) -> str:
    pts = []
    for p in scan.points:
        pts.append(
            {
                "ratio": p.kappa_tot_over_2kappa0,
                "kappa_a": p.kappa_a / (2 * math.pi),
                "kappa_b": p.kappa_b / (2 * math.pi),
                "transmissions": p.transmissions.t.tolist(),
                "metrics": metrics_dict(p.metrics),
            }
        )
    return dumps(
        {
            "params": params_snapshot(params),
            "model": model_kind,
            "objective": scan.objective.value,
            "optimum": scan.optimum,
            "points": pts,
        }
    )


def g2_csv(trace: CorrelationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau_us", "g2"])
    for t, v in zip(trace.tau_grid, trace.g2):
        w.writerow([_fmt(t), _fmt(v)])
    return buf.getvalue()


def g2_json(trace: CorrelationTrace, params: SystemParams, model_kind: str) -> str:
    return dumps(
        {
            "params": params_snapshot(params),
            "model": model_kind,
            "input_port": trace.input_port,
            "output_port": trace.output_port,
            "g2_zero": trace.g2_zero,
            "normalization": trace.normalization,
            "tau_us": trace.tau_grid.tolist(),
            "g2": trace.g2.tolist(),
        }
    )


__all__ = [
    "ConfigError",
    "RATE_FIELDS",
    "load_params",
    "params_snapshot",
    "matrix_csv",
    "read_matrix_csv",
    "matrix_json",
    "metrics_dict",
    "scan_csv",
    "scan_json",
    "g2_csv",
    "g2_json",
    "dumps",
]
