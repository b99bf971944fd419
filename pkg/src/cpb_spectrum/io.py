"""CSV and JSON serialisation of spectra and comparison reports.

Floats are written with ``repr``, the shortest decimal that round-trips,
so identical inputs always produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .spectrum import SpectrumSeries

CSV_HEADER = "nu_offset,S"


def axis_values(series: SpectrumSeries, paper_axis: bool = False) -> np.ndarray:
    """``(nu - omega) / g``, or ``/ lambda_paper`` when ``paper_axis``."""
    p = series.params
    scale = p.lambda_paper if paper_axis else p.g
    return (series.nu - p.omega) / scale


def csv_text(series: SpectrumSeries, paper_axis: bool = False) -> str:
    x = axis_values(series, paper_axis)
    rows = [CSV_HEADER]
    rows.extend(f"{float(a)!r},{float(b)!r}" for a, b in zip(x, series.values))
    return "\n".join(rows) + "\n"


def write_csv(path, series: SpectrumSeries, paper_axis: bool = False) -> Path:
    path = Path(path)
    path.write_text(csv_text(series, paper_axis), encoding="utf-8", newline="")
    return path


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return data[:, 0], data[:, 1]


def _clean(obj):
    """Replace non-finite floats, which strict JSON cannot carry, by null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def series_dict(series: SpectrumSeries, paper_axis: bool = False) -> dict:
    p = series.params
    x = axis_values(series, paper_axis)
    out = {
        "source": series.source,
        "params": {"omega": p.omega, "delta": p.delta, "g": p.g, "lambda_paper": p.lambda_paper},
        "field": series.distribution,
        "gamma": series.config.gamma,
        "axis": "(nu-omega)/lambda_paper" if paper_axis else "(nu-omega)/g",
        "lines": [line.to_dict() for line in series.lines],
        "samples": [[float(a), float(b)] for a, b in zip(x, series.values)],
    }
    if series.source == "analytic":
        out["pairing"] = series.config.weight_pairing
        out["k"] = series.config.k
    if series.metadata:
        out["metadata"] = series.metadata
    return out


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(dumps(doc), encoding="utf-8", newline="")
    return path


def result_document(primary: SpectrumSeries, overlays=(), config: dict | None = None,
                    paper_axis: bool = False, oracle=None) -> dict:
    """Full JSON result: primary series fields at top level, extras nested."""
    doc = {"software_version": __version__}
    doc.update(series_dict(primary, paper_axis))
    doc["overlays"] = [series_dict(s, paper_axis) for s in overlays]
    if config is not None:
        doc["config"] = config
    if oracle is not None:
        doc["oracle"] = {
            "series": series_dict(oracle.oracle, paper_axis),
            "comparison": oracle.to_dict(),
        }
    return doc
