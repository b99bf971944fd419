"""Execute run configurations and write their artifacts."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import RunConfig, config_to_dict, with_axis_value
from .errors import ConfigError
from .io import result_document, write_csv, write_json
from .oracle import cross_validate, recommended_cutoff
from .spectrum import evaluate_grid

log = logging.getLogger(__name__)

# oracle cutoff used when the configuration leaves n_max open
DEFAULT_N_MAX = 16


def _stem(path: Path) -> Path:
    return path.with_suffix("")


def compute(cfg: RunConfig):
    """Evaluate the primary series, the overlays and, if enabled, the oracle."""
    p = cfg.canonical()
    sc = cfg.spectrum_config()
    d = cfg.field.build()
    primary = evaluate_grid(p, d, sc, workers=cfg.workers)
    overlays = [evaluate_grid(p, o.build(), sc, workers=cfg.workers) for o in cfg.overlays]
    cv = None
    if cfg.oracle.enabled:
        o = cfg.oracle
        n_max = o.n_max if o.n_max is not None else max(DEFAULT_N_MAX, recommended_cutoff(d))
        log.info("running time-domain oracle with n_max=%d", n_max)
        cv = cross_validate(p, d, sc, n_max=n_max, T_avg=o.T_avg, tau_max=o.tau_max,
                            n_t=o.n_t, n_tau=o.n_tau, t_start=o.t_start)
    return primary, overlays, cv


def run(cfg: RunConfig) -> list[Path]:
    """Write the artifacts of one configuration; return their paths."""
    primary, overlays, cv = compute(cfg)
    out = Path(cfg.output.path)
    out.parent.mkdir(parents=True, exist_ok=True)
    paper_axis = cfg.output.paper_axis
    if cfg.output.format == "json":
        doc = result_document(primary, overlays, config_to_dict(cfg), paper_axis, cv)
        return [write_json(out, doc)]

    stem = _stem(out)
    written = [write_csv(out, primary, paper_axis)]
    for i, series in enumerate(overlays):
        written.append(write_csv(f"{stem}_overlay{i}.csv", series, paper_axis))
    if cv is not None:
        written.append(write_csv(f"{stem}_oracle.csv", cv.oracle, paper_axis))
        report = {"software_version": __version__, **cv.to_dict()}
        written.append(write_json(f"{stem}_comparison.json", report))
    return written


def value_label(axis: str, value) -> str:
    return str(int(value)) if axis == "M" else repr(float(value))


def sweep(cfg: RunConfig, axis: str, values) -> list[Path]:
    """One run per value, named ``<stem>_<axis>_<value>``, plus an index file.

    Every configuration is validated before anything is written.
    """
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    out = Path(cfg.output.path)
    stem, suffix = _stem(out), out.suffix or f".{cfg.output.format}"
    plans = []
    for v in values:
        label = value_label(axis, v)
        target = Path(f"{stem}_{axis}_{label}{suffix}")
        sub = with_axis_value(cfg, axis, v)
        sub = replace(sub, output=replace(sub.output, path=str(target)))
        plans.append((v, label, sub))

    written, runs = [], []
    for v, label, sub in plans:
        paths = run(sub)
        written.extend(paths)
        runs.append({"value": v, "label": label, "path": str(paths[0]),
                     "artifacts": [str(x) for x in paths]})
    index = {"software_version": __version__, "axis": axis,
             "values": values, "runs": runs}
    written.append(write_json(f"{stem}_index.json", index))
    return written
