"""Run configuration: strict JSON parsing, figure presets and serialisation."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, SpectrumError
from .fields import (
    PhotonDistribution,
    binomial_distribution,
    coherent_distribution,
    custom_distribution,
    number_state,
    vacuum,
)
from .model import CanonicalParams, DeviceParams, canonicalize
from .spectrum import PAIRINGS, SpectrumConfig, default_nu_grid

__all__ = [
    "FieldSpec",
    "SpectrumSettings",
    "OracleSettings",
    "OutputSettings",
    "RunConfig",
    "PRESETS",
    "SWEEP_AXES",
    "parse_config",
    "load_preset",
    "config_to_dict",
    "serialize_config",
    "with_axis_value",
]

FIELD_KINDS = ("binomial", "coherent", "number", "vacuum", "custom")
SWEEP_AXES = ("delta", "gamma", "eta", "M", "alpha2")
FORMATS = ("csv", "json")

# cavity frequency used by every figure preset, in units of g
PRESET_OMEGA = 10.0


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    eta: float | None = None
    M: int | None = None
    alpha2: float | None = None
    tail_epsilon: float = 1e-12
    probabilities: tuple | None = None

    def build(self) -> PhotonDistribution:
        if self.kind == "binomial":
            return binomial_distribution(self.eta, self.M)
        if self.kind == "coherent":
            return coherent_distribution(self.alpha2, self.tail_epsilon)
        if self.kind == "number":
            return number_state(self.M)
        if self.kind == "vacuum":
            return vacuum()
        return custom_distribution(self.probabilities)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "binomial":
            out.update(eta=self.eta, M=self.M)
        elif self.kind == "coherent":
            out.update(alpha2=self.alpha2, tail_epsilon=self.tail_epsilon)
        elif self.kind == "number":
            out.update(M=self.M)
        elif self.kind == "custom":
            out.update(probabilities=list(self.probabilities))
        return out


@dataclass(frozen=True)
class SpectrumSettings:
    gamma: float
    grid_start: float = -12.0
    grid_stop: float = 12.0
    grid_points: int = 2001
    k: int = 1
    pairing: str = "paper"
    experimental: bool = False


@dataclass(frozen=True)
class OracleSettings:
    enabled: bool = False
    n_max: int | None = None
    T_avg: float | None = None
    tau_max: float | None = None
    n_t: int = 2048
    n_tau: int = 2048
    t_start: float = 0.0


@dataclass(frozen=True)
class OutputSettings:
    format: str = "csv"
    path: str = "spectrum.csv"
    paper_axis: bool = False


@dataclass(frozen=True)
class RunConfig:
    field: FieldSpec
    spectrum: SpectrumSettings
    params: CanonicalParams | None = None
    device: DeviceParams | None = None
    overlays: tuple = ()
    oracle: OracleSettings = OracleSettings()
    output: OutputSettings = OutputSettings()
    workers: int = 1
    preset: str | None = None

    def canonical(self) -> CanonicalParams:
        return self.params if self.params is not None else canonicalize(self.device)

    def spectrum_config(self) -> SpectrumConfig:
        p = self.canonical()
        s = self.spectrum
        grid = default_nu_grid(p, s.grid_start, s.grid_stop, s.grid_points)
        return SpectrumConfig(gamma=s.gamma, nu_grid=grid, k=s.k,
                              weight_pairing=s.pairing, experimental=s.experimental)


def _preset(delta, primary, overlay):
    return {
        "params": {"omega": PRESET_OMEGA, "delta": delta, "g": 1.0},
        "field": primary,
        "overlays": [overlay],
        "spectrum": {"gamma": 0.1},
    }


_BIN = lambda eta, M: {"kind": "binomial", "eta": eta, "M": M}  # noqa: E731

PRESETS = {
    "fig1": _preset(0.0, {"kind": "coherent", "alpha2": 10.0}, {"kind": "coherent", "alpha2": 1.0}),
    "fig2": _preset(0.0, _BIN(0.7, 3), _BIN(0.1, 3)),
    "fig3": _preset(0.0, _BIN(0.7, 30), _BIN(0.1, 30)),
    "fig4": _preset(1.0, _BIN(0.7, 3), _BIN(0.1, 3)),
    "fig5": _preset(2.0, _BIN(0.7, 3), _BIN(0.1, 3)),
}


# ---------------------------------------------------------------- parsing

_NUM = (int, float)


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}" if path else msg)


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        _fail(path, "expected a JSON object")
    for key in obj:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _get(obj, key, path, kind, default=..., allow_none=False):
    where = f"{path}.{key}" if path else key
    if key not in obj:
        if default is ...:
            _fail(where, "required key missing")
        return default
    val = obj[key]
    if val is None and allow_none:
        return None
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, _NUM) or not math.isfinite(val):
            _fail(where, f"expected a finite number, got {val!r}")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            if isinstance(val, float) and val.is_integer():
                return int(val)
            _fail(where, f"expected an integer, got {val!r}")
        return val
    if kind is bool:
        if not isinstance(val, bool):
            _fail(where, f"expected true/false, got {val!r}")
        return val
    if kind is str:
        if not isinstance(val, str):
            _fail(where, f"expected a string, got {val!r}")
        return val
    return val


def _parse_field(obj, path) -> FieldSpec:
    if not isinstance(obj, dict):
        _fail(path, "expected a JSON object")
    kind = _get(obj, "kind", path, str)
    allowed = {
        "binomial": {"kind", "eta", "M"},
        "coherent": {"kind", "alpha2", "tail_epsilon"},
        "number": {"kind", "M"},
        "vacuum": {"kind"},
        "custom": {"kind", "probabilities"},
    }
    if kind not in allowed:
        _fail(f"{path}.kind", f"must be one of {FIELD_KINDS}, got {kind!r}")
    _check_keys(obj, allowed[kind], path)
    if kind == "binomial":
        return FieldSpec(kind, eta=_get(obj, "eta", path, float), M=_get(obj, "M", path, int))
    if kind == "coherent":
        return FieldSpec(kind, alpha2=_get(obj, "alpha2", path, float),
                         tail_epsilon=_get(obj, "tail_epsilon", path, float, 1e-12))
    if kind == "number":
        return FieldSpec(kind, M=_get(obj, "M", path, int))
    if kind == "custom":
        probs = _get(obj, "probabilities", path, list)
        if not isinstance(probs, list) or not all(
                isinstance(x, _NUM) and not isinstance(x, bool) for x in probs):
            _fail(f"{path}.probabilities", "expected a list of numbers")
        return FieldSpec(kind, probabilities=tuple(float(x) for x in probs))
    return FieldSpec(kind)


_TOP_KEYS = {"preset", "params", "device", "field", "overlays", "spectrum", "oracle",
             "output", "workers"}


def _merge_preset(doc: dict) -> dict:
    name = doc.get("preset")
    if name is None:
        return doc
    if not isinstance(name, str) or name not in PRESETS:
        _fail("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    merged = copy.deepcopy(PRESETS[name])
    for key, val in doc.items():
        if key in ("params", "device") and val is not None:
            merged.pop("params", None)
            merged.pop("device", None)
            merged[key] = val
        elif key in ("spectrum", "oracle", "output") and isinstance(val, dict):
            merged.setdefault(key, {}).update(val)
        else:
            merged[key] = val
    return merged


def _parse_doc(doc) -> RunConfig:
    _check_keys(doc, _TOP_KEYS, "")
    doc = _merge_preset(doc)
    preset = doc.get("preset")

    has_p = doc.get("params") is not None
    has_d = doc.get("device") is not None
    if has_p == has_d:
        _fail("", "exactly one of 'params' or 'device' must be given")
    params = device = None
    try:
        if has_p:
            obj = doc["params"]
            _check_keys(obj, {"omega", "delta", "g"}, "params")
            params = CanonicalParams(omega=_get(obj, "omega", "params", float),
                                     delta=_get(obj, "delta", "params", float),
                                     g=_get(obj, "g", "params", float))
        else:
            obj = doc["device"]
            names = ("junction_capacitance", "gate_capacitance", "josephson_energy",
                     "cavity_frequency", "electron_charge", "hbar")
            _check_keys(obj, set(names), "device")
            kw = {n: _get(obj, n, "device", float) for n in names[:4]}
            kw.update({n: _get(obj, n, "device", float, 1.0) for n in names[4:]})
            device = DeviceParams(**kw)
    except ConfigError:
        raise
    except SpectrumError as exc:
        _fail("params" if has_p else "device", str(exc))

    if "field" not in doc:
        _fail("field", "required key missing")
    fspec = _parse_field(doc["field"], "field")
    overlays = doc.get("overlays", [])
    if not isinstance(overlays, list):
        _fail("overlays", "expected a list")
    overlays = tuple(_parse_field(o, f"overlays[{i}]") for i, o in enumerate(overlays))

    sp = doc.get("spectrum")
    if sp is None:
        _fail("spectrum", "required key missing")
    _check_keys(sp, {"gamma", "grid", "k", "pairing", "experimental"}, "spectrum")
    grid = sp.get("grid", {})
    _check_keys(grid, {"start", "stop", "points"}, "spectrum.grid")
    pairing = _get(sp, "pairing", "spectrum", str, "paper")
    if pairing not in PAIRINGS:
        _fail("spectrum.pairing", f"must be one of {PAIRINGS}, got {pairing!r}")
    spectrum = SpectrumSettings(
        gamma=_get(sp, "gamma", "spectrum", float),
        grid_start=_get(grid, "start", "spectrum.grid", float, -12.0),
        grid_stop=_get(grid, "stop", "spectrum.grid", float, 12.0),
        grid_points=_get(grid, "points", "spectrum.grid", int, 2001),
        k=_get(sp, "k", "spectrum", int, 1),
        pairing=pairing,
        experimental=_get(sp, "experimental", "spectrum", bool, False),
    )

    oc = doc.get("oracle", {})
    _check_keys(oc, {"enabled", "n_max", "T_avg", "tau_max", "n_t", "n_tau", "t_start"}, "oracle")
    oracle = OracleSettings(
        enabled=_get(oc, "enabled", "oracle", bool, False),
        n_max=_get(oc, "n_max", "oracle", int, None, allow_none=True),
        T_avg=_get(oc, "T_avg", "oracle", float, None, allow_none=True),
        tau_max=_get(oc, "tau_max", "oracle", float, None, allow_none=True),
        n_t=_get(oc, "n_t", "oracle", int, 2048),
        n_tau=_get(oc, "n_tau", "oracle", int, 2048),
        t_start=_get(oc, "t_start", "oracle", float, 0.0),
    )

    out = doc.get("output", {})
    _check_keys(out, {"format", "path", "paper_axis"}, "output")
    fmt = _get(out, "format", "output", str, "csv")
    if fmt not in FORMATS:
        _fail("output.format", f"must be one of {FORMATS}, got {fmt!r}")
    output = OutputSettings(format=fmt,
                            path=_get(out, "path", "output", str, f"spectrum.{fmt}"),
                            paper_axis=_get(out, "paper_axis", "output", bool, False))
    workers = _get(doc, "workers", "", int, 1)
    if workers < 1:
        _fail("workers", "must be >= 1")

    cfg = RunConfig(field=fspec, spectrum=spectrum, params=params, device=device,
                    overlays=overlays, oracle=oracle, output=output, workers=workers,
                    preset=preset)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Build every derived object once so semantic errors surface at parse time."""
    try:
        cfg.spectrum_config()
        for spec in (cfg.field, *cfg.overlays):
            spec.build()
    except SpectrumError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a strict JSON run configuration."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    return _parse_doc(doc)


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return _parse_doc({"preset": name})


def config_to_dict(cfg: RunConfig) -> dict:
    """Fully resolved document; ``parse_config`` of its JSON gives ``cfg`` back."""
    doc = {}
    if cfg.preset is not None:
        doc["preset"] = cfg.preset
    if cfg.params is not None:
        doc["params"] = {"omega": cfg.params.omega, "delta": cfg.params.delta, "g": cfg.params.g}
    else:
        d = cfg.device
        doc["device"] = {
            "junction_capacitance": d.junction_capacitance,
            "gate_capacitance": d.gate_capacitance,
            "josephson_energy": d.josephson_energy,
            "cavity_frequency": d.cavity_frequency,
            "electron_charge": d.electron_charge,
            "hbar": d.hbar,
        }
    doc["field"] = cfg.field.to_dict()
    doc["overlays"] = [o.to_dict() for o in cfg.overlays]
    s = cfg.spectrum
    doc["spectrum"] = {
        "gamma": s.gamma,
        "grid": {"start": s.grid_start, "stop": s.grid_stop, "points": s.grid_points},
        "k": s.k,
        "pairing": s.pairing,
        "experimental": s.experimental,
    }
    o = cfg.oracle
    doc["oracle"] = {"enabled": o.enabled, "n_max": o.n_max, "T_avg": o.T_avg,
                     "tau_max": o.tau_max, "n_t": o.n_t, "n_tau": o.n_tau, "t_start": o.t_start}
    doc["output"] = {"format": cfg.output.format, "path": cfg.output.path,
                     "paper_axis": cfg.output.paper_axis}
    doc["workers"] = cfg.workers
    return doc


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)


def with_axis_value(cfg: RunConfig, axis: str, value) -> RunConfig:
    """Copy of ``cfg`` with one sweep parameter replaced."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    if axis == "delta":
        p = cfg.canonical()
        new = replace(cfg, params=CanonicalParams(p.omega, float(value), p.g), device=None)
    elif axis == "gamma":
        new = replace(cfg, spectrum=replace(cfg.spectrum, gamma=float(value)))
    else:
        wanted = {"eta": "binomial", "M": "binomial", "alpha2": "coherent"}[axis]
        if cfg.field.kind != wanted:
            raise ConfigError(f"axis {axis!r} needs a {wanted} field, config has {cfg.field.kind!r}")
        new = replace(cfg, field=replace(cfg.field, **{axis: value}))
    validate(new)
    return new
