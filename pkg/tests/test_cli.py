import json
import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cpb_spectrum import CanonicalParams, ConfigError, __version__
from cpb_spectrum.cli import main
from cpb_spectrum.config import (
    PRESETS,
    load_preset,
    parse_config,
    serialize_config,
    with_axis_value,
)
from cpb_spectrum.io import CSV_HEADER, read_csv
from cpb_spectrum.runner import compute, run, sweep

MINIMAL = {"params": {"omega": 10, "delta": 0, "g": 1}, "field": {"kind": "vacuum"},
           "spectrum": {"gamma": 0.1}}


def write_config(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def with_out(cfg, path):
    return replace(cfg, output=replace(cfg.output, path=str(path)))


def doc_with(**updates):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(updates)
    return doc


# -- parsing --

def test_minimal_config_defaults():
    cfg = parse_config(json.dumps(MINIMAL))
    assert cfg.params == CanonicalParams(omega=10.0, delta=0.0, g=1.0)
    s = cfg.spectrum
    assert (s.grid_start, s.grid_stop, s.grid_points) == (-12.0, 12.0, 2001)
    assert s.k == 1 and s.pairing == "paper"
    assert not cfg.oracle.enabled
    assert cfg.output.format == "csv"
    assert cfg.spectrum_config().nu_grid.size == 2001


def test_presets():
    fig1 = load_preset("fig1")
    assert fig1.field.kind == "coherent" and fig1.field.alpha2 == 10.0
    assert fig1.params.delta == 0.0 and fig1.spectrum.gamma == 0.1 * fig1.params.g
    fig4 = load_preset("fig4")
    assert (fig4.field.eta, fig4.field.M) == (0.7, 3)
    assert [(o.eta, o.M) for o in fig4.overlays] == [(0.1, 3)]
    assert fig4.params.delta == fig4.params.g
    assert load_preset("fig5").params.delta == 2.0
    assert load_preset("fig3").field.M == 30
    with pytest.raises(ConfigError):
        load_preset("fig9")


def test_preset_override():
    cfg = parse_config(json.dumps({"preset": "fig2", "spectrum": {"pairing": "derived"}}))
    assert cfg.spectrum.pairing == "derived" and cfg.spectrum.gamma == 0.1
    assert cfg.preset == "fig2"


@pytest.mark.parametrize("doc,key", [
    (doc_with(spectrum={"gama": 0.1}), "spectrum.gama"),
    (doc_with(extra=1), "extra"),
    (doc_with(field={"kind": "binomial", "eta": 0.5, "M": 3, "phase": 1}), "field.phase"),
    (doc_with(oracle={"nmax": 3}), "oracle.nmax"),
])
def test_unknown_keys_rejected(doc, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        parse_config(json.dumps(doc))


@pytest.mark.parametrize("doc,needle", [
    (doc_with(field={"kind": "binomial", "eta": 1.5, "M": 3}), "eta"),
    (doc_with(spectrum={"gamma": -1}), "gamma"),
    (doc_with(spectrum={"gamma": 0.1, "k": 2}), "experimental"),
    (doc_with(spectrum={"gamma": 0.1, "pairing": "mine"}), "spectrum.pairing"),
    (doc_with(device={"junction_capacitance": 1, "gate_capacitance": 1,
                      "josephson_energy": 1, "cavity_frequency": 1}), "exactly one"),
    (doc_with(field={"kind": "squeezed"}), "field.kind"),
    (doc_with(field={"kind": "number", "M": "3"}), "field.M"),
    (doc_with(workers=0), "workers"),
    (doc_with(preset="fig7"), "preset"),
])
def test_semantic_errors_name_the_key(doc, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(json.dumps(doc))


def test_syntax_error_position():
    text = '{\n  "params": {"omega": 10,\n  "delta": 0 "g": 1}\n}'
    with pytest.raises(ConfigError, match="line 3, column 14"):
        parse_config(text)


def test_device_config():
    doc = {k: v for k, v in MINIMAL.items() if k != "params"}
    doc["device"] = {"junction_capacitance": 1.0, "gate_capacitance": 1.0,
                     "josephson_energy": 9.0, "cavity_frequency": 8.0}
    cfg = parse_config(json.dumps(doc))
    assert cfg.canonical().g == pytest.approx(1 / math.sqrt(2))
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_round_trip(name):
    cfg = load_preset(name)
    assert parse_config(serialize_config(cfg)) == cfg


finite = st.floats(-5, 5, allow_nan=False)
positive = st.floats(0.01, 5)
fields = st.one_of(
    st.builds(lambda e, m: {"kind": "binomial", "eta": e, "M": m}, st.floats(0, 1), st.integers(1, 40)),
    st.builds(lambda a, eps: {"kind": "coherent", "alpha2": a, "tail_epsilon": eps},
              st.floats(0, 30), st.floats(1e-14, 1e-3)),
    st.builds(lambda m: {"kind": "number", "M": m}, st.integers(0, 20)),
    st.just({"kind": "vacuum"}),
    st.builds(lambda ps: {"kind": "custom", "probabilities": ps},
              st.lists(st.floats(0.001, 1), min_size=1, max_size=6)),
)
configs = st.fixed_dictionaries(
    {
        "params": st.builds(lambda o, d, g: {"omega": o, "delta": d, "g": g}, positive, finite, positive),
        "field": fields,
        "spectrum": st.fixed_dictionaries(
            {"gamma": positive},
            optional={
                "grid": st.builds(lambda a, w, n: {"start": a, "stop": a + w, "points": n},
                                  finite, positive, st.integers(2, 50)),
                "pairing": st.sampled_from(["paper", "derived"]),
            }),
    },
    optional={
        "overlays": st.lists(fields, max_size=2),
        "oracle": st.fixed_dictionaries({}, optional={
            "enabled": st.booleans(), "n_max": st.integers(1, 40),
            "T_avg": positive, "n_t": st.integers(1, 100).map(lambda x: 2 * x)}),
        "output": st.fixed_dictionaries({}, optional={
            "format": st.sampled_from(["csv", "json"]), "paper_axis": st.booleans()}),
        "workers": st.integers(1, 8),
    },
)


@given(configs)
@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
def test_round_trip_property(doc):
    cfg = parse_config(json.dumps(doc))
    assert parse_config(serialize_config(cfg)) == cfg


# -- run --

def test_run_writes_default_grid(tmp_path):
    cfg = load_preset("fig1")
    cfg = with_out(cfg, tmp_path / "fig1.csv")
    paths = run(cfg)
    lines = paths[0].read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2002
    assert paths[1].name == "fig1_overlay0.csv"
    x, s = read_csv(paths[0])
    assert x[0] == -12.0 and x[-1] == 12.0 and np.all(s > 0)


def test_rerun_byte_identical(tmp_path):
    a = run(with_out(load_preset("fig3"), tmp_path / "a.csv"))[0].read_bytes()
    b = run(with_out(load_preset("fig3"), tmp_path / "b.csv"))[0].read_bytes()
    assert a == b


def test_csv_values_round_trip(tmp_path):
    cfg = with_out(load_preset("fig2"), tmp_path / "f.csv")
    primary = compute(cfg)[0]
    _, s = read_csv(run(cfg)[0])
    assert np.array_equal(s, primary.values)


def test_paper_axis_scaling(tmp_path):
    plain = run(with_out(load_preset("fig2"), tmp_path / "g.csv"))[0]
    assert main(["run", "--preset", "fig2", "--paper-axis", "--out", str(tmp_path / "p.csv")]) == 0
    x_g, s_g = read_csv(plain)
    x_l, s_l = read_csv(tmp_path / "p.csv")
    assert np.allclose(x_l, math.sqrt(2) * x_g, rtol=1e-14)
    assert np.array_equal(s_g, s_l)


def test_json_schema(tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "--preset", "fig4", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["software_version"] == __version__
    assert doc["params"] == {"omega": 10.0, "delta": 1.0, "g": 1.0, "lambda_paper": 1 / math.sqrt(2)}
    assert doc["pairing"] == "paper" and doc["k"] == 1
    assert len(doc["lines"]) == 14
    assert set(doc["lines"][0]) == {"center", "weight", "source_n", "branch"}
    assert len(doc["samples"]) == 2001
    assert doc["axis"] == "(nu-omega)/g"
    assert len(doc["overlays"]) == 1
    assert doc["config"]["preset"] == "fig4"
    echoed = parse_config(json.dumps(doc["config"]))
    assert echoed == replace(load_preset("fig4"), output=echoed.output)
    assert echoed.output.format == "json"


def test_oracle_vacuum_run(tmp_path):
    cfg_path = write_config(tmp_path / "vac.json", doc_with(output={"path": str(tmp_path / "vac.csv")}))
    assert main(["run", "--config", str(cfg_path), "--oracle"]) == 0
    assert (tmp_path / "vac.csv").exists()
    x, s = read_csv(tmp_path / "vac_oracle.csv")
    assert x.size == 2001
    report = json.loads((tmp_path / "vac_comparison.json").read_text())
    assert report["validated_pairings"] == ["derived"]
    assert set(report["reports"]) == {"paper", "derived"}
    assert report["oracle_settings"]["n_t"] == 2048

    out = tmp_path / "vac.json_out.json"
    assert main(["run", "--config", str(cfg_path), "--oracle", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["oracle"]["series"]["source"] == "oracle"
    assert doc["oracle"]["comparison"]["validated_pairings"] == ["derived"]


# -- sweep --

def test_sweep_reproduces_detuned_presets(tmp_path):
    cfg = with_out(load_preset("fig2"), tmp_path / "fig.csv")
    paths = sweep(cfg, "delta", [0, 1, 2])
    names = {p.name for p in paths}
    for label in ("0.0", "1.0", "2.0"):
        assert f"fig_delta_{label}.csv" in names
        assert f"fig_delta_{label}_overlay0.csv" in names
    index = json.loads((tmp_path / "fig_index.json").read_text())
    assert index["axis"] == "delta" and index["values"] == [0, 1, 2]
    assert [r["label"] for r in index["runs"]] == ["0.0", "1.0", "2.0"]
    for name, delta in (("fig4", 1.0), ("fig5", 2.0)):
        single = run(with_out(load_preset(name), tmp_path / f"{name}.csv"))[0]
        assert single.read_bytes() == (tmp_path / f"fig_delta_{delta!r}.csv").read_bytes()


def test_sweep_other_axes(tmp_path):
    cfg = with_out(load_preset("fig2"), tmp_path / "s.csv")
    sweep(cfg, "M", [2, 5])
    assert (tmp_path / "s_M_5.csv").exists()
    sweep(cfg, "gamma", [0.2])
    assert (tmp_path / "s_gamma_0.2.csv").exists()
    with pytest.raises(ConfigError):
        sweep(cfg, "alpha2", [1.0])
    with pytest.raises(ConfigError):
        with_axis_value(cfg, "omega", 3.0)


def test_empty_sweep_writes_nothing(tmp_path):
    cfg = with_out(load_preset("fig2"), tmp_path / "e.csv")
    with pytest.raises(ConfigError):
        sweep(cfg, "delta", [])
    with pytest.raises(ConfigError):
        sweep(cfg, "eta", [0.5, 2.0])
    assert list(tmp_path.iterdir()) == []


# -- exit codes --

def test_exit_codes(tmp_path, capsys):
    bad = write_config(tmp_path / "bad.json", doc_with(spectrum={"gama": 0.1}))
    assert main(["run", "--config", str(bad)]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["exit_code"] == 2 and "spectrum.gama" in err["message"]

    assert main(["sweep", "--preset", "fig2", "--axis", "omega", "--values", "1",
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["sweep", "--preset", "fig2", "--axis", "delta", "--values", "",
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2

    small = write_config(tmp_path / "small.json", {
        "preset": "fig2", "oracle": {"enabled": True, "n_max": 2},
        "output": {"path": str(tmp_path / "small.csv")}})
    assert main(["run", "--config", str(small)]) == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "CutoffError"

    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--preset", "fig2", "--out", str(blocker / "out.csv")]) == 4


def test_console_script(tmp_path):
    out = tmp_path / "cli.csv"
    proc = subprocess.run([sys.executable, "-m", "cpb_spectrum", "run", "--preset", "fig5",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert str(out) in proc.stdout
    assert out.read_text().startswith(CSV_HEADER + "\n")
