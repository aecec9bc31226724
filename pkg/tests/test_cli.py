import csv
import json
import re

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dicke_boa.cli import main
from dicke_boa.config import COMMANDS, DEFAULTS, RunConfig, load_config
from dicke_boa.errors import ConfigInvalid

UNIT = re.compile(r"^[A-Za-z_][\w']* \[[^\]]+\]$")


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(path, name):
    header, rows = read_csv(path)
    k = [h.split(" [")[0] for h in header].index(name)
    return [r[k] for r in rows]


def check_headers(out):
    csvs = sorted(out.glob("*.csv"))
    assert csvs
    for path in csvs:
        header, rows = read_csv(path)
        assert all(UNIT.match(h) for h in header), (path.name, header)
        assert all(len(r) == len(header) for r in rows)
        assert (out / f"plot_{path.stem}.py").exists()
    return csvs


params = st.fixed_dictionaries({"j": st.sampled_from([0.5, 1, 2.5, 10])},
                               optional={"omega0": st.floats(0.1, 5), "f": st.floats(0, 4)}).flatmap(
    lambda p: st.one_of(st.just(p), st.floats(0.1, 20).map(lambda w: {**p, "omega_ratio": w}),
                        st.floats(0.1, 20).map(lambda w: {**p, "omega": w})))
blocks = st.fixed_dictionaries({}, optional={
    "classical": st.fixed_dictionaries({}, optional={"energy": st.floats(-2, 1), "grid": st.tuples(
        st.integers(1, 30), st.integers(1, 30)).map(list), "T": st.floats(1, 1e3)}),
    "peres": st.fixed_dictionaries({}, optional={"observables": st.lists(
        st.sampled_from(["jz", "photons", "jzprime", "shifted"]), min_size=1, max_size=4)}),
    "bands": st.fixed_dictionaries({}, optional={"method": st.sampled_from(["auto", "bs", "lmg"]),
                                                 "levels": st.integers(1, 40)}),
})


@given(params, blocks, st.sampled_from(COMMANDS), st.integers(0, 2**31))
def test_config_round_trip(p, extra, command, seed):
    cfg = RunConfig.from_mapping({"params": p, "command": command, "seed": seed, **extra})
    text = cfg.canonical()
    again = RunConfig.from_mapping(json.loads(text))
    assert again.canonical() == text
    assert again == cfg


def test_config_defaults_and_files(tmp_path):
    cfg = RunConfig.from_mapping({"params": {"omega_ratio": 0.2, "f": 3}})
    assert cfg.params == {"omega": 0.2, "omega0": 1.0, "j": 10.0, "f": 3.0}
    assert cfg.block("classical") == DEFAULTS["classical"]
    (tmp_path / "c.toml").write_text('command = "bands"\nseed = 4\n[params]\nf = 2.0\nomega = 1.0\n'
                                     '[bands]\nmethod = "bs"\n')
    toml = load_config(tmp_path / "c.toml")
    assert toml.command == "bands" and toml.block("bands")["method"] == "bs"
    (tmp_path / "c.json").write_text(toml.canonical())
    assert load_config(tmp_path / "c.json") == toml


@pytest.mark.parametrize("data", [
    {"params": {"f": 1, "colour": 2}},
    {"params": {"f": 1}, "bogus": 1},
    {"params": {"f": 1}, "bands": {"level": 3}},
    {"params": {"f": 1, "gamma": 1}},
    {"params": {"omega": 1, "omega_ratio": 1}},
    {"params": {"j": 0.3}},
    {"params": {"f": "two"}},
    {"params": {}, "command": "plot"},
    {"params": {}, "peres": {"observables": ["jx"]}},
    {"params": {}, "seed": 1.5},
])
def test_config_rejects(data):
    with pytest.raises(ConfigInvalid):
        RunConfig.from_mapping(data)


def test_exit_code_config_error(tmp_path, capsys):
    (tmp_path / "bad.json").write_text(json.dumps({"params": {"f": 1}, "unknown": 1}))
    assert main(["spectrum", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2


def test_exit_code_numeric_failure(tmp_path, capsys):
    cfg = {"params": {"f": 2, "omega": 1, "j": 10}, "spectrum": {"e_range": [-2.2, 0.5], "n_budget": 16}}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert main(["spectrum", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "numeric failure in dicke_boa.quantum" in err and "BudgetExceeded" in err


def test_spectrum_decoupled(tmp_path):
    out = tmp_path / "s"
    assert main(["spectrum", "--omega", "1", "--j", "2", "--n-max", "6", "--out", str(out)]) == 0
    check_headers(out)
    E = np.array(column(out / "spectrum.csv", "E"), dtype=float)
    n, m = np.meshgrid(np.arange(7), np.arange(-2, 3))
    ref = np.sort((n + m).ravel())
    # default window [-3, 1] in units of omega0 j
    assert np.allclose(E, ref[(ref >= -6) & (ref <= 2)])
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["command"] == "spectrum" and cfg["spectrum"]["n_max"] == 6


def test_flags_override_config(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"params": {"gamma": 0.3, "omega": 2.0, "j": 3}}))
    out = tmp_path / "o"
    assert main(["spectrum", "--config", str(tmp_path / "c.json"), "--f", "0", "--n-max", "4", "--out", str(out)]) == 0
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["params"] == {"f": 0.0, "omega": 2.0, "omega0": 1.0, "j": 3.0}


def test_deterministic_bytes(tmp_path):
    argv = ["classical", "--f", "2", "--omega", "1", "--j", "10", "--grid", "3x3", "--T", "20", "--seed", "7"]
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    cfg = {"classical": {"section_trajectories": 2, "section_T": 30.0, "m_steps": 2, "freq_T": 204.8}}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    for out in (a, b):
        assert main(argv + ["--config", str(tmp_path / "c.json"), "--out", str(out)]) == 0
    csvs = check_headers(a)
    for path in csvs:
        assert path.read_bytes() == (b / path.name).read_bytes()
    assert main(argv[:-1] + ["8", "--config", str(tmp_path / "c.json"), "--out", str(c)]) == 0
    assert (a / "variance_map.csv").read_bytes() == (c / "variance_map.csv").read_bytes()


@pytest.mark.parametrize("f,ratio,regime", [(0.8, 10, "FastBoson"), (3, 0.2, "FastPseudospin"), (2, 1, "FastPseudospin")])
def test_validity_map_example_points(tmp_path, f, ratio, regime):
    out = tmp_path / "v"
    argv = ["validity-map", "--f-range", f"{f - 0.1}:{f + 0.1}", "--omega-ratio-range",
            f"{ratio - 0.1}:{ratio + 0.1}", "--grid", "1x1", "--out", str(out)]
    assert main(argv) == 0
    (got,) = column(out / "validity_map.csv", "regime")
    assert got == regime


def test_validity_map_example_command(tmp_path):
    out = tmp_path / "v"
    assert main(["validity-map", "--omega0", "1", "--f-range", "0:4", "--omega-ratio-range", "0:12",
                 "--grid", "80x80", "--out", str(out)]) == 0
    check_headers(out)
    regimes = column(out / "validity_map.csv", "regime")
    assert len(regimes) == 6400
    assert set(regimes) == {"FastPseudospin", "FastBoson", "Neither"}
    kinds = set(column(out / "level_curves.csv", "kind"))
    assert {"FastPseudospin", "FastBoson", "border"} <= kinds
    ratios = set(float(r) for r in column(out / "level_curves.csv", "ratio"))
    assert {2.0, 5.0, 10.0} <= ratios


def test_peres_example_command(tmp_path):
    out = tmp_path / "p"
    assert main(["peres", "--f", "0.8", "--omega-ratio", "10", "--j", "60", "--observable", "jz",
                 "--out", str(out)]) == 0
    check_headers(out)
    E = np.array(column(out / "peres_jz.csv", "E_reduced"), dtype=float)
    x = np.array(column(out / "peres_jz.csv", "expval"), dtype=float)
    assert np.all(np.diff(E) >= 0) and E.size > 60
    assert np.all(np.abs(x) <= 60 + 1e-9)
    kinds = set(column(out / "boa_overlay.csv", "kind"))
    assert kinds == {"boson"}


def test_bands_example_command(tmp_path):
    out = tmp_path / "b"
    assert main(["bands", "--omega-ratio", "0.1", "--j", "10", "--f-scan", "0:1.5", "--levels", "20",
                 "--out", str(out)]) == 0
    check_headers(out)
    f = np.array(column(out / "bands.csv", "f"), dtype=float)
    ex = np.array(column(out / "bands.csv", "Ex_exact"), dtype=float)
    boa = np.array(column(out / "bands.csv", "Ex_boa"), dtype=float)
    assert f.min() == 0 and f.max() == pytest.approx(1.5)
    assert np.all(ex >= 0)
    # decoupled column: the Bohr-Sommerfeld ladder spacing omega
    at0 = f == 0
    assert np.allclose(ex[at0], boa[at0], atol=1e-8)
    assert set(column(out / "bands.csv", "method")) == {"bs"}


def test_semiclassical_command(tmp_path):
    out = tmp_path / "s"
    assert main(["semiclassical", "--f", "2", "--omega-ratio", "10", "--kind", "boson", "--bands", "0", "1",
                 "--points", "10", "--e-range=-2:0.9", "--out", str(out)]) == 0
    check_headers(out)
    bands = column(out / "semiclassical_boson.csv", "band")
    assert set(float(b) for b in bands) == {0.0, 1.0}
