"""``dicke`` command-line front end.

Each subcommand reads a RunConfig (from ``--config`` and/or flags), writes
CSV files with unit headers into ``--out`` together with plot scripts, and
exits with 0 on success, 2 on configuration errors and 3 on numerical
failures.
"""
from __future__ import annotations

import argparse
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from . import boson, pseudospin
from .classical import (band_head_frequency_scan, energy_shell_initials, integrate, jzprime_classical,
                        poincare_section, variance_map)
from .config import COMMANDS, RunConfig, load_config
from .errors import ConfigInvalid, CriticalCoupling, DickeError
from .export import atomic_write, write_csv, write_plot_script
from .model import ModelParams, Phase, Regime, border_omega_ratio, classify_regime, phase_of, ratio_level_curve
from .quantum import (FockSpinBasis, Observable, build_observable, converge_and_diagonalize, converge_lowest,
                      diagonalize_parity, peres_lattice)
from .requantize import boson_ladder, pseudospin_ladder

E_UNIT = "omega0"
RED_UNIT = "omega0*j"
OBSERVABLES = {"jz": Observable.JZ, "photons": Observable.PHOTON_NUMBER, "jzprime": Observable.JZ_PRIME,
               "shifted": Observable.SHIFTED_NUMBER}


def _centres(lo, hi, n):
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _emit(out: Path, name, columns, rows, x, y, color="", title=""):
    path = write_csv(out / f"{name}.csv", columns, rows)
    header = {c[0]: f"{c[0]} [{c[1]}]" for c in columns}
    write_plot_script(out / f"plot_{name}.py", f"{name}.csv", header[x], header[y],
                      header.get(color, ""), title)
    return [path, out / f"plot_{name}.py"]


def _with_f(params: ModelParams, f: float) -> ModelParams:
    return ModelParams.from_f(params.omega, params.omega0, f, params.j)


def cmd_validity_map(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("validity-map")
    base = cfg.model()
    rows = []
    for f in _centres(*b["f_range"], b["grid"][0]):
        for r in _centres(*b["omega_ratio_range"], b["grid"][1]):
            p = ModelParams.from_f(r * base.omega0, base.omega0, f, base.j)
            try:
                v = classify_regime(p, b["tol"])
            except CriticalCoupling:
                rows.append((f, r, Phase.CRITICAL.value, *[float("nan")] * 4))
                continue
            rows.append((f, r, v.regime.value, v.ratio, v.max_rel_dev, v.ratio_pseudospin, v.ratio_boson))
    files = _emit(out, "validity_map",
                  [("f", "gamma_c"), ("omega_ratio", E_UNIT), ("regime", "1"), ("ratio", "1"),
                   ("max_rel_dev", "1"), ("ratio_pseudospin", "1"), ("ratio_boson", "1")],
                  rows, "f", "omega_ratio", "ratio", "validity map")
    curves = []
    lo, hi = b["f_range"]
    for f in np.linspace(lo, hi, 401):
        if phase_of(f) is Phase.CRITICAL:
            continue
        curves.append(("border", 1.0, f, border_omega_ratio(f)))
        for kind in (Regime.FAST_PSEUDOSPIN, Regime.FAST_BOSON):
            for ratio in b["ratios"]:
                curves.append((kind.value, ratio, f, ratio_level_curve(kind, ratio, f)))
    files += _emit(out, "level_curves", [("kind", "1"), ("ratio", "1"), ("f", "gamma_c"), ("omega_ratio", E_UNIT)],
                   curves, "f", "omega_ratio", "ratio", "fast/slow level curves")
    return files


def _overlay_rows(params: ModelParams, lo, hi, points):
    rows = []
    j = params.j
    try:
        verdict = classify_regime(params)
        kinds = {Regime.FAST_PSEUDOSPIN: ["pseudospin"], Regime.FAST_BOSON: ["boson"]}.get(
            verdict.regime, ["pseudospin", "boson"])
    except CriticalCoupling:
        kinds = ["pseudospin", "boson"]
    if "pseudospin" in kinds:
        m = -j
        while m <= j + 1e-12:
            e_min = pseudospin.band_minimum(m, params).e_min
            if e_min >= hi:
                break
            rows += _band_samples("pseudospin", m, params, max(e_min, lo), hi, points)
            m += 1
    if "boson" in kinds and phase_of(params.f) is not Phase.CRITICAL:
        n = 0
        while True:
            band, _ = boson.band_minimum_and_frequency(n, params)
            if band.e_min >= hi:
                break
            rows += _band_samples("boson", n, params, max(band.e_min, lo), min(band.e_max, hi), points)
            n += 1
    return rows


def _band_samples(kind, label, params, lo, hi, points):
    mod = pseudospin if kind == "pseudospin" else boson
    rows = []
    if hi <= lo:
        return rows
    for E in _centres(lo, hi, points):
        try:
            sp = mod.semiclassical_point(E, label, params)
        except DickeError:
            continue
        rows.append((kind, label, E, E / (params.omega0 * params.j), sp.nu, sp.n_phot, sp.jz))
    return rows


SEMI_COLUMNS = [("kind", "1"), ("band", "1"), ("E", E_UNIT), ("E_reduced", RED_UNIT), ("nu", "1/omega0"),
                ("n_phot", "1"), ("jz", "1")]


def cmd_peres(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("peres")
    p = cfg.model()
    scale = p.omega0 * p.j
    lo, hi = (v * scale for v in b["e_range"])
    basis, dec = converge_and_diagonalize(p, (lo, hi), n_budget=int(b["n_budget"]))
    files = []
    for name in b["observables"]:
        lat = peres_lattice(dec, build_observable(OBSERVABLES[name], p, basis))
        rows = [(E, E / scale, x, d, par) for E, x, d, par in
                zip(lat.energies, lat.expval, lat.uncert, lat.parity)]
        files += _emit(out, f"peres_{name}",
                       [("E", E_UNIT), ("E_reduced", RED_UNIT), ("expval", "1"), ("uncert", "1"), ("parity", "1")],
                       rows, "E_reduced", "expval", "uncert", f"Peres lattice of {name}, n_max={basis.n_max}")
    files += _emit(out, "boa_overlay", SEMI_COLUMNS, _overlay_rows(p, lo, hi, int(b["overlay_points"])),
                   "E_reduced", "jz", "", "BOA overlay")
    return files


def _requantized(p: ModelParams, count: int, method: str):
    if method == "auto":
        try:
            v = classify_regime(p)
            use_bs = v.ratio_pseudospin >= v.ratio_boson if v.regime is Regime.NEITHER else \
                v.regime is Regime.FAST_PSEUDOSPIN
        except CriticalCoupling:
            use_bs = p.omega < p.omega0
        method = "bs" if use_bs else "lmg"
    if method == "bs":
        return pseudospin_ladder(p, count), "bs"
    ev = np.linalg.eigvalsh(boson.lmg_matrix(p))
    e_max = ev[-1] + p.omega * math.ceil(count / ev.size)
    return boson_ladder(p, e_max)[0][:count], "lmg"


def cmd_bands(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("bands")
    base = cfg.model()
    count = int(b["levels"])
    rows = []
    for f in np.linspace(*b["f_scan"], int(b["steps"])):
        if phase_of(f) is Phase.CRITICAL:
            continue
        p = _with_f(base, f)
        _, dec = converge_lowest(p, count, n_budget=int(b["n_budget"]))
        exact = np.sort(dec.energies)[:count]
        boa, used = _requantized(p, count, b["method"])
        for k, (e, s) in enumerate(zip(exact, boa)):
            rows.append((f, k, e, e / (p.omega0 * p.j), e - exact[0], s, s - boa[0], used))
    return _emit(out, "bands",
                 [("f", "gamma_c"), ("level", "1"), ("E_exact", E_UNIT), ("E_exact_reduced", RED_UNIT),
                  ("Ex_exact", E_UNIT), ("E_boa", E_UNIT), ("Ex_boa", E_UNIT), ("method", "1")],
                 rows, "f", "Ex_exact", "level", "excitation energies")


def cmd_semiclassical(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("semiclassical")
    p = cfg.model()
    scale = p.omega0 * p.j
    lo, hi = (v * scale for v in b["e_range"])
    kind = b["kind"]
    labels = b["bands"] or ([-p.j + k for k in range(3)] if kind == "pseudospin" else [0, 1, 2])
    rows = []
    for label in labels:
        if kind == "pseudospin":
            e_lo, e_hi = pseudospin.band_minimum(label, p).e_min, hi
        else:
            band, _ = boson.band_minimum_and_frequency(int(label), p)
            e_lo, e_hi, label = band.e_min, min(band.e_max, hi), int(label)
        rows += _band_samples(kind, label, p, max(e_lo, lo), e_hi, int(b["points"]))
    return _emit(out, f"semiclassical_{kind}", SEMI_COLUMNS, rows, "E_reduced", "jz", "band", f"{kind} BOA")


def cmd_classical(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("classical")
    p = cfg.model()
    E = b["energy"] * p.omega0 * p.j
    n_phi, n_jz = b["grid"]
    vm = variance_map(E, p, n_phi, n_jz, b["T"], b["dt"], b["threshold"])
    files = _emit(out, "variance_map",
                  [("phi0", "rad"), ("jz0_over_j", "1"), ("delta_jzprime_over_j", "1"), ("chaotic_flag", "1")],
                  [(r[0], r[1], r[2], int(r[3])) for r in vm], "phi0", "jz0_over_j", "delta_jzprime_over_j",
                  "temporal spread of j_z'")
    inits = energy_shell_initials(E, p, n_phi, n_jz)
    k = min(int(b["section_trajectories"]), len(inits))
    rng = np.random.default_rng(cfg.seed)
    chosen = sorted(rng.choice(len(inits), size=k, replace=False).tolist()) if k else []
    sec = poincare_section([inits[i][2] for i in chosen], p, E=E, T=b["section_T"])
    files += _emit(out, "section", [("phi", "rad"), ("jz_over_j", "1"), ("traj_id", "1")],
                   list(zip(sec.phi, sec.jz_over_j, sec.traj_id)), "phi", "jz_over_j", "traj_id",
                   "section p=0, dp/dt>0")
    if chosen:
        tr = integrate(inits[chosen[0]][2], p, b["section_T"], b["dt"])
        jp = jzprime_classical(tr.states, p)
        files += _emit(out, "trajectory",
                       [("t", "1/omega0"), ("q", "1"), ("p", "1"), ("jx", "1"), ("jy", "1"), ("jz", "1"),
                        ("E", E_UNIT), ("jzprime", "1")],
                       [(t, *s, e, z) for t, s, e, z in zip(tr.times, tr.states, tr.energies, jp)],
                       "t", "jzprime", "", "trajectory")
    ms = np.linspace(*b["m_range"], int(b["m_steps"])) * p.j
    scan = band_head_frequency_scan(ms, p, b["freq_T"], b["dt"], kick=b["kick"])
    rows = []
    for pt in scan:
        rows += [(pt.m_prime, pt.slow, pt.slow_amplitude, "slow"), (pt.m_prime, pt.fast, pt.fast_amplitude, "fast"),
                 (pt.m_prime, pt.slow_predicted, float("nan"), "slow_predicted"),
                 (pt.m_prime, pt.fast_predicted, float("nan"), "fast_predicted")]
    files += _emit(out, "frequency_scan", [("m_prime", "1"), ("freq", "omega0"), ("amplitude", "1"), ("kind", "1")],
                   rows, "m_prime", "freq", "", "band-head frequencies")
    return files


def cmd_spectrum(cfg: RunConfig):
    out = Path(cfg.out)
    b = cfg.block("spectrum")
    p = cfg.model()
    scale = p.omega0 * p.j
    window = tuple(v * scale for v in b["e_range"])
    if b["count"] > 0:
        basis, dec = converge_lowest(p, int(b["count"]), n_budget=int(b["n_budget"]))
    elif b["n_max"] > 0:
        basis = FockSpinBasis(int(b["n_max"]), p.j)
        dec = diagonalize_parity(p, basis, energy_window=window, vectors=False)
    else:
        basis, dec = converge_and_diagonalize(p, window, n_budget=int(b["n_budget"]))
    order = np.argsort(dec.energies, kind="stable")
    rows = [(k, dec.energies[i], dec.energies[i] / scale, dec.parity[i]) for k, i in enumerate(order)]
    return _emit(out, "spectrum", [("index", "1"), ("E", E_UNIT), ("E_reduced", RED_UNIT), ("parity", "1")],
                 rows, "index", "E_reduced", "parity", f"spectrum, n_max={basis.n_max}")


HANDLERS = {"validity-map": cmd_validity_map, "peres": cmd_peres, "bands": cmd_bands,
            "semiclassical": cmd_semiclassical, "classical": cmd_classical, "spectrum": cmd_spectrum}


def _range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from exc
    return [lo, hi]


def _grid(text):
    try:
        a, b = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}") from exc
    return [a, b]


# flag -> (block, key); None block means params
_FLAGS = {
    "omega": (None, "omega"), "omega0": (None, "omega0"), "gamma": (None, "gamma"), "f": (None, "f"),
    "omega_ratio": (None, "omega_ratio"), "j": (None, "j"),
    "f_range": ("validity-map", "f_range"), "omega_ratio_range": ("validity-map", "omega_ratio_range"),
    "grid": ("@", "grid"), "observable": ("peres", "observables"), "e_range": ("@", "e_range"),
    "f_scan": ("bands", "f_scan"), "steps": ("bands", "steps"), "levels": ("bands", "levels"),
    "method": ("bands", "method"), "kind": ("semiclassical", "kind"), "bands": ("semiclassical", "bands"),
    "points": ("semiclassical", "points"), "energy": ("classical", "energy"), "T": ("classical", "T"),
    "dt": ("classical", "dt"), "n_max": ("spectrum", "n_max"), "count": ("spectrum", "count"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dicke", description="Dicke model spectra, BOA bands and classical dynamics")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON or TOML run configuration")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        for flag in ("omega", "omega0", "gamma", "f", "omega-ratio", "j"):
            sp.add_argument(f"--{flag}", type=float)
        if name == "validity-map":
            sp.add_argument("--f-range", type=_range)
            sp.add_argument("--omega-ratio-range", type=_range)
            sp.add_argument("--grid", type=_grid)
        if name in ("peres", "semiclassical", "spectrum"):
            sp.add_argument("--e-range", type=_range, help="window in units of omega0*j")
        if name == "peres":
            sp.add_argument("--observable", action="append", choices=sorted(OBSERVABLES))
        if name == "bands":
            sp.add_argument("--f-scan", type=_range)
            sp.add_argument("--steps", type=int)
            sp.add_argument("--levels", type=int)
            sp.add_argument("--method", choices=["auto", "bs", "lmg"])
        if name == "semiclassical":
            sp.add_argument("--kind", choices=["pseudospin", "boson"])
            sp.add_argument("--bands", type=float, nargs="+")
            sp.add_argument("--points", type=int)
        if name == "classical":
            sp.add_argument("--energy", type=float, help="shell energy in units of omega0*j")
            sp.add_argument("--grid", type=_grid)
            sp.add_argument("--T", type=float)
            sp.add_argument("--dt", type=float)
        if name == "spectrum":
            sp.add_argument("--n-max", type=int)
            sp.add_argument("--count", type=int)
    return ap


def config_from_args(args) -> RunConfig:
    data = load_config(args.config).to_mapping() if args.config else {}
    data["command"] = args.command
    if args.out is not None:
        data["out"] = args.out
    if args.seed is not None:
        data["seed"] = args.seed
    params = dict(data.get("params", {}))
    given = {k: v for k, v in vars(args).items() if k in _FLAGS and v is not None}
    if "omega" in given or "omega_ratio" in given:
        params.pop("omega", None)
        params.pop("omega_ratio", None)
    if "gamma" in given or "f" in given:
        params.pop("gamma", None)
        params.pop("f", None)
    for key, value in given.items():
        block, field = _FLAGS[key]
        if block is None:
            params[field] = value
        else:
            block = args.command if block == "@" else block
            data.setdefault(block, {})[field] = value
    data["params"] = params
    return RunConfig.from_mapping(data)


def run(cfg: RunConfig):
    out = Path(cfg.out)
    files = HANDLERS[cfg.command](cfg)
    files.append(atomic_write(out / "config.json", cfg.canonical() + "\n"))
    return files


def _origin(exc) -> str:
    """Name of the innermost package module the exception passed through."""
    name = "dicke_boa"
    for frame in traceback.extract_tb(exc.__traceback__):
        path = Path(frame.filename)
        if "dicke_boa" in path.parts:
            rel = path.parts[path.parts.index("dicke_boa"):]
            name = ".".join(rel)[: -len(path.suffix)] if path.suffix else ".".join(rel)
    return name


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigInvalid as exc:
        print(f"dicke: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        files = run(cfg)
    except ConfigInvalid as exc:
        print(f"dicke: configuration error: {exc}", file=sys.stderr)
        return 2
    except (DickeError, ArithmeticError) as exc:
        print(f"dicke: numeric failure in {_origin(exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
