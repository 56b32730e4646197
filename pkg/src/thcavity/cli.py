"""Config-driven batch runner.

Each subcommand reads one YAML config, runs the matching experiment, and
writes CSV/JSON artifacts plus a manifest into the output directory.  Configs
are validated against a strict per-experiment schema: unknown keys are
rejected and physical rates have no silent defaults (only tolerances and grid
densities may be omitted).  Numeric CSV fields are formatted at 17 significant
digits so a rerun of the same config is byte-identical.

The `unit` field declares how the numbers in the config are to be read (Hz or
rad/s).  Dynamics experiments are scale-free and run verbatim in the declared
unit; only `coupling` computes a dimensional value, and it reports both.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager, nullcontext
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .coupling import NuclearTransition, collective_rates, derived_coupling
from .lindblad import (
    BASIS,
    DIM,
    DensityMatrix,
    basis_index,
    build_hamiltonian_operators,
    integrate_master,
    population_series,
    standard_collapse_ops,
)
from .maxwell_bloch import integrate_mbe, rabi_kick, rabi_scaling_fit
from .output import write_csv, write_json
from .params import ModelParams
from .phase_diagram import grid_scan
from .spectrum import spectrum_scan
from .superradiance import (
    DickeSpace,
    lifetime_vs_kappa,
    peak_scaling_fit,
    post_pump_segment,
    pulse_width_fwhm,
    pumped_effective_model,
    simulate_superradiance,
)
from .sweep import (
    NoJumpError,
    SweepProtocol,
    integrate_sweep,
    jump_time,
    jump_time_scan,
    polariton_populations,
)

__all__ = ["ConfigError", "run_config", "main"]

TWO_PI = 2.0 * np.pi


class ConfigError(Exception):
    """Config rejected; the message names the offending field by dotted path."""


# name -> (figure, one-line description); also fixes the `list` output order
EXPERIMENT_ORDER = {
    "coupling": ("Fig. 1",
                 "single-nucleus cavity coupling rate from nuclear data"),
    "spectrum": ("Fig. 2",
                 "polariton branch energies and ground-state fractions vs detuning"),
    "rabi": ("Fig. 2", "vacuum Rabi splitting scaling with sqrt(N)"),
    "lindblad11": ("Fig. 2",
                   "master-equation dynamics on the truncated four-mode basis"),
    "superradiance": ("Fig. S1",
                      "collective emission burst of the pumped ensemble"),
    "lifetime": ("Fig. S2", "emission pulse width against cavity linewidth"),
    "sweep": ("Fig. 4", "detuning-sweep storage and jump-time scaling"),
    "phase-diagram": ("Fig. 3",
                      "coupling-regime map over cavity linewidth and sqrt(N)"),
}


# ---------------------------------------------------------------------------
# schema machinery

_MISSING = object()


class _Field:
    def __init__(self, kind, *, required=True, default=_MISSING, choices=None,
                 item=None, children=None, min_len=0, positive=False,
                 nonneg=False):
        self.kind = kind
        self.required = required
        self.default = default
        self.choices = choices
        self.item = item
        self.children = children
        self.min_len = min_len
        self.positive = positive
        self.nonneg = nonneg


def _num(**kw):
    return _Field("float", **kw)


def _int(**kw):
    return _Field("int", **kw)


def _str(**kw):
    return _Field("str", **kw)


def _bool(**kw):
    return _Field("bool", **kw)


def _list(item, **kw):
    return _Field("list", item=item, **kw)


def _sec(children, **kw):
    return _Field("section", children=children, **kw)


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


def _apply(field, value, path):
    """Validate value against field; return the canonical (defaults-filled) form."""
    if field.kind == "section":
        if not isinstance(value, dict):
            raise ConfigError(f"{path or 'config'}: expected a mapping")
        for key in value:
            if key not in field.children:
                raise ConfigError(f"unknown field: {_join(path, key)}")
        out = {}
        for key, child in field.children.items():
            dotted = _join(path, key)
            if key in value:
                out[key] = _apply(child, value[key], dotted)
            elif child.required:
                raise ConfigError(f"missing required field: {dotted}")
            elif child.default is not _MISSING:
                d = child.default
                out[key] = dict(d) if isinstance(d, dict) else d
        return out

    if field.kind == "list":
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list")
        if len(value) < field.min_len:
            raise ConfigError(f"{path}: need at least {field.min_len} entries")
        return [_apply(field.item, v, f"{path}[{i}]") for i, v in enumerate(value)]

    if field.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        value = float(value)
    elif field.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer")
    elif field.kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string")
    elif field.kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false")

    if field.choices is not None and value not in field.choices:
        raise ConfigError(f"{path}: must be one of {sorted(field.choices)}, got {value!r}")
    if field.positive and not value > 0:
        raise ConfigError(f"{path}: must be > 0, got {value}")
    if field.nonneg and not value >= 0:
        raise ConfigError(f"{path}: must be >= 0, got {value}")
    return value


def _root(children):
    return _sec({
        "experiment": _str(choices=tuple(EXPERIMENT_ORDER)),
        "unit": _str(choices=("Hz", "rad/s")),
        "output": _sec({"prefix": _str(required=False)}, required=False),
        **children,
    })


def _model_sec(required, optional=()):
    # frame energies may be negative (rotating-frame detunings); rates may not
    children = {}
    for name in required:
        children[name] = _int(positive=True) if name == "n_nuclei" else _num(nonneg=True)
    for name in optional:
        if name == "frame":
            children[name] = _str(required=False, default="rotating",
                                  choices=("rotating", "lab"))
        else:
            # mirrors the ModelParams defaults: auxiliary terms off
            default = 1.0 if name == "pump_width" else 0.0
            rate_like = name in ("kappa1", "kappa2", "fwm_u",
                                 "pump_amp", "pump_width")
            children[name] = _num(required=False, default=default,
                                  nonneg=rate_like)
    return _sec(children)


def _tol_sec(rtol, atol, **extra_ints):
    children = {"rtol": _num(required=False, default=rtol, positive=True),
                "atol": _num(required=False, default=atol, positive=True)}
    for name, default in extra_ints.items():
        children[name] = _int(required=False, default=default, positive=True)
    return _sec(children, required=False, default={
        "rtol": rtol, "atol": atol,
        **{name: default for name, default in extra_ints.items()}})


_SCHEMAS = {
    "coupling": _root({
        "transition": _sec({
            "wavelength": _num(positive=True),
            "vacuum_lifetime": _num(positive=True),
            "mode_volume": _num(positive=True),
        }),
        "collective": _sec({
            "n_nuclei": _int(positive=True),
            "kappa_vuv": _num(positive=True),
            "gamma_minus": _num(positive=True),
        }, required=False),
    }),
    "spectrum": _root({
        "omega": _num(positive=True),
        "scan": _sec({
            "delta_min": _num(),
            "delta_max": _num(),
            "n_points": _int(required=False, default=1001, positive=True),
        }),
    }),
    "rabi": _root({
        "model": _model_sec(("g", "kappa_vuv", "gamma_minus")),
        "scan": _sec({"n_nuclei": _list(_int(positive=True), min_len=4)}),
        "kick": _sec({
            "target_alpha": _num(required=False, default=0.01, positive=True),
            "n_periods": _num(required=False, default=8.0, positive=True),
        }, required=False, default={"target_alpha": 0.01, "n_periods": 8.0}),
        "tolerances": _tol_sec(1e-8, 1e-10, n_samples=4000),
        "emit_traces": _bool(required=False, default=False),
    }),
    "lindblad11": _root({
        "model": _model_sec(
            ("g", "kappa_vuv", "gamma_minus", "n_nuclei"),
            optional=("omega1", "omega2", "omega_vuv", "e_nuc", "fwm_u",
                      "pump_amp", "pump_center", "pump_width",
                      "kappa1", "kappa2", "frame")),
        "initial_state": _list(_int(nonneg=True), min_len=4),
        "time": _sec({
            "t_end": _num(positive=True),
            "n_samples": _int(required=False, default=400, positive=True),
        }),
        "options": _sec({
            "rwa": _bool(required=False, default=True),
            "collective_coupling": _bool(required=False, default=False),
            "check": _bool(required=False, default=True),
        }, required=False, default={"rwa": True, "collective_coupling": False,
                                    "check": True}),
        "tolerances": _tol_sec(1e-10, 1e-12),
        "dump_operators": _bool(required=False, default=False),
    }),
    "superradiance": _root({
        "model": _model_sec(("g", "kappa_vuv", "gamma_minus", "fwm_u")),
        "runs": _sec({"n_nuclei": _list(_int(positive=True), min_len=1)}),
        "pump": _sec({
            "sigma": _num(positive=True),
            "fraction": _num(positive=True),
        }),
        "tolerances": _tol_sec(1e-7, 1e-9, n_samples=1200),
    }),
    "lifetime": _root({
        "model": _model_sec(("g", "gamma_minus", "n_nuclei", "fwm_u")),
        "scan": _sec({"kappa_vuv": _list(_num(positive=True), min_len=3)}),
        "pump": _sec({
            "sigma": _num(positive=True),
            "fraction": _num(positive=True),
        }),
        "tolerances": _tol_sec(1e-7, 1e-9, n_samples=1600),
    }),
    "sweep": _root({
        "protocol": _sec({
            "delta0": _num(),
            "omega": _num(nonneg=True),
            "rate_k": _num(required=False, positive=True),
            "t_start": _num(required=False),
            "t_end": _num(required=False),
        }),
        "scan": _sec({
            "rate_k": _list(_num(positive=True), min_len=3),
            "samples_per_period": _num(required=False, default=8.0, positive=True),
        }, required=False),
        "sampling": _sec({
            "n_samples": _int(required=False, default=4001, positive=True),
        }, required=False, default={"n_samples": 4001}),
        "tolerances": _tol_sec(1e-12, 1e-14),
    }),
    "phase-diagram": _root({
        "model": _model_sec(("g", "gamma_minus")),
        "grid": _sec({
            "kappa": _sec({
                "min": _num(positive=True),
                "max": _num(positive=True),
                "n": _int(required=False, default=60, positive=True),
            }),
            "sqrt_n": _sec({
                "min": _num(positive=True),
                "max": _num(positive=True),
                "n": _int(required=False, default=60, positive=True),
            }),
        }),
        "snap_integer_n": _bool(required=False, default=False),
    }),
}


def _build(ctor, path, *args, **kwargs):
    # library validation errors on config-supplied values are config errors
    try:
        return ctor(*args, **kwargs)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"{path}: {err}") from None


# ---------------------------------------------------------------------------
# experiment runners; each returns the list of files it wrote

def _run_coupling(cfg, out, prefix, map_fn, verbose):
    tr = _build(NuclearTransition, "transition",
                wavelength=cfg["transition"]["wavelength"],
                vacuum_lifetime=cfg["transition"]["vacuum_lifetime"],
                effective_mode_volume=cfg["transition"]["mode_volume"])
    d = derived_coupling(tr)
    payload = {
        "g": {"rad_per_s": d.g, "hz": d.g / TWO_PI},
        "angular_frequency": {"rad_per_s": tr.angular_frequency,
                              "hz": tr.angular_frequency / TWO_PI},
        "transition_moment_am2": d.transition_moment,
        "vacuum_field_t": d.vacuum_field,
        "inputs": {"wavelength_m": tr.wavelength,
                   "vacuum_lifetime_s": tr.vacuum_lifetime,
                   "mode_volume_m3": tr.effective_mode_volume},
    }
    if "collective" in cfg:
        col = cfg["collective"]
        g_unit = d.g if cfg["unit"] == "rad/s" else d.g / TWO_PI
        rates = _build(collective_rates, "collective", g_unit,
                       col["n_nuclei"], col["kappa_vuv"], col["gamma_minus"])
        payload["collective"] = {
            "unit": cfg["unit"],
            "g": g_unit,
            "omega_collective": rates.omega_collective,
            "gamma_eff": rates.gamma_eff,
            "cooperativity": rates.cooperativity,
            "tau_eff_estimate": rates.tau_eff_estimate,
        }
    return [write_json(out / f"{prefix}.json", payload)]


def _run_spectrum(cfg, out, prefix, map_fn, verbose):
    scan = cfg["scan"]
    if not scan["delta_max"] > scan["delta_min"]:
        raise ConfigError("scan.delta_max: must exceed scan.delta_min")
    points = _build(spectrum_scan, "scan", cfg["omega"],
                    (scan["delta_min"], scan["delta_max"], scan["n_points"]))
    rows = [(pt.detuning, pt.e_upper, pt.e_lower,
             pt.photon_fraction_lp, pt.nuclear_fraction_lp) for pt in points]
    path = write_csv(out / f"{prefix}.csv",
                     ("delta", "e_upper", "e_lower", "c2_lp", "x2_lp"), rows)
    return [path]


_MBE_TRACE_HEADER = ("t", "re_alpha", "im_alpha", "abs_alpha_sq", "re_P", "im_P", "Z")


def _mbe_trace_rows(ts):
    a_re = ts.column("re_alpha")
    a_im = ts.column("im_alpha")
    return list(zip(ts.times, a_re, a_im, a_re**2 + a_im**2,
                    ts.column("re_p"), ts.column("im_p"), ts.column("z")))


def _run_rabi(cfg, out, prefix, map_fn, verbose):
    mod, tol, kick = cfg["model"], cfg["tolerances"], cfg["kick"]
    ns = cfg["scan"]["n_nuclei"]
    p0 = _build(ModelParams, "model", g=mod["g"], kappa_vuv=mod["kappa_vuv"],
                gamma_minus=mod["gamma_minus"], n_nuclei=ns[0])
    fit = rabi_scaling_fit(ns, p0, n_periods=kick["n_periods"],
                           target_alpha=kick["target_alpha"],
                           n_samples=tol["n_samples"], rtol=tol["rtol"],
                           atol=tol["atol"], map_fn=map_fn)
    files = [write_csv(out / f"{prefix}.csv", ("sqrt_n", "omega_rabi"),
                       [(s, w) for _, s, w in fit.points])]
    files.append(write_json(out / f"{prefix}_fit.json", {
        "n_nuclei": [n for n, _, _ in fit.points],
        "sqrt_n": [s for _, s, _ in fit.points],
        "omega_rabi": [w for _, _, w in fit.points],
        "fit": {"slope": fit.slope, "intercept": fit.intercept,
                "r2": fit.r_squared},
    }))
    if cfg["emit_traces"]:
        for n, _, _ in fit.points:
            pn = replace(p0, n_nuclei=n)
            drive = rabi_kick(pn, target_alpha=kick["target_alpha"])
            omega = np.sqrt(n * p0.g**2
                            - ((p0.kappa_vuv - p0.gamma_minus) / 4.0) ** 2)
            t_end = drive.center + kick["n_periods"] * TWO_PI / omega
            ts = integrate_mbe(pn, drive, (0.0, t_end),
                               n_samples=tol["n_samples"],
                               rtol=tol["rtol"], atol=tol["atol"])
            files.append(write_csv(out / f"{prefix}_trace_n{n}.csv",
                                   _MBE_TRACE_HEADER, _mbe_trace_rows(ts)))
            if verbose:
                print(f"[rabi] trace N={n} done", file=sys.stderr)
    return files


def _run_lindblad11(cfg, out, prefix, map_fn, verbose):
    mod = dict(cfg["model"])
    opts, tol = cfg["options"], cfg["tolerances"]
    p = _build(ModelParams, "model", **mod)
    state = tuple(cfg["initial_state"])
    if len(state) != 4:
        raise ConfigError("initial_state: expected exactly 4 occupation numbers")
    idx = _build(basis_index, "initial_state", state)
    rho0 = DensityMatrix.pure(DIM, idx)

    if p.pump_amp != 0.0:
        def hamiltonian(t):
            return build_hamiltonian_operators(
                p, t, rwa=opts["rwa"],
                collective_coupling=opts["collective_coupling"])
        max_step = p.pump_width / 2.0
    else:
        hamiltonian = build_hamiltonian_operators(
            p, 0.0, rwa=opts["rwa"],
            collective_coupling=opts["collective_coupling"])
        max_step = np.inf

    collapse = standard_collapse_ops(
        p, collective_coupling=opts["collective_coupling"])
    ts = integrate_master(hamiltonian, rho0, collapse,
                          (0.0, cfg["time"]["t_end"]),
                          n_samples=cfg["time"]["n_samples"],
                          rtol=tol["rtol"], atol=tol["atol"],
                          max_step=max_step, check=opts["check"])

    labels = ["p_" + "".join(str(v) for v in s) for s in BASIS]
    pops = [population_series(ts, i) for i in range(DIM)]
    purity = np.einsum("tij,tji->t", ts.values, ts.values).real
    rows = list(zip(ts.times, *pops, purity))
    files = [write_csv(out / f"{prefix}.csv", ("t", *labels, "purity"), rows)]

    if cfg["dump_operators"]:
        h0 = hamiltonian(0.0) if callable(hamiltonian) else hamiltonian
        lines = ["# basis states (n1, n2, n_vuv, n_nuc):"]
        lines += [f"#   {i}: {tuple(s)}" for i, s in enumerate(BASIS)]
        for name, op in [("hamiltonian(t=0)", h0)] + [
                (f"collapse_{i}", c) for i, c in enumerate(collapse)]:
            lines.append(f"# {name}, real part then imaginary part")
            for block in (op.real, op.imag):
                lines += [" ".join(f"{v:+.17e}" for v in row) for row in block]
        dump = out / f"{prefix}_operators.txt"
        dump.write_text("\n".join(lines) + "\n", newline="\n")
        files.append(dump)
    return files


def _superradiance_run(n, p, sigma, fraction, n_samples, rtol, atol):
    pn = replace(p, n_nuclei=int(n))
    model = pumped_effective_model(pn, sigma=sigma, fraction=fraction)
    return simulate_superradiance(model, DickeSpace(int(n)),
                                  n_samples=n_samples, rtol=rtol, atol=atol)


def _run_superradiance(cfg, out, prefix, map_fn, verbose):
    mod, pump, tol = cfg["model"], cfg["pump"], cfg["tolerances"]
    ns = cfg["runs"]["n_nuclei"]
    p = _build(ModelParams, "model", g=mod["g"], kappa_vuv=mod["kappa_vuv"],
               gamma_minus=mod["gamma_minus"], fwm_u=mod["fwm_u"],
               n_nuclei=ns[0])
    if not 0.0 < pump["fraction"] < 1.0:
        raise ConfigError("pump.fraction: must be in (0, 1)")

    work = partial(_superradiance_run, p=p, sigma=pump["sigma"],
                   fraction=pump["fraction"], n_samples=tol["n_samples"],
                   rtol=tol["rtol"], atol=tol["atol"])
    runs = list(map_fn(work, ns))

    files = []
    for n, ts in zip(ns, runs):
        rows = list(zip(ts.times, ts.column("intensity"), ts.column("g1"),
                        ts.column("jz")))
        files.append(write_csv(out / f"{prefix}_n{n}.csv",
                               ("t", "intensity", "g1", "jz"), rows))
        seg_t, seg_i = post_pump_segment(ts)
        peak = int(np.argmax(seg_i))
        files.append(write_json(out / f"{prefix}_n{n}.json", {
            "N": n,
            "kappa": p.kappa_vuv,
            "i_max": float(seg_i[peak]),
            "t_burst": float(seg_t[peak]),
            "tau_eff": pulse_width_fwhm(seg_t, seg_i),
        }))
        if verbose:
            print(f"[superradiance] N={n} done", file=sys.stderr)

    distinct = sorted({int(n) for n in ns})
    if len(distinct) >= 5 and distinct[-1] >= 4 * distinct[0]:
        fit = peak_scaling_fit(runs)
        files.append(write_json(out / f"{prefix}_fit.json", {
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "r2": fit.r_squared,
            "points": [[n, i] for n, i in fit.points],
        }))
    elif verbose:
        print("[superradiance] too few N values for a peak-scaling fit",
              file=sys.stderr)
    return files


def _run_lifetime(cfg, out, prefix, map_fn, verbose):
    mod, pump, tol = cfg["model"], cfg["pump"], cfg["tolerances"]
    kappas = cfg["scan"]["kappa_vuv"]
    p = _build(ModelParams, "model", g=mod["g"], gamma_minus=mod["gamma_minus"],
               fwm_u=mod["fwm_u"], n_nuclei=mod["n_nuclei"],
               kappa_vuv=kappas[0])
    if not 0.0 < pump["fraction"] < 1.0:
        raise ConfigError("pump.fraction: must be in (0, 1)")
    scan = lifetime_vs_kappa(p, kappas, pump_sigma=pump["sigma"],
                             fraction=pump["fraction"],
                             n_samples=tol["n_samples"], rtol=tol["rtol"],
                             atol=tol["atol"], map_fn=map_fn)
    files = [write_csv(out / f"{prefix}.csv", ("kappa", "tau_eff"),
                       list(scan.points))]
    files.append(write_json(out / f"{prefix}_fit.json", {
        "slope": scan.slope,
        "intercept": scan.intercept,
        "r2": scan.r_squared,
        "points": [[k, tau] for k, tau in scan.points],
    }))
    return files


def _run_sweep(cfg, out, prefix, map_fn, verbose):
    proto_cfg, tol = cfg["protocol"], cfg["tolerances"]

    if "scan" in cfg:
        if "rate_k" in proto_cfg:
            raise ConfigError(
                "protocol.rate_k: remove it when scan.rate_k is given")
        scan = jump_time_scan(proto_cfg["omega"], proto_cfg["delta0"],
                              cfg["scan"]["rate_k"],
                              samples_per_period=cfg["scan"]["samples_per_period"],
                              min_samples=cfg["sampling"]["n_samples"],
                              rtol=tol["rtol"], atol=tol["atol"], map_fn=map_fn)
        files = [write_csv(out / f"{prefix}.csv", ("k", "gamma_lz", "tau_jump"),
                           list(scan.points))]
        files.append(write_json(out / f"{prefix}_fit.json", {
            "slope": scan.slope,
            "r2": scan.r_squared,
            "points": [[k, g, tau] for k, g, tau in scan.points],
        }))
        return files

    if "rate_k" not in proto_cfg:
        raise ConfigError("missing required field: protocol.rate_k")
    proto = _build(SweepProtocol, "protocol", delta0=proto_cfg["delta0"],
                   rate_k=proto_cfg["rate_k"], omega=proto_cfg["omega"],
                   t_start=proto_cfg.get("t_start"),
                   t_end=proto_cfg.get("t_end"))
    ts = integrate_sweep(proto, n_samples=cfg["sampling"]["n_samples"],
                         rtol=tol["rtol"], atol=tol["atol"])
    p_photon = np.abs(ts.column("c_photon")) ** 2
    p_nuclear = np.abs(ts.column("c_nuclear")) ** 2
    p_up, p_lp = polariton_populations(ts)
    rows = list(zip(ts.times, proto.delta(ts.times), p_photon, p_nuclear,
                    p_up, p_lp))
    files = [write_csv(out / f"{prefix}.csv",
                       ("t", "delta", "p_photon", "p_nuclear", "p_up", "p_lp"),
                       rows)]
    try:
        tau = jump_time(ts.times, p_up)
    except NoJumpError:
        tau = None
    files.append(write_json(out / f"{prefix}.json", {
        "k": proto.rate_k,
        "gamma_lz": proto.lz_parameter,
        "tau_jump": tau,
        "p_nuclear_final": float(p_nuclear[-1]),
    }))
    return files


def _run_phase_diagram(cfg, out, prefix, map_fn, verbose):
    mod, grid = cfg["model"], cfg["grid"]
    if mod["gamma_minus"] <= 0:
        raise ConfigError("model.gamma_minus: must be > 0 (cooperativity)")
    for axis in ("kappa", "sqrt_n"):
        if not grid[axis]["max"] > grid[axis]["min"]:
            raise ConfigError(f"grid.{axis}.max: must exceed grid.{axis}.min")
    scan = _build(grid_scan, "grid", mod["g"], mod["gamma_minus"],
                  (grid["kappa"]["min"], grid["kappa"]["max"],
                   grid["kappa"]["n"]),
                  (grid["sqrt_n"]["min"], grid["sqrt_n"]["max"],
                   grid["sqrt_n"]["n"]),
                  snap_integer_n=cfg["snap_integer_n"])
    rows = [(pt.kappa_vuv, pt.sqrt_n, pt.regime, pt.margin_strong,
             pt.margin_cooperativity) for pt in scan.points]
    files = [write_csv(out / f"{prefix}.csv",
                       ("kappa", "sqrt_n", "regime", "margin_sc", "margin_coop"),
                       rows)]
    files.append(write_json(out / f"{prefix}_boundaries.json", {
        "strong": [[s, k] for s, k in scan.boundary_strong if k is not None],
        "cooperativity": [[s, k] for s, k in scan.boundary_cooperativity
                          if k is not None],
    }))
    return files


# ---------------------------------------------------------------------------
# driver

_RUNNERS = {
    "coupling": _run_coupling,
    "spectrum": _run_spectrum,
    "rabi": _run_rabi,
    "lindblad11": _run_lindblad11,
    "superradiance": _run_superradiance,
    "lifetime": _run_lifetime,
    "sweep": _run_sweep,
    "phase-diagram": _run_phase_diagram,
}

def list_experiments() -> str:
    lines = [f"{name} → {fig}: {blurb}"
             for name, (fig, blurb) in EXPERIMENT_ORDER.items()]
    return "\n".join(lines)


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"invalid YAML in {path}: {err}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return raw


@contextmanager
def _pool_map(jobs):
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield pool.map


def run_config(config_path, *, out_dir=None, jobs=None, verbose=False,
               expected=None):
    """Validate and run one experiment config; returns the manifest dict."""
    raw = _load_config(config_path)
    name = raw.get("experiment")
    if name is None:
        raise ConfigError("missing required field: experiment")
    if name not in _RUNNERS:
        raise ConfigError(f"experiment: unknown experiment {name!r}")
    if expected is not None and name != expected:
        raise ConfigError(
            f"experiment: config declares {name!r} but the {expected!r} "
            "subcommand was invoked")

    cfg = _apply(_SCHEMAS[name], raw, "")
    prefix = cfg.get("output", {}).get("prefix", name)
    cfg["output"] = {"prefix": prefix}
    out = Path(out_dir) if out_dir is not None else Path("runs") / name
    out.mkdir(parents=True, exist_ok=True)

    uses_grid = (name in ("rabi", "superradiance", "lifetime")
                 or (name == "sweep" and "scan" in cfg))
    pool = _pool_map(jobs) if uses_grid and jobs != 1 else nullcontext(map)

    start = time.perf_counter()
    with pool as map_fn:
        files = _RUNNERS[name](cfg, out, prefix, map_fn, verbose)
    duration = time.perf_counter() - start

    manifest = {
        "experiment": name,
        "unit": cfg["unit"],
        "version": __version__,
        "duration_seconds": duration,
        "config": cfg,
        "outputs": sorted(Path(f).name for f in files),
    }
    write_json(out / "manifest.json", manifest)
    if verbose:
        print(f"[{name}] wrote {len(files) + 1} files to {out} "
              f"in {duration:.2f}s", file=sys.stderr)
    return manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="thcavity",
        description="Cavity-coupled nuclear ensemble experiment runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENT_ORDER:
        sp = sub.add_parser(name, help=EXPERIMENT_ORDER[name][1])
        sp.add_argument("--config", required=True, help="YAML config path")
        sp.add_argument("--out", default=None,
                        help="output directory (default runs/<experiment>)")
        sp.add_argument("--jobs", type=int, default=None,
                        help="parallel grid evaluations (default: all cores)")
        sp.add_argument("--verbose", action="store_true")
    sub.add_parser("list", help="list experiments and the figure each feeds")

    args = parser.parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return 0
    if args.jobs is not None and args.jobs < 1:
        parser.error(f"--jobs must be >= 1, got {args.jobs}")

    try:
        run_config(args.config, out_dir=args.out, jobs=args.jobs,
                   verbose=args.verbose, expected=args.command)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as err:
        print(f"error [{args.command}]: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
