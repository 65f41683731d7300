"""Command line front end: ``eitsim {spectrum,resonances,pump,validate-config} CONFIG``.

Configuration files are INI-style (``key = value`` under ``[section]``).
List-valued keys (comma separated) are swept as a Cartesian product, one
CSV per combination.  ``--set section.key=value`` overrides a key.  The
worker count comes from ``--workers`` or the ``EITSIM_WORKERS`` variable.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .atomdata import CS133, SPECIES, cs_six_level_scheme, doppler_width, mhz, to_mhz
from .csvio import config_hash, write_csv
from .doppler import VelocityDistribution, average_chi, contrast, transmittance, transparency_peak
from .errors import ConfigError, DomainError, EITError, FlatCurveError
from .pumping import DEFAULT_REPUMP_RABI, PumpConfig, modified_distribution
from .resonance import eit_shift_six_level, peak_scan

log = logging.getLogger("eitsim")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------- schema

def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


@dataclass(frozen=True)
class Key:
    kind: str  # float | int | str | bool
    default: object = None
    sweep: bool = False
    check: object = None
    choices: tuple = ()
    help: str = ""


SCHEMA = {
    "run": {
        "species": Key("str", "cs133", choices=tuple(SPECIES)),
        "model": Key("str", "six", sweep=True, choices=("three", "six")),
        "temperature_K": Key("float", None, sweep=True, check=_positive),
        "doppler_width_mhz": Key("float", None, sweep=True, check=_positive),
        "control_rabi_mhz": Key("float", 12.0, sweep=True, check=_nonneg),
        "control_rabi_gamma": Key("float", None, sweep=True, check=_nonneg),
        "delta_c_mhz": Key("float", 0.0, sweep=True),
        "gamma_sg_gamma": Key("float", 1e-4, check=_nonneg),
        "n0_cm3": Key("float", 1.1e10, check=_nonneg),
        "length_cm": Key("float", 1.0, check=_positive),
        "label": Key("str", ""),
    },
    "probe": {
        "start_mhz": Key("float", -160.0),
        "stop_mhz": Key("float", 160.0),
        "steps": Key("int", 641, check=lambda n: n >= 2),
        "fine_steps": Key("int", 401, check=_nonneg),
        "fine_halfwidth_gamma": Key("float", 3.0, check=_positive),
    },
    "velocity": {
        "nodes": Key("int", 2048, check=lambda n: n >= 2),
        "span": Key("float", 6.0, check=_positive),
        "rule": Key("str", "trapezoid", choices=("trapezoid", "gauss-hermite")),
    },
    "contrast": {
        "plateau_lo_gamma": Key("float", 15.0),
        "plateau_hi_gamma": Key("float", 25.0),
        "peak_halfwidth_gamma": Key("float", 3.0, check=_positive),
        "peak_rule": Key("str", "local", choices=("local", "max")),
    },
    "resonances": {
        "doppler_shifts_mhz": Key("float", None, sweep=True),
        "shift_ranges_mhz": Key("str", None, sweep=True),
        "spectra": Key("bool", False),
    },
    "pumping": {
        "repump_rabi_gamma": Key("float", DEFAULT_REPUMP_RABI / CS133.gamma, check=_nonneg),
        "delta_repump_mhz": Key("float", 0.0),
        "counter_propagating": Key("bool", True),
        "pump_rabi_gamma": Key("float", 0.0, sweep=True, check=_nonneg),
        "delta_pump_mhz": Key("float", 0.0, sweep=True),
        "tau_d_us": Key("float", 300.0, check=_positive),
        "grid_nodes": Key("int", 801, check=lambda n: n >= 2),
        "grid_span": Key("float", 6.0, check=_positive),
        "ground_frame": Key("str", "raman", choices=("raman", "bare")),
    },
    "output": {
        "directory": Key("str", "out"),
        "prefix": Key("str", ""),
        "per_velocity": Key("bool", False),
    },
}

_TRUE = {"1", "yes", "true", "on"}
_FALSE = {"0", "no", "false", "off"}


def _convert(raw, key: Key, where):
    section, name, line = where
    parts = [p.strip() for p in raw.split(",")] if key.sweep else [raw.strip()]
    if any(p == "" for p in parts):
        raise ConfigError(f"empty value for {name}", section=section, key=name, line=line)
    out = []
    for p in parts:
        try:
            if key.kind == "float":
                v = float(p)
                if not math.isfinite(v):
                    raise ValueError
            elif key.kind == "int":
                v = int(p)
            elif key.kind == "bool":
                low = p.lower()
                if low not in _TRUE | _FALSE:
                    raise ValueError
                v = low in _TRUE
            else:
                v = p.lower() if key.choices else p
        except ValueError:
            raise ConfigError(f"cannot read {p!r} as {key.kind}", section=section, key=name,
                              line=line) from None
        if key.choices and v not in key.choices:
            raise ConfigError(f"{v!r} is not one of {', '.join(key.choices)}", section=section,
                              key=name, line=line)
        if key.check is not None and not key.check(v):
            raise ConfigError(f"value {v!r} out of range", section=section, key=name, line=line)
        out.append(v)
    return tuple(out) if key.sweep else out[0]


def _key_lines(text):
    """(section, key) -> 1-based line number, for diagnostics."""
    lines, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            lines.setdefault((section, None), i)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            lines.setdefault((section, m.group(1).strip().lower()), i)
    return lines


@dataclass
class RunConfig:
    """Validated configuration; sweep keys hold tuples."""

    values: dict
    sections: set = field(default_factory=set)
    source: str = "<string>"

    def get(self, section, key):
        return self.values[section][key]

    @property
    def has_pumping(self):
        return "pumping" in self.sections

    def digest(self):
        return config_hash(self.values)


def parse_config(text, source="<string>", overrides=()):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r}", section=exc.section, key=exc.option,
                          line=exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section {exc.section!r}", section=exc.section,
                          line=exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any section", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line=line) from None
    lines = _key_lines(text)
    for ov in overrides:
        m = re.fullmatch(r"\s*([A-Za-z_]+)\.([A-Za-z0-9_]+)\s*=(.*)", ov)
        if not m:
            raise ConfigError(f"override {ov!r} is not section.key=value")
        sec, k, v = m.group(1), m.group(2).lower(), m.group(3)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, k, v.strip())
        lines[(sec, k)] = None
    values, sections = {}, set()
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]", section=sec, line=lines.get((sec, None)))
        sections.add(sec)
    known = {k.lower(): k for sec in SCHEMA.values() for k in sec}
    for sec, keys in SCHEMA.items():
        values[sec] = {}
        lower = {k.lower(): k for k in keys}
        if cp.has_section(sec):
            for k in cp[sec]:
                if k not in lower:
                    hint = f" (did you mean {known[k]!r}?)" if k in known else ""
                    raise ConfigError(f"unknown key {k!r}{hint}", section=sec, key=k,
                                      line=lines.get((sec, k)))
        for name, key in keys.items():
            if cp.has_option(sec, name.lower()):
                raw = cp.get(sec, name.lower())
                values[sec][name] = _convert(raw, key, (sec, name, lines.get((sec, name.lower()))))
            else:
                d = key.default
                values[sec][name] = (d,) if key.sweep and d is not None else d
    cfg = RunConfig(values, sections, source)
    _cross_check(cfg, lines)
    return cfg


def _cross_check(cfg, lines):
    run, probe = cfg.values["run"], cfg.values["probe"]
    if run["temperature_K"] is not None and run["doppler_width_mhz"] is not None:
        raise ConfigError("give either temperature_K or doppler_width_mhz, not both", section="run",
                          key="doppler_width_mhz", line=lines.get(("run", "doppler_width_mhz")))
    if run["control_rabi_gamma"] is not None and ("run", "control_rabi_mhz") in lines:
        raise ConfigError("give either control_rabi_mhz or control_rabi_gamma, not both",
                          section="run", key="control_rabi_gamma",
                          line=lines.get(("run", "control_rabi_gamma")))
    if not probe["stop_mhz"] > probe["start_mhz"]:
        raise ConfigError("probe sweep range is empty", section="probe", key="stop_mhz",
                          line=lines.get(("probe", "stop_mhz")))
    c = cfg.values["contrast"]
    if not c["plateau_hi_gamma"] > c["plateau_lo_gamma"]:
        raise ConfigError("plateau window is empty", section="contrast", key="plateau_hi_gamma",
                          line=lines.get(("contrast", "plateau_hi_gamma")))
    r = cfg.values["resonances"]
    for spec in r["shift_ranges_mhz"] or ():
        where = dict(section="resonances", key="shift_ranges_mhz",
                     line=lines.get(("resonances", "shift_ranges_mhz")))
        parts = spec.split(":")
        try:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        except (ValueError, IndexError):
            raise ConfigError(f"range {spec!r} is not start:stop:steps", **where) from None
        if len(parts) != 3 or n < 2 or a == b:
            raise ConfigError(f"range {spec!r} needs distinct ends and at least 2 steps", **where)
    if run["species"] != "cs133" and run["model"] != ("three",):
        raise ConfigError("the six-level scheme is only tabulated for cs133", section="run",
                          key="species", line=lines.get(("run", "species")))


def load_config(path, overrides=()):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(p), overrides)


# ---------------------------------------------------------------- runs

def _doppler_widths(cfg):
    run = cfg.values["run"]
    if run["doppler_width_mhz"] is not None:
        return tuple(("doppler_width_mhz", w, mhz(w)) for w in run["doppler_width_mhz"])
    species = SPECIES[run["species"]]
    temps = run["temperature_K"] or (300.0,)
    return tuple(("temperature_K", t, doppler_width(species, t)) for t in temps)


def _control_rabis(cfg):
    run = cfg.values["run"]
    if run["control_rabi_gamma"] is not None:
        return tuple(("control_rabi_gamma", v, v * CS133.gamma) for v in run["control_rabi_gamma"])
    return tuple(("control_rabi_mhz", v, mhz(v)) for v in run["control_rabi_mhz"])


def _scheme(cfg, omega_c, delta_c):
    g = cfg.values["run"]["gamma_sg_gamma"] * CS133.gamma
    return cs_six_level_scheme(omega_c, delta_c, gamma_sg=g)


def _center(scheme, model):
    return float(scheme.delta_c) + (eit_shift_six_level(scheme) if model == "six" else 0.0)


def _probe(cfg, center):
    p = cfg.values["probe"]
    x = mhz(np.linspace(p["start_mhz"], p["stop_mhz"], p["steps"]))
    if p["fine_steps"]:
        hw = p["fine_halfwidth_gamma"] * CS133.gamma
        x = np.concatenate([x, np.linspace(center - hw, center + hw, p["fine_steps"])])
    return np.unique(x)


def _tag(pairs):
    def fmt(v):
        return format(v, "g").replace("-", "m").replace(".", "p")
    return "_".join(f"{k.split('_')[0]}{fmt(v)}" if not isinstance(v, str) else v for k, v in pairs)


def _contrast(cfg, curve, center):
    c = cfg.values["contrast"]
    try:
        return contrast(curve, center, gamma=CS133.gamma,
                        plateau=(c["plateau_lo_gamma"], c["plateau_hi_gamma"]),
                        peak_halfwidth=c["peak_halfwidth_gamma"], peak=c["peak_rule"])
    except FlatCurveError as exc:
        log.warning("contrast undefined: %s", exc)
        return math.nan
    except EITError as exc:
        log.warning("contrast not computed: %s", exc)
        return math.nan


def _outdir(cfg, override):
    d = Path(override or cfg.values["output"]["directory"])
    d.mkdir(parents=True, exist_ok=True)
    return d


def _name(cfg, stem, tag):
    pre = cfg.values["output"]["prefix"]
    return "_".join(x for x in (pre, stem, tag) if x) + ".csv"


def _base_meta(cfg):
    return {"config": Path(cfg.source).name, "config_hash": cfg.digest()}


def cmd_spectrum(cfg, outdir=None, workers=1):
    """Doppler-averaged transmittance for each combination of the sweep keys."""
    out = _outdir(cfg, outdir)
    run, vel = cfg.values["run"], cfg.values["velocity"]
    summary = []
    combos = itertools.product(run["model"], _doppler_widths(cfg), _control_rabis(cfg), run["delta_c_mhz"])
    for model, (wk, wv, width), (ck, cv, omega_c), dc in combos:
        scheme = _scheme(cfg, omega_c, mhz(dc))
        center = _center(scheme, model)
        dist = VelocityDistribution.gaussian(width, vel["nodes"], vel["span"], vel["rule"])
        dp = _probe(cfg, center)
        x = average_chi(scheme, dist, dp, model, n0=run["n0_cm3"], workers=workers)
        tag = _tag([("model", model), (wk, wv), (ck, cv), ("dc", dc)])
        meta = _base_meta(cfg)
        meta.update({"model": model, wk: wv, ck: cv, "delta_c_MHz": dc,
                     "doppler_width_MHz": to_mhz(width), "n0_cm3": run["n0_cm3"],
                     "eit_position_MHz": to_mhz(center)})
        curve = transmittance(dp, x, length=run["length_cm"], metadata=meta)
        c = _contrast(cfg, curve, center)
        pk = transparency_peak(curve, center, halfwidth=cfg.values["contrast"]["peak_halfwidth_gamma"])
        meta["contrast"] = c
        name = _name(cfg, "spectrum", tag)
        curve.to_csv(out / name, {"contrast": c})
        log.info("%s: EIT estimate %.4f MHz, contrast %.4g", name, to_mhz(center), c)
        summary.append((model, to_mhz(width), to_mhz(omega_c), dc, to_mhz(center), c,
                        to_mhz(pk.position) if pk else math.nan, pk.height if pk else math.nan,
                        pk.prominence if pk else math.nan))
        if cfg.values["output"]["per_velocity"]:
            _per_velocity(cfg, out, scheme, model, dist, dp, tag, meta)
    write_csv(out / _name(cfg, "spectrum_summary", ""),
              ["model", "doppler_width_MHz", "control_rabi_MHz", "delta_c_MHz", "eit_position_MHz",
               "contrast", "peak_position_MHz", "peak_t", "peak_prominence"],
              summary, _base_meta(cfg))
    return summary


def _per_velocity(cfg, out, scheme, model, dist, dp, tag, meta):
    from .susceptibility import chi

    n0 = cfg.values["run"]["n0_cm3"]
    idx = np.linspace(0, dist.nodes.size - 1, min(33, dist.nodes.size)).astype(int)
    rows = []
    for i in idx:
        dd = dist.nodes[i]
        s = scheme.with_detunings(delta_p=dp).doppler_shifted(dd)
        v = chi(s, model, n0=n0).value
        rows.extend((to_mhz(dd), to_mhz(p), np.real(a), np.imag(a)) for p, a in zip(dp, v))
    write_csv(out / _name(cfg, "velocity_chi", tag), ["delta_D_MHz", "delta_p_MHz", "re_chi", "im_chi"],
              rows, meta)


def _shifts(cfg):
    r = cfg.values["resonances"]
    parts = []
    for spec in r["shift_ranges_mhz"] or ():
        a, b, n = spec.split(":")
        parts.append(np.linspace(float(a), float(b), int(n)))
    if r["doppler_shifts_mhz"] is not None:
        parts.append(np.array(r["doppler_shifts_mhz"], dtype=float))
    if parts:
        return np.concatenate(parts)
    raise ConfigError("no Doppler shifts: set doppler_shifts_mhz or a shift range", section="resonances")


def cmd_resonances(cfg, outdir=None, workers=1):
    """Absorption-resonance positions and heights versus Doppler shift."""
    from .resonance import atr_shift_six_level, atr_shift_three_level
    import warnings

    shifts = _shifts(cfg)
    out = _outdir(cfg, outdir)
    run = cfg.values["run"]
    rows = []
    failures = 0
    for model, (ck, cv, omega_c), dc in itertools.product(run["model"], _control_rabis(cfg), run["delta_c_mhz"]):
        scheme = _scheme(cfg, omega_c, mhz(dc))
        center = _center(scheme, model)
        for est in peak_scan(scheme, mhz(shifts), model, n0=run["n0_cm3"]):
            if not est.ok:
                failures += 1
                log.warning("Delta_D = %.3f MHz: %s", to_mhz(est.doppler_shift), est.error)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                try:
                    if model == "three":
                        analytic = atr_shift_three_level(scheme.rabi_c[0], est.doppler_shift)
                    else:
                        analytic = atr_shift_six_level(scheme, est.doppler_shift, warn=False)
                    analytic += float(scheme.delta_c)
                except EITError:
                    analytic = math.nan
            rows.append((model, to_mhz(omega_c), dc, to_mhz(est.doppler_shift), to_mhz(est.position),
                         to_mhz(analytic), est.height, to_mhz(center), est.method))
        if cfg.values["resonances"]["spectra"]:
            _resonance_spectra(cfg, out, scheme, model, shifts, center, (ck, cv), dc)
    meta = _base_meta(cfg)
    write_csv(out / _name(cfg, "resonances", ""),
              ["model", "control_rabi_MHz", "delta_c_MHz", "delta_D_MHz", "position_MHz",
               "analytic_MHz", "height", "eit_position_MHz", "method"], rows, meta)
    if failures:
        log.warning("%d resonance searches failed; see NaN rows", failures)
    return rows


def _resonance_spectra(cfg, out, scheme, model, shifts, center, ctrl, dc):
    from .susceptibility import chi

    dp = _probe(cfg, center)
    rows = []
    for dd in shifts:
        s = scheme.with_detunings(delta_p=dp).doppler_shifted(mhz(dd))
        v = chi(s, model, n0=cfg.values["run"]["n0_cm3"]).imag
        rows.extend((dd, to_mhz(p), a) for p, a in zip(dp, v))
    tag = _tag([("model", model), ctrl, ("dc", dc)])
    write_csv(out / _name(cfg, "absorption", tag), ["delta_D_MHz", "delta_p_MHz", "im_chi"], rows,
              _base_meta(cfg))


def pump_config(cfg, omega_c, dc, width, pump_rabi_gamma=0.0, delta_pump_mhz=0.0):
    p = cfg.values["pumping"]
    return PumpConfig(control_rabi=omega_c, delta_c=mhz(dc),
                      repump_rabi=p["repump_rabi_gamma"] * CS133.gamma,
                      delta_repump=mhz(p["delta_repump_mhz"]),
                      counter_propagating=p["counter_propagating"],
                      pump_rabi=pump_rabi_gamma * CS133.gamma, delta_pump=mhz(delta_pump_mhz),
                      tau_d=p["tau_d_us"] * 1e-6, doppler_width=width, ground_frame=p["ground_frame"])


def pumped_curve(cfg, pc, scheme, model, center, workers=1):
    """Transmittance with the |g> population of a pumping steady state as velocity weights."""
    p, run = cfg.values["pumping"], cfg.values["run"]
    W = pc.doppler_width
    grid = np.linspace(-p["grid_span"] * W, p["grid_span"] * W, p["grid_nodes"])
    pd = modified_distribution(pc, grid, workers=workers)
    dp = _probe(cfg, center)
    x = average_chi(scheme, pd.distribution, dp, model, n0=run["n0_cm3"], workers=workers)
    return pd, transmittance(dp, x, length=run["length_cm"])


def cmd_pump(cfg, outdir=None, workers=1):
    """Pump-modified velocity distributions, transmittance and contrast enhancement."""
    out = _outdir(cfg, outdir)
    run, p = cfg.values["run"], cfg.values["pumping"]
    report = []
    for model, (wk, wv, width), (ck, cv, omega_c), dc in itertools.product(
            run["model"], _doppler_widths(cfg), _control_rabis(cfg), run["delta_c_mhz"]):
        scheme = _scheme(cfg, omega_c, mhz(dc))
        center = _center(scheme, model)
        base_tag = [("model", model), (wk, wv), (ck, cv), ("dc", dc)]
        meta = _base_meta(cfg)
        meta.update({"model": model, "doppler_width_MHz": to_mhz(width), ck: cv, "delta_c_MHz": dc,
                     "repump_rabi_gamma": p["repump_rabi_gamma"], "tau_d_us": p["tau_d_us"],
                     "eit_position_MHz": to_mhz(center), "distribution": "raw rho_gg (not renormalized)"})
        # no fields at all: unpolarized f0/16, the reference of the pumping model
        ref_cfg = pump_config(cfg, omega_c, dc, width).fields_off()
        ref_pd, ref_curve = pumped_curve(cfg, ref_cfg, scheme, model, center, workers)
        off_pd, off_curve = pumped_curve(cfg, pump_config(cfg, omega_c, dc, width), scheme, model, center, workers)
        c_ref, c_off = _contrast(cfg, ref_curve, center), _contrast(cfg, off_curve, center)
        tag = _tag(base_tag)
        ref_pd.to_csv(out / _name(cfg, "distribution_unpumped", tag), meta)
        ref_curve.to_csv(out / _name(cfg, "transmittance_unpumped", tag), dict(meta, contrast=c_ref))
        off_pd.to_csv(out / _name(cfg, "distribution_nopump", tag), meta)
        off_curve.to_csv(out / _name(cfg, "transmittance_nopump", tag), dict(meta, contrast=c_off))
        log.info("%s: contrast unpumped %.4g, control+repump %.4g", tag, c_ref, c_off)
        row = (model, to_mhz(width), to_mhz(omega_c), dc)
        report.append(row + (0.0, math.nan, c_ref, c_off, math.nan, math.nan))
        for om_p, d_p in itertools.product(p["pump_rabi_gamma"], p["delta_pump_mhz"]):
            if om_p == 0:
                continue
            pc = pump_config(cfg, omega_c, dc, width, om_p, d_p)
            pd, curve = pumped_curve(cfg, pc, scheme, model, center, workers)
            c = _contrast(cfg, curve, center)
            ratio = c / c_off if c_off and math.isfinite(c_off) and c_off > 0 else math.nan
            ptag = _tag(base_tag + [("pumprabi", om_p), ("dpump", d_p)])
            m2 = dict(meta, pump_rabi_gamma=om_p, delta_pump_MHz=d_p, contrast=c, contrast_ratio=ratio)
            pd.to_csv(out / _name(cfg, "distribution_pump", ptag), m2)
            curve.to_csv(out / _name(cfg, "transmittance_pump", ptag), m2)
            log.info("%s: contrast %.4g, ratio to no pump %.3g", ptag, c, ratio)
            report.append(row + (om_p, d_p, c_ref, c_off, c, ratio))
    write_csv(out / _name(cfg, "pump_report", ""),
              ["model", "doppler_width_MHz", "control_rabi_MHz", "delta_c_MHz", "pump_rabi_gamma",
               "delta_pump_MHz", "contrast_unpumped", "contrast_nopump", "contrast_pump", "contrast_ratio"],
              report, _base_meta(cfg))
    return report


def cmd_validate(cfg, outdir=None, workers=1):
    """Parse and check a configuration, print the resolved keys and its hash."""
    for sec, keys in cfg.values.items():
        for k, v in keys.items():
            print(f"{sec}.{k} = {v}")
    print(f"config_hash = {cfg.digest()}")
    return None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "resonances": cmd_resonances,
    "pump": cmd_pump,
    "validate-config": cmd_validate,
}


def _workers(arg):
    if arg is not None:
        return arg
    env = os.environ.get("EITSIM_WORKERS", "").strip()
    if not env:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"EITSIM_WORKERS must be an integer, got {env!r}") from None
    if n < 1:
        raise ConfigError("EITSIM_WORKERS must be at least 1")
    return n


def build_parser():
    ap = argparse.ArgumentParser(prog="eitsim", description="EIT spectra of Doppler-broadened Cs vapour")
    ap.add_argument("--version", action="version", version=f"eitsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else None)
        sp.add_argument("config", help="INI configuration file")
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config key (repeatable)")
        sp.add_argument("-o", "--output", help="output directory (overrides output.directory)")
        sp.add_argument("-j", "--workers", type=int, help="worker threads (default: $EITSIM_WORKERS or 1)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        workers = _workers(args.workers)
        cfg = load_config(args.config, args.overrides)
        COMMANDS[args.command](cfg, args.output, workers)
    except (ConfigError, DomainError) as exc:
        print(f"eitsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EITError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"eitsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
