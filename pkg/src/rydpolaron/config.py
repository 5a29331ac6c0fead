"""Flat ``key = value`` run configuration.

Physical keys carry their SI unit in the name. Lines starting with ``#`` are
comments. Model-level keys (``t_e``, ``g_p``, ...) override what the physical
mapping would give and are in units of hbar*omega_ph.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, PolaronError
from .params import C3_RB87_N80, ModelParams, PhysicalParams, sweet_spot_detuning

PHYSICAL_KEYS = {
    "alpha": float,
    "rabi_rad_s": float,
    "detuning_rad_s": float,
    "sweet_spot": "bool",
    "c3_J_m3": float,
    "c3_2pi_GHz_um3": float,
    "spacing_m": float,
    "mass_kg": float,
    "omega_ph_rad_s": float,
}
MODEL_KEYS = {
    "n_sites": int,
    "max_phonons": int,
    "eps_e": float,
    "t_e": float,
    "g_p": float,
    "g_b": float,
    "lambda": float,
}
SCAN_KEYS = {
    "seed": int,
    "tol": float,
    "lambda_grid": "floats",
    "lambda_min": float,
    "lambda_max": float,
    "lambda_steps": int,
    "rabi_grid_rad_s": "floats",
    "rabi_min_rad_s": float,
    "rabi_max_rad_s": float,
    "rabi_steps": int,
    "knob": str,
    "knob_lo": float,
    "knob_hi": float,
    "resolution": float,
    "n_list": "ints",
    "m_list": "ints",
    "threshold": float,
    "sector": int,
}
KNOWN_KEYS = {**PHYSICAL_KEYS, **MODEL_KEYS, **SCAN_KEYS}
REQUIRED_PHYSICAL = ("spacing_m", "mass_kg", "omega_ph_rad_s")


def _convert(key, raw):
    kind = KNOWN_KEYS[key]
    try:
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return [float(x) for x in raw.replace(",", " ").split()]
        if kind == "ints":
            return [int(x) for x in raw.replace(",", " ").split()]
        if kind is int:
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r}", key=key) from exc


def parse_text(text):
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        out[key] = raw
    return out


def resolve(raw):
    """Type-convert and validate a mapping of raw strings."""
    unknown = sorted(set(raw) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}", key=unknown[0])
    return {k: _convert(k, v) if isinstance(v, str) else v for k, v in raw.items()}


def load(path=None, overrides=()):
    raw = {}
    if path is not None:
        with open(path) as fh:
            raw.update(parse_text(fh.read()))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    return resolve(raw)


def has_physical(cfg):
    return any(k in cfg for k in PHYSICAL_KEYS)


def physical_params(cfg):
    for key in REQUIRED_PHYSICAL:
        if key not in cfg:
            raise ConfigError(f"missing required key {key}", key=key)
    if "c3_J_m3" in cfg and "c3_2pi_GHz_um3" in cfg:
        raise ConfigError("give only one of c3_J_m3, c3_2pi_GHz_um3", key="c3_J_m3")
    if "c3_J_m3" in cfg:
        c3 = cfg["c3_J_m3"]
    elif "c3_2pi_GHz_um3" in cfg:
        c3 = C3_RB87_N80 * cfg["c3_2pi_GHz_um3"] / 40.0
    else:
        c3 = C3_RB87_N80
    spacing = cfg["spacing_m"]
    if cfg.get("sweet_spot"):
        if "detuning_rad_s" in cfg:
            raise ConfigError("sweet_spot = true fixes the detuning", key="detuning_rad_s")
        detuning = sweet_spot_detuning(c3, spacing)
    elif "detuning_rad_s" in cfg:
        detuning = cfg["detuning_rad_s"]
    else:
        raise ConfigError("missing required key detuning_rad_s (or sweet_spot = true)", key="detuning_rad_s")
    if "alpha" in cfg:
        alpha = cfg["alpha"]
        rabi = cfg.get("rabi_rad_s")
    elif "rabi_rad_s" in cfg:
        rabi = cfg["rabi_rad_s"]
        alpha = rabi / detuning
    else:
        raise ConfigError("missing required key alpha (or rabi_rad_s)", key="alpha")
    try:
        return PhysicalParams(
            alpha=alpha,
            detuning=detuning,
            spacing=spacing,
            omega_ph=cfg["omega_ph_rad_s"],
            c3=c3,
            mass=cfg["mass_kg"],
            rabi=rabi,
        )
    except PolaronError as exc:
        raise ConfigError(str(exc)) from exc


def model_params(cfg):
    """ModelParams from the physical mapping, then model-level overrides."""
    for key in ("n_sites", "max_phonons"):
        if key not in cfg:
            raise ConfigError(f"missing required key {key}", key=key)
    if has_physical(cfg):
        base = ModelParams.from_physical(physical_params(cfg), cfg["n_sites"], cfg["max_phonons"])
        vals = dict(eps_e=base.eps_e, t_e=base.t_e, g_p=base.g_p, g_b=base.g_b)
    else:
        if "t_e" not in cfg:
            raise ConfigError("missing required key t_e (or physical parameters)", key="t_e")
        vals = dict(eps_e=0.0, t_e=cfg["t_e"], g_p=0.0, g_b=0.0)
    for key in ("eps_e", "t_e", "g_p", "g_b"):
        if key in cfg:
            vals[key] = cfg[key]
    if "lambda" in cfg:
        g = math.sqrt(cfg["lambda"] * abs(vals["t_e"]) / 3.0)
        vals["g_p"] = vals["g_b"] = g
    try:
        return ModelParams(n_sites=cfg["n_sites"], max_phonons=cfg["max_phonons"], **vals)
    except PolaronError as exc:
        raise ConfigError(str(exc)) from exc


def grid(cfg, name):
    """Explicit ``<name>_grid`` list or an evenly spaced min/max/steps range."""
    suffix = "_rad_s" if name == "rabi" else ""
    if f"{name}_grid{suffix}" in cfg:
        return list(cfg[f"{name}_grid{suffix}"])
    keys = [f"{name}_min{suffix}", f"{name}_max{suffix}", f"{name}_steps"]
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing required key {missing[0]}", key=missing[0])
    lo, hi, steps = (cfg[k] for k in keys)
    if steps < 1:
        raise ConfigError(f"{keys[2]} must be positive", key=keys[2])
    return np.linspace(lo, hi, steps).tolist()


def render(cfg):
    """Stable ``key = value`` lines for provenance headers."""
    lines = []
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, (list, tuple)):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{key} = {v}")
    return lines


@dataclass
class RunConfig:
    subcommand: str
    config_path: str = None
    out_dir: str = "."
    threads: int = None
    seed: int = 0
    overrides: list = field(default_factory=list)
