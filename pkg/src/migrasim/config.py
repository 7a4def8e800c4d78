"""JSON scenario configuration: parsing, defaults, serialization, sweep grids.

Schema (version 1). Only ``n_workers``, ``seed`` and ``horizon_months`` are
required; everything else falls back to :data:`DEFAULTS`. ``econ.N_total`` is
not a config key: it always equals ``n_workers``.

A ``sweep`` section maps dotted parameter paths (``"dynamics.a"``,
``"econ.r_u"``, ``"sparse_factor"``, ``"seed"``...) to lists of values.
"""

from __future__ import annotations

import copy
import dataclasses
import itertools
import json
from importlib import resources

import numpy as np

from ._validation import ParameterError
from .dynamics import DynamicsParams
from .econ import EconParams
from .engine import ConfigError, ScenarioConfig
from .migration import MigrationParams

SCHEMA_VERSION = 1

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "sparse_factor": 0.09,
    "weight_upper": 0.1,
    "initial_urban_fraction": 0.2,
    "hukou_initial_urban": False,
    "x0_magnitude": 1.0,
    "x0_jitter": 0.0,
    "dt_days": 0.25,
    "zero_tol": 1e-9,
    "blowup_bound": 1e12,
    "clamp_on_blowup": True,
    "econ": {
        f.name: f.default for f in dataclasses.fields(EconParams) if f.name != "N_total"
    },
    "dynamics": {"a": 0.0008, "f": 0.001, "input_gain": 0.02},
    "migration": {"beta": 3.0, "review_period_days": 30.0},
    "sweep": {},
}

REQUIRED = ("n_workers", "seed", "horizon_months")

_INT_KEYS = {"n_workers", "seed", "horizon_months", "schema_version"}
_BOOL_KEYS = {"hukou_initial_urban", "clamp_on_blowup"}
_SECTIONS = ("econ", "dynamics", "migration")


class ConfigParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


def _check_type(path, value):
    """Type-check one value; real-valued keys come back as ``float``."""
    key = path.rsplit(".", 1)[-1]
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(path, f"must be true or false, got {value!r}")
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"must be an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"must be a number, got {value!r}")
    return float(value)


def _merge(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = sorted(set(raw) - set(DEFAULTS) - set(REQUIRED))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(key, "required key is missing")

    merged = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(key, "must be a JSON object")
            bad = sorted(set(value) - set(DEFAULTS[key]))
            if bad:
                raise ConfigError(f"{key}.{bad[0]}", "unknown key")
            for sub, subval in value.items():
                merged[key][sub] = _check_type(f"{key}.{sub}", subval)
        elif key == "sweep":
            merged[key] = _check_sweep(value)
        else:
            merged[key] = _check_type(key, value)
    if merged["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            "schema_version", f"unsupported version {merged['schema_version']!r}, expected 1"
        )
    return merged


def _sweepable_paths():
    paths = {k for k in DEFAULTS if k not in _SECTIONS and k not in ("sweep", "schema_version")}
    paths |= set(REQUIRED)
    for sec in _SECTIONS:
        paths |= {f"{sec}.{k}" for k in DEFAULTS[sec]}
    return paths


def _check_sweep(sweep):
    if not isinstance(sweep, dict):
        raise ConfigError("sweep", "must be a JSON object of parameter -> list of values")
    allowed = _sweepable_paths()
    checked = {}
    for path, values in sweep.items():
        if path not in allowed:
            raise ConfigError(f"sweep.{path}", "unknown parameter")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep.{path}", "must be a non-empty list")
        checked[path] = [_check_type(path, v) for v in values]
    return checked


def from_dict(raw: dict) -> ScenarioConfig:
    """Validate a raw mapping and build the scenario."""
    d = _merge(raw)
    try:
        econ = EconParams(**d["econ"], N_total=float(d["n_workers"]))
    except ParameterError as exc:
        raise ConfigError(f"econ.{exc.field}", str(exc)) from None
    try:
        dynamics = DynamicsParams(**d["dynamics"])
    except ParameterError as exc:
        raise ConfigError(f"dynamics.{exc.field}", str(exc)) from None
    try:
        migration = MigrationParams(**d["migration"])
    except ParameterError as exc:
        raise ConfigError(f"migration.{exc.field}", str(exc)) from None
    top = {k: v for k, v in d.items() if k not in _SECTIONS and k != "schema_version"}
    return ScenarioConfig(econ=econ, dynamics=dynamics, migration=migration, **top)


def parse_config(text) -> ScenarioConfig:
    """Parse UTF-8 JSON text (``str`` or ``bytes``) into a validated scenario."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigParseError(f"config is not valid UTF-8: {exc.reason}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return from_dict(raw)


def to_dict(cfg: ScenarioConfig) -> dict:
    econ = dataclasses.asdict(cfg.econ)
    del econ["N_total"]
    out = {"schema_version": SCHEMA_VERSION}
    for f in dataclasses.fields(ScenarioConfig):
        if f.name in _SECTIONS:
            continue
        out[f.name] = getattr(cfg, f.name)
    out["econ"] = econ
    out["dynamics"] = dataclasses.asdict(cfg.dynamics)
    out["migration"] = dataclasses.asdict(cfg.migration)
    out["sweep"] = copy.deepcopy(cfg.sweep)
    return out


def dumps_config(cfg: ScenarioConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2) + "\n"


def load_config(path) -> ScenarioConfig:
    with open(path, "rb") as fh:
        return parse_config(fh.read())


def shipped_config(name: str) -> ScenarioConfig:
    """One of the bundled scenarios: ``instance1``, ``instance2``, ``instance2_hukou``."""
    ref = resources.files("migrasim") / "scenarios" / f"{name}.json"
    return parse_config(ref.read_bytes())


def shipped_config_path(name: str) -> str:
    return str(resources.files("migrasim") / "scenarios" / f"{name}.json")


def cell_seed(base_seed: int, cell_index: int) -> int:
    """Seed of sweep cell ``cell_index``: both integers hashed through
    ``numpy.random.SeedSequence`` into one unsigned 64-bit word."""
    state = np.random.SeedSequence([base_seed, cell_index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def with_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    d = to_dict(cfg)
    for path, value in overrides.items():
        if "." in path:
            sec, key = path.split(".", 1)
            d[sec][key] = value
        else:
            d[path] = value
    return from_dict(d)


def expand_sweep(cfg: ScenarioConfig) -> list[tuple[dict, ScenarioConfig]]:
    """Cross product of the sweep grid, keys in sorted order, last key fastest.

    Each cell gets ``cell_seed(cfg.seed, index)`` unless ``seed`` itself is
    swept. A config without a sweep section expands to itself.
    """
    grid = cfg.sweep
    keys = sorted(grid)
    cells = []
    for index, combo in enumerate(itertools.product(*(grid[k] for k in keys))):
        overrides = dict(zip(keys, combo))
        overrides.setdefault("seed", cell_seed(cfg.seed, index))
        cells.append((overrides, with_overrides(cfg, {**overrides, "sweep": {}})))
    return cells
