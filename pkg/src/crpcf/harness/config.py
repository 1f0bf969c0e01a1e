"""Flat ``key = value`` configuration files.

Lines starting with ``#`` (and trailing ``# ...`` comments) are ignored.
"""

from __future__ import annotations

import math

from ..core import InvalidParameter, ProtocolParams, PuTrafficModel
from ..sim import Protocol, SimConfig

# config key -> (target, field name, kind)
PARAM_KEYS = {
    "beacon_bytes": ("params", "beacon_len", float),
    "poll_bytes": ("params", "poll_len", float),
    "payload_bytes": ("params", "payload_len", float),
    "header_bytes": ("params", "header_len", float),
    "sifs_us": ("params", "sifs", float),
    "delta_us": ("params", "prop_delay", float),
    "tau_sense_us": ("params", "tau_sense", float),
    "tau_switch_us": ("params", "tau_switch", float),
    "rate_mbps": ("params", "rate", float),
    "num_sm": ("params", "num_sm", int),
    "packets_per_sm": ("params", "packets_per_sm", int),
    "num_channels": ("params", "num_supp_channels", int),
    "z_on_us": ("pu", "z_on", float),
    "z_off_us": ("pu", "z_off", float),
    "seed": (None, "seed", int),
    "protocol": (None, "protocol", str),
}
SWEEP_KEYS = ("sweep_variable", "sweep_values", "num_seeds")
FIELD_TO_KEY = {fieldname: key for key, (_, fieldname, _) in PARAM_KEYS.items()}


class ConfigError(ValueError):
    def __init__(self, message: str, keys=()):
        super().__init__(message)
        self.keys = tuple(keys)


def _tokenize(text: str) -> dict[str, str]:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", [key])
        entries[key] = value
    return entries


def _number(key, value, kind):
    try:
        if kind is int:
            num = float(value)
            if not num.is_integer():
                raise ValueError
            return int(num)
        num = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected {'an integer' if kind is int else 'a number'}, got {value!r}", [key])
    if math.isnan(num):
        raise ConfigError(f"{key}: expected a number, got {value!r}", [key])
    return num


def parse_config(text: str):
    """Parse config text into a :class:`SimConfig`, or a ``SweepSpec`` if it has a sweep block."""
    entries = _tokenize(text)
    unknown = sorted(set(entries) - set(PARAM_KEYS) - set(SWEEP_KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}", unknown)
    missing = [k for k in PARAM_KEYS if k not in entries]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", missing)

    groups = {"params": {}, "pu": {}, None: {}}
    for key, (target, fieldname, kind) in PARAM_KEYS.items():
        value = entries[key]
        if kind is str:
            groups[target][fieldname] = value.lower()
        else:
            groups[target][fieldname] = _number(key, value, kind)

    try:
        params = ProtocolParams(**groups["params"])
    except InvalidParameter as exc:
        key = FIELD_TO_KEY.get(exc.field, exc.field)
        raise ConfigError(f"{key}: {str(exc).split(': ', 1)[1]}", [key]) from exc
    try:
        pu = PuTrafficModel(**groups["pu"])
    except InvalidParameter as exc:
        key = FIELD_TO_KEY.get(exc.field, exc.field)
        raise ConfigError(f"{key}: {str(exc).split(': ', 1)[1]}", [key]) from exc
    try:
        protocol = Protocol(groups[None]["protocol"])
    except ValueError:
        raise ConfigError(f"protocol: expected 'pcf' or 'crpcf', got {entries['protocol']!r}", ["protocol"])
    try:
        config = SimConfig(params, pu, groups[None]["seed"], protocol)
    except ValueError as exc:
        raise ConfigError(f"seed: {exc}", ["seed"]) from exc

    present = [k for k in SWEEP_KEYS if k in entries]
    if not present:
        return config
    if "sweep_variable" not in entries or "sweep_values" not in entries:
        missing = [k for k in ("sweep_variable", "sweep_values") if k not in entries]
        raise ConfigError(f"incomplete sweep block, missing: {', '.join(missing)}", missing)

    from .sweep import SweepSpec

    variable = entries["sweep_variable"]
    values = []
    for tok in entries["sweep_values"].replace(",", " ").split():
        values.append(_number("sweep_values", tok, float))
    num_seeds = _number("num_seeds", entries["num_seeds"], int) if "num_seeds" in entries else 20
    try:
        return SweepSpec(variable, values, config, num_seeds)
    except ValueError as exc:
        raise ConfigError(str(exc), [getattr(exc, "key", "sweep_values")]) from exc


def _fmt(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def format_config(config: SimConfig, sweep=None) -> str:
    """Inverse of :func:`parse_config`."""
    lines = []
    for key, (target, fieldname, _) in PARAM_KEYS.items():
        source = {"params": config.params, "pu": config.pu, None: config}[target]
        value = getattr(source, fieldname)
        lines.append(f"{key} = {value.value if key == 'protocol' else _fmt(value)}")
    if sweep is not None:
        lines.append(f"sweep_variable = {sweep.variable}")
        lines.append("sweep_values = " + ", ".join(_fmt(v) for v in sweep.values))
        lines.append(f"num_seeds = {sweep.num_seeds}")
    return "\n".join(lines) + "\n"


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
