"""Flat key-value run configuration.

Files hold `key = value` lines (# comments and blank lines allowed); the
same dotted keys are accepted from `--set key=value` overrides.  Unknown
keys are fatal.  A resolved configuration can be written back out as a
manifest in exactly the same format, so every run directory contains a
file that reproduces the run.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Any

from .presets import PRESET_NAMES, Preset, make_preset


class ConfigError(Exception):
    """Invalid configuration; the CLI maps this to exit code 2."""


def _parse_float(text: str) -> float:
    # accept plain floats and fractions like "1/128"
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _parse_floats(text: str, count: int | None = None) -> tuple[float, ...]:
    if not text.strip():
        return ()
    vals = tuple(_parse_float(p) for p in text.split(","))
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_grid_n(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) == 1:
        return _parse_int(parts[0])
    if len(parts) == 3:
        return tuple(_parse_int(p) for p in parts)
    raise ConfigError(f"grid.n takes one or three integers, got {text!r}")


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        if text not in choices:
            raise ConfigError(f"expected one of {choices}, got {text!r}")
        return text

    return parse


def _parse_chi(text: str) -> tuple[complex, ...]:
    vals = _parse_floats(text)
    if len(vals) == 4:
        return tuple(complex(v) for v in vals)
    if len(vals) == 8:
        return tuple(complex(vals[2 * k], vals[2 * k + 1]) for k in range(4))
    raise ConfigError(
        "preset.chi takes 4 real or 8 (re,im interleaved) numbers, "
        f"got {len(vals)}"
    )


# key -> parser; this is the full public configuration surface
_SCHEMA = {
    "solver.kind": _parse_choice("md", "wkb", "sp"),
    "preset.name": _parse_choice(*PRESET_NAMES),
    "preset.chi": _parse_chi,
    "preset.center": lambda t: _parse_floats(t, 3),
    "preset.width": _parse_float,
    "grid.n": _parse_grid_n,
    "md.epsilon": _parse_float,
    "md.delta": _parse_float,
    "md.splitting": _parse_choice("strang", "first_order"),
    "md.dealias": _parse_bool,
    "init.v0": _parse_choice("zero", "poisson"),
    "init.a0": _parse_choice("zero", "poisson"),
    "time.dt": _parse_float,
    "time.t_final": _parse_float,
    "wkb.caustic_threshold": _parse_float,
    "output.dir": str,
    "output.dump_times": _parse_floats,
    "output.stride": _parse_int,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse `key = value` lines into a raw string map (values unparsed)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def load_config(path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), source=str(path))


def apply_overrides(raw: dict[str, str], sets: list[str]) -> dict[str, str]:
    out = dict(raw)
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set takes key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r} in --set")
        out[key] = value.strip()
    return out


def parse_values(raw: dict[str, str]) -> dict[str, Any]:
    return {key: _SCHEMA[key](val) for key, val in raw.items()}


def build_preset(values: dict[str, Any]) -> tuple[Preset, str, dict[str, Any]]:
    """Resolve a value map into (preset, solver kind, run options)."""
    name = values.get("preset.name", "custom")
    try:
        preset = make_preset(
            name,
            n=values.get("grid.n"),
            dt=values.get("time.dt"),
            t_final=values.get("time.t_final"),
            epsilon=values.get("md.epsilon"),
            delta=values.get("md.delta"),
            splitting=values.get("md.splitting"),
            dealias=values.get("md.dealias"),
            caustic_threshold=values.get("wkb.caustic_threshold"),
            chi=values.get("preset.chi"),
            center=values.get("preset.center"),
            width=values.get("preset.width"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "init.v0" in values:
        preset.v0 = values["init.v0"]
    if "init.a0" in values:
        preset.a0 = values["init.a0"]
    solver = values.get("solver.kind", preset.solver)
    if solver == "wkb" and preset.wkb0 is None:
        raise ConfigError(f"preset {name!r} has no WKB initial data")
    options = {
        "output.dir": values.get("output.dir", "out"),
        "output.dump_times": values.get("output.dump_times", ()),
        "output.stride": values.get("output.stride", 1),
    }
    if options["output.stride"] < 1:
        raise ConfigError("output.stride must be >= 1")
    return preset, solver, options


def manifest_text(preset: Preset, solver: str, options: dict[str, Any]) -> str:
    """Fully-resolved configuration, reloadable as a config file."""
    cfg = preset.cfg
    n = cfg.grid.n
    grid_n = str(n[0]) if n[0] == n[1] == n[2] else ",".join(str(m) for m in n)
    chi = ",".join(
        f"{complex(c).real!r},{complex(c).imag!r}" for c in preset.chi
    )
    lines = [
        "# resolved run configuration",
        f"solver.kind = {solver}",
        f"preset.name = {preset.name}",
        f"preset.chi = {chi}",
        f"preset.center = {','.join(repr(float(c)) for c in preset.center)}",
        f"preset.width = {preset.width!r}",
        f"grid.n = {grid_n}",
        f"md.epsilon = {cfg.epsilon!r}",
        f"md.delta = {cfg.delta!r}",
        f"md.splitting = {cfg.splitting}",
        f"md.dealias = {str(cfg.dealias).lower()}",
        f"init.v0 = {preset.v0}",
        f"init.a0 = {preset.a0}",
        f"time.dt = {cfg.dt!r}",
        f"time.t_final = {cfg.t_final!r}",
        f"wkb.caustic_threshold = {cfg.caustic_threshold!r}",
        f"output.dir = {options['output.dir']}",
        f"output.dump_times = {','.join(repr(t) for t in options['output.dump_times'])}",
        f"output.stride = {options['output.stride']}",
    ]
    return "\n".join(lines) + "\n"
