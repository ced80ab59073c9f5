"""Run configuration: flat ``key = value`` files with optional per-command sections.

Keys before any section header apply to every command; keys under
``[solve]``, ``[simulate]`` etc. override them for that command only.
Comments start with ``#``.  Every value is checked when read, so errors
carry the line that introduced them.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .problem import REGISTRY
from .spectral import Convention

COMMANDS = ("check", "solve", "simulate", "compare", "manufacture")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending line when known."""


@dataclass
class RunConfig:
    problem: str = "example51"
    omega: float = 1.0
    tau: Optional[float] = None
    xi: Optional[float] = None
    alpha: float = 0.5
    modes: int = 64
    time_grid: int = 256
    space_grid: int = 257
    a0: Optional[float] = None
    a1: Optional[float] = None
    K: Optional[float] = None
    L: Optional[float] = None
    L1: Optional[float] = None
    L2: Optional[float] = None
    mu1: float = 1.0
    mu2: float = 1.0
    gamma: Optional[float] = None
    undeclared: str = ""
    lipschitz: bool = True
    convention: str = "eigen"
    interpolation: str = "quintic"
    strict_delays: bool = False
    recipe: str = "1:0.5:0.25:0"
    g_scale: Optional[float] = None
    tol: float = 1e-10
    max_iter: int = 100
    damping: float = 1.0
    initial: str = "zero"
    seed: int = 0
    horizon: float = 5.0
    dt: Optional[float] = None
    history: str = "zero"
    stride: int = 8
    threshold: float = 1e-4
    solution: Optional[str] = None
    out: str = "out"

    def to_text(self) -> str:
        """The config in file form; reading it back gives an equal config."""
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in dataclasses.fields(self)]


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


# constants that may be marked as not known for a problem
DECLARABLE = ("a0", "a1", "K", "L", "L1", "L2", "gamma")

_NONNEG = {"tau", "xi", "a0", "a1", "K", "L", "L1", "L2", "gamma", "threshold"}
_POSITIVE = {"omega", "tol", "horizon", "dt"}
_COUNTS = {"modes", "time_grid", "space_grid", "max_iter", "stride"}
_CHOICES = {
    "convention": tuple(c.value for c in Convention),
    "interpolation": ("linear", "cubic", "quintic"),
    "initial": ("zero", "random"),
    "history": ("zero", "first_mode", "periodic"),
    "problem": tuple(sorted(REGISTRY)),
}


def _field_types() -> dict:
    hints = {}
    for f in dataclasses.fields(RunConfig):
        t = str(f.type)
        if "bool" in t:
            hints[f.name] = _parse_bool
        elif "int" in t:
            hints[f.name] = int
        elif "float" in t:
            hints[f.name] = float
        else:
            hints[f.name] = str
    return hints


_TYPES = _field_types()


def convert(key: str, raw) -> object:
    """Parse and range-check one value; raises ValueError with a plain message."""
    if key not in _TYPES:
        raise KeyError(key)
    value = _TYPES[key](raw) if isinstance(raw, str) else raw
    if key in _NONNEG and value < 0:
        raise ValueError(f"{key} must be non-negative, got {value}")
    if key in _POSITIVE and not value > 0:
        raise ValueError(f"{key} must be positive, got {value}")
    if key in _COUNTS and value < 1:
        raise ValueError(f"{key} must be at least 1, got {value}")
    if key == "space_grid" and value < 2:
        raise ValueError(f"space_grid must be at least 2, got {value}")
    if key == "alpha" and not 0.0 <= value < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {value}")
    if key in ("mu1", "mu2") and not 0.0 < value <= 1.0:
        raise ValueError(f"{key} must lie in (0, 1], got {value}")
    if key == "damping" and not 0.0 < value <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {value}")
    if key == "undeclared":
        names = [n.strip() for n in value.split(",") if n.strip()]
        bad = [n for n in names if n not in DECLARABLE]
        if bad:
            raise ValueError(f"undeclared accepts {', '.join(DECLARABLE)}; got {', '.join(bad)}")
        value = ",".join(names)
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ValueError(f"{key} must be one of {', '.join(_CHOICES[key])}, got {value!r}")
    return value


def parse_text(text: str, command: str, source: str = "<config>") -> tuple[dict, dict]:
    """Values for ``command`` and the line each one came from."""
    values, lines = {}, {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}:{number}"
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"{where}: malformed section header {stripped!r}")
            section = stripped[1:-1].strip()
            if section not in COMMANDS:
                raise ConfigError(f"{where}: unknown section [{section}]; "
                                  f"expected one of {', '.join(COMMANDS)}")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value', got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        try:
            value = convert(key, raw)
        except KeyError:
            raise ConfigError(f"{where}: unknown key {key!r}") from None
        except ValueError as err:
            raise ConfigError(f"{where}: {err}") from None
        if section is None or section == command:
            # section values beat top-level ones regardless of order
            if section is None and lines.get(key, ("", False))[1]:
                continue
            values[key] = value
            lines[key] = (where, section is not None)
    return values, {k: v[0] for k, v in lines.items()}


def load(path, command: str, overrides: Optional[dict] = None) -> tuple[RunConfig, dict]:
    """RunConfig from an optional file plus command-line overrides."""
    values, origins = {}, {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err.strerror}") from None
        values, origins = parse_text(text, command, str(path))
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        try:
            values[key] = convert(key, raw)
        except ValueError as err:
            raise ConfigError(f"--{key.replace('_', '-')}: {err}") from None
        origins[key] = f"--{key.replace('_', '-')}"
    return RunConfig(**values), origins
