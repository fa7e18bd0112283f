"""Run configuration: per-command schemas, JSON loading and validation."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError

COMMANDS = ("curv", "bounds", "solve", "foliate", "kp", "verify")
FORMATS = ("csv", "json")
MODES = ("FuchsianConstant", "RotSymProfile", "Disk2D")
REQUIRED = object()

# key -> (accepted types, default); REQUIRED marks mandatory keys
SCHEMAS: dict[str, dict[str, tuple]] = {
    "curv": {
        "matrix": ((str, list), REQUIRED),
        "theta": ((float, int), REQUIRED),
        "mode": ((str,), "r"),
        "r": ((float, int, type(None)), None),
    },
    "bounds": {
        "n": ((int,), REQUIRED),
        "theta": ((float, int), REQUIRED),
        "r": ((float, int), REQUIRED),
    },
    "solve": {
        "theta": ((float, int), REQUIRED),
        "r": ((float, int), REQUIRED),
        "n": ((int,), 2),
        "mode": ((str,), "Disk2D"),
        "method": ((str,), "newton"),
        "h": ((float, int), 1.0 / 64),
        "rings": ((int,), 64),
        "angles": ((int,), 64),
        "boundary": ((float, int, type(None)), None),
        "ripple": ((float, int), 0.05),
        "newton_tol": ((float, int), 1e-9),
        "max_iter": ((int,), 50),
        "damping": ((float, int), 1.0),
        "jacobian": ((str,), "exact"),
    },
    "foliate": {
        "theta": ((float, int), REQUIRED),
        "n": ((int,), 2),
        "mode": ((str,), "Disk2D"),
        "r_values": ((list, type(None)), None),
        "h": ((float, int), 1.0 / 64),
        "rings": ((int,), 64),
        "angles": ((int,), 64),
        "newton_tol": ((float, int), 1e-9),
    },
    "kp": {
        "domain": ((dict,), REQUIRED),
        "points": ((list,), REQUIRED),
        "random": ((int,), 256),
        "directions": ((int,), 16),
        "steps": ((int,), 32),
    },
    "verify": {},
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    seed: int = 0

    def digest(self) -> str:
        """sha256 of the canonical JSON of command, parameters and seed."""
        blob = json.dumps(
            {"command": self.command, "params": self.params, "seed": self.seed},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(blob.encode()).hexdigest()


def _check_type(key: str, value, types: tuple):
    if isinstance(value, bool) or not isinstance(value, types):
        names = "/".join("null" if t is type(None) else t.__name__ for t in types)
        raise ConfigurationError(f"field {key!r} must be {names}, got {type(value).__name__}")


def validate(command: str, params: dict, out=None, fmt: str = "csv", seed: int = 0) -> RunConfig:
    """Fill defaults, reject unknown keys and check types and simple ranges."""
    if command not in COMMANDS:
        raise ConfigurationError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if fmt not in FORMATS:
        raise ConfigurationError(f"format must be csv or json, got {fmt!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigurationError(f"seed must be a non-negative integer, got {seed!r}")
    schema = SCHEMAS[command]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise ConfigurationError(f"unknown field(s) for {command}: {', '.join(unknown)}")
    full = {}
    for key, (types, default) in schema.items():
        if key in params:
            _check_type(key, params[key], types)
            full[key] = params[key]
        elif default is REQUIRED:
            raise ConfigurationError(f"missing required field {key!r} for {command}")
        else:
            full[key] = default
    for key, value in full.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigurationError(f"field {key!r} must be finite")
    if "mode" in full and command in ("solve", "foliate") and full["mode"] not in MODES:
        raise ConfigurationError(f"mode must be one of {', '.join(MODES)}, got {full['mode']!r}")
    if command == "solve" and full["method"] not in ("newton", "perron"):
        raise ConfigurationError(f"method must be newton or perron, got {full['method']!r}")
    if command == "curv" and full["mode"] not in ("r", "sl", "arctan", "zeroth"):
        raise ConfigurationError(f"curv mode must be r, sl, arctan or zeroth, got {full['mode']!r}")
    return RunConfig(command, full, out, fmt, seed)


def load_config(path, command: str | None = None, overrides: dict | None = None, **run) -> RunConfig:
    """Read a JSON object from ``path`` and validate it.

    The file may carry "command", "out", "format" and "seed" next to the
    command parameters; ``overrides`` (e.g. from command-line flags) win.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    data = dict(data)
    file_cmd = data.pop("command", None)
    command = command or file_cmd
    if command is None:
        raise ConfigurationError("missing required field 'command'")
    if file_cmd is not None and file_cmd != command:
        raise ConfigurationError(f"config is for {file_cmd!r}, not {command!r}")
    out = run.get("out") or data.pop("out", None)
    fmt = run.get("format") or data.pop("format", "csv")
    seed = run.get("seed") if run.get("seed") is not None else data.pop("seed", 0)
    data.pop("out", None)
    data.pop("format", None)
    data.pop("seed", None)
    data.update(overrides or {})
    return validate(command, data, out, fmt, seed)
