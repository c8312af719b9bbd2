"""Strict YAML run configurations.

Each subcommand accepts one mapping. Unknown keys fail immediately with the
offending dotted key path. Reduced-unit numbers may be written with ``pi``,
e.g. ``horizon: 4000*pi`` or ``u0: 2*pi*0.25``.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .analysis import Tolerances
from .integrator import IntegratorConfig


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    raise ValueError("unsupported expression")


def parse_number(value: Any, key: str = "value") -> float:
    """Number or arithmetic expression in ``pi`` (``"2*pi*0.25"``, ``"4pi"``)."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        # allow "4pi" shorthand
        text = "".join(f"{ch}*" if ch.isdigit() and text[i + 1:i + 3] == "pi" else ch
                       for i, ch in enumerate(text))
        try:
            result = _eval(ast.parse(text, mode="eval"))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError):
            raise ConfigError(f"{key}: cannot parse {value!r} as a number") from None
        if not math.isfinite(result):
            raise ConfigError(f"{key}: {value!r} is not finite")
        return result
    raise ConfigError(f"{key}: expected a number, got {value!r}")


def parse_range(value: Any, key: str) -> tuple[float, float, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{key}: expected [min, max, count]")
    lo = parse_number(value[0], key)
    hi = parse_number(value[1], key)
    count = value[2]
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ConfigError(f"{key}: count must be a positive integer, got {count!r}")
    return lo, hi, count


def parse_pair(value: Any, key: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{key}: expected [low, high]")
    return parse_number(value[0], key), parse_number(value[1], key)


def check_keys(block: Any, allowed: set[str], where: str) -> dict:
    if block is None:
        return {}
    if not isinstance(block, dict):
        raise ConfigError(f"{where or 'config'}: expected a mapping")
    for key in block:
        if key not in allowed:
            dotted = f"{where}.{key}" if where else str(key)
            raise ConfigError(f"unknown config key: {dotted}")
    return block


INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "max_step", "sample_interval"}
TOLERANCE_KEYS = {"eps_lock", "eps_zero", "eps_conv", "discard_fraction", "horizon"}
OUTPUT_KEYS = {"dir", "formats"}
COMMON_KEYS = {"integrator", "tolerances", "output", "workers"}

COMMAND_KEYS = {
    "simulate": {"point", "symmetric", "device", "preset", "u0", "x0_over_lambda", "horizon"},
    "sweep": {"phi1", "nu", "grip_offset", "u0", "boundary"},
    "cut": {"phi1", "phi2", "nu", "u0", "refine_II0"},
    "boundary": {"grip_offset", "u0", "rows"},
    "estimate": {"device", "preset", "V_R"},
}
NESTED_KEYS = {
    "point": {"phi1", "phi2", "nu"},
    "symmetric": {"grip"},
}
FORMATS = ("csv", "json", "svg")


def integrator_config(block: Any) -> IntegratorConfig:
    block = check_keys(block, INTEGRATOR_KEYS, "integrator")
    defaults = IntegratorConfig()
    values = {k: parse_number(block.get(k, getattr(defaults, k)), f"integrator.{k}")
              for k in INTEGRATOR_KEYS}
    try:
        return IntegratorConfig(**values)
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from None


def tolerances(block: Any, integrator: IntegratorConfig) -> Tolerances:
    block = check_keys(block, TOLERANCE_KEYS, "tolerances")
    defaults = Tolerances()
    values = {k: parse_number(block.get(k, getattr(defaults, k)), f"tolerances.{k}")
              for k in TOLERANCE_KEYS}
    try:
        return Tolerances(integrator=integrator, **values)
    except ValueError as exc:
        raise ConfigError(f"tolerances: {exc}") from None


@dataclass
class RunConfig:
    command: str
    params: dict
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    out_dir: Path = Path(".")
    formats: tuple[str, ...] = FORMATS
    workers: int | None = None


def parse_formats(value: Any, key: str = "formats") -> tuple[str, ...]:
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: expected a list drawn from {', '.join(FORMATS)}")
    for v in value:
        if v not in FORMATS:
            raise ConfigError(f"{key}: unknown format {v!r}")
    return tuple(f for f in FORMATS if f in value)


def build(command: str, data: Any) -> RunConfig:
    """Validate a raw mapping for ``command``."""
    if command not in COMMAND_KEYS:
        raise ConfigError(f"unknown command {command!r}")
    data = check_keys(data, COMMAND_KEYS[command] | COMMON_KEYS, "")
    for key, allowed in NESTED_KEYS.items():
        if key in data:
            check_keys(data[key], allowed, key)
    integrator = integrator_config(data.get("integrator"))
    tol = tolerances(data.get("tolerances"), integrator)
    output = check_keys(data.get("output"), OUTPUT_KEYS, "output")
    formats = parse_formats(output["formats"], "output.formats") if "formats" in output \
        else FORMATS
    workers = data.get("workers")
    if workers is not None and (isinstance(workers, bool) or not isinstance(workers, int)
                                or workers < 1):
        raise ConfigError(f"workers: expected a positive integer, got {workers!r}")
    params = {k: v for k, v in data.items() if k not in COMMON_KEYS}
    return RunConfig(command, params, integrator, tol, Path(output.get("dir", ".")),
                     formats, workers)


def load(command: str, path: Path | None) -> RunConfig:
    if path is None:
        return build(command, {})
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return build(command, data)
