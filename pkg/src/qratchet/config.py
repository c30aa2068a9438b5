"""Run configuration: file + flag parsing, defaults and validation."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .analysis import BetaDistribution
from .params import HBAR_RANGE, K_RANGE, ParameterError, ResonanceOrder, ScaledParams
from .potential import Potential
from .sweep import Axis, ScanSpec

__all__ = ["COMMANDS", "ConfigError", "RunConfig", "parse_config", "load_config_text"]

COMMANDS = ("evolve", "classical", "portrait", "rate", "scan", "beta")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    command: str = "evolve"
    k_tilde: float = 3.0
    l_tilde: float = 1.0
    hbar_tilde: float = 1.0
    phi: float = math.pi / 2
    nu: int = 1
    mu: int = 1
    v_k: list | None = None
    v_l: list | None = None
    n0: int = 0
    beta: float = 0.0
    beta_sigma: float = 0.0
    nodes: int = 64
    basis_size: int = 4096
    max_basis: int = 65536
    check_every: int = 100
    steps: int = 2000
    window: list = field(default_factory=lambda: [1000, 2000])
    seed: int = 0
    ensemble_size: int = 100000
    stratified: bool = False
    mode: str = "quantum"
    axes: list = field(default_factory=list)
    sample_time: int | None = None
    n_init: int = 200
    n_iter: int = 500
    workers: int = 1
    output: str = "out.csv"
    distribution: str | None = None

    # -- derived objects -------------------------------------------------------
    def scaled_params(self) -> ScaledParams:
        return ScaledParams(self.k_tilde, self.l_tilde, self.hbar_tilde, self.phi,
                            ResonanceOrder(self.nu, self.mu))

    def potentials(self) -> tuple[Potential | None, Potential | None]:
        vk = Potential.from_triples(self.v_k) if self.v_k is not None else None
        vl = Potential.from_triples(self.v_l) if self.v_l is not None else None
        return vk, vl

    def beta_distribution(self) -> BetaDistribution:
        return BetaDistribution(self.beta, self.beta_sigma, self.nodes)

    def scan_spec(self) -> ScanSpec:
        vk, vl = self.potentials()
        axes = tuple(Axis(a["name"], float(a["min"]), float(a["max"]), int(a["points"]))
                     for a in self.axes)
        return ScanSpec(axes=axes, fixed=self.scaled_params(), mode=self.mode, steps=self.steps,
                        window=tuple(self.window), v_k=vk, v_l=vl, basis_size=self.basis_size,
                        max_basis=self.max_basis, ensemble_size=self.ensemble_size,
                        master_seed=self.seed, beta=self.beta_distribution(),
                        sample_time=self.sample_time)

    def to_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}


def _eval_number(text: str) -> float:
    """Evaluate a tiny arithmetic expression such as ``pi/2`` or ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(text)

    return float(ev(ast.parse(text.strip(), mode="eval")))


def _as_float(key, v):
    if isinstance(v, bool):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            v = _eval_number(v)
        except (ValueError, SyntaxError, ZeroDivisionError):
            raise ConfigError(key, f"expected a number, got {v!r}") from None
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {v!r}") from None
    if not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _as_int(key, v):
    if isinstance(v, bool):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if isinstance(v, str):
        try:
            v = int(v)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {v!r}") from None
    if not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    return v


def _coerce(key: str, value: Any) -> Any:
    kind = _FIELD_TYPES[key]
    if value is None and "None" in kind:
        return None
    if kind == "float":
        return _as_float(key, value)
    if kind.startswith("int"):
        return _as_int(key, value)
    if kind == "bool":
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0", "yes", "no"):
            return value.lower() in ("true", "1", "yes")
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false, got {value!r}")
        return value
    if kind.startswith("str"):
        return str(value)
    if kind.startswith("list"):
        if isinstance(value, str):
            value = yaml.safe_load(value)
        if isinstance(value, tuple):
            value = list(value)
        if not isinstance(value, list):
            raise ConfigError(key, f"expected a list, got {value!r}")
        return value
    return value  # pragma: no cover


def _in_range(key, v, lo, hi):
    if not lo <= v <= hi:
        raise ConfigError(key, f"{v!r} outside valid range [{lo}, {hi}]")


def _is_pow2(n):
    return n >= 2 and not n & (n - 1)


def _validate(c: RunConfig) -> None:
    if c.command not in COMMANDS:
        raise ConfigError("command", f"unknown command {c.command!r}; choose from {COMMANDS}")
    _in_range("k_tilde", c.k_tilde, *K_RANGE)
    _in_range("l_tilde", c.l_tilde, *K_RANGE)
    _in_range("hbar_tilde", c.hbar_tilde, *HBAR_RANGE)
    _in_range("phi", c.phi, -2 * math.pi, 2 * math.pi)
    for key in ("nu", "mu"):
        if getattr(c, key) < 1:
            raise ConfigError(key, "must be a positive integer")
    if math.gcd(c.nu, c.mu) != 1:
        raise ConfigError("mu", f"nu={c.nu} and mu={c.mu} must be coprime")
    for key in ("basis_size", "max_basis"):
        v = getattr(c, key)
        if not _is_pow2(v) or v > 2**22:
            raise ConfigError(key, f"{v} must be a power of two in [2, 2^22]")
    if c.max_basis < c.basis_size:
        raise ConfigError("max_basis", "must be >= basis_size")
    if not -(c.basis_size // 2) <= c.n0 < c.basis_size // 2:
        raise ConfigError("n0", f"{c.n0} outside basis [-{c.basis_size // 2}, {c.basis_size // 2})")
    if c.beta_sigma < 0:
        raise ConfigError("beta_sigma", "must be >= 0")
    for key, lo in (("nodes", 1), ("steps", 0), ("ensemble_size", 1), ("n_init", 1),
                    ("n_iter", 1), ("workers", 1), ("check_every", 1)):
        if getattr(c, key) < lo:
            raise ConfigError(key, f"must be >= {lo}")
    if c.mode not in ("quantum", "classical", "both"):
        raise ConfigError("mode", f"unknown mode {c.mode!r}; choose quantum, classical or both")
    if len(c.window) != 2:
        raise ConfigError("window", "expected [start, end]")
    c.window = [_as_int("window", c.window[0]), _as_int("window", c.window[1])]
    if c.command in ("rate", "scan") and c.sample_time is None:
        if c.window[1] - c.window[0] < 2 or c.window[0] < 0:
            raise ConfigError("window", "needs at least 2 samples")
        if c.window[1] > c.steps + 1:
            raise ConfigError("window", f"{c.window} exceeds steps={c.steps}")
    if c.sample_time is not None and not 0 <= c.sample_time <= c.steps:
        raise ConfigError("sample_time", f"must lie in [0, steps={c.steps}]")
    for key in ("v_k", "v_l"):
        v = getattr(c, key)
        if v is not None:
            try:
                Potential.from_triples(v)
            except (ParameterError, TypeError, ValueError) as exc:
                raise ConfigError(key, str(exc)) from None
    if c.command == "scan":
        if not c.axes:
            raise ConfigError("axes", "scan needs 1 or 2 axes")
        for a in c.axes:
            if not isinstance(a, Mapping) or set(a) != {"name", "min", "max", "points"}:
                raise ConfigError("axes", f"each axis needs exactly name, min, max, points; got {a!r}")
        try:
            c.scan_spec()
        except ParameterError as exc:
            raise ConfigError(exc.key, str(exc)) from None
    try:
        c.scaled_params()
    except ParameterError as exc:
        raise ConfigError(exc.key, str(exc)) from None


def load_config_text(text: str) -> dict:
    """Parse YAML/JSON config text.  A run metadata sidecar is unwrapped to
    its ``config`` block."""
    data = yaml.safe_load(text) if text and text.strip() else {}
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("config", "top level must be a mapping")
    if "config" in data and "version" in data:
        data = data["config"]
    return dict(data)


def parse_config(text: str | None = None, overrides: Mapping[str, Any] | None = None,
                 command: str | None = None) -> RunConfig:
    """Merge defaults < file values < flag overrides and validate.

    Unknown keys are rejected; errors name the offending key.
    """
    values = load_config_text(text) if text else {}
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    if command is not None:
        values["command"] = command
    unknown = sorted(set(values) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(unknown[0], f"unknown key {unknown[0]!r}")
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    _validate(cfg)
    return cfg


def read_config_file(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
