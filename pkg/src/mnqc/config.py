"""Run configuration: sectioned key/value text files or JSON.

Example::

    [run]
    preset = no1
    power = auto-C1
    pe = 0.5
    rounds = 0
    seed = 0
    benchmarks = ghz, bv

    [noise]
    T1 = 1e-3

    [grids]
    pe = lin 0.05 0.5 10
    gap_times = geom 1e-8 1e-3 6

A grid is a comma-separated list of numbers, ``lin a b n`` or ``geom a b n``.
"""

from __future__ import annotations

import configparser
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .bench.circuits import BENCHMARKS
from .distill import NoiseParams
from .m2o import PRESETS


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where = f"{path}:" + (f"{line}: " if line is not None else " ")
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.line = line


def parse_grid(text) -> tuple[float, ...]:
    """Numbers from a list or a ``lin``/``geom`` spec."""
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    else:
        parts = text.replace(",", " ").split()
        if not parts:
            raise ValueError("empty grid")
        if parts[0] in ("lin", "geom"):
            if len(parts) != 4:
                raise ValueError(f"{parts[0]} grid needs 'a b n', got {text!r}")
            a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
            if n < 1:
                raise ValueError("grid size must be positive")
            values = (np.linspace if parts[0] == "lin" else np.geomspace)(a, b, n).tolist()
        else:
            values = [float(p) for p in parts]
    if not values:
        raise ValueError("empty grid")
    if any(not math.isfinite(v) for v in values):
        raise ValueError("grid values must be finite")
    return tuple(values)


@dataclass(frozen=True)
class Grids:
    pe: tuple[float, ...] = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
    cooperativity: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)
    max_rounds: int = 3
    gap_times: tuple[float, ...] = (1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3)
    gap_infidelities: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1, 0.5)
    qv_trials: int = 100
    qv_max_width: int = 10
    qcpa_k: tuple[float, ...] = (20.0, 128.0)
    dqpe_t1: tuple[float, ...] = (1e-4, 1e-3)
    dqpe_link_times: tuple[float, ...] = (1e-7, 1e-6, 1e-5)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple) and not v:
                raise ValueError(f"grid {f.name!r} is empty")
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")
        if self.qv_trials < 100:
            raise ValueError("qv_trials must be at least 100")
        if not 1 <= self.qv_max_width <= 10:
            raise ValueError("qv_max_width must lie in [1, 10]")
        if any(not 0 <= p <= 0.5 for p in self.pe):
            raise ValueError("Pe grid must lie within [0, 0.5]")


@dataclass(frozen=True)
class RunConfig:
    preset: str = "no1"
    power: float | str = "auto-C1"
    pe: float = 0.5
    rounds: int = 0
    noise: NoiseParams = field(default_factory=NoiseParams)
    benchmarks: tuple[str, ...] = ("ghz", "bv")
    grids: Grids = field(default_factory=Grids)
    out: str = "results"
    seed: int = 0
    t_link: float = 1.041e-6
    pec_fidelity: float = 0.975

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; valid presets: {', '.join(sorted(PRESETS))}")
        if isinstance(self.power, str):
            if self.power != "auto-C1":
                raise ValueError("power must be a number of watts or 'auto-C1'")
        elif not self.power > 0:
            raise ValueError("power must be positive")
        if not 0 <= self.pe <= 0.5:
            raise ValueError("pe must lie in [0, 0.5]")
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        bad = [b for b in self.benchmarks if b not in BENCHMARKS or b == "qv"]
        if bad or not self.benchmarks:
            raise ValueError(f"benchmarks must be a nonempty subset of ghz, bv, qft, adder; got {bad}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.t_link <= 0:
            raise ValueError("t_link must be positive")
        if not 0 < self.pec_fidelity <= 1:
            raise ValueError("pec_fidelity must lie in (0, 1]")

    @property
    def pump_power(self) -> float | None:
        """Watts, or None for the cooperativity-one power."""
        return None if isinstance(self.power, str) else float(self.power)

    def echo(self) -> dict:
        d = asdict(self)
        d["benchmarks"] = list(self.benchmarks)
        d["grids"] = {k: list(v) if isinstance(v, tuple) else v for k, v in d["grids"].items()}
        return d

    def replace(self, **kw) -> "RunConfig":
        return replace(self, **kw)


# [run] key -> converter from the raw value
_RUN_KEYS = {
    "preset": str,
    "power": lambda s: s if str(s).strip() == "auto-C1" else float(s),
    "pe": float,
    "rounds": int,
    "benchmarks": lambda s: tuple(b.strip() for b in s.split(",") if b.strip()) if isinstance(s, str) else tuple(s),
    "out": str,
    "seed": int,
    "t_link": float,
    "pec_fidelity": float,
}
_NOISE_KEYS = {f.name.lower(): f.name for f in fields(NoiseParams)}
_INT_GRIDS = {"max_rounds", "qv_trials", "qv_max_width"}


def _line_of(text: str, section: str, key: str) -> int | None:
    """1-based line of ``key`` inside ``[section]`` (INI) or of ``"key"`` (JSON)."""
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            current = m.group(1).strip().lower()
            continue
        if current == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return i
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return i
    return None


def _build(sections: dict, text: str, path: str | None) -> RunConfig:
    known = {"run", "noise", "grids"}
    for name in sections:
        if name not in known:
            line = next((i for i, ln in enumerate(text.splitlines(), 1) if name in ln.lower()), None)
            raise ConfigError(f"unknown section [{name}]; expected one of {sorted(known)}", line, path)

    def convert(section, key, conv, raw):
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}", _line_of(text, section, key), path) from None

    run = {}
    for key, raw in sections.get("run", {}).items():
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown key {key!r} in [run]", _line_of(text, "run", key), path)
        run[key] = convert("run", key, _RUN_KEYS[key], raw)
    noise = {}
    for key, raw in sections.get("noise", {}).items():
        name = _NOISE_KEYS.get(key.lower())
        if name is None:
            raise ConfigError(f"unknown key {key!r} in [noise]", _line_of(text, "noise", key), path)
        noise[name] = convert("noise", key, float, raw)
    grids = {}
    grid_names = {f.name for f in fields(Grids)}
    for key, raw in sections.get("grids", {}).items():
        if key not in grid_names:
            raise ConfigError(f"unknown key {key!r} in [grids]", _line_of(text, "grids", key), path)
        grids[key] = convert("grids", key, int if key in _INT_GRIDS else parse_grid, raw)

    for label, builder, kw, section in (
        ("noise", NoiseParams, noise, "noise"),
        ("grids", Grids, grids, "grids"),
    ):
        try:
            obj = builder(**kw)
        except ValueError as exc:
            first = next(iter(kw), None)
            raise ConfigError(f"[{section}] {exc}", _line_of(text, section, first) if first else None, path) from None
        run[label] = obj
    try:
        return RunConfig(**run)
    except ValueError as exc:
        msg = str(exc)
        key = "preset" if msg.startswith("unknown preset") else msg.split()[0]
        key = key if key in run else None
        raise ConfigError(msg, _line_of(text, "run", key) if key else None, path) from None


def parse_config_text(text: str, *, fmt: str = "ini", path: str | None = None) -> RunConfig:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, exc.lineno, path) from None
        if not isinstance(data, dict) or any(not isinstance(v, dict) for v in data.values()):
            raise ConfigError("JSON config must be an object of sections", 1, path)
        return _build(data, text, path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("expected a [section] header", exc.lineno, path) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line, path) from None
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line, path) from None
    sections = {s.lower(): dict(parser.items(s)) for s in parser.sections()}
    return _build(sections, text, path)


def parse_config(path) -> RunConfig:
    """Read and validate a ``.ini``/``.cfg`` style file, or ``.json``."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(p)) from None
    fmt = "json" if p.suffix.lower() == ".json" else "ini"
    return parse_config_text(text, fmt=fmt, path=str(p))
