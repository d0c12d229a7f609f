"""Run configuration: nested sections, YAML on disk, flag overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import yaml


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` maps dotted field names to messages."""

    def __init__(self, errors: dict[str, str]):
        self.errors = dict(errors)
        lines = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(f"invalid configuration: {lines}")


@dataclass
class StackConfig:
    lambda_pc: float = 692e-9  # m
    n_a: float = 2.22
    n_b: float = 1.41
    n_d: float = 1.41
    n0: float = 1.0


@dataclass
class AtomicConfig:
    delta_p: float = 0.05
    omega_c0: float = 4.0
    sgc_p: float = 0.99
    s1: float = 1.0


@dataclass
class ProbeConfig:
    omega_p: float = 2.5e15  # rad/s


@dataclass
class SolverConfig:
    tol: float = 1e-10
    relaxation: float = 0.5
    max_iter: int = 100_000
    max_halvings: int = 20


@dataclass
class SweepConfig:
    spectrum_points: int = 2000
    spectrum_span: float = 0.2
    hysteresis_points: int = 2000
    # None selects the adaptive doubling policy
    u_f_max: float | None = None
    u_f_start: float = 0.025
    max_doublings: int = 8


@dataclass
class ChiScanConfig:
    axis: str = "sgc_p"  # or "omega_c0"
    delta_min: float = 0.0
    delta_max: float = 0.2
    delta_points: int = 101
    axis_min: float = 0.0
    axis_max: float = 0.99
    axis_points: int = 101


@dataclass
class RunConfig:
    stack: StackConfig = field(default_factory=StackConfig)
    atomic: AtomicConfig = field(default_factory=AtomicConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    chi_scan: ChiScanConfig = field(default_factory=ChiScanConfig)

    def to_dict(self) -> dict[str, dict[str, Any]]:
        return dataclasses.asdict(self)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict | None) -> "RunConfig":
        data = data or {}
        errors = {}
        sections = {}
        if not isinstance(data, dict):
            raise ConfigError({"<root>": "expected a mapping of sections"})
        for name in data:
            if name not in SECTIONS:
                errors[name] = "unknown section"
        for name, section_cls in SECTIONS.items():
            raw = data.get(name) or {}
            if not isinstance(raw, dict):
                errors[name] = "expected a mapping"
                continue
            known = {f.name: f for f in dataclasses.fields(section_cls)}
            values = {}
            for key, value in raw.items():
                if key not in known:
                    errors[f"{name}.{key}"] = "unknown key"
                    continue
                try:
                    values[key] = coerce(value, known[key].type)
                except (TypeError, ValueError) as exc:
                    errors[f"{name}.{key}"] = str(exc)
            sections[name] = section_cls(**values)
        if errors:
            raise ConfigError(errors)
        config = cls(**sections)
        config.validate()
        return config

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError({"<file>": f"malformed YAML: {exc}"}) from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def override(self, dotted: str, value: Any) -> None:
        section, key = dotted.split(".", 1)
        target = getattr(self, section)
        ftype = {f.name: f.type for f in dataclasses.fields(target)}[key]
        try:
            setattr(target, key, coerce(value, ftype))
        except (TypeError, ValueError) as exc:
            raise ConfigError({dotted: str(exc)}) from None

    def validate(self) -> None:
        errors = {}

        def positive(path, value):
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                errors[path] = f"must be a positive number, got {value!r}"

        for key in ("lambda_pc", "n_a", "n_b", "n_d", "n0"):
            positive(f"stack.{key}", getattr(self.stack, key))
        a = self.atomic
        if not 0 <= a.sgc_p <= 1:
            errors["atomic.sgc_p"] = f"must lie in [0, 1], got {a.sgc_p!r}"
        if not a.omega_c0 >= 0:
            errors["atomic.omega_c0"] = f"must be >= 0, got {a.omega_c0!r}"
        if not a.s1 >= 0:
            errors["atomic.s1"] = f"must be >= 0, got {a.s1!r}"
        if not math.isfinite(a.delta_p):
            errors["atomic.delta_p"] = "must be finite"
        positive("probe.omega_p", self.probe.omega_p)
        s = self.solver
        positive("solver.tol", s.tol)
        if not 0 < s.relaxation <= 1:
            errors["solver.relaxation"] = f"must lie in (0, 1], got {s.relaxation!r}"
        if s.max_iter < 1:
            errors["solver.max_iter"] = "must be >= 1"
        if s.max_halvings < 0:
            errors["solver.max_halvings"] = "must be >= 0"
        w = self.sweep
        if w.spectrum_points < 1:
            errors["sweep.spectrum_points"] = "grid must be nonempty"
        if not 0 < w.spectrum_span < 1:
            errors["sweep.spectrum_span"] = "must lie in (0, 1)"
        if w.hysteresis_points < 2:
            errors["sweep.hysteresis_points"] = "must be >= 2"
        if w.u_f_max is not None:
            positive("sweep.u_f_max", w.u_f_max)
        positive("sweep.u_f_start", w.u_f_start)
        if w.max_doublings < 0:
            errors["sweep.max_doublings"] = "must be >= 0"
        c = self.chi_scan
        if c.axis not in ("sgc_p", "omega_c0"):
            errors["chi_scan.axis"] = "must be 'sgc_p' or 'omega_c0'"
        if c.delta_points < 1:
            errors["chi_scan.delta_points"] = "grid must be nonempty"
        if c.axis_points < 1:
            errors["chi_scan.axis_points"] = "grid must be nonempty"
        if c.delta_max < c.delta_min:
            errors["chi_scan.delta_max"] = "must be >= delta_min"
        if c.axis_max < c.axis_min:
            errors["chi_scan.axis_max"] = "must be >= axis_min"
        if c.axis == "sgc_p" and not (0 <= c.axis_min and c.axis_max <= 1):
            errors["chi_scan.axis_max"] = "sgc_p range must lie in [0, 1]"
        if errors:
            raise ConfigError(errors)


SECTIONS = {
    "stack": StackConfig,
    "atomic": AtomicConfig,
    "probe": ProbeConfig,
    "solver": SolverConfig,
    "sweep": SweepConfig,
    "chi_scan": ChiScanConfig,
}


def coerce(value: Any, annotation: str) -> Any:
    """Convert a YAML scalar or flag string to the annotated field type."""
    optional = annotation.endswith("| None")
    base = annotation.replace("| None", "").strip()
    if value is None or (isinstance(value, str) and value.lower() in ("none", "null", "auto")):
        if optional:
            return None
        raise ValueError("value is required")
    if base == "float":
        if isinstance(value, bool):
            raise TypeError("expected a number")
        return float(value)
    if base == "int":
        if isinstance(value, bool):
            raise TypeError("expected an integer")
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"expected an integer, got {value!r}")
        return int(float(value)) if isinstance(value, str) else int(value)
    if base == "str":
        return str(value)
    raise TypeError(f"unsupported field type {annotation}")


def flag_names() -> list[tuple[str, str]]:
    """``(dotted key, annotation)`` for every configurable field."""
    out = []
    for name, section_cls in SECTIONS.items():
        for f in dataclasses.fields(section_cls):
            out.append((f"{name}.{f.name}", f.type))
    return out
