"""Experiment configuration files (YAML; JSON is accepted as a YAML subset)."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, DomainError
from .fitness import LevelDistribution, Problem, distribution_with_d, problem_from_config, \
    uniform_level_distribution
from .selection import SelectionSchema, schema_from_config
from .simulator import SimConfig

SECTIONS = {"problem", "schema", "initial", "engine", "simulation", "grid", "output"}
FORMATS = ("csv", "json")


@dataclass
class ExperimentConfig:
    raw: dict
    problem: Problem
    schema: SelectionSchema
    initial: dict
    engine_max_iters: int
    simulation: SimConfig | None
    grid: dict | None
    out_dir: Path
    fmt: str

    def initial_distribution(self) -> LevelDistribution:
        if self.initial["kind"] == "uniform":
            return uniform_level_distribution(self.problem)
        return distribution_with_d(self.problem, self.initial["d0"])

    def digest(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def seed(self) -> int | None:
        return None if self.simulation is None else self.simulation.seed


def _section(raw: dict, name: str, required: bool = False) -> dict | None:
    val = raw.get(name)
    if val is None:
        if required:
            raise ConfigError(f"{name}: missing section")
        return None
    if not isinstance(val, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(val).__name__}")
    return val


def _int_field(sec: dict, where: str, key: str, default=None, minimum: int | None = None):
    val = sec.get(key, default)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{where}.{key}: expected an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(f"{where}.{key}: must be >= {minimum}, got {val}")
    return val


def _number_list(sec: dict, where: str, key: str) -> list[float]:
    val = sec.get(key, [])
    if not isinstance(val, list):
        raise ConfigError(f"{where}.{key}: expected a list, got {val!r}")
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where}.{key}: expected numbers, got {v!r}")
    return [float(v) for v in val]


def parse_config(raw: Any, out_dir: str | None = None, seed: int | None = None,
                 fmt: str | None = None) -> ExperimentConfig:
    """Validate a loaded config mapping and apply command-line overrides."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a mapping")
    raw = copy.deepcopy(raw)
    unknown = set(raw) - SECTIONS
    if unknown:
        raise ConfigError(f"config: unknown section(s) {sorted(unknown)}")

    problem = problem_from_config(_section(raw, "problem", required=True))
    schema = schema_from_config(_section(raw, "schema", required=True))

    init = _section(raw, "initial") or {"kind": "uniform"}
    kind = init.get("kind", "uniform")
    if kind == "uniform":
        initial = {"kind": "uniform"}
    elif kind == "explicit":
        d0 = init.get("d0")
        if isinstance(d0, bool) or not isinstance(d0, (int, float)):
            raise ConfigError(f"initial.d0: expected a number, got {d0!r}")
        if not 0 <= d0 <= 1:
            raise ConfigError(f"initial.d0: must lie in [0, 1], got {d0}")
        if d0 > 0 and problem.optimal_count == problem.size:
            raise ConfigError("initial.d0: problem has no suboptimal points to carry d0 > 0")
        initial = {"kind": "explicit", "d0": float(d0)}
    else:
        raise ConfigError(f"initial.kind: expected 'uniform' or 'explicit', got {kind!r}")

    engine = _section(raw, "engine") or {}
    max_iters = _int_field(engine, "engine", "max_iters", default=1000, minimum=1)

    sim = None
    sim_sec = _section(raw, "simulation")
    if sim_sec is not None:
        if seed is not None:
            sim_sec["seed"] = seed
            raw["simulation"]["seed"] = seed
        try:
            sim = SimConfig(
                population_size=_int_field(sim_sec, "simulation", "population_size", minimum=1)
                or _missing("simulation.population_size"),
                schema=schema,
                seed=_int_field(sim_sec, "simulation", "seed", default=0, minimum=0),
                replications=_int_field(sim_sec, "simulation", "replications", default=1, minimum=1),
                parent_count=_int_field(sim_sec, "simulation", "parent_count", minimum=1),
                max_iters=_int_field(sim_sec, "simulation", "max_iters", minimum=0),
            )
        except DomainError as exc:
            raise ConfigError(f"simulation: {exc}") from exc

    grid = None
    grid_sec = _section(raw, "grid")
    if grid_sec is not None:
        grid = {"d0": _number_list(grid_sec, "grid", "d0"), "mu": _number_list(grid_sec, "grid", "mu")}
        for v in grid["d0"]:
            if not 0 < v < 1:
                raise ConfigError(f"grid.d0: value {v} outside (0, 1)")
        for v in grid["mu"]:
            if not 0 < v < 1:
                raise ConfigError(f"grid.mu: value {v} outside (0, 1)")

    output = _section(raw, "output") or {}
    if out_dir is None:
        out_dir = output.get("dir", "eda_lab_out")
    if fmt is None:
        fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format: expected one of {FORMATS}, got {fmt!r}")
    raw.setdefault("output", {})
    raw["output"] = {**raw["output"], "format": fmt}

    return ExperimentConfig(raw, problem, schema, initial, max_iters, sim, grid, Path(out_dir), fmt)


def _missing(name: str):
    raise ConfigError(f"{name}: missing")


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{path}: parse error at {where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from exc
    return parse_config(raw, **overrides)
