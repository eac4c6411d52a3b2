"""Exact infinite-population selection operators on level distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import ConfigError, ConsistencyError, DomainError, UnsupportedSchemaError
from .fitness import LevelDistribution, Problem, d_of

TRUNCATION = "truncation"
TOURNAMENT_PAPER = "tournament_paper"
TOURNAMENT_FAIR = "tournament_fair"

RENORM_TOL = 1e-9
# absorbs summation round-off when the cumulative mass lands on mu
CUT_TOL = 1e-15


@dataclass(frozen=True)
class SelectionSchema:
    kind: str
    mu: Any = None

    def __post_init__(self):
        if self.kind == TRUNCATION:
            if self.mu is None or not 0 < self.mu < 1:
                raise DomainError(f"truncation threshold mu must lie in (0, 1), got {self.mu}")
        elif self.kind in (TOURNAMENT_PAPER, TOURNAMENT_FAIR):
            if self.mu is not None:
                raise DomainError("tournament selection takes no mu")
        else:
            raise DomainError(f"unknown selection kind {self.kind!r}")

    @classmethod
    def truncation(cls, mu) -> "SelectionSchema":
        return cls(TRUNCATION, mu)

    @classmethod
    def tournament(cls, ties: str = "paper") -> "SelectionSchema":
        if ties not in ("paper", "fair"):
            raise DomainError(f"tournament ties must be 'paper' or 'fair', got {ties!r}")
        return cls(TOURNAMENT_PAPER if ties == "paper" else TOURNAMENT_FAIR)

    @property
    def is_tournament(self) -> bool:
        return self.kind != TRUNCATION

    def describe(self) -> dict:
        if self.kind == TRUNCATION:
            return {"selection": "truncation", "mu": float(self.mu)}
        return {"selection": "tournament", "ties": "paper" if self.kind == TOURNAMENT_PAPER else "fair"}


def schema_from_config(spec: Mapping[str, Any]) -> SelectionSchema:
    """Parse ``{"selection": "truncation", "mu": 0.5}`` or
    ``{"selection": "tournament", "ties": "paper" | "fair"}``."""
    if not isinstance(spec, Mapping):
        raise ConfigError("schema: expected a mapping")
    sel = spec.get("selection")
    try:
        if sel == "truncation":
            if "mu" not in spec:
                raise ConfigError("schema.mu: missing for truncation selection")
            mu = spec["mu"]
            if isinstance(mu, bool) or not isinstance(mu, (int, float)):
                raise ConfigError(f"schema.mu: expected a number, got {mu!r}")
            return SelectionSchema.truncation(float(mu))
        if sel == "tournament":
            return SelectionSchema.tournament(spec.get("ties", "paper"))
    except DomainError as exc:
        raise ConfigError(f"schema: {exc}") from exc
    raise ConfigError(f"schema.selection: expected 'truncation' or 'tournament', got {sel!r}")


@dataclass(frozen=True)
class TruncationCut:
    """Fitness threshold of truncation selection.

    ``boundary_fraction`` is the share of the threshold level that is kept,
    so that the selected mass is exactly ``mu`` even when a whole level
    straddles the cut.
    """

    beta: Any
    boundary_fraction: Any
    index: int


@dataclass(frozen=True)
class DriftRecord:
    n: int
    d_before: Any
    d_after: Any
    predicted_drift: float
    clamped: bool = False

    @property
    def realized_drift(self):
        return self.d_before - self.d_after


def _finish(levels: np.ndarray, mass: np.ndarray) -> LevelDistribution:
    """Check the output sums to 1 and remove round-off.

    The highest level keeps the mass the operator computed for it; only the
    levels below are rescaled, so the optimal mass follows its recurrence
    to the last bit.
    """
    total = mass.sum()
    if abs(total - 1) > RENORM_TOL:
        raise ConsistencyError(f"selected mass sums to {total}")
    if total != 1:
        mass = mass.copy()
        top = mass[-1]
        below = total - top
        if top >= 1 or below <= 0:
            mass[:-1] = 0 * mass[:-1]
            mass[-1] = 1 + 0 * top
        else:
            mass[:-1] = mass[:-1] * ((1 - top) / below)
    return LevelDistribution(levels, mass)


def truncation_cut(dist: LevelDistribution, mu) -> TruncationCut:
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    above = 0
    for i in range(dist.levels.size - 1, -1, -1):
        m = dist.mass[i]
        if m > 0 and above + m >= mu - CUT_TOL:
            frac = min(1, (mu - above) / m)
            return TruncationCut(beta=dist.levels[i].item(), boundary_fraction=frac, index=i)
        above += m
    # unreachable for a valid distribution: total mass 1 > mu
    raise ConsistencyError("cumulative mass never reached mu")


def truncation_select(dist: LevelDistribution, mu) -> LevelDistribution:
    """Keep the best ``mu`` share of the mass and rescale it by ``1/mu``."""
    cut = truncation_cut(dist, mu)
    mass = dist.mass.copy()
    mass[: cut.index] = 0
    mass[cut.index] = mass[cut.index] * cut.boundary_fraction
    mass = mass / mu
    return _finish(dist.levels, mass)


def _cumulative(dist: LevelDistribution):
    """Return (F_le, F_lt): mass at or below, and strictly below, each level."""
    le = np.cumsum(dist.mass)
    return le, le - dist.mass


def tournament_select_paper(dist: LevelDistribution, problem: Problem) -> LevelDistribution:
    """Two-tournament with the doubling rule applied to the optimum.

    The optimal mass ``p`` becomes ``min(1, 2p)``. What is left goes to the
    suboptimal levels in proportion to ``2 * mass * F_le``.
    """
    levels = dist.levels
    le, _ = _cumulative(dist)
    weights = 2 * dist.mass * le
    top = np.nonzero(levels == problem.f_max)[0]
    out = weights * 0
    rest = 1
    if top.size:
        t = top[0]
        p_new = min(1, 2 * dist.mass[t])
        out[t] = p_new
        rest = 1 - p_new
        weights[t] = 0
    total_w = weights.sum()
    if rest > 0 and total_w > 0:
        out = out + weights * (rest / total_w)
    return _finish(levels, out)


def tournament_select_fair(dist: LevelDistribution) -> LevelDistribution:
    """Law of the better of two independent draws, ties split evenly.

    A level keeps ``F_le**2 - F_lt**2``: the chance that both draws land at
    or below it minus the chance that both land strictly below.
    """
    le, lt = _cumulative(dist)
    return _finish(dist.levels, le * le - lt * lt)


def select(dist: LevelDistribution, schema: SelectionSchema, problem: Problem) -> LevelDistribution:
    if schema.kind == TRUNCATION:
        return truncation_select(dist, schema.mu)
    if schema.kind == TOURNAMENT_PAPER:
        return tournament_select_paper(dist, problem)
    return tournament_select_fair(dist)


def drift_formula(d, schema: SelectionSchema):
    """One-step decrease of ``d`` predicted before any clamping at zero."""
    if schema.kind == TRUNCATION:
        return (1 / schema.mu - 1) * (1 - d)
    if schema.kind == TOURNAMENT_PAPER:
        return 1 - d
    raise UnsupportedSchemaError("tie-fair tournament has no drift formula; its drift is d - d**2")


def predicted_drift(dist: LevelDistribution, schema: SelectionSchema, problem: Problem):
    return drift_formula(d_of(dist, problem), schema)
