"""Iterate the infinite-population EDA and record its suboptimal mass."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, UnsupportedSchemaError
from .fitness import LevelDistribution, Problem, d_of
from .selection import (
    TOURNAMENT_FAIR,
    TOURNAMENT_PAPER,
    TRUNCATION,
    DriftRecord,
    SelectionSchema,
    drift_formula,
    select,
)

DRIFT_TOL = 1e-12
SNAPSHOT_LIMIT = 10**4


@dataclass
class Trajectory:
    """Per-iteration record of one engine run.

    ``d[n]`` is the suboptimal mass of population ``n``; ``records[n]`` is the
    step from ``n`` to ``n + 1``. ``tau`` is None when ``d`` never reached 0.
    """

    d: list
    records: list[DriftRecord]
    tau: int | None
    max_iters: int
    snapshots: list[LevelDistribution] | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.tau is not None

    def rows(self) -> list[dict]:
        """Table rows with columns n, d, realized_drift, predicted_drift."""
        out = []
        for n, d in enumerate(self.d):
            rec = self.records[n] if n < len(self.records) else None
            out.append({
                "n": n,
                "d": float(d),
                "realized_drift": None if rec is None else float(rec.realized_drift),
                "predicted_drift": None if rec is None or rec.predicted_drift is None
                else float(rec.predicted_drift),
            })
        return out


def _is_clamped(d_before, schema: SelectionSchema) -> bool:
    if schema.kind == TRUNCATION:
        return (1 - d_before) / schema.mu > 1
    if schema.kind == TOURNAMENT_PAPER:
        return 2 * (1 - d_before) > 1
    return False


def step(dist: LevelDistribution, schema: SelectionSchema, problem: Problem) -> LevelDistribution:
    """One generation: select, then take the parent distribution as the new population."""
    return select(dist, schema, problem)


def run(dist0: LevelDistribution, schema: SelectionSchema, problem: Problem,
        max_iters: int = 1000, stop_at_tau: bool = True,
        snapshots: bool | None = None) -> Trajectory:
    """Iterate :func:`step` from ``dist0`` until ``d == 0`` or ``max_iters``.

    With ``stop_at_tau=False`` the run continues through the absorbed state up
    to ``max_iters`` steps. Snapshots default to on for ``max_iters <= 10**4``.
    """
    if max_iters < 1:
        raise DomainError(f"max_iters must be >= 1, got {max_iters}")
    if snapshots is None:
        snapshots = max_iters <= SNAPSHOT_LIMIT
    dist = dist0
    d = d_of(dist, problem)
    ds = [d]
    snaps = [dist] if snapshots else None
    records: list[DriftRecord] = []
    tau = 0 if d == 0 else None
    if tau == 0 and stop_at_tau:
        return Trajectory(ds, records, tau, max_iters, snaps)

    for n in range(max_iters):
        nxt = step(dist, schema, problem)
        d_next = d_of(nxt, problem)
        try:
            pred = drift_formula(d, schema)
        except UnsupportedSchemaError:
            pred = None
        records.append(DriftRecord(n, d, d_next, pred, _is_clamped(d, schema)))
        dist, d = nxt, d_next
        ds.append(d)
        if snaps is not None:
            snaps.append(dist)
        if d == 0 and tau is None:
            tau = n + 1
            if stop_at_tau:
                break
    return Trajectory(ds, records, tau, max_iters, snaps)


def verify_drift(trajectory: Trajectory | list[DriftRecord], schema: SelectionSchema,
                 tol: float = DRIFT_TOL) -> list[DriftRecord]:
    """Return the non-clamped steps whose realized drift misses the formula by more than ``tol``."""
    if schema.kind == TOURNAMENT_FAIR:
        raise UnsupportedSchemaError("tie-fair tournament has no drift formula to verify against")
    records = trajectory.records if isinstance(trajectory, Trajectory) else trajectory
    bad = []
    for rec in records:
        if rec.d_before <= 0 or rec.clamped:
            continue
        if abs(rec.realized_drift - drift_formula(rec.d_before, schema)) > tol:
            bad.append(rec)
    return bad

