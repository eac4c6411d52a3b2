"""Closed-form stopping times and drift bounds.

Nothing here calls the engine: these are the formulas the engine is
checked against. All functions take plain floats.

Two stopping-time conventions are reported side by side. ``exact_tau`` is
the first iteration index with ``d == 0`` (the ceiling of the log ratio);
the "+1" convention additionally counts the terminal check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

from .errors import DomainError
from .selection import TOURNAMENT_FAIR, TOURNAMENT_PAPER, TRUNCATION, SelectionSchema


def _check_d0(d0, *, allow_one=False):
    hi_ok = d0 <= 1 if allow_one else d0 < 1
    if not (0 <= d0 and hi_ok):
        raise DomainError(f"d0 must lie in [0, 1{']' if allow_one else ')'}, got {d0}")


def _check_mu(mu):
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")


def drift_time_bound(h0: float, h1: float) -> float:
    """Expected hitting time bound ``h0 * h1``.

    Valid when ``d`` never exceeds ``h0`` and every step removes at least
    ``1 / h1`` of it in expectation.
    """
    if not h0 > 0:
        raise DomainError(f"h0 must be positive, got {h0}")
    if not h1 > 0:
        raise DomainError(f"h1 must be positive, got {h1}")
    return h0 * h1


def truncation_drift_constants(d0: float, mu: float) -> tuple[float, float]:
    """``(h0, h1)`` for truncation: ``d`` is bounded by ``d0`` and the drift
    by ``(1/mu - 1)(1 - d0)``."""
    _check_d0(d0)
    _check_mu(mu)
    return d0, mu / ((1 - mu) * (1 - d0))


def tournament_drift_constants(d0: float) -> tuple[float, float]:
    _check_d0(d0)
    return d0, 1 / (1 - d0)


def truncation_upper_bound(d0: float, mu: float) -> float:
    _check_d0(d0)
    _check_mu(mu)
    return mu * d0 / ((1 - mu) * (1 - d0)) + 1


def tournament_upper_bound(d0: float) -> float:
    _check_d0(d0)
    return d0 / (1 - d0) + 1


def truncation_d(d0: float, mu: float, n: int) -> float:
    """``max(0, 1 - (1 - d0) / mu**n)``: suboptimal mass after ``n`` truncation steps."""
    _check_d0(d0)
    _check_mu(mu)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    try:
        grown = (1 - d0) * mu ** (-n)
    except OverflowError:
        return 0.0
    return max(0.0, 1 - grown)


def tournament_d(d0: float, n: int) -> float:
    """``max(0, 1 - (1 - d0) * 2**n)``."""
    _check_d0(d0)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    try:
        grown = (1 - d0) * 2.0**n
    except OverflowError:
        return 0.0
    return max(0.0, 1 - grown)


def fair_tournament_d(d0: float, n: int) -> float:
    """``d0 ** (2**n)``; never reaches 0 in exact arithmetic when ``d0 > 0``."""
    _check_d0(d0, allow_one=True)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if d0 == 1:
        return 1.0
    if n > 1000:
        return 0.0
    return math.pow(d0, 2**n)


# a log ratio this close to an integer is that integer up to round-off
CEIL_SNAP = 1e-9


def robust_ceil(x: float) -> int:
    """Ceiling that does not jump on round-off: 1.0000000000000002 -> 1."""
    nearest = round(x)
    if abs(x - nearest) <= CEIL_SNAP * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def _log_ratio_tau(d0: float, log_base: float) -> tuple[float, int]:
    if d0 == 0:
        return 0.0, 0
    real = math.log(1 - d0) / log_base
    return real, robust_ceil(real)


def truncation_exact_tau(d0: float, mu: float) -> tuple[float, int]:
    """``log(1 - d0) / log(mu)`` and its ceiling."""
    _check_d0(d0)
    _check_mu(mu)
    return _log_ratio_tau(d0, math.log(mu))


def tournament_exact_tau(d0: float) -> tuple[float, int]:
    _check_d0(d0)
    return _log_ratio_tau(d0, math.log(0.5))


@dataclass
class BoundReport:
    schema: str
    d0: float
    mu: float | None
    upper_bound: float | None
    exact_tau_real: float | None
    exact_tau_iterations: int | None
    plus_one_iterations: float | None
    engine_tau: int | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "BoundReport":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def bound_report(d0: float, schema: SelectionSchema, engine_tau: int | None = None) -> BoundReport:
    """Collect the upper bound and exact stopping time that apply to ``schema``."""
    d0 = float(d0)
    _check_d0(d0, allow_one=True)
    mu = float(schema.mu) if schema.kind == TRUNCATION else None
    empty = dict(upper_bound=None, exact_tau_real=None, exact_tau_iterations=None,
                 plus_one_iterations=None)
    if schema.kind == TOURNAMENT_FAIR:
        return BoundReport("tournament_fair", d0, None, engine_tau=engine_tau,
                           note="no closed form for tau; d -> d**2 never reaches 0 in exact arithmetic", **empty)
    if d0 == 1:
        return BoundReport(schema.kind, d0, mu, engine_tau=engine_tau,
                           note="d0 = 1: optimum carries no mass and is never reached", **empty)
    if schema.kind == TRUNCATION:
        bound = truncation_upper_bound(d0, mu)
        real, iters = truncation_exact_tau(d0, mu)
    else:
        bound = tournament_upper_bound(d0)
        real, iters = tournament_exact_tau(d0)
    return BoundReport(schema.kind, d0, mu, bound, real, iters, real + 1, engine_tau)


__all__ = [
    "BoundReport", "bound_report", "drift_time_bound", "fair_tournament_d",
    "tournament_d", "tournament_drift_constants", "tournament_exact_tau",
    "tournament_upper_bound", "truncation_d", "truncation_drift_constants",
    "truncation_exact_tau", "truncation_upper_bound",
    "TRUNCATION", "TOURNAMENT_PAPER", "TOURNAMENT_FAIR",
]
