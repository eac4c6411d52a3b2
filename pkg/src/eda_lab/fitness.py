"""Finite search spaces and their fitness-level distributions.

Both selection operators depend on an individual only through its fitness,
so the state of the infinite-population EDA is kept as a probability mass
over the distinct fitness values ("levels") rather than over points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DomainError

MAX_ONEMAX_BITS = 24
MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Problem:
    """A finite maximisation problem.

    Points are addressed by integer index ``0 .. size-1``. For OneMax the
    index is the bitstring itself read as a binary number; for explicit
    problems ``points`` holds the user-supplied labels.
    """

    fitness: np.ndarray
    f_max: float
    optimal_count: int
    kind: str = "explicit"
    bits: int | None = None
    points: tuple | None = None
    is_optimal: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        fit = np.asarray(self.fitness)
        fit.setflags(write=False)
        object.__setattr__(self, "fitness", fit)
        opt = fit == self.f_max
        opt.setflags(write=False)
        object.__setattr__(self, "is_optimal", opt)

    @property
    def size(self) -> int:
        return int(self.fitness.shape[0])

    def point(self, index: int):
        if self.kind == "onemax":
            return format(index, f"0{self.bits}b")
        return self.points[index]

    def index_of(self, point) -> int:
        if self.kind == "onemax":
            if isinstance(point, str):
                idx = int(point, 2)
            else:
                idx = int("".join(str(int(b)) for b in point), 2)
            if len(point) != self.bits:
                raise DomainError(f"expected {self.bits} bits, got {len(point)}")
            return idx
        return self.points.index(point)

    def evaluate(self, point) -> float:
        return self.fitness[self.index_of(point)].item()

    def describe(self) -> dict:
        if self.kind == "onemax":
            return {"kind": "onemax", "bits": self.bits}
        return {"kind": "explicit", "fitness": [v.item() for v in self.fitness]}


def make_onemax(bits: int) -> Problem:
    """OneMax on all bitstrings of length ``bits``: fitness is the number of ones."""
    if isinstance(bits, bool) or not isinstance(bits, (int, np.integer)):
        raise ConfigError(f"onemax bits must be an integer, got {bits!r}")
    if not 1 <= bits <= MAX_ONEMAX_BITS:
        raise ConfigError(f"onemax bits must be in [1, {MAX_ONEMAX_BITS}], got {bits}")
    idx = np.arange(2**bits, dtype=np.uint32)
    fit = np.bitwise_count(idx).astype(np.int16)
    return Problem(fitness=fit, f_max=bits, optimal_count=1, kind="onemax", bits=int(bits))


def make_explicit(points: Sequence | None, fitnesses: Sequence[float]) -> Problem:
    fit = np.asarray(fitnesses)
    if fit.ndim != 1 or fit.size == 0:
        raise ConfigError("explicit problem needs a nonempty flat list of fitness values")
    if not np.issubdtype(fit.dtype, np.number):
        raise ConfigError(f"fitness values must be numeric, got dtype {fit.dtype}")
    if points is None:
        points = range(fit.size)
    points = tuple(points)
    if len(points) != fit.size:
        raise ConfigError(f"{len(points)} points but {fit.size} fitness values")
    if not np.all(np.isfinite(fit)):
        raise DomainError("fitness values must be finite")
    if np.any(fit < 0):
        bad = fit[fit < 0][0].item()
        raise DomainError(f"fitness must be nonnegative, got {bad}")
    f_max = fit.max().item()
    return Problem(
        fitness=fit,
        f_max=f_max,
        optimal_count=int(np.count_nonzero(fit == f_max)),
        kind="explicit",
        points=points,
    )


def problem_from_config(spec: Mapping[str, Any]) -> Problem:
    """Build a problem from ``{"kind": "onemax", "bits": L}`` or
    ``{"kind": "explicit", "fitness": [...]}``."""
    if not isinstance(spec, Mapping):
        raise ConfigError("problem: expected a mapping")
    kind = spec.get("kind")
    if kind == "onemax":
        if "bits" not in spec:
            raise ConfigError("problem.bits: missing")
        return make_onemax(spec["bits"])
    if kind == "explicit":
        if "fitness" not in spec:
            raise ConfigError("problem.fitness: missing")
        try:
            return make_explicit(spec.get("points"), spec["fitness"])
        except DomainError as exc:
            raise ConfigError(f"problem.fitness: {exc}") from exc
    raise ConfigError(f"problem.kind: expected 'onemax' or 'explicit', got {kind!r}")


@dataclass(frozen=True, eq=False)
class LevelDistribution:
    """Probability mass over strictly increasing fitness levels.

    ``mass`` may hold floats or :class:`fractions.Fraction` values; every
    operator in the package preserves whichever arithmetic it is given.
    """

    levels: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels)
        mass = _as_mass_array(self.mass)
        if levels.ndim != 1 or levels.shape != mass.shape or levels.size == 0:
            raise DomainError("levels and mass must be nonempty 1-d sequences of equal length")
        if levels.size > 1 and not np.all(np.diff(levels) > 0):
            raise DomainError("levels must be strictly increasing")
        if any(m < 0 for m in mass):
            raise DomainError("mass must be nonnegative")
        total = mass.sum()
        if abs(total - 1) > MASS_TOL:
            raise DomainError(f"mass sums to {total}, not 1")
        levels.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "mass", mass)

    @property
    def exact(self) -> bool:
        return self.mass.dtype == object

    def mass_at(self, level) -> Any:
        i = np.searchsorted(self.levels, level)
        if i < self.levels.size and self.levels[i] == level:
            return self.mass[i]
        return Fraction(0) if self.exact else 0.0

    def expected_fitness(self):
        if self.exact:
            return sum((Fraction(lv) if isinstance(lv, (int, np.integer)) else lv) * m
                       for lv, m in zip(self.levels.tolist(), self.mass))
        return float(np.dot(self.levels.astype(float), self.mass))

    def __eq__(self, other):
        if not isinstance(other, LevelDistribution):
            return NotImplemented
        return (np.array_equal(self.levels, other.levels)
                and all(a == b for a, b in zip(self.mass, other.mass)))

    def __repr__(self):
        pairs = ", ".join(f"{lv}: {m}" for lv, m in zip(self.levels.tolist(), self.mass.tolist()))
        return f"LevelDistribution({{{pairs}}})"


def _as_mass_array(mass) -> np.ndarray:
    if isinstance(mass, np.ndarray) and mass.dtype != object:
        return mass.astype(float, copy=True)
    items = list(mass)
    if any(isinstance(m, Fraction) for m in items):
        arr = np.empty(len(items), dtype=object)
        arr[:] = [Fraction(m) for m in items]
        return arr
    return np.asarray(items, dtype=float)


def uniform_level_distribution(problem: Problem, exact: bool = False) -> LevelDistribution:
    """Level masses induced by the uniform distribution over the search space.

    Every point receives mass ``1/size``, so a level carries the share of
    points that sit on it. ``exact=True`` returns :class:`Fraction` masses.
    """
    fit = problem.fitness
    if np.issubdtype(fit.dtype, np.integer):
        counts = np.bincount(fit)
        levels = np.nonzero(counts)[0]
        counts = counts[levels]
    else:
        levels, counts = np.unique(fit, return_counts=True)
    if exact:
        mass = [Fraction(int(c), problem.size) for c in counts]
    else:
        mass = counts / problem.size
    return LevelDistribution(levels, mass)


def distribution_with_d(problem: Problem, d0, exact: bool = False) -> LevelDistribution:
    """Put mass ``1 - d0`` on the optimum and spread ``d0`` over the
    suboptimal levels in proportion to their uniform share."""
    if not 0 <= d0 <= 1:
        raise DomainError(f"d0 must lie in [0, 1], got {d0}")
    base = uniform_level_distribution(problem, exact=exact)
    top = base.levels.size - 1
    sub = base.mass[:top]
    if d0 > 0 and sub.size == 0:
        raise DomainError("problem has no suboptimal level to carry mass d0 > 0")
    if exact:
        d0 = Fraction(d0)
    sub_total = sub.sum() if sub.size else 1
    mass = [m * d0 / sub_total for m in sub] + [1 - d0]
    return LevelDistribution(base.levels, mass)


def d_of(dist: LevelDistribution, problem: Problem):
    """Fraction of mass outside the optimal set: one minus the mass on ``f_max``."""
    return 1 - dist.mass_at(problem.f_max)
