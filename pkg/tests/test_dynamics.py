from fractions import Fraction

import pytest

from eda_lab import (
    DomainError, LevelDistribution, SelectionSchema, UnsupportedSchemaError, d_of,
    distribution_with_d, make_explicit, make_onemax, run, step, uniform_level_distribution,
    verify_drift,
)
from eda_lab.selection import DriftRecord
from eda_lab.theory import tournament_d, truncation_d

TRUNC = SelectionSchema.truncation(0.5)
PAPER = SelectionSchema.tournament("paper")
FAIR = SelectionSchema.tournament("fair")
ALL = [TRUNC, SelectionSchema.truncation(0.2), PAPER, FAIR]


def two_level(d):
    return LevelDistribution([0, 1], [d, 1 - d])


TWO = make_explicit(None, [0, 1])


def iterate_recurrence(d0, nxt):
    """Independent oracle: iterate a scalar recurrence in exact arithmetic until d hits 0."""
    d, seq = Fraction(d0), [Fraction(d0)]
    while d > 0 and len(seq) < 200:
        d = max(Fraction(0), nxt(d))
        seq.append(d)
    return seq


def test_step_truncation():
    assert d_of(step(two_level(0.75), TRUNC, TWO), TWO) == 0.5


@pytest.mark.parametrize("schema", ALL)
def test_step_absorbed(schema):
    assert d_of(step(two_level(0.0), schema, TWO), TWO) == 0


def test_step_paper_tournament():
    assert d_of(step(two_level(0.75), PAPER, TWO), TWO) == 0.5


def test_run_onemax_truncation():
    problem = make_onemax(6)
    oracle = iterate_recurrence(Fraction(63, 64), lambda d: 1 - (1 - d) * 2)
    assert len(oracle) - 1 == 6
    traj = run(uniform_level_distribution(problem), TRUNC, problem)
    assert traj.tau == 6
    exact = run(uniform_level_distribution(problem, exact=True), SelectionSchema.truncation(Fraction(1, 2)), problem)
    assert exact.d == oracle


def test_run_onemax_paper_tournament():
    problem = make_onemax(6)
    traj = run(uniform_level_distribution(problem), PAPER, problem)
    assert traj.tau == 6
    assert traj.d[-2] == 0.5


def test_run_already_converged():
    problem = make_explicit(None, [5, 5])
    traj = run(uniform_level_distribution(problem), TRUNC, problem)
    assert traj.tau == 0
    assert traj.records == []
    assert traj.d == [0]


def test_run_not_reached():
    problem = make_onemax(6)
    traj = run(uniform_level_distribution(problem), TRUNC, problem, max_iters=3)
    assert traj.tau is None
    assert len(traj.records) == 3


def test_run_optimum_without_mass_never_converges():
    traj = run(two_level(1.0), PAPER, TWO, max_iters=20)
    assert traj.tau is None
    assert set(traj.d) == {1.0}


def test_run_rejects_zero_iters():
    with pytest.raises(DomainError):
        run(two_level(0.5), TRUNC, TWO, max_iters=0)


def test_snapshots_toggle():
    problem = make_onemax(4)
    dist = uniform_level_distribution(problem)
    traj = run(dist, TRUNC, problem)
    assert len(traj.snapshots) == len(traj.d)
    assert traj.snapshots[0] == dist
    assert run(dist, TRUNC, problem, max_iters=20_000).snapshots is None


def test_verify_drift_truncation_clean():
    traj = run(two_level(0.75), TRUNC, TWO)
    assert verify_drift(traj, TRUNC) == []


def test_verify_drift_paper_clean():
    traj = run(two_level(0.9), PAPER, TWO)
    assert traj.tau == 4
    assert verify_drift(traj, PAPER) == []


def test_verify_drift_negative_control():
    rec = DriftRecord(n=0, d_before=0.75, d_after=0.45, predicted_drift=0.25)
    assert rec.realized_drift == pytest.approx(0.3)
    assert verify_drift([rec], TRUNC) == [rec]


def test_verify_drift_fair_unsupported():
    with pytest.raises(UnsupportedSchemaError):
        verify_drift([], FAIR)


def test_clamped_steps_flagged():
    traj = run(two_level(0.3), TRUNC, TWO)
    assert traj.tau == 1
    rec = traj.records[0]
    assert rec.clamped
    assert rec.predicted_drift > rec.realized_drift


def test_fair_records_have_no_prediction():
    traj = run(two_level(0.5), FAIR, TWO, max_iters=3)
    assert all(r.predicted_drift is None for r in traj.records)
    assert traj.rows()[0]["predicted_drift"] is None


def test_rows_layout():
    traj = run(two_level(0.75), TRUNC, TWO)
    rows = traj.rows()
    assert [r["n"] for r in rows] == [0, 1, 2]
    assert rows[0] == {"n": 0, "d": 0.75, "realized_drift": 0.25, "predicted_drift": 0.25}
    assert rows[-1]["realized_drift"] is None


# -- invariants -------------------------------------------------------------------

GRID = [(d0, mu) for d0 in (0.1, 0.5, 0.9, 0.99) for mu in (0.1, 0.5, 0.9)]


@pytest.mark.parametrize("d0, mu", GRID)
def test_expected_fitness_reaches_fmax_iff_d_zero(d0, mu):
    problem = make_onemax(5)
    for schema in (SelectionSchema.truncation(mu), PAPER):
        traj = run(distribution_with_d(problem, d0), schema, problem)
        for dist, d in zip(traj.snapshots, traj.d):
            at_max = abs(dist.expected_fitness() - problem.f_max) <= 1e-9
            assert at_max == (d == 0)


def test_expected_fitness_iff_exact_fair():
    problem = make_onemax(3)
    dist0 = uniform_level_distribution(problem, exact=True)
    traj = run(dist0, FAIR, problem, max_iters=6)
    for dist, d in zip(traj.snapshots, traj.d):
        assert (dist.expected_fitness() == problem.f_max) == (d == 0)
        assert d > 0


@pytest.mark.parametrize("schema", ALL)
def test_absorption_persists(schema):
    problem = make_onemax(4)
    traj = run(uniform_level_distribution(problem), schema, problem, max_iters=40, stop_at_tau=False)
    assert traj.tau is not None
    assert all(d == 0 for d in traj.d[traj.tau:])
    assert all(d > 0 for d in traj.d[:traj.tau])


@pytest.mark.parametrize("schema", ALL)
def test_supermartingale(schema):
    problem = make_onemax(8)
    traj = run(uniform_level_distribution(problem), schema, problem, max_iters=60, stop_at_tau=False)
    assert all(b <= a for a, b in zip(traj.d, traj.d[1:]))


@pytest.mark.parametrize("d0, mu", GRID)
def test_trajectory_matches_closed_forms(d0, mu):
    problem = make_onemax(5)
    dist = distribution_with_d(problem, d0)
    traj = run(dist, SelectionSchema.truncation(mu), problem, max_iters=80, stop_at_tau=False)
    for n, d in enumerate(traj.d):
        assert abs(d - truncation_d(d0, mu, n)) <= 1e-12
    traj = run(dist, PAPER, problem, max_iters=80, stop_at_tau=False)
    for n, d in enumerate(traj.d):
        assert abs(d - tournament_d(d0, n)) <= 1e-12


def test_fair_recurrence_squares():
    problem = make_onemax(6)
    traj = run(uniform_level_distribution(problem), FAIR, problem)
    for rec in traj.records:
        assert abs(rec.d_after - rec.d_before**2) <= 1e-12
    exact = run(uniform_level_distribution(problem, exact=True), FAIR, problem, max_iters=5)
    assert exact.d == [Fraction(63, 64) ** (2**n) for n in range(6)]
