import json
import math
from fractions import Fraction

import pytest

from eda_lab import DomainError, SelectionSchema
from eda_lab.theory import (
    BoundReport, bound_report, drift_time_bound, fair_tournament_d, tournament_d,
    tournament_drift_constants, tournament_exact_tau, tournament_upper_bound, truncation_d,
    truncation_drift_constants, truncation_exact_tau, truncation_upper_bound,
)

MUS = [k / 10 for k in range(1, 10)]
D0S = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 63 / 64, 0.999]


def dec(x):
    """The decimal value a grid literal stands for, not its binary approximation."""
    return Fraction(repr(x))


def first_zero(d0, factor):
    """Oracle: first n with (1 - d0) * factor**n >= 1, by exact iteration."""
    p, n = 1 - dec(d0), 0
    while p < 1:
        p *= factor
        n += 1
    return n


@pytest.mark.parametrize("h0, h1, expected", [
    (0.984375, 32.0, 31.5),
    (1, 1, 1),
    (0.5, 2, 1),
])
def test_drift_time_bound(h0, h1, expected):
    assert drift_time_bound(h0, h1) == expected


@pytest.mark.parametrize("h0, h1", [(0, 1), (1, 0), (-1, 2)])
def test_drift_time_bound_domain(h0, h1):
    with pytest.raises(DomainError):
        drift_time_bound(h0, h1)


def test_drift_constants_example():
    # h1 = 1 / ((1/mu - 1)(1 - d0)) with mu = 1/2, d0 = 63/64 -> 64, so h0*h1 = 63
    h0, h1 = truncation_drift_constants(63 / 64, 0.5)
    assert (h0, h1) == (63 / 64, 64.0)
    assert tournament_drift_constants(0.75) == (0.75, 4.0)


def test_truncation_upper_bound():
    assert truncation_upper_bound(0.75, 0.5) == 4.0
    assert truncation_upper_bound(63 / 64, 0.5) == 64.0
    assert truncation_upper_bound(0.0, 0.5) == 1.0
    assert truncation_upper_bound(1e-12, 0.5) == pytest.approx(1.0)


@pytest.mark.parametrize("d0, expected", [(0.75, 4.0), (0.5, 2.0), (63 / 64, 64.0)])
def test_tournament_upper_bound(d0, expected):
    assert tournament_upper_bound(d0) == expected


@pytest.mark.parametrize("fn, args", [
    (truncation_upper_bound, (1.0, 0.5)),
    (truncation_upper_bound, (0.5, 1.0)),
    (tournament_upper_bound, (1.0,)),
    (truncation_exact_tau, (0.5, 0.0)),
    (tournament_exact_tau, (1.5,)),
])
def test_domain_errors(fn, args):
    with pytest.raises(DomainError):
        fn(*args)


def test_truncation_closed_form():
    assert truncation_d(0.75, 0.5, 1) == 0.5
    assert truncation_d(0.75, 0.5, 2) == 0.0
    assert truncation_d(0.75, 0.5, 0) == 0.75
    assert truncation_d(0.9, 0.1, 5000) == 0.0


def test_tournament_closed_form():
    assert tournament_d(0.75, 1) == 0.5
    assert tournament_d(0.75, 2) == 0.0
    assert tournament_d(0.75, 0) == 0.75
    assert tournament_d(0.9, 5000) == 0.0


def test_fair_closed_form():
    assert fair_tournament_d(0.5, 0) == 0.5
    assert fair_tournament_d(0.5, 3) == 0.5**8
    assert fair_tournament_d(1.0, 10) == 1.0
    assert fair_tournament_d(0.9, 5000) == 0.0


def test_truncation_exact_tau_examples():
    assert truncation_exact_tau(63 / 64, 0.5) == (6.0, 6)
    assert truncation_exact_tau(0.75, 0.25) == (1.0, 1)
    real, iters = truncation_exact_tau(0.9, 0.5)
    assert real == pytest.approx(math.log(10) / math.log(2), abs=1e-12)
    assert iters == 4 == first_zero(0.9, 2)


@pytest.mark.parametrize("d0, expected", [(63 / 64, (6.0, 6)), (0.75, (2.0, 2)), (0.5, (1.0, 1))])
def test_tournament_exact_tau(d0, expected):
    assert tournament_exact_tau(d0) == expected


def test_exact_tau_zero_start():
    assert truncation_exact_tau(0.0, 0.3) == (0.0, 0)
    assert tournament_exact_tau(0.0) == (0.0, 0)


@pytest.mark.parametrize("d0", D0S)
def test_tournament_is_truncation_at_half(d0):
    assert truncation_exact_tau(d0, 0.5) == tournament_exact_tau(d0)


@pytest.mark.parametrize("d0", D0S)
@pytest.mark.parametrize("mu", MUS)
def test_ceiling_matches_exact_iteration(d0, mu):
    assert truncation_exact_tau(d0, mu)[1] == first_zero(d0, 1 / dec(mu))


@pytest.mark.parametrize("d0", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999])
def test_bounds_dominate_exact(d0):
    for mu in MUS:
        assert truncation_upper_bound(d0, mu) >= truncation_exact_tau(d0, mu)[0]
    assert tournament_upper_bound(d0) >= tournament_exact_tau(d0)[0]


@pytest.mark.parametrize("d0", D0S)
def test_bound_monotone_in_mu(d0):
    bounds = [truncation_upper_bound(d0, mu) for mu in MUS]
    assert all(a < b for a, b in zip(bounds, bounds[1:]))
    taus = [truncation_exact_tau(d0, mu)[0] for mu in MUS]
    assert all(a <= b for a, b in zip(taus, taus[1:]))


@pytest.mark.parametrize("d0", D0S)
@pytest.mark.parametrize("mu", MUS)
def test_bounds_are_drift_bound_plus_one(d0, mu):
    assert abs(truncation_upper_bound(d0, mu) - (drift_time_bound(*truncation_drift_constants(d0, mu)) + 1)) <= 1e-12 * truncation_upper_bound(d0, mu)
    assert abs(tournament_upper_bound(d0) - (drift_time_bound(*tournament_drift_constants(d0)) + 1)) <= 1e-12 * tournament_upper_bound(d0)


def test_bound_report_truncation():
    rep = bound_report(63 / 64, SelectionSchema.truncation(0.5), engine_tau=6)
    assert rep.upper_bound == 64.0
    assert (rep.exact_tau_real, rep.exact_tau_iterations) == (6.0, 6)
    assert rep.plus_one_iterations == 7.0
    assert rep.engine_tau == 6
    assert rep.upper_bound >= rep.exact_tau_real
    assert rep.exact_tau_iterations == math.ceil(rep.exact_tau_real)


def test_bound_report_fair_has_no_formula():
    rep = bound_report(0.5, SelectionSchema.tournament("fair"))
    assert rep.upper_bound is None and rep.exact_tau_iterations is None
    assert "never reaches 0" in rep.note


def test_bound_report_unreachable_optimum():
    rep = bound_report(1.0, SelectionSchema.tournament("paper"))
    assert rep.exact_tau_real is None


def test_bound_report_json_round_trip():
    rep = bound_report(0.9, SelectionSchema.truncation(0.3), engine_tau=2)
    assert BoundReport.from_dict(json.loads(rep.to_json())) == rep
