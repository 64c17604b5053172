from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import pauli_classify
from toffoli_ft.circuit import CircuitError
from toffoli_ft.constructions import build_error_detecting_toffoli
from toffoli_ft.error_analysis import (
    ErrorPattern,
    PatternClass,
    Polynomial,
    classify,
    enumerate_all,
    inject,
    monte_carlo,
    patterns_of_weight,
    wilson_interval,
    x_error_survey,
)

# frozen from the Pauli-frame oracle in tests/oracles.py
ACCEPT_COUNTS = (1, 0, 28, 0, 70, 0, 28, 0, 1)
FAULTY_COUNTS = (0, 0, 28, 0, 56, 0, 28, 0, 0)


def exact_rational(counts, p):
    n = len(counts) - 1
    return sum(c * p**k * (1 - p) ** (n - k) for k, c in enumerate(counts))


@pytest.fixture(scope="module")
def report():
    return enumerate_all()


def test_inject_empty_pattern_is_identity():
    c = build_error_detecting_toffoli()
    assert inject(c, ErrorPattern()) == c


def test_inject_places_z_right_after_first_t():
    c = build_error_detecting_toffoli()
    noisy = inject(c, {0: "Z"})
    first = c.t_sites()[0]
    assert noisy.gates[first + 1].name == "Z"
    assert noisy.gates[first + 1].qubits == c.gates[first].qubits
    assert noisy.t_count() == c.t_count()


def test_pattern_sites_must_be_distinct_and_in_range():
    with pytest.raises(CircuitError, match="distinct"):
        ErrorPattern(((0, "Z"), (0, "Z")))
    with pytest.raises(CircuitError, match="out of range"):
        inject(build_error_detecting_toffoli(), ErrorPattern.of([8]))


def test_classify_examples():
    assert classify(ErrorPattern()).cls is PatternClass.ACCEPTED_CORRECT
    for p in patterns_of_weight(8, 1):
        assert classify(p).cls is PatternClass.DETECTED
    weight2 = patterns_of_weight(8, 2)
    assert len(weight2) == 28
    for p in weight2:
        assert classify(p).cls is PatternClass.ACCEPTED_FAULTY


def test_simulation_matches_pauli_oracle_on_all_patterns(report):
    c = build_error_detecting_toffoli()
    for mask, cls in report.classes.items():
        sites = [i for i in range(8) if mask >> i & 1]
        assert cls.value == pauli_classify(c, sites), sites


def test_exact_counts(report):
    assert report.accept_poly.counts == ACCEPT_COUNTS
    assert report.faulty_poly.counts == FAULTY_COUNTS
    assert report.accept_poly.counts[0] == 1
    assert report.accept_poly.counts[1] == 0
    assert report.faulty_poly.counts[2] == 28


def test_counts_per_weight_sum_to_binomials(report):
    for w, row in report.counts_by_weight().items():
        assert sum(row.values()) == comb(8, w)


def test_first_order_acceptance_and_leading_posterior(report):
    coeffs = report.accept_poly.power_coefficients()
    assert coeffs[:2] == [1, -8]
    assert report.faulty_poly.lowest_order() == (2, 28)


@given(st.fractions(min_value=0, max_value=1))
def test_accept_plus_reject_is_one(p):
    reject = tuple(comb(8, k) - a for k, a in enumerate(ACCEPT_COUNTS))
    assert exact_rational(ACCEPT_COUNTS, p) + exact_rational(reject, p) == 1


def test_bernstein_to_power_matches_rational_evaluation():
    poly = Polynomial(ACCEPT_COUNTS)
    coeffs = poly.power_coefficients()
    for p in (Fraction(1, 3), Fraction(2, 7), Fraction(9, 10)):
        assert sum(c * p**k for k, c in enumerate(coeffs)) == exact_rational(ACCEPT_COUNTS, p)


def test_posterior_values(report):
    p = Fraction(1, 10**4)
    exact = exact_rational(FAULTY_COUNTS, p) / exact_rational(ACCEPT_COUNTS, p)
    assert report.posterior(1e-4) == pytest.approx(float(exact), rel=1e-12)
    assert 2.7e-7 <= report.posterior(1e-4) <= 2.9e-7
    assert report.rejection(1e-8) == pytest.approx(8e-8, abs=1e-9)


def test_syndrome_independent_of_input_for_z_patterns():
    # classify raises InvariantViolation otherwise; exercise a mixed bag
    for sites in ([0, 5], [1, 2, 3], [0, 1, 2, 3, 4, 5, 6, 7]):
        classify(ErrorPattern.of(sites))


def test_monte_carlo_trivial_limits(report):
    zero = monte_carlo(0.0, 1000, seed=1, report=report)
    assert zero.acceptance_rate == 1.0 and zero.faulty == 0
    one = monte_carlo(1.0, 1000, seed=1, report=report)
    full = classify(ErrorPattern.of(range(8))).cls
    assert full is PatternClass.ACCEPTED_CORRECT
    assert one.acceptance_rate == 1.0 and one.faulty == 0


def test_monte_carlo_reproducible(report):
    a = monte_carlo(0.05, 20000, seed=3, report=report)
    b = monte_carlo(0.05, 20000, seed=3, report=report)
    assert (a.accepted, a.faulty) == (b.accepted, b.faulty)


@pytest.mark.parametrize("p", [0.05, 0.01, 1e-3])
def test_monte_carlo_converges(report, p):
    mc = monte_carlo(p, 400_000, seed=17, report=report)
    lo, hi = mc.acceptance_interval()
    width = hi - lo
    assert abs(mc.acceptance_rate - report.acceptance(p)) <= 3 * width
    lo, hi = mc.posterior_interval()
    assert abs(mc.posterior_rate - report.posterior(p)) <= 3 * (hi - lo)


def test_wilson_interval_contains_estimate():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 100)[0] == pytest.approx(0.0, abs=1e-15)


def test_monte_carlo_rejects_bad_arguments(report):
    with pytest.raises(ValueError):
        monte_carlo(1.5, 10, report=report)
    with pytest.raises(ValueError):
        monte_carlo(0.1, 0, report=report)


def test_x_error_survey_shape_and_determinism():
    rows = x_error_survey()
    assert len(rows) == 8
    assert all(r.cls in set(PatternClass) for r in rows)
    again = x_error_survey()
    assert [(r.cls, round(r.reject_probability, 12)) for r in rows] == \
        [(r.cls, round(r.reject_probability, 12)) for r in again]
    assert all(0 <= r.reject_probability <= 1 for r in rows)


def test_classification_checks_random_inputs():
    # Z on a control after decoding is invisible on basis inputs up to phase
    c = build_error_detecting_toffoli().z(0)
    res = classify(ErrorPattern(), c)
    assert res.cls is PatternClass.ACCEPTED_FAULTY
    assert np.isclose(res.reject_probability, 0.0)
