"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import mleqlab as m


def test_payoff_and_best_replies():
    assert m.payoff(1, 1, 0.6) == pytest.approx(0.4)
    assert m.best_replies(0.8, 0.2, 0.6) == [0, 1]
    assert m.best_replies(0.0, 0.0, 0.6) == [0]


def test_ergodic_distribution():
    states = m.StateSpace(["0.6"])
    sigma = m.Strategy(states, [0.2, 0.8])
    dist = m.ergodic_distribution(sigma, states)
    assert dist(0, 1) == pytest.approx(0.5, abs=1e-12)
    assert m.overall_cooperation_rate(dist) == pytest.approx(0.5, abs=1e-12)


def test_solve_n1_binding_case():
    cand = m.solve_n1(0.6, 0.09)
    assert cand is not None
    assert cand.sigma(0, 1) == pytest.approx(0.8, abs=1e-9)
    assert cand.dist(0, 1) == pytest.approx(0.5, abs=1e-9)
    assert m.verify_mleq(cand).is_mleq
    assert m.verify_smleq(cand).is_smleq
    assert m.solve_n1(0.6, 0.10) is None


def test_solve_n2_cap():
    candidates, in_regime, _notes = m.solve_n2(0.75, 0.9, 0.15)
    assert in_regime
    assert len(candidates) == 1
    assert candidates[0].dist(1, 1) == pytest.approx(0.81 / 1.81, abs=1e-6)


def test_partitions_and_objective():
    states = m.StateSpace(["0.6"])
    sigma = m.Strategy(states, [0.2, 0.8])
    dist = m.ergodic_distribution(sigma, states)
    fine = m.Partition.finest(2)
    assert m.mspe(fine, sigma, dist) == 0.0
    assert m.bell_number(8) == 4140
    v_min, argmin = m.ml_optimal_partitions(sigma, states, m.PenaltyConfig(0.09))
    assert v_min == pytest.approx(0.18, abs=1e-12)
    assert len(argmin) == 2  # binding tie between fine and coarse


def test_grid_search_zero_trust_only():
    found = m.grid_search(m.StateSpace(["0.6"]), 0.3, grid=20)
    assert len(found) == 1
    cand, verdict = found[0]
    assert verdict.is_smleq
    assert cand.cooperation_rate == 0.0


def test_maxmin():
    gaps, value = m.inner_maxmin([0.5, 0.5])
    assert gaps == [1.0]
    assert value == pytest.approx(0.25, abs=1e-12)
    p, outer_value = m.outer_maxmin(3)
    assert outer_value == pytest.approx(1.0 / (12.0 + 8.0 * math.sqrt(2.0)), abs=1e-9)
    assert outer_value < 1.0 / 16.0


def test_genericity():
    generic, witnesses = m.genericity_check(m.StateSpace(["0.2", "0.3", "0.5"]), 3)
    assert not generic
    assert witnesses == ["0.2+0.3=0.5"]
    generic, _ = m.genericity_check(m.StateSpace(["1/7", "3/11"]), 2)
    assert generic


def test_noise_model():
    model = m.make_noise_model(0.2, 0.8, 0.09)
    assert m.expected_mspe_fine(model) == pytest.approx(0.18)
    assert m.expected_mspe_coarse(model) == pytest.approx(0.18, abs=1e-12)
    assert m.fine_partition_preferred(model)
    mean, std_error = m.monte_carlo_mspe(model, "fine", samples=100000, seed=3)
    assert abs(mean - 0.18) <= 4 * std_error
    with pytest.raises(m.ModelError):
        m.make_noise_model(0.0, 1.0, 0.1)
