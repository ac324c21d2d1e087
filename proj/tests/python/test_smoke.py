import itertools
import math

import pytest

import cqubo


def test_qubo_ising_round_trip():
    q = cqubo.QuboModel(3)
    q.add_linear(0, 1.5)
    q.add_quadratic(0, 2, -2.0)
    q.add_quadratic(1, 2, 0.75)
    q.offset = 0.25
    ising = cqubo.qubo_to_ising(q)
    for bits in itertools.product([0, 1], repeat=3):
        spins = [1 - 2 * b for b in bits]
        assert abs(q.energy(list(bits)) - ising.energy(spins)) <= 1e-12
    back = cqubo.ising_to_qubo(ising)
    assert back.linear(0) == pytest.approx(1.5)
    assert back.quadratic(0, 2) == pytest.approx(-2.0)


def test_errors_map_to_python_exceptions():
    q = cqubo.QuboModel(2)
    with pytest.raises(ValueError):
        q.energy([0, 1, 1])
    with pytest.raises(ValueError):
        cqubo.approximation_ratio(5.0, 0.0, 1.0)


def test_sign_test_values():
    p, _ = cqubo.sign_test_p(741, 592)
    assert float(f"{p:.2g}") == 2.5e-5
    _, p_tilde = cqubo.sign_test_p(179, 267)
    assert float(f"{p_tilde:.2g}") == 1.2e-5


def test_quadratic_hamming_penalty_has_no_fields_at_half_weight():
    c = cqubo.generate_c_matrix(100, 3, 0)
    problem = cqubo.build_single_quarter(c, 50)
    model, slack = cqubo.encode(problem, {"C1": ("quadratic", 1.2)})
    assert slack == {}
    ising = cqubo.qubo_to_ising(model)
    obj = cqubo.qubo_to_ising(problem.objective)
    for (i, j), v in ising.quadratic_terms.items():
        assert v - obj.quadratic(i, j) == pytest.approx(0.6, abs=1e-12)
    for i in range(100):
        assert ising.linear(i) - obj.linear(i) == pytest.approx(0.0, abs=1e-12)


def test_single_quarter_tuning_and_sampling():
    c = cqubo.generate_c_matrix(10, 5, 1)
    problem = cqubo.build_single_quarter(c, 5)
    outcome = cqubo.tune_single_quarter(problem)
    assert outcome.iterations_used == len(outcome.trace)
    if outcome.converged:
        model, _ = cqubo.encode(problem, {"C1": ("linear", outcome.strengths[0])})
        best = cqubo.ground_state(model)
        assert sum(best.assignment) == 5
        f_min, f_max = cqubo.extremal_objective_values(problem)
        samples = cqubo.simulated_annealing(model, num_reads=50, sweeps_per_read=100, seed=3)
        assert samples.total_count == 50
        scores = cqubo.score(problem, samples, f_min, f_max)
        assert 0.0 <= scores["F"] <= 1.0
        assert scores["best_R"] is None or 0.0 <= scores["best_R"] <= 1.0


def test_search_with_python_callback():
    def solver(strengths):
        return [3 if strengths[0] < 0.7 else 1]

    cfg = cqubo.SearchConfig()
    cfg.target = 1
    outcome = cqubo.single_constraint_search(solver, cfg)
    assert outcome.converged
    assert outcome.strengths[0] >= 0.7


def test_hull_oracle():
    assert cqubo.hull_feasibility_oracle([0.0, 1.0, 1.5, 3.0], 1) is False
    lo, hi = cqubo.hull_alpha1_interval([0.0, 0.0, 1.0], 1)
    assert math.isfinite(lo) and hi > lo


def test_four_quarter_problem_and_search():
    c = cqubo.generate_c_matrix(5, 2, 4)
    problem = cqubo.build_four_quarter(c, 2)
    ids = problem.constraint_ids()
    assert ids[:4] == ["C1-q1", "C1-q2", "C1-q3", "C1-q4"]
    outcome = cqubo.tune_four_quarter(problem, "LQQL", tied=True)
    if outcome.converged:
        assert outcome.strengths[0] == outcome.strengths[1]
