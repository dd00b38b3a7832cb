import numpy as np
import pytest

from gametree import analytics, branching, exact_dist
from gametree.errors import CapExceeded
from gametree.rng import make_rng
from gametree.worst_case import worst_input


def test_simulate_level_zero_is_the_root():
    assert branching.simulate(2, 0, 1, make_rng(0)) == branching.Population(0, 1)
    assert branching.simulate(2, 0, 0, make_rng(0)) == branching.Population(1, 0)


def test_simulate_reproducible():
    a = branching.simulate(3, 4, 1, make_rng(42))
    b = branching.simulate(3, 4, 1, make_rng(42))
    assert a == b


def test_step_agrees_with_simulate():
    pop = branching.Population(0, 1)
    rng1, rng2 = make_rng(9), make_rng(9)
    for _ in range(3):
        pop = branching.step(pop, 2, rng1)
    assert pop == branching.simulate(2, 3, 1, rng2)


def test_population_cap():
    with pytest.raises(CapExceeded) as info:
        branching.simulate(2, 8, 1, make_rng(0), max_population=100)
    assert info.value.cap == "max-population"


@pytest.mark.parametrize("m", [2, 3])
def test_offspring_means_match_mean_matrix(m):
    means, ses = branching.empirical_mean_matrix(m, 20_000, seed=3)
    M = analytics.mean_matrix(m).entries  # indexed [child type][parent type]
    for parent in (0, 1):
        for child in (0, 1):
            assert abs(means[child, parent] - float(M[child][parent])) < 5 * ses[child, parent] + 1e-9


def test_monte_carlo_reproducible_and_serializable():
    a = branching.monte_carlo(2, 3, 1, runs=500, seed=17)
    b = branching.monte_carlo(2, 3, 1, runs=500, seed=17)
    assert a.to_json() == b.to_json()
    assert branching.MonteCarloStats.from_json(a.to_json()) == a
    assert a.expected == "403/16"
    assert a.to_csv().startswith("m,k,start,runs,seed")


def test_worker_split_does_not_change_results():
    serial = branching.sample_totals(2, 3, 1, runs=40, seed=5)
    parallel = branching.sample_totals(2, 3, 1, runs=40, seed=5, workers=2)
    assert np.array_equal(serial, parallel)


def test_single_run_has_no_variance():
    st = branching.monte_carlo(2, 2, 1, runs=1, seed=0)
    assert st.variance is None and st.standard_error is None


def test_chi_square_detects_a_wrong_law():
    stats = branching.monte_carlo(2, 2, 1, runs=20_000, seed=2)
    right = exact_dist.exact_cost_pmf(worst_input(2, 2, 1))
    wrong = exact_dist.exact_cost_pmf(worst_input(2, 2, 0))
    assert branching.chi_square_gof(stats.histogram, right)[2] > 1e-3
    assert branching.chi_square_gof(stats.histogram, wrong)[2] < 1e-6


def test_offspring_rejects_bad_type():
    with pytest.raises(ValueError):
        branching.offspring(2, 2, make_rng(0))
