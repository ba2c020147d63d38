import numpy as np
import pytest
from scipy.stats import chisquare

from lsap_mpc.certificate import extract_certificate
from lsap_mpc.model import Sense, WeightMatrix
from lsap_mpc.mpc import ALGORITHMS, run_oblivious
from lsap_mpc.mpc.engine import BACKENDS, CostModel, EventKind
from lsap_mpc.mpc.oblivious import comparison_bits
from lsap_mpc.solvers import SOLVERS, brute_force

from conftest import rand_matrix

EX = WeightMatrix([[1, 2], [2, 4]])


def test_hungarian_example():
    run = run_oblivious("hungarian", EX)
    assert run.result.cost == 4 and len(run.log) > 0
    extract_certificate(EX, run.result)


@pytest.mark.parametrize("algo", ALGORITHMS)
@pytest.mark.parametrize("seed", range(3))
def test_matches_clear_solver_on_shamir(algo, seed):
    W = rand_matrix(3 + seed, seed, hi=2**16)
    run = run_oblivious(algo, W, seed=seed)
    assert run.result.cost == SOLVERS[algo](W).cost == brute_force(W).cost
    extract_certificate(W, run.result)


@pytest.mark.parametrize("algo", ALGORITHMS)
@pytest.mark.parametrize("shape", [(2, 4), (4, 2), (3, 5)])
def test_rectangular(algo, shape):
    W = rand_matrix(shape[0], sum(shape), cols=shape[1], hi=2**16)
    run = run_oblivious(algo, W, backend="ideal")
    assert run.result.cost == brute_force(W).cost
    extract_certificate(W, run.result)


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_counters_identical_across_backends(algo):
    W = rand_matrix(5, 4, hi=2**16)
    runs = [run_oblivious(algo, W, seed=2, backend=b) for b in BACKENDS]
    assert len({tuple(r.cost.counters().items()) for r in runs}) == 1
    assert len({r.log.digest() for r in runs}) == 1
    assert len({r.result.cost for r in runs}) == 1


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_leakage_hygiene(algo):
    W = rand_matrix(5, 8, lo=1000, hi=2**16)
    run = run_oblivious(algo, W, backend="ideal")
    for ev in run.log:
        assert ev.kind in set(EventKind)
        for x in ev.payload:
            # weights are all >= 1000, so an index-sized payload cannot be one
            assert type(x) is bool or (isinstance(x, int) and 0 <= x < 5)


def test_event_kinds_per_algorithm():
    kinds = {a: {e.kind for e in run_oblivious(a, rand_matrix(5, 1, hi=2**16), backend="count").log}
             for a in ALGORITHMS}
    assert EventKind.COVER in kinds["hungarian"] and EventKind.ZERO in kinds["hungarian"]
    assert EventKind.ARGMIN in kinds["sap_acm"] and EventKind.ITERATION in kinds["sap_acm"]
    assert EventKind.BRANCH in kinds["simplex"]


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_countermeasure_preserves_cost(algo):
    W = rand_matrix(5, 12, hi=2**16)
    plain = run_oblivious(algo, W, backend="ideal")
    shuf = run_oblivious(algo, W, backend="ideal", countermeasure=True, seed=3)
    assert shuf.result.cost == plain.result.cost
    extract_certificate(W, shuf.result)


def test_extreme_ranges_stay_within_comparison_bounds():
    top = 2**16 - 1
    for W in (
        WeightMatrix([[top if (i + j) % 2 else 0 for j in range(6)] for i in range(6)]),
        WeightMatrix([[top] * 6] * 5 + [[0] * 6]),
        WeightMatrix([[-top if i == j else top for j in range(5)] for i in range(5)]),
    ):
        for algo in ALGORITHMS:
            assert run_oblivious(algo, W, backend="count").result.cost == brute_force(W).cost


def test_comparison_bits():
    assert comparison_bits("hungarian", 10, 16) == 16 + 4 + 3
    assert comparison_bits("simplex", 10, 16) == 16 + 8 + 3
    assert comparison_bits("auction", 10, 16) > comparison_bits("hungarian", 10, 16)


def test_latency_law():
    run = run_oblivious("sap_acm", rand_matrix(6, 0, hi=2**16), backend="count")
    base = run.cost.simulated_time_us(0)
    for lat in (0, 5, 10, 15, 20):
        assert run.cost.simulated_time_us(lat) - base == run.cost.rounds * lat * 1000
    assert run.simulated_time_at(0) < run.simulated_time_at(20)


def test_cost_model_settings_are_respected():
    model = CostModel(latency_ms=3.0, mul_cost_us=1)
    run = run_oblivious("hungarian", rand_matrix(4, 0, hi=2**16), model, backend="count")
    assert run.cost.latency_ms == 3.0 and run.simulated_time == run.cost.simulated_time(3.0)


def test_op_counts_grow_with_n():
    def avg(n):
        runs = [run_oblivious("hungarian", rand_matrix(n, s, hi=2**16), backend="count") for s in range(5)]
        return np.mean([r.cost.zero_tests for r in runs]), np.mean([r.cost.min_finds for r in runs])

    a, b, c = avg(5), avg(10), avg(20)
    assert a[0] < b[0] < c[0] and a[1] <= b[1] <= c[1]


def test_party_views_look_uniform():
    run = run_oblivious("hungarian", rand_matrix(5, 2, hi=2**16), record_views=True)
    for view in run.views:
        counts = np.bincount([x * 16 // run.prime for x in view], minlength=16)
        assert chisquare(counts).pvalue > 0.01


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        run_oblivious("nope", EX)
    with pytest.raises(ValueError):
        run_oblivious("hungarian", WeightMatrix([[1]], Sense.MAXIMIZE))
