import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from lsap_mpc.model import (
    Assignment,
    DualSolution,
    InstanceTooLarge,
    MatrixFormatError,
    Sense,
    WeightMatrix,
    balance,
    dumps_matrix,
    loads_matrix,
    read_matrix,
    to_lp,
    to_max_form,
    write_matrix,
)
from lsap_mpc.solvers import brute_force

from conftest import rand_matrix


def test_entries_must_fit_bit_length():
    WeightMatrix([[2**15 - 1, -(2**15 - 1)]])
    with pytest.raises((InstanceTooLarge, ValueError)):
        WeightMatrix([[2**16]])
    WeightMatrix([[2**16]], bits=18)


@pytest.mark.parametrize("w", [[], [[]], [[1, 2], [3]]])
def test_rejects_degenerate_shapes(w):
    with pytest.raises(ValueError):
        WeightMatrix(w)


def test_assignment_invariants():
    W = WeightMatrix([[1, 2], [2, 4]])
    a = Assignment.from_pairs(W, [(0, 1), (1, 0)])
    assert a.cost == 4 and a.is_complete(W)
    with pytest.raises(ValueError):
        Assignment.from_pairs(W, [(0, 1), (1, 1)])


def test_dual_feasibility_predicate():
    W = WeightMatrix([[1, 2], [2, 4]])
    assert DualSolution((0, 1), (1, 2)).is_feasible(W)
    assert not DualSolution((1, 1), (1, 2)).is_feasible(W)


def test_balance_pads_with_zero_rows():
    B = balance(WeightMatrix([[1, 2, 3], [4, 5, 6]]))
    assert B.matrix.w == ((1, 2, 3), (4, 5, 6), (0, 0, 0))
    assert B.padded and (B.orig_rows, B.orig_cols) == (2, 3)


def test_balance_is_identity_on_square():
    W = rand_matrix(4, 1)
    B = balance(W)
    assert B.matrix == W and not B.padded
    assert balance(B.matrix).matrix == B.matrix


@pytest.mark.parametrize("seed", range(20))
def test_balanced_optimum_matches_rectangular(seed):
    W = rand_matrix(2, seed, cols=4)
    B = balance(W)
    padded = brute_force(B.matrix)
    assert W.cost(B.strip(padded.pairs)) == padded.cost == brute_force(W).cost


def test_max_form_examples():
    assert to_max_form(WeightMatrix([[1, 2], [3, 4]]), 4).w == ((3, 2), (1, 0))
    M = to_max_form(WeightMatrix([[7]]))
    assert M.w == ((0,),) and M.sense is Sense.MAXIMIZE
    with pytest.raises(ValueError):
        to_max_form(M)


@pytest.mark.parametrize("seed", range(10))
def test_max_form_preserves_optimal_pairs(seed):
    W = rand_matrix(5, seed, hi=20)
    M = to_max_form(W)
    top = max(map(max, W.w))
    perms = list(itertools.permutations(range(5)))
    cmin = [W.cost(enumerate(p)) for p in perms]
    cmax = [M.cost(enumerate(p)) for p in perms]
    assert all(b == 5 * top - a for a, b in zip(cmin, cmax))
    assert {p for p, c in zip(perms, cmin) if c == min(cmin)} == {
        p for p, c in zip(perms, cmax) if c == max(cmax)
    }


def test_lp_dimensions():
    lp = to_lp(to_max_form(rand_matrix(10, 0)))
    assert (lp.m, lp.n) == (20, 100) and np.array(lp.A).shape == (20, 100)
    lp2 = to_lp(to_max_form(WeightMatrix([[1, 2], [2, 4]])))
    assert (lp2.n, lp2.m, lp2.b) == (4, 4, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        to_lp(WeightMatrix([[1, 2], [2, 4]]))


@pytest.mark.parametrize("seed", range(10))
def test_lp_relaxation_is_exact(seed):
    M = to_max_form(rand_matrix(4, seed))
    lp = to_lp(M)
    res = linprog(-np.array(lp.c), A_ub=lp.A, b_ub=lp.b, bounds=(0, None), method="highs")
    assert round(-res.fun) == brute_force(M).cost


def test_file_round_trip(tmp_path):
    W = WeightMatrix([[1, -2, 3], [4, 5, -6]], Sense.MAXIMIZE)
    path = tmp_path / "m.txt"
    write_matrix(W, path)
    assert path.read_text() == "2 3 maximize\n1 -2 3\n4 5 -6\n"
    assert read_matrix(path) == W
    assert dumps_matrix(loads_matrix(dumps_matrix(W))) == dumps_matrix(W)


def test_csv_formats():
    assert loads_matrix("2,2,minimize\n1,2\n2,4\n").w == ((1, 2), (2, 4))
    assert loads_matrix("a,b,c\n1,2,3\n").shape == (1, 3)


@pytest.mark.parametrize("text", ["", "2 2\n1 2 3\n", "x y\n", "2,2,minimize\n1,2\n"])
def test_malformed_files(text):
    with pytest.raises(MatrixFormatError):
        loads_matrix(text)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-(2**15) + 1, 2**15 - 1), min_size=3, max_size=3), min_size=1, max_size=4))
def test_text_round_trip_property(rows):
    W = WeightMatrix(rows)
    assert loads_matrix(dumps_matrix(W)) == W
