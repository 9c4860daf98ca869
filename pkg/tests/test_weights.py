import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linkrank.graph import WebGraph
from linkrank.weights import compute_weights, degree_weights, write_weights_csv
from oracles import symbolic_weights
from strategies import web_graphs


def test_g1_weights(g1):
    w = compute_weights(g1)
    assert w.ca.tolist() == [2.0, 0.0, 0.0]
    assert w.ch.tolist() == [0.0, 1.0, 1.0]


def test_g1_matches_symbolic(g1):
    # node 0: indeg 2, outdeg 0; node 1: indeg 0, outdeg 1
    assert symbolic_weights(2, 0) == (Fraction(2), Fraction(0))
    assert symbolic_weights(0, 1) == (Fraction(0), Fraction(1))


def test_balanced_is_half(two_cycle):
    w = compute_weights(two_cycle)
    assert w.ca.tolist() == w.ch.tolist() == [0.5, 0.5]


def test_isolated_is_zero():
    w = compute_weights(WebGraph.from_edges(3, [(0, 1)]))
    assert w.ca[2] == w.ch[2] == 0.0


@pytest.mark.parametrize("indeg, outdeg", [(5, 2), (1, 4), (3, 3), (10, 0), (0, 7)])
def test_against_symbolic(indeg, outdeg):
    ca, ch = degree_weights(np.array([indeg]), np.array([outdeg]))
    exact_ca, exact_ch = symbolic_weights(indeg, outdeg)
    assert ca[0] == float(exact_ca)
    assert ch[0] == float(exact_ch)


@given(web_graphs(max_n=10))
def test_transpose_swaps_weights(g):
    w, wr = compute_weights(g), compute_weights(g.reversed())
    np.testing.assert_array_equal(w.ca, wr.ch)
    np.testing.assert_array_equal(w.ch, wr.ca)


@given(web_graphs(max_n=10))
def test_invariants(g):
    w = compute_weights(g)
    assert np.all(w.ca >= 0) and np.all(w.ch >= 0)
    for i in range(g.n):
        ind, out, deg = g.indeg[i], g.outdeg[i], g.deg[i]
        if deg == 0:
            assert w.ca[i] == w.ch[i] == 0
        elif ind > out:
            assert w.ca[i] > 0
            assert w.ch[i] <= out / deg
        elif ind == out:
            assert w.ca[i] == w.ch[i] == 0.5


@given(st.integers(0, 200), st.integers(0, 200))
def test_one_more_inlink_never_lowers_ca(indeg, outdeg):
    if indeg < outdeg:
        indeg, outdeg = outdeg, indeg
    before, _ = degree_weights(np.array([indeg]), np.array([outdeg]))
    after, _ = degree_weights(np.array([indeg + 1]), np.array([outdeg]))
    assert after[0] >= before[0]


@given(st.integers(1, 10_000), st.integers(0, 10_000))
def test_ca_times_deg_is_integral_when_more_in(indeg, outdeg):
    if indeg <= outdeg:
        return
    ca, _ = degree_weights(np.array([indeg]), np.array([outdeg]))
    assert ca[0] * (indeg + outdeg) == pytest.approx(indeg * (indeg - outdeg), rel=1e-15)


def test_csv_dump(g1):
    buf = io.StringIO()
    write_weights_csv(compute_weights(g1), buf)
    assert buf.getvalue().splitlines() == ["id,ca,ch", "0,2.0,0.0", "1,0.0,1.0", "2,0.0,1.0"]
