import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ncpit.algebra import RATIONALS, SquareMatrix
from ncpit.automata import (Dfa, WeightOutOfRange, build_weighted_automaton, encode_monomial, monomial_dfa,
                            run_circuit_on_automaton, transition_matrices, word_matrix)
from ncpit.circuit import CircuitBuilder, eval_on_matrices, expand_bruteforce
from ncpit.isolation import WeightAssignment, sample_weights

from conftest import (F101, SQUARE, accepted_coefficient_sum, circ, code_of, dense_mul, simulate,
                      small_circuits, small_dfas)

PARITY = Dfa(2, ("0", "1"), [[0, 1], [1, 0]], 0, {1})


def test_identity_transitions_give_identity():
    a = Dfa(3, ("a",), [[0], [1], [2]], 0, {0})
    assert transition_matrices(a, RATIONALS)[0] == SquareMatrix.identity(3, RATIONALS)


def test_parity_swap_matrix():
    m0, m1 = transition_matrices(PARITY, RATIONALS)
    assert m1.to_dense() == [[0, 1], [1, 0]]
    assert m0.to_dense() == [[1, 0], [0, 1]]


def test_empty_word_is_identity():
    assert word_matrix(PARITY, "", F101) == SquareMatrix.identity(2, F101)


def test_one_state_dfa():
    a = Dfa(1, ("0", "1"), [[0, 0]], 0, set())
    assert word_matrix(a, "0110", RATIONALS).to_dense() == [[1]]


def test_word_matrix_product_by_hand():
    mu = word_matrix(PARITY, "01", RATIONALS)
    mv = word_matrix(PARITY, "11", RATIONALS)
    assert mu.to_dense() == [[0, 1], [1, 0]]
    assert mv.to_dense() == [[1, 0], [0, 1]]
    assert word_matrix(PARITY, "0111", RATIONALS) == mu @ mv


def test_encodings():
    assert encode_monomial((1,)) == "010"
    assert encode_monomial((2,)) == "0110"
    assert encode_monomial((1, 2)) == "0100110"
    assert encode_monomial(()) == ""


def test_monomial_dfa_single_variable():
    a = monomial_dfa((1,))
    assert a.accepts("010")
    assert not a.accepts("0110") and not a.accepts("")


def test_monomial_dfa_entry_is_one():
    m = (2, 1, 1)
    a = monomial_dfa(m)
    (qf,) = a.finals
    assert word_matrix(a, encode_monomial(m), RATIONALS).entry(a.start, qf) == 1


def test_monomial_dfa_rejects_other_words():
    rng = random.Random(8)
    m = (1, 2)
    a = monomial_dfa(m, 3)
    seen = 0
    while seen < 50:
        other = tuple(rng.randint(1, 3) for _ in range(rng.randint(0, 4)))
        if other == m:
            continue
        seen += 1
        assert not a.accepts(encode_monomial(other))


def test_circuit_on_automaton_zero():
    b = CircuitBuilder(1)
    c = b.build(b.sub(b.var(1), b.var(1)))
    for m in [(), (1,), (1, 1)]:
        a = monomial_dfa(m)
        out = run_circuit_on_automaton(c, a)
        assert all(out.entry(a.start, f) == 0 for f in a.finals)


def test_circuit_on_automaton_picks_coefficient():
    b = CircuitBuilder(1)
    c = b.build(b.mul(b.const(5), b.var(1)))
    a = monomial_dfa((1,))
    (qf,) = a.finals
    assert run_circuit_on_automaton(c, a).entry(a.start, qf) == 5
    a = monomial_dfa((1, 2))
    (qf,) = a.finals
    assert run_circuit_on_automaton(circ(SQUARE), a).entry(a.start, qf) == 1


def test_layered_state_count():
    w = WeightAssignment(2, (1, 1, 1, 1), 8, 2)
    assert build_weighted_automaton(2, 2, w).num_states == 2 * 2 * 2**3 + 2


def test_layered_transitions():
    w = WeightAssignment(2, (3, 1, 1, 5), 8, 2)  # w(1,1)=3, w(2,2)=5
    a = build_weighted_automaton(2, 2, w)
    dfa = a.dfa
    assert a.label(dfa.step(a.start, 1)) == (1, 3)
    assert a.label(dfa.run((1, 2))) == (2, 8)


def test_weights_must_fit_range():
    with pytest.raises((WeightOutOfRange, ValueError)):
        build_weighted_automaton(2, 2, WeightAssignment(2, (9, 1, 1, 1), 9, 2))


@settings(max_examples=50)
@given(small_dfas(alphabet=("a", "b", "c")), st.lists(st.sampled_from("abc"), max_size=6),
       st.lists(st.sampled_from("abc"), max_size=6))
def test_word_matrix_is_multiplicative(a, u, v):
    mu, mv = word_matrix(a, u, RATIONALS), word_matrix(a, v, RATIONALS)
    assert word_matrix(a, u + v, RATIONALS) == mu @ mv
    assert (mu @ mv).to_dense() == dense_mul(mu.to_dense(), mv.to_dense(), RATIONALS)
    for row in mu.to_dense():
        assert sorted(set(row)) in ([0, 1], [1]) and sum(row) == 1


@settings(max_examples=60)
@given(small_circuits(n_max=3, deg_max=4), small_dfas(max_states=6))
def test_automaton_entry_sums_accepted_coefficients(c, a):
    out = run_circuit_on_automaton(c, a)
    f = expand_bruteforce(c)
    got = sum(out.entry(a.start, q) for q in a.finals)
    assert c.field.reduce(got) == accepted_coefficient_sum(f, a, c.field)


@settings(max_examples=30)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10**6))
def test_layered_automaton_reaches_weight_sum(n, d, seed):
    w = sample_weights((d, n), 2 * d * n, random.Random(seed))
    a = build_weighted_automaton(n, d, w)
    for t in range(d + 2):
        for u in itertools.product(range(1, n + 1), repeat=t):
            q = simulate(a.dfa.delta, a.dfa.alphabet, a.start, u)
            if t > d:
                assert q == a.sink
            else:
                assert a.label(q) == (t, sum(w.at(i + 1, j) for i, j in enumerate(u)))


@settings(max_examples=20)
@given(small_circuits(n_max=2, deg_max=3), st.integers(0, 10**6))
def test_accessible_restriction_matches_full(c, seed):
    from conftest import _canon
    from ncpit.circuit import formal_degree
    d = max(formal_degree(c), 1)
    w = sample_weights((d, c.num_vars), 2 * d * c.num_vars, random.Random(seed))
    a = build_weighted_automaton(c.num_vars, d, w)
    states, mats = a.accessible_matrices(c.field)
    full = eval_on_matrices(c, a.matrices(c.field))
    part = eval_on_matrices(c, mats)
    i = states.index(a.start)
    for k, q in enumerate(states):
        assert _canon(part.entry(i, k), c.field) == full.entry(a.start, q)
    assert all(full.entry(a.start, q) == 0 for q in range(a.num_states) if q not in states)


def test_code_oracle_agrees():
    assert code_of((3, 1)) == encode_monomial((3, 1))
