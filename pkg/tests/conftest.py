"""Shared fixtures, hypothesis strategies and independent oracles.

The oracles here deliberately avoid the package's own algorithms: dense
list-of-lists matrices, direct DFA simulation over transition tables and
exhaustive enumeration of small probability spaces.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from ncpit.algebra import RATIONALS, Field
from ncpit.circuit import parse_circuit, random_circuit

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F101 = Field(101)
FIELDS = (RATIONALS, F101, Field(7))


def circ(text: str):
    return parse_circuit(text)


SQUARE = """\
ncircuit q 2
g1 = var 1
g2 = var 2
g3 = add g1 g2
g4 = mul g3 g3
output g4
"""

COMMUTATOR = """\
ncircuit q 2
g1 = var 1
g2 = var 2
g3 = mul g1 g2
g4 = mul g2 g1
g5 = const -1
g6 = mul g5 g4
g7 = add g3 g6
output g7
"""


@pytest.fixture
def square():
    return circ(SQUARE)


@pytest.fixture
def commutator():
    return circ(COMMUTATOR)


# -- strategies ---------------------------------------------------------------

fields = st.sampled_from(FIELDS)


def scalars(fld: Field):
    if fld.p is None:
        return st.fractions(min_value=-20, max_value=20, max_denominator=7).map(fld.reduce)
    return st.integers(0, fld.p - 1)


@st.composite
def field_and_scalars(draw, k=3):
    fld = draw(fields)
    return fld, [draw(scalars(fld)) for _ in range(k)]


@st.composite
def small_circuits(draw, n_max=3, deg_max=4, gates_max=30, flds=(RATIONALS, F101)):
    fld = draw(st.sampled_from(flds))
    n = draw(st.integers(1, n_max))
    d = draw(st.integers(0, deg_max))
    g = draw(st.integers(1, gates_max))
    seed = draw(st.integers(0, 2**32))
    return random_circuit(n, g, d, fld, random.Random(seed))


@st.composite
def small_dfas(draw, alphabet=("0", "1"), max_states=5):
    from ncpit.automata import Dfa
    k = draw(st.integers(1, max_states))
    delta = [[draw(st.integers(0, k - 1)) for _ in alphabet] for _ in range(k)]
    finals = draw(st.sets(st.integers(0, k - 1)))
    return Dfa(k, alphabet, delta, 0, frozenset(finals))


# -- oracles ------------------------------------------------------------------

def dense_mul(a, b, fld: Field):
    n = len(a)
    out = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[_canon(v, fld) for v in row] for row in out]


def _canon(v, fld: Field):
    if fld.p is not None:
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, fld.p) % fld.p
        return v % fld.p
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def simulate(delta, alphabet, q, string):
    """Run a transition table directly (no package code)."""
    for s in string:
        q = delta[q][alphabet.index(s)]
    return q


def code_of(word):
    return "".join("0" + "1" * i + "0" for i in word)


def accepted_coefficient_sum(poly, dfa, fld: Field):
    """Sum of the coefficients of monomials whose binary code the DFA accepts."""
    total = 0
    for w, c in poly.terms.items():
        if simulate(dfa.delta, dfa.alphabet, dfa.start, code_of(w)) in dfa.finals:
            total += c
    return _canon(total, fld)


def exact_isolation_probability(sets, n, range_max):
    """P(unique minimum) over all range_max^n weight vectors."""
    sets = [frozenset(s) for s in set(map(frozenset, sets))]
    good = 0
    total = 0
    for w in itertools.product(range(1, range_max + 1), repeat=n):
        weights = sorted(sum(w[u - 1] for u in s) for s in sets)
        total += 1
        good += len(weights) == 1 or weights[0] != weights[1]
    return Fraction(good, total)


def exact_vv_probability(S, t):
    """p_t(S) by enumerating every (w_1, ..., w_t) in ({0,1}^t)^t."""
    vecs = list(itertools.product((0, 1), repeat=t))
    good = 0
    total = 0
    for ws in itertools.product(vecs, repeat=t):
        total += 1
        for i in range(1, t + 1):
            Si = [v for v in S if all(sum(a * b for a, b in zip(v, w)) % 2 == 0 for w in ws[:i])]
            if len(Si) == 1:
                good += 1
                break
    return Fraction(good, total)


def exact_nc_detection_rate(poly, d):
    """Single-trial detection probability of the layered-weight test, by enumeration.

    A trial detects f iff some (length, weight) class of monomials has a
    nonzero coefficient sum; weights range over [2dn]^(d*n).
    """
    n = poly.n
    R = 2 * d * n
    good = total = 0
    for vals in itertools.product(range(1, R + 1), repeat=d * n):
        classes = {}
        for w, c in poly.terms.items():
            key = (len(w), sum(vals[i * n + (j - 1)] for i, j in enumerate(w)))
            classes[key] = classes.get(key, 0) + c
        total += 1
        good += any(_canon(v, poly.field) != 0 for v in classes.values())
    return Fraction(good, total)


def exact_rank(rows, ncols, fld: Field):
    """Rank by sympy (rationals) or by a plain modular elimination (prime fields)."""
    if not rows:
        return 0
    if fld.p is None:
        import sympy
        return sympy.Matrix(rows).rank()
    m = [[v % fld.p for v in r] for r in rows]
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, fld.p)
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] * inv
                m[i] = [(x - f * y) % fld.p for x, y in zip(m[i], m[r])]
        r += 1
    return r


# -- acceptance summary -------------------------------------------------------

_criteria: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        outcome = "PASS" if report.passed else "FAIL"
        prev = _criteria.get(name)
        if prev is None or outcome == "FAIL":
            _criteria[name] = (outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        outcome, secs = _criteria[name]
        num = int(name.split("_")[2])
        label = name.split("_", 3)[3].replace("_", " ")
        terminalreporter.write_line(f"criterion {num:2d} {outcome}  {label} ({secs:.1f}s)")
