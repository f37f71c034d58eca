"""End-to-end acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary. Each test also enforces its time limit.
"""

import contextlib
import io
import itertools
import json
import random
import time

import pytest

from ncpit.algebra import RATIONALS, NoNontrivialSolution
from ncpit.automata import Dfa, build_weighted_automaton, run_circuit_on_automaton
from ncpit.circuit import expand_bruteforce, formal_degree, random_bool_circuit, random_circuit
from ncpit.cli import main
from ncpit.corpus import corpus
from ncpit.isolation import (SetFamily, estimate_isolation_probability, estimate_ks_isolation_probability,
                             random_form_family, random_vector_set, sample_weights, vv_experiment)
from ncpit.ncpoly import commutative_project
from ncpit.pit import (construct_fooling_polynomial, extract_coefficient, fooling_constraints,
                       ks_commutative_pit, nc_pit, pit_statistics, univariate_image)
from ncpit.seeding import trial_rng

from conftest import COMMUTATOR, F101, SQUARE, accepted_coefficient_sum, exact_isolation_probability, \
    exact_rank, exact_vv_probability

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def time_limit(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f}s, limit {seconds}s"


def test_criterion_01_oracle_equivalence():
    with time_limit(60):
        cs = corpus(100, seed=2024)
        zeros = 0
        for k, c in enumerate(cs):
            assert c.num_vars <= 3 and formal_degree(c) <= 4 and len(c.gates) <= 30
            assert c.field in (RATIONALS, F101)
            truth = expand_bruteforce(c).is_zero()
            zeros += truth
            v = nc_pit(c, trials=20, seed=k)
            assert v.is_zero == truth, f"corpus circuit {k}"
        assert 20 <= zeros <= 80
    print(f"oracle equivalence: 100/100 agree, {zeros} zero instances")


def test_criterion_02_per_trial_detection():
    with time_limit(60):
        fixed = [c for c in corpus(60, seed=11) if not expand_bruteforce(c).is_zero()][:10]
        assert len(fixed) == 10
        rates = []
        for k, c in enumerate(fixed):
            est = pit_statistics(c, 400, seed=k)
            rates.append(est.value)
            assert est.value >= 0.5 - 3 * (0.25 / 400) ** 0.5, f"circuit {k}: rate {est.value}"
    print(f"per-trial detection: min rate {min(rates):.3f} over 10 circuits (threshold 0.425)")


def _random_dfa(rng):
    k = rng.randint(1, 6)
    delta = [[rng.randrange(k), rng.randrange(k)] for _ in range(k)]
    finals = {q for q in range(k) if rng.random() < 0.4} or {rng.randrange(k)}
    return Dfa(k, ("0", "1"), delta, 0, finals)


def test_criterion_03_automaton_identity():
    with time_limit(30):
        rng = random.Random(3)
        for _ in range(50):
            fld = rng.choice([RATIONALS, F101])
            c = random_circuit(rng.randint(1, 3), rng.randint(3, 30), rng.randint(0, 4), fld, rng)
            a = _random_dfa(rng)
            out = run_circuit_on_automaton(c, a)
            f = expand_bruteforce(c)
            for qf in sorted(a.finals):
                single = Dfa(a.num_states, a.alphabet, a.delta, a.start, {qf})
                assert out.entry(a.start, qf) == accepted_coefficient_sum(f, single, fld)


def test_criterion_04_coefficient_extraction():
    with time_limit(30):
        checked = 0
        for c in corpus(20, seed=4):
            f = expand_bruteforce(c)
            d = formal_degree(c)
            for t in range(d + 1):
                for w in itertools.product(range(1, c.num_vars + 1), repeat=t):
                    assert extract_coefficient(c, w) == f.coeff_of(w)
                    checked += 1
    print(f"coefficient extraction: {checked} words checked exactly")


def _fixed_families():
    rng = random.Random(5)
    fams = []
    while len(fams) < 5:
        sets = [{u for u in range(1, 11) if rng.random() < rng.choice([0.2, 0.5])} for _ in range(rng.randint(2, 40))]
        fams.append(SetFamily.explicit(10, sets))
    while len(fams) < 10:
        fam = SetFamily.from_circuit(random_bool_circuit(10, rng.randint(12, 25), rng))
        if len(fam) >= 2:
            fams.append(fam)
    return fams


def test_criterion_05_isolation_bound():
    with time_limit(30):
        lows = []
        for k, fam in enumerate(_fixed_families()):
            est = estimate_isolation_probability(fam, 20, 2000, seed=k)
            lows.append(est.value)
            assert est.value >= 0.5 - est.half_width, f"family {k}: {est.value}"
        sets = [{1}, {2}, {1, 2}]
        exact = exact_isolation_probability(sets, 2, 4)
        assert exact == 0.75
        est = estimate_isolation_probability(SetFamily.explicit(2, sets), 4, 2000, seed=99)
        assert abs(est.value - float(exact)) <= est.half_width
    print(f"isolation: min estimate {min(lows):.3f}; n=2 case {est.value:.3f} vs exact 0.75")


def test_criterion_06_linear_form_bound():
    with time_limit(30):
        vals = []
        for k in range(5):
            forms = random_form_family(4, 3, 20, trial_rng(k, 0, "forms"))
            assert len(set(forms.forms)) == 20
            est = estimate_ks_isolation_probability(forms, 2000, seed=k)
            vals.append(est.value)
            assert est.value >= 0.5 - est.half_width
    print(f"linear forms: min unique-min frequency {min(vals):.3f}")


def test_criterion_07_commutative_test():
    with time_limit(60):
        nonzero = 0
        cs = corpus(100, seed=7)
        for k, c in enumerate(cs):
            truth = not commutative_project(expand_bruteforce(c))
            v = ks_commutative_pit(c, trials=20, seed=k)
            assert v.is_zero == truth, f"circuit {k}"
            if not v.is_zero:
                nonzero += 1
                d = v.degree_bound
                poly = univariate_image(c, v.witness.weights, d * 2 * c.num_vars * d)
                assert any(poly)
                assert tuple((e, x) for e, x in enumerate(poly) if x) == v.witness.univariate
    print(f"commutative test: 100/100 agree, {nonzero} NonZero witnesses reproduced")


def test_criterion_08_fooling_polynomial():
    found = {2: 0, 3: 0}
    with time_limit(120):
        for n in (2, 3):
            for k in (1, 2, 3):
                for seed in range(6):
                    coll = [sample_weights((n, n), 2 * n * n, trial_rng(seed, j, "fool")) for j in range(k)]
                    words, rows = fooling_constraints(n, coll)
                    if exact_rank(rows, len(words), RATIONALS) == n ** n:
                        with pytest.raises(NoNontrivialSolution):
                            construct_fooling_polynomial(n, coll, RATIONALS)
                        continue
                    f = construct_fooling_polynomial(n, coll, RATIONALS).polynomial
                    assert not f.is_zero() and all(len(w) == n for w in f.terms)
                    for w in coll:
                        assert f.evaluate(build_weighted_automaton(n, n, w).matrices(RATIONALS)).is_zero()
                    found[n] += 1
        assert found[2] > 0 and found[3] > 0
        w1 = sample_weights((1, 1), 2, trial_rng(0, 0, "fool"))
        with pytest.raises(NoNontrivialSolution):
            construct_fooling_polynomial(1, [w1], RATIONALS)
    print(f"fooling: verified polynomials n=2: {found[2]}, n=3: {found[3]}; n=1 has none")


def test_criterion_09_valiant_vazirani():
    with time_limit(30):
        rng = random.Random(9)
        low = 1.0
        for k in range(10):
            S = random_vector_set(5, rng.randint(1, 16), rng)
            est = vv_experiment(S, 5, 10_000, seed=k)
            low = min(low, est.value)
            assert est.value >= 0.25 - est.half_width, f"set {k}: {est.value}"
        est = vv_experiment([(1, 0)], 2, 10_000, seed=10)
        enumerated = exact_vv_probability([(1, 0)], 2)
    print(f"VV: min estimate {low:.3f}; t=2 single vector {est.value:.4f}, enumeration gives {enumerated}")
    assert abs(est.value - 0.75) <= est.half_width, (
        f"exact case: estimate {est.value:.4f} is not within {est.half_width:.4f} of 3/4; "
        f"exhaustive enumeration of (w1, w2) gives {enumerated}")


def _cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([str(a) for a in argv])
    assert code == 0
    return json.loads(buf.getvalue())


def test_criterion_10_determinism(tmp_path):
    (tmp_path / "comm.nc").write_text(COMMUTATOR)
    (tmp_path / "sq.nc").write_text(SQUARE)
    (tmp_path / "pair.fam").write_text("1\n2\n1 2\n")
    runs = {
        "pit-nc": ["pit-nc", "--circuit", tmp_path / "comm.nc", "--trials", 20],
        "pit-comm": ["pit-comm", "--circuit", tmp_path / "sq.nc"],
        "iso-estimate": ["iso-estimate", "--family", tmp_path / "pair.fam", "--samples", 1000],
        "iso-cover": ["iso-cover", "--family", tmp_path / "pair.fam"],
        "iso-defeat": ["iso-defeat", "--n", 3, "--samples", 2],
        "ks-iso": ["ks-iso", "--samples", 1000],
        "vv": ["vv", "--trials", 1000],
        "fool": ["fool", "--n", 3, "--samples", 1],
        "stats": ["stats", "--circuit", tmp_path / "comm.nc", "--trials", 400],
        "bench": ["bench", "--samples", 6],
    }
    for name, argv in runs.items():
        argv = argv + ["--seed", 13]
        one = _cli(argv + ["--jobs", 1])
        four = _cli(argv + ["--jobs", 4])
        assert one["results"] == four["results"], name
        assert one["seed"] == four["seed"] == 13
