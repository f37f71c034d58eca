"""Randomized identity tests and the fooling-polynomial construction.

``nc_pit`` is the isolation-lemma test for noncommutative circuits: random
weights on [d] x [n] drive a layered automaton whose state after reading a
word is (length, total weight). The automata accepting a single (t, V) share
that transition structure and differ only in their accepting state, so one
evaluation of the circuit on the transition matrices answers every query:
the output entry at ``(start, (t, V))`` is the sum of the coefficients of the
monomials of length t and weight V. Zero verdicts can be wrong (probability <= 2^-trials
on nonzero input); NonZero verdicts carry a checkable witness.

``ks_commutative_pit`` is the Klivans-Spielman test: x_i -> y^{w(i)} and an
exact univariate evaluation.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from .algebra import Field, FieldElement, NoNontrivialSolution, nullspace_with_rank
from .automata import build_weighted_automaton, monomial_dfa, run_circuit_on_automaton
from .circuit import ArithCircuit, DegreeOverflow, evaluate, eval_on_matrices, formal_degree
from .isolation import Estimate, WeightAssignment, sample_weights
from .ncpoly import NcPoly
from .seeding import chunks, trial_rng

__all__ = [
    "ResourceLimit",
    "Witness",
    "PitVerdict",
    "FoolingResult",
    "DEFAULT_MATRIX_ENTRY_LIMIT",
    "nc_pit",
    "nc_pit_trial",
    "verify_witness",
    "extract_coefficient",
    "ks_commutative_pit",
    "ks_trial",
    "univariate_image",
    "construct_fooling_polynomial",
    "fooling_constraints",
    "pit_statistics",
    "NoNontrivialSolution",
]

DEFAULT_MATRIX_ENTRY_LIMIT = 10**9


class ResourceLimit(RuntimeError):
    pass


@dataclass(frozen=True)
class Witness:
    trial: int
    weights: WeightAssignment
    position: tuple          # (t, V) for nc_pit, (exponent,) for the commutative test
    value: object            # nonzero raw scalar of ``field``
    field: Field
    univariate: tuple = ()   # commutative test only: (exponent, coefficient) pairs

    def to_dict(self) -> dict:
        out = {
            "trial": self.trial,
            "weights": self.weights.to_dict(),
            "position": list(self.position),
            "value": str(self.value),
        }
        if self.univariate:
            out["univariate"] = [[e, str(c)] for e, c in self.univariate]
        return out


@dataclass(frozen=True)
class PitVerdict:
    verdict: str             # "Zero" or "NonZero"
    witness: Witness | None
    trials_run: int
    seed: int
    degree_bound: int
    method: str = "nc"

    def __post_init__(self):
        if (self.verdict == "NonZero") != (self.witness is not None):
            raise ValueError("a witness is present exactly for NonZero verdicts")

    @property
    def is_zero(self) -> bool:
        return self.verdict == "Zero"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "trials_run": self.trials_run,
            "seed": self.seed,
            "degree_bound": self.degree_bound,
            "method": self.method,
        }


def _degree(c: ArithCircuit, degree_bound: int | None) -> int:
    d = formal_degree(c) if degree_bound is None else degree_bound
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    # a constant polynomial still needs one layer so that U = [d] x [n] is nonempty
    return max(d, 1)


def _first_success(trial_fn, args: tuple, trials: int, jobs: int):
    """Lowest-index successful trial, identical for any ``jobs``."""
    if jobs <= 1:
        for k in range(trials):
            wit = trial_fn(*args, k)
            if wit is not None:
                return wit
        return None
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        found = list(ex.map(_scan_chunk, [(trial_fn, args, r) for r in chunks(trials, jobs)]))
    found = [w for w in found if w is not None]
    return min(found, key=lambda w: w.trial, default=None)


def _scan_chunk(task):
    trial_fn, args, idx = task
    for k in idx:
        wit = trial_fn(*args, k)
        if wit is not None:
            return wit
    return None


def nc_pit_trial(c: ArithCircuit, d: int, seed: int, k: int) -> Witness | None:
    """Trial ``k``: one weight draw, one circuit evaluation, scan of the start row."""
    n = c.num_vars
    w = sample_weights((d, n), 2 * d * n, trial_rng(seed, k, "nc"))
    auto = build_weighted_automaton(n, d, w)
    states, mats = auto.accessible_matrices(c.field)
    out = eval_on_matrices(c, mats)
    row = out.rows[states.index(auto.start)]
    best = None
    for col, v in row.items():
        q = states[col]
        if q == auto.sink:
            continue
        label = auto.label(q)
        if best is None or label < best[0]:
            best = (label, v)
    if best is None:
        return None
    return Witness(k, w, best[0], best[1], c.field)


def nc_pit(c: ArithCircuit, degree_bound: int | None = None, trials: int = 20, seed: int = 0,
           jobs: int = 1, max_matrix_entries: int = DEFAULT_MATRIX_ENTRY_LIMIT) -> PitVerdict:
    """Noncommutative identity test. NonZero verdicts are certificates."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    d = _degree(c, degree_bound)
    dim = 2 * c.num_vars * d ** 3 + 2
    if dim * dim > max_matrix_entries:
        raise ResourceLimit(f"layered automaton needs {dim}x{dim} matrices (> {max_matrix_entries} entries)")
    wit = _first_success(nc_pit_trial, (c, d, seed), trials, jobs)
    if wit is None:
        return PitVerdict("Zero", None, trials, seed, d, "nc")
    return PitVerdict("NonZero", wit, wit.trial + 1, seed, d, "nc")


def verify_witness(c: ArithCircuit, wit: Witness) -> bool:
    """Re-evaluate on the full (unrestricted) automaton matrices and compare the entry."""
    w = wit.weights
    auto = build_weighted_automaton(c.num_vars, w.d, w)
    out = eval_on_matrices(c, auto.matrices(c.field))
    t, V = wit.position
    entry = out.entry(auto.start, auto.index(t, V))
    return entry != 0 and entry == wit.value


def pit_statistics(c: ArithCircuit, trials: int, seed: int, degree_bound: int | None = None,
                   jobs: int = 1) -> Estimate:
    """Fraction of independent single trials of ``nc_pit`` that report NonZero."""
    d = _degree(c, degree_bound)
    args = (c, d, seed)
    if jobs <= 1:
        hits = sum(nc_pit_trial(*args, k) is not None for k in range(trials))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            hits = sum(ex.map(_count_chunk, [(nc_pit_trial, args, r) for r in chunks(trials, jobs)]))
    return Estimate(hits, trials)


def _count_chunk(task):
    trial_fn, args, idx = task
    return sum(trial_fn(*args, k) is not None for k in idx)


def extract_coefficient(c: ArithCircuit, m) -> FieldElement:
    """Coefficient of the word ``m`` via the automaton that accepts only its code."""
    m = tuple(m)
    auto = monomial_dfa(m, c.num_vars)
    out = run_circuit_on_automaton(c, auto)
    (final,) = auto.finals
    return FieldElement(c.field, out.entry(auto.start, final))


# -- commutative test ------------------------------------------------------------

def univariate_image(c: ArithCircuit, w: WeightAssignment, cap: int) -> list:
    """Dense coefficients of c(y^{w(1)}, ..., y^{w(n)}); DegreeOverflow past ``cap``."""
    fld = c.field
    reduce = fld.reduce

    def trim(p):
        while p and not p[-1]:
            p.pop()
        return p

    def var(i):
        e = w(i)
        if e > cap:
            raise DegreeOverflow(f"y^{e} exceeds the degree cap {cap}")
        return [0] * e + [1]

    def add(a, b):
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = reduce(out[i] + v)
        return trim(out)

    def mul(a, b):
        if not a or not b:
            return []
        top = len(a) + len(b) - 2
        if top > cap:
            raise DegreeOverflow(f"univariate degree {top} exceeds the cap {cap}")
        out = [0] * (top + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim([reduce(v) for v in out])

    return evaluate(c, var, lambda v: [v] if v else [], add, mul)


def ks_trial(c: ArithCircuit, d: int, seed: int, k: int) -> Witness | None:
    n = c.num_vars
    w = sample_weights(n, 2 * n * d, trial_rng(seed, k, "ks"))
    poly = univariate_image(c, w, d * 2 * n * d)
    if not poly:
        return None
    terms = tuple((e, v) for e, v in enumerate(poly) if v)
    e, v = terms[0]
    return Witness(k, w, (e,), v, c.field, terms)


def ks_commutative_pit(c: ArithCircuit, degree_bound: int | None = None, trials: int = 20,
                       seed: int = 0, jobs: int = 1) -> PitVerdict:
    """Commutative identity test; the circuit's multiplication order is ignored."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    d = _degree(c, degree_bound)
    wit = _first_success(ks_trial, (c, d, seed), trials, jobs)
    if wit is None:
        return PitVerdict("Zero", None, trials, seed, d, "ks")
    return PitVerdict("NonZero", wit, wit.trial + 1, seed, d, "ks")


# -- fooling polynomials ---------------------------------------------------------

@dataclass(frozen=True)
class FoolingResult:
    polynomial: NcPoly
    constraints_count: int
    rank: int
    weight_functions_used: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "terms": self.polynomial.to_listing(),
            "num_terms": len(self.polynomial),
            "constraints_count": self.constraints_count,
            "rank": self.rank,
            "weight_functions_used": [w.to_dict() for w in self.weight_functions_used],
        }


def fooling_constraints(n: int, collection) -> tuple[list[tuple], list[list[int]]]:
    """Unknown words (all of length n, sorted) and distinct 0/1 constraint rows.

    For every automaton and every matrix entry (q, q'), the words mapping q to
    q' must have coefficients summing to zero.
    """
    words = list(itertools.product(range(1, n + 1), repeat=n))
    seen = set()
    rows = []
    for w in collection:
        if w.shape != (n, n):
            raise ValueError(f"weights must live on [{n}] x [{n}]")
        dfa = build_weighted_automaton(n, n, w).dfa
        for q in range(dfa.num_states):
            groups: dict[int, list[int]] = {}
            for k, word in enumerate(words):
                groups.setdefault(dfa.run(word, q), []).append(k)
            for members in groups.values():
                key = tuple(members)
                if key not in seen:
                    seen.add(key)
                    row = [0] * len(words)
                    for k in members:
                        row[k] = 1
                    rows.append(row)
    return words, rows


def construct_fooling_polynomial(n: int, weight_collection, field: Field) -> FoolingResult:
    """Nonzero degree-n homogeneous f vanishing on every collection automaton's matrices."""
    if not 1 <= n <= 4:
        raise ValueError("construct_fooling_polynomial supports 1 <= n <= 4")
    collection = list(weight_collection)
    words, rows = fooling_constraints(n, collection)
    sol, r = nullspace_with_rank(rows, len(words), field)
    if sol is None:
        raise NoNontrivialSolution(
            f"{len(rows)} constraints reach full rank {r} on {len(words)} unknowns")
    f = NcPoly(n, field, {w: x.value for w, x in zip(words, sol)})
    for w in collection:
        mats = build_weighted_automaton(n, n, w).matrices(field)
        if not f.evaluate(mats).is_zero():
            raise AssertionError("fooling polynomial does not vanish on its automata")
    if f.is_zero():
        raise AssertionError("fooling polynomial is zero")
    return FoolingResult(f, len(rows), r, collection)
