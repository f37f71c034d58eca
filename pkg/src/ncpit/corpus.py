"""Seeded corpora of small circuits, about half of them computing zero.

Random circuits are almost never identically zero, so zero instances are
built from identities whose cancellation only shows up after expansion:

  * ``c - sum_of_words(expand(c))``
  * ``a (b + e) - a b - a e`` for random subcircuits a, b, e
  * ``c + (-1) c`` as a last resort when the others exceed the gate budget
"""

from __future__ import annotations

import random

from .algebra import RATIONALS, Field
from .circuit import ArithCircuit, CircuitBuilder, circuit_from_poly, expand_bruteforce, random_circuit

DEFAULT_FIELDS = (RATIONALS, Field(101))


def _sop_difference(c: ArithCircuit) -> ArithCircuit:
    b = CircuitBuilder(c.num_vars, c.field)
    left = b.embed(c)
    right = b.embed(circuit_from_poly(expand_bruteforce(c)))
    return b.build(b.sub(left, right))


def _distributive(n, d, fld, rng) -> ArithCircuit:
    da = rng.randint(0, d)
    parts = [random_circuit(n, rng.randint(1, 5), deg, fld, rng) for deg in (da, d - da, d - da)]
    b = CircuitBuilder(n, fld)
    a, x, y = (b.embed(p) for p in parts)
    if rng.random() < 0.5:
        lhs = b.mul(a, b.add(x, y))
        rhs = b.add(b.mul(a, x), b.mul(a, y))
    else:
        lhs = b.mul(b.add(x, y), a)
        rhs = b.add(b.mul(x, a), b.mul(y, a))
    return b.build(b.sub(lhs, rhs))


def _negation(c: ArithCircuit) -> ArithCircuit:
    b = CircuitBuilder(c.num_vars, c.field)
    g = b.embed(c)
    return b.build(b.add(g, b.neg(g)))


def corpus_circuit(index: int, seed: int, n_max: int = 3, d_max: int = 4, max_gates: int = 30,
                   fields=DEFAULT_FIELDS) -> ArithCircuit:
    """Circuit ``index`` of the corpus for ``seed``; kinds rotate random / zero / random / zero."""
    rng = random.Random(f"corpus:{seed}:{index}")
    fld = fields[index % len(fields)]
    n = rng.randint(1, n_max)
    d = rng.randint(1, d_max)
    kind = index % 4
    if kind in (0, 2):
        # best of a few draws, so nonzero members usually carry several monomials
        d = max(d, min(2, d_max))
        tries = [random_circuit(n, rng.randint(max_gates // 2, max_gates), d, fld, rng) for _ in range(4)]
        return max(tries, key=lambda c: len(expand_bruteforce(c)))
    for _ in range(20):
        if kind == 1:
            c = _sop_difference(random_circuit(n, rng.randint(3, 10), d, fld, rng))
        else:
            c = _distributive(n, d, fld, rng)
        if len(c.gates) <= max_gates:
            return c
    return _negation(random_circuit(n, max(1, (max_gates - 3) // 2), d, fld, rng))


def corpus(count: int, seed: int, **kw) -> list[ArithCircuit]:
    return [corpus_circuit(k, seed, **kw) for k in range(count)]
