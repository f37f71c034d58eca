"""Finite automata as matrix assignments for circuits.

Each symbol ``b`` of a complete DFA gives a 0-1 matrix ``M_b`` with
``M_b[q, q'] = 1`` iff ``delta(q, b) = q'``; a word's matrix is the ordered
product of its letters' matrices, so ``M_w[q0, qf] = 1`` exactly when the
word drives ``q0`` to ``qf``. Substituting such matrices into a circuit
filters its monomials through the automaton.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Sequence

from .algebra import Field, SquareMatrix
from .circuit import ArithCircuit, eval_on_matrices

__all__ = [
    "Dfa",
    "LayeredWeightAutomaton",
    "WeightOutOfRange",
    "transition_matrices",
    "word_matrix",
    "encode_monomial",
    "monomial_dfa",
    "run_circuit_on_automaton",
    "build_weighted_automaton",
]


class WeightOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class Dfa:
    """Complete DFA; ``delta[q][k]`` is the successor of ``q`` on ``alphabet[k]``."""

    num_states: int
    alphabet: tuple
    delta: tuple
    start: int
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "delta", tuple(tuple(row) for row in self.delta))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.num_states < 1 or not self.alphabet:
            raise ValueError("a DFA needs at least one state and one symbol")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("repeated alphabet symbol")
        if len(self.delta) != self.num_states:
            raise ValueError(f"transition table has {len(self.delta)} rows for {self.num_states} states")
        for q, row in enumerate(self.delta):
            if len(row) != len(self.alphabet):
                raise ValueError(f"state {q}: transition undefined for some symbol")
            for t in row:
                if not 0 <= t < self.num_states:
                    raise ValueError(f"state {q}: successor {t} out of range")
        if not 0 <= self.start < self.num_states:
            raise ValueError("start state out of range")
        if any(not 0 <= f < self.num_states for f in self.finals):
            raise ValueError("final state out of range")

    @cached_property
    def symbol_index(self) -> dict:
        return {s: k for k, s in enumerate(self.alphabet)}

    def step(self, q: int, symbol: Hashable) -> int:
        return self.delta[q][self.symbol_index[symbol]]

    def run(self, word: Sequence, q: int | None = None) -> int:
        q = self.start if q is None else q
        idx = self.symbol_index
        for s in word:
            q = self.delta[q][idx[s]]
        return q

    def accepts(self, word: Sequence) -> bool:
        return self.run(word) in self.finals

    def reachable(self) -> list[int]:
        """States reachable from the start, in ascending order."""
        seen = {self.start}
        stack = [self.start]
        while stack:
            q = stack.pop()
            for t in self.delta[q]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return sorted(seen)


def transition_matrices(a: Dfa, field: Field) -> list[SquareMatrix]:
    """One 0-1 matrix per symbol, in alphabet order."""
    return [
        SquareMatrix.functional([a.delta[q][k] for q in range(a.num_states)], field)
        for k in range(len(a.alphabet))
    ]


def word_matrix(a: Dfa, w: Sequence, field: Field) -> SquareMatrix:
    """``M_{w_1} ... M_{w_k}``; the identity for the empty word."""
    # a word matrix is functional, so track the composed map directly
    return SquareMatrix.functional([a.run(w, q) for q in range(a.num_states)], field)


def encode_monomial(word: Sequence[int]) -> str:
    """Binary code of a word: x_i becomes ``0 1^i 0``."""
    return "".join("0" + "1" * i + "0" for i in word)


def monomial_dfa(m: Sequence[int], n: int | None = None) -> Dfa:
    """String matcher for ``encode_monomial(m)`` with an explicit dead state.

    States ``0..L`` count matched prefix bits (``L`` accepting), ``L + 1`` is dead.
    """
    if n is not None and any(not 1 <= i <= n for i in m):
        raise ValueError(f"word {tuple(m)} uses a variable outside [1, {n}]")
    code = encode_monomial(m)
    L = len(code)
    dead = L + 1
    delta = []
    for q in range(L + 2):
        row = []
        for bit in "01":
            row.append(q + 1 if q < L and code[q] == bit else dead)
        delta.append(row)
    return Dfa(L + 2, ("0", "1"), delta, 0, frozenset({L}))


def variable_matrices(a: Dfa, n: int, field: Field) -> list[SquareMatrix]:
    """``M_{v_i}`` for i = 1..n, where ``v_i`` is the binary code of x_i."""
    return [word_matrix(a, encode_monomial((i,)), field) for i in range(1, n + 1)]


def run_circuit_on_automaton(c: ArithCircuit, a: Dfa) -> SquareMatrix:
    """Output matrix of ``c`` with x_i replaced by the matrix of its binary code."""
    if set(a.alphabet) != {"0", "1"}:
        raise ValueError("run_circuit_on_automaton needs a DFA over the symbols '0' and '1'")
    return eval_on_matrices(c, variable_matrices(a, c.num_vars, c.field))


class LayeredWeightAutomaton:
    """DFA over x_1..x_n tracking (position, accumulated weight).

    States are ``(0, 0)``, every ``(i, V)`` with ``1 <= i <= d`` and
    ``1 <= V <= 2 n d^2``, and a sink. Reading x_j in ``(i, V)`` with ``i < d``
    moves to ``(i + 1, V + w(i + 1, j))``; everything else falls into the sink,
    including sums past ``2 n d^2`` (reachable only from unreachable states).
    """

    def __init__(self, n: int, d: int, weights):
        if n < 1 or d < 1:
            raise ValueError("n and d must be positive")
        if weights.shape != (d, n):
            raise WeightOutOfRange(f"weights cover {weights.shape}, need ({d}, {n})")
        top = 2 * d * n
        for (i, j), v in weights.items():
            if not 1 <= v <= top:
                raise WeightOutOfRange(f"w({i}, {j}) = {v} outside [1, {top}]")
        self.n = n
        self.d = d
        self.weights = weights
        self.max_weight = 2 * n * d * d
        self.num_states = 2 * n * d ** 3 + 2
        self.start = 0
        self.sink = self.num_states - 1
        delta = []
        for q in range(self.num_states):
            if q == self.sink:
                delta.append([self.sink] * n)
                continue
            i, V = self.label(q)
            if i == d:
                delta.append([self.sink] * n)
                continue
            row = []
            for j in range(1, n + 1):
                nv = V + weights.at(i + 1, j)
                row.append(self.index(i + 1, nv) if nv <= self.max_weight else self.sink)
            delta.append(row)
        self.dfa = Dfa(self.num_states, tuple(range(1, n + 1)), delta, 0, frozenset())

    def index(self, i: int, V: int) -> int:
        if i == 0:
            if V != 0:
                raise ValueError("layer 0 only has weight 0")
            return 0
        if not (1 <= i <= self.d and 1 <= V <= self.max_weight):
            raise ValueError(f"no state ({i}, {V})")
        return 1 + (i - 1) * self.max_weight + (V - 1)

    def label(self, q: int):
        """``(i, V)`` for a non-sink state, ``None`` for the sink."""
        if q == 0:
            return (0, 0)
        if q == self.sink:
            return None
        i, r = divmod(q - 1, self.max_weight)
        return (i + 1, r + 1)

    def final_states(self):
        """Every ``(t, V)`` query with its state index, t = 0 first (the empty word)."""
        yield (0, 0), 0
        for t in range(1, self.d + 1):
            for V in range(1, self.max_weight + 1):
                yield (t, V), self.index(t, V)

    def matrices(self, field: Field) -> list[SquareMatrix]:
        return transition_matrices(self.dfa, field)

    def accessible_matrices(self, field: Field) -> tuple[list[int], list[SquareMatrix]]:
        """Transition matrices restricted to states reachable from the start.

        The reachable set is closed under every transition, so products of the
        restricted matrices are the restrictions of the full products.
        """
        states = self.dfa.reachable()
        pos = {q: k for k, q in enumerate(states)}
        mats = [
            SquareMatrix.functional([pos[self.dfa.delta[q][k]] for q in states], field)
            for k in range(self.n)
        ]
        return states, mats

    def __repr__(self):
        return f"LayeredWeightAutomaton(n={self.n}, d={self.d}, states={self.num_states})"


def build_weighted_automaton(n: int, d: int, weights) -> LayeredWeightAutomaton:
    return LayeredWeightAutomaton(n, d, weights)
