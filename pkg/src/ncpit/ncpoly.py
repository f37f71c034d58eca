"""Sparse noncommutative polynomials (elements of the free algebra).

A polynomial maps words -- tuples of 1-based variable indices -- to nonzero
coefficients. The empty tuple is the empty word. Words are ordered by length
and then lexicographically, which fixes the order of every listing.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping

from .algebra import Field, FieldElement, FieldMismatch, SquareMatrix, DimensionMismatch

__all__ = [
    "Word",
    "NcPoly",
    "ArityMismatch",
    "TermLimitExceeded",
    "DEFAULT_TERM_LIMIT",
    "poly_arith",
    "commutative_project",
    "word_key",
]

Word = tuple  # tuple[int, ...]

DEFAULT_TERM_LIMIT = 10**6


class ArityMismatch(ValueError):
    pass


class TermLimitExceeded(RuntimeError):
    pass


def word_key(w: Word):
    return (len(w), w)


class NcPoly:
    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, field: Field, terms: Mapping[Word, object] = (), *, limit=DEFAULT_TERM_LIMIT):
        if n < 1:
            raise ArityMismatch("a polynomial needs at least one variable")
        self.n = n
        self.field = field
        clean = {}
        for w, c in dict(terms).items():
            w = tuple(w)
            for i in w:
                if not 1 <= i <= n:
                    raise ArityMismatch(f"variable x_{i} outside [1, {n}]")
            c = field.coerce(c)
            if c:
                clean[w] = c
        if len(clean) > limit:
            raise TermLimitExceeded(f"{len(clean)} terms > limit {limit}")
        self.terms = clean

    @classmethod
    def _raw(cls, n, field, terms):
        # trusted constructor: terms already canonical and nonzero
        f = cls.__new__(cls)
        f.n, f.field, f.terms = n, field, terms
        return f

    @classmethod
    def zero(cls, n: int, field: Field) -> "NcPoly":
        return cls._raw(n, field, {})

    @classmethod
    def const(cls, n: int, field: Field, c) -> "NcPoly":
        return cls(n, field, {(): c})

    @classmethod
    def var(cls, n: int, field: Field, i: int) -> "NcPoly":
        return cls(n, field, {(i,): 1})

    def _check(self, other: "NcPoly"):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if other.n != self.n:
            raise ArityMismatch(f"{self.n} vs {other.n} variables")

    def add(self, other: "NcPoly", *, limit=DEFAULT_TERM_LIMIT) -> "NcPoly":
        self._check(other)
        reduce = self.field.reduce
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = reduce(out.get(w, 0) + c)
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        if len(out) > limit:
            raise TermLimitExceeded(f"{len(out)} terms > limit {limit}")
        return NcPoly._raw(self.n, self.field, out)

    def mul(self, other: "NcPoly", *, limit=DEFAULT_TERM_LIMIT) -> "NcPoly":
        self._check(other)
        acc = defaultdict(int)
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                acc[u + v] += a * b
            if len(acc) > limit:
                raise TermLimitExceeded(f"more than {limit} terms")
        reduce = self.field.reduce
        out = {}
        for w, c in acc.items():
            c = reduce(c)
            if c:
                out[w] = c
        return NcPoly._raw(self.n, self.field, out)

    def scale(self, c) -> "NcPoly":
        c = self.field.coerce(c)
        reduce = self.field.reduce
        if not c:
            return NcPoly.zero(self.n, self.field)
        return NcPoly._raw(self.n, self.field, {w: reduce(c * v) for w, v in self.terms.items()})

    __add__ = add
    __mul__ = mul

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self.add(-other)

    def coeff(self, w: Word):
        return self.terms.get(tuple(w), 0)

    def coeff_of(self, w: Word) -> FieldElement:
        return FieldElement(self.field, self.coeff(w))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Length of the longest word; -1 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=-1)

    def words(self) -> list[Word]:
        return sorted(self.terms, key=word_key)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.n == other.n and self.field == other.field and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(
            f"{c}*" + ("".join(f"x{i}" for i in w) if w else "1") for w, c in
            ((w, self.terms[w]) for w in self.words())
        )
        return f"NcPoly({body or '0'}; n={self.n}, {self.field})"

    def to_listing(self) -> list[str]:
        """One line per term: ``<coeff> <i_1> ... <i_k>``; the empty word is ``-``."""
        return [
            f"{self.field.format(self.terms[w])} " + (" ".join(map(str, w)) if w else "-")
            for w in self.words()
        ]

    @classmethod
    def from_listing(cls, lines, n: int, field: Field) -> "NcPoly":
        terms = {}
        for line in lines:
            parts = line.split()
            if not parts:
                continue
            w = () if parts[1:] == ["-"] else tuple(int(x) for x in parts[1:])
            terms[w] = field.parse_scalar(parts[0])
        return cls(n, field, terms)

    def evaluate(self, matrices) -> SquareMatrix:
        """Sum of ``c * M_{i_1} ... M_{i_k}`` over the terms, one matrix per variable."""
        if len(matrices) != self.n:
            raise ArityMismatch(f"{len(matrices)} matrices for {self.n} variables")
        dim = matrices[0].dim
        for m in matrices:
            if m.field != self.field:
                raise FieldMismatch(f"{m.field} matrix for {self.field} polynomial")
            if m.dim != dim:
                raise DimensionMismatch("matrices differ in dimension")
        total = SquareMatrix.zero(dim, self.field)
        for w in self.words():
            prod = SquareMatrix.identity(dim, self.field)
            for i in w:
                prod = prod @ matrices[i - 1]
            total = total + prod.scale(self.terms[w])
        return total


def poly_arith(op: str, *args, limit=DEFAULT_TERM_LIMIT):
    """Dispatcher: add(f, g), mul(f, g), scale(c, f), coeff_of(f, w), is_zero(f), degree(f)."""
    if op == "add":
        return args[0].add(args[1], limit=limit)
    if op == "mul":
        return args[0].mul(args[1], limit=limit)
    if op == "scale":
        c, f = args
        return f.scale(c)
    if op == "coeff_of":
        f, w = args
        return f.coeff_of(w)
    if op == "is_zero":
        return args[0].is_zero()
    if op == "degree":
        return args[0].degree()
    raise ValueError(f"unknown polynomial op {op!r}")


def commutative_project(f: NcPoly) -> dict[tuple[int, ...], object]:
    """Merge words with the same multiset of letters into exponent vectors."""
    acc = defaultdict(int)
    for w, c in f.terms.items():
        e = [0] * f.n
        for i in w:
            e[i - 1] += 1
        acc[tuple(e)] += c
    out = {}
    for e, c in acc.items():
        c = f.field.reduce(c)
        if c:
            out[e] = c
    return out
