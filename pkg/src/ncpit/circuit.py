"""Arithmetic and boolean circuits: representation, text format, evaluation.

Gates are tuples in topological order and reference earlier gates by their
0-based position:

    ("var", i)        x_i, 1 <= i <= n
    ("const", c)      canonical scalar of the circuit's field
    ("add", a, b)
    ("mul", a, b)     ordered product: gate a times gate b

Boolean circuits use ("input", i), ("const", 0|1), ("and", a, b),
("or", a, b) and ("not", a).

Text format (one gate per line, ``#`` comments)::

    ncircuit q 2            # or: ncircuit p:101 2
    g1 = var 1
    g2 = const -1/2
    g3 = mul g1 g2
    output g3
"""

from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

from .algebra import RATIONALS, AlgebraError, DimensionMismatch, Field, FieldMismatch, SquareMatrix
from .ncpoly import DEFAULT_TERM_LIMIT, NcPoly, TermLimitExceeded, ArityMismatch

__all__ = [
    "ArithCircuit",
    "BoolCircuit",
    "CircuitBuilder",
    "ParseError",
    "ValidationError",
    "DegreeOverflow",
    "TermLimitExceeded",
    "ArityMismatch",
    "DEFAULT_DEGREE_LIMIT",
    "parse_circuit",
    "load_circuit",
    "serialize",
    "formal_degree",
    "evaluate",
    "eval_on_matrices",
    "expand_bruteforce",
    "eval_bool",
    "random_circuit",
    "random_bool_circuit",
    "circuit_from_poly",
]

DEFAULT_DEGREE_LIMIT = 10**6


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class DegreeOverflow(ValueError):
    pass


def _check_refs(gates, k, refs, line=None):
    for r in refs:
        if not isinstance(r, int) or not 0 <= r < k:
            raise ValidationError(f"gate {k + 1} references g{r + 1}, which is not an earlier gate", line)


@dataclass(frozen=True)
class ArithCircuit:
    field: Field
    num_vars: int
    gates: tuple
    output: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        if self.num_vars < 1:
            raise ValidationError("num_vars must be at least 1")
        if not self.gates:
            raise ValidationError("circuit has no gates")
        for k, g in enumerate(self.gates):
            op = g[0]
            if op == "var":
                if len(g) != 2 or not 1 <= g[1] <= self.num_vars:
                    raise ValidationError(f"g{k + 1}: variable index {g[1:]} outside [1, {self.num_vars}]")
            elif op == "const":
                if len(g) != 2 or not self.field.contains(g[1]):
                    raise ValidationError(f"g{k + 1}: constant {g[1:]} is not a canonical element of {self.field}")
            elif op in ("add", "mul"):
                if len(g) != 3:
                    raise ValidationError(f"g{k + 1}: {op} takes two operands")
                _check_refs(self.gates, k, g[1:])
            else:
                raise ValidationError(f"g{k + 1}: unknown gate {op!r}")
        if not 0 <= self.output < len(self.gates):
            raise ValidationError(f"output g{self.output + 1} does not exist")

    @cached_property
    def live(self) -> tuple[int, ...]:
        """Gates the output depends on, in topological order."""
        need = {self.output}
        for k in range(self.output, -1, -1):
            if k in need and self.gates[k][0] in ("add", "mul"):
                need.update(self.gates[k][1:])
        return tuple(sorted(need))

    def __len__(self):
        return len(self.gates)

    def __str__(self):
        return serialize(self)


@dataclass(frozen=True)
class BoolCircuit:
    num_inputs: int
    gates: tuple
    output: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        if self.num_inputs < 1:
            raise ValidationError("num_inputs must be at least 1")
        if not self.gates:
            raise ValidationError("circuit has no gates")
        for k, g in enumerate(self.gates):
            op = g[0]
            if op == "input":
                if len(g) != 2 or not 1 <= g[1] <= self.num_inputs:
                    raise ValidationError(f"g{k + 1}: input index {g[1:]} outside [1, {self.num_inputs}]")
            elif op == "const":
                if len(g) != 2 or g[1] not in (0, 1):
                    raise ValidationError(f"g{k + 1}: boolean constant must be 0 or 1")
            elif op in ("and", "or"):
                if len(g) != 3:
                    raise ValidationError(f"g{k + 1}: {op} takes two operands")
                _check_refs(self.gates, k, g[1:])
            elif op == "not":
                if len(g) != 2:
                    raise ValidationError(f"g{k + 1}: not takes one operand")
                _check_refs(self.gates, k, g[1:])
            else:
                raise ValidationError(f"g{k + 1}: unknown gate {op!r}")
        if not 0 <= self.output < len(self.gates):
            raise ValidationError(f"output g{self.output + 1} does not exist")

    def __str__(self):
        return serialize(self)


class CircuitBuilder:
    """Incremental construction; every method returns the new gate's index."""

    def __init__(self, num_vars: int, field: Field = RATIONALS):
        self.num_vars = num_vars
        self.field = field
        self.gates: list[tuple] = []
        self._vars: dict[int, int] = {}

    def _push(self, gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def var(self, i: int) -> int:
        if i not in self._vars:
            self._vars[i] = self._push(("var", i))
        return self._vars[i]

    def const(self, c) -> int:
        return self._push(("const", self.field.coerce(c)))

    def add(self, a: int, b: int) -> int:
        return self._push(("add", a, b))

    def mul(self, a: int, b: int) -> int:
        return self._push(("mul", a, b))

    def neg(self, a: int) -> int:
        return self.mul(self.const(-1), a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def sum(self, gates: Sequence[int]) -> int:
        acc = gates[0]
        for g in gates[1:]:
            acc = self.add(acc, g)
        return acc

    def product(self, gates: Sequence[int]) -> int:
        acc = gates[0]
        for g in gates[1:]:
            acc = self.mul(acc, g)
        return acc

    def embed(self, c: ArithCircuit) -> int:
        """Copy the live part of ``c`` into this builder; returns its output gate."""
        if c.field != self.field or c.num_vars != self.num_vars:
            raise ValidationError("embedded circuit must share field and arity")
        pos = {}
        for k in c.live:
            g = c.gates[k]
            if g[0] == "var":
                pos[k] = self.var(g[1])
            elif g[0] == "const":
                pos[k] = self._push(g)
            else:
                pos[k] = self._push((g[0], pos[g[1]], pos[g[2]]))
        return pos[c.output]

    def build(self, output: int | None = None) -> ArithCircuit:
        out = len(self.gates) - 1 if output is None else output
        return ArithCircuit(self.field, self.num_vars, tuple(self.gates), out)


# -- text format ------------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _gate_id(token: str, lineno: int, col: int) -> int:
    if len(token) < 2 or token[0] != "g" or not token[1:].isdigit():
        raise ParseError(f"expected gate id like g3, got {token!r}", lineno, col)
    return int(token[1:])


def _tokens(line: str):
    """Yield (column, token) pairs, columns 1-based."""
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def parse_circuit(text: str | bytes):
    """Parse an ``ncircuit`` or ``bcircuit`` document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not UTF-8 ({e.reason})", 1, 1) from None
    lines = [(i + 1, _strip(l)) for i, l in enumerate(text.splitlines())]
    lines = [(i, l) for i, l in lines if l.strip()]
    if not lines:
        raise ParseError("empty circuit file", 1, 1)
    lineno, header = lines[0]
    toks = list(_tokens(header))
    kind = toks[0][1]
    if kind == "ncircuit":
        if len(toks) != 3:
            raise ParseError("header must be: ncircuit <field> <num_vars>", lineno, 1)
        try:
            fld = Field.parse(toks[1][1])
        except AlgebraError as e:
            raise ValidationError(str(e), lineno) from None
        arity_tok = toks[2]
    elif kind == "bcircuit":
        if len(toks) != 2:
            raise ParseError("header must be: bcircuit <num_inputs>", lineno, 1)
        fld = None
        arity_tok = toks[1]
    else:
        raise ParseError(f"unknown header {kind!r}; expected ncircuit or bcircuit", lineno, toks[0][0])
    if not arity_tok[1].isdigit():
        raise ParseError(f"expected a positive integer, got {arity_tok[1]!r}", lineno, arity_tok[0])
    arity = int(arity_tok[1])
    if arity < 1:
        raise ValidationError("number of variables must be at least 1", lineno)

    ids: dict[int, int] = {}
    gates: list[tuple] = []
    output = None
    last_id = 0
    for lineno, line in lines[1:]:
        toks = list(_tokens(line))
        if output is not None:
            raise ParseError("content after the output line", lineno, toks[0][0])
        if toks[0][1] == "output":
            if len(toks) != 2:
                raise ParseError("expected: output g<k>", lineno, toks[0][0])
            gid = _gate_id(toks[1][1], lineno, toks[1][0])
            if gid not in ids:
                raise ValidationError(f"output gate g{gid} is not declared", lineno)
            output = ids[gid]
            continue
        if len(toks) < 3 or toks[1][1] != "=":
            raise ParseError("expected: g<k> = <op> <args>", lineno, toks[0][0])
        gid = _gate_id(toks[0][1], lineno, toks[0][0])
        if gid <= last_id:
            raise ValidationError(f"gate id g{gid} not greater than previous g{last_id}", lineno)
        col, op = toks[2]
        args = toks[3:]

        def ref(t):
            g = _gate_id(t[1], lineno, t[0])
            if g not in ids:
                raise ValidationError(f"reference to undeclared or later gate g{g}", lineno)
            return ids[g]

        def nargs(k):
            if len(args) != k:
                raise ParseError(f"{op} takes {k} argument(s), got {len(args)}", lineno, col)

        if fld is not None:
            if op == "var":
                nargs(1)
                if not args[0][1].isdigit():
                    raise ParseError(f"bad variable index {args[0][1]!r}", lineno, args[0][0])
                i = int(args[0][1])
                if not 1 <= i <= arity:
                    raise ValidationError(f"variable index {i} outside [1, {arity}]", lineno)
                gate = ("var", i)
            elif op == "const":
                nargs(1)
                try:
                    c = fld.parse_scalar(args[0][1])
                except AlgebraError as e:
                    raise ValidationError(str(e), lineno) from None
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad constant {args[0][1]!r}", lineno, args[0][0]) from None
                gate = ("const", c)
            elif op in ("add", "mul"):
                nargs(2)
                gate = (op, ref(args[0]), ref(args[1]))
            else:
                raise ParseError(f"unknown gate type {op!r}", lineno, col)
        else:
            if op == "input":
                nargs(1)
                if not args[0][1].isdigit():
                    raise ParseError(f"bad input index {args[0][1]!r}", lineno, args[0][0])
                i = int(args[0][1])
                if not 1 <= i <= arity:
                    raise ValidationError(f"input index {i} outside [1, {arity}]", lineno)
                gate = ("input", i)
            elif op == "const":
                nargs(1)
                if args[0][1] not in ("0", "1"):
                    raise ValidationError(f"boolean constant must be 0 or 1, got {args[0][1]!r}", lineno)
                gate = ("const", int(args[0][1]))
            elif op in ("and", "or"):
                nargs(2)
                gate = (op, ref(args[0]), ref(args[1]))
            elif op == "not":
                nargs(1)
                gate = ("not", ref(args[0]))
            else:
                raise ParseError(f"unknown gate type {op!r}", lineno, col)
        ids[gid] = len(gates)
        gates.append(gate)
        last_id = gid
    if output is None:
        raise ParseError("missing output line", lines[-1][0] + 1, 1)
    if fld is not None:
        return ArithCircuit(fld, arity, tuple(gates), output)
    return BoolCircuit(arity, tuple(gates), output)


def load_circuit(path) -> ArithCircuit | BoolCircuit:
    return parse_circuit(Path(path).read_bytes())


def serialize(c: ArithCircuit | BoolCircuit) -> str:
    """Canonical text: gates numbered g1, g2, ... in order."""
    if isinstance(c, ArithCircuit):
        lines = [f"ncircuit {c.field} {c.num_vars}"]
    else:
        lines = [f"bcircuit {c.num_inputs}"]
    for k, g in enumerate(c.gates):
        op = g[0]
        if op in ("var", "input"):
            rhs = f"{op} {g[1]}"
        elif op == "const":
            rhs = f"const {g[1]}"
        else:
            rhs = op + "".join(f" g{r + 1}" for r in g[1:])
        lines.append(f"g{k + 1} = {rhs}")
    lines.append(f"output g{c.output + 1}")
    return "\n".join(lines) + "\n"


# -- evaluation ---------------------------------------------------------------

def evaluate(c: ArithCircuit, var: Callable, const: Callable, add: Callable, mul: Callable):
    """Generic bottom-up evaluation over the live gates.

    ``var(i)`` and ``const(c)`` produce leaf values; ``add``/``mul`` combine
    them, ``mul`` keeping left-right order.
    """
    vals = {}
    gates = c.gates
    for k in c.live:
        g = gates[k]
        op = g[0]
        if op == "var":
            vals[k] = var(g[1])
        elif op == "const":
            vals[k] = const(g[1])
        elif op == "add":
            vals[k] = add(vals[g[1]], vals[g[2]])
        else:
            vals[k] = mul(vals[g[1]], vals[g[2]])
    return vals[c.output]


def formal_degree(c: ArithCircuit, limit: int = DEFAULT_DEGREE_LIMIT) -> int:
    """Syntactic degree: var 1, const 0, add max, mul sum."""

    def mul(a, b):
        s = a + b
        if s > limit:
            raise DegreeOverflow(f"formal degree exceeds {limit}")
        return s

    return evaluate(c, lambda i: 1, lambda v: 0, max, mul)


def eval_on_matrices(c: ArithCircuit, assignment: Sequence[SquareMatrix]) -> SquareMatrix:
    """Substitute ``assignment[i-1]`` for x_i; a constant c becomes c times the identity."""
    if len(assignment) != c.num_vars:
        raise ArityMismatch(f"{len(assignment)} matrices for {c.num_vars} variables")
    dim = assignment[0].dim
    for m in assignment:
        if m.field != c.field:
            raise FieldMismatch(f"{m.field} matrix for a circuit over {c.field}")
        if m.dim != dim:
            raise DimensionMismatch("assignment matrices differ in dimension")
    return evaluate(
        c,
        lambda i: assignment[i - 1],
        lambda v: SquareMatrix.scalar(dim, c.field, v),
        lambda a, b: a + b,
        lambda a, b: a @ b,
    )


def expand_bruteforce(c: ArithCircuit, max_terms: int = DEFAULT_TERM_LIMIT) -> NcPoly:
    """Full expansion into a sum of words; independent of the matrix path."""
    n, fld = c.num_vars, c.field
    reduce = fld.reduce
    vals: list[dict] = [None] * len(c.gates)
    for k in c.live:
        g = c.gates[k]
        op = g[0]
        if op == "var":
            vals[k] = {(g[1],): 1}
        elif op == "const":
            vals[k] = {(): g[1]} if g[1] else {}
        elif op == "add":
            out = dict(vals[g[1]])
            for w, v in vals[g[2]].items():
                s = reduce(out.get(w, 0) + v)
                if s:
                    out[w] = s
                else:
                    del out[w]
            vals[k] = out
        else:
            left, right = vals[g[1]], vals[g[2]]
            out = {}
            for u, a in left.items():
                for v, b in right.items():
                    w = u + v
                    out[w] = out.get(w, 0) + a * b
                if len(out) > max_terms:
                    raise TermLimitExceeded(f"gate g{k + 1}: more than {max_terms} terms")
            vals[k] = {w: r for w, r in ((w, reduce(x)) for w, x in out.items()) if r}
        if len(vals[k]) > max_terms:
            raise TermLimitExceeded(f"gate g{k + 1}: more than {max_terms} terms")
    return NcPoly._raw(n, fld, vals[c.output])


def eval_bool(c: BoolCircuit, bits: Sequence[int]) -> int:
    if len(bits) != c.num_inputs:
        raise ArityMismatch(f"{len(bits)} bits for {c.num_inputs} inputs")
    vals = []
    for g in c.gates:
        op = g[0]
        if op == "input":
            vals.append(1 if bits[g[1] - 1] else 0)
        elif op == "const":
            vals.append(g[1])
        elif op == "and":
            vals.append(vals[g[1]] & vals[g[2]])
        elif op == "or":
            vals.append(vals[g[1]] | vals[g[2]])
        else:
            vals.append(1 - vals[g[1]])
    return vals[c.output]


# -- generators -------------------------------------------------------------

def _random_const(fld: Field, rng: random.Random):
    if fld.p is None:
        return fld.reduce(Fraction(rng.choice([-3, -2, -1, 1, 1, 2, 3]), rng.choice([1, 1, 1, 2, 3])))
    return rng.randrange(1, fld.p)


def random_circuit(n: int, max_gates: int, degree_bound: int, field: Field, rng: random.Random) -> ArithCircuit:
    """Random circuit with at most ``max_gates`` gates and formal degree <= ``degree_bound``.

    Operands favour recent gates so that most gates feed the output; the
    output is always the last gate.
    """
    if n < 1 or max_gates < 1 or degree_bound < 0:
        raise ValueError("n and max_gates must be positive, degree_bound non-negative")
    gates: list[tuple] = []
    degs: list[int] = []

    def pick():
        k = len(gates)
        if rng.random() < 0.6:
            return rng.randrange(max(0, k - 3), k)
        return rng.randrange(k)

    # a few leading leaves so that several variables can appear
    leading = min(max_gates - 1, n + 1, max(1, max_gates // 3))
    for k in range(max_gates):
        r = rng.random()
        if k < max(leading, 1) or (r < 0.2 and k < max_gates - 1):
            if degree_bound >= 1 and rng.random() < 0.75:
                gates.append(("var", rng.randint(1, n)))
                degs.append(1)
            else:
                gates.append(("const", _random_const(field, rng)))
                degs.append(0)
            continue
        if r < 0.65:
            for _ in range(8):
                a, b = pick(), pick()
                if degs[a] + degs[b] <= degree_bound:
                    gates.append(("mul", a, b))
                    degs.append(degs[a] + degs[b])
                    break
            else:
                a, b = pick(), pick()
                gates.append(("add", a, b))
                degs.append(max(degs[a], degs[b]))
        else:
            a, b = pick(), pick()
            gates.append(("add", a, b))
            degs.append(max(degs[a], degs[b]))
    return ArithCircuit(field, n, tuple(gates), len(gates) - 1)


def random_bool_circuit(n: int, num_gates: int, rng: random.Random) -> BoolCircuit:
    gates: list[tuple] = [("input", i) for i in range(1, n + 1)][:num_gates]
    while len(gates) < num_gates:
        k = len(gates)
        op = rng.choice(["and", "or", "not", "and", "or"])
        if op == "not":
            gates.append(("not", rng.randrange(k)))
        else:
            gates.append((op, rng.randrange(k), rng.randrange(k)))
    return BoolCircuit(n, tuple(gates), len(gates) - 1)


def circuit_from_poly(f: NcPoly) -> ArithCircuit:
    """Sum-of-words circuit computing ``f`` (a zero polynomial gives ``const 0``)."""
    b = CircuitBuilder(f.n, f.field)
    terms = []
    for w in f.words():
        c = f.terms[w]
        if not w:
            terms.append(b.const(c))
            continue
        mono = b.product([b.var(i) for i in w])
        terms.append(mono if c == 1 else b.mul(b.const(c), mono))
    if not terms:
        return b.build(b.const(0))
    return b.build(b.sum(terms))
