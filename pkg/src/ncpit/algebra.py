"""Exact scalars and square matrices.

Scalars are plain Python numbers interpreted by a :class:`Field`:

  * rationals are ``int`` when integral and ``fractions.Fraction`` otherwise
    (always in lowest terms, positive denominator);
  * prime-field elements are ``int`` residues in ``[0, p - 1]``.

Containers (matrices, polynomials) carry the field once and store these raw
values, which keeps the inner loops on native integer arithmetic.
:class:`FieldElement` is the tagged scalar used at API boundaries.

Matrices have dense semantics but store each row as a ``{column: value}``
dict of nonzero entries. Transition matrices of automata have one nonzero per
row, and most circuit intermediates stay sparse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "AlgebraError",
    "DivisionByZero",
    "FieldMismatch",
    "DimensionMismatch",
    "NoNontrivialSolution",
    "Field",
    "RATIONALS",
    "FieldElement",
    "SquareMatrix",
    "field_arith",
    "mat_arith",
    "solve_nullspace",
    "nullspace_with_rank",
    "rank",
]

PRIME_LIMIT = 1 << 64


class AlgebraError(ValueError):
    pass


class DivisionByZero(AlgebraError, ZeroDivisionError):
    pass


class FieldMismatch(AlgebraError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class NoNontrivialSolution(AlgebraError):
    pass


def _is_prime(n: int) -> bool:
    # Deterministic Miller-Rabin; these bases are exact for n < 3.3e24.
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """A field: the rationals (``p is None``) or GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p >= PRIME_LIMIT or not _is_prime(self.p):
                raise AlgebraError(f"not a prime below 2^64: {self.p!r}")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``q`` or ``p:<prime>``."""
        text = text.strip()
        if text == "q":
            return RATIONALS
        if text.startswith("p:"):
            try:
                p = int(text[2:])
            except ValueError:
                raise AlgebraError(f"bad field literal {text!r}") from None
            return cls(p)
        raise AlgebraError(f"bad field literal {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "q" if self.p is None else f"p:{self.p}"

    # raw-value operations

    def reduce(self, x):
        """Canonical form of a raw int/Fraction value."""
        if self.p is not None:
            if type(x) is Fraction:
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return x % self.p
        if type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def coerce(self, x):
        """Map an int, Fraction or FieldElement into this field."""
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatch(f"{x.field} element used in {self}")
            return x.value
        if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
            raise TypeError(f"cannot coerce {x!r} into {self}")
        if self.p is not None and type(x) is Fraction and x.denominator % self.p == 0:
            raise DivisionByZero(f"{x} has no image in GF({self.p})")
        return self.reduce(x)

    def contains(self, x) -> bool:
        """True if ``x`` is already a canonical raw value of this field."""
        if isinstance(x, bool):
            return False
        if self.p is not None:
            return type(x) is int and 0 <= x < self.p
        if type(x) is int:
            return True
        return type(x) is Fraction and x.denominator != 1

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("inverse of zero")
        if self.p is not None:
            return pow(x, -1, self.p)
        return self.reduce(Fraction(1) / x)

    def neg(self, x):
        return self.reduce(-x)

    def parse_scalar(self, text: str):
        """Parse a literal such as ``-3``, ``2/7`` or a residue ``5``."""
        if self.p is None:
            return self.reduce(Fraction(text))
        value = int(text)
        if not 0 <= value < self.p:
            raise AlgebraError(f"residue {value} outside [0, {self.p - 1}]")
        return value

    def format(self, x) -> str:
        return str(x)

    def __call__(self, x) -> "FieldElement":
        return FieldElement(self, self.coerce(x))


RATIONALS = Field()


@dataclass(frozen=True)
class FieldElement:
    field: Field
    value: object

    def __post_init__(self):
        if not self.field.contains(self.value):
            raise AlgebraError(f"{self.value!r} is not canonical in {self.field}")

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.reduce(self.value + self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.reduce(self.value - self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.reduce(self._other(other) - self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.reduce(self.value * self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._other(other)).inv()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} in {self.field}"


def field_arith(field: Field, op: str, a, b=None):
    """Single-operation dispatcher: add, sub, mul, inv, neg or eq."""
    x = field(a)
    if op == "inv":
        return x.inv()
    if op == "neg":
        return -x
    y = field(b)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "eq":
        return x == y
    raise ValueError(f"unknown field op {op!r}")


class SquareMatrix:
    """Immutable square matrix over a :class:`Field` with sparse row storage."""

    __slots__ = ("dim", "field", "rows")

    def __init__(self, dim: int, field: Field, rows: Sequence[dict]):
        # rows must already hold canonical nonzero values
        if dim < 1:
            raise DimensionMismatch("dimension must be positive")
        if len(rows) != dim:
            raise DimensionMismatch(f"{len(rows)} rows for dimension {dim}")
        self.dim = dim
        self.field = field
        self.rows = tuple(rows)

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence], field: Field) -> "SquareMatrix":
        dim = len(entries)
        rows = []
        for r in entries:
            if len(r) != dim:
                raise DimensionMismatch("matrix is not square")
            row = {}
            for j, v in enumerate(r):
                v = field.coerce(v)
                if v:
                    row[j] = v
            rows.append(row)
        return cls(dim, field, rows)

    @classmethod
    def identity(cls, dim: int, field: Field) -> "SquareMatrix":
        return cls(dim, field, [{i: 1} for i in range(dim)])

    @classmethod
    def zero(cls, dim: int, field: Field) -> "SquareMatrix":
        return cls(dim, field, [{} for _ in range(dim)])

    @classmethod
    def scalar(cls, dim: int, field: Field, c) -> "SquareMatrix":
        c = field.coerce(c)
        if not c:
            return cls.zero(dim, field)
        return cls(dim, field, [{i: c} for i in range(dim)])

    @classmethod
    def functional(cls, targets: Sequence[int], field: Field) -> "SquareMatrix":
        """0-1 matrix with a single 1 in column ``targets[q]`` of each row ``q``."""
        return cls(len(targets), field, [{t: 1} for t in targets])

    def _check(self, other: "SquareMatrix"):
        if not isinstance(other, SquareMatrix):
            raise TypeError(f"expected SquareMatrix, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if other.dim != self.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")

    def entry(self, i: int, j: int):
        return self.rows[i].get(j, 0)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def to_dense(self) -> list[list]:
        return [[r.get(j, 0) for j in range(self.dim)] for r in self.rows]

    def restrict(self, states: Sequence[int]) -> "SquareMatrix":
        """Principal submatrix on ``states``.

        When ``states`` is closed under the row supports of every factor, products
        of restrictions equal restrictions of products.
        """
        pos = {q: k for k, q in enumerate(states)}
        rows = []
        for q in states:
            rows.append({pos[j]: v for j, v in self.rows[q].items() if j in pos})
        return SquareMatrix(len(states), self.field, rows)

    def __add__(self, other: "SquareMatrix") -> "SquareMatrix":
        self._check(other)
        reduce = self.field.reduce
        out = []
        for a, b in zip(self.rows, other.rows):
            if not b:
                out.append(a)
                continue
            if not a:
                out.append(b)
                continue
            row = dict(a)
            for j, v in b.items():
                s = reduce(row.get(j, 0) + v)
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)
            out.append(row)
        return SquareMatrix(self.dim, self.field, out)

    def __neg__(self) -> "SquareMatrix":
        return self.scale(-1)

    def __sub__(self, other: "SquareMatrix") -> "SquareMatrix":
        return self + (-other)

    def scale(self, c) -> "SquareMatrix":
        c = self.field.coerce(c)
        if not c:
            return SquareMatrix.zero(self.dim, self.field)
        if c == 1:
            return self
        reduce = self.field.reduce
        return SquareMatrix(
            self.dim, self.field, [{j: reduce(c * v) for j, v in r.items()} for r in self.rows]
        )

    def __matmul__(self, other: "SquareMatrix") -> "SquareMatrix":
        self._check(other)
        reduce = self.field.reduce
        brows = other.rows
        out = []
        for arow in self.rows:
            if len(arow) == 1:
                # single-entry rows (functional matrices) just copy a scaled row of B
                ((k, a),) = arow.items()
                brow = brows[k]
                if a == 1:
                    out.append(brow)
                else:
                    out.append({j: reduce(a * b) for j, b in brow.items()})
                continue
            acc: dict = {}
            get = acc.get
            for k, a in arow.items():
                brow = brows[k]
                if a == 1:
                    for j, b in brow.items():
                        acc[j] = get(j, 0) + b
                else:
                    for j, b in brow.items():
                        acc[j] = get(j, 0) + a * b
            row = {}
            for j, v in acc.items():
                v = reduce(v)
                if v:
                    row[j] = v
            out.append(row)
        return SquareMatrix(self.dim, self.field, out)

    __mul__ = __matmul__

    def __eq__(self, other):
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return self.dim == other.dim and self.field == other.field and self.rows == other.rows

    def __hash__(self):
        return hash((self.dim, self.field, tuple(tuple(sorted(r.items())) for r in self.rows)))

    def __repr__(self):
        return f"SquareMatrix(dim={self.dim}, field={self.field}, nnz={self.nnz()})"


def mat_arith(op: str, *args):
    """Dispatcher over matrix operations.

    ``add(A, B)``, ``mul(A, B)``, ``scalar_mul(c, A)``, ``identity(dim, field)``,
    ``is_zero(A)``, ``entry(A, i, j)``.
    """
    if op == "add":
        return args[0] + args[1]
    if op == "mul":
        return args[0] @ args[1]
    if op == "scalar_mul":
        c, m = args
        return m.scale(c)
    if op == "identity":
        return SquareMatrix.identity(*args)
    if op == "is_zero":
        return args[0].is_zero()
    if op == "entry":
        m, i, j = args
        return FieldElement(m.field, m.entry(i, j))
    raise ValueError(f"unknown matrix op {op!r}")


def _rref(rows: Iterable[Sequence], num_unknowns: int, field: Field):
    """Reduced row echelon form; pivot = first nonzero entry in column order."""
    mat = []
    for r in rows:
        if len(r) != num_unknowns:
            raise DimensionMismatch(f"row of length {len(r)}, expected {num_unknowns}")
        mat.append([field.coerce(v) for v in r])
    reduce = field.reduce
    pivots = []
    top = 0
    for col in range(num_unknowns):
        if top == len(mat):
            break
        src = next((i for i in range(top, len(mat)) if mat[i][col]), None)
        if src is None:
            continue
        mat[top], mat[src] = mat[src], mat[top]
        prow = mat[top]
        inv = field.inv(prow[col])
        if inv != 1:
            prow = mat[top] = [reduce(inv * v) for v in prow]
        for i in range(len(mat)):
            if i != top and mat[i][col]:
                f = mat[i][col]
                row = mat[i]
                mat[i] = [reduce(row[j] - f * prow[j]) if prow[j] else row[j]
                          for j in range(num_unknowns)]
        pivots.append(col)
        top += 1
    return mat[:top], pivots


def rank(rows: Iterable[Sequence], num_unknowns: int, field: Field) -> int:
    return len(_rref(rows, num_unknowns, field)[1])


def nullspace_with_rank(rows: Iterable[Sequence], num_unknowns: int, field: Field):
    """``(v, rank)`` where ``v`` is the vector :func:`solve_nullspace` returns, or None at full rank."""
    reduced, pivots = _rref(rows, num_unknowns, field)
    pivot_set = set(pivots)
    free = next((c for c in range(num_unknowns) if c not in pivot_set), None)
    if free is None:
        return None, len(pivots)
    v = [0] * num_unknowns
    v[free] = 1
    for row, col in zip(reduced, pivots):
        v[col] = field.neg(row[free])
    return [FieldElement(field, x) for x in v], len(pivots)


def solve_nullspace(rows: Iterable[Sequence], num_unknowns: int, field: Field) -> list[FieldElement]:
    """Nonzero ``v`` with ``row . v = 0`` for every row.

    Exact Gauss-Jordan elimination; the first free unknown is set to 1 and the
    remaining free unknowns to 0, so the answer is a deterministic function of
    the row order.
    """
    v, r = nullspace_with_rank(rows, num_unknowns, field)
    if v is None:
        raise NoNontrivialSolution(f"rank {r} equals the number of unknowns")
    return v
