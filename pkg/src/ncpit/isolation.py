"""Isolation-lemma experiments.

Set families over the universe {1..n}, random weight assignments, unique
minimum detection, Monte-Carlo estimates of isolation probabilities, the
linear-form variant, greedy weight-collection covers, exhaustive search for
families that defeat a given collection, and the Valiant-Vazirani experiment.

Subsets are ``frozenset``s of 1-based elements. Monte-Carlo sample ``k`` is
always drawn from ``trial_rng(seed, k)``, so estimates do not depend on how
samples are split across workers.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import BoolCircuit, eval_bool, load_circuit
from .seeding import chunks, half_width, trial_rng

__all__ = [
    "WeightAssignment",
    "SetFamily",
    "LinearFormFamily",
    "Unique",
    "Tie",
    "EmptyFamily",
    "EMPTY",
    "Estimate",
    "EnumerationTooLarge",
    "BudgetExhausted",
    "ENUMERATION_LIMIT",
    "sample_weights",
    "unique_min",
    "estimate_isolation_probability",
    "ks_unique_min",
    "estimate_ks_isolation_probability",
    "random_form_family",
    "find_weight_collection",
    "defeating_family_search",
    "vv_trial",
    "vv_experiment",
    "random_vector_set",
    "load_family",
]

ENUMERATION_LIMIT = 24
MAX_WITNESSES = 16


class EnumerationTooLarge(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    def __init__(self, uncovered: list[int], collection: list):
        super().__init__(f"budget exhausted; uncovered families: {uncovered}")
        self.uncovered = uncovered
        self.collection = collection


@dataclass(frozen=True)
class WeightAssignment:
    """Positive integer weights on [n] (``d is None``) or on [d] x [n].

    Grid values are stored row-major: ``values[(i - 1) * n + (j - 1)] = w(i, j)``.
    """

    n: int
    values: tuple
    range_max: int
    d: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        size = self.n if self.d is None else self.d * self.n
        if len(self.values) != size:
            raise ValueError(f"{len(self.values)} weights for a universe of size {size}")
        for v in self.values:
            if not 1 <= v <= self.range_max:
                raise ValueError(f"weight {v} outside [1, {self.range_max}]")

    @property
    def shape(self) -> tuple:
        return (self.n,) if self.d is None else (self.d, self.n)

    def __call__(self, i: int) -> int:
        return self.values[i - 1]

    def at(self, i: int, j: int) -> int:
        return self.values[(i - 1) * self.n + (j - 1)]

    def items(self):
        """``(i, v)`` pairs on [n], ``((i, j), v)`` pairs on [d] x [n]."""
        if self.d is None:
            return ((i + 1, v) for i, v in enumerate(self.values))
        return (((k // self.n + 1, k % self.n + 1), v) for k, v in enumerate(self.values))

    def weight(self, subset: Iterable) -> int:
        """w(T) = sum of w(u) over u in T; elements are ints or (i, j) pairs."""
        if self.d is None:
            return sum(self.values[u - 1] for u in subset)
        return sum(self.at(i, j) for i, j in subset)

    def to_dict(self) -> dict:
        out = {"n": self.n, "range_max": self.range_max, "values": list(self.values)}
        if self.d is not None:
            out["d"] = self.d
        return out


def sample_weights(universe: int | tuple, range_max: int, rng: random.Random) -> WeightAssignment:
    """Independent uniform weights in [1, range_max] on [n] or on [d] x [n]."""
    if range_max < 1:
        raise ValueError("range_max must be at least 1")
    if isinstance(universe, tuple):
        d, n = universe
        return WeightAssignment(n, tuple(rng.randint(1, range_max) for _ in range(d * n)), range_max, d)
    return WeightAssignment(universe, tuple(rng.randint(1, range_max) for _ in range(universe)), range_max)


class SetFamily:
    """A family of subsets of [n], listed explicitly or as the accepted set of a boolean circuit."""

    def __init__(self, n: int, sets: Iterable[Iterable[int]] | None = None, circuit: BoolCircuit | None = None):
        if (sets is None) == (circuit is None):
            raise ValueError("give exactly one of sets or circuit")
        self.n = n
        self.circuit = circuit
        if circuit is not None:
            if circuit.num_inputs != n:
                raise ValueError(f"circuit has {circuit.num_inputs} inputs, family universe is [{n}]")
            self._sets = None
        else:
            uniq = set()
            for s in sets:
                s = frozenset(s)
                if any(not (isinstance(u, int) and 1 <= u <= n) for u in s):
                    raise ValueError(f"set {sorted(s)} not inside [1, {n}]")
                uniq.add(s)
            self._sets = tuple(sorted(uniq, key=lambda s: (len(s), sorted(s))))

    @classmethod
    def explicit(cls, n: int, sets) -> "SetFamily":
        return cls(n, sets=sets)

    @classmethod
    def from_circuit(cls, c: BoolCircuit) -> "SetFamily":
        return cls(c.num_inputs, circuit=c)

    @property
    def is_circuit_defined(self) -> bool:
        return self.circuit is not None

    def iter_members(self):
        """Stream members; circuit families are enumerated in bitmask order."""
        if self._sets is not None:
            yield from self._sets
            return
        if self.n > ENUMERATION_LIMIT:
            raise EnumerationTooLarge(f"n = {self.n} > {ENUMERATION_LIMIT}")
        n = self.n
        for mask in range(1 << n):
            bits = [(mask >> i) & 1 for i in range(n)]
            if eval_bool(self.circuit, bits):
                yield frozenset(i + 1 for i in range(n) if bits[i])

    @cached_property
    def members(self) -> tuple:
        return tuple(self.iter_members())

    @cached_property
    def incidence(self) -> np.ndarray:
        m = np.zeros((len(self.members), self.n), dtype=np.int64)
        for r, s in enumerate(self.members):
            for u in s:
                m[r, u - 1] = 1
        return m

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        kind = "circuit" if self.circuit is not None else "explicit"
        return f"SetFamily(n={self.n}, {kind})"


@dataclass(frozen=True)
class Unique:
    member: object
    weight: int


@dataclass(frozen=True)
class Tie:
    weight: int
    witnesses: tuple = ()


@dataclass(frozen=True)
class EmptyFamily:
    pass


EMPTY = EmptyFamily()


def unique_min(family: SetFamily, w: WeightAssignment, verbose: bool = False):
    """Minimum-weight member if it is unique, otherwise the tied minimum weight."""
    if w.d is not None or w.n != family.n:
        raise ValueError(f"need a flat weight assignment on [{family.n}]")
    if not family.members:
        return EMPTY
    weights = family.incidence @ np.asarray(w.values, dtype=np.int64)
    low = int(weights.min())
    hits = np.flatnonzero(weights == low)
    if len(hits) == 1:
        return Unique(family.members[hits[0]], low)
    wit = tuple(family.members[k] for k in hits[:MAX_WITNESSES]) if verbose else ()
    return Tie(low, wit)


@dataclass(frozen=True)
class Estimate:
    successes: int
    samples: int

    @property
    def value(self) -> float:
        return self.successes / self.samples

    @property
    def half_width(self) -> float:
        return half_width(self.value, self.samples)

    def to_dict(self) -> dict:
        return {"estimate": self.value, "half_width": self.half_width,
                "successes": self.successes, "samples": self.samples}


def _count(task):
    fn, args, idx = task
    return sum(fn(*args, k) for k in idx)


def _monte_carlo(fn, args: tuple, samples: int, jobs: int) -> Estimate:
    if jobs <= 1:
        return Estimate(sum(fn(*args, k) for k in range(samples)), samples)
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        total = sum(ex.map(_count, [(fn, args, r) for r in chunks(samples, jobs)]))
    return Estimate(total, samples)


def _iso_sample(family, range_max, seed, k):
    w = sample_weights(family.n, range_max, trial_rng(seed, k, "iso"))
    return isinstance(unique_min(family, w), Unique)


def estimate_isolation_probability(family: SetFamily, range_max: int, samples: int, seed: int,
                                   jobs: int = 1) -> Estimate:
    """Fraction of uniform weight draws on [range_max] with a unique minimum member."""
    if samples < 100:
        raise ValueError("use at least 100 samples")
    family.members  # enumerate once before fanning out
    family.incidence
    return _monte_carlo(_iso_sample, (family, range_max, seed), samples, jobs)


# -- linear forms -------------------------------------------------------------

@dataclass(frozen=True)
class LinearFormFamily:
    forms: tuple
    K: int

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(tuple(int(a) for a in f) for f in self.forms))
        if self.forms:
            n = len(self.forms[0])
            for f in self.forms:
                if len(f) != n:
                    raise ValueError("forms differ in length")
                if any(not 0 <= a <= self.K for a in f):
                    raise ValueError(f"coefficient outside [0, {self.K}] in {f}")

    @property
    def n(self) -> int:
        return len(self.forms[0]) if self.forms else 0


def ks_unique_min(forms: LinearFormFamily, z: Sequence[int]):
    """Unique form minimizing sum(a_j z_j), or the tied minimum value."""
    if not forms.forms:
        raise ValueError("empty family of linear forms")
    if len(z) != forms.n:
        raise ValueError(f"point has {len(z)} coordinates, forms have {forms.n}")
    vals = [sum(a * x for a, x in zip(f, z)) for f in forms.forms]
    low = min(vals)
    hits = [k for k, v in enumerate(vals) if v == low]
    if len(hits) == 1:
        return Unique(hits[0], low)
    return Tie(low)


def _ks_sample(forms, seed, k):
    rng = trial_rng(seed, k, "ks")
    top = 2 * forms.K * forms.n
    z = [rng.randint(0, top) for _ in range(forms.n)]
    return isinstance(ks_unique_min(forms, z), Unique)


def estimate_ks_isolation_probability(forms: LinearFormFamily, samples: int, seed: int,
                                      jobs: int = 1) -> Estimate:
    """z_i uniform in {0, ..., 2Kn}; fraction of draws with a unique minimizing form."""
    if samples < 100:
        raise ValueError("use at least 100 samples")
    return _monte_carlo(_ks_sample, (forms, seed), samples, jobs)


def random_form_family(n: int, K: int, count: int, rng: random.Random) -> LinearFormFamily:
    """``count`` distinct random forms with coefficients in [0, K]."""
    if count > (K + 1) ** n:
        raise ValueError("not enough distinct forms")
    seen: dict = {}
    while len(seen) < count:
        f = tuple(rng.randint(0, K) for _ in range(n))
        seen.setdefault(f, None)
    return LinearFormFamily(tuple(seen), K)


# -- collections and defeating families ----------------------------------------

def find_weight_collection(families: Sequence[SetFamily], range_max: int, budget: int,
                           seed: int) -> list[WeightAssignment]:
    """Greedy randomized cover: keep a sampled assignment if it isolates an uncovered family."""
    if not families:
        return []
    n = families[0].n
    if any(f.n != n for f in families):
        raise ValueError("all families must share the universe")
    uncovered = set(range(len(families)))
    out = []
    for k in range(budget):
        if not uncovered:
            break
        w = sample_weights(n, range_max, trial_rng(seed, k, "cover"))
        hit = {i for i in uncovered if isinstance(unique_min(families[i], w), Unique)}
        if hit:
            out.append(w)
            uncovered -= hit
    if uncovered:
        raise BudgetExhausted(sorted(uncovered), out)
    return out


def _defeated(bits: np.ndarray, subset_weights: list[np.ndarray]) -> np.ndarray:
    """Rows of ``bits`` (families over a subset list) that tie under every weight vector."""
    ok = bits.any(axis=1)
    big = np.iinfo(np.int64).max
    for sw in subset_weights:
        masked = np.where(bits, sw[None, :], big)
        low = masked.min(axis=1)
        ok &= (masked == low[:, None]).sum(axis=1) >= 2
    return ok


def _best(bits: np.ndarray, ok: np.ndarray):
    idx = np.flatnonzero(ok)
    if len(idx) == 0:
        return None
    sizes = bits[idx].sum(axis=1)
    return int(idx[np.lexsort((idx, sizes))[0]])


def defeating_family_search(collection: Sequence[WeightAssignment], n: int) -> SetFamily | None:
    """A family of subsets of [n] with a tied minimum under every assignment, or None.

    Families of equal-size sets are tried first (a tie needs two sets of equal
    weight); otherwise all 2^(2^n) families are scanned. The smallest witness
    is returned.
    """
    if not 1 <= n <= 4:
        raise ValueError("defeating_family_search supports 1 <= n <= 4")
    for w in collection:
        if w.d is not None or w.n != n:
            raise ValueError(f"need flat assignments on [{n}]")
    subsets = [frozenset(i + 1 for i in range(n) if (mask >> i) & 1) for mask in range(1 << n)]

    def search(pool: list[frozenset]):
        m = len(pool)
        masks = np.arange(1 << m, dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)
        sw = [np.array([w.weight(s) for s in pool], dtype=np.int64) for w in collection]
        ok = _defeated(bits, sw)
        k = _best(bits, ok)
        if k is None:
            return None
        return SetFamily.explicit(n, [pool[i] for i in range(m) if bits[k, i]])

    for size in range(1, n + 1):
        found = search([s for s in subsets if len(s) == size])
        if found is not None:
            return found
    return search(subsets)


# -- Valiant-Vazirani --------------------------------------------------------------

def _as_mask(v) -> int:
    if isinstance(v, int):
        return v
    return sum(1 << i for i, b in enumerate(v) if b)


def vv_trial(S: Sequence[int], t: int, rng: random.Random) -> bool:
    """One draw of w_1..w_t; success iff some prefix-filtered S_i (1 <= i <= t) is a singleton."""
    alive = list(S)
    for _ in range(t):
        w = rng.getrandbits(t)
        alive = [v for v in alive if not (v & w).bit_count() & 1]
        if len(alive) == 1:
            return True
        if not alive:
            return False
    return False


def _vv_sample(S, t, seed, k):
    return vv_trial(S, t, trial_rng(seed, k, "vv"))


def vv_experiment(S: Iterable, t: int, trials: int, seed: int, jobs: int = 1) -> Estimate:
    """Empirical p_t(S); vectors are bit tuples or ints (bit i-1 = coordinate i)."""
    S = sorted({_as_mask(v) for v in S})
    if not S:
        raise ValueError("S must be nonempty")
    if not 1 <= t <= 20:
        raise ValueError("t must lie in [1, 20]")
    if any(v >> t for v in S):
        raise ValueError(f"vector longer than {t} bits")
    return _monte_carlo(_vv_sample, (tuple(S), t, seed), trials, jobs)


def random_vector_set(t: int, size: int, rng: random.Random) -> list[int]:
    if size > 1 << t:
        raise ValueError("more vectors requested than exist")
    return sorted(rng.sample(range(1 << t), size))


# -- files -----------------------------------------------------------------------

def load_family(path, n: int | None = None) -> SetFamily:
    """Read a family file: one subset per line (``-`` for the empty set) or ``@circuit <path>``."""
    path = Path(path)
    sets = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@circuit"):
            target = line[len("@circuit"):].strip()
            c = load_circuit(path.parent / target)
            if not isinstance(c, BoolCircuit):
                raise ValueError(f"{path}:{lineno}: {target} is not a bcircuit file")
            if n is not None and n != c.num_inputs:
                raise ValueError(f"{path}:{lineno}: circuit has {c.num_inputs} inputs, expected {n}")
            return SetFamily.from_circuit(c)
        if line == "-":
            sets.append(())
            continue
        try:
            sets.append(tuple(int(x) for x in line.split()))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected space-separated indices, got {raw!r}") from None
    if n is None:
        n = max((max(s) for s in sets if s), default=1)
    return SetFamily.explicit(n, sets)
