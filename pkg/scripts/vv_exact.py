"""Valiant-Vazirani success probability: exhaustive values next to estimates.

For small t every (w_1, ..., w_t) can be enumerated, which gives the exact
p_t(S) under the prefix-intersection definition S_i = {v in S : v.w_j = 0 for j <= i}.
"""

import argparse
import itertools
from dataclasses import dataclass
from fractions import Fraction

from ncpit.isolation import vv_experiment


@dataclass
class Config:
    trials: int = 10_000
    seed: int = 0


CASES = [
    (2, [(1, 0)]),
    (2, [(1, 1)]),
    (2, [(1, 0), (0, 1)]),
    (3, [(1, 0, 0)]),
    (3, [(1, 1, 0), (0, 1, 1), (1, 0, 1)]),
]


def exact(S, t):
    vecs = list(itertools.product((0, 1), repeat=t))
    good = 0
    for ws in itertools.product(vecs, repeat=t):
        alive = list(S)
        for w in ws:
            alive = [v for v in alive if sum(a * b for a, b in zip(v, w)) % 2 == 0]
            if len(alive) == 1:
                good += 1
                break
    return Fraction(good, len(vecs) ** t)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    cfg = Config(**vars(p.parse_args()))
    print("t\tS\texact\testimate\thalf_width")
    for t, S in CASES:
        est = vv_experiment(S, t, cfg.trials, cfg.seed)
        label = ",".join("".join(map(str, v)) for v in S)
        print(f"{t}\t{label}\t{exact(S, t)}\t{est.value:.4f}\t{est.half_width:.4f}")


if __name__ == "__main__":
    main()
