"""Unique-minimum probability as a function of the weight range.

For random families on [n], estimate the isolation probability with weights
drawn from [m * n] for several multipliers m. The guarantee at m = 2 is 1/2.
"""

import argparse
import random
from dataclasses import dataclass, field

from ncpit.isolation import SetFamily, estimate_isolation_probability


@dataclass
class Config:
    n: int = 10
    families: int = 8
    samples: int = 2000
    seed: int = 0
    multipliers: list = field(default_factory=lambda: [1, 2, 4, 8])


def random_family(n, rng):
    size = rng.randint(2, 60)
    density = rng.choice([0.2, 0.5, 0.8])
    return SetFamily.explicit(n, [{u for u in range(1, n + 1) if rng.random() < density} for _ in range(size)])


def run(cfg: Config):
    rng = random.Random(cfg.seed)
    fams = [random_family(cfg.n, rng) for _ in range(cfg.families)]
    table = []
    for k, fam in enumerate(fams):
        row = [len(fam)]
        for m in cfg.multipliers:
            row.append(estimate_isolation_probability(fam, m * cfg.n, cfg.samples, seed=k).value)
        table.append(row)
    return table


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--families", type=int, default=8)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    cfg = Config(**vars(p.parse_args()))
    print("size\t" + "\t".join(f"range={m}n" for m in cfg.multipliers))
    for row in run(cfg):
        print("\t".join([str(row[0])] + [f"{v:.3f}" for v in row[1:]]))


if __name__ == "__main__":
    main()
