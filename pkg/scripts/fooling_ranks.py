"""How quickly do sampled weight collections pin down degree-n polynomials?

For each n and collection size k, count how often the constraint system still
leaves a nonzero polynomial that vanishes on every automaton of the collection.
"""

import argparse
from dataclasses import dataclass

from ncpit.algebra import RATIONALS, NoNontrivialSolution, rank
from ncpit.isolation import sample_weights
from ncpit.pit import construct_fooling_polynomial, fooling_constraints
from ncpit.seeding import trial_rng


@dataclass
class Config:
    n_max: int = 3
    k_max: int = 4
    repeats: int = 10
    seed: int = 0


def run(cfg: Config):
    out = []
    for n in range(1, cfg.n_max + 1):
        for k in range(1, cfg.k_max + 1):
            fooled = 0
            ranks = []
            for r in range(cfg.repeats):
                coll = [sample_weights((n, n), 2 * n * n, trial_rng(cfg.seed + r, j, "fool")) for j in range(k)]
                words, rows = fooling_constraints(n, coll)
                ranks.append(rank(rows, len(words), RATIONALS))
                try:
                    construct_fooling_polynomial(n, coll, RATIONALS)
                    fooled += 1
                except NoNontrivialSolution:
                    pass
            out.append((n, k, n ** n, sum(ranks) / len(ranks), fooled / cfg.repeats))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = Config(**vars(p.parse_args()))
    print("n\tk\tunknowns\tmean_rank\tfooled")
    for n, k, u, r, f in run(cfg):
        print(f"{n}\t{k}\t{u}\t{r:.1f}\t{f:.2f}")


if __name__ == "__main__":
    main()
