"""Per-trial random streams derived from a single seed.

Every Monte-Carlo loop draws trial ``i`` from ``trial_rng(seed, i)``, so the
outcome of a trial does not depend on which worker ran it or in what order.
"""

from __future__ import annotations

import random


def trial_rng(seed: int, index: int, tag: str = "") -> random.Random:
    # str seeds are hashed with sha512, stable across processes and runs
    return random.Random(f"{tag}:{seed}:{index}")


def chunks(total: int, jobs: int) -> list[range]:
    """Split ``range(total)`` into at most ``jobs`` contiguous pieces."""
    jobs = max(1, min(jobs, total)) if total else 1
    step, extra = divmod(total, jobs)
    out, start = [], 0
    for k in range(jobs):
        stop = start + step + (1 if k < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out


def half_width(p: float, samples: int) -> float:
    """99% normal-approximation half-width ``3 sqrt(p(1-p)/N)``."""
    return 3.0 * (p * (1.0 - p) / samples) ** 0.5
