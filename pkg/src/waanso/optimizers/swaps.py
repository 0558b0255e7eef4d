"""Transposition algebra over placements (permutations of core indices)."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument

Swap = tuple[int, int]


def apply_swaps(p, v) -> np.ndarray:
    """Apply the transpositions of ``v`` to a copy of ``p``, left to right."""
    out = np.array(p, copy=True)
    n = len(out)
    for i, j in v:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidArgument(f"swap ({i}, {j}) out of range for length {n}")
        out[i], out[j] = out[j], out[i]
    return out


def diff_swaps(src, dst) -> list[Swap]:
    """Greedy cycle-following swap sequence turning ``src`` into ``dst``."""
    cur = list(src)
    target = list(dst)
    if len(cur) != len(target):
        raise InvalidArgument("placements differ in length")
    where = {v: i for i, v in enumerate(cur)}
    swaps = []
    for i in range(len(cur)):
        if cur[i] != target[i]:
            j = where[target[i]]
            swaps.append((i, j))
            where[cur[i]], where[cur[j]] = j, i
            cur[i], cur[j] = cur[j], cur[i]
    return swaps


def random_swaps(n: int, length: int, rng: np.random.Generator) -> list[Swap]:
    out = []
    if n < 2:
        return out
    for _ in range(length):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        out.append((i, j + (j >= i)))
    return out
