"""Order-preserving parallel map and fixed-order reductions.

Work is always split into the same units regardless of the worker count, and
partial results are combined by :func:`ordered_sum` in a fixed pairwise tree,
so results are bit-identical for any number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def ordered_sum(parts: Sequence):
    """Pairwise sum of ``parts`` with a tree shape fixed by ``len(parts)``."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to sum")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]
