"""Ground-truth integer sequences: Stirling, Bell and partition numbers.

These generators are deliberately elementary (recurrences and brute-force
enumeration) so they can act as oracles for the series engine.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterator

from feyncount.errors import CapExceeded

SET_PARTITION_CAP = 12
PROVENANCES = ("recurrence", "enumeration", "series")


@dataclass(frozen=True)
class SequenceRecord:
    name: str
    values: tuple[int, ...]
    provenance: str

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if any(v < 0 for v in self.values):
            raise ValueError(f"{self.name}: negative value in sequence")


class StirlingTable:
    """Triangle of Stirling numbers of the second kind, 0 <= k <= n <= n_max.

    ``table[n, k]`` returns 0 outside the triangle, and ``S(0, 0) = 1``.
    """

    def __init__(self, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        rows = [[1]]
        for n in range(1, n_max + 1):
            prev = rows[-1]
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                row[k] = (k * prev[k] if k < len(prev) else 0) + prev[k - 1]
            rows.append(row)
        self.n_max = n_max
        self._rows = rows

    def __getitem__(self, nk: tuple[int, int]) -> int:
        n, k = nk
        if n < 0 or n > self.n_max:
            raise IndexError(f"n={n} outside table (n_max={self.n_max})")
        row = self._rows[n]
        return row[k] if 0 <= k < len(row) else 0

    def row(self, n: int) -> list[int]:
        """``[S(n,1), ..., S(n,n)]``."""
        if n < 0 or n > self.n_max:
            raise IndexError(f"n={n} outside table (n_max={self.n_max})")
        return self._rows[n][1:]

    def rows(self) -> list[list[int]]:
        return [self.row(n) for n in range(1, self.n_max + 1)]


def stirling2_table(n_max: int) -> StirlingTable:
    return StirlingTable(n_max)


def bell_recurrence(n_max: int) -> list[int]:
    """Bell numbers from ``B_{n+1} = sum_j C(n, j) B_j``."""
    bell = [1]
    for n in range(n_max):
        bell.append(sum(comb(n, j) * bell[j] for j in range(n + 1)))
    return bell


def bell_numbers(n_max: int) -> SequenceRecord:
    """B_0..B_n_max as Stirling row sums, cross-checked against the binomial
    recurrence."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    table = StirlingTable(max(n_max, 1))
    values = [1] + [sum(table.row(n)) for n in range(1, n_max + 1)]
    if values != bell_recurrence(n_max):
        raise AssertionError("Stirling row sums disagree with the Bell recurrence")
    return SequenceRecord("bell", tuple(values), "recurrence")


def partition_counts(n_max: int) -> SequenceRecord:
    """Integer partition numbers P_0..P_n_max from the Euler product
    ``prod_k 1/(1 - x^k)``, expanded one factor at a time."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    p = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for total in range(part, n_max + 1):
            p[total] += p[total - part]
    return SequenceRecord("partitions", tuple(p), "recurrence")


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every non-increasing list of positive summands of ``n``."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first, *rest)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """Yield the restricted growth strings of length n in lexicographic order.

    ``a[0] = 0`` and ``a[i] <= 1 + max(a[:i])``; element i belongs to block
    ``a[i]``.  Iterative, so it is usable up to the cap without recursion.
    """
    if n == 0:
        yield ()
        return
    a = [0] * n
    # m[i] = max(a[:i+1])
    m = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > m[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def rgs_to_blocks(rgs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    blocks: list[list[int]] = []
    for elem, b in enumerate(rgs, start=1):
        if b == len(blocks):
            blocks.append([])
        blocks[b].append(elem)
    return tuple(tuple(b) for b in blocks)


def set_partitions_enumerate(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All set partitions of {1..n}, in restricted-growth-string order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > SET_PARTITION_CAP:
        raise CapExceeded(f"set partitions capped at n={SET_PARTITION_CAP}, got {n}")
    return [rgs_to_blocks(r) for r in restricted_growth_strings(n)]


def block_count_histogram(n: int) -> dict[int, int]:
    """Number of set partitions of {1..n} with k blocks, by enumeration."""
    if n > SET_PARTITION_CAP:
        raise CapExceeded(f"set partitions capped at n={SET_PARTITION_CAP}, got {n}")
    hist: Counter[int] = Counter()
    for r in restricted_growth_strings(n):
        hist[(max(r) + 1) if r else 0] += 1
    return dict(sorted(hist.items()))
