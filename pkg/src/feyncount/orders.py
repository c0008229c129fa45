"""Finite topologies as preorders, posets, and the squash map between them.

A relation on n labelled points is stored as n row bitmasks: bit j of row i
is set iff i <= j.  Preorders (reflexive, transitive) are in bijection with
topologies on n points; posets are the antisymmetric preorders.  Squashing a
preorder identifies mutually related points and leaves a poset on the blocks,
which gives t_n = sum_k S(n, k) d_k for connected preorders/posets.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from feyncount.combinatorics import stirling2_table
from feyncount.errors import CapExceeded, DomainError
from feyncount.series import TruncSeries

DEFAULT_CAP = 5
HARD_CAP = 6
CHUNK = 1 << 20


@dataclass(frozen=True, order=True)
class Relation:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        if any(r & ~full for r in self.rows):
            raise ValueError("row bitmask wider than n")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Relation:
        """Reflexive relation containing the given (i, j) pairs (0-based)."""
        rows = [1 << i for i in range(n)]
        for i, j in pairs:
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    def related(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def is_reflexive(self) -> bool:
        return all(self.rows[i] >> i & 1 for i in range(self.n))

    def is_transitive(self) -> bool:
        # i <= j implies row j is contained in row i
        for i, ri in enumerate(self.rows):
            for j in range(self.n):
                if ri >> j & 1 and self.rows[j] & ~ri:
                    return False
        return True

    def is_antisymmetric(self) -> bool:
        return not any(
            self.rows[i] >> j & 1 and self.rows[j] >> i & 1
            for i in range(self.n) for j in range(i + 1, self.n)
        )

    def is_preorder(self) -> bool:
        return self.is_reflexive() and self.is_transitive()

    def is_poset(self) -> bool:
        return self.is_preorder() and self.is_antisymmetric()

    def permute(self, perm: Sequence[int]) -> Relation:
        """Relation in which point ``perm[i]`` plays the role of point ``i``."""
        rows = [0] * self.n
        for i, r in enumerate(self.rows):
            out = 0
            for j in range(self.n):
                if r >> j & 1:
                    out |= 1 << perm[j]
            rows[perm[i]] = out
        return Relation(self.n, tuple(rows))

    def matrix(self) -> list[list[int]]:
        return [[self.rows[i] >> j & 1 for j in range(self.n)] for i in range(self.n)]


@dataclass(frozen=True)
class QuotientResult:
    poset: Relation
    blocks: tuple[tuple[int, ...], ...]


def _check_cap(n: int, allow_large: bool) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > HARD_CAP or (n > DEFAULT_CAP and not allow_large):
        raise CapExceeded(
            f"exhaustive enumeration is capped at n={DEFAULT_CAP}"
            + (f" (n={HARD_CAP} with the override)" if n <= HARD_CAP else ""))
    if n > DEFAULT_CAP:
        warnings.warn(f"enumerating 2^{n * n - n} candidate relations; this is slow",
                      RuntimeWarning, stacklevel=3)


def _transitive_masks(n: int, start: int, stop: int) -> np.ndarray:
    """Candidate codes in [start, stop) whose relation is transitive.

    Bit p of a code is the p-th off-diagonal cell in row-major order.
    """
    codes = np.arange(start, stop, dtype=np.uint64)
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    bits = {}
    rows = [np.full(codes.shape, 1 << i, dtype=np.uint64) for i in range(n)]
    for p, (i, j) in enumerate(cells):
        b = (codes >> np.uint64(p)) & np.uint64(1)
        bits[i, j] = b.astype(bool)
        rows[i] |= b << np.uint64(j)
    ok = np.ones(codes.shape, dtype=bool)
    for (i, j), b in bits.items():
        ok &= ~b | ((rows[j] & ~rows[i]) == 0)
    return codes[ok]


def _decode(n: int, code: int) -> Relation:
    rows = [1 << i for i in range(n)]
    p = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                if code >> p & 1:
                    rows[i] |= 1 << j
                p += 1
    return Relation(n, tuple(rows))


@functools.lru_cache(maxsize=None)
def _preorders(n: int) -> tuple[Relation, ...]:
    total = 1 << (n * n - n)
    out: list[Relation] = []
    for start in range(0, total, CHUNK):
        for code in _transitive_masks(n, start, min(total, start + CHUNK)).tolist():
            out.append(_decode(n, code))
    return tuple(out)


def enumerate_preorders(n: int, allow_large: bool = False) -> list[Relation]:
    """All reflexive transitive relations on n labelled points."""
    _check_cap(n, allow_large)
    return list(_preorders(n))


def enumerate_posets(n: int, allow_large: bool = False) -> list[Relation]:
    _check_cap(n, allow_large)
    return [r for r in _preorders(n) if r.is_antisymmetric()]


def is_connected(r: Relation) -> bool:
    """Whether the comparability graph (i ~ j iff i <= j or j <= i) is connected."""
    seen = 1
    frontier = 1
    sym = [r.rows[i] | sum(1 << j for j in range(r.n) if r.rows[j] >> i & 1)
           for i in range(r.n)]
    while frontier:
        nxt = 0
        for i in range(r.n):
            if frontier >> i & 1:
                nxt |= sym[i]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << r.n) - 1


def quotient(r: Relation) -> QuotientResult:
    """Squash mutually related points into blocks; the blocks form a poset."""
    if not r.is_preorder():
        raise DomainError("quotient needs a reflexive transitive relation")
    block_of = [-1] * r.n
    blocks: list[tuple[int, ...]] = []
    for i in range(r.n):
        if block_of[i] >= 0:
            continue
        members = tuple(j for j in range(i, r.n) if r.related(i, j) and r.related(j, i))
        for j in members:
            block_of[j] = len(blocks)
        blocks.append(members)
    k = len(blocks)
    rows = []
    for a in range(k):
        rep = blocks[a][0]
        rows.append(sum(1 << b for b in range(k) if r.related(rep, blocks[b][0])))
    return QuotientResult(Relation(k, tuple(rows)), tuple(blocks))


def connected_counts(kind: str, n: int) -> int:
    source = enumerate_posets if kind == "posets" else enumerate_preorders
    return sum(1 for r in source(n) if is_connected(r))


@dataclass(frozen=True)
class StirlingReport:
    n: int
    t_n: int
    d: tuple[int, ...]
    stirling: tuple[int, ...]
    fibers: dict[int, int]
    rhs: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rhs", sum(s * d for s, d in zip(self.stirling, self.d)))

    @property
    def expected_fibers(self) -> dict[int, int]:
        return {k: self.stirling[k - 1] * self.d[k - 1] for k in range(1, self.n + 1)}

    @property
    def passed(self) -> bool:
        return (self.t_n == self.rhs == sum(self.fibers.values())
                and self.fibers == self.expected_fibers)


def verify_stirling_identity(n: int) -> StirlingReport:
    """Count connected preorders on n points three ways: directly, as
    sum_k S(n,k) d_k, and fiber by fiber under the squash map."""
    _check_cap(n, False)
    connected = [r for r in enumerate_preorders(n) if is_connected(r)]
    fibers = {k: 0 for k in range(1, n + 1)}
    for r in connected:
        q = quotient(r)
        if not is_connected(q.poset):
            raise AssertionError(f"quotient of connected {r} is disconnected")
        fibers[q.poset.n] += 1
    d = tuple(connected_counts("posets", k) for k in range(1, n + 1))
    stirling = tuple(stirling2_table(n).row(n))
    return StirlingReport(n, len(connected), d, stirling, fibers)


def _perm_tables(n: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    perms = list(itertools.permutations(range(n)))
    masks = np.arange(1 << n)
    tables = np.zeros((len(perms), 1 << n), dtype=np.int64)
    for p, perm in enumerate(perms):
        for j in range(n):
            tables[p] |= ((masks >> j) & 1) << perm[j]
    return perms, tables


def _canonical_keys(structures: Sequence[Relation]) -> tuple[np.ndarray, np.ndarray]:
    """(canonical key, stabilizer size) per structure, all of one size n.

    The key packs the rows with row 0 most significant, so the minimum over
    permutations is the lexicographically smallest bit matrix.
    """
    n = structures[0].n
    perms, tables = _perm_tables(n)
    rows = np.array([s.rows for s in structures], dtype=np.int64).reshape(len(structures), n)
    shifts = [n * (n - 1 - i) for i in range(n)]
    own = sum(rows[:, i] << shifts[i] for i in range(n))
    best = np.full(len(structures), np.iinfo(np.int64).max, dtype=np.int64)
    stab = np.zeros(len(structures), dtype=np.int64)
    for perm, table in zip(perms, tables):
        key = np.zeros(len(structures), dtype=np.int64)
        for i in range(n):
            key |= table[rows[:, i]] << shifts[perm[i]]
        best = np.minimum(best, key)
        stab += key == own
    return best, stab


def _key_to_relation(n: int, key: int) -> Relation:
    full = (1 << n) - 1
    return Relation(n, tuple((key >> (n * (n - 1 - i))) & full for i in range(n)))


def canonical_relation(r: Relation) -> Relation:
    key, _ = _canonical_keys([r])
    return _key_to_relation(r.n, int(key[0]))


def unlabelled_representatives(structures: Sequence[Relation]) -> list[tuple[Relation, int]]:
    """Canonical representative and stabilizer order of every orbit, sorted."""
    by_n: dict[int, list[Relation]] = {}
    for s in structures:
        by_n.setdefault(s.n, []).append(s)
    out: dict[Relation, int] = {}
    for n, group in sorted(by_n.items()):
        if n > DEFAULT_CAP:
            raise CapExceeded(f"unlabelled counting capped at n={DEFAULT_CAP}")
        keys, stabs = _canonical_keys(group)
        for key, stab in zip(keys.tolist(), stabs.tolist()):
            out.setdefault(_key_to_relation(n, key), stab)
    return sorted(out.items())


def count_unlabelled(structures: Sequence[Relation]) -> int:
    """Number of orbits under simultaneous row/column permutation."""
    return len(unlabelled_representatives(structures)) if structures else 0


@dataclass(frozen=True)
class ExpFormulaCheck:
    kind: str
    connected: tuple[int, ...]
    totals: tuple[int, ...]
    from_exp: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.totals == self.from_exp


def connected_totals_cross_check(n_max: int) -> list[ExpFormulaCheck]:
    """Exponentiate connected-count EGFs and compare with direct totals."""
    _check_cap(n_max, False)
    checks = []
    for kind, source in (("posets", enumerate_posets), ("preorders", enumerate_preorders)):
        connected = tuple(connected_counts(kind, k) for k in range(1, n_max + 1))
        totals = (1,) + tuple(len(source(k)) for k in range(1, n_max + 1))
        series = TruncSeries.from_egf((0,) + connected, n_max).exp()
        from_exp = tuple(int(v) for v in series.egf_values())
        checks.append(ExpFormulaCheck(kind, connected, totals, from_exp))
    return checks


def labelled_total(structures: Sequence[Relation]) -> int:
    """Orbit-stabilizer reassembly: sum over orbits of n!/|stabilizer|."""
    return sum(math.factorial(r.n) // stab for r, stab in unlabelled_representatives(structures))
