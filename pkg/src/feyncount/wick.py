"""Brute-force vacuum diagram enumeration.

A diagram is a bipartite multigraph between line nodes (arity m_i) and vertex
nodes (arity n_j), stored as the incidence matrix ``e[i][j]`` = number of legs
of line i attached to vertex j.  Summing ``amplitude / |Aut|`` over all
diagrams reproduces the partition function coefficient by coefficient, which
makes this module an oracle for :mod:`feyncount.engine`.

``|Aut|`` counts leg-level automorphisms.  It is computed in closed form as
(number of node permutations fixing the matrix) * prod e_ij!, and that
formula is checked against a literal leg-level search on small diagrams.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from feyncount.combinatorics import integer_partitions
from feyncount.engine import ModelSpec, pairing_bound
from feyncount.errors import CapExceeded
from feyncount.series import BiPoly

LEG_CAP = 8
VALIDATED_LEGS = 5

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Diagram:
    line_arities: tuple[int, ...]
    vertex_arities: tuple[int, ...]
    incidence: Matrix

    def __post_init__(self) -> None:
        if len(self.incidence) != len(self.line_arities):
            raise ValueError("incidence needs one row per line")
        for i, row in enumerate(self.incidence):
            if len(row) != len(self.vertex_arities):
                raise ValueError("incidence needs one column per vertex")
            if sum(row) != self.line_arities[i] or any(e < 0 for e in row):
                raise ValueError(f"line {i} does not attach all {self.line_arities[i]} legs")
        for j, n in enumerate(self.vertex_arities):
            if sum(row[j] for row in self.incidence) != n:
                raise ValueError(f"vertex {j} does not receive all {n} legs")
        if any(a < 1 for a in self.line_arities + self.vertex_arities):
            raise ValueError("arities must be >= 1")

    @property
    def legs(self) -> int:
        return sum(self.line_arities)

    def is_connected(self) -> bool:
        """One component over lines and vertices; the empty diagram is not."""
        n_lines, n_verts = len(self.line_arities), len(self.vertex_arities)
        if n_lines + n_verts == 0:
            return False
        parent = list(range(n_lines + n_verts))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, row in enumerate(self.incidence):
            for j, e in enumerate(row):
                if e:
                    parent[find(i)] = find(n_lines + j)
        return len({find(x) for x in range(n_lines + n_verts)}) == 1

    def amplitude(self, model: ModelSpec) -> BiPoly:
        amp = BiPoly.one()
        for m in self.line_arities:
            amp = amp * model.line_amplitude(m)
        for n in self.vertex_arities:
            amp = amp * model.vertex_amplitude(n)
        return amp

    def relabel(self, line_perm: Sequence[int], vertex_perm: Sequence[int]) -> Diagram:
        """Diagram whose line ``i`` is this diagram's line ``line_perm[i]``."""
        return Diagram(
            tuple(self.line_arities[p] for p in line_perm),
            tuple(self.vertex_arities[q] for q in vertex_perm),
            tuple(tuple(self.incidence[p][q] for q in vertex_perm) for p in line_perm),
        )

    def transpose(self) -> Diagram:
        return Diagram(self.vertex_arities, self.line_arities,
                       tuple(zip(*self.incidence)) if self.incidence else ())


@dataclass(frozen=True)
class SymmetryDatum:
    diagram: Diagram
    aut_order: int
    connected: bool
    amplitude: BiPoly

    @property
    def symmetry_number(self) -> Fraction:
        return Fraction(1, self.aut_order)


def _classes(arities: Sequence[int]) -> list[list[int]]:
    """Index groups of equal arity, in increasing arity order."""
    groups: dict[int, list[int]] = {}
    for idx, a in enumerate(arities):
        groups.setdefault(a, []).append(idx)
    return [groups[a] for a in sorted(groups)]


def _class_perms(classes: list[list[int]]) -> Iterator[tuple[int, ...]]:
    """All index orders that permute only within classes (classes kept in order)."""
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        yield tuple(itertools.chain.from_iterable(parts))


def _group_size(arities: Sequence[int]) -> int:
    return math.prod(math.factorial(c) for c in Counter(arities).values())


def _row_side_canon(d: Diagram) -> tuple[tuple[int, ...], Matrix, int]:
    """Minimise over row permutations; columns are sorted within their class.

    Returns (row order, canonical column-major key, node automorphism count).
    """
    col_classes = _classes(d.vertex_arities)
    row_classes = _classes(d.line_arities)

    def key_for(rows: tuple[int, ...]) -> tuple[Matrix, int]:
        key: list[tuple[int, ...]] = []
        ways = 1
        for cls in col_classes:
            cols = sorted(tuple(d.incidence[r][c] for r in rows) for c in cls)
            key.extend(cols)
            ways *= math.prod(math.factorial(k) for k in Counter(cols).values())
        return tuple(key), ways

    identity = tuple(itertools.chain.from_iterable(row_classes))
    reference, _ = key_for(identity)
    best_rows, best_key = identity, reference
    automorphisms = 0
    for rows in _class_perms(row_classes):
        key, ways = key_for(rows)
        if key == reference:
            automorphisms += ways
        if key < best_key:
            best_rows, best_key = rows, key
    return best_rows, best_key, automorphisms


def _line_side_cheaper(d: Diagram) -> bool:
    return _group_size(d.line_arities) <= _group_size(d.vertex_arities)


def _canon_and_count(d: Diagram) -> tuple[Diagram, int]:
    if not _line_side_cheaper(d):
        canon, count = _canon_and_count_rows(d.transpose())
        return canon.transpose(), count
    return _canon_and_count_rows(d)


def _canon_and_count_rows(d: Diagram) -> tuple[Diagram, int]:
    rows, key, count = _row_side_canon(d)
    line_arities = tuple(d.line_arities[r] for r in rows)
    vertex_arities = tuple(sorted(d.vertex_arities))
    matrix = tuple(zip(*key)) if key else tuple(() for _ in rows)
    return Diagram(line_arities, vertex_arities, tuple(tuple(r) for r in matrix)), count


def canonical_form(d: Diagram) -> Diagram:
    """Lexicographically minimal relabelling of ``d``.

    Nodes are ordered by arity.  The side (lines or vertices) with the smaller
    relabelling group is permuted exhaustively; the other side is sorted,
    which minimises it for each fixed order of the first side.  The choice of
    side depends only on the arity multisets, so it is consistent across
    isomorphic diagrams.
    """
    return _canon_and_count(d)[0]


def node_automorphisms(d: Diagram) -> int:
    """Pairs of arity-preserving (line, vertex) permutations fixing the matrix."""
    return _canon_and_count(d)[1]


def aut_order(d: Diagram) -> int:
    """Leg-level automorphism count: node symmetries times prod e_ij!."""
    legs = math.prod(math.factorial(e) for row in d.incidence for e in row)
    return node_automorphisms(d) * legs


def _leg_blocks(arities: Sequence[int]) -> list[range]:
    blocks, start = [], 0
    for a in arities:
        blocks.append(range(start, start + a))
        start += a
    return blocks


def _block_group(arities: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every leg permutation induced by permuting equal-arity nodes and
    shuffling legs inside each node.  Maps leg index -> leg index."""
    blocks = _leg_blocks(arities)
    total = sum(arities)
    for order in _class_perms(_classes(arities)):
        # node at position p of ``order`` is sent to the node sorted at p
        targets = sorted(range(len(arities)), key=lambda i: (arities[i], i))
        node_map = dict(zip(order, targets))
        for inner in itertools.product(*(itertools.permutations(range(a)) for a in arities)):
            perm = [0] * total
            for node, shuffle in enumerate(inner):
                src, dst = blocks[node], blocks[node_map[node]]
                for slot, s in enumerate(shuffle):
                    perm[src[slot]] = dst[s]
            yield tuple(perm)


def aut_order_bruteforce(d: Diagram) -> int:
    """Leg-level automorphism count by literal search.

    A diagram is realised as a bijection ``wire`` from line legs to vertex legs.
    A line-side group element ``p`` is an automorphism iff the conjugate
    ``wire . p . wire^-1`` is a legal vertex-side permutation, i.e. it maps
    every vertex's leg set onto some vertex's leg set.
    """
    vblocks = _leg_blocks(d.vertex_arities)
    free = [list(b) for b in vblocks]
    wire: list[int] = []
    for row in d.incidence:
        for j, e in enumerate(row):
            for _ in range(e):
                wire.append(free[j].pop(0))
    inv = {v: k for k, v in enumerate(wire)}
    vertex_sets = {frozenset(b): len(b) for b in vblocks}
    count = 0
    for p in _block_group(d.line_arities):
        conj = {v: wire[p[inv[v]]] for v in inv}
        if all(frozenset(conj[v] for v in b) in vertex_sets for b in vblocks):
            count += 1
    return count


def _arity_multisets(k: int, allowed: Iterable[int]) -> list[tuple[int, ...]]:
    allowed = set(allowed)
    return [tuple(sorted(p)) for p in integer_partitions(k) if set(p) <= allowed]


def _matrices(row_sums: Sequence[int], col_sums: Sequence[int]) -> Iterator[Matrix]:
    """Non-negative integer matrices with the given margins, rows of equal
    arity in non-increasing lexicographic order (every orbit keeps at least
    one member)."""
    n_rows, n_cols = len(row_sums), len(col_sums)

    def compositions(total: int, caps: list[int], j: int) -> Iterator[tuple[int, ...]]:
        if j == n_cols - 1:
            if total <= caps[j]:
                yield (total,)
            return
        for v in range(min(total, caps[j]), -1, -1):
            for rest in compositions(total - v, caps, j + 1):
                yield (v, *rest)

    def rec(i: int, caps: list[int], acc: list[tuple[int, ...]]) -> Iterator[Matrix]:
        if i == n_rows:
            if not any(caps):
                yield tuple(acc)
            return
        if n_cols == 0:
            return
        for row in compositions(row_sums[i], caps, 0):
            if i and row_sums[i - 1] == row_sums[i] and row > acc[-1]:
                continue
            acc.append(row)
            yield from rec(i + 1, [c - v for c, v in zip(caps, row)], acc)
            acc.pop()

    if n_rows == 0:
        if not any(col_sums):
            yield ()
        return
    yield from rec(0, list(col_sums), [])


def diagrams_with_legs(k: int, line_arities: Iterable[int],
                       vertex_arities: Iterable[int]) -> list[Diagram]:
    """Every unlabelled diagram with exactly ``k`` legs, canonical forms, sorted."""
    if k > LEG_CAP:
        raise CapExceeded(f"diagram enumeration capped at {LEG_CAP} legs, got {k}")
    line_arities, vertex_arities = list(line_arities), list(vertex_arities)
    seen: set[Diagram] = set()
    for lines in _arity_multisets(k, line_arities):
        for verts in _arity_multisets(k, vertex_arities):
            for mat in _matrices(lines, verts):
                seen.add(canonical_form(Diagram(lines, verts, mat)))
    return sorted(seen, key=_diagram_sort_key)


def _diagram_sort_key(d: Diagram) -> tuple:
    return (d.legs, len(d.line_arities), d.line_arities, d.vertex_arities, d.incidence)


@functools.lru_cache(maxsize=None)
def validate_closed_form(max_legs: int = VALIDATED_LEGS) -> int:
    """Compare closed-form and leg-level |Aut| on every diagram with at most
    ``max_legs`` legs and unrestricted arities.  Returns the number checked."""
    checked = 0
    for k in range(max_legs + 1):
        arities = range(1, k + 1)
        for d in diagrams_with_legs(k, arities, arities):
            closed, brute = aut_order(d), aut_order_bruteforce(d)
            if closed != brute:
                raise AssertionError(f"|Aut| closed form {closed} != brute force {brute} for {d}")
            checked += 1
    return checked


def _model_diagrams(model: ModelSpec, k_max: int) -> Iterator[SymmetryDatum]:
    if k_max > LEG_CAP:
        raise CapExceeded(f"diagram enumeration capped at {LEG_CAP} legs, need {k_max}")
    if k_max > VALIDATED_LEGS:
        validate_closed_form()
    lines, verts = model.line_arities(k_max), model.vertex_arities(k_max)
    for k in range(k_max + 1):
        for d in diagrams_with_legs(k, lines, verts):
            yield SymmetryDatum(d, aut_order(d), d.is_connected(), d.amplitude(model))


def enumerate_diagrams(model: ModelSpec, eps_degree: int) -> list[SymmetryDatum]:
    """Every unlabelled diagram whose amplitude has an eps^n component."""
    k_max = pairing_bound(model, eps_degree, None)
    return [
        s for s in _model_diagrams(model, k_max)
        if any(a == eps_degree for a, _ in s.amplitude.terms)
    ]


def connected_filter(data: Iterable[SymmetryDatum]) -> list[SymmetryDatum]:
    return [s for s in data if s.connected]


def symmetry_sum(data: Iterable[SymmetryDatum]) -> Fraction:
    return sum((s.symmetry_number for s in data), Fraction(0))


def oracle_table(model: ModelSpec, eps_order: int, g_order: int | None = None,
                 connected: bool = False) -> dict[tuple[int, int], Fraction]:
    """Coefficients ``sum_diagrams amplitude/|Aut|`` for every (i, j) within
    the truncation, optionally over connected diagrams only."""
    k_max = pairing_bound(model, eps_order, g_order)
    table: dict[tuple[int, int], Fraction] = {}
    for s in _model_diagrams(model, k_max):
        if connected and not s.connected:
            continue
        for (a, b), c in s.amplitude.terms.items():
            if a <= eps_order and (g_order is None or b <= g_order):
                table[(a, b)] = table.get((a, b), Fraction(0)) + c * s.symmetry_number
    return {k: v for k, v in sorted(table.items()) if v}


def oracle_coefficient(model: ModelSpec, eps_degree: int, g_degree: int) -> Fraction:
    return oracle_table(model, eps_degree, g_degree).get((eps_degree, g_degree), Fraction(0))
