"""Colour refinement, canonical forms, isomorphism and automorphism groups.

The search is an individualization-refinement tree in the style of McKay's
algorithm.  Each node is an ordered partition refined to equitability over
both in- and out-neighbourhoods; the refinement records a label-invariant
trace.  Leaves are ordered by ``(trace sequence, relabelled adjacency)`` and
the greatest leaf is the canonical form.  Automorphisms discovered when two
leaves coincide prune the tree in three ways: orbit pruning among children,
backjumping to the common ancestor, and trace comparison against the best
leaf seen so far.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .digraph import Digraph, cayley_digraph
from .errors import DomainError, ResourceError
from .groups import ConnectionSet, FiniteGroup
from .perm import (
    ELEMENT_CAP,
    Perm,
    PermutationGroup,
    regular_cyclic_subgroups,
    regular_subgroups_isomorphic_to_Q,
    right_regular_representation,
    subgroup_transporter,
)

VERTEX_CAP = 256
FORMAT_TAG = 1

Coloring = tuple[int, ...]


# refinement ---------------------------------------------------------------


def _refine_cells(out: Sequence[int], inn: Sequence[int], cells: list[list[int]], splitters):
    """Refine an ordered partition in place of a copy; return ``(cells, trace)``."""
    n = len(out)
    queue = deque(splitters)
    pending = {id(c) for c in splitters}
    trace = []
    singles = sum(1 for c in cells if len(c) == 1)
    while queue and singles < n:
        w = queue.popleft()
        if id(w) not in pending:
            continue
        pending.discard(id(w))
        if len(w) == 1:
            wm = 1 << w[0]
        else:
            wm = 0
            for v in w:
                wm |= 1 << v
        touched = 0
        for v in w:
            touched |= out[v] | inn[v]
        new_cells = []
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups = None
            first_key = None
            for idx, v in enumerate(cell):
                if (touched >> v) & 1:
                    key = ((out[v] & wm).bit_count(), (inn[v] & wm).bit_count())
                else:
                    key = (0, 0)
                if groups is None:
                    if idx == 0:
                        first_key = key
                        continue
                    if key == first_key:
                        continue
                    groups = {first_key: cell[:idx]}
                groups.setdefault(key, []).append(v)
            if groups is None:
                new_cells.append(cell)
                continue
            keys = sorted(groups)
            trace.append((len(new_cells), tuple((k, len(groups[k])) for k in keys)))
            pending.discard(id(cell))
            for k in keys:
                piece = groups[k]
                new_cells.append(piece)
                queue.append(piece)
                pending.add(id(piece))
                if len(piece) == 1:
                    singles += 1
        cells = new_cells
    return cells, tuple(trace)


def _cells_from_coloring(n: int, coloring: Sequence[int]) -> list[list[int]]:
    if len(coloring) != n:
        raise DomainError("colouring length differs from the vertex count")
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(coloring):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


def _coloring_from_cells(n: int, cells: list[list[int]]) -> Coloring:
    ordered = sorted(cells, key=min)
    color = [0] * n
    for i, cell in enumerate(ordered):
        for v in cell:
            color[v] = i
    return tuple(color)


def refine(G: Digraph, initial: Sequence[int] | None = None) -> Coloring:
    """Coarsest equitable colouring finer than ``initial``.

    Equal colours mean equal numbers of in- and out-neighbours in every
    colour class.  Colours are renumbered by least vertex.
    """
    if initial is None:
        initial = [0] * G.n
    cells = _cells_from_coloring(G.n, initial)
    if G.n == 0:
        return ()
    cells, _ = _refine_cells(G.rows, G.in_rows, cells, list(cells))
    return _coloring_from_cells(G.n, cells)


# search tree -------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical adjacency bytes plus the labelling producing them.

    ``canonical_labeling[v]`` is the canonical position of vertex ``v``.
    """

    canonical_adjacency: bytes
    canonical_labeling: Perm

    def hex(self) -> str:
        return self.canonical_adjacency.hex()


@dataclass
class _Leaf:
    lab: list[int]
    cert: tuple[int, ...]
    traces: list[tuple]
    path: list[int]


def _common_prefix(p: Sequence[int], q: Sequence[int]) -> int:
    k = 0
    for x, y in zip(p, q):
        if x != y:
            break
        k += 1
    return k


class _Canonizer:
    def __init__(self, G: Digraph):
        self.n = G.n
        self.out = G.rows
        self.inn = G.in_rows
        self.first: _Leaf | None = None
        self.best: _Leaf | None = None
        self.auts: list[Perm] = []

    def run(self) -> None:
        cells = [list(range(self.n))]
        cells, _ = _refine_cells(self.out, self.inn, cells, list(cells))
        self._search(cells, [], [], True)

    def _leaf(self, cells, path, traces, eq_first):
        lab = [c[0] for c in cells]
        pos = [0] * self.n
        for i, v in enumerate(lab):
            pos[v] = i
        rows = []
        out = self.out
        for v in lab:
            row = out[v]
            acc = 0
            while row:
                low = row & -row
                acc |= 1 << pos[low.bit_length() - 1]
                row ^= low
            rows.append(acc)
        cert = tuple(rows)
        if self.first is None:
            self.first = self.best = _Leaf(lab, cert, list(traces), list(path))
            return None
        if eq_first and cert == self.first.cert:
            self._record(self.first.lab, lab)
            return _common_prefix(path, self.first.path)
        best = self.best
        if traces == best.traces:
            if cert == best.cert:
                self._record(best.lab, lab)
                return _common_prefix(path, best.path)
            if cert > best.cert:
                self.best = _Leaf(lab, cert, list(traces), list(path))
        elif traces > best.traces:
            self.best = _Leaf(lab, cert, list(traces), list(path))
        return None

    def _record(self, src: list[int], dst: list[int]) -> None:
        perm = [0] * self.n
        for a, b in zip(src, dst):
            perm[a] = b
        perm = tuple(perm)
        if any(i != p for i, p in enumerate(perm)) and perm not in self.auts:
            self.auts.append(perm)

    def _search(self, cells, path, traces, eq_first):
        depth = len(path)
        if len(cells) == self.n:
            return self._leaf(cells, path, traces, eq_first)
        t = min((i for i, c in enumerate(cells) if len(c) > 1), key=lambda i: (len(cells[i]), i))
        target = sorted(cells[t])
        explored: list[int] = []
        parent: dict[int, int] = {}
        used_auts = 0

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for v in target:
            if explored:
                if used_auts < len(self.auts):
                    for a in self.auts[used_auts:]:
                        if all(a[p] == p for p in path):
                            for x in target:
                                rx, ry = find(x), find(a[x])
                                if rx != ry:
                                    parent[max(rx, ry)] = min(rx, ry)
                    used_auts = len(self.auts)
                rv = find(v)
                if any(find(w) == rv for w in explored):
                    continue
            child = cells[:t] + [[v], [x for x in cells[t] if x != v]] + cells[t + 1 :]
            child, trace = _refine_cells(self.out, self.inn, child, [child[t]])
            ctraces = traces + [trace]
            child_eq_first = self.first is None or (eq_first and trace == self.first.traces[depth])
            if not child_eq_first and ctraces < self.best.traces[: depth + 1]:
                explored.append(v)
                continue
            r = self._search(child, path + [v], ctraces, child_eq_first)
            explored.append(v)
            if r is not None and r < depth:
                return r
        return None


_CACHE: dict[Digraph, tuple[CanonicalForm, tuple[Perm, ...]]] = {}
_CACHE_LIMIT = 100_000


def _encode(n: int, rows: Sequence[int]) -> bytes:
    width = (n + 7) // 8
    return bytes([FORMAT_TAG]) + n.to_bytes(4, "big") + b"".join(r.to_bytes(width, "little") for r in rows)


def _canonize(G: Digraph, cap: int) -> tuple[CanonicalForm, tuple[Perm, ...]]:
    if G.n > cap:
        raise ResourceError(f"canonical labelling capped at {cap} vertices (digraph has {G.n})")
    hit = _CACHE.get(G)
    if hit is not None:
        return hit
    if G.n == 0:
        result = (CanonicalForm(_encode(0, ()), ()), ())
    else:
        search = _Canonizer(G)
        search.run()
        lab = search.best.lab
        labeling = [0] * G.n
        for i, v in enumerate(lab):
            labeling[v] = i
        result = (CanonicalForm(_encode(G.n, search.best.cert), tuple(labeling)), tuple(search.auts))
    if len(_CACHE) >= _CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[G] = result
    return result


def canonical_form(G: Digraph, cap: int = VERTEX_CAP) -> CanonicalForm:
    return _canonize(G, cap)[0]


def decode_canonical(data: bytes) -> Digraph:
    """Rebuild the canonical digraph from ``canonical_adjacency`` bytes."""
    if not data or data[0] != FORMAT_TAG:
        raise DomainError("unknown canonical form format tag")
    n = int.from_bytes(data[1:5], "big")
    width = (n + 7) // 8
    body = data[5:]
    if len(body) != n * width:
        raise DomainError("truncated canonical form")
    rows = [int.from_bytes(body[i * width : (i + 1) * width], "little") for i in range(n)]
    return Digraph(n, rows)


def find_isomorphism(G1: Digraph, G2: Digraph, cap: int = VERTEX_CAP) -> Perm | None:
    """A vertex bijection mapping the arcs of ``G1`` onto those of ``G2``."""
    if G1.n != G2.n or G1.arc_count() != G2.arc_count():
        return None
    c1 = canonical_form(G1, cap)
    c2 = canonical_form(G2, cap)
    if c1.canonical_adjacency != c2.canonical_adjacency:
        return None
    inv2 = [0] * G2.n
    for v, p in enumerate(c2.canonical_labeling):
        inv2[p] = v
    return tuple(inv2[c1.canonical_labeling[v]] for v in range(G1.n))


def automorphism_group(G: Digraph, cap: int = VERTEX_CAP) -> PermutationGroup:
    _, auts = _canonize(G, cap)
    return PermutationGroup(G.n, auts)


# Babai's criterion ----------------------------------------------------------------


class BabaiVerdict(str, enum.Enum):
    CI = "CI"
    NOT_CI = "not-CI"
    INCONCLUSIVE = "inconclusive"


def babai_ci_test(G: FiniteGroup, S: ConnectionSet, cap: int = ELEMENT_CAP) -> BabaiVerdict:
    """Decide the CI property of ``S`` through regular subgroups of ``Aut(Cay(G, S))``.

    ``S`` is a CI-subset iff every regular subgroup of the automorphism group
    isomorphic to ``G`` is conjugate to the right regular representation.
    Returns ``INCONCLUSIVE`` when the automorphism group exceeds ``cap``.
    """
    if G.kind not in ("quaternion", "cyclic"):
        raise DomainError("Babai test implemented for Q4n and cyclic groups only")
    A = automorphism_group(cayley_digraph(G, S))
    if A.order() > cap:
        return BabaiVerdict.INCONCLUSIVE
    R = right_regular_representation(G)
    try:
        if G.kind == "quaternion":
            regular = regular_subgroups_isomorphic_to_Q(A, G.param, cap)
        else:
            regular = regular_cyclic_subgroups(A, cap)
        for X in regular:
            if subgroup_transporter(A, X, R, cap) is None:
                return BabaiVerdict.NOT_CI
    except ResourceError:
        return BabaiVerdict.INCONCLUSIVE
    return BabaiVerdict.CI
