"""Dense digraphs with Cayley construction, products and quotients.

Adjacency is stored as one Python ``int`` bit row per vertex: bit ``v`` of
``rows[u]`` is set iff ``(u, v)`` is an arc.  Undirected graphs are digraphs
in which every arc has its reverse.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, ValidationError
from .groups import ConnectionSet, FiniteGroup


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Digraph:
    """An immutable loopless digraph on vertices ``0 .. n-1``."""

    __slots__ = ("n", "rows", "_in_rows", "_hash")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 0 or len(rows) != n:
            raise DomainError("row count must equal the vertex count")
        full = (1 << n) - 1
        for u, row in enumerate(rows):
            if row & ~full:
                raise DomainError(f"row {u} references a vertex >= {n}")
            if (row >> u) & 1:
                raise ValidationError(f"loop at vertex {u}")
        self.n = n
        self.rows = tuple(rows)
        self._in_rows = None
        self._hash = None

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        rows = [0] * n
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"arc {(u, v)} out of range for {n} vertices")
            rows[u] |= 1 << v
        return cls(n, rows)

    @property
    def in_rows(self) -> tuple[int, ...]:
        if self._in_rows is None:
            cols = [0] * self.n
            for u, row in enumerate(self.rows):
                bit = 1 << u
                for v in _bits(row):
                    cols[v] |= bit
            self._in_rows = tuple(cols)
        return self._in_rows

    def has_arc(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def out_neighbors(self, u: int) -> list[int]:
        return list(_bits(self.rows[u]))

    def in_neighbors(self, v: int) -> list[int]:
        return list(_bits(self.in_rows[v]))

    def out_valency(self, u: int) -> int:
        return self.rows[u].bit_count()

    def in_valency(self, v: int) -> int:
        return self.in_rows[v].bit_count()

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, row in enumerate(self.rows) for v in _bits(row)]

    def arc_count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def relabel(self, perm: Sequence[int]) -> "Digraph":
        """The digraph with arc ``(perm[u], perm[v])`` for every arc ``(u, v)``."""
        rows = [0] * self.n
        for u, row in enumerate(self.rows):
            acc = 0
            for v in _bits(row):
                acc |= 1 << perm[v]
            rows[perm[u]] = acc
        return Digraph(self.n, rows)

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        return self.relabel(perm).rows == self.rows

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.rows))
        return self._hash

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={self.arc_count()})"


@dataclass(frozen=True)
class OrbitPartition:
    """A partition of the vertex set; blocks are numbered by least member."""

    block_of: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "OrbitPartition":
        ordered = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])
        block_of = [-1] * n
        for i, block in enumerate(ordered):
            for v in block:
                block_of[v] = i
        if -1 in block_of:
            raise ValidationError("blocks do not cover the vertex set")
        return cls(tuple(block_of), tuple(ordered))

    def __len__(self):
        return len(self.blocks)


# constructors -------------------------------------------------------------


def cayley_digraph(G: FiniteGroup, S: ConnectionSet | Iterable[int]) -> Digraph:
    """``Cay(G, S)``: arcs ``(g, s*g)`` for ``g`` in ``G`` and ``s`` in ``S``."""
    members = S.members if isinstance(S, ConnectionSet) else tuple(sorted(set(S)))
    if 0 in members:
        raise ValidationError("the identity cannot belong to a connection set")
    tab = G.table
    rows = [0] * G.order
    for g in range(G.order):
        acc = 0
        for s in members:
            acc |= 1 << tab[s][g]
        rows[g] = acc
    return Digraph(G.order, rows)


def directed_cycle(k: int) -> Digraph:
    if k < 2:
        raise DomainError("a directed cycle needs at least 2 vertices")
    return Digraph.from_arcs(k, ((i, (i + 1) % k) for i in range(k)))


def empty_digraph(k: int) -> Digraph:
    if k < 1:
        raise DomainError("digraph size must be >= 1")
    return Digraph(k, [0] * k)


def complete_digraph(k: int) -> Digraph:
    if k < 1:
        raise DomainError("digraph size must be >= 1")
    full = (1 << k) - 1
    return Digraph(k, [full ^ (1 << i) for i in range(k)])


def complete_bipartite(m: int, n: int) -> Digraph:
    """Arcs from every vertex of ``{0..m-1}`` to every vertex of ``{m..m+n-1}``."""
    if m < 1 or n < 1:
        raise DomainError("both sides need at least one vertex")
    ymask = ((1 << n) - 1) << m
    return Digraph(m + n, [ymask] * m + [0] * n)


def standard_digraph(kind: str, *sizes: int) -> Digraph:
    builders = {
        "directed_cycle": directed_cycle,
        "empty": empty_digraph,
        "complete": complete_digraph,
        "complete_bipartite": complete_bipartite,
    }
    if kind not in builders:
        raise DomainError(f"unknown standard digraph {kind!r}")
    return builders[kind](*sizes)


def lexicoproduct(X: Digraph, Y: Digraph) -> Digraph:
    """``X[Y]`` with vertex ``(x, y)`` numbered ``x * |Y| + y``."""
    ny = Y.n
    fiber = (1 << ny) - 1
    rows = []
    for x in range(X.n):
        between = 0
        for x2 in _bits(X.rows[x]):
            between |= fiber << (x2 * ny)
        for y in range(ny):
            rows.append(between | (Y.rows[y] << (x * ny)))
    return Digraph(X.n * ny, rows)


def induced_subdigraph(G: Digraph, X: Iterable[int]) -> Digraph:
    verts = sorted(set(X))
    if verts and (verts[0] < 0 or verts[-1] >= G.n):
        raise DomainError("vertex out of range")
    pos = {v: i for i, v in enumerate(verts)}
    rows = []
    for u in verts:
        acc = 0
        for v in _bits(G.rows[u]):
            if v in pos:
                acc |= 1 << pos[v]
        rows.append(acc)
    return Digraph(len(verts), rows)


# connectivity and quotients --------------------------------------------------


def _reach(rows: Sequence[int], start: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for u in _bits(frontier):
            nxt |= rows[u]
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def is_strongly_connected(G: Digraph) -> bool:
    if G.n <= 1:
        return True
    full = (1 << G.n) - 1
    return _reach(G.rows, 0) == full and _reach(G.in_rows, 0) == full


def is_directed_cycle(G: Digraph) -> bool:
    """True for the directed ``k``-cycle (``k >= 3``) and for the digon ``K2``."""
    if G.n < 2:
        return False
    if not all(G.out_valency(u) == 1 and G.in_valency(u) == 1 for u in range(G.n)):
        return False
    return is_strongly_connected(G)


def _partition_of(N, n: int) -> OrbitPartition:
    if isinstance(N, OrbitPartition):
        part = N
    else:
        if N.degree != n:
            raise DomainError(f"group acts on {N.degree} points but the digraph has {n} vertices")
        part = N.orbits()
    if len(part.block_of) != n:
        raise DomainError("partition size does not match the digraph")
    return part


def orbit_quotient(G: Digraph, N) -> tuple[Digraph, OrbitPartition]:
    """The quotient digraph induced by the orbits of ``N``.

    ``N`` is a permutation group on the vertices (or an ``OrbitPartition``).
    Arcs inside an orbit are dropped, so the quotient is loopless.
    """
    part = _partition_of(N, G.n)
    masks = []
    for block in part.blocks:
        acc = 0
        for u in block:
            acc |= G.rows[u]
        masks.append(acc)
    rows = []
    for i, mask in enumerate(masks):
        acc = 0
        for v in _bits(mask):
            acc |= 1 << part.block_of[v]
        rows.append(acc & ~(1 << i))
    return Digraph(len(part.blocks), rows), part


def is_cover(G: Digraph, N) -> bool:
    """True iff every vertex has the same out-valency as its orbit in the quotient."""
    quotient, part = orbit_quotient(G, N)
    return all(G.out_valency(u) == quotient.out_valency(part.block_of[u]) for u in range(G.n))


# text format ------------------------------------------------------------------


def format_digraph(G: Digraph) -> str:
    arcs = G.arcs()
    lines = [f"DIGRAPH {G.n} {len(arcs)}"]
    lines.extend(f"{u} {v}" for u, v in arcs)
    return "\n".join(lines) + "\n"


def parse_digraph(text: str) -> Digraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty digraph file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "DIGRAPH":
        raise ValidationError(f"bad header {lines[0]!r}")
    try:
        n, count = int(head[1]), int(head[2])
        arcs = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise ValidationError(f"malformed digraph file: {exc}") from None
    if any(len(a) != 2 for a in arcs):
        raise ValidationError("every arc line must hold exactly two vertices")
    if len(arcs) != count:
        raise ValidationError(f"header announces {count} arcs, file has {len(arcs)}")
    return Digraph.from_arcs(n, arcs)


def write_atomic(path: str | os.PathLike, data: str) -> None:
    """Write ``data`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_digraph(G: Digraph, path: str | os.PathLike) -> None:
    write_atomic(path, format_digraph(G))


def read_digraph(path: str | os.PathLike) -> Digraph:
    with open(path, encoding="utf-8") as fh:
        return parse_digraph(fh.read())
