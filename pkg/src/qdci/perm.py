"""Small permutation-group kernel.

Permutations are tuples of images.  Products act on the right, matching the
exponential notation ``x^(pq) = (x^p)^q``: ``mul(p, q)[x] == q[p[x]]``.
Groups carry a deterministic Schreier-Sims stabilizer chain built eagerly at
construction; base points are chosen in ascending order.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Iterator, Sequence

from .digraph import Digraph, OrbitPartition
from .errors import DomainError, ResourceError, ValidationError
from .groups import FiniteGroup

Perm = tuple[int, ...]

ELEMENT_CAP = 10**6


def identity(n: int) -> Perm:
    return tuple(range(n))


def mul(p: Perm, q: Perm) -> Perm:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[x] for x in p)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def conjugate(x: Perm, alpha: Perm) -> Perm:
    """``alpha^-1 * x * alpha``, i.e. maps ``p^alpha`` to ``(p^x)^alpha``."""
    out = [0] * len(x)
    for p, xp in enumerate(x):
        out[alpha[p]] = alpha[xp]
    return tuple(out)


def power(p: Perm, e: int) -> Perm:
    if e < 0:
        p, e = inverse(p), -e
    result = identity(len(p))
    base = p
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result


def is_identity(p: Perm) -> bool:
    return all(x == y for x, y in enumerate(p))


def cycle_lengths(p: Perm) -> list[int]:
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = p[x]
            length += 1
        lengths.append(length)
    return lengths


def perm_order(p: Perm) -> int:
    return math.lcm(*cycle_lengths(p)) if p else 1


def format_perm(p: Perm) -> str:
    """Debug rendering ``p 0->i0 1->i1 ...``."""
    return "p " + " ".join(f"{x}->{y}" for x, y in enumerate(p))


def check_perm(p: Sequence[int], n: int | None = None) -> Perm:
    p = tuple(p)
    if sorted(p) != list(range(len(p))):
        raise ValidationError("not a permutation")
    if n is not None and len(p) != n:
        raise DomainError(f"permutation has degree {len(p)}, expected {n}")
    return p


class PermutationGroup:
    """A permutation group on ``range(degree)`` with a stabilizer chain."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]], base: Sequence[int] = ()):
        gens = []
        for g in generators:
            g = check_perm(g, degree)
            if not is_identity(g) and g not in gens:
                gens.append(g)
        self.degree = degree
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._orbits = None
        self._elements = None
        self._schreier_sims(list(base))

    # stabilizer chain -------------------------------------------------

    def _level_orbit(self, i: int) -> None:
        b = self.base[i]
        trans = {b: identity(self.degree)}
        frontier = [b]
        gens = self.strong[i]
        while frontier:
            nxt = []
            for x in frontier:
                u = trans[x]
                for s in gens:
                    y = s[x]
                    if y not in trans:
                        trans[y] = mul(u, s)
                        nxt.append(y)
            frontier = nxt
        self.transversals[i] = trans

    def _strip(self, g: Perm, start: int) -> tuple[Perm, int]:
        for level in range(start, len(self.base)):
            x = g[self.base[level]]
            trans = self.transversals[level]
            if x not in trans:
                return g, level
            g = mul(g, inverse(trans[x]))
        return g, len(self.base)

    def _new_level(self, point: int) -> None:
        self.base.append(point)
        self.strong.append([])
        self.transversals.append({point: identity(self.degree)})

    def _schreier_sims(self, base: list[int]) -> None:
        self.base: list[int] = []
        self.strong: list[list[Perm]] = []
        self.transversals: list[dict[int, Perm]] = []
        for b in base:
            if b not in self.base:
                self._new_level(b)
        for g in self.generators:
            if all(g[b] == b for b in self.base):
                self._new_level(next(x for x in range(self.degree) if g[x] != x))
        for i in range(len(self.base)):
            fixed = self.base[:i]
            self.strong[i] = [g for g in self.generators if all(g[b] == b for b in fixed)]
            self._level_orbit(i)
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            trans = self.transversals[i]
            for beta in list(trans):
                u_beta = trans[beta]
                for s in self.strong[i]:
                    g1 = mul(u_beta, s)
                    u1 = trans[s[beta]]
                    if g1 == u1:
                        continue
                    h, j = self._strip(mul(g1, inverse(u1)), i + 1)
                    if j < len(self.base) or not is_identity(h):
                        if j == len(self.base):
                            self._new_level(next(x for x in range(self.degree) if h[x] != x))
                        for level in range(i + 1, j + 1):
                            self.strong[level].append(h)
                            self._level_orbit(level)
                        i = j
                        restart = True
                        break
                if restart:
                    break
            if not restart:
                i -= 1

    # queries -----------------------------------------------------------

    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    def contains(self, p: Sequence[int]) -> bool:
        p = tuple(p)
        if len(p) != self.degree:
            raise DomainError(f"permutation of degree {len(p)} tested against degree {self.degree}")
        h, j = self._strip(p, 0)
        return j == len(self.base) and is_identity(h)

    def __contains__(self, p) -> bool:
        return self.contains(p)

    def elements(self, cap: int = ELEMENT_CAP) -> list[Perm]:
        """All elements, built as products of transversal elements."""
        if self.order() > cap:
            raise ResourceError(f"group of order {self.order()} exceeds element cap {cap}")
        if self._elements is None:
            levels = [list(t.values()) for t in self.transversals]
            elems = [identity(self.degree)]
            for reps in reversed(levels):
                elems = [mul(e, u) for e in elems for u in reps]
            self._elements = elems
        return self._elements

    def orbits(self) -> OrbitPartition:
        if self._orbits is None:
            parent = list(range(self.degree))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for g in self.generators:
                for x, y in enumerate(g):
                    rx, ry = find(x), find(y)
                    if rx != ry:
                        parent[max(rx, ry)] = min(rx, ry)
            blocks: dict[int, list[int]] = {}
            for x in range(self.degree):
                blocks.setdefault(find(x), []).append(x)
            self._orbits = OrbitPartition.from_blocks(self.degree, blocks.values())
        return self._orbits

    def orbit(self, point: int) -> tuple[int, ...]:
        part = self.orbits()
        return part.blocks[part.block_of[point]]

    def point_stabilizer(self, u: int) -> "PermutationGroup":
        if not 0 <= u < self.degree:
            raise DomainError(f"point {u} outside the domain")
        chain = self if self.base[:1] == [u] else PermutationGroup(self.degree, self.generators, base=[u])
        gens = chain.strong[1] if len(chain.base) > 1 else []
        return PermutationGroup(self.degree, gens)

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbits()) == 1

    def is_regular(self) -> bool:
        return self.is_transitive() and self.order() == self.degree

    def is_normalized_by(self, other: "PermutationGroup") -> bool:
        return all(conjugate(x, a) in self for x in self.generators for a in other.generators)

    def is_subgroup_of(self, other: "PermutationGroup") -> bool:
        return all(g in other for g in self.generators)

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, order={self.order()})"


def group_order(A: PermutationGroup) -> int:
    return A.order()


def contains(A: PermutationGroup, p: Sequence[int]) -> bool:
    return A.contains(p)


def orbits(A: PermutationGroup) -> OrbitPartition:
    return A.orbits()


def point_stabilizer(A: PermutationGroup, u: int) -> PermutationGroup:
    return A.point_stabilizer(u)


def is_transitive(A: PermutationGroup) -> bool:
    return A.is_transitive()


def is_regular(A: PermutationGroup) -> bool:
    return A.is_regular()


def is_normal(N: PermutationGroup, A: PermutationGroup) -> bool:
    """True iff ``N <= A`` and ``A`` normalizes ``N``."""
    return N.is_subgroup_of(A) and N.is_normalized_by(A)


def right_regular_representation(G: FiniteGroup) -> PermutationGroup:
    """``R(G)``: generated by ``x -> x*g`` for the generators ``g`` of ``G``."""
    return PermutationGroup(G.order, [right_multiplication(G, g) for _, g in G.generators])


def right_multiplication(G: FiniteGroup, g: int) -> Perm:
    return tuple(G.mul(x, g) for x in range(G.order))


def subgroup_image(G: FiniteGroup, H: Iterable[int]) -> PermutationGroup:
    """``R(H)`` for a subset ``H`` (generates ``R(<H>)``)."""
    return PermutationGroup(G.order, [right_multiplication(G, h) for h in H])


# primitivity -----------------------------------------------------------------


def _minimal_block(gens: Sequence[Perm], omega: Sequence[int], alpha: int, beta: int) -> set[int]:
    """Smallest block of imprimitivity containing ``alpha`` and ``beta``."""
    parent = {x: x for x in omega}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[ry] = rx
        return True

    union(alpha, beta)
    queue = [(alpha, beta)]
    while queue:
        x, y = queue.pop()
        for g in gens:
            gx, gy = g[x], g[y]
            if find(gx) != find(gy):
                queue.append((gx, gy))
                union(gx, gy)
    root = find(alpha)
    return {x for x in omega if find(x) == root}


def is_primitive_action(A: PermutationGroup, omega: Iterable[int]) -> bool:
    """Whether ``A`` acts primitively on the invariant set ``omega``."""
    omega = sorted(set(omega))
    if not omega:
        return True
    omega_set = set(omega)
    for g in A.generators:
        if any(g[x] not in omega_set for x in omega):
            raise ValidationError("omega is not invariant under the group")
    alpha = omega[0]
    orbit = {alpha}
    frontier = [alpha]
    while frontier:
        x = frontier.pop()
        for g in A.generators:
            if g[x] not in orbit:
                orbit.add(g[x])
                frontier.append(g[x])
    if orbit != omega_set:
        raise ValidationError("group is not transitive on omega")
    if len(omega) <= 2:
        return True
    for beta in omega[1:]:
        if len(_minimal_block(A.generators, omega, alpha, beta)) < len(omega):
            return False
    return True


def is_arc_transitive(G: Digraph, A: PermutationGroup) -> bool:
    if not A.is_transitive():
        return False
    if G.arc_count() == 0:
        return True
    stab = A.point_stabilizer(0)
    out = set(G.out_neighbors(0))
    start = min(out)
    orbit = set(stab.orbit(start)) if stab.generators else {start}
    return orbit == out


def is_locally_primitive(G: Digraph, A: PermutationGroup) -> bool:
    """Whether the stabilizer of a vertex acts primitively on its out-neighbourhood."""
    if G.n != A.degree:
        raise DomainError("group and digraph have different degrees")
    if not A.is_transitive():
        raise ValidationError("group is not vertex-transitive")
    out = G.out_neighbors(0)
    if len(out) <= 1:
        return True
    stab = A.point_stabilizer(0)
    reach = set(stab.orbit(out[0])) if stab.generators else {out[0]}
    if reach != set(out):
        return False
    return is_primitive_action(stab, out)


# conjugacy searches ----------------------------------------------------------


def _regular_transporter(A: PermutationGroup, X: PermutationGroup, Y: PermutationGroup) -> Perm | None:
    """Transporter between regular subgroups via isomorphisms ``X -> Y``.

    Since ``Y`` is transitive, a transporter may be assumed to fix point 0;
    such an element is ``0^g -> 0^f(g)`` for an isomorphism ``f``, which is
    fixed by the images of the generators of ``X``.
    """
    n = A.degree
    xgens = list(X.generators)
    yelems = Y.elements()
    orders = [perm_order(g) for g in xgens]
    candidates = [[y for y in yelems if perm_order(y) == o] for o in orders]
    for imgs in itertools.product(*candidates):
        alpha = [-1] * n
        alpha[0] = 0
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for p in frontier:
                q = alpha[p]
                for g, h in zip(xgens, imgs):
                    pg, qh = g[p], h[q]
                    if alpha[pg] == -1:
                        alpha[pg] = qh
                        nxt.append(pg)
                    elif alpha[pg] != qh:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if not ok or -1 in alpha or len(set(alpha)) != n:
            continue
        alpha = tuple(alpha)
        if alpha in A:
            return alpha
    return None


def subgroup_transporter(
    A: PermutationGroup, X: PermutationGroup, Y: PermutationGroup, cap: int = ELEMENT_CAP
) -> Perm | None:
    """Some ``alpha`` in ``A`` with ``X^alpha = Y``, or None."""
    if not (A.degree == X.degree == Y.degree):
        raise DomainError("groups act on different domains")
    if X.order() != Y.order():
        return None
    if X.is_regular() and Y.is_regular():
        return _regular_transporter(A, X, Y)
    return subgroup_transporter_exhaustive(A, X, Y, cap)


def subgroup_transporter_exhaustive(
    A: PermutationGroup, X: PermutationGroup, Y: PermutationGroup, cap: int = ELEMENT_CAP
) -> Perm | None:
    """Search every element of ``A``; generators of ``X`` must land in ``Y``."""
    if X.order() != Y.order():
        return None
    if A.order() > cap:
        raise ResourceError(f"transporter search capped at |A| <= {cap} (|A| = {A.order()})")
    xgens = X.generators
    ytypes = {tuple(sorted(cycle_lengths(y))) for y in Y.elements(cap)}
    if any(tuple(sorted(cycle_lengths(x))) not in ytypes for x in xgens):
        return None
    for alpha in A.elements(cap):
        if all(conjugate(x, alpha) in Y for x in xgens):
            return alpha
    return None


def _dicyclic_generators_from(A_elems: Sequence[Perm], n: int, in_A) -> Iterator[tuple[Perm, Perm]]:
    degree = 4 * n
    for x in A_elems:
        if cycle_lengths(x) != [2 * n, 2 * n]:
            continue
        xn = power(x, n)
        xinv = inverse(x)
        pts0 = [0] * (2 * n)
        p = 0
        for i in range(2 * n):
            pts0[i] = p
            p = x[p]
        orbit0 = set(pts0)
        for u in range(degree):
            if u in orbit0:
                continue
            ptsu = [0] * (2 * n)
            p = u
            for i in range(2 * n):
                ptsu[i] = p
                p = x[p]
            y = [0] * degree
            for i in range(2 * n):
                y[pts0[i]] = ptsu[(-i) % (2 * n)]
                y[ptsu[i]] = pts0[(n - i) % (2 * n)]
            y = tuple(y)
            if mul(y, y) != xn or conjugate(x, y) != xinv:
                continue
            if in_A(y):
                yield x, y


def regular_subgroups_isomorphic_to_Q(A: PermutationGroup, n: int, cap: int = ELEMENT_CAP) -> list[PermutationGroup]:
    """All regular subgroups ``<x, y>`` of ``A`` with the ``Q4n`` presentation.

    ``x`` must be fixed-point-free of order ``2n`` with two cycles; given ``x``
    and the image ``u`` of point 0 under ``y``, the relations determine ``y``
    completely, so each ``x`` contributes at most ``2n`` candidates.
    """
    if A.degree != 4 * n:
        raise DomainError(f"domain size {A.degree} is not 4n = {4 * n}")
    if A.order() < 4 * n:
        return []
    elems = A.elements(cap)
    found: dict[frozenset, PermutationGroup] = {}
    for x, y in _dicyclic_generators_from(elems, n, A.contains):
        powers = [identity(A.degree)]
        for _ in range(2 * n - 1):
            powers.append(mul(powers[-1], x))
        key = frozenset(powers + [mul(p, y) for p in powers])
        if key not in found:
            X = PermutationGroup(A.degree, [x, y])
            if X.is_regular():
                found[key] = X
    return list(found.values())


def regular_cyclic_subgroups(A: PermutationGroup, cap: int = ELEMENT_CAP) -> list[PermutationGroup]:
    """All regular cyclic subgroups of ``A`` (generated by a full cycle)."""
    k = A.degree
    if A.order() < k:
        return []
    found: dict[frozenset, PermutationGroup] = {}
    for x in A.elements(cap):
        if cycle_lengths(x) != [k]:
            continue
        powers = [identity(k)]
        for _ in range(k - 1):
            powers.append(mul(powers[-1], x))
        key = frozenset(powers)
        if key not in found:
            found[key] = PermutationGroup(k, [x])
    return list(found.values())
