"""Finite groups with exact element arithmetic.

Elements are integers in ``range(order)``; 0 is always the identity.  For the
generalized quaternion group ``Q4n = <a, b | a^2n = 1, b^2 = a^n, a^b = a^-1>``
index ``i`` (``0 <= i < 2n``) is ``a^i`` and index ``2n + i`` is ``a^i*b``.
Cyclic groups use index ``i`` for ``a^i``.  Arbitrary small groups can be
given by a multiplication table.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ResourceError, ValidationError

AUT_CAP = 200


class FiniteGroup:
    """An immutable finite group on element indices ``0 .. order-1``."""

    __slots__ = ("kind", "param", "order", "generators", "_table", "_inv", "_hash")

    def __init__(self, kind: str, param, order: int, generators, table=None):
        self.kind = kind
        self.param = param
        self.order = order
        self.generators = tuple(generators)
        self._table = table
        self._inv = None
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]]) -> "FiniteGroup":
        """Build a group from a full multiplication table.

        Row/column 0 must be the identity.  The group axioms are checked.
        """
        tab = tuple(tuple(int(v) for v in row) for row in table)
        order = len(tab)
        if order == 0 or any(len(row) != order for row in tab):
            raise ValidationError("multiplication table must be square and non-empty")
        if any(tab[0][x] != x or tab[x][0] != x for x in range(order)):
            raise ValidationError("element 0 is not the identity")
        for row in tab:
            if sorted(row) != list(range(order)):
                raise ValidationError("table rows are not permutations (no inverses)")
        if order <= 200:
            for x, y, z in itertools.product(range(order), repeat=3):
                if tab[tab[x][y]][z] != tab[x][tab[y][z]]:
                    raise ValidationError(f"multiplication is not associative at {(x, y, z)}")
        group = cls("table", tab, order, (), table=tab)
        gens = []
        span = {0}
        for x in range(1, order):
            if x not in span:
                gens.append(x)
                span = set(generated_subgroup(group, gens))
        group.generators = tuple((f"g{i}", g) for i, g in enumerate(gens))
        return group

    # arithmetic -------------------------------------------------------

    def mul(self, x: int, y: int) -> int:
        if self.kind == "quaternion":
            n2 = 2 * self.param
            if x < n2:
                if y < n2:
                    return (x + y) % n2
                return n2 + (x + y - n2) % n2
            i = x - n2
            if y < n2:
                return n2 + (i - y) % n2
            return (i - (y - n2) + self.param) % n2
        if self.kind == "cyclic":
            return (x + y) % self.order
        return self._table[x][y]

    @property
    def table(self) -> tuple[tuple[int, ...], ...]:
        """The full multiplication table (built on first use)."""
        if self._table is None:
            rng = range(self.order)
            self._table = tuple(tuple(self.mul(x, y) for y in rng) for x in rng)
        return self._table

    def inv(self, x: int) -> int:
        if self._inv is None:
            tab = self.table
            inv = [0] * self.order
            for g in range(self.order):
                inv[g] = tab[g].index(0)
            self._inv = tuple(inv)
        return self._inv[x]

    def power(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        result = 0
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def product(self, *xs: int) -> int:
        return functools.reduce(self.mul, xs, 0)

    def gen(self, name: str) -> int:
        for gname, g in self.generators:
            if gname == name:
                return g
        raise DomainError(f"group {self.descriptor()} has no generator {name!r}")

    def elements(self) -> range:
        return range(self.order)

    # identity / hashing -------------------------------------------------

    def _key(self):
        return (self.kind, self.param)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"FiniteGroup({self.descriptor()})"

    def descriptor(self) -> str:
        if self.kind == "quaternion":
            return f"Q4n:{self.param}"
        if self.kind == "cyclic":
            return f"Z:{self.order}"
        return f"table:{self.order}"

    # rendering / parsing ------------------------------------------------

    def render(self, x: int) -> str:
        """Render an element as ``1``, ``a^i`` or ``a^i*b``."""
        if self.kind == "quaternion":
            n2 = 2 * self.param
            i, has_b = (x, False) if x < n2 else (x - n2, True)
        elif self.kind == "cyclic":
            i, has_b = x, False
        else:
            return f"g{x}"
        apart = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
        if has_b:
            return f"{apart}*b" if apart else "b"
        return apart or "1"

    def parse_element(self, text: str) -> int:
        """Parse a word such as ``a^3*b``, ``b^-1``, ``ba^2`` or ``1``."""
        word = re.sub(r"\s+", "", text)
        if not word:
            raise DomainError("empty element expression")
        if self.kind == "table":
            m = re.fullmatch(r"g(\d+)", word)
            if not m or int(m.group(1)) >= self.order:
                raise DomainError(f"cannot parse element {text!r}")
            return int(m.group(1))
        names = dict(self.generators)
        pos = 0
        result = 0
        pattern = re.compile(r"\*?(?:(1)|([a-z])(?:\^(-?\d+))?)")
        while pos < len(word):
            m = pattern.match(word, pos)
            if not m or m.end() == pos:
                raise DomainError(f"cannot parse element {text!r} at {word[pos:]!r}")
            pos = m.end()
            if m.group(1):
                continue
            name = m.group(2)
            if name not in names:
                raise DomainError(f"unknown generator {name!r} in {text!r}")
            exp = int(m.group(3)) if m.group(3) is not None else 1
            result = self.mul(result, self.power(names[name], exp))
        return result

    def parse_set(self, text: str) -> "ConnectionSet":
        terms = [t for t in text.split(",") if t.strip()]
        return ConnectionSet(self, (self.parse_element(t) for t in terms))


def make_quaternion(n: int) -> FiniteGroup:
    """The generalized quaternion (dicyclic) group of order ``4n``, ``n >= 3``."""
    if not isinstance(n, int) or n < 3:
        raise DomainError(
            f"Q4n requires n >= 3 (got {n!r}); n = 1 (cyclic Z4) and n = 2 (Q8) are excluded"
        )
    return FiniteGroup("quaternion", n, 4 * n, (("a", 1), ("b", 2 * n)))


def make_cyclic(k: int) -> FiniteGroup:
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"cyclic group order must be >= 1 (got {k!r})")
    gens = (("a", 1 % k),) if k > 1 else (("a", 0),)
    return FiniteGroup("cyclic", k, k, gens)


def parse_group(descriptor: str) -> FiniteGroup:
    """Parse ``Q4n:<n>`` or ``Z:<k>``."""
    m = re.fullmatch(r"\s*(Q4n|Z):(\d+)\s*", descriptor)
    if not m:
        raise DomainError(f"bad group descriptor {descriptor!r} (expected Q4n:<n> or Z:<k>)")
    value = int(m.group(2))
    return make_quaternion(value) if m.group(1) == "Q4n" else make_cyclic(value)


@dataclass(frozen=True)
class ConnectionSet:
    """A subset of ``G \\ {1}`` stored as a sorted tuple of element indices."""

    group: FiniteGroup
    members: tuple[int, ...]

    def __init__(self, group: FiniteGroup, members: Iterable[int]):
        ms = tuple(sorted(set(int(x) for x in members)))
        if ms and (ms[0] < 0 or ms[-1] >= group.order):
            raise ValidationError(f"element index out of range for {group.descriptor()}")
        if 0 in ms:
            raise ValidationError("the identity cannot belong to a connection set")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "members", ms)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.members

    def render(self) -> list[str]:
        return [self.group.render(x) for x in self.members]

    def __str__(self):
        return "{" + ", ".join(self.render()) + "}"


# element-level operations ------------------------------------------------


def element_order(G: FiniteGroup, g: int) -> int:
    if G.kind == "quaternion":
        n2 = 2 * G.param
        return n2 // math.gcd(g, n2) if g < n2 else 4
    if G.kind == "cyclic":
        return G.order // math.gcd(g, G.order)
    t, x = 1, g
    while x != 0:
        x = G.mul(x, g)
        t += 1
    return t


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    """Closure of ``gens`` and the identity under multiplication, sorted."""
    gens = [g for g in set(gens) if g != 0]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(seen))


def is_subgroup(G: FiniteGroup, H: Iterable[int]) -> bool:
    hs = set(H)
    if 0 not in hs:
        return False
    return all(G.mul(x, y) in hs for x in hs for y in hs)


def is_normal_subgroup(G: FiniteGroup, H: Iterable[int]) -> bool:
    hs = set(H)
    if not is_subgroup(G, hs):
        return False
    return all(G.product(G.inv(g), h, g) in hs for g in G.elements() for h in hs)


def subgroup_as_group(G: FiniteGroup, H: Sequence[int]) -> tuple[FiniteGroup, tuple[int, ...]]:
    """Return ``(K, elems)`` where ``K`` is a table group isomorphic to ``H``.

    ``elems[i]`` is the element of ``G`` represented by index ``i`` of ``K``.
    """
    elems = tuple(sorted(set(H)))
    if not is_subgroup(G, elems):
        raise ValidationError("elements do not form a subgroup")
    pos = {x: i for i, x in enumerate(elems)}
    table = [[pos[G.mul(x, y)] for y in elems] for x in elems]
    return FiniteGroup.from_table(table), elems


# automorphisms -------------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """A group automorphism given by its action on element indices."""

    group: FiniteGroup
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    def image_set(self, xs: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted(self.images[x] for x in xs))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """Apply ``self`` first, then ``other``."""
        return Automorphism(self.group, tuple(other.images[y] for y in self.images))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return Automorphism(self.group, tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def describe(self) -> dict[str, str]:
        return {name: self.group.render(self.images[g]) for name, g in self.group.generators}


def _extend_generator_images(G: FiniteGroup, gens: Sequence[int], imgs: Sequence[int]):
    """Extend ``gens[i] -> imgs[i]`` to a bijective endomorphism, or return None.

    Walks the right Cayley graph from the identity, requiring
    ``f(x*g) = f(x)*f(g)`` on every edge; that consistency on all edges is
    equivalent to ``f`` being a homomorphism of the generated group.
    """
    order = G.order
    f = [-1] * order
    f[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            fx = f[x]
            for g, h in zip(gens, imgs):
                y = G.mul(x, g)
                fy = G.mul(fx, h)
                if f[y] == -1:
                    f[y] = fy
                    nxt.append(y)
                elif f[y] != fy:
                    return None
        frontier = nxt
    if -1 in f or len(set(f)) != order:
        return None
    return tuple(f)


def _quaternion_relations_hold(G: FiniteGroup, x: int, y: int) -> bool:
    n = G.param
    return (
        element_order(G, x) == 2 * n
        and G.mul(y, y) == G.power(x, n)
        and G.product(G.inv(y), x, y) == G.inv(x)
    )


@functools.lru_cache(maxsize=64)
def _automorphisms_cached(G: FiniteGroup) -> tuple[Automorphism, ...]:
    gens = [g for _, g in G.generators]
    orders = [element_order(G, x) for x in G.elements()]
    candidates = [[x for x in G.elements() if orders[x] == orders[g]] for g in gens]
    result = []
    for imgs in itertools.product(*candidates):
        if G.kind == "quaternion" and not _quaternion_relations_hold(G, *imgs):
            continue
        f = _extend_generator_images(G, gens, imgs)
        if f is not None:
            result.append(Automorphism(G, f))
    return tuple(result)


def automorphisms(G: FiniteGroup, cap: int = AUT_CAP) -> list[Automorphism]:
    """All automorphisms of ``G`` in a deterministic order.

    Candidate images of the generators are enumerated in index order, checked
    against the defining relations and extended along normal forms.
    """
    if G.order > cap:
        raise ResourceError(
            f"automorphism enumeration capped at |G| <= {cap}; {G.descriptor()} has order {G.order}"
        )
    return list(_automorphisms_cached(G))


def aut_orbit(auts: Sequence[Automorphism], subset: Iterable[int]) -> set[tuple[int, ...]]:
    subset = tuple(subset)
    return {aut.image_set(subset) for aut in auts}


def orbit_partition(G: FiniteGroup, m: int, auts: Sequence[Automorphism] | None = None):
    """Split all ``m``-subsets of ``G \\ {1}`` into ``Aut(G)``-orbits.

    Returns ``(reps, sizes)``: the lexicographically least member of each
    orbit in increasing order, and the orbit sizes.
    """
    if not 1 <= m <= G.order - 1:
        raise DomainError(f"m must lie in [1, {G.order - 1}] (got {m})")
    if auts is None:
        auts = automorphisms(G)
    maps = [a.images for a in auts if not a.is_identity()]
    seen: set[tuple[int, ...]] = set()
    reps, sizes = [], []
    for subset in itertools.combinations(range(1, G.order), m):
        if subset in seen:
            continue
        orbit = {subset}
        for img in maps:
            orbit.add(tuple(sorted(img[x] for x in subset)))
        seen.update(orbit)
        reps.append(subset)
        sizes.append(len(orbit))
    return reps, sizes


def aut_orbit_reps(G: FiniteGroup, m: int) -> list[ConnectionSet]:
    reps, _ = orbit_partition(G, m)
    return [ConnectionSet(G, r) for r in reps]


def burnside_orbit_count(G: FiniteGroup, m: int, auts: Sequence[Automorphism] | None = None) -> int:
    """Number of ``Aut(G)``-orbits on ``m``-subsets of ``G \\ {1}`` by Burnside's lemma."""
    if auts is None:
        auts = automorphisms(G)
    total = 0
    for aut in auts:
        seen = [False] * G.order
        poly = [1] + [0] * m
        for x in range(1, G.order):
            if seen[x]:
                continue
            length = 0
            y = x
            while not seen[y]:
                seen[y] = True
                y = aut.images[y]
                length += 1
            for d in range(m, length - 1, -1):
                poly[d] += poly[d - length]
        total += poly[m]
    return total // len(auts)


def extend_to_automorphism(
    G: FiniteGroup, H1: Iterable[int], H2: Iterable[int], iso: Mapping[int, int]
) -> Automorphism | None:
    """An automorphism of ``G`` restricting to ``iso: H1 -> H2``, if one exists."""
    h1, h2 = set(H1), set(H2)
    if not is_subgroup(G, h1) or not is_subgroup(G, h2):
        raise ValidationError("H1 and H2 must be subgroups")
    if set(iso) != h1 or set(iso.values()) != h2 or len(h1) != len(h2):
        raise ValidationError("iso must be a bijection from H1 onto H2")
    for x in h1:
        for y in h1:
            if iso[G.mul(x, y)] != G.mul(iso[x], iso[y]):
                raise ValidationError("iso is not a homomorphism")
    for aut in automorphisms(G):
        if all(aut.images[x] == y for x, y in iso.items()):
            return aut
    return None
