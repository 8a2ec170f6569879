"""Explicit counterexample pairs for the m-DCI property of Q4n.

Two families are built here.  For even ``n`` the pairs come from the map
``phi`` that fixes ``<a^2> u b<a^2>`` and left-multiplies the rest by ``b``.
For ``p^2 | n`` with ``p`` odd they come from inverting the order-``p``
subgroup ``P = <z>`` inside ``X = <z, b>`` while keeping a union of
``P``-cosets fixed.

Every pair is certified the same way: ``|S| = |T| = m``, an explicit
digraph isomorphism ``Cay(G, S) -> Cay(G, T)``, and an exhaustive check that
no group automorphism carries ``S`` to ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .digraph import cayley_digraph
from .errors import DomainError, ValidationError
from .groups import (
    AUT_CAP,
    Automorphism,
    ConnectionSet,
    FiniteGroup,
    automorphisms,
    generated_subgroup,
    is_normal_subgroup,
    is_subgroup,
    make_quaternion,
)
from .iso import find_isomorphism
from .perm import Perm, inverse, perm_order


def _a(G: FiniteGroup, i: int) -> int:
    return i % (2 * G.param)


def _ba(G: FiniteGroup, i: int) -> int:
    """The element ``b * a^i``."""
    return G.mul(G.gen("b"), _a(G, i))


def _left(G: FiniteGroup, g: int, xs: Iterable[int]) -> set[int]:
    return {G.mul(g, x) for x in xs}


def _render(G: FiniteGroup, xs: Iterable[int]) -> list[str]:
    return [G.render(x) for x in sorted(xs)]


# the phi map and its swap check ------------------------------------------


def phi_map(n: int) -> Perm:
    """Fix ``<a^2> u b<a^2>`` pointwise and send ``x -> b*x`` on the rest."""
    if n % 2:
        raise DomainError(f"phi is defined for even n only (got n={n})")
    G = make_quaternion(n)
    b = G.gen("b")
    phi = tuple(x if (x % (2 * n)) % 2 == 0 else G.mul(b, x) for x in G.elements())
    odd_a = {x for x in range(2 * n) if x % 2}
    odd_ba = {x for x in range(2 * n, 4 * n) if x % 2}
    assert perm_order(phi) == 4
    assert {phi[x] for x in odd_a} == odd_ba and {phi[x] for x in odd_ba} == odd_a
    return phi


def _check_claim_hypotheses(G: FiniteGroup, H: set[int], K: set[int]) -> None:
    n = G.param
    if not all(x < 2 * n and x % 2 == 0 for x in H):
        raise ValidationError("H must lie in <a^2>")
    if not all(x < 2 * n and x % 2 == 1 for x in K):
        raise ValidationError("K must lie in a<a^2>")
    if {G.inv(x) for x in H} != H:
        raise ValidationError("H must be closed under inverses")
    if {G.inv(x) for x in K} != K:
        raise ValidationError("K must be closed under inverses")
    if _left(G, _a(G, n), K) != K:
        raise ValidationError("K must satisfy a^n K = K")


def claim_iso_check(n: int, H: Iterable[int], K: Iterable[int]) -> bool:
    """True iff ``phi`` maps ``Cay(G, bH u K)`` onto ``Cay(G, bH u bK)`` arc by arc."""
    G = make_quaternion(n)
    H, K = set(H), set(K)
    _check_claim_hypotheses(G, H, K)
    b = G.gen("b")
    bH = _left(G, b, H)
    gamma = cayley_digraph(G, bH | K)
    sigma = cayley_digraph(G, bH | _left(G, b, K))
    return gamma.relabel(phi_map(n)) == sigma


# witness pairs -----------------------------------------------------------------


@dataclass(frozen=True)
class WitnessPair:
    """Connection sets ``S``, ``T`` with isomorphic but not Cayley-isomorphic digraphs.

    ``params`` holds the building blocks (element index lists) from which
    ``regenerate`` rebuilds ``S`` and ``T``; ``isomorphism`` maps the vertices
    of ``Cay(G, S)`` onto those of ``Cay(G, T)``.
    """

    group: FiniteGroup
    n: int
    m: int
    p: int | None
    construction: str
    params: dict = field(compare=False)
    S: ConnectionSet
    T: ConnectionSet
    isomorphism: Perm

    def to_dict(self) -> dict:
        G = self.group
        out = {
            "group": G.descriptor(),
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "construction": self.construction,
            "params": {},
            "S": self.S.render(),
            "T": self.T.render(),
            "isomorphism": list(self.isomorphism),
        }
        for key, value in self.params.items():
            if isinstance(value, (set, frozenset, tuple, list)):
                out["params"][key] = _render(G, value)
            else:
                out["params"][key] = value
        return out


def regenerate(w: WitnessPair) -> tuple[ConnectionSet, ConnectionSet]:
    """Rebuild ``(S, T)`` from the recorded construction parameters."""
    G, prm = w.group, w.params
    if w.construction in ("even-m2", "even-m3"):
        S, T = set(prm["S0"]), set(prm["T0"])
    elif w.construction.startswith("even-"):
        bH = _left(G, G.gen("b"), prm["H"])
        S = bH | _left(G, G.gen("b"), prm["K"])
        T = bH | set(prm["K"])
    elif w.construction == "podd":
        C = set(prm["C"])
        S = C | set(prm["Z"]) | set(prm["Q"])
        T = C | set(prm["Z_gamma"]) | set(prm["Q_gamma"])
    else:
        raise DomainError(f"unknown construction {w.construction!r}")
    return ConnectionSet(G, S), ConnectionSet(G, T)


def _even_blocks(G: FiniteGroup, m: int) -> tuple[str, dict]:
    n = G.param
    an = _a(G, n)
    if 4 <= m <= 7:
        K = {_a(G, 1), _a(G, -1), _a(G, n + 1), _a(G, n - 1)}
        H = [set(), {0}, {0, an}, {0, _a(G, 2), _a(G, -2)}][m - 4]
        return "even-claim", {"H": H, "K": K}
    k, j = divmod(m, 8)
    H1 = {_a(G, s * 2 * i) for i in range(1, k + 1) for s in (1, -1)}
    K1 = {_a(G, s * (2 * i - 1)) for i in range(1, k + 1) for s in (1, -1)}
    H2 = H1 | {_a(G, 2 * (k + 1)), _a(G, -2 * (k + 1))}
    K2 = K1 | {_a(G, 2 * k + 1), _a(G, -(2 * k + 1))}
    nH1 = _left(G, an, H1)
    nK1 = _left(G, an, K1)
    nK2 = _left(G, an, K2)
    if j <= 2:
        K = K1 | nK1
        H = H1 | nH1 | [set(), {0}, {0, an}][j]
    elif j == 3:
        if 4 * k + 2 == n:
            H = H1 | nH1 | {0}
            K = {x for x in range(2 * n) if x % 2}
        else:
            H = H2 | nH1 | {0}
            K = K1 | nK1
    else:
        K = K2 | nK2
        H = [H1 | nH1, H1 | nH1 | {0}, H2 | nH1, H2 | nH1 | {0}][j - 4]
    blocks = {"k": k, "j": j, "H1": H1, "K1": K1, "H": H, "K": K}
    if j >= 3 and 4 * k + 2 < n:
        blocks.update(H2=H2, K2=K2)
    return "even-general", blocks


def even_witness(n: int, m: int) -> WitnessPair:
    """A non-CI pair of ``m``-subsets of ``Q4n`` for even ``n``."""
    if n % 2 or n < 4:
        raise DomainError(f"even witnesses need even n >= 4 (got n={n})")
    if m == 1:
        raise DomainError("m = 1 is not covered by the even-n construction")
    if not 2 <= m <= 2 * n - 1:
        raise DomainError(f"m must lie in [2, {2 * n - 1}] (got {m})")
    G = make_quaternion(n)
    b = G.gen("b")
    if m <= 3:
        S0 = {b, G.inv(b)}
        T0 = {_a(G, n // 2), _a(G, 3 * n // 2)}
        if m == 3:
            S0.add(G.mul(b, b))
            T0.add(_a(G, n))
        construction, params = f"even-m{m}", {"S0": S0, "T0": T0}
        S, T = ConnectionSet(G, S0), ConnectionSet(G, T0)
        iso = find_isomorphism(cayley_digraph(G, S), cayley_digraph(G, T))
    else:
        construction, params = _even_blocks(G, m)
        H, K = params["H"], params["K"]
        _check_claim_hypotheses(G, H, K)
        bH = _left(G, b, H)
        S = ConnectionSet(G, bH | _left(G, b, K))
        T = ConnectionSet(G, bH | K)
        # phi carries Cay(G, T) onto Cay(G, S); its inverse goes the other way
        iso = inverse(phi_map(n))
    w = WitnessPair(G, n, m, None, construction, params, S, T, iso)
    _assert_sound(w)
    return w


def _is_prime(p: int) -> bool:
    import sympy

    return bool(sympy.isprime(p))


def podd_witness(n: int, m: int, p: int) -> WitnessPair:
    """A non-CI pair of ``m``-subsets of ``Q4n`` when ``p^2`` divides ``n``, ``p`` odd."""
    if p < 3 or not _is_prime(p):
        raise DomainError(f"p must be an odd prime (got {p})")
    if n % (p * p):
        raise DomainError(f"p^2 must divide n (p={p}, n={n})")
    if not p + 1 <= m <= 2 * n - 1:
        raise DomainError(f"m must lie in [{p + 1}, {2 * n - 1}] (got {m})")
    G = make_quaternion(n)
    b = G.gen("b")
    n1 = 2 * n // p
    z = _a(G, n1)
    P = [_a(G, n1 * t) for t in range(p)]
    r = m % p
    if r == 0:
        j, Q, Q_gamma = p - 2, {b, G.mul(b, z)}, {b, G.mul(b, G.inv(z))}
    elif r == p - 1:
        j, Q, Q_gamma = p - 2, {b}, {b}
    else:
        j, Q, Q_gamma = r, set(), set()
    k, rest = divmod(m - j - len(Q), p)
    if rest or not 1 <= k <= n1 - 1:
        raise DomainError(f"no coset count k with 1 <= k <= {n1 - 1} fits m={m}")
    Z = {_a(G, n1 * t) for t in range(1, j + 1)}
    Z_gamma = {G.inv(x) for x in Z}
    C = _left(G, _a(G, 1), P)
    for i in range(1, k):
        C |= _left(G, _ba(G, i), P)
    S = ConnectionSet(G, C | Z | Q)
    T = ConnectionSet(G, C | Z_gamma | Q_gamma)
    params = {
        "j": j, "k": k, "n_prime": n1, "z": G.render(z),
        "P": set(P), "Z": Z, "Q": Q, "Z_gamma": Z_gamma, "Q_gamma": Q_gamma, "C": C,
    }
    iso = find_isomorphism(cayley_digraph(G, S), cayley_digraph(G, T))
    w = WitnessPair(G, n, m, p, "podd", params, S, T, iso)
    _assert_sound(w)
    return w


# soundness ------------------------------------------------------------------------


@dataclass(frozen=True)
class Soundness:
    sizes_ok: bool
    isomorphic: bool
    no_cayley_isomorphism: bool
    automorphisms_checked: int

    @property
    def passed(self) -> bool:
        return self.sizes_ok and self.isomorphic and self.no_cayley_isomorphism


def check_soundness(w: WitnessPair, aut_cap: int = 4 * AUT_CAP) -> Soundness:
    """Re-verify a pair from scratch against the three certificate conditions."""
    G = w.group
    sizes_ok = len(w.S) == len(w.T) == w.m and 0 not in w.S and 0 not in w.T
    iso = w.isomorphism
    isomorphic = iso is not None and cayley_digraph(G, w.S).relabel(iso) == cayley_digraph(G, w.T)
    auts = automorphisms(G, cap=aut_cap)
    target = w.T.members
    clash = any(a.image_set(w.S.members) == target for a in auts)
    return Soundness(sizes_ok, isomorphic, not clash, len(auts))


def _assert_sound(w: WitnessPair) -> None:
    if w.isomorphism is None:
        raise AssertionError(f"{w.construction}: Cayley digraphs are not isomorphic")
    s = check_soundness(w)
    if not s.passed:
        raise AssertionError(f"{w.construction} (n={w.n}, m={w.m}) failed soundness: {s}")


# coset-preserving isomorphism check ---------------------------------------------


def subgroup_automorphism(G: FiniteGroup, gens: Iterable[int], imgs: Iterable[int]) -> dict[int, int] | None:
    """Extend ``gens[i] -> imgs[i]`` to an automorphism of ``<gens>``, or None."""
    gens, imgs = list(gens), list(imgs)
    M = generated_subgroup(G, gens)
    f = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in zip(gens, imgs):
                y, fy = G.mul(x, g), G.mul(f[x], h)
                if y not in f:
                    f[y] = fy
                    nxt.append(y)
                elif f[y] != fy:
                    return None
        frontier = nxt
    if set(f.values()) != set(M):
        return None
    return f


def coset_swap_check(
    G: FiniteGroup,
    L: Iterable[int],
    M: Iterable[int],
    A: Iterable[int],
    B: Iterable[int],
    gamma: Mapping[int, int] | Automorphism,
    C: Iterable[int],
) -> bool:
    """Validate the coset-preserving hypotheses, then test ``Cay(G, A u C) ~ Cay(G, B u C)``.

    Hypotheses: ``L`` normal in ``G``, ``L <= M <= G``, ``gamma`` an
    automorphism of ``M`` fixing every ``L``-coset in ``M`` with
    ``A^gamma = B``, both inside ``M \\ {1}``, and ``C`` a union of
    ``L``-cosets avoiding ``L``.
    """
    L, M, A, B, C = set(L), set(M), set(A), set(B), set(C)
    if isinstance(gamma, Automorphism):
        gamma = {x: gamma(x) for x in M}
    if not is_normal_subgroup(G, L):
        raise ValidationError("L is not a normal subgroup of G")
    if not is_subgroup(G, M):
        raise ValidationError("M is not a subgroup of G")
    if not L <= M:
        raise ValidationError("L is not contained in M")
    if 0 in A or 0 in B or not (A <= M and B <= M):
        raise ValidationError("A and B must be subsets of M minus the identity")
    if set(gamma) != M or set(gamma.values()) != M:
        raise ValidationError("gamma must be a permutation of M")
    if any(gamma[G.mul(x, y)] != G.mul(gamma[x], gamma[y]) for x in M for y in M):
        raise ValidationError("gamma is not a homomorphism of M")
    if any(G.mul(G.inv(x), gamma[x]) not in L for x in M):
        raise ValidationError("gamma does not fix every coset of L in M")
    if {gamma[x] for x in A} != B:
        raise ValidationError("gamma does not map A onto B")
    if C & L:
        raise ValidationError("C meets L")
    if any(G.mul(x, l) not in C for x in C for l in L):
        raise ValidationError("C is not a union of cosets of L")
    left = cayley_digraph(G, A | C)
    right = cayley_digraph(G, B | C)
    return find_isomorphism(left, right) is not None
