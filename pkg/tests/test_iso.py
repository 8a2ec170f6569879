import random

import pytest

from oracles import arcs_of, brute_aut_count, brute_isomorphism, naive_refinement_blocks, random_digraph_arcs
from qdci.digraph import Digraph, cayley_digraph, complete_digraph, directed_cycle, empty_digraph, lexicoproduct
from qdci.errors import DomainError, ResourceError
from qdci.groups import ConnectionSet, FiniteGroup, make_cyclic, make_quaternion
from qdci.iso import (
    BabaiVerdict,
    automorphism_group,
    babai_ci_test,
    canonical_form,
    decode_canonical,
    find_isomorphism,
    refine,
)


def _random_perm(rng, n):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


def _blocks(coloring):
    out = {}
    for v, c in enumerate(coloring):
        out.setdefault(c, set()).add(v)
    return {frozenset(b) for b in out.values()}


def test_refine_examples():
    assert refine(directed_cycle(5)) == (0,) * 5
    star = Digraph.from_arcs(4, [(0, 1), (0, 2), (0, 3)])
    assert refine(star) == (0, 1, 1, 1)
    path = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    assert refine(path) == (0, 1, 2)
    assert refine(complete_digraph(4), [0, 1, 0, 1]) == (0, 1, 0, 1)
    with pytest.raises(DomainError):
        refine(path, [0, 0])


def test_refine_matches_naive_fixpoint():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 10)
        D = Digraph.from_arcs(n, random_digraph_arcs(rng, n, rng.choice([0.2, 0.4, 0.6])))
        init = [rng.randint(0, 2) for _ in range(n)] if rng.random() < 0.5 else None
        assert _blocks(refine(D, init)) == naive_refinement_blocks(D, init)


def test_canonical_bytes_layout():
    form = canonical_form(directed_cycle(3))
    data = form.canonical_adjacency
    assert data[0] == 1
    assert int.from_bytes(data[1:5], "big") == 3
    assert len(data) == 5 + 3
    assert form.hex() == data.hex()
    assert decode_canonical(data).arc_count() == 3
    big = canonical_form(empty_digraph(9)).canonical_adjacency
    assert len(big) == 5 + 9 * 2
    with pytest.raises(DomainError):
        decode_canonical(b"\x02" + data[1:])
    with pytest.raises(DomainError):
        decode_canonical(data[:-1])


def test_canonical_form_is_relabeling_invariant():
    rng = random.Random(5)
    G = make_quaternion(4)
    digraphs = [Digraph.from_arcs(n, random_digraph_arcs(rng, n, 0.35)) for n in rng.choices(range(1, 13), k=40)]
    digraphs += [cayley_digraph(G, rng.sample(range(1, 16), 3)) for _ in range(6)]
    digraphs.append(lexicoproduct(directed_cycle(4), empty_digraph(3)))
    for D in digraphs:
        form = canonical_form(D)
        assert D.relabel(form.canonical_labeling) == decode_canonical(form.canonical_adjacency)
        for _ in range(5):
            E = D.relabel(_random_perm(rng, D.n))
            assert canonical_form(E).canonical_adjacency == form.canonical_adjacency


def test_isomorphic_cayley_digraphs_of_q16_share_a_form():
    G = make_quaternion(4)
    D1 = cayley_digraph(G, G.parse_set("b,b^-1"))
    D2 = cayley_digraph(G, G.parse_set("a^2,a^6"))
    assert canonical_form(D1).canonical_adjacency == canonical_form(D2).canonical_adjacency
    f = find_isomorphism(D1, D2)
    assert f is not None and D1.relabel(f) == D2
    D3 = cayley_digraph(G, G.parse_set("a,a^7"))
    assert find_isomorphism(D1, D3) is None


def test_find_isomorphism_matches_backtracking():
    rng = random.Random(23)
    positives = 0
    for _ in range(400):
        n = rng.randint(1, 7)
        arcs = random_digraph_arcs(rng, n, 0.4)
        D1 = Digraph.from_arcs(n, arcs)
        if rng.random() < 0.5:
            D2 = D1.relabel(_random_perm(rng, n))
        else:
            D2 = Digraph.from_arcs(n, random_digraph_arcs(rng, n, 0.4))
        f = find_isomorphism(D1, D2)
        brute = brute_isomorphism(D1, D2)
        assert (f is None) == (brute is None)
        if f is not None:
            assert {(f[u], f[v]) for u, v in arcs_of(D1)} == arcs_of(D2)
            positives += 1
    assert positives > 100
    assert find_isomorphism(empty_digraph(3), empty_digraph(4)) is None


def test_automorphism_group_order_matches_backtracking():
    rng = random.Random(2)
    for _ in range(120):
        n = rng.randint(1, 8)
        D = Digraph.from_arcs(n, random_digraph_arcs(rng, n, rng.choice([0.15, 0.3, 0.5])))
        A = automorphism_group(D)
        assert A.order() == brute_aut_count(D)
        assert all(D.is_automorphism(g) for g in A.generators)


def test_automorphism_group_examples():
    assert automorphism_group(directed_cycle(7)).order() == 7
    assert automorphism_group(complete_digraph(5)).order() == 120
    assert automorphism_group(lexicoproduct(directed_cycle(4), empty_digraph(3))).order() == 4 * 6**4
    G = make_quaternion(3)
    for S in ([1], [6], [1, 6], [3, 7, 9]):
        D = cayley_digraph(G, S)
        assert automorphism_group(D).order() == brute_aut_count(D)


def test_aut_of_q16_b_binv():
    G = make_quaternion(4)
    D = cayley_digraph(G, G.parse_set("b,b^-1"))
    # four undirected 4-cycles: 8^4 * 4!
    assert automorphism_group(D).order() == 98304 == brute_aut_count(D)


def test_vertex_cap():
    with pytest.raises(ResourceError):
        canonical_form(empty_digraph(10), cap=9)


def test_babai_examples():
    Q12 = make_quaternion(3)
    assert babai_ci_test(Q12, Q12.parse_set("a^3")) is BabaiVerdict.CI
    assert babai_ci_test(Q12, Q12.parse_set("a,b")) is BabaiVerdict.CI
    Q16 = make_quaternion(4)
    assert babai_ci_test(Q16, Q16.parse_set("b,b^-1")) is BabaiVerdict.NOT_CI
    assert babai_ci_test(Q16, Q16.parse_set("b,b^-1"), cap=1000) is BabaiVerdict.INCONCLUSIVE
    Z6 = make_cyclic(6)
    assert babai_ci_test(Z6, ConnectionSet(Z6, [1])) is BabaiVerdict.CI
    assert BabaiVerdict.NOT_CI.value == "not-CI"
    T = FiniteGroup.from_table(Q12.table)
    with pytest.raises(DomainError):
        babai_ci_test(T, ConnectionSet(T, [1]))
