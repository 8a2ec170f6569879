import json
import math
import random

import pytest

from instances import random_claim_instance, random_coset_swap_instance
from qdci.ci import cayley_isomorphic, verify_certificate
from qdci.errors import DomainError, ValidationError
from qdci.groups import make_cyclic, make_quaternion
from qdci.witness import (
    check_soundness,
    claim_iso_check,
    coset_swap_check,
    even_witness,
    phi_map,
    podd_witness,
    regenerate,
    subgroup_automorphism,
)


def _set(G, text):
    return set(G.parse_set(text).members)


def test_phi_examples_in_q16():
    G = make_quaternion(4)
    phi = phi_map(4)
    e = G.parse_element
    assert phi[e("a")] == e("b*a")
    assert phi[e("b")] == e("b")
    assert phi[e("b*a")] == e("a^5")
    assert phi[e("a^2")] == e("a^2")
    with pytest.raises(DomainError):
        phi_map(5)


def test_claim_examples():
    G = make_quaternion(4)
    K = _set(G, "a,a^7,a^5,a^3")
    assert claim_iso_check(4, set(), K)
    assert claim_iso_check(4, {0, G.parse_element("a^4")}, K)
    for n in (4, 6, 10):
        assert claim_iso_check(n, set(), set())


@pytest.mark.parametrize(
    "H,K,message",
    [
        ({1}, set(), "H must lie"),
        (set(), {2}, "K must lie"),
        ({2}, set(), "H must be closed"),
        (set(), {1, 7}, "a\\^n K = K"),
        (set(), {1, 5}, "K must be closed"),
    ],
)
def test_claim_hypothesis_errors(H, K, message):
    with pytest.raises(ValidationError, match=message):
        claim_iso_check(4, H, K)


def test_claim_on_random_instances():
    rng = random.Random(1)
    for n in (4, 6, 8):
        for _ in range(20):
            H, K = random_claim_instance(rng, n)
            assert claim_iso_check(n, H, K)


def test_even_witness_examples():
    G = make_quaternion(4)
    w = even_witness(4, 2)
    assert set(w.S.members) == _set(G, "b,b^-1") and set(w.T.members) == _set(G, "a^2,a^6")
    w4 = even_witness(4, 4)
    K = _set(G, "a,a^7,a^5,a^3")
    assert set(w4.T.members) == K
    assert set(w4.S.members) == {G.mul(G.gen("b"), x) for x in K}
    assert w4.construction == "even-claim"
    Q24 = make_quaternion(6)
    w11 = even_witness(6, 11)
    assert w11.params["k"] == 1 and w11.params["j"] == 3
    assert w11.params["K"] == {x for x in range(12) if x % 2}
    assert w11.params["H"] == {2, 10, 8, 4, 0}
    assert len(w11.S) == len(w11.T) == 11
    assert Q24.gen("b") in w11.S.members


@pytest.mark.parametrize("n", [4, 6, 8])
def test_even_witnesses_are_sound(n):
    for m in range(2, 2 * n):
        w = even_witness(n, m)
        s = check_soundness(w)
        assert s.passed, (n, m, s)
        assert s.automorphisms_checked == 2 * n * sum(1 for k in range(2 * n) if math.gcd(k, 2 * n) == 1)
        assert regenerate(w) == (w.S, w.T)


def test_even_witness_errors():
    for n, m in [(5, 4), (2, 3), (4, 1), (4, 8), (4, 0)]:
        with pytest.raises(DomainError):
            even_witness(n, m)


def test_podd_examples():
    G = make_quaternion(9)
    w = podd_witness(9, 4, 3)
    assert (w.params["j"], w.params["k"], w.params["Q"]) == (1, 1, set())
    assert set(w.S.members) == _set(G, "a,a^7,a^13,a^6")
    assert set(w.T.members) == _set(G, "a,a^7,a^13,a^12")
    w5 = podd_witness(9, 5, 3)
    assert set(w5.S.members) == _set(G, "a,a^7,a^13,a^6,b")
    assert w5.params["j"] == 1 and w5.params["k"] == 1
    w6 = podd_witness(9, 6, 3)
    assert w6.params["Q"] == _set(G, "b,b*a^6") and w6.params["k"] == 1
    for v in (w, w5, w6):
        assert check_soundness(v).passed
        assert regenerate(v) == (v.S, v.T)


def test_podd_errors():
    for n, m, p in [(9, 4, 2), (9, 4, 9), (12, 4, 3), (9, 3, 3), (9, 18, 3)]:
        with pytest.raises(DomainError):
            podd_witness(n, m, p)


def test_witness_json_is_a_valid_certificate():
    w = podd_witness(9, 4, 3)
    doc = json.loads(json.dumps(w.to_dict()))
    assert doc["group"] == "Q4n:9" and doc["p"] == 3 and doc["construction"] == "podd"
    assert doc["params"]["P"] == ["1", "a^6", "a^12"]
    assert verify_certificate(doc) == (True, "ok")
    even = json.loads(json.dumps(even_witness(4, 5).to_dict()))
    assert verify_certificate(even) == (True, "ok")


def test_subgroup_automorphism_examples():
    G = make_quaternion(9)
    z, b = G.parse_element("a^6"), G.gen("b")
    gamma = subgroup_automorphism(G, [z, b], [G.inv(z), b])
    assert gamma is not None and len(gamma) == 12
    assert gamma[G.mul(z, b)] == G.mul(G.inv(z), b)
    assert subgroup_automorphism(G, [z], [b]) is None


def test_coset_swap_example_from_the_odd_construction():
    G = make_quaternion(9)
    z, b = G.parse_element("a^6"), G.gen("b")
    P = {0, z, G.inv(z)}
    M = set(G.parse_set("a^6,a^12,b,b*a^6,b*a^12,a^9,a^3,a^15,a^9*b,a^3*b,a^15*b").members) | {0}
    gamma = subgroup_automorphism(G, [z, b], [G.inv(z), b])
    w = podd_witness(9, 6, 3)
    A = w.params["Z"] | w.params["Q"]
    B = w.params["Z_gamma"] | w.params["Q_gamma"]
    C = {G.mul(G.gen("a"), x) for x in P}
    assert set(gamma) == M
    assert coset_swap_check(G, P, M, A, B, gamma, C)


def test_coset_swap_trivial_cases():
    G = make_quaternion(3)
    full = set(G.elements())
    ident = {x: x for x in full}
    A = {1, 6}
    assert coset_swap_check(G, {0}, full, A, A, ident, set())
    # with L = M = G any automorphism qualifies and C must be empty
    sigma = cayley_isomorphic(G, [1], [5])
    assert coset_swap_check(G, full, full, {1}, {5}, sigma, set())


def test_coset_swap_validation_errors():
    G = make_quaternion(3)
    full = set(G.elements())
    ident = {x: x for x in full}
    H3 = {0, 2, 4}
    bsub = {0, 6, 3, 9}
    cases = [
        (bsub, full, {1}, {1}, ident, set(), "not a normal subgroup"),
        (H3, {0, 1}, set(), set(), {0: 0, 1: 1}, set(), "M is not a subgroup"),
        (H3, bsub, set(), set(), {x: x for x in bsub}, set(), "not contained"),
        (H3, full, {0}, {0}, ident, set(), "subsets of M"),
        (H3, full, {1}, {2}, ident, set(), "does not map A onto B"),
        (H3, full, set(), set(), ident, {2}, "meets L"),
        (H3, full, set(), set(), ident, {1}, "union of cosets"),
    ]
    for L, M, A, B, gamma, C, message in cases:
        with pytest.raises(ValidationError, match=message):
            coset_swap_check(G, L, M, A, B, gamma, C)
    swap = cayley_isomorphic(G, [1], [5])
    with pytest.raises(ValidationError, match="fix every coset"):
        coset_swap_check(G, {0}, full, {1}, {5}, swap, set())
    bad = dict(ident)
    bad[1], bad[2] = 2, 1
    with pytest.raises(ValidationError, match="homomorphism"):
        coset_swap_check(G, H3, full, set(), set(), bad, set())


@pytest.mark.parametrize("G", [make_quaternion(3), make_cyclic(12)])
def test_coset_swap_on_random_instances(G):
    rng = random.Random(4)
    for _ in range(10):
        assert coset_swap_check(G, *random_coset_swap_instance(rng, G))
