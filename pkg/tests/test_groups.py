"""Group core: closures, Sylow machinery, cores, quotients."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from fusionloc.errors import (
    InvalidPermutation,
    NotNormal,
    OrderBoundExceeded,
    ParseError,
)
from fusionloc.corpus import builtin_group
from fusionloc.groups import (
    Subgroup,
    bits,
    centralizer,
    cores,
    group_from_permutations,
    group_from_table,
    load_group_json,
    normalizer,
    o_p_prime_mask,
    p_part,
    perm_from_cycles,
    popcount,
    quotient_group,
    structure_hint,
    sylow_p,
)


def test_closure_orders():
    assert group_from_permutations(4, [[[1, 2, 3, 4]], [[1, 2]]]).order == 24
    assert group_from_permutations(5, [[[1, 2, 3, 4, 5]], [[1, 2, 3]]]).order == 60
    assert group_from_permutations(1, []).order == 1


def test_identity_is_index_zero():
    G = builtin_group("S4")
    assert all(G.mul(0, x) == x == G.mul(x, 0) for x in range(G.order))
    assert G.perm_rep[1][0] == tuple(range(4))


def test_invalid_permutation():
    with pytest.raises(InvalidPermutation):
        group_from_permutations(3, [[[1, 1, 2]]])
    with pytest.raises(InvalidPermutation):
        group_from_permutations(3, [[[1, 5]]])


def test_order_bound():
    with pytest.raises(OrderBoundExceeded):
        group_from_permutations(5, [[[1, 2, 3, 4, 5]], [[1, 2, 3]]], bound=30)


def test_order_bound_env(monkeypatch):
    monkeypatch.setenv("FUSIONLOC_ORDER_BOUND", "10")
    with pytest.raises(OrderBoundExceeded):
        group_from_permutations(4, [[[1, 2, 3, 4]], [[1, 2]]])
    monkeypatch.setenv("FUSIONLOC_ORDER_BOUND", "not-a-number")
    with pytest.raises(ParseError):
        group_from_permutations(4, [[[1, 2, 3, 4]], [[1, 2]]])


def test_sylow_examples():
    S4 = builtin_group("S4")
    P = sylow_p(S4, 2)
    assert P.order == 8
    assert structure_hint(P.as_group().group) == "D8"
    C3 = builtin_group("C3")
    assert sylow_p(C3, 2).order == 1
    A5 = builtin_group("A5")
    V = sylow_p(A5, 2)
    assert V.order == 4
    H = V.as_group().group
    assert H.is_abelian and H.exponent() == 2  # Klein four


def test_sylow_deterministic_and_minimal():
    S4 = builtin_group("S4")
    mask = S4.sylow_mask(2)
    conjugates = {S4.conjugate_mask(mask, g) for g in range(S4.order)}
    assert mask == min(conjugates)


def test_normalizer_centralizer_examples():
    S4 = builtin_group("S4")
    V = next(
        m
        for m in S4.normal_subgroup_masks()
        if popcount(m) == 4
    )
    assert normalizer(S4, Subgroup(S4, V)).order == 24

    A5 = builtin_group("A5")
    # centralizer of <(1 2)(3 4)> is a Klein four: independent element scan
    t = next(
        g
        for g in range(A5.order)
        if A5.perm_rep[1][g] == perm_from_cycles([[1, 2], [3, 4]], 5)
    )
    cent = [g for g in range(A5.order) if A5.mul(g, t) == A5.mul(t, g)]
    C = centralizer(A5, Subgroup(A5, A5.closure_mask(1 << t)))
    assert C.order == 4 == len(cent)
    assert C.as_group().group.exponent() == 2

    # everything centralizes the identity
    assert centralizer(S4, Subgroup(S4, 1)).order == S4.order


def test_centralizer_inside_normalizer_corpus():
    for name in ("S4", "A5", "Q8", "SL23"):
        G = builtin_group(name)
        S = sylow_p(G, 2)
        real = G.as_group(S.mask)
        for m in real.group.subgroup_masks():
            parent = real.mask_to_parent(m)
            c = G.centralizer_mask(parent)
            n = G.normalizer_mask(parent)
            assert c & n == c


def test_cores_examples():
    S4 = builtin_group("S4")
    rep = cores(S4, 2)
    assert rep.o_p.order == 4 and rep.o_p_prime.order == 1
    assert rep.is_char_p and rep.is_almost_char_p

    S3 = builtin_group("S3")
    rep3 = cores(S3, 2)
    assert rep3.o_p.order == 1 and rep3.o_p_prime.order == 3
    assert not rep3.is_char_p and rep3.is_almost_char_p

    D8 = builtin_group("D8")
    repd = cores(D8, 2)
    assert repd.o_p.order == 8 and repd.is_char_p

    # SL(2,3) at p=3: almost characteristic 3 via Theta = Q8
    SL = builtin_group("SL23")
    repq = cores(SL, 3)
    assert repq.o_p_prime.order == 8
    assert not repq.is_char_p and repq.is_almost_char_p


def test_cores_intersection_trivial():
    for name in ("S4", "S3", "A4", "A5", "SL23", "C2xS4"):
        G = builtin_group(name)
        for p in (2, 3):
            rep = cores(G, p)
            assert rep.o_p.mask & rep.o_p_prime.mask == 1
            # O_p contains every normal p-subgroup; Theta every normal p'-one
            for n in G.normal_subgroup_masks():
                size = popcount(n)
                if size == p_part(size, p):
                    assert n & rep.o_p.mask == n
                if size % p != 0:
                    assert n & rep.o_p_prime.mask == n


def test_quotient_examples():
    S4 = builtin_group("S4")
    V = next(m for m in S4.normal_subgroup_masks() if popcount(m) == 4)
    q = quotient_group(S4, Subgroup(S4, V))
    assert q.group.order == 6 and structure_hint(q.group) == "S3"
    assert all(
        q.projection[S4.mul(a, b)]
        == q.group.mul(q.projection[a], q.projection[b])
        for a in range(24)
        for b in range(24)
    )

    # quotient by the trivial subgroup is an isomorphic copy
    qt = quotient_group(S4, Subgroup(S4, 1))
    assert qt.group.order == 24

    C2A5 = builtin_group("C2xA5")
    z = C2A5.center_mask()
    assert quotient_group(C2A5, Subgroup(C2A5, z)).group.order == 60

    with pytest.raises(NotNormal):
        quotient_group(S4, Subgroup(S4, S4.closure_mask(1 << 1)))


def test_group_json_io():
    G = load_group_json(
        {"name": "S3", "degree": 3, "generators": [[[1, 2, 3]], [[1, 2]]]}
    )
    assert G.order == 6
    table = [[G.mul(a, b) for b in range(6)] for a in range(6)]
    H = load_group_json({"name": "S3t", "table": table})
    assert H.order == 6 and structure_hint(H) == "S3"
    with pytest.raises(ParseError):
        load_group_json({"name": "bad"})
    broken = [row[:] for row in table]
    broken[3][4] = broken[3][3]
    with pytest.raises(ParseError):
        load_group_json({"name": "broken", "table": broken})


def test_characteristic_p_inherited_locally():
    # characteristic p passes to normalizers and centralizers of p-subgroups
    for name in ("S4", "SL23", "C2xS4", "D8", "Q8"):
        G = builtin_group(name)
        if not cores(G, 2).is_char_p:
            continue
        S = sylow_p(G, 2)
        real = G.as_group(S.mask)
        for m in real.group.subgroup_masks():
            if m == 1:
                continue
            parent = real.mask_to_parent(m)
            nreal = G.as_group(G.normalizer_mask(parent))
            creal = G.as_group(G.centralizer_mask(parent))
            assert cores(nreal.group, 2).is_char_p
            assert cores(creal.group, 2).is_char_p


def test_central_quotient_characteristic():
    # G of characteristic p and Z central: Z <= O_p(G), G/Z of characteristic p
    for name in ("SL23", "Q8", "C2xS4", "D8"):
        G = builtin_group(name)
        rep = cores(G, 2)
        if not rep.is_char_p:
            continue
        for Z in G.subgroups_of(G.center_mask()):
            assert Z & rep.o_p.mask == Z
            q = quotient_group(G, Subgroup(G, Z))
            assert cores(q.group, 2).is_char_p


def test_norm_cent_agree_on_characteristic():
    for name in ("S4", "A5", "C2xA5", "SL23"):
        G = builtin_group(name)
        for p in (2, 3):
            if p_part(G.order, p) == 1:
                continue
            S = sylow_p(G, p)
            real = G.as_group(S.mask)
            for m in real.group.subgroup_masks():
                if m == 1:
                    continue
                parent = real.mask_to_parent(m)
                nrep = cores(G.as_group(G.normalizer_mask(parent)).group, p)
                crep = cores(G.as_group(G.centralizer_mask(parent)).group, p)
                assert nrep.is_char_p == crep.is_char_p
                assert nrep.is_almost_char_p == crep.is_almost_char_p


@st.composite
def small_perm_groups(draw):
    degree = draw(st.integers(min_value=2, max_value=5))
    n_gens = draw(st.integers(min_value=1, max_value=2))
    gens = []
    for _ in range(n_gens):
        perm = draw(st.permutations(list(range(1, degree + 1))))
        # convert one-line notation to cycles
        seen = set()
        cycles = []
        for start in range(1, degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = perm[start - 1]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = perm[x - 1]
            if len(cyc) > 1:
                cycles.append(cyc)
        gens.append(cycles)
    return degree, gens


@given(small_perm_groups())
@settings(max_examples=30, deadline=None)
def test_closure_is_a_group(data):
    degree, gens = data
    G = group_from_permutations(degree, gens, bound=200)
    n = G.order
    assert 120 % n == 0 or n <= 120  # |G| divides 5! here
    for a in range(n):
        assert G.mul(a, G.inv(a)) == 0
    # Lagrange for cyclic subgroups
    for a in range(n):
        assert n % G.element_order(a) == 0


@given(small_perm_groups(), st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_subgroup_closure_properties(data, salt):
    degree, gens = data
    G = group_from_permutations(degree, gens, bound=200)
    seed = 1 | ((salt % (1 << G.order)) & ((1 << G.order) - 1))
    H = G.closure_mask(seed)
    assert G.is_subgroup_mask(H)
    assert G.closure_mask(H) == H
    g = salt % G.order
    K = G.conjugate_mask(H, g)
    assert popcount(K) == popcount(H)
    assert G.is_subgroup_mask(K)
