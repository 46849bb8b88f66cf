"""Fusion systems: construction, saturation, classification, subsystems."""

from __future__ import annotations

import pytest

import fusionloc.fusion as fu
from fusionloc.corpus import builtin_group
from fusionloc.errors import NotCentral, NotFullyKNormalized, NotSaturated, NotSylow
from fusionloc.fusion import (
    abstract_fusion,
    centralizer_in_S_of_subsystem,
    fusion_from_group,
    fusion_isomorphic,
    full_aut_kset,
    is_constrained,
    maps_equal_under_index_map,
    normal_ksets,
    quotient_mod_central,
    subsystem_from_normal_subgroup,
    trivial_kset,
)
from fusionloc.groups import Subgroup, bits, perm_from_cycles, popcount, sylow_p


def F_of(corpus, name, prime):
    return corpus.instance(name, prime).fusion


def test_not_sylow_rejected():
    S4 = builtin_group("S4")
    V = next(m for m in S4.normal_subgroup_masks() if popcount(m) == 4)
    with pytest.raises(NotSylow):
        fusion_from_group(S4, Subgroup(S4, V), 2)


def test_klein_class_structure_s4(corpus):
    # oracle: direct enumeration of conjugation maps inside S4
    inst = corpus.instance("S4", 2)
    F = inst.fusion
    base = F.base
    kleins = [
        m
        for m in F.subgroups()
        if popcount(m) == 4 and base.as_group(m).group.exponent() == 2
    ]
    assert len(kleins) == 2
    reps = {F.class_of(m).representative for m in kleins}
    assert len(reps) == 2  # the two Klein fours are not F-isomorphic
    for m in kleins:
        assert F.class_of(m).members == (m,)


def test_inner_fusion_of_p_group(corpus):
    F = F_of(corpus, "D8", 2)
    assert F.is_saturated()
    assert fu._is_inner_system(F)


def test_aut_f_v4_in_a5(corpus):
    inst = corpus.instance("A5", 2)
    F = inst.fusion
    # independent oracle: N_{A5}(V4)/C_{A5}(V4) has order 12/4 = 3
    G = inst.group
    parent = inst.s_real.mask
    n = popcount(G.normalizer_mask(parent))
    c = popcount(G.centralizer_mask(parent))
    assert n // c == 3
    assert len(F.auts(F.base.full_mask)) == 3


def test_saturation_corpus(corpus):
    for name, prime in (("S4", 2), ("A5", 2), ("SL23", 2), ("C2xS4", 2), ("Q8", 2)):
        F = F_of(corpus, name, prime)
        assert F.is_saturated()
        assert F.check_saturation_alternative()


def test_unsaturated_abstract_example():
    # order-3 automorphism adjoined on a proper Klein subgroup of C2^3:
    # receptivity fails, since the map never extends to the abelian S
    E8 = builtin_group("C2^3")
    perms = E8.perm_rep[1]
    a = perms.index(perm_from_cycles([[1, 2]], 6))
    b = perms.index(perm_from_cycles([[3, 4]], 6))
    ab = E8.mul(a, b)
    V = E8.closure_mask((1 << a) | (1 << b))
    mapping = {0: 0, a: b, b: ab, ab: a}
    images = tuple(mapping[x] for x in E8.mask_elements(V))
    F = abstract_fusion(E8, 2, [(V, images)])
    assert not F.is_saturated()
    assert not F.check_saturation_alternative()
    with pytest.raises(NotSaturated):
        F.classification_table()


def test_classification_s4(corpus):
    F = F_of(corpus, "S4", 2)
    table = F.classification_table()
    base = F.base
    cr = F.centric_radical_masks()
    # frozen expectation: the normal Klein four and S itself
    assert {popcount(m) for m in cr} == {4, 8}
    assert len(cr) == 2
    assert all(table[q].subcentric for q in F.subgroups())
    # chain and flag consistency
    for q in F.subgroups():
        c = table[q]
        assert c.centric_radical == (c.centric and c.radical)
        if c.central:
            assert c.normal
        if c.centric_radical:
            assert c.centric
        if c.centric:
            assert c.quasicentric
        if c.quasicentric:
            assert c.subcentric


def test_subcentric_s_always(corpus):
    for name, prime in (("S4", 2), ("A5", 2), ("C2xA5", 2), ("SL23", 3)):
        F = F_of(corpus, name, prime)
        assert F.classification_table()[F.base.full_mask].subcentric


def test_six_way_examples(corpus):
    F = F_of(corpus, "S4", 2)
    base = F.base
    # the class of <(1 2)(3 4)> has Z(D8) as fully normalized member
    t = next(
        m
        for m in F.subgroups()
        if popcount(m) == 2 and len(F.class_of(m).members) == 3
    )
    six = F.subcentric_equivalences(t)
    assert six.agree() and six.all_normalizers_constrained
    assert F.subcentric_equivalences(base.full_mask).agree()

    FF = F_of(corpus, "C2xA5", 2)
    zc = FF.provenance.s_real.mask_from_parent(FF.provenance.group.center_mask())
    sixc = FF.subcentric_equivalences(zc)
    assert sixc.agree() and sixc.all_normalizers_core_centric


def test_local_subsystem_examples(corpus):
    # N_F(V4) in F_{V4}(A5) is the whole system
    FA = F_of(corpus, "A5", 2)
    NV = FA.normalizer_subsystem(FA.base.full_mask, check=True)
    assert NV.maps_from == FA.maps_from

    # C_F(Z) = F for Z <= Z(F): central C2 of C2xS4
    FB = F_of(corpus, "C2xS4", 2)
    zc = FB.provenance.s_real.mask_from_parent(FB.provenance.group.center_mask())
    CF = FB.centralizer_subsystem(zc, check=True)
    assert CF.maps_from == FB.maps_from

    # N_F(Z(D8)) in F_{D8}(S4) is the inner system of D8
    FS = F_of(corpus, "S4", 2)
    zd8 = FS.base.centralizer_mask(FS.base.full_mask)
    NZ = FS.normalizer_subsystem(zd8, check=True)
    assert popcount(NZ.carrier) == 8
    assert fu._is_inner_system(NZ)


def test_not_fully_k_normalized(corpus):
    F = F_of(corpus, "S4", 2)
    # a non-fully-normalized conjugate of Z(D8) with the full automorphism set
    t = next(
        m
        for m in F.subgroups()
        if popcount(m) == 2
        and len(F.class_of(m).members) == 3
        and not F.classification_table()[m].fully_normalized
    )
    with pytest.raises(NotFullyKNormalized):
        F.local_subsystem(t, full_aut_kset(F, t))


def test_is_constrained_examples(corpus):
    FS = F_of(corpus, "S4", 2)
    res = is_constrained(FS)
    assert res.constrained and popcount(res.o_p) == 4
    assert res.model is not None and res.model.label == "S4"

    FA = F_of(corpus, "A5", 2)
    resa = is_constrained(FA)
    assert resa.constrained and popcount(resa.o_p) == 4
    assert resa.model is None  # A5 itself is not of characteristic 2

    FD = F_of(corpus, "D8", 2)
    resd = is_constrained(FD)
    assert resd.constrained and resd.o_p == FD.base.full_mask


def test_quotient_mod_central(corpus):
    FB = F_of(corpus, "C2xS4", 2)
    zc = FB.provenance.s_real.mask_from_parent(FB.provenance.group.center_mask())
    cq = quotient_mod_central(FB, zc)
    FS = F_of(corpus, "S4", 2)
    assert fusion_isomorphic(cq.quotient, FS) is not None
    # trivial quotient is the system itself (under the identity index map)
    cqt = quotient_mod_central(FB, 1)
    assert maps_equal_under_index_map(
        FB, cqt.quotient, list(range(FB.base.order))
    )
    # non-central subgroups are rejected
    noncentral = next(
        m for m in FB.subgroups() if popcount(m) == 2 and m & FB.center_mask() != m
    )
    with pytest.raises(NotCentral):
        quotient_mod_central(FB, noncentral)


def test_subcentric_quotient_correspondence(corpus):
    FB = F_of(corpus, "C2xS4", 2)
    zc = FB.provenance.s_real.mask_from_parent(FB.provenance.group.center_mask())
    cq = quotient_mod_central(FB, zc)
    t = FB.classification_table()
    tq = cq.quotient.classification_table()
    for P in FB.subgroups():
        assert t[P].subcentric == tq[cq.image_of_mask(P)].subcentric


def test_subsystem_from_normal_subgroup(corpus):
    inst = corpus.instance("S4", 2)
    F = inst.fusion
    G = inst.group
    a4 = next(m for m in G.normal_subgroup_masks() if popcount(m) == 12)
    sub = subsystem_from_normal_subgroup(F, a4)
    assert popcount(sub.t_mask) == 4
    assert sub.embedding_ok
    assert len(sub.fusion.auts(sub.t_mask)) == 3
    # E = F itself for N = G
    subF = subsystem_from_normal_subgroup(F, G.full_mask)
    assert subF.fusion.maps_from == F.maps_from

    instA = corpus.instance("C2xA5", 2)
    a5 = next(
        m for m in instA.group.normal_subgroup_masks() if popcount(m) == 60
    )
    subA = subsystem_from_normal_subgroup(instA.fusion, a5)
    assert popcount(subA.t_mask) == 4
    assert subA.fusion.is_saturated()


def test_centralizer_in_s_of_subsystem(corpus):
    inst = corpus.instance("S4", 2)
    F = inst.fusion
    G = inst.group
    a4 = next(m for m in G.normal_subgroup_masks() if popcount(m) == 12)
    sub = subsystem_from_normal_subgroup(F, a4)
    # descending-search oracle: only the trivial subgroup centralizes F_V(A4),
    # since the order-3 automorphism moves every involution of V
    assert centralizer_in_S_of_subsystem(F, sub.fusion) == 1

    subF = subsystem_from_normal_subgroup(F, G.full_mask)
    assert centralizer_in_S_of_subsystem(F, subF.fusion) == F.center_mask()

    instA = corpus.instance("C2xA5", 2)
    a5 = next(m for m in instA.group.normal_subgroup_masks() if popcount(m) == 60)
    subA = subsystem_from_normal_subgroup(instA.fusion, a5)
    zc = instA.s_real.mask_from_parent(instA.group.center_mask())
    assert centralizer_in_S_of_subsystem(instA.fusion, subA.fusion) == zc


def test_normality_criterion_matches_direct_definition(corpus):
    for name, prime in (("S4", 2), ("A5", 2), ("Q8", 2), ("S3", 3)):
        F = F_of(corpus, name, prime)
        assert F.is_saturated()
        for Q in F.subgroups():
            assert F.is_normal_in_fusion(Q) == F._normal_direct(Q)


def test_k_transport_rule(corpus):
    # K^phi = phi^-1 K phi: the transported normalizer size matches a direct scan
    F = F_of(corpus, "S4", 2)
    base = F.base
    for Q in F.subgroups():
        if popcount(Q) != 2:
            continue
        for kset in normal_ksets(F, Q):
            for phi in F.maps_from[Q]:
                img = fu.image_mask(phi)
                kphi = F.transported_k(Q, kset, phi)
                direct = 0
                for t in base.mask_elements(base.normalizer_mask(img)):
                    if fu.conj_map(base, img, t) in kphi:
                        direct |= 1 << t
                assert direct == F.k_normalizer_mask(img, kphi)


def test_class_counts_known_values(corpus):
    # D8 inside S4: the three central-type involution subgroups fuse, the two
    # reflection subgroups are S-conjugate, everything else is alone
    F = F_of(corpus, "S4", 2)
    sizes = sorted(len(d.members) for d in F.classes())
    assert sizes == [1, 1, 1, 1, 1, 2, 3]
    # Q8 inside SL(2,3): the three cyclic order-4 subgroups fuse
    FQ = F_of(corpus, "SL23", 2)
    sizesq = sorted(len(d.members) for d in FQ.classes())
    assert sizesq == [1, 1, 1, 3]
    # the induced automorphism group of Q8 has order 12 (an A4 image)
    assert len(FQ.auts(FQ.base.full_mask)) == 12


def test_kautset_validation(corpus):
    from fusionloc.errors import FusionlocError
    from fusionloc.fusion import KAutSet

    F = F_of(corpus, "S4", 2)
    base = F.base
    K = KAutSet(q_mask=base.full_mask, auts=frozenset(F.auts(base.full_mask)))
    K.validate(base)
    # identity missing
    broken = KAutSet(
        q_mask=base.full_mask,
        auts=frozenset(
            m for m in F.auts(base.full_mask) if m != base.mask_elements(base.full_mask)
        ),
    )
    with pytest.raises(FusionlocError):
        broken.validate(base)
    # KAutSet is accepted by local_subsystem
    NS = F.local_subsystem(base.full_mask, K, check=True)
    assert popcount(NS.carrier) == 8


def test_operation_aliases(corpus):
    import fusionloc as fl

    inst = corpus.instance("S4", 2)
    L = corpus.locality_all("S4", 2)
    assert fl.s_of(L, 0) == L.s_group.full_mask
    assert fl.s_of_word(L, ()) == L.s_group.full_mask
    assert fl.product(L, ()) == 0
    assert fl.fusion_of(L).maps_from == inst.fusion.maps_from
    assert fl.is_objective_char_p(L) and fl.is_linking_locality(L)
    assert fl.is_saturated(inst.fusion)
    assert fl.classify(inst.fusion, inst.fusion.base.full_mask).subcentric
    assert fl.subcentric_equivalences(inst.fusion, 1).agree()


def test_fusion_hom_filter(corpus):
    F = F_of(corpus, "S4", 2)
    base = F.base
    subs = F.subgroups()
    for P in subs[:6]:
        for Q in subs[:6]:
            for m in F.hom(P, Q):
                assert fu.image_mask(m) & Q == fu.image_mask(m)
            if P & Q == P:
                # the inclusion is present
                assert tuple(base.mask_elements(P)) in set(F.hom(P, Q))
