"""Delta / Delta* object sets, Theta quotients, characteristic p-type."""

from __future__ import annotations

import pytest

from fusionloc.constructions import (
    is_characteristic_p_type,
    is_characteristic_p_type_fusion,
    nontrivial,
)
from fusionloc.corpus import builtin_group
from fusionloc.errors import NotClosed
from fusionloc.groups import bits, popcount, sylow_p
from fusionloc.locality import locality_from_group, verify_locality


def test_delta_sets_s4(corpus):
    ds = corpus.deltas("S4", 2)
    nontriv = {m for m in ds.fusion.subgroups() if m != 1}
    assert {m for m in ds.delta if m != 1} == nontriv
    assert 1 in ds.delta  # N_G(1) = S4 is of characteristic 2
    assert ds.delta == ds.delta_star == ds.subcentric
    assert ds.gap() == ()


def test_delta_sets_inclusions(corpus):
    for name, prime in (
        ("S4", 2), ("A4", 2), ("A5", 2), ("SL23", 2), ("SL23", 3),
        ("C2xA5", 2), ("C2xS4", 2), ("S3", 2), ("S3", 3),
    ):
        ds = corpus.deltas(name, prime)
        assert ds.delta <= ds.delta_star <= ds.subcentric
        table = ds.fusion.classification_table()
        quasi = {P for P in ds.fusion.subgroups() if table[P].quasicentric}
        assert quasi <= ds.delta_star


def test_c2xa5_gap(corpus):
    # the fact driving the construction: the central C2 is
    # subcentric but its normalizer (the whole group) is not almost of
    # characteristic 2, so it is missing from Delta*
    ds = corpus.deltas("C2xA5", 2)
    inst = corpus.instance("C2xA5", 2)
    zc = inst.s_real.mask_from_parent(inst.group.center_mask())
    assert zc not in ds.delta_star
    assert zc in ds.subcentric
    assert zc in ds.gap()


def test_c2xs4_central_in_delta_not_quasicentric(corpus):
    ds = corpus.deltas("C2xS4", 2)
    inst = corpus.instance("C2xS4", 2)
    zc = inst.s_real.mask_from_parent(inst.group.center_mask())
    assert zc in ds.delta
    table = ds.fusion.classification_table()
    assert not table[zc].quasicentric


def test_characteristic_p_type(corpus):
    S4 = builtin_group("S4")
    assert is_characteristic_p_type(S4, sylow_p(S4, 2), 2)
    assert is_characteristic_p_type_fusion(corpus.instance("S4", 2).fusion)

    C2A5 = builtin_group("C2xA5")
    assert not is_characteristic_p_type(C2A5, sylow_p(C2A5, 2), 2)
    assert is_characteristic_p_type_fusion(corpus.instance("C2xA5", 2).fusion)

    D8 = builtin_group("D8")
    assert is_characteristic_p_type(D8, sylow_p(D8, 2), 2)


def test_theta_trivial_cases(corpus):
    for name, prime, carrier in (("S4", 2, 24), ("S3", 2, 2)):
        td = corpus.theta(name, prime)
        assert td.theta_trivial
        assert td.findings == ()
        assert td.locality.size == carrier
        assert td.quotient is td.locality  # bypass when Theta is forced trivial


def test_theta_nontrivial_sl23_at_3(corpus):
    td = corpus.theta("SL23", 3)
    assert td.locality.size == 6  # N_G(Sylow-3) = C6
    assert len(td.theta.members) == 2  # the central involution
    assert td.findings == ()
    assert td.quotient.size == 3
    assert td.quotient.is_linking_locality()
    assert verify_locality(td.quotient).ok
    # per-object kernels match Theta(N_G(P))
    gamma = nontrivial(td.deltas.delta_star)
    for P in gamma:
        kern = td.object_kernel_ids(P)
        norm = set(td.locality.normalizer_ids(P))
        assert kern == norm & td.theta.members


def test_theta_c2xa5(corpus):
    td = corpus.theta("C2xA5", 2)
    assert td.findings == ()
    assert td.locality.size == 24  # the Delta* carrier avoids the center
    assert td.quotient.is_linking_locality()


def test_example_char_p_type_end_to_end(corpus):
    # a characteristic-2-type group: the all-nontrivial-objects locality is a
    # linking locality whose fusion system is the group fusion system, and the
    # nontrivial subcentric collection is the whole object set
    inst = corpus.instance("S4", 2)
    L = corpus.locality_all("S4", 2)
    assert verify_locality(L).ok
    assert L.is_objective_char_p()
    assert L.is_linking_locality()
    assert L.fusion_system().maps_from == inst.fusion.maps_from
    table = inst.fusion.classification_table()
    subc = {P for P in inst.fusion.subgroups() if P != 1 and table[P].subcentric}
    assert set(L.delta) == subc


def test_locality_from_group_not_closed():
    G = builtin_group("S4")
    S = sylow_p(G, 2)
    real = G.as_group(S.mask)
    smallest = min(m for m in real.group.subgroup_masks() if m != 1)
    with pytest.raises(NotClosed):
        locality_from_group(G, S, frozenset([smallest]), 2, s_real=real)
