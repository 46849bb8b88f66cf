"""Localities built from a finite group: the Delta / Delta* object sets and
the Theta quotient that yields a linking locality over the group's fusion
system.

Delta is the set of subgroups of S whose normalizer in G has characteristic
p; Delta* those whose normalizer is almost of characteristic p (the quotient
by the p'-core has characteristic p).  Theta is the union of the p'-cores of
the object normalizers inside the Delta* locality; quotienting by it yields a
locality of objective characteristic p whose fusion system is the fusion
system of G.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import NotSaturated, NotSylow, VerificationFailed
from .fusion import FusionSystem, fusion_from_group
from .groups import (
    FiniteGroup,
    RealizedSubgroup,
    Subgroup,
    bits,
    cores,
    p_part,
    popcount,
)
from .locality import (
    Locality,
    PartialNormalSubgroup,
    QuotientData,
    is_partial_normal,
    locality_from_group,
    quotient,
)


@dataclass(frozen=True)
class DeltaSets:
    """Per-group object sets, as masks over the realized Sylow subgroup."""

    group: FiniteGroup
    s_real: RealizedSubgroup
    p: int
    delta: frozenset[int]
    delta_star: frozenset[int]
    subcentric: frozenset[int]
    fusion: FusionSystem

    def gap(self) -> tuple[int, ...]:
        """Subcentric subgroups missing from Delta*, sorted."""
        return tuple(sorted(self.subcentric - self.delta_star))


def delta_sets(
    G: FiniteGroup,
    S: Subgroup,
    p: int,
    s_real: Optional[RealizedSubgroup] = None,
    fusion: Optional[FusionSystem] = None,
    spot_check_seed: int = 7,
) -> DeltaSets:
    """Compute Delta, Delta* and the subcentric set, with invariant checks.

    Membership is decided on fusion-class representatives and propagated along
    the class; a seeded spot check recomputes it directly on random members.
    """
    if popcount(S.mask) != p_part(G.order, p):
        raise NotSylow(f"{S.label()} is not Sylow in {G.label}")
    real = s_real if s_real is not None else G.as_group(S.mask)
    F = fusion if fusion is not None else fusion_from_group(G, S, p, s_real=real)
    base = real.group

    def flags(mask: int) -> tuple[bool, bool]:
        parent = real.mask_to_parent(mask)
        nreal = G.as_group(G.normalizer_mask(parent))
        rep = cores(nreal.group, p)
        return rep.is_char_p, rep.is_almost_char_p

    delta = set()
    delta_star = set()
    for data in F.classes():
        if data.representative == 1:
            # the trivial subgroup: N_G(1) = G
            rep = cores(G, p)
            char_p, almost = rep.is_char_p, rep.is_almost_char_p
        else:
            char_p, almost = flags(data.representative)
        for P in data.members:
            if char_p:
                delta.add(P)
            if almost:
                delta_star.add(P)
    # spot check: direct recomputation on random members
    rng = random.Random(spot_check_seed)
    members = [P for data in F.classes() for P in data.members if P != 1]
    for P in rng.sample(members, min(5, len(members))):
        char_p, almost = flags(P)
        if (P in delta) != char_p or (P in delta_star) != almost:
            raise VerificationFailed(
                f"class propagation mismatch at {base.subgroup_label(P)}"
            )

    table = F.classification_table()
    subc = frozenset(P for P in F.subgroups() if table[P].subcentric)
    delta = frozenset(delta)
    delta_star = frozenset(delta_star)
    if not delta <= delta_star or not delta_star <= subc:
        raise VerificationFailed("Delta <= Delta* <= F^s violated")
    quasi = {P for P in F.subgroups() if table[P].quasicentric}
    if not quasi <= delta_star:
        raise VerificationFailed("F^q <= Delta* violated")
    return DeltaSets(
        group=G,
        s_real=real,
        p=p,
        delta=delta,
        delta_star=delta_star,
        subcentric=subc,
        fusion=F,
    )


def nontrivial(masks) -> frozenset[int]:
    out = frozenset(m for m in masks if m != 1)
    return out if out else frozenset(masks)


@dataclass(frozen=True)
class ThetaData:
    """The Delta* locality, its Theta partial normal subset, and the quotient."""

    deltas: DeltaSets
    locality: Locality
    theta: PartialNormalSubgroup
    quotient_data: Optional[QuotientData]
    quotient: Locality
    findings: tuple[str, ...]

    @property
    def theta_trivial(self) -> bool:
        return self.theta.members == frozenset({0})

    def object_kernel_ids(self, mask: int) -> frozenset[int]:
        """Theta(N_G(P)) for an object P, as carrier ids of the locality."""
        L = self.locality
        G = self.deltas.group
        real = self.deltas.s_real
        parent = real.mask_to_parent(mask)
        nreal = G.as_group(G.normalizer_mask(parent))
        theta_parent = nreal.mask_to_parent(
            cores(nreal.group, self.deltas.p).o_p_prime.mask
        )
        ids = []
        for x in bits(theta_parent):
            pos = L.source_ids.index(x) if x in L.source_ids else None
            if pos is None:
                raise VerificationFailed("Theta(N_G(P)) leaves the carrier")
            ids.append(pos)
        return frozenset(ids)


def theta_quotient(
    G: FiniteGroup,
    S: Subgroup,
    p: int,
    deltas: Optional[DeltaSets] = None,
) -> ThetaData:
    """Build the Delta* locality and its quotient by Theta.

    Structural assertions (Theta is partial normal, meets S trivially, the
    quotient has objective characteristic p and the same fusion system) are
    recorded as findings rather than raised, except where construction is
    impossible.
    """
    ds = deltas if deltas is not None else delta_sets(G, S, p)
    real = ds.s_real
    gamma = nontrivial(ds.delta_star)
    L = locality_from_group(G, S, gamma, p, label=f"L*({G.label})", s_real=real)
    findings: list[str] = []

    # Theta = union of the p'-cores of the object normalizers
    theta_parent_ids: set[int] = set()
    for data in ds.fusion.classes():
        P = data.representative
        if P not in gamma:
            continue
        for member in data.members:
            parent = real.mask_to_parent(member)
            nreal = G.as_group(G.normalizer_mask(parent))
            theta_mask = cores(nreal.group, p).o_p_prime.mask
            theta_parent_ids.update(
                nreal.to_parent[i] for i in bits(theta_mask)
            )
    src_pos = {g: i for i, g in enumerate(L.source_ids)}
    theta_ids = set()
    for g in sorted(theta_parent_ids):
        pos = src_pos.get(g)
        if pos is None:
            findings.append(f"Theta element {G.element_label(g)} outside carrier")
            continue
        theta_ids.add(pos)
    theta_ids.add(0)
    theta = PartialNormalSubgroup(locality=L, members=frozenset(theta_ids))

    if not is_partial_normal(L, theta.members):
        findings.append("Theta is not a partial normal subgroup")
    smask_ids = set(L.s_ids)
    if (set(theta.members) & smask_ids) != {0}:
        findings.append("Theta meets S nontrivially")

    if theta.members == frozenset({0}):
        qd = None
        quot = L
    else:
        qd = quotient(L, theta.members)
        quot = qd.quotient
        # per-object kernels: preimage of N_{L/Theta}(P-bar) inside N_L(P)
        for P in sorted(gamma):
            ker_expected = set()
            parent = real.mask_to_parent(P)
            nreal = G.as_group(G.normalizer_mask(parent))
            tmask = cores(nreal.group, p).o_p_prime.mask
            for i in bits(tmask):
                g = nreal.to_parent[i]
                pos = src_pos.get(g)
                if pos is None:
                    findings.append(
                        f"object kernel outside carrier at {real.group.subgroup_label(P)}"
                    )
                    break
                ker_expected.add(pos)
            else:
                norm_ids = set(L.normalizer_ids(P))
                ker_actual = {
                    f for f in norm_ids if f in theta.members
                }
                if ker_actual != ker_expected:
                    findings.append(
                        f"kernel mismatch at object {real.group.subgroup_label(P)}"
                    )
    if not quot.is_objective_char_p():
        findings.append("quotient not of objective characteristic p")
    if not quot.is_linking_locality():
        findings.append("quotient is not a linking locality")
    # fusion match under the identification of S with its image
    FQ = quot.fusion_system()
    if qd is None:
        if FQ.maps_from != ds.fusion.maps_from:
            findings.append("fusion system mismatch")
    else:
        idx = []
        spos = {x: i for i, x in enumerate(quot.s_ids)}
        for i in range(len(L.s_ids)):
            idx.append(spos[qd.projection[L.s_ids[i]]])
        from .fusion import maps_equal_under_index_map

        if not maps_equal_under_index_map(ds.fusion, FQ, idx):
            findings.append("fusion system mismatch after Theta quotient")
    return ThetaData(
        deltas=ds,
        locality=L,
        theta=theta,
        quotient_data=qd,
        quotient=quot,
        findings=tuple(findings),
    )


def is_characteristic_p_type(G: FiniteGroup, S: Subgroup, p: int) -> bool:
    """Every normalizer of a nontrivial subgroup of S has characteristic p."""
    if popcount(S.mask) != p_part(G.order, p):
        raise NotSylow(f"{S.label()} is not Sylow in {G.label}")
    real = G.as_group(S.mask)
    base = real.group
    seen_classes = set()
    for mask in base.subgroup_masks():
        if mask == 1:
            continue
        parent = real.mask_to_parent(mask)
        canon = min(
            G.conjugate_mask(parent, g) for g in range(G.order)
        )
        if canon in seen_classes:
            continue
        seen_classes.add(canon)
        nreal = G.as_group(G.normalizer_mask(parent))
        if not cores(nreal.group, p).is_char_p:
            return False
    return True


def is_characteristic_p_type_fusion(F: FusionSystem) -> bool:
    """Every nontrivial subgroup of S is subcentric."""
    if not F.is_saturated():
        raise NotSaturated(F.label)
    table = F.classification_table()
    return all(table[P].subcentric for P in F.subgroups() if P != 1)
