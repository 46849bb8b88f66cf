"""Batch verification of the structural claims on a corpus of small groups.

Every check is a pure function producing CheckResult records.  Failing checks
carry a witness (minimal by subgroup order, then by canonical mask order);
skipped checks carry a reason.  Reports are sorted by (check_id, subject) so
repeated runs are byte-identical.
"""

from __future__ import annotations

import fnmatch
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .constructions import (
    ThetaData,
    delta_sets,
    is_characteristic_p_type,
    is_characteristic_p_type_fusion,
    nontrivial,
    theta_quotient,
)
from .corpus import DEFAULT_CORPUS, CorpusEntry, Instance, build_instance
from .fusion import (
    FusionSystem,
    GroupProvenance,
    LocalityProvenance,
    NormalSubgroupProvenance,
    AbstractProvenance,
    centralizer_in_S_of_subsystem,
    close_morphism_sets,
    image_mask,
    is_constrained,
    normal_ksets,
    quotient_mod_central,
    restrict_map,
    subsystem_from_normal_subgroup,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    bits,
    cores,
    o_p_prime_mask,
    p_part,
    popcount,
)
from .locality import (
    Locality,
    QuotientData,
    is_partial_normal,
    locality_from_group,
    quotient,
    verify_locality,
)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    subject: str
    status: str  # "pass" | "fail" | "skipped"
    witness: Optional[str] = None
    reason: Optional[str] = None

    def as_json(self) -> dict:
        out = {
            "check_id": self.check_id,
            "instance": self.subject,
            "status": self.status,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def _passfail(check_id: str, subject: str, ok: bool, witness: Optional[str]) -> CheckResult:
    return CheckResult(
        check_id=check_id,
        subject=subject,
        status="pass" if ok else "fail",
        witness=None if ok else (witness or "unspecified"),
    )


def _skip(check_id: str, subject: str, reason: str) -> CheckResult:
    return CheckResult(check_id=check_id, subject=subject, status="skipped", reason=reason)


def _min_witness(base: FiniteGroup, masks: Iterable[int]) -> Optional[str]:
    masks = sorted(masks, key=lambda m: (popcount(m), m))
    if not masks:
        return None
    return f"subgroup {base.subgroup_label(masks[0])} (order {popcount(masks[0])})"


# ---------------------------------------------------------------------------
# fusion-system wellformedness


def fusion_wellformed_witness(F: FusionSystem) -> Optional[str]:
    """Closure properties plus provenance regeneration; None when clean."""
    base = F.base
    expected_keys = set(base.subgroups_of(F.carrier))
    if set(F.maps_from) != expected_keys:
        return "domain keys do not match the subgroup list"
    for P in sorted(F.maps_from):
        elems = base.mask_elements(P)
        ident = tuple(elems)
        if ident not in F.maps_from[P]:
            return f"identity missing on {base.subgroup_label(P)}"
        for m in F.maps_from[P]:
            if len(set(m)) != len(m):
                return f"non-injective morphism on {base.subgroup_label(P)}"
            im = image_mask(m)
            if im & F.carrier != im:
                return f"image escapes the carrier from {base.subgroup_label(P)}"
            if not base.is_subgroup_mask(im):
                return f"image not a subgroup from {base.subgroup_label(P)}"
        # restriction closure (maximal subgroups suffice inductively)
        for sub in base.maximal_subgroups(P):
            if sub & F.carrier != sub:
                continue
            for m in F.maps_from[P]:
                if restrict_map(base, P, m, sub) not in F.maps_from[sub]:
                    return f"restriction escapes from {base.subgroup_label(P)}"
        # composition and inversion closure
        for m in F.maps_from[P]:
            im = image_mask(m)
            impos = {x: i for i, x in enumerate(base.mask_elements(im))}
            for m2 in F.maps_from[im]:
                comp = tuple(m2[impos[y]] for y in m)
                if comp not in F.maps_from[P]:
                    return f"composition escapes from {base.subgroup_label(P)}"
            inverse = tuple(x for _, x in sorted(zip(m, elems)))
            if inverse not in F.maps_from[im]:
                return f"inverse missing from {base.subgroup_label(P)}"
    # the inner fusion of the carrier is contained in F
    for t in base.mask_elements(F.carrier):
        inner = tuple(base.conj(x, t) for x in base.mask_elements(F.carrier))
        if inner not in F.maps_from[F.carrier]:
            return "inner conjugation missing on the carrier"
    regen = regenerate(F)
    if regen is not None and regen.maps_from != F.maps_from:
        diff = [
            P
            for P in F.maps_from
            if F.maps_from[P] != regen.maps_from.get(P, frozenset())
        ]
        return "regeneration mismatch at " + _min_witness(base, diff)
    return None


def regenerate(F: FusionSystem) -> Optional[FusionSystem]:
    """Rebuild a fusion system from its provenance, if regenerable."""
    prov = F.provenance
    if isinstance(prov, GroupProvenance):
        from .fusion import fusion_from_group

        return fusion_from_group(
            prov.group, Subgroup(prov.group, prov.s_real.mask), F.p, s_real=prov.s_real
        )
    if isinstance(prov, NormalSubgroupProvenance):
        from .fusion import fusion_from_group

        parent = fusion_from_group(
            prov.group, Subgroup(prov.group, prov.s_real.mask), F.p, s_real=prov.s_real
        )
        return subsystem_from_normal_subgroup(parent, prov.n_mask).fusion
    if isinstance(prov, LocalityProvenance):
        if prov.locality._fusion is F:
            return _rebuild_from_locality(prov.locality, F)
        return prov.locality.fusion_system()
    if isinstance(prov, AbstractProvenance):
        from .fusion import abstract_fusion

        return abstract_fusion(F.base, F.p, prov.generators, label=F.label)
    return None


def _rebuild_from_locality(L: Locality, F: FusionSystem) -> FusionSystem:
    gens = []
    for f in range(L.size):
        cmap = L.conj_s[f]
        dom = L.s_of(f)
        images = tuple(cmap[i] for i in bits(dom))
        gens.append((dom, images))
    maps = close_morphism_sets(L.s_group, L.s_group.full_mask, gens)
    return FusionSystem(
        L.s_group, L.s_group.full_mask, L.p, maps, LocalityProvenance(L), label=F.label
    )


# ---------------------------------------------------------------------------
# fusion checks


def run_fusion_checks(
    F: FusionSystem,
    subject: str,
    supplied_subsystems: Sequence[tuple[int, str]] = (),
) -> list[CheckResult]:
    """All fusion-system checks for one instance.

    ``supplied_subsystems`` are (normal subgroup mask of G, kind) pairs for the
    index-prime-to-p / p-power-index set comparisons, which are only checkable
    against an explicitly supplied subsystem.
    """
    out: list[CheckResult] = []
    base = F.base

    witness = fusion_wellformed_witness(F)
    out.append(_passfail("fusion-wellformed", subject, witness is None, witness))

    if not F.is_saturated():
        reason = "fusion system not saturated"
        for cid in (
            "inclusion-chain",
            "subcentric-six-equivalent",
            "subcentric-closed",
            "normal-product-subcentric",
            "central-quotient-subcentric",
            "knorm-join-subcentric",
            "knorm-restrict-subcentric",
            "norm-cent-constrained-agree",
            "self-radical-subcentric-frc",
        ):
            out.append(_skip(cid, subject, reason))
        return out

    table = F.classification_table()
    subgroups = F.subgroups()

    # inclusion chain cr => c => q => s
    bad = [
        Q
        for Q in subgroups
        if (table[Q].centric_radical and not table[Q].centric)
        or (table[Q].centric and not table[Q].quasicentric)
        or (table[Q].quasicentric and not table[Q].subcentric)
    ]
    out.append(_passfail("inclusion-chain", subject, not bad, _min_witness(base, bad)))

    # six-way equivalence of the subcentric condition
    bad = []
    for data in F.classes():
        six = F.subcentric_equivalences(data.representative)
        if not six.agree() or six.all_normalizers_core_centric != table[data.representative].subcentric:
            bad.append(data.representative)
    out.append(
        _passfail("subcentric-six-equivalent", subject, not bad, _min_witness(base, bad))
    )

    # F^s closed under conjugation and overgroups
    bad = []
    for Q in subgroups:
        if not table[Q].subcentric:
            continue
        for m in F.maps_from[Q]:
            if not table[F.img(Q, m)].subcentric:
                bad.append(Q)
                break
        else:
            for R in subgroups:
                if Q & R == Q and not table[R].subcentric:
                    bad.append(Q)
                    break
    out.append(_passfail("subcentric-closed", subject, not bad, _min_witness(base, bad)))

    # PR subcentric iff P subcentric, for every R normal in F
    bad = []
    for R in F.normal_masks():
        for P in subgroups:
            PR = base.closure_mask(P | R)
            if table[PR].subcentric != table[P].subcentric:
                bad.append(P)
    out.append(
        _passfail("normal-product-subcentric", subject, not bad, _min_witness(base, bad))
    )

    # quotient by central subgroups preserves the subcentric flag
    if F.carrier == base.full_mask:
        bad = []
        for Z in base.subgroups_of(F.center_mask()):
            if Z == 1:
                continue
            cq = quotient_mod_central(F, Z)
            tq = cq.quotient.classification_table()
            for P in subgroups:
                if table[P].subcentric != tq[cq.image_of_mask(P)].subcentric:
                    bad.append(P)
        out.append(
            _passfail(
                "central-quotient-subcentric", subject, not bad, _min_witness(base, bad)
            )
        )
    else:
        out.append(
            _skip("central-quotient-subcentric", subject, "system not over its base")
        )

    # K-normalizer joins and restrictions of the subcentric collection
    bad_join = []
    bad_restrict = []
    for Q in subgroups:
        for kset in normal_ksets(F, Q):
            if not F.is_fully_k_normalized(Q, kset):
                continue
            NK = F.local_subsystem(Q, kset, check=False)
            if not NK.is_saturated():
                bad_join.append(Q)
                continue
            tk = NK.classification_table()
            nsk = NK.carrier
            for P in NK.subgroups():
                if tk[P].subcentric:
                    PQ = base.closure_mask(P | Q)
                    if not table[PQ].subcentric:
                        bad_join.append(P)
                if table[P].subcentric and not tk[P].subcentric:
                    bad_restrict.append(P)
    out.append(
        _passfail("knorm-join-subcentric", subject, not bad_join, _min_witness(base, bad_join))
    )
    out.append(
        _passfail(
            "knorm-restrict-subcentric",
            subject,
            not bad_restrict,
            _min_witness(base, bad_restrict),
        )
    )

    # N_F(Q) constrained iff C_F(Q) constrained, for fully normalized Q
    bad = []
    for Q in subgroups:
        if not table[Q].fully_normalized:
            continue
        nq = F.normalizer_subsystem(Q)
        cq = F.centralizer_subsystem(Q)
        if is_constrained(nq).constrained != is_constrained(cq).constrained:
            bad.append(Q)
    out.append(
        _passfail("norm-cent-constrained-agree", subject, not bad, _min_witness(base, bad))
    )

    # subcentric + fully normalized + self-normalizing core => frc
    bad = []
    for Q in subgroups:
        if not (table[Q].subcentric and table[Q].fully_normalized):
            continue
        nq = F.normalizer_subsystem(Q)
        if nq.o_p_of_fusion() != Q:
            continue
        if not (table[Q].radical and table[Q].centric):
            bad.append(Q)
    out.append(
        _passfail("self-radical-subcentric-frc", subject, not bad, _min_witness(base, bad))
    )

    # ambient-only checks
    if isinstance(F.provenance, GroupProvenance):
        out.extend(_ambient_fusion_checks(F, subject))
    for cid in ("p-prime-index-subcentric-set", "p-power-index-subcentric-set"):
        kind = "p-prime" if cid.startswith("p-prime") else "p-power"
        supplied = [n for (n, k) in supplied_subsystems if k == kind]
        if not supplied:
            out.append(_skip(cid, subject, "subsystem not constructible in scope"))
        else:
            for n_mask in supplied:
                out.append(check_index_subsystem(F, n_mask, kind, subject))
    return out


def _ambient_fusion_checks(F: FusionSystem, subject: str) -> list[CheckResult]:
    out: list[CheckResult] = []
    base = F.base
    G = F.provenance.group
    real = F.provenance.s_real
    table = F.classification_table()
    subgroups = F.subgroups()
    p = F.p

    # trivial centralizer fusion forces C_G(P) = C_S(P) Theta(C_G(P))
    bad = []
    for P in subgroups:
        parent = real.mask_to_parent(P)
        if not G.is_normal_mask(parent):
            continue
        c_parent = G.centralizer_mask(parent)
        cs_parent = c_parent & real.mask
        creal = G.as_group(c_parent)
        cf = F.centralizer_subsystem(P)
        from .fusion import _is_inner_system

        if not _is_inner_system(cf):
            continue
        theta = creal.mask_to_parent(o_p_prime_mask(creal.group, p))
        prod = set()
        for a in bits(cs_parent):
            for b in bits(theta):
                prod.add(G.mul(a, b))
        if prod != set(bits(c_parent)):
            bad.append(P)
    out.append(
        _passfail(
            "centralizer-fusion-frobenius", subject, not bad, _min_witness(base, bad)
        )
    )

    # subsystems from normal subgroups of G
    for n_mask in G.normal_subgroup_masks():
        t_parent = n_mask & real.mask
        if p_part(popcount(n_mask), p) != popcount(t_parent):
            continue
        sub = subsystem_from_normal_subgroup(F, n_mask)
        label = f"{subject}/N={G.subgroup_label(n_mask)}"
        E = sub.fusion
        if not sub.embedding_ok:
            out.append(
                _passfail("normal-subsystem-embeds", label, False, "morphism escapes F")
            )
            continue
        out.append(_passfail("normal-subsystem-embeds", label, True, None))
        if not E.is_saturated():
            out.append(
                _skip("normal-subsystem-subcentric-conj-invariant", label, "E not saturated")
            )
            continue
        te = E.classification_table()
        # E^s invariant under F-conjugation
        bad = []
        for P in E.subgroups():
            if not te[P].subcentric:
                continue
            for m in F.maps_from[P]:
                img = F.img(P, m)
                if img & E.carrier != img or not te[img].subcentric:
                    bad.append(P)
                    break
        out.append(
            _passfail(
                "normal-subsystem-subcentric-conj-invariant",
                label,
                not bad,
                _min_witness(base, bad),
            )
        )
        # P in F^s with P <= T implies P in E^s
        bad = [
            P
            for P in E.subgroups()
            if table[P].subcentric and not te[P].subcentric
        ]
        out.append(
            _passfail(
                "subcentric-restricts-to-normal-subsystem",
                label,
                not bad,
                _min_witness(base, bad),
            )
        )
        # P in E^s implies P C_S(E) in F^s
        cs = centralizer_in_S_of_subsystem(F, E)
        bad = []
        for P in E.subgroups():
            if te[P].subcentric:
                PC = base.closure_mask(P | cs)
                if not table[PC].subcentric:
                    bad.append(P)
        out.append(
            _passfail(
                "normal-subsystem-subcentric-lift", label, not bad, _min_witness(base, bad)
            )
        )

    # K-normalizers of F-normal subgroups: N_F^K(R)^s = {P in F^s : P <= N_S^K(R)}
    bad = []
    for R in F.normal_masks():
        for kset in normal_ksets(F, R):
            NK = F.local_subsystem(R, kset, check=False)
            if not NK.is_saturated():
                bad.append(R)
                continue
            tk = NK.classification_table()
            for P in NK.subgroups():
                if tk[P].subcentric != table[P].subcentric:
                    bad.append(P)
    out.append(
        _passfail("normal-knorm-subcentric-set", subject, not bad, _min_witness(base, bad))
    )
    return out


def check_index_subsystem(
    F: FusionSystem, n_mask: int, kind: str, subject: str
) -> CheckResult:
    """Subcentric-set comparison for a supplied normal subsystem.

    kind = "p-prime": E of index prime to p has E^s = F^s.
    kind = "p-power": E of p-power index has E^s = {P in F^s : P <= T}.
    """
    cid = f"{kind}-index-subcentric-set"
    G = F.provenance.group
    index = G.order // popcount(n_mask)
    if kind == "p-prime" and index % F.p == 0:
        return _skip(cid, subject, "index not prime to p")
    if kind == "p-power" and p_part(index, F.p) != index:
        return _skip(cid, subject, "index not a power of p")
    sub = subsystem_from_normal_subgroup(F, n_mask)
    E = sub.fusion
    te = E.classification_table()
    table = F.classification_table()
    if kind == "p-prime":
        bad = [
            P
            for P in F.subgroups()
            if (P & E.carrier == P and te[P].subcentric) != table[P].subcentric
        ]
    else:
        bad = [
            P
            for P in E.subgroups()
            if te[P].subcentric != table[P].subcentric
        ]
    return _passfail(cid, subject, not bad, _min_witness(F.base, bad))


# ---------------------------------------------------------------------------
# group-side checks


def run_group_checks(inst: Instance) -> list[CheckResult]:
    out: list[CheckResult] = []
    G = inst.group
    p = inst.prime
    real = inst.s_real
    base = real.group
    subject = inst.instance_id
    rep_g = cores(G, p)

    reps = []
    seen = set()
    for mask in base.subgroup_masks():
        if mask == 1:
            continue
        parent = real.mask_to_parent(mask)
        canon = min(G.conjugate_mask(parent, g) for g in range(G.order))
        if canon not in seen:
            seen.add(canon)
            reps.append(parent)

    # characteristic p is inherited by local subgroups
    if rep_g.is_char_p:
        bad = []
        for parent in reps:
            nreal = G.as_group(G.normalizer_mask(parent))
            creal = G.as_group(G.centralizer_mask(parent))
            if not cores(nreal.group, p).is_char_p or not cores(creal.group, p).is_char_p:
                bad.append(parent)
        out.append(
            _passfail(
                "group-local-characteristic",
                subject,
                not bad,
                f"subgroup {G.subgroup_label(bad[0])}" if bad else None,
            )
        )
    else:
        out.append(_skip("group-local-characteristic", subject, "group not of characteristic p"))

    # central quotients of characteristic-p groups; the center is realized as
    # its own group so the full lattice of G is never enumerated
    if rep_g.is_char_p:
        from .groups import quotient_group

        bad = None
        zreal = G.as_group(G.center_mask())
        for Zsub in zreal.group.subgroup_masks():
            Z = zreal.mask_to_parent(Zsub)
            if Z & rep_g.o_p.mask != Z:
                bad = f"central {G.subgroup_label(Z)} not inside O_p"
                break
            q = quotient_group(G, Subgroup(G, Z))
            if not cores(q.group, p).is_char_p:
                bad = f"quotient by {G.subgroup_label(Z)} not characteristic p"
                break
        out.append(_passfail("central-quotient-characteristic", subject, bad is None, bad))
    else:
        out.append(
            _skip("central-quotient-characteristic", subject, "group not of characteristic p")
        )

    # N_G(P) and C_G(P) agree on (almost) characteristic p
    bad = []
    for parent in reps:
        nrep = cores(G.as_group(G.normalizer_mask(parent)).group, p)
        crep = cores(G.as_group(G.centralizer_mask(parent)).group, p)
        if nrep.is_char_p != crep.is_char_p or nrep.is_almost_char_p != crep.is_almost_char_p:
            bad.append(parent)
    out.append(
        _passfail(
            "norm-cent-characteristic-agree",
            subject,
            not bad,
            f"subgroup {G.subgroup_label(bad[0])}" if bad else None,
        )
    )
    return out


# ---------------------------------------------------------------------------
# locality checks


def run_locality_checks(L: Locality, subject: str) -> list[CheckResult]:
    out: list[CheckResult] = []
    base = L.s_group
    F = L.fusion_system()
    rng = random.Random(0xC0FFEE)

    rep = verify_locality(L)
    first = next((c for c in rep.failures()), None)
    out.append(
        _passfail(
            "locality-axioms",
            subject,
            rep.ok,
            f"{first.name}: {first.witness}" if first else None,
        )
    )
    if not rep.ok:
        return out

    # conjugation induces isomorphisms N_L(P) -> N_L(P^g)
    bad = None
    objs = L.objects_sorted()
    pairs = [(P, g) for P in objs for g in range(L.size) if L.s_of(g) & P == P]
    if len(pairs) > 400:
        pairs = rng.sample(pairs, 400)
    for P, g in sorted(pairs):
        img = L.conj_mask(P, g)
        n1 = L.normalizer_ids(P)
        n2 = set(L.normalizer_ids(img))
        conj_images = set()
        for f in n1:
            y = L.conj_elem(f, g)
            if y is None:
                bad = (P, g, "normalizer element not conjugable")
                break
            conj_images.add(y)
        if bad:
            break
        if conj_images != n2:
            bad = (P, g, "conjugation not onto the target normalizer")
            break
    out.append(_passfail("conjugation-isomorphisms", subject, bad is None, str(bad)))

    # chains of conjugation maps agree with the conjugation by the product
    bad = None
    n = L.size
    words: Iterable[tuple[int, ...]]
    if n**3 <= 40_000:
        words = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]
    else:
        words = [tuple(rng.randrange(n) for _ in range(3)) for _ in range(4000)]
    for w in words:
        sw = L.s_of_word(w)
        if sw not in L.delta:
            continue
        prod = L.product(w)
        cmap = L.conj_s[prod]
        for i in bits(sw):
            j = i
            for g in w:
                j = L.conj_s[g][j]
            if cmap.get(i) != j:
                bad = (w, base.element_label(L.s_ids[i]))
                break
        if bad:
            break
    out.append(_passfail("conjugation-word-coherence", subject, bad is None, str(bad)))

    # c_g is a bijection D(g) -> D(g^-1) inverted by c_{g^-1}
    bad = None
    sample_g = list(range(n)) if n <= 60 else sorted(rng.sample(range(n), 60))
    for g in sample_g:
        dom = [x for x in range(n) if L.conj_elem(x, g) is not None]
        target = {x for x in range(n) if L.conj_elem(x, L.inv[g]) is not None}
        images = set()
        for x in dom:
            y = L.conj_elem(x, g)
            images.add(y)
            if L.conj_elem(y, L.inv[g]) != x:
                bad = (g, x, "not inverted")
                break
        if bad:
            break
        if images != target:
            bad = (g, "image of D(g) is not D(g^-1)")
            break
    out.append(
        _passfail("conjugation-inverse-bijection", subject, bad is None, str(bad))
    )

    # N_L(R), C_L(R) are partial subgroups for every R <= S
    bad = None
    for R in base.subgroup_masks():
        for ids in (L.normalizer_ids(R), L.centralizer_ids(R)):
            idset = set(ids)
            for a in ids:
                if L.inv[a] not in idset:
                    bad = (R, a, "inverse escapes")
                    break
                for b in ids:
                    c = L.prod2.get((a, b))
                    if c is not None and c not in idset:
                        bad = (R, (a, b), "product escapes")
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    out.append(
        _passfail(
            "normalizer-centralizer-partial-subgroups", subject, bad is None, str(bad)
        )
    )

    # fully normalized objects vs Sylow normalizers, with fusion equalities
    sat = F.is_saturated()
    table = F.classification_table() if sat else None
    bad = None
    for P in objs:
        grp, ordered = L.normalizer_group(P)
        ns_mask = base.normalizer_mask(P)
        sylow_size = p_part(grp.order, L.p)
        fully = F.is_fully_normalized(P)
        if fully != (popcount(ns_mask) == sylow_size):
            bad = (P, "fully-normalized mismatch with Sylow condition")
            break
        if fully:
            NF = F.normalizer_subsystem(P)
            loc_maps = _conj_fusion_maps(L, L.normalizer_ids(P), ns_mask)
            if loc_maps != {m: NF.maps_from[m] for m in loc_maps}:
                bad = (P, "N_F(P) differs from the normalizer-group fusion")
                break
            CF = F.centralizer_subsystem(P)
            cs_mask = base.centralizer_mask(P)
            loc_cmaps = _conj_fusion_maps(L, L.centralizer_ids(P), cs_mask)
            if loc_cmaps != {m: CF.maps_from[m] for m in loc_cmaps}:
                bad = (P, "C_F(P) differs from the centralizer fusion")
                break
    out.append(
        _passfail("fullynorm-sylow-normalizer", subject, bad is None, str(bad))
    )

    objective = L.is_objective_char_p()
    if not objective:
        for cid in (
            "normal-iff-fixed-by-locality",
            "central-iff-centralized-by-locality",
            "lradical-matches-centric-radical",
            "local-normalizer-is-model",
            "delta-subcentric",
        ):
            out.append(_skip(cid, subject, "locality not of objective characteristic p"))
    else:
        # Q normal in F iff L = N_L(Q); Q central iff L = C_L(Q)
        bad_n = []
        bad_c = []
        full = tuple(range(L.size))
        zmask = F.center_mask()
        for Q in base.subgroup_masks():
            fixed = L.normalizer_ids(Q) == full
            if F.is_normal_in_fusion(Q) != fixed:
                bad_n.append(Q)
            centralized = L.centralizer_ids(Q) == full
            if (Q & zmask == Q) != centralized:
                bad_c.append(Q)
        out.append(
            _passfail(
                "normal-iff-fixed-by-locality", subject, not bad_n, _min_witness(base, bad_n)
            )
        )
        out.append(
            _passfail(
                "central-iff-centralized-by-locality",
                subject,
                not bad_c,
                _min_witness(base, bad_c),
            )
        )
        # L-radical objects are exactly the centric radical ones
        cr = set(F.centric_radical_masks())
        bad = [P for P in objs if L.is_l_radical(P) != (P in cr)]
        out.append(
            _passfail(
                "lradical-matches-centric-radical", subject, not bad, _min_witness(base, bad)
            )
        )
        # model property at fully normalized objects, and Delta <= F^s
        if not sat:
            out.append(_skip("local-normalizer-is-model", subject, "fusion system not saturated"))
            out.append(_skip("delta-subcentric", subject, "fusion system not saturated"))
        else:
            bad = []
            for P in objs:
                if not F.is_fully_normalized(P):
                    continue
                grp, _ = L.normalizer_group(P)
                if not cores(grp, L.p).is_char_p:
                    bad.append(P)
                    continue
                if p_part(grp.order, L.p) != popcount(base.normalizer_mask(P)):
                    bad.append(P)
            out.append(
                _passfail(
                    "local-normalizer-is-model", subject, not bad, _min_witness(base, bad)
                )
            )
            bad = [P for P in objs if not table[P].subcentric]
            out.append(
                _passfail("delta-subcentric", subject, not bad, _min_witness(base, bad))
            )

    # centralizer factorization on quasicentric objects
    if sat:
        quasi = {P for P in objs if table[P].quasicentric}
        if all(P in quasi for P in objs):
            bad = []
            for P in objs:
                if not F.is_fully_normalized(P):
                    continue
                grp, ordered = L.centralizer_group(P)
                theta = o_p_prime_mask(grp, L.p)
                cs_ids = set(L.s_ids[i] for i in bits(base.centralizer_mask(P)))
                prod = set()
                for a in bits(theta):
                    for s in cs_ids:
                        c = L.prod2.get((s, ordered[a]))
                        if c is not None:
                            prod.add(c)
                if prod != set(ordered):
                    bad.append(P)
            out.append(
                _passfail(
                    "quasicentric-centralizer-factorization",
                    subject,
                    not bad,
                    _min_witness(base, bad),
                )
            )
        else:
            out.append(
                _skip(
                    "quasicentric-centralizer-factorization",
                    subject,
                    "object set not inside F^q",
                )
            )
        centric = {P for P in objs if table[P].centric}
        if objective and all(P in centric for P in objs):
            bad = []
            for P in objs:
                cs_ids = set(L.centralizer_ids(P))
                members = {L.s_ids[i] for i in bits(P)}
                if not cs_ids <= members:
                    bad.append(P)
            out.append(
                _passfail(
                    "centric-centralizer-inside", subject, not bad, _min_witness(base, bad)
                )
            )
        else:
            out.append(
                _skip(
                    "centric-centralizer-inside",
                    subject,
                    "object set not inside F^c (or not objective characteristic p)",
                )
            )
    return out


def _conj_fusion_maps(L: Locality, ids: Sequence[int], carrier: int) -> dict[int, frozenset]:
    """Fusion maps on a carrier subgroup generated by conjugation with ids."""
    base = L.s_group
    maps: dict[int, set] = {m: set() for m in base.subgroups_of(carrier)}
    for f in ids:
        cmap = L.conj_s[f]
        for A in maps:
            tup = []
            ok = True
            for i in bits(A):
                j = cmap.get(i)
                if j is None or not (carrier >> j) & 1:
                    ok = False
                    break
                tup.append(j)
            if ok:
                maps[A].add(tuple(tup))
    return {m: frozenset(s) for m, s in maps.items()}


# ---------------------------------------------------------------------------
# quotient and theta checks


def run_quotient_checks(qd: QuotientData, subject: str) -> list[CheckResult]:
    """The projection induces a fusion-system epimorphism with kernel T."""
    out: list[CheckResult] = []
    L = qd.source
    Q = qd.quotient
    FL = L.fusion_system()
    FQ = Q.fusion_system()
    base = L.s_group
    qbase = Q.s_group
    proj = qd.projection
    qpos = {x: i for i, x in enumerate(Q.s_ids)}
    idx = [qpos[proj[L.s_ids[i]]] for i in range(len(L.s_ids))]

    def mask_over(mask: int) -> int:
        outm = 0
        for i in bits(mask):
            outm |= 1 << idx[i]
        return outm

    bad = None
    for P in FL.subgroups():
        P2 = mask_over(P)
        elems = base.mask_elements(P)
        lifts: dict[int, int] = {}
        for i in elems:
            lifts.setdefault(idx[i], i)
        pos = {x: k for k, x in enumerate(elems)}
        q_elems = qbase.mask_elements(P2)
        for m in FL.maps_from[P]:
            induced = tuple(idx[m[pos[lifts[j]]]] for j in q_elems)
            consistent = all(idx[m[pos[i]]] == induced[q_elems.index(idx[i])] for i in elems)
            if not consistent:
                bad = (P, "induced map ill-defined")
                break
            if induced not in FQ.maps_from[P2]:
                bad = (P, "induced map missing in the quotient fusion system")
                break
        if bad:
            break
    out.append(
        _passfail("quotient-fusion-epimorphism-forward", subject, bad is None, str(bad))
    )

    t_mask = 0
    for i, x in enumerate(L.s_ids):
        if x in qd.normal_subgroup.members:
            t_mask |= 1 << i
    bad = None
    for P in FL.subgroups():
        if P & t_mask != t_mask:
            continue
        P2 = mask_over(P)
        elems = base.mask_elements(P)
        pos = {x: k for k, x in enumerate(elems)}
        q_elems = qbase.mask_elements(P2)
        for psi in FQ.maps_from[P2]:
            found = any(
                all(idx[m[pos[i]]] == psi[q_elems.index(idx[i])] for i in elems)
                for m in FL.maps_from[P]
            )
            if not found:
                bad = (P, "quotient morphism has no lift")
                break
        if bad:
            break
    out.append(
        _passfail("quotient-fusion-epimorphism-lift", subject, bad is None, str(bad))
    )
    return out


def run_theta_checks(td: ThetaData, subject: str) -> list[CheckResult]:
    mapping = (
        ("theta-partial-normal", "partial normal"),
        ("theta-meets-s-trivially", "meets S"),
        ("theta-object-kernels", "kernel"),
        ("theta-quotient-objective", "objective"),
        ("theta-quotient-linking", "not a linking"),
        ("theta-fusion-match", "fusion system mismatch"),
    )
    out = []
    for cid, needle in mapping:
        hits = [f for f in td.findings if needle in f]
        out.append(_passfail(cid, subject, not hits, hits[0] if hits else None))
    return out


def run_censubsystem_checks(
    inst: Instance, td: ThetaData, subject: str
) -> list[CheckResult]:
    """Centralizer-of-subsystem agreement between fusion and locality sides."""
    out: list[CheckResult] = []
    G = inst.group
    F = inst.fusion
    real = inst.s_real
    base = real.group
    LQ = td.quotient
    if not LQ.is_linking_locality():
        return [_skip("subsystem-centralizer-match", subject, "no linking locality")]
    qbase = LQ.s_group

    # identification of S with its image in the quotient
    if td.quotient_data is None:
        idx = list(range(len(base.mask_elements(base.full_mask))))
        src = td.locality
        proj = tuple(range(src.size))
    else:
        src = td.locality
        proj = td.quotient_data.projection
        qpos = {x: i for i, x in enumerate(LQ.s_ids)}
        idx = [qpos[proj[src.s_ids[i]]] for i in range(len(src.s_ids))]

    table = F.classification_table()
    for n_mask in G.normal_subgroup_masks():
        t_parent = n_mask & real.mask
        if p_part(popcount(n_mask), F.p) != popcount(t_parent):
            continue
        label = f"{subject}/N={G.subgroup_label(n_mask)}"
        # induced subset of the quotient locality
        src_members = [
            i for i, g in enumerate(src.source_ids) if (n_mask >> g) & 1
        ]
        nbar = frozenset(proj[i] for i in src_members)
        if not is_partial_normal(LQ, nbar):
            out.append(
                _passfail(
                    "subsystem-centralizer-match",
                    label,
                    False,
                    "induced subset not partial normal",
                )
            )
            continue
        # T-bar and the fusion system of N-bar on it
        t_mask_q = 0
        for i, x in enumerate(LQ.s_ids):
            if x in nbar:
                t_mask_q |= 1 << i
        gens = []
        for f in sorted(nbar):
            cmap = LQ.conj_s[f]
            dom = 0
            for i, j in cmap.items():
                if (t_mask_q >> i) & 1 and (t_mask_q >> j) & 1:
                    dom |= 1 << i
            gens.append((dom, tuple(cmap[i] for i in bits(dom))))
        emaps = close_morphism_sets(qbase, t_mask_q, gens)
        from .fusion import FusionSystem as FS, DerivedProvenance

        E_loc = FS(qbase, t_mask_q, F.p, emaps, DerivedProvenance("partial-normal"), label="E_loc")
        FQ = LQ.fusion_system()
        cs_fusion = centralizer_in_S_of_subsystem(FQ, E_loc)
        # set-level centralizer of N-bar in S-bar
        cs_set = 0
        for i, s in enumerate(LQ.s_ids):
            if all(LQ.conj_elem(x, s) == x for x in nbar):
                cs_set |= 1 << i
        ok = cs_fusion == cs_set
        # cross-check with the group-side subsystem
        sub = subsystem_from_normal_subgroup(F, n_mask)
        cs_group = centralizer_in_S_of_subsystem(F, sub.fusion)
        cs_group_q = 0
        for i in bits(cs_group):
            cs_group_q |= 1 << idx[i]
        ok = ok and cs_group_q == cs_fusion
        out.append(
            _passfail(
                "subsystem-centralizer-match",
                label,
                ok,
                None
                if ok
                else f"fusion side {qbase.subgroup_label(cs_fusion)} vs set side {qbase.subgroup_label(cs_set)}",
            )
        )
    return out


# ---------------------------------------------------------------------------
# mutation sensitivity


def mutate_fusion(F: FusionSystem, seed: int, count: int):
    """Yield (description, mutated system) with one morphism deleted each."""
    rng = random.Random(seed)
    pool = [
        (P, m)
        for P in sorted(F.maps_from)
        for m in sorted(F.maps_from[P])
    ]
    for _ in range(count):
        P, m = pool[rng.randrange(len(pool))]
        maps = dict(F.maps_from)
        maps[P] = frozenset(x for x in maps[P] if x != m)
        mutated = FusionSystem(
            F.base, F.carrier, F.p, maps, F.provenance, label=F.label + "*"
        )
        yield (
            f"drop morphism on {F.base.subgroup_label(P)}",
            mutated,
        )


def mutate_locality(L: Locality, seed: int, count: int):
    """Yield (description, mutated locality) with one product entry deleted."""
    rng = random.Random(seed)
    pool = sorted(L.prod2)
    for _ in range(count):
        key = pool[rng.randrange(len(pool))]
        prod2 = dict(L.prod2)
        del prod2[key]
        mutated = Locality(
            size=L.size,
            inv=L.inv,
            prod2=prod2,
            s_ids=L.s_ids,
            s_group=L.s_group,
            delta=L.delta,
            p=L.p,
            label=L.label + "*",
            elt_names=L.elt_names,
            conj_s=L.conj_s,
            source_group=L.source_group,
            source_ids=L.source_ids,
        )
        yield (f"drop product entry {key}", mutated)


def mutation_detected_fusion(F: FusionSystem) -> bool:
    return fusion_wellformed_witness(F) is not None


def mutation_detected_locality(L: Locality) -> bool:
    return not verify_locality(L).ok


# ---------------------------------------------------------------------------
# corpus runner


@dataclass
class CorpusReport:
    results: tuple[CheckResult, ...]

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(r for r in self.results if r.status == "fail")

    def to_json_dict(self) -> dict:
        return {
            "results": [r.as_json() for r in self.results],
            "failures": len(self.failures),
            "checks": len(self.results),
        }

    def to_table(self) -> str:
        if not self.results:
            return "(empty corpus: no checks)\n"
        wid = max(len(r.check_id) for r in self.results)
        wsub = max(len(r.subject) for r in self.results)
        lines = []
        for r in self.results:
            line = f"{r.check_id:<{wid}}  {r.subject:<{wsub}}  {r.status}"
            if r.status == "fail" and r.witness:
                line += f"  [{r.witness}]"
            if r.status == "skipped" and r.reason:
                line += f"  ({r.reason})"
            lines.append(line)
        lines.append(f"-- {len(self.results)} checks, {len(self.failures)} failures")
        return "\n".join(lines) + "\n"


def run_instance_checks(
    inst: Instance,
    only: Optional[str] = None,
    fail_fast: bool = False,
    supplied_subsystems: Sequence[tuple[int, str]] = (),
) -> list[CheckResult]:
    subject = inst.instance_id
    out: list[CheckResult] = []

    def done() -> bool:
        return fail_fast and any(r.status == "fail" for r in out)

    out.extend(run_group_checks(inst))
    if not done():
        out.extend(run_fusion_checks(inst.fusion, subject, supplied_subsystems))

    if not done():
        ds = delta_sets(inst.group, inst.sylow, inst.prime, s_real=inst.s_real, fusion=inst.fusion)
        td = theta_quotient(inst.group, inst.sylow, inst.prime, deltas=ds)
        out.extend(run_theta_checks(td, subject))

        # characteristic p-type: group version implies fusion version,
        # and then the all-objects locality is a linking locality over F
        group_cpt = is_characteristic_p_type(inst.group, inst.sylow, inst.prime)
        fusion_cpt = is_characteristic_p_type_fusion(inst.fusion)
        out.append(
            _passfail(
                "char-p-type-group-implies-fusion",
                subject,
                (not group_cpt) or fusion_cpt,
                "group is of characteristic p-type but its fusion system is not",
            )
        )
        base = inst.s_real.group
        all_objects = nontrivial(frozenset(base.subgroup_masks()))
        L_all = locality_from_group(
            inst.group, inst.sylow, all_objects, inst.prime,
            label=f"L_all({inst.entry.name})", s_real=inst.s_real,
        )
        if not done():
            out.extend(run_locality_checks(L_all, subject + "/L-all"))
        if group_cpt:
            table = inst.fusion.classification_table()
            subc_nontrivial = {
                P for P in inst.fusion.subgroups() if P != 1 and table[P].subcentric
            }
            ok = (
                set(all_objects) == subc_nontrivial
                and L_all.is_linking_locality()
                and L_all.fusion_system().maps_from == inst.fusion.maps_from
            )
            out.append(
                _passfail(
                    "char-p-type-locality",
                    subject,
                    ok,
                    "all-objects locality is not a subcentric linking locality",
                )
            )
        else:
            out.append(
                _skip("char-p-type-locality", subject, "group not of characteristic p-type")
            )
        # the centric-objects locality exercises the Delta <= F^c checks
        if not done():
            table = inst.fusion.classification_table()
            centric_objects = frozenset(
                P for P in inst.fusion.subgroups() if table[P].centric
            )
            L_c = locality_from_group(
                inst.group, inst.sylow, centric_objects, inst.prime,
                label=f"L_c({inst.entry.name})", s_real=inst.s_real,
            )
            out.extend(run_locality_checks(L_c, subject + "/L-centric"))
        if not done():
            out.extend(run_locality_checks(td.locality, subject + "/L-delta*"))
        if not done() and td.quotient is not td.locality:
            out.extend(run_locality_checks(td.quotient, subject + "/L-theta-quot"))
        if not done() and td.quotient_data is not None:
            out.extend(
                run_quotient_checks(td.quotient_data, subject + "/L-theta-quot")
            )
        if not done():
            out.extend(run_censubsystem_checks(inst, td, subject))
        # quotients by partial normal subgroups induced from normal subgroups
        if not done():
            G = inst.group
            for n_mask in G.normal_subgroup_masks():
                if n_mask in (1, G.full_mask):
                    continue
                members = frozenset(
                    i for i, g in enumerate(L_all.source_ids) if (n_mask >> g) & 1
                )
                if not is_partial_normal(L_all, members):
                    continue
                qd = quotient(L_all, members)
                out.extend(
                    run_quotient_checks(
                        qd, f"{subject}/L-all/N={G.subgroup_label(n_mask)}"
                    )
                )

    if only is not None:
        out = [r for r in out if fnmatch.fnmatch(r.check_id, only)]
    return out


def run_corpus(
    entries: Sequence[CorpusEntry] = DEFAULT_CORPUS,
    only: Optional[str] = None,
    fail_fast: bool = False,
    supplied_subsystems: Optional[dict] = None,
) -> CorpusReport:
    """Run every check over the corpus; results sorted for determinism."""
    results: list[CheckResult] = []
    supplied_subsystems = supplied_subsystems or {}
    for entry in entries:
        inst = build_instance(entry)
        supplied = supplied_subsystems.get(inst.instance_id, ())
        results.extend(
            run_instance_checks(
                inst, only=only, fail_fast=fail_fast, supplied_subsystems=supplied
            )
        )
        if fail_fast and any(r.status == "fail" for r in results):
            break
    results.sort(key=lambda r: (r.check_id, r.subject))
    return CorpusReport(results=tuple(results))
