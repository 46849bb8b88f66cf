"""Partial groups and localities.

A locality is stored as a finite carrier of element ids ``0..n-1`` (identity
at 0), an involutory inversion, a partial binary product, a distinguished
p-subgroup S realized as a standalone group, and the object set Delta given
as bitmasks over S.

The word domain is intensional: a word ``w`` lies in the domain iff ``S_w``
(computed by chaining the per-element conjugation maps on S) is in Delta.
Only binary products are stored; products of longer domain words are left
folds of the binary product.  Constructors populate the binary product with
exactly the pairs whose two-letter word is in the domain, and the verifier
cross-checks that rule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import (
    NotAnObject,
    NotClosed,
    NotFullyKNormalized,
    NotInDomain,
    NotPartialNormal,
    NotSylow,
    ObjectSetMismatch,
    VerificationFailed,
)
from .fusion import FusionSystem, LocalityProvenance, close_morphism_sets
from .groups import (
    FiniteGroup,
    RealizedSubgroup,
    Subgroup,
    bits,
    group_from_elements,
    p_part,
    popcount,
)


class Locality:
    """A finite locality (L, Delta, S)."""

    def __init__(
        self,
        size: int,
        inv: tuple[int, ...],
        prod2: dict[tuple[int, int], int],
        s_ids: tuple[int, ...],
        s_group: FiniteGroup,
        delta: frozenset[int],
        p: int,
        label: str = "L",
        elt_names: Optional[tuple[str, ...]] = None,
        conj_s: Optional[tuple[dict[int, int], ...]] = None,
        source_group: Optional[FiniteGroup] = None,
        source_ids: Optional[tuple[int, ...]] = None,
    ) -> None:
        self.size = size
        self.inv = inv
        self.prod2 = prod2
        self.s_ids = s_ids
        self.s_group = s_group
        self.s_pos = {x: i for i, x in enumerate(s_ids)}
        self.delta = delta
        self.p = p
        self.label = label
        self.elt_names = elt_names
        self.source_group = source_group
        self.source_ids = source_ids
        if conj_s is None:
            conj_s = tuple(self._conj_from_prod(f) for f in range(size))
        self.conj_s = conj_s
        self._s_of: dict[int, int] = {}
        self._fusion: Optional[FusionSystem] = None
        self._norm_groups: dict[int, tuple[FiniteGroup, tuple[int, ...]]] = {}

    # -- basic structure -----------------------------------------------------

    def element_label(self, x: int) -> str:
        if self.elt_names is not None:
            return self.elt_names[x]
        if self.source_group is not None and self.source_ids is not None:
            return self.source_group.element_label(self.source_ids[x])
        return str(x)

    def _conj_from_prod(self, f: int) -> dict[int, int]:
        """Derive c_f on S from binary folds (used when not supplied)."""
        out = {}
        g = self.inv[f]
        for i, s in enumerate(self.s_ids):
            a = self.prod2.get((g, s))
            if a is None:
                continue
            b = self.prod2.get((a, f))
            if b is None:
                continue
            j = self.s_pos.get(b)
            if j is not None:
                out[i] = j
        return out

    def s_of(self, f: int) -> int:
        """S_f as a mask over s_group indices."""
        got = self._s_of.get(f)
        if got is None:
            got = 0
            for i in self.conj_s[f]:
                got |= 1 << i
            self._s_of[f] = got
        return got

    def s_of_word(self, word: Sequence[int]) -> int:
        """S_w as a mask over s_group indices; the empty word gives S."""
        pairs = [(i, i) for i in range(len(self.s_ids))]
        for g in word:
            cmap = self.conj_s[g]
            pairs = [(a, cmap[b]) for a, b in pairs if b in cmap]
        out = 0
        for a, _ in pairs:
            out |= 1 << a
        return out

    def word_in_domain(self, word: Sequence[int]) -> bool:
        if any(not (0 <= x < self.size) for x in word):
            return False
        return self.s_of_word(word) in self.delta

    def product(self, word: Sequence[int]) -> int:
        """Product of a domain word (left fold); empty word gives identity."""
        if not self.word_in_domain(word):
            raise NotInDomain(f"word {tuple(word)} not in the product domain")
        out = 0
        for x in word:
            nxt = self.prod2.get((out, x))
            if nxt is None:
                raise VerificationFailed(
                    f"fold undefined on domain word {tuple(word)}"
                )
            out = nxt
        return out

    def conj_elem(self, x: int, f: int) -> Optional[int]:
        """x^f when the word (f^-1, x, f) is in the domain, else None."""
        word = (self.inv[f], x, f)
        if not self.word_in_domain(word):
            return None
        a = self.prod2.get((self.inv[f], x))
        if a is None:
            return None
        return self.prod2.get((a, f))

    def conj_mask(self, mask: int, f: int) -> Optional[int]:
        """Image of a subgroup mask of S under c_f, None if not all defined."""
        cmap = self.conj_s[f]
        out = 0
        for i in bits(mask):
            j = cmap.get(i)
            if j is None:
                return None
            out |= 1 << j
        return out

    # -- normalizers and centralizers -----------------------------------------

    def normalizer_ids(self, mask: int) -> tuple[int, ...]:
        out = []
        for f in range(self.size):
            img = self.conj_mask(mask, f)
            if img == mask:
                out.append(f)
        return tuple(out)

    def centralizer_ids(self, mask: int) -> tuple[int, ...]:
        out = []
        members = tuple(bits(mask))
        for f in range(self.size):
            cmap = self.conj_s[f]
            if all(cmap.get(i) == i for i in members):
                out.append(f)
        return tuple(out)

    def normalizer_group(self, mask: int) -> tuple[FiniteGroup, tuple[int, ...]]:
        """N_L(P) realized as a group, for P in Delta; returns (group, ids)."""
        if mask not in self.delta:
            raise NotAnObject(self.s_group.subgroup_label(mask))
        got = self._norm_groups.get(mask)
        if got is not None:
            return got
        ids = self.normalizer_ids(mask)
        got = self._ids_as_group(ids, f"N_{self.label}({self.s_group.subgroup_label(mask)})")
        self._norm_groups[mask] = got
        return got

    def centralizer_group(self, mask: int) -> tuple[FiniteGroup, tuple[int, ...]]:
        if mask not in self.delta:
            raise NotAnObject(self.s_group.subgroup_label(mask))
        ids = self.centralizer_ids(mask)
        return self._ids_as_group(ids, f"C_{self.label}({self.s_group.subgroup_label(mask)})")

    def _ids_as_group(
        self, ids: Sequence[int], label: str
    ) -> tuple[FiniteGroup, tuple[int, ...]]:
        idset = set(ids)

        def mul(a: int, b: int) -> int:
            c = self.prod2.get((a, b))
            if c is None or c not in idset:
                raise VerificationFailed(
                    f"{label}: product of {self.element_label(a)} and "
                    f"{self.element_label(b)} not defined inside the subset"
                )
            return c

        grp, ordered = group_from_elements(
            sorted(ids), mul, label=label, names=self.element_label
        )
        return grp, ordered

    # -- fusion system ----------------------------------------------------------

    def fusion_system(self) -> FusionSystem:
        """F_S(L), generated by the conjugation maps c_f on S_f."""
        if self._fusion is None:
            gens = []
            for f in range(self.size):
                cmap = self.conj_s[f]
                dom = self.s_of(f)
                images = tuple(cmap[i] for i in bits(dom))
                gens.append((dom, images))
            maps = close_morphism_sets(self.s_group, self.s_group.full_mask, gens)
            self._fusion = FusionSystem(
                self.s_group,
                self.s_group.full_mask,
                self.p,
                maps,
                LocalityProvenance(locality=self),
                label=f"F_S({self.label})",
            )
        return self._fusion

    # -- predicates ---------------------------------------------------------------

    def objects_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.delta))

    def is_objective_char_p(self) -> bool:
        from .groups import cores

        return all(
            cores(self.normalizer_group(P)[0], self.p).is_char_p
            for P in self.objects_sorted()
        )

    def is_linking_locality(self) -> bool:
        if not self.is_objective_char_p():
            return False
        F = self.fusion_system()
        return all(Q in self.delta for Q in F.centric_radical_masks())

    def is_l_radical(self, mask: int) -> bool:
        """Whether O_p(N_L(P)) equals P, for P in Delta."""
        if mask not in self.delta:
            raise NotAnObject(self.s_group.subgroup_label(mask))
        from .groups import o_p_mask

        grp, ordered = self.normalizer_group(mask)
        op = o_p_mask(grp, self.p)
        op_smask = 0
        for i in bits(op):
            j = self.s_pos.get(ordered[i])
            if j is None:
                return False
            op_smask |= 1 << j
        return op_smask == mask

    def __repr__(self) -> str:  # pragma: no cover
        return f"Locality({self.label}, |L|={self.size}, |S|={len(self.s_ids)})"


# operation-style wrappers around the Locality methods


def s_of(L: Locality, f: int) -> int:
    return L.s_of(f)


def s_of_word(L: Locality, word: Sequence[int]) -> int:
    return L.s_of_word(word)


def product(L: Locality, word: Sequence[int]) -> int:
    return L.product(word)


def fusion_of(L: Locality) -> FusionSystem:
    return L.fusion_system()


def normalizer_group(L: Locality, mask: int):
    return L.normalizer_group(mask)


def centralizer_group(L: Locality, mask: int):
    return L.centralizer_group(mask)


def is_objective_char_p(L: Locality) -> bool:
    return L.is_objective_char_p()


def is_linking_locality(L: Locality) -> bool:
    return L.is_linking_locality()


def is_l_radical(L: Locality, mask: int) -> bool:
    return L.is_l_radical(mask)


# ---------------------------------------------------------------------------
# construction from a finite group


def _validate_gamma(
    base: FiniteGroup,
    gamma: frozenset[int],
    conjugating: Iterable[Callable[[int], Optional[int]]],
) -> None:
    """Gamma must be nonempty, closed under overgroups and conjugation into S."""
    if not gamma:
        raise NotClosed("empty object set")
    subgroups = set(base.subgroup_masks())
    for P in gamma:
        if P not in subgroups:
            raise NotClosed(f"object {P} is not a subgroup mask")
    for P in gamma:
        for Q in subgroups:
            if P & Q == P and Q not in gamma:
                raise NotClosed(
                    f"not closed under overgroups: {base.subgroup_label(Q)}"
                )
    for convey in conjugating:
        for P in gamma:
            img = convey(P)
            if img is not None and img not in gamma:
                raise NotClosed(
                    f"not closed under conjugation: {base.subgroup_label(P)}"
                )


def locality_from_group(
    G: FiniteGroup,
    S: Subgroup,
    gamma: Iterable[int],
    p: int,
    label: Optional[str] = None,
    s_real: Optional[RealizedSubgroup] = None,
) -> Locality:
    """The locality on {g : S cap S^g in Gamma} with the restricted product."""
    if S.group is not G:
        raise NotSylow("S belongs to a different group")
    if popcount(S.mask) != p_part(G.order, p):
        raise NotSylow(f"{S.label()} is not Sylow in {G.label}")
    real = s_real if s_real is not None else G.as_group(S.mask)
    base = real.group
    gamma = frozenset(gamma)

    conj_testers = []
    for g in range(G.order):

        def convey(P: int, g: int = g) -> Optional[int]:
            out = 0
            for i in bits(P):
                y = G.conj(real.to_parent[i], g)
                j = real.index_of.get(y)
                if j is None:
                    return None
                out |= 1 << j
            return out

        conj_testers.append(convey)
    _validate_gamma(base, gamma, conj_testers)

    # carrier: g with S cap S^g in Gamma (= the domain of c_{g^-1})
    carrier: list[int] = []
    for g in range(G.order):
        inv_dom = 0
        for i, x in enumerate(real.to_parent):
            if real.index_of.get(G.conj(x, G.inv(g))) is not None:
                inv_dom |= 1 << i
        if inv_dom in gamma:
            carrier.append(g)
    pos = {g: i for i, g in enumerate(carrier)}
    n = len(carrier)
    inv = tuple(pos[G.inv(g)] for g in carrier)
    s_ids = tuple(pos[x] for x in real.to_parent)

    prod2: dict[tuple[int, int], int] = {}
    for ia, ga in enumerate(carrier):
        for ib, gb in enumerate(carrier):
            # S_{(a,b)}: chain x -> x^ga in S -> (x^ga)^gb in S
            m = 0
            gab = G.mul(ga, gb)
            for i, x in enumerate(real.to_parent):
                y = G.conj(x, ga)
                if real.index_of.get(y) is None:
                    continue
                if real.index_of.get(G.conj(x, gab)) is None:
                    continue
                m |= 1 << i
            if m in gamma:
                target = pos.get(gab)
                if target is None:
                    raise VerificationFailed(
                        "product of carrier elements leaves the carrier"
                    )
                prod2[(ia, ib)] = target

    conj_s = []
    for ig, g in enumerate(carrier):
        cmap = {}
        for i, x in enumerate(real.to_parent):
            j = real.index_of.get(G.conj(x, g))
            if j is not None:
                cmap[i] = j
        conj_s.append(cmap)

    return Locality(
        size=n,
        inv=inv,
        prod2=prod2,
        s_ids=s_ids,
        s_group=base,
        delta=gamma,
        p=p,
        label=label or f"L({G.label})",
        conj_s=tuple(conj_s),
        source_group=G,
        source_ids=tuple(carrier),
    )


# ---------------------------------------------------------------------------
# axiom verification


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class LocalityAxiomReport:
    checks: tuple[AxiomCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[AxiomCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def verify_locality(
    L: Locality, seed: int = 0, word_cap: int = 120_000
) -> LocalityAxiomReport:
    """Check the partial-group and locality axioms, with witnesses.

    Associativity and the word-domain rule are exhaustive for words of
    length <= 2; length-3 and length-4 words are exhaustive only while the
    total stays under ``word_cap`` and are otherwise sampled with the given
    seed.  The converse of the domain rule at length >= 3 ("fold defined
    implies word in domain") is not an axiom of partial groups and is not
    checked.
    """
    checks: list[AxiomCheck] = []
    rng = random.Random(seed)
    n = L.size

    def check(name: str, ok: bool, witness: Optional[str] = None) -> None:
        checks.append(AxiomCheck(name, ok, witness if not ok else None))

    # inversion is an involutory bijection fixing the identity
    ok = (
        sorted(L.inv) == list(range(n))
        and all(L.inv[L.inv[x]] == x for x in range(n))
        and L.inv[0] == 0
    )
    check("inversion-involutory", ok, "inv map malformed")

    # identity laws
    bad = None
    for x in range(n):
        if L.prod2.get((0, x)) != x or L.prod2.get((x, 0)) != x:
            bad = x
            break
    check("identity-laws", bad is None, f"element {bad}" if bad is not None else None)

    # binary domain rule, both directions
    bad = None
    for a in range(n):
        for b in range(n):
            indom = L.s_of_word((a, b)) in L.delta
            stored = (a, b) in L.prod2
            if indom != stored:
                bad = (a, b, "missing" if indom else "extra")
                break
            if stored and not (0 <= L.prod2[(a, b)] < n):
                bad = (a, b, "target outside carrier")
                break
        if bad:
            break
    check("binary-domain-rule", bad is None, str(bad))

    # left cancellation: ab = c implies a^-1 c = b; and a a^-1 = 1
    bad = None
    for (a, b), c in L.prod2.items():
        if L.prod2.get((L.inv[a], c)) != b:
            bad = (a, b, "left cancellation")
            break
    if bad is None:
        for a in range(n):
            if L.prod2.get((a, L.inv[a])) != 0:
                bad = (a, "inverse product")
                break
    check("cancellation", bad is None, str(bad))

    # word-domain rule and associativity at length 3 (capped)
    triples: Iterable[tuple[int, int, int]]
    if n**3 <= word_cap:
        triples = (
            (a, b, c) for a in range(n) for b in range(n) for c in range(n)
        )
    else:
        triples = (
            (rng.randrange(n), rng.randrange(n), rng.randrange(n))
            for _ in range(word_cap // 10)
        )
    bad = None
    for w in triples:
        sw = L.s_of_word(w)
        if not L.s_group.is_subgroup_mask(sw):
            bad = (w, "S_w is not a subgroup")
            break
        if sw not in L.delta:
            continue
        a, b, c = w
        ab = L.prod2.get((a, b))
        bc = L.prod2.get((b, c))
        if ab is None or bc is None:
            bad = (w, "fold undefined on domain word")
            break
        left = L.prod2.get((ab, c))
        right = L.prod2.get((a, bc))
        if left is None or right is None or left != right:
            bad = (w, "bracketings disagree")
            break
        if sw & ~L.s_of(left):
            bad = (w, "S_w not inside S of the product")
            break
    check("length3-domain-and-associativity", bad is None, str(bad))

    # length-4 sampled associativity over domain words
    bad = None
    count4 = min(word_cap // 20, n**4)
    for _ in range(count4):
        w = tuple(rng.randrange(n) for _ in range(4))
        if L.s_of_word(w) not in L.delta:
            continue
        vals = set()
        ok4 = True
        a, b, c, d = w
        for split in _bracketings_4():
            v = split(L, a, b, c, d)
            if v is None:
                ok4 = False
                break
            vals.add(v)
        if not ok4 or len(vals) != 1:
            bad = (w, "length-4 bracketings disagree or undefined")
            break
    check("length4-associativity-sampled", bad is None, str(bad))

    # (L1) no p-subgroup properly contains S
    smask_ids = set(L.s_ids)
    cap = 1
    while cap * L.p <= n:
        cap *= L.p
    bad = None
    for x in range(n):
        if x in smask_ids:
            continue
        grown = _try_close_total(L, smask_ids | {x}, cap)
        if grown is not None:
            size = len(grown)
            if size == p_part(size, L.p) and size > len(L.s_ids):
                bad = x
                break
    check("L1-sylow-maximality", bad is None, f"element {bad} extends S" if bad is not None else None)

    # (L3) closure of Delta
    bad = None
    subgroups = set(L.s_group.subgroup_masks())
    for P in L.objects_sorted():
        for Q in subgroups:
            if P & Q == P and Q not in L.delta:
                bad = (P, Q, "overgroup missing")
                break
        if bad:
            break
        for f in range(n):
            if L.s_of(f) & P == P:
                img = L.conj_mask(P, f)
                if img is not None and img not in L.delta:
                    bad = (P, f, "conjugate missing")
                    break
        if bad:
            break
    check("L3-delta-closure", bad is None, str(bad))

    # S_f in Delta and S_f^f = S_{f^-1}
    bad = None
    for f in range(n):
        sf = L.s_of(f)
        if sf not in L.delta:
            bad = (f, "S_f not an object")
            break
        img = L.conj_mask(sf, f)
        if img != L.s_of(L.inv[f]):
            bad = (f, "S_f^f != S_{f^-1}")
            break
    check("s-of-objects", bad is None, str(bad))

    # normalizers of objects are subgroups
    bad = None
    for P in L.objects_sorted():
        ids = L.normalizer_ids(P)
        idset = set(ids)
        for a in ids:
            if L.inv[a] not in idset:
                bad = (P, a, "inverse escapes")
                break
            for b in ids:
                c = L.prod2.get((a, b))
                if c is None or c not in idset:
                    bad = (P, (a, b), "product escapes or undefined")
                    break
            if bad:
                break
        if bad:
            break
    check("object-normalizers-are-groups", bad is None, str(bad))

    # conjugation maps against binary folds
    bad = None
    for f in range(n):
        for i, j in L.conj_s[f].items():
            s = L.s_ids[i]
            a = L.prod2.get((L.inv[f], s))
            b = L.prod2.get((a, f)) if a is not None else None
            if b != L.s_ids[j]:
                bad = (f, s)
                break
        if bad:
            break
    check("conjugation-matches-folds", bad is None, str(bad))

    return LocalityAxiomReport(checks=tuple(checks))


def _bracketings_4():
    def b1(L, a, b, c, d):  # ((ab)c)d
        ab = L.prod2.get((a, b))
        abc = L.prod2.get((ab, c)) if ab is not None else None
        return L.prod2.get((abc, d)) if abc is not None else None

    def b2(L, a, b, c, d):  # (ab)(cd)
        ab = L.prod2.get((a, b))
        cd = L.prod2.get((c, d))
        if ab is None or cd is None:
            return None
        return L.prod2.get((ab, cd))

    def b3(L, a, b, c, d):  # (a(bc))d
        bc = L.prod2.get((b, c))
        abc = L.prod2.get((a, bc)) if bc is not None else None
        return L.prod2.get((abc, d)) if abc is not None else None

    def b4(L, a, b, c, d):  # a((bc)d)
        bc = L.prod2.get((b, c))
        bcd = L.prod2.get((bc, d)) if bc is not None else None
        return L.prod2.get((a, bcd)) if bcd is not None else None

    def b5(L, a, b, c, d):  # a(b(cd))
        cd = L.prod2.get((c, d))
        bcd = L.prod2.get((b, cd)) if cd is not None else None
        return L.prod2.get((a, bcd)) if bcd is not None else None

    return (b1, b2, b3, b4, b5)


def _try_close_total(L: Locality, start: set[int], cap: int) -> Optional[set[int]]:
    """Close a subset under products/inverses requiring totality.

    Returns the closed set, or None when some needed product is undefined or
    the size exceeds ``cap`` (then it cannot be a p-subgroup bigger than S).
    """
    members = set(start)
    for x in list(members):
        members.add(L.inv[x])
    frontier = list(members)
    while frontier:
        added = []
        for a in list(members):
            for b in frontier:
                for pair in ((a, b), (b, a)):
                    c = L.prod2.get(pair)
                    if c is None:
                        return None
                    if c not in members:
                        members.add(c)
                        added.append(c)
                        if len(members) > cap:
                            return None
        frontier = added
    return members


# ---------------------------------------------------------------------------
# partial normal subgroups and quotients


@dataclass(frozen=True)
class PartialNormalSubgroup:
    locality: Locality
    members: frozenset[int]


@dataclass(frozen=True)
class QuotientData:
    source: Locality
    normal_subgroup: PartialNormalSubgroup
    cosets: tuple[frozenset[int], ...]
    quotient: Locality
    projection: tuple[int, ...]


def is_partial_normal(L: Locality, members: Iterable[int]) -> bool:
    mem = frozenset(members)
    if 0 not in mem:
        return False
    for x in mem:
        if L.inv[x] not in mem:
            return False
    for a in mem:
        for b in mem:
            c = L.prod2.get((a, b))
            if c is not None and c not in mem:
                return False
    for f in range(L.size):
        for x in mem:
            y = L.conj_elem(x, f)
            if y is not None and y not in mem:
                return False
    return True


def right_coset(L: Locality, members: frozenset[int], f: int) -> frozenset[int]:
    out = {f}
    for x in members:
        y = L.prod2.get((x, f))
        if y is not None:
            out.add(y)
    return frozenset(out)


def quotient(L: Locality, members: Iterable[int]) -> QuotientData:
    """Quotient of L by a partial normal subgroup (maximal right cosets)."""
    mem = frozenset(members)
    if not is_partial_normal(L, mem):
        raise NotPartialNormal("subset is not a partial normal subgroup")
    cosets_all = {right_coset(L, mem, f) for f in range(L.size)}
    maximal = [
        c
        for c in cosets_all
        if not any(c is not d and c < d for d in cosets_all)
    ]
    covered: dict[int, int] = {}
    maximal.sort(key=min)
    for idx, c in enumerate(maximal):
        for x in c:
            if x in covered:
                raise VerificationFailed(
                    f"maximal right cosets do not partition: element {x}"
                )
            covered[x] = idx
    if len(covered) != L.size:
        raise VerificationFailed("maximal right cosets do not cover the carrier")
    if maximal[covered[0]] != mem:
        raise VerificationFailed("kernel coset differs from the normal subset")

    n = len(maximal)
    proj = tuple(covered[x] for x in range(L.size))

    inv = []
    for c in maximal:
        targets = {proj[L.inv[x]] for x in c}
        if len(targets) != 1:
            raise VerificationFailed("inversion ill-defined on cosets")
        inv.append(targets.pop())

    prod2: dict[tuple[int, int], int] = {}
    for ia, ca in enumerate(maximal):
        for ib, cb in enumerate(maximal):
            vals = set()
            for a in ca:
                for b in cb:
                    c = L.prod2.get((a, b))
                    if c is not None:
                        vals.add(proj[c])
            if len(vals) > 1:
                raise VerificationFailed("coset product ill-defined")
            if vals:
                prod2[(ia, ib)] = vals.pop()

    sbar_ids = tuple(sorted({proj[x] for x in L.s_ids}))

    def mul(a: int, b: int) -> int:
        c = prod2.get((a, b))
        if c is None:
            raise VerificationFailed("image of S not closed in quotient")
        return c

    names = tuple(
        "[" + L.element_label(min(c)) + "]" for c in maximal
    )
    s_group, ordered = group_from_elements(
        sorted(sbar_ids), mul, label=f"S({L.label})/N", names=lambda q: names[q]
    )
    # Delta-bar: images of objects
    spos = {x: i for i, x in enumerate(ordered)}
    delta_bar = set()
    for P in L.delta:
        m = 0
        for i in bits(P):
            m |= 1 << spos[proj[L.s_ids[i]]]
        delta_bar.add(m)

    # conjugation on S-bar from word lifts
    conj_s = []
    for ib in range(n):
        cmap: dict[int, int] = {}
        cb = maximal[ib]
        for si, qb in enumerate(ordered):
            targets = set()
            for s in maximal[qb]:
                for f in cb:
                    word = (L.inv[f], s, f)
                    if L.word_in_domain(word):
                        a = L.prod2.get((L.inv[f], s))
                        t = L.prod2.get((a, f)) if a is not None else None
                        if t is not None:
                            targets.add(proj[t])
            if len(targets) > 1:
                raise VerificationFailed("quotient conjugation ill-defined")
            if targets:
                t = targets.pop()
                if t in spos:
                    cmap[si] = spos[t]
        conj_s.append(cmap)

    quot = Locality(
        size=n,
        inv=tuple(inv),
        prod2=prod2,
        s_ids=tuple(ordered),
        s_group=s_group,
        delta=frozenset(delta_bar),
        p=L.p,
        label=f"{L.label}/N",
        elt_names=names,
        conj_s=tuple(conj_s),
    )
    return QuotientData(
        source=L,
        normal_subgroup=PartialNormalSubgroup(locality=L, members=mem),
        cosets=tuple(maximal),
        quotient=quot,
        projection=proj,
    )


# ---------------------------------------------------------------------------
# restrictions and K-normalizer localities


def restriction(L: Locality, delta_sub: Iterable[int]) -> Locality:
    """The restriction of L to a smaller object set."""
    sub = frozenset(delta_sub)
    if not sub:
        raise NotClosed("empty object set")
    if not sub <= L.delta:
        raise NotClosed("object set not contained in Delta")
    subgroups = set(L.s_group.subgroup_masks())
    for P in sub:
        for Q in subgroups:
            if P & Q == P and Q not in sub:
                raise NotClosed("not closed under overgroups")
        for f in range(L.size):
            if L.s_of(f) & P == P:
                img = L.conj_mask(P, f)
                if img is not None and img not in sub:
                    raise NotClosed("not closed under conjugation")

    carrier = [f for f in range(L.size) if L.s_of(f) in sub]
    pos = {f: i for i, f in enumerate(carrier)}
    n = len(carrier)
    inv = tuple(pos[L.inv[f]] for f in carrier)
    prod2: dict[tuple[int, int], int] = {}
    for ia, fa in enumerate(carrier):
        for ib, fb in enumerate(carrier):
            if (fa, fb) in L.prod2 and L.s_of_word((fa, fb)) in sub:
                prod2[(ia, ib)] = pos[L.prod2[(fa, fb)]]
    conj_s = []
    for f in carrier:
        cmap = {}
        for i, j in L.conj_s[f].items():
            if L.s_of_word((L.inv[f], L.s_ids[i], f)) in sub:
                cmap[i] = j
        conj_s.append(cmap)
    names = tuple(L.element_label(f) for f in carrier)
    return Locality(
        size=n,
        inv=inv,
        prod2=prod2,
        s_ids=tuple(pos[x] for x in L.s_ids),
        s_group=L.s_group,
        delta=sub,
        p=L.p,
        label=f"{L.label}|restricted",
        elt_names=names,
        conj_s=tuple(conj_s),
        source_group=L.source_group,
        source_ids=tuple(L.source_ids[f] for f in carrier)
        if L.source_ids is not None
        else None,
    )


def k_normalizer_locality(
    L: Locality,
    q_mask: int,
    kset: frozenset,
    gamma: Iterable[int],
) -> tuple[Locality, tuple[int, ...]]:
    """The locality N_L^K(Q)|_Gamma plus the inclusion into L.

    ``gamma`` is given as masks over L's S-group, each a subgroup of
    N_S^K(Q); the returned locality's own S-group is N_S^K(Q) realized as a
    group, with objects translated into its coordinates.
    """
    F = L.fusion_system()
    if not F.is_fully_k_normalized(q_mask, kset):
        raise NotFullyKNormalized(L.s_group.subgroup_label(q_mask))
    t_mask = F.k_normalizer_mask(q_mask, kset)
    gamma = frozenset(gamma)
    if not gamma:
        raise ObjectSetMismatch("empty object set")
    t_subgroups = set(L.s_group.subgroups_of(t_mask))
    for P in gamma:
        if P not in t_subgroups:
            raise ObjectSetMismatch("object not a subgroup of N_S^K(Q)")
        for R in t_subgroups:
            if P & R == P and R not in gamma:
                raise ObjectSetMismatch("object set not closed under overgroups")
        PQ = L.s_group.closure_mask(P | q_mask)
        if PQ not in L.delta:
            raise ObjectSetMismatch(
                f"PQ not an object of L: {L.s_group.subgroup_label(PQ)}"
            )

    def in_carrier(f: int) -> bool:
        if L.conj_mask(q_mask, f) != q_mask:
            return False
        # c_f restricted to Q, as an automorphism tuple in s-index coordinates
        tup = tuple(L.conj_s[f][i] for i in bits(q_mask))
        return tup in kset

    carrier = []
    for f in range(L.size):
        if not in_carrier(f):
            continue
        if (L.s_of(f) & t_mask) in gamma:
            carrier.append(f)
    pos = {f: i for i, f in enumerate(carrier)}
    n = len(carrier)
    inv = tuple(pos[L.inv[f]] for f in carrier)
    prod2 = {}
    for ia, fa in enumerate(carrier):
        for ib, fb in enumerate(carrier):
            if (fa, fb) not in L.prod2:
                continue
            if (L.s_of_word((fa, fb)) & t_mask) in gamma:
                target = L.prod2[(fa, fb)]
                if target not in pos:
                    raise VerificationFailed(
                        "restricted product leaves N_L^K(Q)|_Gamma"
                    )
                prod2[(ia, ib)] = pos[target]

    # realize T = N_S^K(Q) as the new S-group
    t_real = L.s_group.as_group(t_mask)
    t_elems = L.s_group.mask_elements(t_mask)
    new_s_ids = tuple(pos[L.s_ids[i]] for i in t_elems)
    delta_new = frozenset(t_real.mask_from_parent(P) for P in gamma)
    conj_s = []
    for f in carrier:
        cmap = {}
        for ti, i in enumerate(t_elems):
            j = L.conj_s[f].get(i)
            if j is None or not ((t_mask >> j) & 1):
                continue
            word_mask = L.s_of_word((L.inv[f], L.s_ids[i], f))
            if (word_mask & t_mask) in gamma:
                cmap[ti] = t_elems.index(j)
        conj_s.append(cmap)
    names = tuple(L.element_label(f) for f in carrier)
    out = Locality(
        size=n,
        inv=inv,
        prod2=prod2,
        s_ids=new_s_ids,
        s_group=t_real.group,
        delta=delta_new,
        p=L.p,
        label=f"N^K_{L.label}({L.s_group.subgroup_label(q_mask)})",
        elt_names=names,
        conj_s=tuple(conj_s),
        source_group=L.source_group,
        source_ids=tuple(L.source_ids[f] for f in carrier)
        if L.source_ids is not None
        else None,
    )
    return out, tuple(carrier)


# ---------------------------------------------------------------------------
# transporter category


@dataclass(frozen=True)
class TransporterCategory:
    locality: Locality
    objects: tuple[int, ...]
    morphisms: tuple[tuple[int, int, int], ...]  # (f, src index, dst index)
    aut_orders: tuple[int, ...]
    rho_kernel_sizes: tuple[int, ...]
    epsilon_counts: tuple[int, ...]


def transporter_category(L: Locality) -> TransporterCategory:
    """The category with objects Delta and morphisms (f, P, Q), P^f <= Q."""
    objects = L.objects_sorted()
    obj_index = {P: i for i, P in enumerate(objects)}
    morphisms = []
    for f in range(L.size):
        sf = L.s_of(f)
        for P in objects:
            if sf & P != P:
                continue
            img = L.conj_mask(P, f)
            for Q in objects:
                if img & Q == img:
                    morphisms.append((f, obj_index[P], obj_index[Q]))
    morphisms.sort()
    aut_orders = []
    rho_kernels = []
    eps_counts = []
    s_set = set(L.s_ids)
    for i, P in enumerate(objects):
        auts = [m for m in morphisms if m[1] == i and m[2] == i]
        norm = L.normalizer_ids(P)
        if len(auts) != len(norm):
            raise VerificationFailed(
                f"Aut_T mismatch with N_L at {L.s_group.subgroup_label(P)}"
            )
        aut_orders.append(len(auts))
        cent = L.centralizer_ids(P)
        members = tuple(bits(P))
        kern = [
            f
            for (f, a, b) in auts
            if all(L.conj_s[f].get(j) == j for j in members)
        ]
        if set(kern) != set(cent):
            raise VerificationFailed("rho kernel differs from C_L(P)")
        rho_kernels.append(len(kern))
        eps_counts.append(sum(1 for (f, a, b) in morphisms if a == i and f in s_set))
    return TransporterCategory(
        locality=L,
        objects=objects,
        morphisms=tuple(morphisms),
        aut_orders=tuple(aut_orders),
        rho_kernel_sizes=tuple(rho_kernels),
        epsilon_counts=tuple(eps_counts),
    )


def transporter_to_json(tc: TransporterCategory) -> dict:
    L = tc.locality
    return {
        "objects": [
            {
                "index": i,
                "order": popcount(P),
                "label": L.s_group.subgroup_label(P),
                "aut_order": tc.aut_orders[i],
                "rho_kernel": tc.rho_kernel_sizes[i],
            }
            for i, P in enumerate(tc.objects)
        ],
        "morphisms": [
            {"f": f, "src": a, "dst": b} for (f, a, b) in tc.morphisms
        ],
        "aut_orders": {str(i): tc.aut_orders[i] for i in range(len(tc.objects))},
    }


def transporter_to_dot(tc: TransporterCategory, collapse: bool = False) -> str:
    L = tc.locality
    lines = ["digraph transporter {"]
    for i, P in enumerate(tc.objects):
        label = f"{L.s_group.subgroup_label(P)}\\norder {popcount(P)}"
        lines.append(f'  n{i} [label="{label}", shape=box];')
    if collapse:
        counts: dict[tuple[int, int], int] = {}
        for (f, a, b) in tc.morphisms:
            counts[(a, b)] = counts.get((a, b), 0) + 1
        for (a, b) in sorted(counts):
            lines.append(f'  n{a} -> n{b} [label="{counts[(a, b)]}"];')
    else:
        for (f, a, b) in tc.morphisms:
            lines.append(f'  n{a} -> n{b} [label="{L.element_label(f)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def locality_to_json(L: Locality) -> dict:
    return {
        "label": L.label,
        "carrier_size": L.size,
        "p": L.p,
        "identity": 0,
        "elements": [L.element_label(x) for x in range(L.size)],
        "inverse": list(L.inv),
        "s": list(L.s_ids),
        "delta": [
            {
                "order": popcount(P),
                "label": L.s_group.subgroup_label(P),
                "members": [L.s_ids[i] for i in bits(P)],
            }
            for P in L.objects_sorted()
        ],
        "products": sorted([a, b, c] for (a, b), c in L.prod2.items()),
    }
