"""Builtin group presets and the default verification corpus.

Builtins are stored as permutation generator presets (1-based cycles); the
multiplication tables are built on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CorpusLoadError
from .fusion import FusionSystem, fusion_from_group
from .groups import (
    FiniteGroup,
    RealizedSubgroup,
    Subgroup,
    group_from_permutations,
    p_part,
    sylow_p,
)

# name -> (degree, generators as cycle lists)
BUILTINS: dict[str, tuple[int, list]] = {
    "C1": (1, []),
    "C2": (2, [[[1, 2]]]),
    "C3": (3, [[[1, 2, 3]]]),
    "C4": (4, [[[1, 2, 3, 4]]]),
    "V4": (4, [[[1, 2], [3, 4]], [[1, 3], [2, 4]]]),
    "S3": (3, [[[1, 2, 3]], [[1, 2]]]),
    "S4": (4, [[[1, 2, 3, 4]], [[1, 2]]]),
    "A4": (4, [[[1, 2, 3]], [[2, 3, 4]]]),
    "A5": (5, [[[1, 2, 3, 4, 5]], [[1, 2, 3]]]),
    "D8": (4, [[[1, 2, 3, 4]], [[1, 3]]]),
    "Q8": (8, [[[1, 3, 2, 4], [5, 7, 6, 8]], [[1, 5, 2, 6], [3, 8, 4, 7]]]),
    "SL23": (8, [[[3, 4, 5], [6, 8, 7]], [[1, 3, 2, 6], [4, 5, 8, 7]]]),
    "C2xS4": (6, [[[1, 2]], [[3, 4, 5, 6]], [[3, 4]]]),
    "C2xA5": (7, [[[1, 2]], [[3, 4, 5, 6, 7]], [[3, 4, 5]]]),
    "C2xD8": (6, [[[1, 2]], [[3, 4, 5, 6]], [[3, 5]]]),
    "C2^3": (6, [[[1, 2]], [[3, 4]], [[5, 6]]]),
}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    prime: int
    source: str = "builtin"  # or a file path
    notes: str = ""
    allow_trivial_sylow: bool = False


DEFAULT_CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("S4", 2, notes="characteristic 2-type"),
    CorpusEntry("S4", 3),
    CorpusEntry("A4", 2),
    CorpusEntry("A4", 3),
    CorpusEntry("A5", 2),
    CorpusEntry("A5", 3),
    CorpusEntry("A5", 5),
    CorpusEntry("SL23", 2),
    CorpusEntry("SL23", 3, notes="nontrivial Theta at the Sylow 3-normalizer"),
    CorpusEntry("S3", 2),
    CorpusEntry("S3", 3),
    CorpusEntry("C2xA5", 2, notes="central C2 subcentric but outside Delta*"),
    CorpusEntry("C2xS4", 2, notes="central C2 in Delta but not quasicentric"),
    CorpusEntry("D8", 2),
    CorpusEntry("Q8", 2),
)


def builtin_group(name: str) -> FiniteGroup:
    preset = BUILTINS.get(name)
    if preset is None:
        raise CorpusLoadError(f"unknown builtin group {name!r}")
    degree, gens = preset
    return group_from_permutations(degree, gens, label=name)


@dataclass
class Instance:
    """One corpus instance: a group with a chosen prime, fully realized."""

    entry: CorpusEntry
    group: FiniteGroup
    prime: int
    sylow: Subgroup
    s_real: RealizedSubgroup
    fusion: FusionSystem

    @property
    def instance_id(self) -> str:
        return f"{self.entry.name}@p{self.prime}"


def build_instance(entry: CorpusEntry, group: Optional[FiniteGroup] = None) -> Instance:
    if group is None:
        if entry.source != "builtin":
            from .groups import load_group_file

            group = load_group_file(entry.source)
        else:
            group = builtin_group(entry.name)
    if p_part(group.order, entry.prime) == 1 and not entry.allow_trivial_sylow:
        raise CorpusLoadError(
            f"{entry.prime} does not divide |{entry.name}| = {group.order}"
        )
    S = sylow_p(group, entry.prime)
    real = group.as_group(S.mask)
    F = fusion_from_group(group, S, entry.prime, s_real=real)
    return Instance(
        entry=entry,
        group=group,
        prime=entry.prime,
        sylow=S,
        s_real=real,
        fusion=F,
    )
