"""Shared fixtures: corpus instances and heavy objects built once per session."""

from __future__ import annotations

import pytest

from fusionloc.constructions import delta_sets, theta_quotient
from fusionloc.corpus import DEFAULT_CORPUS, CorpusEntry, Instance, build_instance
from fusionloc.groups import FiniteGroup, sylow_p
from fusionloc.locality import locality_from_group
from fusionloc.constructions import nontrivial


class CorpusCache:
    def __init__(self) -> None:
        self._instances: dict[str, Instance] = {}
        self._localities = {}
        self._deltas = {}
        self._thetas = {}

    def instance(self, name: str, prime: int) -> Instance:
        key = f"{name}@p{prime}"
        if key not in self._instances:
            entry = next(
                (e for e in DEFAULT_CORPUS if e.name == name and e.prime == prime),
                CorpusEntry(name, prime),
            )
            self._instances[key] = build_instance(entry)
        return self._instances[key]

    def locality_all(self, name: str, prime: int):
        key = f"{name}@p{prime}"
        if key not in self._localities:
            inst = self.instance(name, prime)
            base = inst.s_real.group
            gamma = nontrivial(frozenset(base.subgroup_masks()))
            self._localities[key] = locality_from_group(
                inst.group, inst.sylow, gamma, prime,
                label=f"L_all({name})", s_real=inst.s_real,
            )
        return self._localities[key]

    def deltas(self, name: str, prime: int):
        key = f"{name}@p{prime}"
        if key not in self._deltas:
            inst = self.instance(name, prime)
            self._deltas[key] = delta_sets(
                inst.group, inst.sylow, prime, s_real=inst.s_real, fusion=inst.fusion
            )
        return self._deltas[key]

    def theta(self, name: str, prime: int):
        key = f"{name}@p{prime}"
        if key not in self._thetas:
            inst = self.instance(name, prime)
            self._thetas[key] = theta_quotient(
                inst.group, inst.sylow, prime, deltas=self.deltas(name, prime)
            )
        return self._thetas[key]


@pytest.fixture(scope="session")
def corpus() -> CorpusCache:
    return CorpusCache()
