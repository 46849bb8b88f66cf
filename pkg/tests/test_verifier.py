"""Theory verifier: check matrix, mutation sensitivity, determinism."""

from __future__ import annotations

import json

import pytest

from fusionloc.corpus import DEFAULT_CORPUS, CorpusEntry, build_instance, builtin_group
from fusionloc.fusion import FusionSystem
from fusionloc.groups import popcount
from fusionloc.verifier import (
    CorpusReport,
    check_index_subsystem,
    fusion_wellformed_witness,
    mutate_fusion,
    mutate_locality,
    mutation_detected_fusion,
    mutation_detected_locality,
    run_corpus,
    run_fusion_checks,
    run_instance_checks,
    run_locality_checks,
)


def test_fusion_checks_pass_s4(corpus):
    inst = corpus.instance("S4", 2)
    res = run_fusion_checks(inst.fusion, inst.instance_id)
    assert all(r.status != "fail" for r in res)
    assert any(r.check_id == "inclusion-chain" for r in res)


def test_fusion_checks_trivial_p_group(corpus):
    inst = corpus.instance("D8", 2)
    res = run_fusion_checks(inst.fusion, inst.instance_id)
    assert all(r.status != "fail" for r in res)


def test_locality_checks_pass(corpus):
    L = corpus.locality_all("S4", 2)
    res = run_locality_checks(L, "S4@p2/L-all")
    fails = [r for r in res if r.status == "fail"]
    assert not fails, fails


def test_fail_carries_witness_and_skip_carries_reason(corpus):
    inst = corpus.instance("S4", 2)
    res = run_fusion_checks(inst.fusion, inst.instance_id)
    for r in res:
        if r.status == "fail":
            assert r.witness
        if r.status == "skipped":
            assert r.reason


def test_broken_fusion_detected(corpus):
    inst = corpus.instance("S4", 2)
    F = inst.fusion
    # remove one non-identity morphism
    P = max(F.maps_from)
    victim = next(m for m in sorted(F.maps_from[P]) if m != F.base.mask_elements(P))
    maps = dict(F.maps_from)
    maps[P] = frozenset(x for x in maps[P] if x != victim)
    broken = FusionSystem(F.base, F.carrier, F.p, maps, F.provenance, label="broken")
    assert fusion_wellformed_witness(broken) is not None
    res = run_fusion_checks(broken, "broken")
    fails = [r for r in res if r.status == "fail"]
    assert fails and all(r.witness for r in fails)


def test_mutation_sensitivity_sample(corpus):
    # fixed seed, 20 mutations per instance, 100% detection
    for name, prime in (("S4", 2), ("A5", 2), ("Q8", 2)):
        inst = corpus.instance(name, prime)
        L = corpus.locality_all(name, prime)
        for desc, mutated in mutate_fusion(inst.fusion, seed=99, count=10):
            assert mutation_detected_fusion(mutated), desc
        for desc, mutated in mutate_locality(L, seed=99, count=10):
            assert mutation_detected_locality(mutated), desc


def test_supplied_index_subsystems(corpus):
    # p-power index: A4 inside S4 at p = 2
    inst = corpus.instance("S4", 2)
    a4 = next(
        m for m in inst.group.normal_subgroup_masks() if popcount(m) == 12
    )
    r = check_index_subsystem(inst.fusion, a4, "p-power", inst.instance_id)
    assert r.status == "pass"
    # index prime to p: Q8 inside SL(2,3) at p = 2
    inst2 = corpus.instance("SL23", 2)
    q8 = next(
        m for m in inst2.group.normal_subgroup_masks() if popcount(m) == 8
    )
    r2 = check_index_subsystem(inst2.fusion, q8, "p-prime", inst2.instance_id)
    assert r2.status == "pass"
    # wrong kind is skipped with a reason
    r3 = check_index_subsystem(inst.fusion, a4, "p-prime", inst.instance_id)
    assert r3.status == "skipped" and r3.reason


def test_empty_corpus():
    report = run_corpus(entries=())
    assert report.results == ()
    assert not report.failures
    assert "empty corpus" in report.to_table()


def test_single_instance_deterministic(corpus):
    inst = build_instance(CorpusEntry("A4", 2))
    res1 = run_instance_checks(inst)
    inst2 = build_instance(CorpusEntry("A4", 2))
    res2 = run_instance_checks(inst2)
    assert [
        (r.check_id, r.subject, r.status, r.witness, r.reason) for r in res1
    ] == [(r.check_id, r.subject, r.status, r.witness, r.reason) for r in res2]


def test_only_filter():
    report = run_corpus(entries=(CorpusEntry("S3", 2),), only="inclusion-*")
    assert report.results
    assert all(r.check_id.startswith("inclusion-") for r in report.results)


def test_report_serialization_shape():
    report = run_corpus(entries=(CorpusEntry("S3", 3),))
    data = report.to_json_dict()
    assert set(data) == {"results", "failures", "checks"}
    for rec in data["results"]:
        assert {"check_id", "instance", "status"} <= set(rec)
        if rec["status"] == "fail":
            assert "witness" in rec
        if rec["status"] == "skipped":
            assert "reason" in rec
    text = report.to_table()
    assert "failures" in text
