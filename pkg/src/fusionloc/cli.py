"""Command-line interface.

Commands:
  classify       per-subgroup classification report for a group's fusion system
  build          build a locality, verify it, export locality/transporter data
  verify         run the whole check matrix over the corpus
  list-builtins  show available builtin groups

Exit codes: 0 success, 2 verification failure, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .constructions import delta_sets, nontrivial, theta_quotient
from .corpus import BUILTINS, builtin_group
from .errors import FusionlocError, ParseError, VerificationFailed
from .fusion import fusion_from_group
from .groups import (
    FiniteGroup,
    Subgroup,
    load_group_file,
    perm_from_cycles,
    popcount,
    sylow_p,
)
from .locality import (
    locality_to_json,
    locality_from_group,
    transporter_category,
    transporter_to_dot,
    transporter_to_json,
    verify_locality,
)
from .verifier import run_corpus, run_locality_checks

EXIT_OK = 0
EXIT_VERIFICATION = 2
EXIT_INPUT = 3


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_group(args) -> FiniteGroup:
    if args.builtin is not None:
        return builtin_group(args.builtin)
    if args.file is not None:
        return load_group_file(args.file)
    raise ParseError("either --builtin or --file is required")


def _classification_report(G: FiniteGroup, p: int) -> dict:
    S = sylow_p(G, p)
    real = G.as_group(S.mask)
    F = fusion_from_group(G, S, p, s_real=real)
    base = real.group
    table = F.classification_table()
    ds = delta_sets(G, S, p, s_real=real, fusion=F)
    class_id = {}
    classes_json = []
    for i, data in enumerate(F.classes()):
        for P in data.members:
            class_id[P] = i
        classes_json.append(
            {
                "id": i,
                "representative": base.subgroup_label(data.representative),
                "size": len(data.members),
                "member_orders": sorted(popcount(P) for P in data.members),
            }
        )
    records = []
    for P in sorted(F.subgroups(), key=lambda m: (-popcount(m), m)):
        c = table[P]
        records.append(
            {
                "order": popcount(P),
                "mask": P,
                "generators": [
                    base.element_label(g) for g in base.mask_generators(P)
                ],
                "class": class_id[P],
                "centric": c.centric,
                "quasicentric": c.quasicentric,
                "subcentric": c.subcentric,
                "radical": c.radical,
                "centric_radical": c.centric_radical,
                "normal": c.normal,
                "central": c.central,
                "fully_normalized": c.fully_normalized,
                "fully_centralized": c.fully_centralized,
                "in_delta": P in ds.delta,
                "in_delta_star": P in ds.delta_star,
            }
        )
    return {
        "group": G.label,
        "order": G.order,
        "prime": p,
        "sylow_order": S.order,
        "saturated": F.is_saturated(),
        "classes": classes_json,
        "subgroups": records,
    }


def cmd_classify(args) -> int:
    G = _load_group(args)
    report = _classification_report(G, args.prime)
    text = _dump(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _object_masks(args, G: FiniteGroup, S: Subgroup, real) -> frozenset[int]:
    base = real.group
    choice = args.objects
    if choice == "all":
        masks = frozenset(m for m in base.subgroup_masks() if m != 1)
        return masks if masks else frozenset({1})
    if choice in ("delta", "delta-star"):
        ds = delta_sets(G, S, args.prime, s_real=real)
        masks = ds.delta if choice == "delta" else ds.delta_star
        return nontrivial(masks)
    F = fusion_from_group(G, S, args.prime, s_real=real)
    table = F.classification_table()
    if choice == "centric":
        return frozenset(P for P in F.subgroups() if table[P].centric)
    if choice == "subcentric":
        return frozenset(P for P in F.subgroups() if table[P].subcentric)
    raise ParseError(f"unknown object set {choice!r}")


def cmd_build(args) -> int:
    G = _load_group(args)
    S = sylow_p(G, args.prime)
    real = G.as_group(S.mask)
    if args.quotient_theta and args.objects != "delta-star":
        raise ParseError("--quotient-theta requires --objects delta-star")
    if args.quotient_theta:
        td = theta_quotient(G, S, args.prime)
        if td.findings:
            sys.stderr.write("\n".join(td.findings) + "\n")
            return EXIT_VERIFICATION
        L = td.quotient
    else:
        gamma = _object_masks(args, G, S, real)
        L = locality_from_group(G, S, gamma, args.prime, s_real=real)

    axioms = verify_locality(L)
    checks = run_locality_checks(L, subject=f"{G.label}@p{args.prime}")
    failures = [c for c in checks if c.status == "fail"]
    payload = {
        "locality": locality_to_json(L),
        "axioms": [
            {"name": c.name, "passed": c.passed, "witness": c.witness}
            for c in axioms.checks
        ],
        "checks": [r.as_json() for r in checks],
    }
    tc = transporter_category(L)
    if args.export == "json":
        payload["transporter"] = transporter_to_json(tc)
    dot = transporter_to_dot(tc, collapse=args.collapse) if args.export == "dot" else None

    if args.out:
        with open(args.out + ".locality.json", "w", encoding="utf-8") as fh:
            fh.write(_dump(payload))
        if dot is not None:
            with open(args.out + ".transporter.dot", "w", encoding="utf-8") as fh:
                fh.write(dot)
        if not axioms.ok or failures:
            with open(args.out + ".witnesses.json", "w", encoding="utf-8") as fh:
                fh.write(
                    _dump(
                        {
                            "axioms": [
                                {"name": c.name, "witness": c.witness}
                                for c in axioms.failures()
                            ],
                            "checks": [r.as_json() for r in failures],
                        }
                    )
                )
    else:
        if dot is not None:
            payload["transporter_dot"] = dot
        sys.stdout.write(_dump(payload))
    if not axioms.ok or failures:
        return EXIT_VERIFICATION
    return EXIT_OK


def _load_supplied_subsystems(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read subsystem file {path}: {exc}") from exc
    out: dict[str, list[tuple[int, str]]] = {}
    for instance_id, entries in raw.items():
        name = instance_id.split("@")[0]
        G = builtin_group(name)
        if G.perm_rep is None:
            raise ParseError("subsystem input needs a permutation group")
        degree, perms = G.perm_rep
        index = {perm: i for i, perm in enumerate(perms)}
        lst = []
        for spec in entries:
            gens = 0
            for cycles in spec["normal"]:
                perm = perm_from_cycles(cycles, degree)
                if perm not in index:
                    raise ParseError("generator not an element of the group")
                gens |= 1 << index[perm]
            n_mask = G.closure_mask(gens | 1)
            lst.append((n_mask, spec["kind"]))
        out[instance_id] = lst
    return out


def cmd_verify(args) -> int:
    supplied = _load_supplied_subsystems(args.subsystems) if args.subsystems else None
    report = run_corpus(
        only=args.only,
        fail_fast=args.fail_fast,
        supplied_subsystems=supplied,
    )
    sys.stdout.write(report.to_table())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(_dump(report.to_json_dict()))
    return EXIT_VERIFICATION if report.failures else EXIT_OK


def cmd_list_builtins(_args) -> int:
    for name in sorted(BUILTINS):
        degree, gens = BUILTINS[name]
        sys.stdout.write(f"{name}: degree {degree}, {len(gens)} generators\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusionloc",
        description="Fusion systems and localities over finite p-groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_group_args(p):
        p.add_argument("--builtin", help="builtin group name")
        p.add_argument("--file", help="group JSON file")
        p.add_argument("--prime", type=int, required=True)

    c = sub.add_parser("classify", help="classification report for F_S(G)")
    add_group_args(c)
    c.add_argument("--out", help="write the JSON report to a file")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("build", help="build and verify a locality")
    add_group_args(b)
    b.add_argument(
        "--objects",
        choices=["all", "delta", "delta-star", "centric", "subcentric"],
        default="all",
    )
    b.add_argument("--quotient-theta", action="store_true")
    b.add_argument("--export", choices=["dot", "json"])
    b.add_argument("--collapse", action="store_true", help="collapse parallel edges in DOT")
    b.add_argument("--out", help="output path prefix")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run the corpus check matrix")
    v.add_argument("--json", help="write the JSON report to a file")
    v.add_argument("--only", help="glob filter on check ids")
    v.add_argument("--fail-fast", action="store_true")
    v.add_argument("--subsystems", help="JSON file of supplied index subsystems")
    v.set_defaults(func=cmd_verify)

    lb = sub.add_parser("list-builtins", help="list builtin groups")
    lb.set_defaults(func=cmd_list_builtins)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FusionlocError) as exc:
        if isinstance(exc, VerificationFailed):
            sys.stderr.write(f"verification failed: {exc}\n")
            return EXIT_VERIFICATION
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
