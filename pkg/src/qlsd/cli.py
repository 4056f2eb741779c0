"""Command-line surface.

Every subcommand prints a one-line human summary to stdout and writes a
deterministic JSON report (sorted keys, exact scalar strings) when --out or
--report is given.  Exit codes: 0 success, 1 verification failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import builders, catalog, ordering, resources
from .irreducibility import gnps_evidence
from .model import Ket, Resource, StateSet, single_party_marginal, schmidt_rank
from .protocol import ProtocolTree, SequentialTask, run_exhaustive, run_sequential, validate
from . import model as _model


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        return


def _resolve_set(arg: str, m: int | None = None) -> StateSet:
    if os.path.exists(arg):
        with open(arg) as fh:
            return StateSet.from_json(json.load(fh))
    return catalog.build(arg, m=m)


def _resolve_protocol(arg: str, m: int | None = None) -> ProtocolTree:
    if os.path.exists(arg):
        with open(arg) as fh:
            return ProtocolTree.from_json(json.load(fh))
    return builders.build_protocol(arg, m=m)


def _resolve_resource(arg: str, alpha=None, beta=None) -> Resource:
    if os.path.exists(arg):
        with open(arg) as fh:
            return Resource.from_json(json.load(fh))
    kwargs = {}
    if alpha is not None:
        kwargs["alpha"] = alpha
    if beta is not None:
        kwargs["beta"] = beta
    return resources.build(arg, **kwargs)


def _resolve_state(arg: str) -> Ket:
    if os.path.exists(arg):
        with open(arg) as fh:
            return Ket.from_json(json.load(fh))
    return resources.build(arg).ket


def _fmt_success(report) -> str:
    if report.exact:
        return f"{report.success.format()} (exact)"
    return f"{float(report.success)!r} (float, tolerance {report.tolerance})"


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in catalog.catalog_names():
            print(name)
        return 0
    sset = catalog.build(args.name, m=args.m)
    _write_json(sset.to_json(), args.out)
    pairs = len(sset) * (len(sset) - 1) // 2
    print(f"{sset.name}: {len(sset)} states, {pairs} pairs, all orthogonal")
    return 0


def cmd_verify_orth(args) -> int:
    try:
        sset = _resolve_set(args.set)
    except ValueError as e:
        print(f"verification failed: {e}")
        return 1
    pairs = len(sset) * (len(sset) - 1) // 2
    print(f"{len(sset)} states, {pairs} pairs, all orthogonal")
    return 0


def cmd_protocol(args) -> int:
    if args.action == "build":
        tree = builders.build_protocol(args.name, m=args.m)
        _write_json(tree.to_json(), args.out)
        print(f"{tree.name}: set {tree.set_ref}, designated resource {tree.resource_ref}")
        return 0
    tree = _resolve_protocol(args.name, m=args.m)
    sset = _resolve_set(tree.set_ref)
    designated = _resolve_resource(tree.resource_ref)
    if args.action == "validate":
        report = validate(tree, sset, designated)
        _write_json(report.to_json(), args.out)
        if report.ok:
            print(f"{tree.name}: valid")
            return 0
        for issue in report.issues:
            print(f"{tree.name}: {issue.kind} at {'/'.join(issue.path) or '<root>'}: "
                  f"{issue.message}")
        return 1
    # run
    resource = designated
    if args.resource:
        resource = _resolve_resource(args.resource, args.alpha, args.beta)
    report = run_exhaustive(tree, sset, resource, designated=designated,
                            tol=args.precision)
    _write_json(report.to_json(), args.report)
    print(f"success probability = {_fmt_success(report)}")
    if not report.audit_passed:
        bad = [e for e in report.audit if not e.ok]
        print(f"orthogonality audit FAILED at {len(bad)} node(s), e.g. "
              f"{'/'.join(bad[0].path) or '<root>'} pair {bad[0].pair}")
    else:
        print(f"orthogonality audit passed at {len(report.audit)} nodes")
    return 0


def cmd_task(args) -> int:
    if os.path.exists(args.task):
        with open(args.task) as fh:
            task = SequentialTask.from_json(json.load(fh))
        sset = _resolve_set(task.set_ref)
        protos = [_resolve_protocol(p) for p in task.protocol_refs]
        desig = [_resolve_resource(p.resource_ref) for p in protos]
        resource = _resolve_resource(args.resource) if args.resource else None
        if resource is None:
            print("a resource is required for a task file", file=sys.stderr)
            return 2
    else:
        task, resource, protos, desig = ordering.shipped_sequential_task(args.task)
        sset = _resolve_set(task.set_ref)
        if args.resource:
            resource = _resolve_resource(args.resource)
    report = run_sequential(task, resource, protos, sset, desig, tol=args.precision)
    _write_json(report.to_json(), args.report)
    per_round = ", ".join(
        r.success.format() if r.exact else repr(float(r.success)) for r in report.rounds
    )
    total = report.success.format() if report.exact else repr(float(report.success))
    print(f"sequential success = {total} (rounds: {per_round})")
    return 0


def cmd_irreducible(args) -> int:
    sset = _resolve_set(args.set)
    report = gnps_evidence(sset, args.cuts)
    _write_json(report.to_json(), args.out)
    for e in report.entries:
        print(f"{e.cut.label()}: dimension {e.dimension} ({e.verdict})")
    return 0


def cmd_ordering(args) -> int:
    claim = ordering.ordering_report(args.claim, m=args.m)
    _write_json(claim.to_json(), args.out)
    rel = {"strict": ">", "weak": ">="}.get(claim.relation, claim.relation)
    print(f"{claim.left_resource} {rel} {claim.right_resource} "
          f"on task {claim.task.name}")
    for side, records in (("left", claim.left), ("right", claim.right)):
        for r in records:
            extra = f" p={r.probability}" if r.probability else ""
            print(f"  {side}: {r.kind}{extra}")
    return 0


def cmd_marginals(args) -> int:
    ket = _resolve_state(args.state)
    rho = single_party_marginal(ket, args.party)
    _write_json(rho.to_json(), args.out)
    print(f"marginal at {args.party}: {rho.rows}x{rho.cols}, "
          f"trace {rho.trace().re.format()}")
    return 0


def cmd_schmidt(args) -> int:
    ket = _resolve_state(args.state)
    left = args.cut.split("|")[0].split(",")
    left = [p for p in (s.strip() for s in left) if p]
    r = schmidt_rank(ket, left)
    print(f"schmidt rank across {args.cut}: {r}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qlsd",
        description="exact verification of assisted local state discrimination",
    )
    ap.add_argument("--precision", type=float, default=_model.TOLERANCE_DEFAULT,
                    help="tolerance for the floating fallback path (default 1e-9)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list or build the shipped state sets")
    p.add_argument("action", choices=["list", "build"])
    p.add_argument("name", nargs="?")
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify-orth", help="check pairwise orthogonality of a set")
    p.add_argument("set")
    p.set_defaults(func=cmd_verify_orth)

    p = sub.add_parser("protocol", help="build, validate or run a protocol tree")
    p.add_argument("action", choices=["build", "validate", "run"])
    p.add_argument("name")
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.add_argument("--resource")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--report")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("task", help="run a sequential task")
    p.add_argument("action", choices=["run-sequential"])
    p.add_argument("task")
    p.add_argument("--resource")
    p.add_argument("--report")
    p.set_defaults(func=cmd_task)

    p = sub.add_parser("irreducible", help="orthogonality-preserving-measurement check")
    p.add_argument("action", choices=["check"])
    p.add_argument("set")
    p.add_argument("--cuts", choices=["singles", "leave-one-out", "all"],
                   default="leave-one-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_irreducible)

    p = sub.add_parser("ordering", help="emit a provenance-typed ordering claim")
    p.add_argument("action", choices=["report"])
    p.add_argument("claim")
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ordering)

    p = sub.add_parser("marginals", help="single-party reduced state")
    p.add_argument("state")
    p.add_argument("--party", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_marginals)

    p = sub.add_parser("schmidt-rank", help="pure-state Schmidt rank across a cut")
    p.add_argument("state")
    p.add_argument("--cut", required=True, help='e.g. "P1|P2,P3"')
    p.set_defaults(func=cmd_schmidt)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    if args.command == "catalog" and args.action == "build" and not args.name:
        ap.error("catalog build needs a set name")
    try:
        return args.func(args)
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
