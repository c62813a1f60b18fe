"""Command-line front end.

Exit codes: 0 ok, 1 input error, 2 verification or expectation failure,
3 iteration or closure cap exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import batteries
from .classify import (
    DEFAULT_CLOSURE_CAP,
    DEFAULT_ITER_CAP,
    Elliptic,
    FiniteSubgroupCert,
    OracleElliptic,
    OracleTranslation,
    Translation,
    classify_element,
    classify_subgroup,
    oracle_classify,
    order_of,
    verify_witness,
)
from .element import Element
from .errors import AAutError, IterationCapExceeded, SizeCapExceeded
from .partition import RegularPartition, apply_element
from .randgen import random_element, random_torsion
from .tree import Ball, End, parse_shape, spherical_partition

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3


class CapExhausted(Exception):
    def __init__(self, payload):
        super().__init__(payload.get("error", "cap exhausted"))
        self.payload = payload


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _load_element(src: str, args) -> Element:
    shape = args.shape
    if args.inline:
        return Element.parse(src, shape)
    try:
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise AAutError(f"cannot read {src}: {exc.strerror}") from None
    return Element.parse(text, shape)


def _emit_element(g: Element, args):
    if args.json:
        print(_dump({"element": g.serialize()}))
    else:
        sys.stdout.write(g.serialize())


# -- verdicts ------------------------------------------------------------------


def element_verdict(g: Element, iter_cap: int, check: bool = False, oracle_cap=None) -> dict:
    res = classify_element(g, iter_cap)
    out = res.to_json()
    if check or oracle_cap:
        checks = []
        if isinstance(res, Translation):
            w = verify_witness(res)
            checks.append({"name": "verify_witness", "pass": w.ok, "reason": w.reason})
        else:
            checks.append({"name": "in_stab", "pass": g.in_stab(res.invariant_partition)})
            checks.append({"name": "order", "pass": g.power(res.order).is_identity})
        if oracle_cap:
            orc = oracle_classify(g, oracle_cap)
            if isinstance(orc, OracleElliptic):
                ok = isinstance(res, Elliptic) and res.order == orc.order
                checks.append({"name": "oracle", "pass": ok, "oracle": {"class": "elliptic", "order": orc.order}})
            elif isinstance(orc, OracleTranslation):
                ok = isinstance(res, Translation)
                checks.append({"name": "oracle", "pass": ok,
                               "oracle": {"class": "translation", "power": orc.power, "ball": str(orc.ball)}})
            else:
                checks.append({"name": "oracle", "pass": True, "oracle": {"class": "unknown", "cap": oracle_cap}})
        out["checks"] = checks
    return out


def subgroup_verdict(gens, iter_cap: int, closure_cap: int, check: bool = False) -> dict:
    res = classify_subgroup(gens, iter_cap, closure_cap)
    out = res.to_json()
    if isinstance(res, FiniteSubgroupCert):
        if res.cap_exceeded:
            raise CapExhausted({"error": "closure_cap_exceeded", "cap": closure_cap, "verdict": out})
        out["class"] = "finite"
    if check:
        if isinstance(res, Translation):
            w = verify_witness(res)
            out["checks"] = [{"name": "verify_witness", "pass": w.ok, "reason": w.reason}]
        else:
            out["checks"] = [{"name": f"in_stab[{i}]", "pass": g.in_stab(res.base_partition)}
                             for i, g in enumerate(gens)]
    return out


def _checks_pass(out: dict) -> bool:
    return all(c["pass"] for c in out.get("checks", ()))


# -- commands ------------------------------------------------------------------


def cmd_classify(args):
    g = _load_element(args.source, args)
    out = element_verdict(g, args.iter_cap, args.check, args.oracle_cap)
    print(_dump(out))
    return EXIT_OK if _checks_pass(out) else EXIT_VERIFY


def cmd_subgroup(args):
    gens = [_load_element(s, args) for s in args.sources]
    out = subgroup_verdict(gens, args.iter_cap, args.closure_cap, args.check)
    print(_dump(out))
    return EXIT_OK if _checks_pass(out) else EXIT_VERIFY


def cmd_compose(args):
    elems = [_load_element(s, args) for s in args.sources]
    acc = elems[-1]
    for g in reversed(elems[:-1]):
        acc = g.compose(acc)
    _emit_element(acc, args)
    return EXIT_OK


def cmd_invert(args):
    _emit_element(_load_element(args.source, args).inverse(), args)
    return EXIT_OK


def cmd_apply(args):
    g = _load_element(args.source, args)
    target = args.target.strip()
    if "(" in target:
        res = str(g.apply_to_end(End.parse(target, g.shape)))
    elif "," in target:
        res = str(apply_element(g, RegularPartition.parse(target, g.shape)))
    else:
        res = str(g(Ball.parse(target, g.shape)))
    print(_dump({"image": res}) if args.json else res)
    return EXIT_OK


def cmd_order(args):
    order = order_of(_load_element(args.source, args), args.iter_cap)
    text = "infinite" if order == float("inf") else order
    print(_dump({"order": text}) if args.json else text)
    return EXIT_OK


def cmd_random(args):
    if args.shape is None:
        raise AAutError("random needs --shape")
    seed = 0 if args.seed is None else args.seed
    make = random_torsion if args.torsion else random_element
    _emit_element(make(args.shape, args.leaves, seed), args)
    return EXIT_OK


def cmd_spherical(args):
    if args.shape is None:
        raise AAutError("spherical needs --shape")
    p = spherical_partition(args.shape, args.level)
    print(_dump({"partition": [str(b) for b in p]}) if args.json else str(p))
    return EXIT_OK


def cmd_verify(args):
    seed = 0 if args.seed is None else args.seed
    suite = args.suite
    if suite == "identity":
        checks = batteries.identity_battery(seed, args.count or 1000, args.shape)
    elif suite == "tran-branch":
        checks = batteries.tran_branch_battery(seed, args.count or 50, args.shape)
    elif suite == "rightmost":
        checks = batteries.rightmost_battery(args.shape)
    else:
        checks = batteries.triples_battery(seed, args.count or 100, args.shape)
    ok = all(c["pass"] for c in checks)
    report = {"suite": suite, "seed": seed, "passed": sum(c["pass"] for c in checks),
              "total": len(checks), "ok": ok, "checks": checks}
    if args.json:
        print(_dump(report))
    else:
        for c in checks:
            print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}")
            if not c["pass"]:
                print("  replay: " + _dump(c.get("instance")))
        print(f"{report['passed']}/{report['total']} passed")
    return EXIT_OK if ok else EXIT_VERIFY


# -- corpus --------------------------------------------------------------------


def load_corpus(path: str):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data["entries"] if isinstance(data, dict) else data
    seen = set()
    for e in entries:
        if e["id"] in seen:
            raise AAutError(f"duplicate corpus id {e['id']!r}")
        seen.add(e["id"])
    return entries


def _entry_elements(entry, base_dir):
    shape = parse_shape(entry["shape"]) if "shape" in entry else None
    out = []
    for text in entry["elements"]:
        if text.endswith(".aaut"):
            with open(os.path.join(base_dir, text), encoding="utf-8") as fh:
                text = fh.read()
        out.append(Element.parse(text, shape))
    return out


def run_entry(entry, base_dir, iter_cap, closure_cap) -> dict:
    rec = {"id": entry["id"]}
    try:
        elems = _entry_elements(entry, base_dir)
        if entry.get("kind", "element") == "element":
            if len(elems) != 1:
                raise AAutError("element entries take exactly one element")
            verdict = element_verdict(elems[0], iter_cap)
        else:
            verdict = subgroup_verdict(elems, iter_cap, closure_cap)
    except CapExhausted as exc:
        rec["error"] = exc.payload
        rec["status"] = "cap"
        return rec
    except (IterationCapExceeded, SizeCapExceeded) as exc:
        rec["error"] = {"error": type(exc).__name__, "message": str(exc)}
        rec["status"] = "cap"
        return rec
    except (AAutError, KeyError, OSError) as exc:
        rec["error"] = {"error": type(exc).__name__, "message": str(exc)}
        rec["status"] = "error"
        return rec
    rec["verdict"] = verdict
    expected = entry.get("expected")
    if expected is not None:
        bad = sorted(k for k, v in expected.items() if verdict.get(k) != v)
        rec["status"] = "mismatch" if bad else "match"
        if bad:
            rec["mismatches"] = {k: {"expected": expected[k], "got": verdict.get(k)} for k in bad}
    else:
        rec["status"] = "ok"
    return rec


def cmd_corpus(args):
    entries = load_corpus(args.corpus)
    base_dir = os.path.dirname(os.path.abspath(args.corpus))
    run = lambda e: run_entry(e, base_dir, args.iter_cap, args.closure_cap)  # noqa: E731
    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            results = list(pool.map(run, entries))
    else:
        results = [run(e) for e in entries]
    statuses = {r["status"] for r in results}
    print(_dump({"results": results, "count": len(results),
                 "mismatches": sum(r["status"] == "mismatch" for r in results)}))
    if "mismatch" in statuses:
        return EXIT_VERIFY
    if "cap" in statuses:
        return EXIT_CAP
    if "error" in statuses:
        return EXIT_INPUT
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _add_common(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    p.add_argument("--seed", type=int, default=d(None))
    p.add_argument("--iter-cap", type=int, default=d(DEFAULT_ITER_CAP))
    p.add_argument("--closure-cap", type=int, default=d(DEFAULT_CLOSURE_CAP))
    p.add_argument("--oracle-cap", type=int, default=d(None))
    p.add_argument("--shape", type=parse_shape, default=d(None), help="tree shape as d,k")
    p.add_argument("--inline", action="store_true", default=d(False),
                   help="element arguments are element text (lines may be separated by ';')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aaut", description="Almost automorphisms of regular trees.")
    _add_common(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="elliptic/translation verdict")
    p.add_argument("source")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("subgroup", parents=[common], help="finite/translation verdict for generators")
    p.add_argument("sources", nargs="+")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_subgroup)

    p = sub.add_parser("compose", parents=[common], help="product g1 o g2 o ...")
    p.add_argument("sources", nargs="+")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("invert", parents=[common])
    p.add_argument("source")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("apply", parents=[common], help="image of a ball, partition or end")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("order", parents=[common])
    p.add_argument("source")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("verify", parents=[common], help="run a verification battery")
    p.add_argument("suite", choices=["identity", "tran-branch", "rightmost", "triples"])
    p.add_argument("--count", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", parents=[common], help="seeded random element")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--torsion", action="store_true", help="random permutation of a random partition")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("corpus", parents=[common], help="batch classification")
    p.add_argument("corpus")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("spherical", parents=[common], help="the level-n spherical partition")
    p.add_argument("level", type=int)
    p.set_defaults(func=cmd_spherical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExhausted as exc:
        print(_dump(exc.payload))
        return EXIT_CAP
    except (IterationCapExceeded, SizeCapExceeded) as exc:
        print(_dump({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_CAP
    except (AAutError, json.JSONDecodeError, KeyError, OSError) as exc:
        print(f"aaut: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
