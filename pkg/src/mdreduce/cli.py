"""Command-line entry point: ``mdreduce <group> <action> [options]``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import formats, games, instances, reduction, solvers, valuations
from .errors import DocumentError, MDReduceError
from .formats import Document, ODPInstance, ReductionBundle
from .itemsets import members

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _items(text: str) -> frozenset:
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated item indices, got {text!r}") from None


def _parse_cnf(text: str) -> tuple[list[list[int]], int | None]:
    """Clauses from a DIMACS file path or an inline JSON clause list."""
    if os.path.exists(text):
        clauses, cur, nvars = [], [], None
        with open(text, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("c"):
                    continue
                if line.startswith("p"):
                    nvars = int(line.split()[2])
                    continue
                for tok in line.split():
                    lit = int(tok)
                    if lit == 0:
                        clauses.append(cur)
                        cur = []
                    else:
                        cur.append(lit)
        if cur:
            clauses.append(cur)
        return clauses, nvars
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InputError("--cnf must be a DIMACS file or a JSON list of clauses") from None
    if not isinstance(data, list) or not all(isinstance(c, list) for c in data):
        raise InputError("--cnf must be a list of clauses")
    return data, None


def _emit(args, kind: str, payload) -> None:
    doc = Document(kind, payload)
    if args.output:
        formats.write_document(args.output, doc)
    else:
        sys.stdout.write(formats.save_document(doc).decode("utf-8"))


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(args, *kinds: str):
    doc = formats.read_document(args.input, args.cap)
    if doc.kind not in kinds:
        raise InputError(f"expected a {' or '.join(kinds)} document, got {doc.kind}")
    return doc


def _sadp_of(doc):
    return doc.payload.instance if doc.kind == "reduction" else doc.payload


# -- handlers ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "appendix-c":
        _emit(args, "valuation", instances.appendix_counterexample())
        return EXIT_OK
    if args.m is None:
        raise InputError(f"gen {args.family} needs --m")
    fam = instances.boxs_family(args.m)
    if args.family == "boxs":
        if args.perturb is None:
            _emit(args, "valuation", fam.base)
        else:
            _emit(args, "odp-instance", ODPInstance(fam.base, instances.perturb(fam, _items(args.perturb))))
        return EXIT_OK
    if args.cnf is None:
        raise InputError("gen sat needs --cnf")
    clauses, nvars = _parse_cnf(args.cnf)
    if args.nvars is not None:
        nvars = args.nvars
    if nvars is None:
        nvars = max((abs(lit) for c in clauses for lit in c), default=0)
    _emit(args, "odp-instance", ODPInstance(fam.base, instances.sat_perturbed_valuation(fam, clauses, nvars)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    pair = _read(args, "odp-instance").payload
    if args.construction == "it":
        inst = reduction.build_IT(pair.v, pair.w, args.k)
        wt = reduction.witness_for_IT(pair.v, pair.w, args.k, args.cap)
    else:
        inst = reduction.build_VT(pair.v, pair.w, args.k)
        wt = None
    rep = reduction.reduction_report(inst, wt, args.cap)
    _note(f"k={inst.k} items={inst.ground_size} d={rep.balancedness} C={rep.C}")
    _emit(args, "reduction", ReductionBundle(inst, wt, rep))
    return EXIT_OK


def cmd_recover(args) -> int:
    inst = _sadp_of(_read(args, "reduction", "sadp-instance"))
    if inst.construction.lower() != args.construction:
        raise InputError(f"instance was built by {inst.construction}, not {args.construction.upper()}")
    a, achieved = reduction.recover(_items(args.solution), inst)
    _note(f"recovered {list(members(a))} with v - w = {achieved}")
    _emit(args, "result", {"op": "recover", "set": a, "achieved": achieved})
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.what == "class":
        v = _read(args, "valuation").payload
        rep = valuations.check_properties(v, args.cap)
        flags = {
            "normalized": rep.normalized,
            "monotone": rep.monotone,
            "submodular": rep.submodular,
            "no-trivial-items": not rep.trivial_items,
        }
        required = args.require.split(",") if args.require else ["normalized", "monotone"]
        unknown = [r for r in required if r not in flags]
        if unknown:
            raise InputError(f"unknown property {unknown[0]!r}; choose from {sorted(flags)}")
        ok = all(flags[r] for r in required)
        _emit(args, "result", {"op": "verify-class", "ok": ok, **flags, "trivial_items": list(rep.trivial_items)})
        return EXIT_OK if ok else EXIT_FAIL
    doc = _read(args, "reduction")
    bundle: ReductionBundle = doc.payload
    inst = bundle.instance
    if args.what == "compat":
        wt = bundle.witness
        if args.witness:
            wdoc = formats.read_document(args.witness, args.cap)
            if wdoc.kind != "witness":
                raise InputError(f"expected a witness document, got {wdoc.kind}")
            wt = wdoc.payload
        if wt is None:
            raise InputError("no compatibility witness supplied")
        res = reduction.check_C_compatibility(inst, wt, args.cap)
        _note("compatible" if res.ok else f"violation {res.violation}: {res.detail}")
        _emit(args, "result", {"op": "verify-compat", "ok": res.ok, "violation": repr(res.violation) if res.violation else None})
        return EXIT_OK if res.ok else EXIT_FAIL
    d = reduction.balancedness(inst, args.cap)
    if inst.construction == reduction.IT:
        limit = 2 * inst.m * inst.source_w.full_value()
    else:
        limit = 2 * inst.source_v.full_value()
    ok = d <= limit
    _note(f"d = {d}, limit {limit}")
    _emit(args, "result", {"op": "verify-balance", "ok": ok, "d": d, "limit": limit})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_solve(args) -> int:
    if args.problem == "odp":
        pair = _read(args, "odp-instance").payload
        s, val = solvers.brute_force_odp(pair.v, pair.w, args.cap)
        _note(f"optimum {val} at {list(members(s))}")
        _emit(args, "result", {"op": "solve-odp", "set": s, "value": val})
    elif args.problem == "sadp":
        inst = _sadp_of(_read(args, "reduction", "sadp-instance"))
        s, j = solvers.brute_force_sadp(inst, args.cap)
        ev = solvers.sadp_eval(inst, s, args.cap)
        _note(f"pair {j}: set {list(members(s))}, gap {ev.gaps[j - 1]}")
        _emit(args, "result", {"op": "solve-sadp", "set": s, "index": j, "gaps": list(ev.gaps)})
    else:
        dist = _read(args, "distribution").payload
        menu, rev = solvers.lp_optimal_mdmdp(dist, exact=not args.float, cap=args.cap)
        _, triv = solvers.trivial_bundle_menu(dist)
        _note(f"revenue {rev} (trivial bundle {triv})")
        payload = {"op": "solve-mdmdp", "revenue": rev, "trivial_revenue": triv, "menu": formats.encode_payload("menu", menu)}
        _emit(args, "result", payload)
    return EXIT_OK


def cmd_game(args) -> int:
    fam = instances.boxs_family(args.m)
    alg = games.BUILTIN_ALGORITHMS[args.algorithm]()
    run = games.run_value_game if args.game == "value" else games.run_demand_game
    t = run(alg, fam, args.budget, args.trials, args.seed)
    bound = "n/a" if t.bound is None else f"{t.bound} ({float(t.bound):.4f})"
    _note(f"{t.game} game, {t.algorithm}: {t.successes}/{t.trials} = {t.success_rate:.4f}, bound {bound}")
    _emit(args, "transcript", t)
    return EXIT_OK


def cmd_params(args) -> int:
    if args.what == "quality":
        if args.alpha is None or args.d is None or args.k is None:
            raise InputError("params quality needs --alpha, --d and --k")
        print(reduction.quality_formula(Fraction(args.alpha), Fraction(args.d), args.k))
        return EXIT_OK
    if args.m is None or (args.eps is None and args.k is None):
        raise InputError("params budget needs --m and either --eps or --k")
    b = reduction.hardness_budget(args.m, Fraction(args.eps) if args.eps is not None else None, k=args.k)
    print(f"k={b.k} items={b.items} support={b.support} bound={b.bound}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None, help="enumeration cap (overrides MDD_ENUM_CAP)")
    common.add_argument("--output", "-o", default=None, help="write the document here instead of stdout")

    p = argparse.ArgumentParser(prog="mdreduce", description="ODP/SADP/MDMDP reduction toolkit")
    sub = p.add_subparsers(dest="group", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate instances")
    g.add_argument("family", choices=["boxs", "sat", "appendix-c"])
    g.add_argument("--m", type=int)
    g.add_argument("--perturb", help="comma-separated perturbing set; emits an (base, perturbed) ODP pair")
    g.add_argument("--cnf", help="DIMACS file or JSON clause list")
    g.add_argument("--nvars", type=int)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", parents=[common], help="build an SADP instance from an ODP pair")
    r.add_argument("construction", choices=["it", "vt"])
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--input", required=True)
    r.set_defaults(func=cmd_reduce)

    rc = sub.add_parser("recover", parents=[common], help="map an SADP answer back to an ODP answer")
    rc.add_argument("construction", choices=["it", "vt"])
    rc.add_argument("--input", required=True)
    rc.add_argument("--solution", required=True, help="comma-separated items of the SADP ground")
    rc.set_defaults(func=cmd_recover)

    v = sub.add_parser("verify", parents=[common], help="check compatibility, balance or class membership")
    v.add_argument("what", choices=["compat", "balance", "class"])
    v.add_argument("--input", required=True)
    v.add_argument("--witness", help="witness document overriding the one in the reduction")
    v.add_argument("--require", help="for class: comma-separated properties to enforce")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", parents=[common], help="exact desk-scale solvers")
    s.add_argument("problem", choices=["odp", "sadp", "mdmdp"])
    s.add_argument("--input", required=True)
    s.add_argument("--float", action="store_true", help="use the floating-point LP path")
    s.set_defaults(func=cmd_solve)

    gm = sub.add_parser("game", parents=[common], help="hidden-perturbation oracle game")
    gm.add_argument("game", choices=["value", "demand"])
    gm.add_argument("--m", type=int, required=True)
    gm.add_argument("--budget", type=int, required=True)
    gm.add_argument("--trials", type=int, required=True)
    gm.add_argument("--seed", type=int, default=0)
    gm.add_argument("--algorithm", choices=sorted(games.BUILTIN_ALGORITHMS), default="random-prober")
    gm.set_defaults(func=cmd_game)

    pr = sub.add_parser("params", parents=[common], help="parameter formulas")
    pr.add_argument("what", choices=["quality", "budget"])
    pr.add_argument("--alpha")
    pr.add_argument("--d")
    pr.add_argument("--k", type=int)
    pr.add_argument("--m", type=int)
    pr.add_argument("--eps")
    pr.set_defaults(func=cmd_params)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DocumentError, MDReduceError, ValueError, ZeroDivisionError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
