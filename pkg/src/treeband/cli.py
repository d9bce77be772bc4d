"""Command-line front end.  Every verb wraps one library operation chain and
emits a versioned, deterministic JSON document (or plain text with -f text).

Exit codes: 0 success, 2 for "no"/"reject" decisions, 1 for errors.
"""

import argparse
import json
import os
import random
import sys

from . import coloring, decompositions, layouts, obstructions, searchgame, solver, spqr
from .exceptions import TreebandError
from .graphs import FamilySpec, Graph, generate_family, parse_graph, serialize_graph

SCHEMA = "treeband/1"


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_graph(path):
    return parse_graph(_read(path))


def _layout_doc(t):
    if t.root is None:
        return {"root": None, "parent": {}}
    return {"root": t.root, "parent": {str(c): p for c, p in sorted(t.parent.items())}}


def _layout_from_doc(doc):
    from .layouts import TreeLayout

    if doc["root"] is None:
        return TreeLayout(None, {})
    return TreeLayout(doc["root"], {int(c): p for c, p in doc["parent"].items()})


def _decomposition_doc(d):
    return {
        "bags": [sorted(b) for b in d.bags],
        "edges": [list(e) for e in sorted(d.edges)],
        "width": d.width(),
    }


def _emit(doc, fmt, code=0):
    doc = {"schema": SCHEMA, **doc}
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        for key, value in sorted(doc.items()):
            print("%s: %s" % (key, value))
    return code


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="treeband",
        description="Tree-layouts and treebandwidth: exact solvers, folding, obstructions.",
    )
    parser.add_argument("-f", "--format", choices=["json", "text"], default="json")
    parser.add_argument("--threads", type=int, default=1, help="accepted for compatibility; current operations are single-threaded")
    parser.add_argument("--max-states", type=int, default=solver.DEFAULT_STATE_BUDGET)
    parser.add_argument("--max-n", type=int, default=None, help="override exact-solver size limits")
    sub = parser.add_subparsers(dest="group", required=True)

    tbw = sub.add_parser("tbw").add_subparsers(dest="verb", required=True)
    p = tbw.add_parser("exact")
    p.add_argument("graph")
    p = tbw.add_parser("decide")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("graph")
    p = tbw.add_parser("approx")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("graph")

    obstruct = sub.add_parser("obstruct").add_subparsers(dest="verb", required=True)
    p = obstruct.add_parser("fan")
    p.add_argument("graph")
    p = obstruct.add_parser("dipole")
    p.add_argument("graph")

    decomp = sub.add_parser("decomp").add_subparsers(dest="verb", required=True)
    p = decomp.add_parser("validate")
    p.add_argument("--td", required=True, help="decomposition file")
    p.add_argument("-k", type=int, default=None)
    p.add_argument("graph")
    for verb in ("fold-fan", "fold-dipole"):
        p = decomp.add_parser(verb)
        p.add_argument("--td", default=None, help="decomposition file (default: exact provider)")
        p.add_argument("graph")
    p = decomp.add_parser("overlap")
    p.add_argument("--td", required=True)
    p.add_argument("graph")

    spqr_group = sub.add_parser("spqr").add_subparsers(dest="verb", required=True)
    p = spqr_group.add_parser("build")
    p.add_argument("graph")
    p = spqr_group.add_parser("gem")
    p.add_argument("graph")
    p = spqr_group.add_parser("planar-check")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("graph")
    p = spqr_group.add_parser("planar-layout")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("graph")

    color = sub.add_parser("color").add_subparsers(dest="verb", required=True)
    p = color.add_parser("pcentered")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("graph")
    p = color.add_parser("verify")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("graph")

    game = sub.add_parser("game").add_subparsers(dest="verb", required=True)
    p = game.add_parser("simulate")
    p.add_argument("--layout", required=True)
    p.add_argument("graph")
    p = game.add_parser("rebuild")
    p.add_argument("--trace", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("graph")

    params = sub.add_parser("params").add_subparsers(dest="verb", required=True)
    p = params.add_parser("exact")
    p.add_argument(
        "--which",
        required=True,
        choices=["treewidth", "treedepth", "bandwidth", "treebandwidth-bruteforce"],
    )
    p.add_argument("graph")

    verify = sub.add_parser("verify", help="re-check an emitted result document")
    verify.add_argument("--result", required=True, help="result JSON file")
    verify.add_argument("graph")

    gen = sub.add_parser("gen").add_subparsers(dest="verb", required=True)
    p = gen.add_parser("family")
    p.add_argument("kind")
    p.add_argument("params", nargs="*", type=int)
    p = gen.add_parser("random")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--edge-prob", type=float, default=0.3)

    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return _dispatch(args)
    except TreebandError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, args.format)
        return 1


def _dispatch(args):
    fmt = args.format
    group, verb = args.group, getattr(args, "verb", None)

    if group == "tbw":
        g = _load_graph(args.graph)
        if verb == "exact":
            value, layout = solver.exact_treebandwidth(g, budget=args.max_states)
            return _emit({"treebandwidth": value, "layout": _layout_doc(layout)}, fmt)
        if verb == "decide":
            ok, layout = solver.decide_treebandwidth(g, args.k, budget=args.max_states)
            if ok:
                return _emit({"answer": "yes", "k": args.k, "layout": _layout_doc(layout)}, fmt)
            return _emit({"answer": "no", "k": args.k}, fmt, code=2)
        if verb == "approx":
            res = solver.approximate_treebandwidth(g, args.k)
            if res.accepted:
                return _emit(
                    {
                        "answer": "layout",
                        "k": args.k,
                        "bandwidth": res.bandwidth,
                        "layout": _layout_doc(res.layout),
                    },
                    fmt,
                )
            return _emit(
                {"answer": "reject", "reason": res.reject_reason, "witness": res.witness, "k": args.k},
                fmt,
                code=2,
            )

    if group == "obstruct":
        g = _load_graph(args.graph)
        if verb == "fan":
            return _emit({"fan_number": obstructions.fan_number(g)}, fmt)
        if verb == "dipole":
            return _emit({"dipole_number": obstructions.dipole_number(g)}, fmt)

    if group == "decomp":
        g = _load_graph(args.graph)
        if verb == "validate":
            d = decompositions.parse_decomposition(_read(args.td))
            report = decompositions.validate_decomposition(g, d, k=args.k)
            results = {
                prop: {"ok": ok, "witness": _jsonable(wit)}
                for prop, (ok, wit) in sorted(report.results.items())
            }
            code = 0 if report.ok() else 2
            return _emit({"properties": results, "width": d.width()}, fmt, code=code)
        if verb in ("fold-fan", "fold-dipole"):
            if args.td:
                d = decompositions.parse_decomposition(_read(args.td))
            else:
                d = decompositions.exact_tree_decomposition(g)
            d = decompositions.enforce_wellformed(g, d)
            if verb == "fold-fan":
                from .folding import fold_fan, vertex_subtree_diameters

                params = decompositions.measure_fan_parameters(g, d)
                folded = fold_fan(g, d, params)
                dias = vertex_subtree_diameters(folded)
                return _emit(
                    {
                        "parameters": list(params),
                        "decomposition": _decomposition_doc(folded),
                        "max_vertex_diameter": max(dias.values(), default=0),
                        "diameter_bound": 6 * params[2] * params[0],
                    },
                    fmt,
                )
            from .folding import fold_dipole

            params = decompositions.measure_dipole_parameters(g, d)
            folded = fold_dipole(g, d, params)
            return _emit(
                {
                    "parameters": list(params),
                    "decomposition": _decomposition_doc(folded),
                    "overlap": decompositions.overlap_number(folded),
                },
                fmt,
            )
        if verb == "overlap":
            d = decompositions.parse_decomposition(_read(args.td))
            return _emit({"overlap": decompositions.overlap_number(d)}, fmt)

    if group == "spqr":
        g = _load_graph(args.graph)
        if verb == "build":
            tree = spqr.build_spqr(g)
            return _emit({"spqr": spqr.serialize_spqr(tree)}, fmt)
        if verb == "gem":
            ok, witness = spqr.gem_free_check(g)
            return _emit({"gem_free": ok, "witness": _jsonable(witness)}, fmt, code=0 if ok else 2)
        if verb == "planar-check":
            ok, witness = spqr.planar_fan_conditions(g, args.k)
            return _emit({"conditions": ok, "witness": _jsonable(witness)}, fmt, code=0 if ok else 2)
        if verb == "planar-layout":
            layout = spqr.planar_layout_construct(g, args.k)
            bw = layouts.bandwidth_of_layout(g, layout)
            return _emit({"bandwidth": bw, "layout": _layout_doc(layout)}, fmt)

    if group == "color":
        g = _load_graph(args.graph)
        if verb == "pcentered":
            t = layouts.parse_layout(_read(args.layout))
            col = coloring.pcentered_from_layout(g, t, args.p)
            return _emit(
                {
                    "palette": col.palette_size,
                    "colours": {str(v): c for v, c in sorted(col.colour.items())},
                },
                fmt,
            )
        if verb == "verify":
            col = coloring.parse_colouring(_read(args.colouring))
            ok, witness = coloring.verify_pcentered(g, col, args.p)
            return _emit({"p_centered": ok, "witness": _jsonable(witness)}, fmt, code=0 if ok else 2)

    if group == "game":
        g = _load_graph(args.graph)
        if verb == "simulate":
            t = layouts.parse_layout(_read(args.layout))
            trace = searchgame.strategy_from_layout(g, t)
            return _emit(
                {
                    "max_occupation": trace.max_occupation,
                    "trace": searchgame.serialize_trace(trace),
                },
                fmt,
            )
        if verb == "rebuild":
            trace = searchgame.parse_trace(_read(args.trace))
            layout = searchgame.layout_from_strategy(g, trace, args.bound)
            bw = layouts.bandwidth_of_layout(g, layout)
            return _emit({"bandwidth": bw, "layout": _layout_doc(layout)}, fmt)

    if group == "params":
        g = _load_graph(args.graph)
        value, _cert = obstructions.exact_parameter(g, args.which)
        return _emit({args.which: value}, fmt)

    if group == "verify":
        return _verify(args)

    if group == "gen":
        seed = os.environ.get("TREEBAND_SEED")
        rng = random.Random(int(seed) if seed is not None else 0)
        if verb == "family":
            g = generate_family(FamilySpec(args.kind, tuple(args.params)))
            sys.stdout.write(serialize_graph(g))
            return 0
        if verb == "random":
            n = args.n
            edges = [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if rng.random() < args.edge_prob
            ]
            sys.stdout.write(serialize_graph(Graph(n, edges)))
            return 0

    raise TreebandError("unhandled command")


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(x) for x in obj]
    return str(obj)


def _verify(args):
    """Independently re-check an emitted witness/layout/decomposition/colouring."""
    g = _load_graph(args.graph)
    doc = json.loads(_read(args.result))
    fmt = args.format
    checks = {}
    if "layout" in doc:
        t = _layout_from_doc(doc["layout"])
        report = layouts.validate_layout(g, t)
        checks["layout_valid"] = report.ok
        if report.ok:
            bw = layouts.bandwidth_of_layout(g, t)
            checks["bandwidth"] = bw
            if "bandwidth" in doc:
                checks["bandwidth_matches"] = bw == doc["bandwidth"]
            if "treebandwidth" in doc:
                checks["bandwidth_matches"] = bw == doc["treebandwidth"]
            if doc.get("answer") == "yes" and "k" in doc:
                checks["within_k"] = bw <= doc["k"]
    if "decomposition" in doc:
        d = decompositions.TreeDecomposition(
            [frozenset(b) for b in doc["decomposition"]["bags"]],
            [tuple(e) for e in doc["decomposition"]["edges"]],
        )
        report = decompositions.validate_decomposition(g, d)
        checks["decomposition_valid"] = report.ok("T1", "T2")
        checks["width"] = d.width()
        if "overlap" in doc:
            checks["overlap_matches"] = decompositions.overlap_number(d) == doc["overlap"]
    if "colours" in doc:
        col = coloring.Colouring({int(v): c for v, c in doc["colours"].items()}, doc["palette"])
        p = doc.get("p", 1)
        ok, _wit = coloring.verify_pcentered(g, col, p)
        checks["colouring_p_centered"] = ok
    if doc.get("answer") == "reject":
        witness = doc.get("witness") or {}
        if doc.get("reason") == "fan":
            hub = witness["hub"]
            branch_sets = [tuple(s) for s in witness["branch_sets"]]
            rest = [w for w in range(g.n) if w != hub]
            sub, order = g.subgraph(rest)
            index = {w: i for i, w in enumerate(order)}
            local = [tuple(index[v] for v in s) for s in branch_sets]
            u = [index[w] for w in g.adjacency[hub]]
            from .obstructions import _verify_path_minor_model

            checks["fan_witness_valid"] = _verify_path_minor_model(sub, u, local) and len(
                branch_sets
            ) >= witness["spine"]
        elif doc.get("reason") == "dipole":
            u, v = witness["poles"]
            checks["dipole_witness_valid"] = (
                obstructions.internally_disjoint_paths(g, u, v) >= witness["threshold"]
            )
        elif doc.get("reason") == "treewidth":
            if "treewidth" in witness:
                value, _ = obstructions.exact_parameter(g, "treewidth")
                checks["treewidth_witness_valid"] = value == witness["treewidth"] and value > witness["k"]
            else:
                checks["treewidth_witness_valid"] = witness["degeneracy"] > witness["k"]
    ok = all(v for v in checks.values() if isinstance(v, bool))
    return _emit({"verified": ok, "checks": _jsonable(checks)}, fmt, code=0 if ok else 2)


if __name__ == "__main__":
    sys.exit(main())
