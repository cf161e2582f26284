"""Command line front end: ``relhyp <command> ...``.

Every command prints a deterministic report and exits with 0 (pass or
computed), 2 (fail or violation), 3 (inconclusive within budget) or 1
(error).
"""

from __future__ import annotations

import argparse
import random
import sys
import warnings
from pathlib import Path as FsPath

from . import conditions as cond
from . import quasiconvexity as qcm
from .errors import (
    AreaCapExceeded,
    BudgetExceeded,
    EnumerationTruncated,
    ExplorationBudgetExceeded,
    GeodesicEnumerationTruncated,
    NotTrivialWithinBudget,
    NotWithinCap,
    RelHypError,
)
from .graphs import Cone, GraphOracle, Kind
from .paths import classify, decompose, lift, path_from_word, pi
from .report import Report
from .spec import load_group, load_subgroup
from .subgroups import fold, intersect, peripheral_family, reduce_Y, reduced_family

INCONCLUSIVE_ERRORS = (
    AreaCapExceeded,
    BudgetExceeded,
    EnumerationTruncated,
    ExplorationBudgetExceeded,
    GeodesicEnumerationTruncated,
    NotTrivialWithinBudget,
    NotWithinCap,
)


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("budgets must be non-negative")
    return v


def _ints(text):
    return [_nonneg(t) for t in text.split(",") if t]


def _budget_flags(p, radius=4, cap=None, truncation=None, seed=False):
    p.add_argument("--radius", type=_nonneg, default=radius)
    p.add_argument("--cap", type=_nonneg, default=cap)
    p.add_argument("--truncation", "-M", type=_nonneg, default=truncation, dest="truncation")
    if seed:
        p.add_argument("--seed", type=int, required=True)


def _graph(args, group, kind=None):
    kind = Kind(kind or args.graph)
    M = args.truncation if args.truncation is not None else max(args.radius, 1)
    return GraphOracle(group, kind, truncation=None if kind is Kind.PLAIN else M)


def _ser(group, g):
    return group.serialize(g)


def _path_text(oracle, p):
    labels = ".".join(oracle.serialize_label(l) for l in p.labels) or "1"
    return f"{oracle.serialize_vertex(p.start)}:{labels}"


def _subgroup(group, path):
    gens, Y = load_subgroup(group, path)
    return fold(group, gens), (Y or [])


# ---- group-level commands ------------------------------------------------------------------


def cmd_info(args, G):
    rep = Report("info")
    rep.add("backend", G.backend)
    rep.add("generators", [s.name for s in G.generators])
    for f in sorted(G.factors.values(), key=lambda f: f.id):
        order = "Z" if f.order is None else f.order
        rep.add(f"factor.{f.id}", f"order={order} peripheral={'yes' if f.peripheral else 'no'}")
    if G.backend == "presented":
        rep.add("relators", len(G.relators))
        rep.add("closed_relators", len(G.closed_relators))
    return rep


def cmd_reduce(args, G):
    rep = Report("reduce")
    g = G.element(args.word)
    rep.add("input", args.word)
    rep.add("normal_form", _ser(G, g) or "1")
    return rep


def cmd_dist(args, G):
    o = _graph(args, G)
    cap = args.cap if args.cap is not None else 4 * args.radius
    d = o.distance(G.element(args.u), G.element(args.v), cap)
    rep = Report("dist").budgets(cap=cap, truncation=o.truncation).add("graph", o.kind.value)
    if d is None:
        rep.verdict = "Inconclusive"
        rep.add("distance", f">{cap}")
    else:
        rep.add("distance", d)
    return rep


def cmd_geo(args, G):
    o = _graph(args, G)
    cap = args.cap if args.cap is not None else 4 * args.radius
    paths, truncated = o.geodesics(G.element(args.u), G.element(args.v), cap, args.max_count)
    rep = Report("geo").budgets(cap=cap, truncation=o.truncation, max_count=args.max_count)
    rep.add("graph", o.kind.value).add("length", len(paths[0])).add("count", len(paths)).add("truncated", truncated)
    for i, p in enumerate(paths):
        rep.add(f"geodesic.{i}", _path_text(o, p))
    if truncated:
        rep.verdict = "Inconclusive"
    return rep


def cmd_path(args, G):
    o = _graph(args, G)
    start = G.element(args.start)
    p = path_from_word(o, start, args.word)
    rep = Report(f"path.{args.action}").budgets(truncation=o.truncation).add("graph", o.kind.value)
    rep.add("path", _path_text(o, p))
    if args.action == "classify":
        c = classify(p, o)
        for k in ("is_cycle", "is_arc", "is_circuit", "locally_minimal", "backtracking_free"):
            rep.add(k, getattr(c, k))
    elif args.action == "decompose":
        d = decompose(p, o)
        for i, c in enumerate(d.components):
            iso = "isolated" if d.isolated(i) else "connected"
            rep.add(f"component.{i}", f"{c.factor} start={c.start} length={c.length} {iso}")
        rep.add("phase_positions", d.phase_positions)
        rep.add("connected", [f"{a}-{b}" for a, b in d.connected])
    elif args.action == "pi":
        coned = _graph(args, G, "coned")
        rep.add("pi", _path_text(coned, pi(p, coned)))
    else:
        coned = _graph(args, G, "coned")
        p = path_from_word(coned, start, args.word)
        rel = _graph(args, G, "relative")
        rep.add("lift", _path_text(rel, lift(p, coned)))
    return rep


# ---- subgroups -----------------------------------------------------------------------------


def cmd_subgroup(args, G):
    L, Y = _subgroup(G, args.subgroup)
    rep = Report(f"subgroup.{args.action}")
    if args.action == "fold":
        for i, line in enumerate(L.dump().splitlines()):
            rep.add(f"graph.{i}", line.replace("\t", " "))
        rep.add("generators", [_ser(G, g) for g in L.generators()] or "none")
    elif args.action == "contains":
        g = G.element(args.element)
        ok = L.contains(g)
        rep.add("element", _ser(G, g) or "1").add("contains", ok)
        rep.verdict = "Pass" if ok else "Fail"
    elif args.action == "intersect":
        if not args.other:
            raise RelHypError("intersect needs --other SUBGROUP")
        K, _ = _subgroup(G, args.other)
        I = intersect(L, K)
        rep.add("generators", [_ser(G, g) for g in I.generators()] or "none")
        rep.add("trivial", I.is_trivial())
    elif args.action == "peripherals":
        ys = reduce_Y(L, qcm._with_one(Y))
        fam = reduced_family(L, ys) if args.reduced else peripheral_family(L, list(ys))
        rep.add("Y", [_ser(G, y) or "1" for y in ys])
        rep.add("reduced", args.reduced)
        for inst in fam:
            rep.add(f"member.{inst.factor}@{inst.y_index}", f"y={_ser(G, inst.y) or '1'} finite={'yes' if inst.is_finite(G) else 'no'} K={_k(inst.intersection)}")
    else:
        ys = reduce_Y(L, Y)
        rep.add("input", [_ser(G, y) or "1" for y in Y])
        rep.add("reduced", [_ser(G, y) or "1" for y in ys])
    return rep


def _k(K):
    return ",".join(map(str, K)) if isinstance(K, list) else f"{K}Z"


# ---- conditions -----------------------------------------------------------------------------


def cmd_cond(args, G):
    a = args.action
    rep = Report(f"cond.{a}")
    if a == "b":
        L, _ = _subgroup(G, args.subgroup)
        y, y2 = G.element(args.y), G.element(args.y2)
        rep.add("pair", f"{_ser(G, y) or '1'},{_ser(G, y2) or '1'}")
        rep.add("factors", cond.condition_b(L, y, y2))
        rep.add("note", "finite for every pair because the factor family is finite")
    elif a == "decompose":
        r = cond.free_decomposition(G, args.circuit_bound, args.radius, args.truncation or 2)
        rep.budgets(circuit_bound=r.circuit_bound, radius=r.radius, truncation=r.truncation)
        o = GraphOracle(G, Kind.RELATIVE, truncation=r.truncation)
        rep.add("verified", sorted(r.verified_members))
        rep.add("excluded", sorted(r.excluded_members))
        rep.add("undetermined", sorted(r.undetermined))
        for fid in sorted(r.verified_members):
            rep.add(f"witness.{fid}", _path_text(o, r.verified_members[fid]))
        for fid in sorted(r.excluded_members):
            rep.add(f"certificate.{fid}", r.excluded_members[fid])
        if r.undetermined:
            rep.verdict = "Inconclusive"
    elif a == "fineness":
        radii = list(range(args.r_min, args.R + 1))
        s = cond.fineness_sample(G, args.edge, args.n, radii, args.truncation)
        o = GraphOracle(G, Kind.CONED, truncation=1)
        rep.budgets(n=args.n, R=args.R, r_min=args.r_min, truncation=args.truncation)
        rep.add("edge", o.serialize_edge(s.edge))
        for R, c in s.table:
            rep.add(f"count.R{R}", c)
        rep.add("stabilized", s.stabilized)
        rep.verdict = "Pass" if s.stabilized else "Fail"
    elif a == "embedded":
        Ms = args.truncations or [1, 2, 3, 4]
        growth = cond.embedded_growth(G, args.factor, args.n, args.radius, Ms)
        rep.budgets(n=args.n, radius=args.radius)
        for M, size in growth:
            rep.add(f"size.M{M}", size)
        last = cond.embedded_ball(G, args.factor, args.n, args.radius, Ms[-1])
        rep.add("elements", [_ser(G, h) for h in last] or "none")
        grows = len(growth) > 1 and growth[-1][1] > growth[-2][1]
        rep.add("grows", grows)
        rep.verdict = "Fail" if grows else "Pass"
    elif a == "bcp":
        M = args.truncation if args.truncation is not None else 8
        rel = GraphOracle(G, Kind.RELATIVE, truncation=M)
        plain = GraphOracle(G, Kind.PLAIN)
        pairs = [(path_from_word(rel, (), p), path_from_word(rel, (), q)) for p, q in args.pair]
        cap = args.cap if args.cap is not None else 20
        r = cond.bcp_harness(pairs, args.mu, args.C, rel, plain, cap, args.bound)
        rep.budgets(cap=cap, truncation=M, mu=args.mu, C=args.C, bound=args.bound)
        rep.add("checked", r.checked)
        for idx, why in r.rejected:
            rep.add(f"rejected.{idx}", why)
        for idx, (i, j), d in r.depths:
            rep.add(f"depth.{idx}.{i}-{j}", "unknown" if d is None else d)
        rep.add("max_depth", r.max_depth)
        if r.violations:
            rep.verdict = "Fail"
        elif args.bound is not None:
            rep.verdict = "Pass"
    elif a == "delta":
        o = _graph(args, G)
        d = cond.slim_triangle_delta(o, args.radius, args.trials, args.seed)
        rep.budgets(radius=args.radius, trials=args.trials, seed=args.seed, truncation=o.truncation)
        rep.add("graph", o.kind.value).add("delta", d)
    elif a == "area":
        r = cond.area(G, args.word, args.area_cap)
        rep.budgets(area_cap=args.area_cap)
        rep.add("word", G.serialize_word(r.word) or "1").add("area", r.area)
        for i, (f, R) in enumerate(r.certificate):
            rep.add(f"certificate.{i}", f"{G.serialize_word(f) or '1'} | {G.serialize_word(R)}")
    else:
        table, rows = cond.dehn_table(G, args.n, args.area_cap, args.truncation)
        rep.budgets(n=args.n, area_cap=args.area_cap, truncation=args.truncation)
        for n in sorted(table):
            rep.add(f"max_area.n{n}", table[n])
        rep.add("trivial_words", len(rows))
    return rep


# ---- quasiconvexity ------------------------------------------------------------------------------


def cmd_qc(args, G):
    a = args.action
    L, Y = _subgroup(G, args.subgroup)
    rep = Report(f"qc.{a}")
    R, M = args.radius, args.truncation
    rep.stamp["radius"] = R
    if a == "check":
        r = qcm.quasiconvex(L, Y, R, mode=args.mode, truncation=M)
        rep.budgets(radius=R, truncation=r.truncation)
        _qc_rows(rep, G, r)
    elif a == "strong":
        o = GraphOracle(G, Kind.RELATIVE, truncation=M or R)
        ball = sorted((g for g in o.distances_from((), R) if not isinstance(g, Cone)), key=G.element_key)
        rng = random.Random(args.seed)
        samples = sorted(rng.sample(ball, min(args.samples, len(ball))), key=G.element_key)
        r = qcm.strong_check(L, samples)
        rep.budgets(radius=R, seed=args.seed, samples=len(samples))
        rep.add("strong", r.strong)
        for g, fid in r.infinite:
            rep.add(f"infinite.{_ser(G, g) or '1'}@{fid}", "infinite")
        for g, fid, K in r.exceptional:
            rep.add(f"finite.{_ser(G, g) or '1'}@{fid}", _k(K))
        rep.verdict = "Pass" if r.strong else "Fail"
    elif a == "distortion":
        p = qcm.distortion_profile(L, L.generators(), Y, R, M)
        rep.budgets(radius=R, truncation=p.truncation)
        rep.add("samples", len(p.samples))
        rep.add("fit.outer_vs_inner", f"slope={p.slope:.6f} intercept={p.intercept:.6f} residual={p.residual:.6f}")
        rep.add("fit.inner_vs_outer", f"slope={p.inverse_slope:.6f} intercept={p.inverse_intercept:.6f} residual={p.inverse_residual:.6f}")
        rep.add("lipschitz", p.lipschitz).add("lipschitz_holds", p.lipschitz_holds)
        if not p.lipschitz_holds:
            rep.verdict = "Fail"
    elif a == "induce":
        st = qcm.induced_structure(L, Y, reduced=not args.unreduced, truncation=M or 4)
        rep.budgets(truncation=st.truncation)
        _induced_rows(rep, G, st)
    elif a == "iota":
        st = qcm.induced_structure(L, Y, reduced=not args.unreduced, truncation=M or 4)
        r = qcm.iota_check(st, R)
        rep.budgets(radius=R, truncation=st.truncation)
        _induced_rows(rep, G, st)
        rep.add("ball_vertices", r.vertices).add("injective", r.injective)
        rep.add("circuits", r.circuits).add("bound_violations", len(r.bound_violations))
        rep.add("non_circuits", len(r.non_circuits))
        for k in sorted(r.cone_edge_circuits):
            rep.add(f"circuits_through.{k}", r.cone_edge_circuits[k])
        rep.verdict = "Pass" if r.ok else "Fail"
    else:
        c = qcm.rel0hyp_certify(L, R, M)
        rep.budgets(radius=R, truncation=c.qc.truncation)
        rep.add("S", [_ser(G, s) for s in c.S] or "none")
        rep.add("image_edges", c.image_edges).add("image_is_forest", c.image_is_forest)
        rep.add("generated", c.generated)
        _qc_rows(rep, G, c.qc)
        rep.verdict = "Pass" if c.ok else "Fail"
    return rep


def _qc_rows(rep, G, r):
    rep.add("Y", [_ser(G, y) or "1" for y in r.Y])
    rep.add("mode", "all geodesics" if r.mode == "all" else "first geodesic (heuristic)")
    rep.add("pairs_checked", r.pairs_checked)
    for y in sorted(r.coverage, key=G.element_key):
        rep.add(f"coverage.{_ser(G, y) or '1'}", r.coverage[y])
    for (y, y2), fids in r.condition_b:
        rep.add(f"condition_b.{_ser(G, y) or '1'}|{_ser(G, y2) or '1'}", fids or "none")
    rep.verdict = r.verdict
    if r.verdict == "Fail":
        o = GraphOracle(G, Kind.RELATIVE, truncation=r.truncation)
        rep.add("geodesic", _path_text(o, r.geodesic))
        rep.add("vertex", _ser(G, r.vertex) or "1")
        rep.stamp["witness"] = _ser(G, r.vertex) or "1"


def _induced_rows(rep, G, st):
    rep.add("Y", [_ser(G, y) or "1" for y in st.Y])
    rep.add("S", [_ser(G, s) for s in st.S] or "none")
    rep.add("reduced", st.reduced)
    for i, inst in enumerate(st.family):
        rep.add(f"member.{i}", f"{inst.factor} y={_ser(G, inst.y) or '1'} K={_k(inst.intersection)}")
    rep.add("infinite_members", len(st.infinite))


# ---- parser --------------------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="relhyp", description="Experiments with relatively hyperbolic groups.")
    ap.add_argument("--out", help="write the report here as well as to stdout")
    ap.add_argument("--explain", action="store_true", help="human-readable rendering")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info")
    p.add_argument("group")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("reduce")
    p.add_argument("group")
    p.add_argument("word")
    p.set_defaults(func=cmd_reduce)

    for name, func in (("dist", cmd_dist), ("geo", cmd_geo)):
        p = sub.add_parser(name)
        p.add_argument("group")
        p.add_argument("u")
        p.add_argument("v")
        p.add_argument("--graph", choices=[k.value for k in Kind], default="relative")
        _budget_flags(p)
        if name == "geo":
            p.add_argument("--max-count", type=_nonneg, default=100)
        p.set_defaults(func=func)

    p = sub.add_parser("path")
    p.add_argument("action", choices=["classify", "decompose", "pi", "lift"])
    p.add_argument("group")
    p.add_argument("word", help="edge tokens joined by '.', e.g. A:1.b or ~A:1")
    p.add_argument("--start", default="1")
    p.add_argument("--graph", choices=[k.value for k in Kind], default="relative")
    _budget_flags(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("subgroup")
    p.add_argument("action", choices=["fold", "contains", "intersect", "peripherals", "reduce-y"])
    p.add_argument("group")
    p.add_argument("subgroup")
    p.add_argument("--element", default="1")
    p.add_argument("--other")
    p.add_argument("--reduced", action="store_true")
    p.set_defaults(func=cmd_subgroup)

    p = sub.add_parser("cond")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("b")
    c.add_argument("group")
    c.add_argument("subgroup")
    c.add_argument("y")
    c.add_argument("y2")
    c = csub.add_parser("decompose")
    c.add_argument("group")
    c.add_argument("--circuit-bound", type=_nonneg, default=4)
    _budget_flags(c, radius=4)
    c = csub.add_parser("fineness")
    c.add_argument("group")
    c.add_argument("--edge", required=True, help="g~F for the cone-edge [g, v(gF)], or g>label")
    c.add_argument("-n", type=_nonneg, default=6)
    c.add_argument("-R", type=_nonneg, default=8)
    c.add_argument("--r-min", type=_nonneg, default=2)
    c.add_argument("--truncation", "-M", type=_nonneg, default=None)
    c = csub.add_parser("embedded")
    c.add_argument("group")
    c.add_argument("--factor", required=True)
    c.add_argument("-n", type=_nonneg, default=3)
    c.add_argument("--radius", type=_nonneg, default=3)
    c.add_argument("--truncations", type=_ints, default=None, help="comma-separated M values")
    c = csub.add_parser("bcp")
    c.add_argument("group")
    c.add_argument("--pair", nargs=2, action="append", required=True, metavar=("P", "Q"))
    c.add_argument("--mu", type=float, default=1.0)
    c.add_argument("--C", type=float, default=0.0)
    c.add_argument("--bound", type=_nonneg, default=None)
    _budget_flags(c)
    c = csub.add_parser("delta")
    c.add_argument("group")
    c.add_argument("--graph", choices=[k.value for k in Kind], default="plain")
    c.add_argument("--trials", type=_nonneg, default=20)
    _budget_flags(c, seed=True)
    c = csub.add_parser("area")
    c.add_argument("group")
    c.add_argument("word")
    c.add_argument("--area-cap", type=_nonneg, default=6)
    c = csub.add_parser("dehn")
    c.add_argument("group")
    c.add_argument("-n", type=_nonneg, default=4)
    c.add_argument("--area-cap", type=_nonneg, default=8)
    c.add_argument("--truncation", "-M", type=_nonneg, default=None)
    p.set_defaults(func=cmd_cond)

    p = sub.add_parser("qc")
    qsub = p.add_subparsers(dest="action", required=True)
    for name in ("check", "strong", "distortion", "induce", "iota", "tree-certify"):
        q = qsub.add_parser(name)
        q.add_argument("group")
        q.add_argument("subgroup")
        _budget_flags(q, radius=6, seed=(name == "strong"))
        if name == "check":
            q.add_argument("--mode", choices=["all", "first"], default="all")
        if name == "strong":
            q.add_argument("--samples", type=_nonneg, default=10)
        if name in ("induce", "iota"):
            q.add_argument("--unreduced", action="store_true")
    p.set_defaults(func=cmd_qc)
    return ap


BUDGET_FLAGS = ("radius", "cap", "truncation", "seed", "area_cap", "n", "circuit_bound")


def run(argv=None):
    """Parse, dispatch and return ``(exit status, report text)``."""
    ap = build_parser()
    args = ap.parse_args(argv)
    warnings.simplefilter("ignore")
    try:
        G = load_group(args.group)
        rep = args.func(args, G)
    except INCONCLUSIVE_ERRORS as e:
        rep = Report(_op_name(args), "Inconclusive")
        rep.budgets(**{k: getattr(args, k, None) for k in BUDGET_FLAGS})
        rep.add("reason", f"{type(e).__name__}: {e}")
    except (RelHypError, OSError, KeyError, ValueError) as e:
        return 1, f"ERROR\t{type(e).__name__}: {e}\n"
    text = rep.explain() if args.explain else rep.render()
    return rep.exit_code, text


def _op_name(args):
    action = getattr(args, "action", None)
    return args.command if action is None else f"{args.command}.{action}"


def main(argv=None):
    args = sys.argv[1:] if argv is None else argv
    code, text = run(args)
    out = sys.stdout if code != 1 else sys.stderr
    out.write(text)
    ns, _ = build_parser().parse_known_args(args)
    if ns.out and code != 1:
        FsPath(ns.out).write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
