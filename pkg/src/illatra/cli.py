"""Command-line entry point.

Exit codes: 0 success, 1 rule errors or definite property violations,
2 undecided-only outcomes (budget or stage exhaustion), 3 usage or
parse errors.
"""

import argparse
import json
import sys

from . import terms as T
from . import parser as PR
from . import pred2 as P
from . import kripke as KR
from . import illative as IL
from . import translate as TR
from . import stage_omega as SO
from . import stage_kripke as SK
from .terms import Verdict

OK, FAIL, UNDECIDED, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(path):
    with open(path) as f:
        return json.load(f)


def _load_sig(path):
    obj = _load_json(path)
    bases = frozenset(obj.get("base_types", []))
    return KR.signature_from_json(obj, bases)


def _verdict_exit(v):
    if v is Verdict.TRUE:
        return OK
    if v is Verdict.UNKNOWN:
        return UNDECIDED
    return FAIL


# ---------------------------------------------------------------------------
# pred2

def cmd_pred2_check(args):
    sig = _load_sig(args.sig)
    d = P.derivation_from_json(_load_json(args.derivation), sig)
    mode = P.MODE_PREDW if args.predw else P.MODE_PRED2
    P.check_pred2_derivation(d, sig, classical=args.classical, mode=mode)
    print("ok: %s |- %s" % (", ".join(sorted(P.formula_str(h)
                                             for h in d.hyps)),
                            P.formula_str(d.concl)))
    return OK


# ---------------------------------------------------------------------------
# kripke

def cmd_kripke_check_model(args):
    m, bases = KR.model_from_json(_load_json(args.model))
    sig = _load_sig(args.sig) if args.sig else P.Signature(bases, {}, {})
    viols = KR.validate_model(m, sig)
    for v in viols:
        print("violation %s" % v)
    print("states=%d domains=%d violations=%d"
          % (len(m.states), len(m.domains), len(viols)))
    return FAIL if viols else OK


def cmd_kripke_force(args):
    m, bases = KR.model_from_json(_load_json(args.model))
    sig = _load_sig(args.sig) if args.sig else P.Signature(bases, {}, {})
    phi = P.parse_formula(args.formula, sig)
    u = json.loads(args.val) if args.val else {}
    out = KR.forces(m, sig, args.state, u, phi)
    print("forces" if out else "does not force")
    return OK if out else FAIL


def cmd_kripke_countermodel(args):
    sig = _load_sig(args.sig)
    goal = P.parse_formula(args.goal, sig)
    hyps = [P.parse_formula(h, sig) for h in args.hyp]
    found = KR.enumerate_countermodel(hyps, goal, sig,
                                      max_states=args.max_states,
                                      max_dom=args.max_dom)
    if found is None:
        print("no countermodel within bounds")
        return UNDECIDED
    m, s, u = found
    print(json.dumps({"model": KR.model_to_json(m), "state": s,
                      "valuation": u}, indent=2, default=sorted))
    return OK


# ---------------------------------------------------------------------------
# illative

def cmd_illative_check(args):
    d = IL.derivation_from_json(_load_json(args.derivation),
                                lambda s: PR.parse_term(
                                    s, allow_reserved=True))
    v = IL.check_illative(d, system=args.system,
                          budget=T.ReductionBudget(args.budget))
    print("verdict: %s" % v.value)
    return _verdict_exit(v)


def cmd_illative_search(args):
    goal = PR.parse_term(args.goal, allow_reserved=True)
    hyps = frozenset(PR.parse_term(h, allow_reserved=True)
                     for h in args.hyp)
    v = IL.term_model_eval(hyps, goal,
                           budget=T.ReductionBudget(args.budget),
                           depth=args.depth, system=args.system)
    print("verdict: %s" % v.value)
    return _verdict_exit(v)


# ---------------------------------------------------------------------------
# translate

def cmd_translate_formula(args):
    sig = _load_sig(args.sig)
    phi = P.parse_formula(args.formula, sig)
    P.typecheck(phi, sig, P.MODE_PRED2)
    print(PR.print_term(TR.translate(phi)))
    return OK


def cmd_translate_gamma(args):
    sig = _load_sig(args.sig)
    phi = P.parse_formula(args.formula, sig)
    hyps = [P.parse_formula(h, sig) for h in args.hyp]
    for t in sorted(PR.print_term(g)
                    for g in TR.build_gamma(hyps, phi, sig)):
        print(t)
    return OK


def cmd_translate_compile(args):
    sig = _load_sig(args.sig)
    d = P.derivation_from_json(_load_json(args.derivation), sig)
    out = TR.compile_proof(d, sig)
    v = IL.check_illative(out, system=IL.I0,
                          budget=T.ReductionBudget(args.budget))
    obj = IL.derivation_to_json(out, PR.print_term)
    if args.out:
        with open(args.out, "w") as f:
            json.dump(obj, f, indent=2)
    else:
        print(json.dumps(obj, indent=2))
    print("compiled goal: %s (check: %s)"
          % (PR.print_term(out.goal), v.value), file=sys.stderr)
    return _verdict_exit(v)


# ---------------------------------------------------------------------------
# stagesem

def _load_universe(path):
    return SO.universe_from_json(_load_json(path))


def _default_universe():
    return SO.Universe(base_domains={"b": ("d",)}, rank_bound=2,
                       stage_bound=8, step_budget=300)


def cmd_stagesem_build(args):
    uni = _load_universe(args.universe)
    mat = {repr(tau): len(ts) for tau, ts in sorted(uni.tsets.items(),
                                                    key=repr)}
    print(json.dumps({"types": [repr(t) for t in
                                uni.all_types(uni.rank_bound)],
                      "canonical_terms": mat}, indent=2))
    return OK


def cmd_stagesem_query(args):
    uni = _load_universe(args.universe) if args.universe \
        else _default_universe()
    cache = SO.StageCache(uni)
    t = PR.parse_term(args.term, allow_reserved=True)
    n = args.stage if args.stage is not None else uni.stage_bound
    v, tau = cache.sim(t, n)
    print("sim: %s%s" % (v.value, " type=%r" % tau
                         if v is Verdict.TRUE else ""))
    vt = cache.leadsto(t, SO.TOP, n)
    vb = cache.leadsto(t, SO.BOT, n)
    print("leadsto top: %s" % vt.value)
    print("leadsto bot: %s" % vb.value)
    return OK


def cmd_stagesem_certify(args):
    uni = _load_universe(args.universe) if args.universe \
        else _default_universe()
    cache = SO.StageCache(uni)
    t = PR.parse_term(args.term, allow_reserved=True)
    v = cache.certify_true(t)
    print("certify: %s" % v.value)
    return _verdict_exit(v)


def cmd_stagesem_props(args):
    uni = _load_universe(args.universe) if args.universe \
        else _default_universe()
    cache = SO.StageCache(uni)
    # exercise the cache on a small standard workload
    for s in args.term:
        cache.certify_true(PR.parse_term(s, allow_reserved=True))
    for b in sorted(uni.base_domains):
        cache.certify_true(T.App(T.EL, T.base_pred(b)))
        for c in uni.get_T(SO.TpBase(b)):
            cache.certify_true(T.App(T.base_pred(b), c))
    cache.certify_true(T.App(T.EL, T.H_COMB))
    viols = []
    viols += [("determinism", v) for v in SO.determinism_violations(cache)]
    viols += [("sim-uniqueness", v)
              for v in SO.sim_uniqueness_violations(cache)]
    viols += [("top-bot", v) for v in SO.top_bot_violations(cache)]
    viols += [("h-dichotomy", v) for v in SO.h_dichotomy_violations(cache)]
    viols += [("stage-monotone", v)
              for v in SO.stage_monotone_violations(cache)]
    for name, v in viols:
        print("violation %s: %r" % (name, v))
    print("cached: succ=%d sim=%d leadsto=%d violations=%d"
          % (len(cache.true_succ), len(cache.true_sim),
             len(cache.true_leadsto), len(viols)))
    return FAIL if viols else OK


# ---------------------------------------------------------------------------
# mirror

def _load_mirror(args):
    m, bases = KR.model_from_json(_load_json(args.model))
    sig = _load_sig(args.sig) if args.sig else P.Signature(bases, {}, {})
    viols = KR.validate_model(m, sig)
    if viols:
        raise KR.ModelError("invalid model: %s" % viols[0])
    mir = SK.build_mirror(m, sig, stage_bound=args.stage_bound,
                          step_budget=args.step_budget)
    return mir, sig


def cmd_mirror_build(args):
    mir, sig = _load_mirror(args)
    cps = SK.critical_pair_report(mir)
    for c in cps:
        print("critical pair: %r" % (c,))
    print("constants=%d rules=%d critical_pairs=%d"
          % (len(mir.delta), len(mir.rules), len(cps)))
    return FAIL if cps else OK


def cmd_mirror_force(args):
    mir, sig = _load_mirror(args)
    phi = P.parse_formula(args.formula, sig)
    u = json.loads(args.val) if args.val else {}
    v = SK.mirror_forces(mir, sig, args.state, u, phi)
    print("mirror: %s" % v.value)
    return _verdict_exit(v)


def cmd_mirror_equiv(args):
    mir, sig = _load_mirror(args)
    corpus = SK.formulas_upto(sig, args.depth)
    rep = SK.forcing_equiv_suite(mir, sig, corpus)
    for d in rep.disagreements:
        print("disagreement: %r" % (d,))
    for u in rep.unknowns:
        print("unknown: %r" % (u,))
    print("checked=%d disagreements=%d unknowns=%d"
          % (rep.checked, len(rep.disagreements), len(rep.unknowns)))
    if rep.disagreements:
        return FAIL
    if rep.unknowns:
        return UNDECIDED
    return OK


# ---------------------------------------------------------------------------
# argument wiring

def build_parser():
    ap = _Parser(prog="illatra")
    sub = ap.add_subparsers(dest="group", required=True)

    g = sub.add_parser("pred2").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("check")
    c.add_argument("derivation")
    c.add_argument("--sig", required=True)
    c.add_argument("--classical", action="store_true")
    c.add_argument("--predw", action="store_true")
    c.set_defaults(fn=cmd_pred2_check)

    g = sub.add_parser("kripke").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("check-model")
    c.add_argument("model")
    c.add_argument("--sig")
    c.set_defaults(fn=cmd_kripke_check_model)
    c = g.add_parser("force")
    c.add_argument("model")
    c.add_argument("--state", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--sig")
    c.add_argument("--val")
    c.set_defaults(fn=cmd_kripke_force)
    c = g.add_parser("countermodel")
    c.add_argument("--goal", required=True)
    c.add_argument("--hyp", action="append", default=[])
    c.add_argument("--sig", required=True)
    c.add_argument("--max-states", type=int, default=3)
    c.add_argument("--max-dom", type=int, default=2)
    c.set_defaults(fn=cmd_kripke_countermodel)

    g = sub.add_parser("illative").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("check")
    c.add_argument("derivation")
    c.add_argument("--system", required=True,
                   choices=[IL.I0, IL.IW, IL.IWC])
    c.add_argument("--budget", type=int, default=500)
    c.set_defaults(fn=cmd_illative_check)
    c = g.add_parser("search")
    c.add_argument("--goal", required=True)
    c.add_argument("--hyp", action="append", default=[])
    c.add_argument("--system", default=IL.I0,
                   choices=[IL.I0, IL.IW, IL.IWC])
    c.add_argument("--budget", type=int, default=500)
    c.add_argument("--depth", type=int, default=4)
    c.set_defaults(fn=cmd_illative_search)

    g = sub.add_parser("translate").add_subparsers(dest="cmd",
                                                   required=True)
    c = g.add_parser("formula")
    c.add_argument("formula")
    c.add_argument("--sig", required=True)
    c.set_defaults(fn=cmd_translate_formula)
    c = g.add_parser("gamma")
    c.add_argument("formula")
    c.add_argument("--hyp", action="append", default=[])
    c.add_argument("--sig", required=True)
    c.set_defaults(fn=cmd_translate_gamma)
    c = g.add_parser("compile")
    c.add_argument("derivation")
    c.add_argument("--sig", required=True)
    c.add_argument("--budget", type=int, default=500)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_translate_compile)

    g = sub.add_parser("stagesem").add_subparsers(dest="cmd",
                                                  required=True)
    c = g.add_parser("build")
    c.add_argument("universe")
    c.set_defaults(fn=cmd_stagesem_build)
    c = g.add_parser("query")
    c.add_argument("term")
    c.add_argument("--universe")
    c.add_argument("--stage", type=int)
    c.set_defaults(fn=cmd_stagesem_query)
    c = g.add_parser("certify")
    c.add_argument("term")
    c.add_argument("--universe")
    c.set_defaults(fn=cmd_stagesem_certify)
    c = g.add_parser("props")
    c.add_argument("term", nargs="*")
    c.add_argument("--universe")
    c.set_defaults(fn=cmd_stagesem_props)

    g = sub.add_parser("mirror").add_subparsers(dest="cmd", required=True)
    for name, fn in (("build", cmd_mirror_build),
                     ("force", cmd_mirror_force),
                     ("equiv", cmd_mirror_equiv)):
        c = g.add_parser(name)
        c.add_argument("model")
        c.add_argument("--sig")
        c.add_argument("--stage-bound", type=int, default=8)
        c.add_argument("--step-budget", type=int, default=300)
        if name == "force":
            c.add_argument("--state", required=True)
            c.add_argument("--formula", required=True)
            c.add_argument("--val")
        if name == "equiv":
            c.add_argument("--depth", type=int, default=2)
        c.set_defaults(fn=fn)

    return ap


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print("usage error: %s" % e, file=sys.stderr)
        return USAGE
    try:
        return args.fn(args)
    except (PR.ParseError, P.P2ParseError, json.JSONDecodeError,
            FileNotFoundError, UsageError) as e:
        print("error: %s" % e, file=sys.stderr)
        return USAGE
    except (IL.RuleError, P.Pred2RuleError, KR.ModelError,
            TR.CompileError, SK.MirrorError, SO.ConsistencyError,
            ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
