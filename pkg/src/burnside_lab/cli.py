"""Command-line front end: one subcommand per experiment.

Exit codes: 0 ok, 1 check failed (codec round trip), 2 invalid
configuration, 3 node budget exceeded, 4 regime violation, 5 hypothesis
violated (always for refusals such as a non-lazy step distribution or a
failed factorization, otherwise only with ``--strict``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from ._runtime import BUDGET_ENV, BudgetExceeded, HypothesisViolation, RegimeError, resolve_budget
from .baselines import (
    InfiniteDihedral,
    SemidirectProduct,
    ball_torsion_density,
    cyclic_permutation_group,
    dihedral_as_semidirect,
    mn_density_bound,
    walk_torsion_baseline,
)
from .census import (
    BALANCE,
    THETA,
    aperiodic_exponent,
    count_aperiodic_exact,
    count_unbalanced,
    tail_bound_check,
    theta_census,
    theta_upper_bound,
)
from .codes import DecodeError, count_by_cln, decode_text, encode_min, format_code
from .presentations import (
    VARIANTS,
    ParameterSystem,
    Presentation,
    PeriodFilter,
    ball_census,
    build_presentation,
    check_conditions,
    classify_torsion,
    diff_presentations,
    enumerate_periods,
    schedule,
    tune_density,
)
from .walks import (
    NotLazyError,
    StepDistribution,
    alternating_profile,
    cyclic_group,
    dihedral_group,
    exact_distance_distribution,
    formal_word_bound_check,
    inequality3,
    kesten_decay_check,
    kesten_radius,
    lazy_uniform,
    limit_point_analysis,
    product_walk_torsion,
    return_probabilities,
    sample_walk_torsion,
    schedule_surrogate_profile,
    tv_decay_curve,
)
from .words import Alphabet, format_word, parse_word, WordSyntaxError


@dataclass
class Result:
    rows: list[dict]
    doc: dict
    violations: list[str] = field(default_factory=list)
    refusal: str | None = None
    exit_code: int = 0


# ------------------------------------------------------------ helpers


def _alphabet(args) -> Alphabet:
    names = tuple(x for x in (args.names or "").split(",") if x)
    return Alphabet(args.m, names)


def _params(args, alphabet: Alphabet) -> ParameterSystem:
    return ParameterSystem(m=alphabet.rank, theta=args.theta, n=args.n)


def _presentation(args) -> Presentation:
    if args.presentation:
        return Presentation.from_json(json.loads(Path(args.presentation).read_text(encoding="utf-8")))
    alphabet = _alphabet(args)
    params = _params(args, alphabet)
    radii = schedule(args.K, args.r1, args.max_rank) if args.variant == "schedule-gated" else None
    return build_presentation(
        alphabet,
        params,
        args.max_rank,
        args.variant,
        radii=radii,
        n1=args.n1,
        n2=args.n2,
        budget=args.budget,
    )


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


# ------------------------------------------------------------ handlers


def cmd_census_aperiodic(args) -> Result:
    t = args.t
    if args.l is not None:
        t = aperiodic_exponent(args.m, args.l)
    if t is None:
        raise ValueError("give --t or --l")
    rows = []
    violations = []
    for j in range(args.r + 1):
        exact = count_aperiodic_exact(args.m, j, t, args.budget, args.jobs)
        if args.l is None:
            # upper bound: all reduced words of length j
            bound = 1 if j == 0 else 2 * args.m * (2 * args.m - 1) ** (j - 1)
            ok = exact <= bound
            kind = "upper"
        else:
            bound = args.l**j
            ok = Fraction(exact) >= Fraction(args.l) ** j
            kind = "lower"
        rows.append(
            {"m": args.m, "r": j, "t": t, "exact": exact, "bound": bound, "bound_kind": kind, "hypotheses_ok": True, "bound_satisfied": ok}
        )
        if not ok:
            violations.append(f"{kind} bound fails at r={j}")
    return Result(rows, {"census": "aperiodic", "m": args.m, "t": t, "l": args.l, "rows": rows}, violations)


def cmd_census_theta(args) -> Result:
    rows = []
    violations = []
    for j in range(1, args.r + 1):
        rep = theta_census(args.m, j, args.theta, args.budget, args.jobs)
        row = rep.row()
        rows.append(row)
        if not rep.bound_satisfied:
            violations.append(f"theta count above bound at r={j}")
        if not row["headline_hypotheses_ok"]:
            violations.append(f"headline bound hypotheses fail at r={j} (m <= 2^(3/theta))")
    return Result(rows, {"census": "theta", "m": args.m, "theta": args.theta, "rows": rows}, violations)


def cmd_census_unbalanced(args) -> Result:
    rows = []
    violations = []
    for j in range(1, args.r + 1):
        rep = count_unbalanced(args.m, j, args.balance, args.budget, args.jobs)
        rows.append(rep.row())
        if not rep.bound_satisfied:
            violations.append(f"unbalanced count above bound at r={j}")
    return Result(rows, {"census": "unbalanced", "m": args.m, "balance": args.balance, "rows": rows}, violations)


def cmd_codec(args) -> Result:
    lines: list[str] = []
    if args.roundtrip:
        lines = Path(args.roundtrip).read_text(encoding="utf-8").splitlines()
    lines += args.words or []
    rows = []
    failed = 0
    for no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        w = parse_word(line)
        enc = encode_min(w)
        text = format_code(enc.code)
        back = decode_text(text)
        ok = back == w
        failed += not ok
        rows.append(
            {"line": no, "word": format_word(w), "code": text, "cln": enc.cln, "length": len(w), "reduced": enc.reduced, "roundtrip": ok}
        )
    for code in args.decode or []:
        w = decode_text(code)
        rows.append({"line": None, "word": format_word(w), "code": code, "cln": None, "length": len(w), "reduced": None, "roundtrip": None})
    res = Result(rows, {"codec": rows, "failed": failed})
    if failed:
        res.exit_code = 1
    return res


def cmd_count_cln(args) -> Result:
    rows = []
    violations = []
    for k in range(args.k + 1):
        c = count_by_cln(args.m, k, args.budget, args.jobs)
        bound = (2 * args.m + 2) ** k
        rows.append({"m": args.m, "k": k, "exact": c, "bound": bound, "bound_satisfied": c <= bound})
        if c > bound:
            violations.append(f"count above (2m+2)^k at k={k}")
    return Result(rows, {"census": "cln", "m": args.m, "rows": rows}, violations)


def cmd_periods(args) -> Result:
    alphabet = _alphabet(args)
    if args.filter == "avoid":
        filt = PeriodFilter("avoid", sub=alphabet.named(*[x for x in args.avoid.split(",") if x]))
    else:
        filt = PeriodFilter(args.filter, args.theta)
    rows = [
        {"rank": args.rank, "index": i, "word": format_word(p.word, alphabet)}
        for i, p in enumerate(enumerate_periods(alphabet, args.rank, filt, args.n, args.budget))
    ]
    return Result(rows, {"rank": args.rank, "filter": args.filter, "count": len(rows), "periods": [r["word"] for r in rows]})


def _presentation_rows(p: Presentation) -> list[dict]:
    return [
        {"rank": per.rank, "word": format_word(per.word, p.alphabet), "exponent": per.exponent}
        for per in p.periods()
    ]


def cmd_build(args) -> Result:
    p = _presentation(args)
    problems = check_conditions(p)
    doc = p.to_json()
    violations = list(problems)
    if not p.params.chain_ok():
        violations.append("parameter chain violated: " + ", ".join(p.params.chain_violations()))
    if args.diff:
        other = Presentation.from_json(json.loads(Path(args.diff).read_text(encoding="utf-8")))
        doc = diff_presentations(other, p)
        return Result(doc["ranks"], doc, violations)
    return Result(_presentation_rows(p), doc, violations)


def cmd_classify(args) -> Result:
    p = _presentation(args)
    rows = []
    for text in args.word:
        v = classify_torsion(parse_word(text, p.alphabet), p)
        rows.append(
            {
                "word": text,
                "kind": v.kind,
                "order": v.order,
                "period": None if v.period is None else format_word(v.period, p.alphabet),
                "power": v.power,
                "root": None if v.root is None else format_word(v.root, p.alphabet),
                "rank_bound": v.rank_bound,
            }
        )
    return Result(rows, {"verdicts": rows})


def cmd_ball_census(args) -> Result:
    p = _presentation(args)
    rep = ball_census(p, args.r, budget=args.budget)
    doc = rep.summary()
    doc["spheres"] = rep.rows()
    violations = [f"{k}: hypotheses not met" for k, v in rep.comparisons.items() if not v["hypotheses_ok"]]
    return Result(rep.rows(), doc, violations)


def cmd_tune_density(args) -> Result:
    p = _presentation(args)
    res = tune_density(p, args.r, args.target, args.tol, args.budget)
    doc = {
        "target": res.target,
        "density": res.density,
        "granularity": res.granularity,
        "reachable": res.reachable,
        "log": res.log,
        "presentation": res.presentation.to_json(),
    }
    violations = [] if res.reachable else ["target above the density of the full presentation"]
    return Result(res.log, doc, violations)


def cmd_schedule(args) -> Result:
    s = schedule(args.K, args.r1, args.horizon)
    rows = [{"start": a, "end": b, "kind": k} for a, b, k in s.intervals()]
    return Result(rows, {"K": args.K, "r1": args.r1, "radii": list(s.radii), "intervals": rows})


def _step(args, m: int) -> StepDistribution:
    return StepDistribution.lazy_free(m)


def cmd_walk_sim(args) -> Result:
    p = _presentation(args)
    rep = sample_walk_torsion(p, _step(args, p.alphabet.rank), args.steps, args.samples, args.seed, args.jobs, args.allow_partial)
    doc = rep.summary()
    violations = ["step distribution does not generate the group"] if rep.flags["degenerate"] else []
    return Result([doc], doc, violations)


def cmd_product_walk(args) -> Result:
    p = _presentation(args)
    rep = product_walk_torsion(
        p, args.K, _step(args, p.alphabet.rank), args.steps, args.samples, args.seed, args.jobs, args.first_factor
    )
    doc = rep.summary()
    violations = [] if rep.consistent else ["independence identity off by more than 3 SE"]
    return Result([doc], doc, violations)


def cmd_return_prob(args) -> Result:
    probs = return_probabilities(args.m, args.r_max, exact=False)
    rho = kesten_radius(args.m)
    rows = []
    for r, p in enumerate(probs):
        row = {"r": r, "p_return": p, "kesten": rho**r, "within": p <= rho**r}
        if r <= 64:
            row["p_exact"] = str(exact_distance_distribution(args.m, r)[0])
        rows.append(row)
    doc = {"m": args.m, "rho_hat": rho, "rows": rows}
    violations = []
    if args.r_max >= 10:
        k = kesten_decay_check(args.m, args.r_max)
        doc["kesten"] = {"root": k.root, "fitted": k.fitted, "holds": k.holds, "worst_ratio": k.worst_ratio}
        if not k.holds:
            violations.append("return probability above rho_hat^r")
    if args.samples:
        e = empty_for(args.m)
        mc = sample_walk_torsion(e, StepDistribution.lazy_free(args.m), args.r_max, args.samples, args.seed, args.jobs)
        doc["monte_carlo"] = mc.summary()
    return Result(rows, doc, violations)


def empty_for(m: int) -> Presentation:
    return Presentation(Alphabet(m), ParameterSystem(m=m), "maximal", ())


def _finite_group(args):
    if args.group == "cyclic":
        g = cyclic_group(args.k)
        gens = [1, args.k - 1] if args.k > 2 else [1]
    elif args.group == "dihedral":
        g = dihedral_group(args.k)
        gens = [(1, 0), ((args.k - 1) % args.k, 0), (0, 1)]
    else:
        raise ValueError(f"unknown finite group {args.group!r}")
    return g, gens


def cmd_tv_decay(args) -> Result:
    g, gens = _finite_group(args)
    if args.non_lazy:
        mu = {h: Fraction(1, len(set(gens))) for h in dict.fromkeys(gens)}
    else:
        mu = lazy_uniform(g, dict.fromkeys(gens))
    try:
        curve = tv_decay_curve(g, mu, args.r_max, args.threshold or ())
    except NotLazyError as exc:
        return Result([], {"group": g.name, "refused": str(exc)}, refusal=str(exc))
    rows = [{"r": r, "tv": v} for r, v in enumerate(curve.floats(), start=1)]
    doc = {
        "group": g.name,
        "r_max": args.r_max,
        "thresholds": curve.thresholds,
        "non_increasing_from_10": curve.non_increasing_from(10) if args.r_max >= 10 else None,
        "envelope": curve.envelope,
        "rows": rows,
    }
    return Result(rows, doc)


def cmd_limit_set(args) -> Result:
    if args.input:
        seq = [float(x) for x in Path(args.input).read_text(encoding="utf-8").split()]
        name = "input"
    elif args.profile == "alternating":
        seq = alternating_profile(args.length)
        name = "alternating"
    else:
        seq = schedule_surrogate_profile(schedule(args.K, args.r1, args.length), args.length)
        name = "schedule"
    rep = limit_point_analysis(seq, args.eps, args.burn_in)
    doc = rep.summary()
    doc["profile"] = name
    doc["cells"] = rep.cells
    return Result([{k: v for k, v in doc.items() if k != "cells"}], doc)


def _baseline_group(args):
    if args.group == "dihedral":
        return InfiniteDihedral()
    if args.group == "dihedral-semidirect":
        return dihedral_as_semidirect()
    if args.group == "z2-inversion":
        return SemidirectProduct([[-1, 0], [0, -1]], 2)
    if args.group == "free-abelian":
        return SemidirectProduct([[1] * 1], 1)
    if args.group == "cyclic-permutation":
        return cyclic_permutation_group(args.order)
    raise ValueError(f"unknown group {args.group!r}")


def cmd_baseline_ball(args) -> Result:
    G = _baseline_group(args)
    curve = ball_torsion_density(G, G.generators(), args.r, args.budget)
    rows = curve.rows()
    return Result(rows, {"group": G.name, "rows": rows})


def cmd_baseline_walk(args) -> Result:
    G = _baseline_group(args)
    curve = walk_torsion_baseline(G, G.generators(), args.r_max, args.budget)
    rows = curve.rows()
    doc = {"group": G.name, "phi_ratio": curve.phi_ratio, "leaked": curve.leaked, "rows": rows}
    return Result(rows, doc)


MN_PRESETS = ("dihedral-line", "dihedral-cosets", "z2-inversion", "trivial-M")


def cmd_mn_check(args) -> Result:
    if args.preset == "dihedral-line":
        G = InfiniteDihedral()
        M, in_N = ["", "s"], G.is_translation
    elif args.preset == "dihedral-cosets":
        G = InfiniteDihedral()
        M, in_N = ["", "st", "s", "t"], (lambda g: len(g) % 2 == 0 and g != "")
    elif args.preset == "z2-inversion":
        G = SemidirectProduct([[-1, 0], [0, -1]], 2)
        e1, s = ((1, 0), 0), ((0, 0), 1)
        M, in_N = [G.identity, e1, s, G.mul(s, e1)], (lambda g: g[1] == 0 and any(g[0]))
    elif args.preset == "trivial-M":
        G = InfiniteDihedral()
        M, in_N = [""], G.is_translation
    else:
        raise ValueError(f"unknown preset {args.preset!r}")
    rep = mn_density_bound(G, G.generators(), M, in_N, args.r, args.budget)
    doc = rep.summary()
    doc["preset"] = args.preset
    res = Result([doc], doc)
    if not rep.holds:
        res.refusal = "factorization counterexample" if not rep.factorizes else "density below c"
    return res


def cmd_bound_report(args) -> Result:
    p = _presentation(args)
    m = p.alphabet.rank
    rho = args.rho if args.rho is not None else kesten_radius(m)
    gamma = args.gamma if args.gamma is not None else p.params.gamma
    ineq_value, ineq_ok = inequality3(rho, gamma, m)
    formal = formal_word_bound_check(p, args.r, args.R, rho, gamma, args.c, args.budget)
    theta = theta_upper_bound(max(m, 2), max(args.R, 1), p.params.theta)
    # entropy form of the binomial tail bound: sum_{j <= lam r} C(r, j) <= 2^(H(lam) r)
    d_tail = 2 ** -(BALANCE * math.log2(BALANCE) + (1 - BALANCE) * math.log2(1 - BALANCE))
    doc = {
        "inequality3": {"rho": rho, "gamma": gamma, "m": m, "value": ineq_value, "holds": ineq_ok},
        "formal_words": formal,
        "theta_headline": {k: theta[k] for k in ("headline", "headline_hypotheses_ok")},
        "tail": {"r": args.R, "lambda": BALANCE, "c": 1.0, "d": d_tail, "holds": tail_bound_check(args.R, BALANCE, 1.0, d_tail)},
        "parameters": {
            "chain_ok": p.params.chain_ok(),
            "chain_violations": p.params.chain_violations(),
            "side_conditions": [c.__dict__ for c in p.params.side_conditions()],
        },
    }
    violations = []
    if not ineq_ok:
        violations.append("inequality3 fails")
    violations += [f"formal-word hypothesis {k} fails" for k, v in formal["hypotheses"].items() if v is False and k != "gap_vacuous"]
    if not theta["headline_hypotheses_ok"]:
        violations.append("theta headline hypotheses fail")
    if not p.params.chain_ok():
        violations.append("parameter chain violated")
    rows = [{"check": "inequality3", "value": ineq_value, "holds": ineq_ok}]
    rows.append({"check": "formal_finite", "value": formal["finite_order"], "holds": formal["finite_within_bound"]})
    rows.append({"check": "formal_infinite", "value": formal["infinite_order"], "holds": formal["infinite_within_bound"]})
    return Result(rows, doc, violations)


# ------------------------------------------------------------ parser


def _common(p: argparse.ArgumentParser, default_format: str) -> None:
    g = p.add_argument_group("common")
    g.add_argument("--seed", type=int, default=0, help="random seed")
    g.add_argument("--samples", type=int, default=0, help="Monte Carlo sample count")
    g.add_argument("--out", help="output file (default: stdout); a .manifest.json sidecar is written next to it")
    g.add_argument("--format", choices=("csv", "json"), default=None, help=f"output format (default: {default_format})")
    g.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    g.add_argument("--strict", action="store_true", help="exit 5 when a hypothesis or bound check fails")
    g.add_argument("--budget", type=int, default=None, help=f"node budget (default: ${BUDGET_ENV} or 1e8)")


def _presentation_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("presentation")
    g.add_argument("--presentation", help="presentation JSON file (overrides the build flags)")
    g.add_argument("--m", type=int, default=2, help="number of numbered generators")
    g.add_argument("--names", default="", help="extra named generators, e.g. a,b")
    g.add_argument("--max-rank", type=int, default=3)
    g.add_argument("--variant", choices=VARIANTS, default="maximal")
    g.add_argument("--n", type=int, default=1001, help="base exponent (odd)")
    g.add_argument("--theta", type=float, default=THETA)
    g.add_argument("--K", type=int, default=2, help="schedule factor for schedule-gated")
    g.add_argument("--r1", type=int, default=4, help="first schedule radius for schedule-gated")
    g.add_argument("--n1", type=int, default=None)
    g.add_argument("--n2", type=int, default=None)


JSON_FIRST = ("build", "tune-density", "bound-report", "limit-set", "walk-sim", "product-walk", "mn-check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="burnside-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help):
        fmt = "json" if name in JSON_FIRST else "csv"
        sp = sub.add_parser(name, help=help, description=help)
        sp.set_defaults(func=func, default_format=fmt)
        _common(sp, fmt)
        return sp

    sp = add("census-aperiodic", cmd_census_aperiodic, "exact counts of t-aperiodic reduced words")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--t", type=int)
    sp.add_argument("--l", type=float, help="choose t from l and check count >= l^r")

    sp = add("census-theta", cmd_census_theta, "theta-word counts against the binomial bound")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--theta", type=float, default=THETA)

    sp = add("census-unbalanced", cmd_census_unbalanced, "unbalanced pair-free Y-words")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--balance", type=float, default=BALANCE)

    sp = add("codec", cmd_codec, "encode words to minimal codes and back")
    sp.add_argument("--roundtrip", help="file with one word per line")
    sp.add_argument("--words", nargs="*", help="words to encode")
    sp.add_argument("--decode", nargs="*", help="codes to decode")

    sp = add("count-cln", cmd_count_cln, "number of words of each minimal code length")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("periods", cmd_periods, "canonical periods of one rank")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--names", default="")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--filter", choices=("all", "theta", "not-theta", "avoid"), default="all")
    sp.add_argument("--theta", type=float, default=THETA)
    sp.add_argument("--avoid", default="a,b", help="named generators to avoid with --filter avoid")
    sp.add_argument("--n", type=int, default=1001)

    sp = add("build", cmd_build, "build a presentation (JSON) or diff against another")
    _presentation_args(sp)
    sp.add_argument("--diff", help="presentation JSON to diff the built one against")

    sp = add("classify", cmd_classify, "torsion verdicts for words")
    _presentation_args(sp)
    sp.add_argument("--word", nargs="+", required=True)

    sp = add("ball-census", cmd_ball_census, "classify every element of a ball")
    _presentation_args(sp)
    sp.add_argument("--r", type=int, required=True)

    sp = add("tune-density", cmd_tune_density, "drop periods to reach a target torsion density")
    _presentation_args(sp)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--target", type=float, required=True)
    sp.add_argument("--tol", type=float, default=0.0)

    sp = add("schedule", cmd_schedule, "free/torsion radius schedule")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--r1", type=int, required=True)
    sp.add_argument("--horizon", type=int, required=True)

    sp = add("walk-sim", cmd_walk_sim, "Monte Carlo torsion probability of the lazy walk")
    _presentation_args(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--allow-partial", action="store_true", help="count endpoints past the regime cap as indeterminate")

    sp = add("product-walk", cmd_product_walk, "product walk independence check")
    _presentation_args(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--first-factor", type=int, default=None, help="steps multiplier of the first coordinate (default 4K^2)")

    sp = add("return-prob", cmd_return_prob, "exact return probabilities on the free group")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r-max", type=int, required=True)

    sp = add("tv-decay", cmd_tv_decay, "exact total-variation decay on a finite group")
    sp.add_argument("--group", choices=("cyclic", "dihedral"), required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--r-max", type=int, required=True)
    sp.add_argument("--threshold", type=float, action="append")
    sp.add_argument("--non-lazy", action="store_true", help="drop the identity from the step distribution")

    sp = add("limit-set", cmd_limit_set, "partial-limit analysis of a probability profile")
    sp.add_argument("--profile", choices=("schedule", "alternating"), default="schedule")
    sp.add_argument("--input", help="whitespace-separated sequence instead of a built-in profile")
    sp.add_argument("--length", type=int, default=200000)
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--K", type=int, default=1)
    sp.add_argument("--r1", type=int, default=1)

    groups = ("dihedral", "dihedral-semidirect", "z2-inversion", "free-abelian", "cyclic-permutation")
    sp = add("baseline-ball", cmd_baseline_ball, "torsion density of Cayley balls")
    sp.add_argument("--group", choices=groups, required=True)
    sp.add_argument("--order", type=int, default=3, help="m for cyclic-permutation")
    sp.add_argument("--r", type=int, required=True)

    sp = add("baseline-walk", cmd_baseline_walk, "exact torsion probability of the lazy walk")
    sp.add_argument("--group", choices=groups, required=True)
    sp.add_argument("--order", type=int, default=3, help="m for cyclic-permutation")
    sp.add_argument("--r-max", type=int, required=True)

    sp = add("mn-check", cmd_mn_check, "verify G = MN and the density bound")
    sp.add_argument("--preset", choices=MN_PRESETS, required=True)
    sp.add_argument("--r", type=int, required=True)

    sp = add("bound-report", cmd_bound_report, "evaluate the recorded bounds and their hypotheses")
    _presentation_args(sp)
    sp.add_argument("--r", type=int, required=True, help="largest short-period length")
    sp.add_argument("--R", type=int, required=True, help="formal word length")
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--c", type=float, default=1.0)
    return parser


# ------------------------------------------------------------ output


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in keys})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, default=_json_default)
    return _num(v)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def render(res: Result, fmt: str) -> str:
    if fmt == "csv":
        return _csv(res.rows)
    return json.dumps(res.doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    start = time.perf_counter()
    try:
        res = args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RegimeError as exc:
        print(f"error: regime violation: {exc}", file=sys.stderr)
        return 4
    except HypothesisViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (ValueError, WordSyntaxError, DecodeError, OSError, KeyError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    text = render(res, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        manifest = {
            "config": _config(args),
            "version": __version__,
            "wall_time": time.perf_counter() - start,
            "budget": resolve_budget(args.budget),
            "exit_status": _status(res, args.strict),
            "violations": res.violations,
        }
        Path(args.out + ".manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2, default=_json_default) + "\n", encoding="utf-8"
        )
    else:
        sys.stdout.write(text)
    for v in res.violations:
        print(f"warning: {v}", file=sys.stderr)
    if res.refusal:
        print(f"error: refused: {res.refusal}", file=sys.stderr)
    return _status(res, args.strict)


def _status(res: Result, strict: bool) -> int:
    if res.refusal:
        return 5
    if res.exit_code:
        return res.exit_code
    if strict and res.violations:
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
