"""Command-line front end.

Exit codes follow the three-valued verdicts so shell harnesses can assert
outcomes: 0 Confirmed/success, 1 Refuted, 2 Inconclusive, 3 parse/config
errors, 4 other domain errors. The environment variable QILAB_SEED
overrides any --seed flag.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .asymptotics import (CONFIRMED, DEFAULT_H_TOL, INCONCLUSIVE, REFUTED,
                          RatioProfile, membership_H, membership_H_alpha)
from .certify import check_qi_inequalities, estimate_qi_constants
from .dsl import dumps_map, load_map_file, parse_map_doc
from .errors import ConfigError, ParseError, QILabError
from .group_ops import (CenterRule, CentralizerRule, build_ball_gadget,
                        build_witness_sequence, commutation_defect,
                        coset_equal_mod_H, torsion_order_mod_H)
from .maps import Identity, compose_power
from .reporting import build_report, report_json, write_profile_csv
from .sampling import (DEFAULT_SEED, SamplingPlan, default_plan,
                       plan_from_dict)
from .topology import (DEFAULT_NEIGHBORHOOD_MARGIN, NeighborhoodSpec,
                       clamp_to_alpha, density_witness,
                       neighborhood_contains, refine_intersection)

_EXIT = {CONFIRMED: 0, REFUTED: 1, INCONCLUSIVE: 2}

DEFAULT_THRESHOLDS = {
    "H_tol": DEFAULT_H_TOL,
    "divergence_factor": 1.5,
    "neighborhood_margin": DEFAULT_NEIGHBORHOOD_MARGIN,
}


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}",
                         position=f"offset {exc.pos}") from exc


def _load_spec(path, plan) -> NeighborhoodSpec:
    doc = _load_json(path)
    if not isinstance(doc, dict) or "center" not in doc:
        raise ParseError(f"{path}: neighborhood spec needs "
                         "{center, epsilon, R}")
    center, _ = parse_map_doc(doc["center"])
    return NeighborhoodSpec(center=center, epsilon=float(doc["epsilon"]),
                            R=float(doc["R"]))


def _session(args) -> tuple[SamplingPlan, dict]:
    thresholds = dict(DEFAULT_THRESHOLDS)
    if args.plan:
        doc = _load_json(args.plan)
        if not isinstance(doc, dict):
            raise ConfigError("plan file must hold a JSON object")
        thresholds.update(doc.get("thresholds", {}))
        plan = plan_from_dict(doc)
    else:
        plan = default_plan()
    seed = args.seed
    env_seed = os.environ.get("QILAB_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"QILAB_SEED must be an integer, got "
                              f"{env_seed!r}") from exc
    if seed is not None:
        plan = SamplingPlan(radii=plan.radii,
                            directions_per_annulus=plan.directions_per_annulus,
                            pair_samples=plan.pair_samples,
                            seed=seed, dimension=plan.dimension)
    return plan, thresholds


def _emit(args, report: dict, profiles: dict[str, RatioProfile] | None = None
          ) -> None:
    text = report_json(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text, encoding="utf-8")
        if profiles and args.format == "csv":
            for name, profile in profiles.items():
                write_profile_csv(profile, out / f"{name}.csv")


def _profile_from_evidence(evidence: dict) -> RatioProfile | None:
    rows = evidence.get("profile")
    if not rows:
        return None
    from .asymptotics import ProfileEntry
    entries = tuple(ProfileEntry(radius=row["r"], sup_ratio=row["sup"],
                                 inf_ratio=row["inf"],
                                 argmax_direction=tuple(row["argmax_dir"]))
                    for row in rows)
    return RatioProfile(exponent=evidence.get("exponent", 1.0),
                        entries=entries)


def cmd_certify(args, plan, thresholds):
    m, _ = load_map_file(args.map)
    cert = estimate_qi_constants(m, plan)
    verdict = check_qi_inequalities(m, cert, plan)
    report = build_report("certify", plan, thresholds, maps={"map": m},
                          result={"certificate": cert.to_dict(),
                                  "verdict": verdict.to_dict()})
    _emit(args, report)
    return _EXIT[verdict.status]


def cmd_membership(args, plan, thresholds):
    m, _ = load_map_file(args.map)
    if args.alpha is not None:
        verdict, cert = membership_H_alpha(
            m, args.alpha, plan,
            divergence_factor=thresholds["divergence_factor"])
        result = {"verdict": verdict.to_dict(),
                  "certificate": cert.to_dict() if cert else None}
    else:
        verdict = membership_H(m, plan, tol=thresholds["H_tol"])
        result = {"verdict": verdict.to_dict()}
    report = build_report("membership", plan, thresholds, maps={"map": m},
                          result=result)
    profile = _profile_from_evidence(verdict.evidence)
    _emit(args, report, profiles={"profile": profile} if profile else None)
    return _EXIT[verdict.status]


def cmd_coset(args, plan, thresholds):
    f, _ = load_map_file(args.map)
    g, _ = load_map_file(args.map2)
    verdict = coset_equal_mod_H(f, g, plan, tol=thresholds["H_tol"])
    report = build_report("coset", plan, thresholds,
                          maps={"map": f, "map2": g},
                          result={"verdict": verdict.to_dict()})
    _emit(args, report)
    return _EXIT[verdict.status]


def cmd_commutator(args, plan, thresholds):
    f, _ = load_map_file(args.map)
    g, _ = load_map_file(args.map2)
    absolute, relative = commutation_defect(f, g, plan)
    report = build_report("commutator", plan, thresholds,
                          maps={"map": f, "map2": g},
                          result={"absolute": absolute.to_rows(),
                                  "relative": relative.to_rows()})
    _emit(args, report, profiles={"absolute": absolute, "relative": relative})
    return 0


def cmd_torsion(args, plan, thresholds):
    m, _ = load_map_file(args.map)
    kmax = args.kmax or 12
    order = torsion_order_mod_H(m, kmax, plan, tol=thresholds["H_tol"])
    powers = []
    for k in range(1, (order or kmax) + 1):
        v = coset_equal_mod_H(compose_power(m, k), Identity(), plan,
                              tol=thresholds["H_tol"])
        powers.append({"power": k, "status": v.status})
        if v.confirmed:
            break
    report = build_report("torsion", plan, thresholds, maps={"map": m},
                          result={"order": order, "k_max": kmax,
                                  "powers": powers})
    _emit(args, report)
    return 0 if order is not None else 2


def cmd_gadget(args, plan, thresholds):
    f, _ = load_map_file(args.map)
    seq, eps = build_witness_sequence(f, plan, eps_floor=thresholds["H_tol"])
    eps_used = min(eps, args.epsilon if args.epsilon else 1.0)
    if args.alpha is not None:
        qi = estimate_qi_constants(f, plan)
        rule = CentralizerRule(alpha=args.alpha, K=qi.K)
        rule_desc = {"rule": "centralizer", "alpha": args.alpha, "K": qi.K}
    else:
        rule = CenterRule()
        rule_desc = {"rule": "center"}
    gadget, data = build_ball_gadget(f, seq, eps_used, rule)
    report = build_report(
        "gadget", plan, thresholds, maps={"map": f, "gadget": gadget},
        result={"witness_points": [list(p) for p in seq.points],
                "achieved_eps": eps, "eps_used": eps_used,
                "radius_rule": rule_desc,
                "balls": {"centers": [list(c) for c in data.centers],
                          "radii": list(data.radii),
                          "drift_fraction": data.drift_fraction,
                          "axis": data.axis}})
    _emit(args, report)
    if args.out:
        Path(args.out, "gadget_map.json").write_text(
            dumps_map(gadget, plan.dimension, indent=2) + "\n",
            encoding="utf-8")
    return 0


def cmd_clamp(args, plan, thresholds):
    f, _ = load_map_file(args.map)
    for name in ("alpha", "C", "R0"):
        if getattr(args, name) is None:
            raise ConfigError(f"clamp requires --{name}")
    g = clamp_to_alpha(f, args.alpha, args.C, args.R0)
    report = build_report("clamp", plan, thresholds,
                          maps={"map": f, "clamped": g},
                          result={"alpha": args.alpha, "C": args.C,
                                  "R0": args.R0})
    _emit(args, report)
    if args.out:
        Path(args.out, "clamped_map.json").write_text(
            dumps_map(g, plan.dimension, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_neighborhood(args, plan, thresholds):
    if args.spec:
        spec = _load_spec(args.spec, plan)
    else:
        if args.epsilon is None or args.R is None:
            raise ConfigError("neighborhood needs --spec or --epsilon/--R")
        center, _ = load_map_file(args.map)
        spec = NeighborhoodSpec(center=center, epsilon=args.epsilon, R=args.R)
    g, _ = load_map_file(args.map2)
    verdict = neighborhood_contains(spec, g, plan,
                                    margin=thresholds["neighborhood_margin"])
    report = build_report("neighborhood", plan, thresholds,
                          maps={"center": spec.center, "map2": g},
                          result={"epsilon": spec.epsilon, "R": spec.R,
                                  "verdict": verdict.to_dict()})
    _emit(args, report)
    return _EXIT[verdict.status]


def cmd_density(args, plan, thresholds):
    f, _ = load_map_file(args.map)
    for name in ("epsilon", "R", "alpha", "C"):
        if getattr(args, name) is None:
            raise ConfigError(f"density requires --{name}")
    g, result = density_witness(f, args.epsilon, args.R, args.alpha, args.C,
                                plan, tol=thresholds["H_tol"],
                                margin=thresholds["neighborhood_margin"])
    report = build_report("density", plan, thresholds,
                          maps={"map": f, "witness": g}, result=result)
    _emit(args, report)
    if args.out:
        Path(args.out, "witness_map.json").write_text(
            dumps_map(g, plan.dimension, indent=2) + "\n", encoding="utf-8")
    return _EXIT[result["status"]]


def cmd_refine(args, plan, thresholds):
    if not (args.spec and args.spec2):
        raise ConfigError("refine needs --spec and --spec2")
    spec1 = _load_spec(args.spec, plan)
    spec2 = _load_spec(args.spec2, plan)
    h, _ = load_map_file(args.map)
    refined = refine_intersection(spec1, spec2, h, plan,
                                  margin=thresholds["neighborhood_margin"])
    report = build_report(
        "refine", plan, thresholds,
        maps={"center": refined.center},
        result={"epsilon": refined.epsilon, "R": refined.R})
    _emit(args, report)
    return 0


_COMMANDS = {
    "certify": cmd_certify,
    "membership": cmd_membership,
    "coset": cmd_coset,
    "commutator": cmd_commutator,
    "torsion": cmd_torsion,
    "gadget": cmd_gadget,
    "clamp": cmd_clamp,
    "neighborhood": cmd_neighborhood,
    "density": cmd_density,
    "refine": cmd_refine,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qilab",
        description="asymptotic analysis of quasi-isometries of R^n")
    parser.add_argument("--version", action="version",
                        version=f"qilab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--map", help="map DSL file")
        p.add_argument("--map2", help="second map DSL file")
        p.add_argument("--spec", help="neighborhood spec JSON file")
        p.add_argument("--spec2", help="second neighborhood spec JSON file")
        p.add_argument("--alpha", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--R", type=float)
        p.add_argument("--R0", type=float)
        p.add_argument("--C", type=float)
        p.add_argument("--kmax", type=int)
        p.add_argument("--plan", help="plan/session config JSON file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="directory for report artifacts")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan, thresholds = _session(args)
        if args.map is None:
            raise ConfigError(f"{args.command} requires --map")
        return _COMMANDS[args.command](args, plan, thresholds)
    except (ParseError, ConfigError) as exc:
        print(f"qilab: error: {exc}", file=sys.stderr)
        return 3
    except QILabError as exc:
        print(f"qilab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
