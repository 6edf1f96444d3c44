"""Asymptotic-topology neighborhoods, basis refinement, and the clamp
construction showing the alpha-subgroups are dense among sublinear classes.

A basic neighborhood U(f; eps, R) collects classes g with
sup_{|x|>=R} |g(x)-f(x)|/|x| < eps. The sup over an unbounded region is
approximated by tail annuli plus a monotonicity requirement, so oscillating
tails come out Inconclusive rather than falsely Confirmed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymptotics import (CONFIRMED, DEFAULT_H_TOL, INCONCLUSIVE, REFUTED,
                          HAlphaCertificate, Verdict, check_certificate,
                          difference_profile, membership_H,
                          membership_H_alpha, ratio_profile)
from .certify import check_qi_inequalities, estimate_qi_constants
from .errors import NoSuitableR0, NotInH, NotInIntersection
from .maps import Clamp, MapExpr
from .sampling import SamplingPlan

DEFAULT_NEIGHBORHOOD_MARGIN = 0.05


@dataclass(frozen=True)
class NeighborhoodSpec:
    """A basic set U(center; epsilon, R) of the asymptotic topology."""

    center: MapExpr
    epsilon: float
    R: float

    def __post_init__(self):
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "R", float(self.R))
        if not (self.epsilon > 0 and self.R > 0):
            raise ValueError("neighborhood needs epsilon > 0 and R > 0")


def _tail_profile(center: MapExpr, g: MapExpr, plan: SamplingPlan, R: float):
    return difference_profile(center, g, plan.restrict(R), exponent=1.0)


def neighborhood_contains(spec: NeighborhoodSpec, g: MapExpr,
                          plan: SamplingPlan,
                          margin: float = DEFAULT_NEIGHBORHOOD_MARGIN
                          ) -> Verdict:
    """Sampled membership of g in U(center; epsilon, R).

    Confirmed needs every sampled ratio under epsilon*(1-margin) with a
    non-increasing profile; any sampled ratio at or above epsilon refutes.
    """
    profile = _tail_profile(spec.center, g, plan, spec.R)
    sups = profile.sups
    thresholds = {"epsilon": spec.epsilon, "R": spec.R, "margin": margin}
    evidence = {"profile": profile.to_rows(), "max_sup": max(sups)}
    if any(s >= spec.epsilon for s in sups):
        worst = max(range(len(sups)), key=lambda i: sups[i])
        evidence["witness"] = profile.entries[worst].to_dict()
        return Verdict(REFUTED, evidence, thresholds)
    decreasing = all(b <= a * (1 + 1e-9) + 1e-12
                     for a, b in zip(sups, sups[1:]))
    if decreasing and all(s < spec.epsilon * (1.0 - margin) for s in sups):
        return Verdict(CONFIRMED, evidence, thresholds)
    return Verdict(INCONCLUSIVE, evidence, thresholds)


def refine_intersection(spec1: NeighborhoodSpec, spec2: NeighborhoodSpec,
                        h: MapExpr, plan: SamplingPlan,
                        margin: float = DEFAULT_NEIGHBORHOOD_MARGIN
                        ) -> NeighborhoodSpec:
    """Basic set around h inside U(f1;eps1,R1) n U(f2;eps2,R2).

    Uses the sampled sups A_i = sup_{|x|>=R_i} |h(x)-f_i(x)|/|x| and returns
    (h, min(eps1-A1, eps2-A2), max(R1, R2)); the triangle inequality then
    gives the sampled containment.
    """
    for spec in (spec1, spec2):
        verdict = neighborhood_contains(spec, h, plan, margin=margin)
        if not verdict.confirmed:
            raise NotInIntersection(
                f"center not confirmed in U(eps={spec.epsilon}, R={spec.R}): "
                f"{verdict.status}")
    a1 = max(_tail_profile(spec1.center, h, plan, spec1.R).sups)
    a2 = max(_tail_profile(spec2.center, h, plan, spec2.R).sups)
    eps = min(spec1.epsilon - a1, spec2.epsilon - a2)
    return NeighborhoodSpec(center=h, epsilon=eps, R=max(spec1.R, spec2.R))


def clamp_to_alpha(f: MapExpr, alpha: float, C: float, R0: float) -> Clamp:
    """The displacement clamp: identity inside R0, displacement capped at
    C|x|^alpha outside, keeping the displacement direction."""
    return Clamp(inner=f, alpha=alpha, C=C, R0=R0)


def density_witness(f: MapExpr, epsilon: float, R: float, alpha: float,
                    C: float, plan: SamplingPlan,
                    tol: float = DEFAULT_H_TOL,
                    margin: float = DEFAULT_NEIGHBORHOOD_MARGIN
                    ) -> tuple[Clamp, dict]:
    """Clamped approximant of a sublinear map inside a given neighborhood.

    Picks R0 as the smallest plan radius from which the tail of f's
    displacement profile stays at or below epsilon/2, clamps f there, and
    verifies the three claims: the clamp is a sampled quasi-isometry, it
    satisfies the alpha-displacement bound with K <= C by construction, and
    it stays in U(f; epsilon, R).
    """
    membership = membership_H(f, plan, tol=tol)
    if not membership.confirmed:
        raise NotInH(f"sublinear membership returned {membership.status}")
    profile = ratio_profile(f, 1.0, plan)
    sups = profile.sups
    radii = profile.radii
    r0 = None
    for i, r in enumerate(radii):
        if r >= R and max(sups[i:]) <= epsilon / 2.0:
            r0 = r
            break
    if r0 is None:
        raise NoSuitableR0(
            f"profile tail never reaches epsilon/2 = {epsilon / 2:g} at or "
            f"beyond R = {R:g} within the plan range")

    g = clamp_to_alpha(f, alpha, C, r0)

    qi_cert = estimate_qi_constants(g, plan)
    claim1 = check_qi_inequalities(g, qi_cert, plan)
    claim2, sampled_cert = membership_H_alpha(g, alpha, plan)
    built_cert = HAlphaCertificate(
        alpha=alpha, K=C, R=r0, kind="analytic",
        provenance="clamp displacement bound |g(x)-x| <= C|x|^alpha for |x| >= R0")
    cert_check = check_certificate(g, built_cert, plan)
    claim3 = neighborhood_contains(
        NeighborhoodSpec(center=f, epsilon=epsilon, R=R), g, plan,
        margin=margin)

    statuses = [claim1.status, claim2.status, cert_check.status, claim3.status]
    overall = CONFIRMED if all(s == CONFIRMED for s in statuses) else (
        REFUTED if REFUTED in statuses else INCONCLUSIVE)
    report = {
        "status": overall,
        "R0": r0,
        "claim1_qi": {"certificate": qi_cert.to_dict(),
                      "verdict": claim1.to_dict()},
        "claim2_alpha": {"verdict": claim2.to_dict(),
                         "construction_certificate": built_cert.to_dict(),
                         "construction_check": cert_check.to_dict(),
                         "sampled_certificate":
                             sampled_cert.to_dict() if sampled_cert else None},
        "claim3_neighborhood": claim3.to_dict(),
        "parameters": {"epsilon": epsilon, "R": R, "alpha": alpha, "C": C},
    }
    return g, report
