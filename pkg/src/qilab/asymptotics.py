"""Displacement-ratio profiles and membership verdicts for the asymptotic
subgroups of QI(R^n).

H collects classes with sublinear displacement, lim |f(x)-x|/|x| = 0; for
alpha in (0,1), H_alpha collects classes with |f(x)-x| <= K|x|^alpha beyond
some radius. Limits at infinity are approximated by trend analysis on a
geometric radii schedule; verdicts are three-valued and always carry the
numeric evidence they were decided on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AlphaOutOfRange, DimensionMismatch, EmptyPlan,
                     EmptyProfile)
from .maps import (MapExpr, _eval, affine_normal_form, as_point,
                   required_dimension)
from .sampling import SamplingPlan, profile_directions

CONFIRMED = "confirmed"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"

DEFAULT_H_TOL = 0.05
DEFAULT_DIVERGENCE_FACTOR = 1.5   # per decade of radius
DEFAULT_DIVERGENCE_DECADES = 3.0
CERT_INFLATION = 1.05
CERT_K_FLOOR = 1e-12
TREND_REL_SLACK = 1e-9
TREND_ABS_SLACK = 1e-12
# A tail counts as non-decreasing for refutation purposes when it keeps at
# least this fraction of its starting value: basepoint shifts and similar
# bounded perturbations tilt constant profiles slightly downward (by
# O(|x0|/r)) without changing the limit.
REFUTE_FLATNESS = 0.95


@dataclass(frozen=True)
class ProfileEntry:
    radius: float
    sup_ratio: float
    inf_ratio: float
    argmax_direction: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"r": self.radius, "sup": self.sup_ratio, "inf": self.inf_ratio,
                "argmax_dir": list(self.argmax_direction)}


@dataclass(frozen=True)
class RatioProfile:
    """Per-annulus sup/inf of |f(x)-x|/|x|^exponent (exponent 0 = absolute)."""

    exponent: float
    entries: tuple[ProfileEntry, ...]

    def __post_init__(self):
        radii = [e.radius for e in self.entries]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("profile radii must be strictly increasing")

    @property
    def radii(self) -> list[float]:
        return [e.radius for e in self.entries]

    @property
    def sups(self) -> list[float]:
        return [e.sup_ratio for e in self.entries]

    @property
    def infs(self) -> list[float]:
        return [e.inf_ratio for e in self.entries]

    def tail_entries(self) -> tuple[ProfileEntry, ...]:
        """The last half of the annuli (the trend window)."""
        return self.entries[len(self.entries) // 2:]

    def to_rows(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


@dataclass(frozen=True)
class HAlphaCertificate:
    """Constants (alpha, K, R) asserting |f(x)-x| <= K|x|^alpha for |x| >= R."""

    alpha: float
    K: float
    R: float
    kind: str  # analytic | sampled | derived
    provenance: str = ""

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise AlphaOutOfRange("certificate exponent must lie in (0, 1)")
        if not (self.K > 0 and self.R > 0):
            raise ValueError("certificate constants K, R must be positive")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "K": self.K, "R": self.R,
                "kind": self.kind, "provenance": self.provenance}


@dataclass(frozen=True)
class Verdict:
    """Confirmed / Refuted / Inconclusive, always with numeric evidence."""

    status: str
    evidence: dict
    thresholds: dict

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    @property
    def inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"status": self.status, "evidence": self.evidence,
                "thresholds": self.thresholds}


def _check_plan_dimension(m: MapExpr, plan: SamplingPlan):
    exact, minimum = required_dimension(m)
    if exact is not None and exact != plan.dimension:
        raise DimensionMismatch(
            f"map dimension {exact} does not match plan dimension {plan.dimension}")
    if plan.dimension < minimum:
        raise DimensionMismatch(
            f"map needs dimension >= {minimum}, plan has {plan.dimension}")


def _sample_profile(diff_fn, plan: SamplingPlan, dirs: np.ndarray,
                    exponent: float, basepoint=None) -> RatioProfile:
    base = None if basepoint is None else as_point(basepoint, plan.dimension)
    entries = []
    for r in plan.radii:
        best = -math.inf
        worst = math.inf
        best_dir = dirs[0]
        for u in dirs:
            x = r * u
            d = float(np.linalg.norm(diff_fn(x)))
            denom_base = r if base is None else float(np.linalg.norm(x - base))
            ratio = d if exponent == 0.0 else d / denom_base ** exponent
            if ratio > best:
                best = ratio
                best_dir = u
            if ratio < worst:
                worst = ratio
        entries.append(ProfileEntry(radius=float(r), sup_ratio=best,
                                    inf_ratio=worst,
                                    argmax_direction=tuple(best_dir.tolist())))
    return RatioProfile(exponent=float(exponent), entries=tuple(entries))


def ratio_profile(m: MapExpr, exponent: float, plan: SamplingPlan,
                  basepoint=None) -> RatioProfile:
    """Profile of |f(x)-x|/|x|^exponent over the plan's annuli and directions."""
    if not (0.0 < exponent <= 1.0):
        raise ValueError("profile exponent must lie in (0, 1]")
    _check_plan_dimension(m, plan)
    dirs = profile_directions(plan, m)
    return _sample_profile(lambda x: _eval(m, x) - x, plan, dirs, exponent,
                           basepoint)


def difference_profile(f: MapExpr, g: MapExpr, plan: SamplingPlan,
                       exponent: float = 1.0, exact_affine: bool = False,
                       basepoint=None) -> RatioProfile:
    """Profile of |f(x)-g(x)|/|x|^exponent.

    With exact_affine, both maps are reduced to affine normal forms when
    possible and the difference is evaluated as (A_f-A_g)x + (b_f-b_g);
    for commuting affine pairs the matrix part cancels bitwise, which keeps
    the profile free of large-radius rounding noise.
    """
    _check_plan_dimension(f, plan)
    _check_plan_dimension(g, plan)
    diff_fn = None
    if exact_affine:
        nf = affine_normal_form(f, plan.dimension)
        ng = affine_normal_form(g, plan.dimension)
        if nf is not None and ng is not None:
            da = nf[0] - ng[0]
            db = nf[1] - ng[1]
            diff_fn = lambda x: da @ x + db
    if diff_fn is None:
        diff_fn = lambda x: _eval(f, x) - _eval(g, x)
    dirs = profile_directions(plan, f, g)
    return _sample_profile(diff_fn, plan, dirs, exponent, basepoint)


def _nonincreasing(values) -> bool:
    return all(b <= a * (1.0 + TREND_REL_SLACK) + TREND_ABS_SLACK
               for a, b in zip(values, values[1:]))


def _require_trend_plan(plan: SamplingPlan):
    if len(plan.radii) < 4 or math.log10(plan.r_max / plan.r_min) < 3.0:
        raise EmptyPlan(
            "trend verdicts need a plan with >= 4 annuli spanning >= 3 decades")


def _h_trend_verdict(profile: RatioProfile, tol: float) -> Verdict:
    """Shared decision rule for sublinear-decay questions.

    Confirmed: tail non-increasing and final value under tol. Refuted: the
    whole tail sits above tol and stays essentially flat or grows (keeping
    >= 95 percent of its starting value, so bounded perturbations of a
    constant profile still refute). Anything else, including genuine decay
    that has not yet crossed tol, is Inconclusive.
    """
    tail = profile.tail_entries()
    sups = [e.sup_ratio for e in tail]
    thresholds = {"tol": tol, "trend_rel_slack": TREND_REL_SLACK,
                  "trend_abs_slack": TREND_ABS_SLACK,
                  "refute_flatness": REFUTE_FLATNESS}
    evidence = {"exponent": profile.exponent, "profile": profile.to_rows(),
                "tail_start": tail[0].radius, "final_sup": sups[-1]}
    if _nonincreasing(sups) and sups[-1] < tol:
        return Verdict(CONFIRMED, evidence, thresholds)
    floor = min(sups)
    flat_or_growing = sups[-1] >= sups[0] * REFUTE_FLATNESS
    if floor > tol and flat_or_growing:
        evidence = dict(evidence)
        evidence["witnesses"] = [e.to_dict() for e in tail]
        evidence["tail_floor"] = floor
        return Verdict(REFUTED, evidence, thresholds)
    return Verdict(INCONCLUSIVE, evidence, thresholds)


def membership_H(m: MapExpr, plan: SamplingPlan, tol: float = DEFAULT_H_TOL,
                 basepoint=None) -> Verdict:
    """Decide whether the displacement ratio profile of ``m`` decays to zero."""
    _require_trend_plan(plan)
    profile = ratio_profile(m, 1.0, plan, basepoint=basepoint)
    return _h_trend_verdict(profile, tol)


def _divergence_decades(radii, sups, factor: float) -> float:
    """Decades covered by the maximal terminal run of >= factor-per-decade growth."""
    total = 0.0
    for i in range(len(sups) - 1, 0, -1):
        prev, cur = sups[i - 1], sups[i]
        decades = math.log10(radii[i] / radii[i - 1])
        if prev > 0 and cur > prev and cur >= prev * factor ** decades:
            total += decades
        else:
            break
    return total


def membership_H_alpha(m: MapExpr, alpha: float, plan: SamplingPlan,
                       divergence_factor: float = DEFAULT_DIVERGENCE_FACTOR,
                       divergence_decades: float = DEFAULT_DIVERGENCE_DECADES,
                       ) -> tuple[Verdict, HAlphaCertificate | None]:
    """Decide |f(x)-x| <= K|x|^alpha boundedness from the alpha-profile.

    Confirmed produces a sampled certificate with K inflated by 5 percent
    over the tail sup (guarding direction-sampling gaps); Refuted requires
    sustained growth of at least divergence_factor per decade over at least
    divergence_decades decades at the end of the profile.
    """
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange("alpha must lie in (0, 1)")
    profile = ratio_profile(m, alpha, plan)
    radii = profile.radii
    sups = profile.sups
    thresholds = {"alpha": alpha, "divergence_factor": divergence_factor,
                  "divergence_decades": divergence_decades,
                  "certificate_inflation": CERT_INFLATION}
    evidence = {"exponent": alpha, "profile": profile.to_rows()}
    run = _divergence_decades(radii, sups, divergence_factor)
    evidence["terminal_growth_decades"] = run
    if run >= divergence_decades:
        return Verdict(REFUTED, evidence, thresholds), None
    tail = profile.tail_entries()
    tail_sups = [e.sup_ratio for e in tail]
    if _nonincreasing(tail_sups):
        k = max(CERT_INFLATION * max(tail_sups), CERT_K_FLOOR)
        cert = HAlphaCertificate(
            alpha=alpha, K=k, R=tail[0].radius, kind="sampled",
            provenance=(f"tail sup {max(tail_sups):.6g} over radii >= "
                        f"{tail[0].radius:g}, inflated by {CERT_INFLATION}"))
        evidence = dict(evidence)
        evidence["certificate"] = cert.to_dict()
        return Verdict(CONFIRMED, evidence, thresholds), cert
    return Verdict(INCONCLUSIVE, evidence, thresholds), None


def limsup_liminf(profile: RatioProfile, tail_fraction: float = 0.5
                  ) -> tuple[float, float]:
    """Tail estimates of limsup and liminf of the profiled ratio."""
    if not profile.entries:
        raise EmptyProfile("profile has no entries")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail fraction must lie in (0, 1]")
    k = max(1, math.ceil(len(profile.entries) * tail_fraction))
    tail = profile.entries[-k:]
    return (max(e.sup_ratio for e in tail), min(e.inf_ratio for e in tail))


def check_certificate(m: MapExpr, cert: HAlphaCertificate, plan: SamplingPlan,
                      rel_slack: float = 1e-9) -> Verdict:
    """Verify |f(x)-x| <= K|x|^alpha at every sampled point with |x| >= R."""
    _check_plan_dimension(m, plan)
    dirs = profile_directions(plan, m)
    worst = None
    checked = 0
    for r in plan.radii:
        if r < cert.R:
            continue
        for u in dirs:
            x = r * u
            d = float(np.linalg.norm(_eval(m, x) - x))
            bound = cert.K * float(np.linalg.norm(x)) ** cert.alpha
            margin = bound * (1.0 + rel_slack) - d
            checked += 1
            if worst is None or margin < worst[0]:
                worst = (margin, r, tuple(u.tolist()), d, bound)
    thresholds = {"rel_slack": rel_slack, **cert.to_dict()}
    if checked == 0:
        raise EmptyPlan(f"no plan radii at or beyond certificate radius {cert.R}")
    margin, r, u, d, bound = worst
    evidence = {"points_checked": checked, "worst_margin": margin,
                "worst_point": {"r": r, "direction": list(u),
                                "displacement": d, "bound": bound}}
    status = CONFIRMED if margin >= 0 else REFUTED
    return Verdict(status, evidence, thresholds)
