"""Group-level analysis: coset tests mod the sublinear subgroup, commutation
defects, torsion orders, certificate algebra, and the disjoint-ball gadget
used to exhibit non-central classes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import (CONFIRMED, DEFAULT_H_TOL, HAlphaCertificate,
                          RatioProfile, Verdict, _h_trend_verdict,
                          _require_trend_plan, difference_profile,
                          membership_H, ratio_profile)
from .certify import QICertificate
from .errors import (AlphaMismatch, DimensionMismatch, InsufficientAnnuli,
                     NotOutsideH, WitnessTooSparse)
from .maps import (BallGadget, GadgetData, Identity, MapExpr, _eval,
                   as_point, compose, compose_power, required_dimension)
from .sampling import SamplingPlan


@dataclass(frozen=True)
class WitnessSequence:
    """Points a_m with |a_m|, |f(a_m)| and |f(a_m)-a_m| strictly increasing
    and |a_{m+1}| > |f(a_m)|, certifying linear-size displacement."""

    points: tuple[tuple[float, ...], ...]
    description: str = ""

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in as_point(p)) for p in self.points)
        norms = [float(np.linalg.norm(p)) for p in pts]
        if any(b <= a for a, b in zip(norms, norms[1:])):
            raise ValueError("witness norms must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def norms(self) -> list[float]:
        return [float(np.linalg.norm(p)) for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


def coset_equal_mod_H(f: MapExpr, g: MapExpr, plan: SamplingPlan,
                      tol: float = DEFAULT_H_TOL) -> Verdict:
    """Decide H[f] = H[g] via decay of |f(x)-g(x)|/|x|.

    This is exactly the sublinear-membership trend test applied to the
    difference profile, so thresholds match membership_H verbatim.
    """
    _require_trend_plan(plan)
    profile = difference_profile(f, g, plan, exponent=1.0)
    return _h_trend_verdict(profile, tol)


def commutation_defect(f: MapExpr, g: MapExpr, plan: SamplingPlan
                       ) -> tuple[RatioProfile, RatioProfile]:
    """Profiles of |(f o g)(x) - (g o f)(x)|, absolute and divided by |x|.

    Both composition orders are reduced to exact affine normal forms when
    possible, so constant defects like (lambda-1)b come out constant to
    machine precision even at the largest annuli.
    """
    fg = compose(f, g)
    gf = compose(g, f)
    absolute = difference_profile(fg, gf, plan, exponent=0.0, exact_affine=True)
    relative = difference_profile(fg, gf, plan, exponent=1.0, exact_affine=True)
    return absolute, relative


def torsion_order_mod_H(m: MapExpr, k_max: int, plan: SamplingPlan,
                        tol: float = DEFAULT_H_TOL) -> int | None:
    """Smallest k with m^k bounded-distance trivial and all lower powers not.

    Returns None when no power up to k_max is confirmed trivial, or when an
    earlier power was inconclusive so the exact order cannot be certified.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    statuses = []
    for k in range(1, k_max + 1):
        verdict = coset_equal_mod_H(compose_power(m, k), Identity(), plan, tol)
        statuses.append(verdict.status)
        if verdict.confirmed:
            if all(s == "refuted" for s in statuses[:-1]):
                return k
            return None
    return None


def composition_certificate(cert_f: HAlphaCertificate,
                            cert_g: HAlphaCertificate,
                            qi_g: QICertificate) -> HAlphaCertificate:
    """Displacement certificate for f o g from certificates of the parts.

    K' is the linear growth constant of the inner map; its additive constant
    is absorbed as K' + C/max(R,1), which reduces to K' for analytic affine
    certificates (C = 0).
    """
    if cert_f.alpha != cert_g.alpha:
        raise AlphaMismatch(
            f"exponents differ: {cert_f.alpha} vs {cert_g.alpha}")
    alpha = cert_f.alpha
    r = max(cert_f.R, cert_g.R)
    k_prime = qi_g.K + qi_g.C / max(r, 1.0)
    k = max(k_prime ** alpha * cert_f.K, cert_g.K)
    return HAlphaCertificate(
        alpha=alpha, K=k, R=r, kind="derived",
        provenance=(f"composition: max(K'^a*Kf, Kg) with K'={k_prime:.6g}, "
                    f"Kf={cert_f.K:.6g}, Kg={cert_g.K:.6g}"))


def conjugation_certificate(qi_f: QICertificate, qi_finv: QICertificate,
                            cert_g: HAlphaCertificate,
                            equiv_slack: float = 0.0) -> HAlphaCertificate:
    """Displacement certificate for f o g o f^{-1}.

    Chains |fgf^-1(x)-x| <= lambda |gf^-1(x)-f^-1(x)| + C + mu with
    |f^-1(x)| <= a|x| + b and the subadditive bound
    (a|x|+b)^alpha <= a^alpha |x|^alpha + b^alpha, valid once |x| >= 1.
    """
    lam = qi_f.K
    a, b = qi_finv.K, qi_finv.C
    alpha = cert_g.alpha
    k = (lam * cert_g.K * a ** alpha + lam * cert_g.K * b ** alpha
         + qi_f.C + equiv_slack)
    r = max(cert_g.R, 1.0)
    return HAlphaCertificate(
        alpha=alpha, K=k, R=r, kind="derived",
        provenance=(f"conjugation: lambda={lam:.6g}, a={a:.6g}, b={b:.6g}, "
                    f"C={qi_f.C:.6g}, mu={equiv_slack:.6g}, Kg={cert_g.K:.6g}"))


def build_witness_sequence(f: MapExpr, plan: SamplingPlan,
                           eps_floor: float = DEFAULT_H_TOL
                           ) -> tuple[WitnessSequence, float]:
    """Greedy extraction of witness points from a refuting profile.

    Scans the refuting annuli in order, keeping a point when |a|, |f(a)| and
    |f(a)-a| all strictly increase and the new norm clears the previous
    image norm; the achieved eps is the worst kept ratio.
    """
    verdict = membership_H(f, plan, tol=eps_floor)
    if not verdict.refuted:
        raise NotOutsideH(
            f"membership test returned {verdict.status}; witnesses need a "
            "refuted sublinear test")
    profile = ratio_profile(f, 1.0, plan)
    kept: list[np.ndarray] = []
    ratios: list[float] = []
    prev = None  # (|a|, |f(a)|, |f(a)-a|)
    for entry in profile.entries:
        if entry.sup_ratio < eps_floor:
            continue
        x = entry.radius * np.asarray(entry.argmax_direction)
        fx = _eval(f, x)
        stats = (float(np.linalg.norm(x)), float(np.linalg.norm(fx)),
                 float(np.linalg.norm(fx - x)))
        if prev is not None:
            if not (stats[0] > prev[1] and stats[0] > prev[0]
                    and stats[1] > prev[1] and stats[2] > prev[2]):
                continue
        kept.append(x)
        ratios.append(stats[2] / stats[0])
        prev = stats
    if len(kept) < 3 or (prev is not None and prev[0] < plan.r_max / 10.0):
        raise InsufficientAnnuli(
            f"only {len(kept)} usable witness points within the plan range")
    seq = WitnessSequence(points=tuple(tuple(p.tolist()) for p in kept),
                          description=(f"greedy argmax witnesses, "
                                       f"eps_floor={eps_floor:g}"))
    return seq, min(ratios)


@dataclass(frozen=True)
class CenterRule:
    """Ball radius min(ceil((eps/2)|a|), |f(a)-a|/2), the center-triviality rule."""


@dataclass(frozen=True)
class CentralizerRule:
    """Ball radius min(floor(|a|^{alpha/2}/(K+1)), |f(a)-a|/2), which keeps
    the gadget inside the alpha-subgroup."""

    alpha: float
    K: float


def _candidate_radius(rule, norm_a: float, half_disp: float,
                      eps: float) -> float:
    if isinstance(rule, CenterRule):
        return min(float(math.ceil(0.5 * eps * norm_a)), half_disp)
    if isinstance(rule, CentralizerRule):
        return min(float(math.floor(norm_a ** (rule.alpha / 2.0)
                                    / (rule.K + 1.0))), half_disp)
    raise TypeError(f"unknown radius rule: {rule!r}")


def build_ball_gadget(f: MapExpr, seq: WitnessSequence, eps: float,
                      rule=CenterRule()) -> tuple[BallGadget, GadgetData]:
    """Construct the gadget map: rescaled unit-ball drift on disjoint balls
    around selected image points, identity elsewhere.

    Greedy selection scans the witness sequence in order and accepts a point
    when its ball has a larger radius than the last accepted one, is
    disjoint from all accepted balls, and excludes every other witness point
    and image. Inside ball k the map is rho_k^{-1} o h o rho_k with
    rho_k(x) = (x - f(a_k))/r_k and h the unit-ball drift with h(0) at
    height 1/4 on the drift axis.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = [np.asarray(p) for p in seq.points]
    images = [_eval(f, p) for p in pts]
    n = pts[0].size
    accepted: list[int] = []
    radii: list[float] = []
    for j, (a, fa) in enumerate(zip(pts, images)):
        half_disp = 0.5 * float(np.linalg.norm(fa - a))
        r = _candidate_radius(rule, float(np.linalg.norm(a)), half_disp, eps)
        if r <= 0 or (radii and r <= radii[-1]):
            continue
        center = fa
        disjoint = all(
            np.linalg.norm(center - images[i]) > r + radii[m]
            for m, i in enumerate(accepted))
        excludes_points = all(
            float(np.linalg.norm(p - center)) > r for p in pts)
        excludes_images = all(
            i == j or float(np.linalg.norm(images[i] - center)) > r
            for i in range(len(images)))
        if disjoint and excludes_points and excludes_images:
            accepted.append(j)
            radii.append(r)
    if len(accepted) < 3:
        raise WitnessTooSparse(
            f"only {len(accepted)} disjoint balls admissible at eps={eps:g}; "
            "retry with a smaller eps")
    data = GadgetData(
        centers=tuple(tuple(images[j].tolist()) for j in accepted),
        radii=tuple(radii),
        drift_fraction=0.25,
        axis=n - 1)
    return BallGadget(data), data


def gadget_witness_points(seq: WitnessSequence, data: GadgetData,
                          f: MapExpr) -> list[np.ndarray]:
    """Witness points of ``seq`` whose image is a gadget ball center."""
    centers = {tuple(c) for c in data.centers}
    out = []
    for p in seq.points:
        arr = np.asarray(p)
        if tuple(_eval(f, arr).tolist()) in centers:
            out.append(arr)
    return out


def gadget_commutator_ratios(f: MapExpr, gadget: BallGadget,
                             seq: WitnessSequence) -> list[float]:
    """|fg(a_k) - gf(a_k)|/|a_k| at the witness points backing the gadget."""
    ratios = []
    for a in gadget_witness_points(seq, gadget.gadget, f):
        fg = _eval(f, _eval(gadget, a))
        gf = _eval(gadget, _eval(f, a))
        ratios.append(float(np.linalg.norm(fg - gf) / np.linalg.norm(a)))
    return ratios
