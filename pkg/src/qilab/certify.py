"""Estimation and verification of quasi-isometry constants (K, C).

Sampled certificates are evidence, not proofs: finite sampling cannot
certify universally quantified inequalities, and every certificate carries
its kind and the worst sampled ratios it was built from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import CONFIRMED, INCONCLUSIVE, REFUTED, Verdict
from .errors import EmptyPlan, NotExactlyInvertible
from .maps import MapExpr, _eval, affine_normal_form, exact_inverse
from .sampling import (SamplingPlan, all_pairs, canonical_directions,
                       sphere_directions)

# K is searched on a fixed multiplicative grid: reproducible, no fitting.
K_GRID_BASE = 1.0 + 2.0 ** -10
K_GRID_STEP = 2.0 ** 0.125
K_GRID_MAX = 2.0 ** 10
K_GRID = tuple(K_GRID_BASE * 2.0 ** (j / 8.0)
               for j in range(int(8 * math.log2(K_GRID_MAX)) + 1))

PAIR_SLACK_REL = 1e-9


@dataclass(frozen=True)
class QICertificate:
    """Constants K > 1, C >= 0 with sampled-evidence metadata."""

    K: float
    C: float
    kind: str  # analytic | sampled
    evidence: dict

    def __post_init__(self):
        if not self.K > 1.0:
            raise ValueError("quasi-isometry constant K must exceed 1")
        if self.C < 0.0:
            raise ValueError("additive constant C must be nonnegative")
        if self.kind == "sampled" and not self.evidence:
            raise ValueError("sampled certificates must carry evidence")

    def to_dict(self) -> dict:
        return {"K": self.K, "C": self.C, "kind": self.kind,
                "evidence": self.evidence}


def grid_ceil(x: float) -> float | None:
    """Smallest grid value at or above x (None if beyond the grid top)."""
    target = x * (1.0 - 1e-12)
    for k in K_GRID:
        if k >= target:
            return k
    return None


def _pair_data(m: MapExpr, plan: SamplingPlan):
    pairs = all_pairs(plan)
    if not pairs:
        raise EmptyPlan("plan produced no sample pairs")
    d1 = np.empty(len(pairs))
    d2 = np.empty(len(pairs))
    for i, (x, y) in enumerate(pairs):
        d1[i] = np.linalg.norm(x - y)
        d2[i] = np.linalg.norm(_eval(m, x) - _eval(m, y))
    return pairs, d1, d2


def _evidence(pairs, d1, d2, witness_count: int = 3) -> dict:
    ratios = d2 / d1
    order_hi = np.argsort(-ratios)[:witness_count]
    order_lo = np.argsort(ratios)[:witness_count]
    witnesses = []
    for idx in order_hi:
        x, y = pairs[idx]
        witnesses.append({"kind": "upper", "x": x.tolist(), "y": y.tolist(),
                          "ratio": float(ratios[idx])})
    for idx in order_lo:
        x, y = pairs[idx]
        witnesses.append({"kind": "lower", "x": x.tolist(), "y": y.tolist(),
                          "ratio": float(ratios[idx])})
    return {"pairs": len(pairs),
            "max_upper_ratio": float(ratios.max()),
            "min_lower_ratio": float(ratios.min()),
            "witness_pairs": witnesses}


def _residual(k: float, d1: np.ndarray, d2: np.ndarray) -> float:
    """Smallest C making both inequalities hold at this K on all pairs."""
    upper = float(np.max(d2 - k * d1))
    lower = float(np.max(d1 / k - d2))
    return max(0.0, upper, lower)


def estimate_qi_constants(m: MapExpr, plan: SamplingPlan) -> QICertificate:
    """Smallest feasible (K, C) on the fixed K-grid for the sampled pairs.

    The affine family gets analytic constants (K from the singular values
    of the linear part, C = 0), snapped up to the grid so K > 1 holds for
    exact isometries as well. Sampled evidence is attached in both cases.
    """
    pairs, d1, d2 = _pair_data(m, plan)
    evidence = _evidence(pairs, d1, d2)

    normal = affine_normal_form(m, plan.dimension)
    if normal is not None:
        sigma = np.linalg.svd(normal[0], compute_uv=False)
        smin, smax = float(sigma.min()), float(sigma.max())
        if smin > 0.0:
            k = grid_ceil(max(smax, 1.0 / smin, 1.0))
            if k is not None:
                return QICertificate(K=k, C=0.0, kind="analytic",
                                     evidence=evidence)

    residuals = [_residual(k, d1, d2) for k in K_GRID]
    floor = residuals[-1]
    scale = max(1.0, float(d2.max()))
    threshold = floor + max(1e-12 * scale, 0.01 * floor)
    for k, c in zip(K_GRID, residuals):
        if c <= threshold:
            return QICertificate(K=k, C=c, kind="sampled", evidence=evidence)
    return QICertificate(K=K_GRID[-1], C=residuals[-1], kind="sampled",
                         evidence=evidence)


def check_qi_inequalities(m: MapExpr, cert: QICertificate,
                          plan: SamplingPlan) -> Verdict:
    """Verify d(fx,fy) within [d(x,y)/K - C, K d(x,y) + C] on the plan's pairs."""
    pairs, d1, d2 = _pair_data(m, plan)
    thresholds = {"K": cert.K, "C": cert.C, "rel_slack": PAIR_SLACK_REL}
    worst = None
    for i in range(len(pairs)):
        slack = PAIR_SLACK_REL * max(1.0, d1[i], d2[i])
        margin = min((cert.K * d1[i] + cert.C + slack) - d2[i],
                     d2[i] - (d1[i] / cert.K - cert.C - slack))
        if worst is None or margin < worst[0]:
            worst = (float(margin), i)
    margin, i = worst
    x, y = pairs[i]
    evidence = {"pairs": len(pairs), "worst_margin": margin,
                "witness_pair": {"x": x.tolist(), "y": y.tolist(),
                                 "d1": float(d1[i]), "d2": float(d2[i]),
                                 "ratio": float(d2[i] / d1[i])}}
    return Verdict(CONFIRMED if margin >= 0 else REFUTED, evidence, thresholds)


def _local_grid(n: int, half_width: float, points: int = 5) -> np.ndarray:
    axes = [np.linspace(-half_width, half_width, points)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _search_preimage(m: MapExpr, target: np.ndarray, bound: float,
                     iters: int = 80, damping: float = 0.5):
    """Best-effort preimage search: structural inverse seed, damped residual
    iteration, then local grid refinement. Returns (best_x, best_dist)."""
    n = target.size
    seeds = [target, -target]
    try:
        seeds.insert(0, _eval(exact_inverse(m), target))
    except NotExactlyInvertible:
        pass
    tol = 1e-9 * max(1.0, float(np.linalg.norm(target)))
    best_x, best_d = None, math.inf
    for seed in seeds:
        x = seed.astype(float).copy()
        for _ in range(iters):
            resid = _eval(m, x) - target
            d = float(np.linalg.norm(resid))
            if d < best_d:
                best_x, best_d = x.copy(), d
            if d <= tol:
                return best_x, best_d
            x = x - damping * resid
            if not np.all(np.isfinite(x)):
                break
    if n <= 3 and best_x is not None and best_d > tol:
        width = max(bound, best_d)
        for _ in range(3):
            offsets = _local_grid(n, width)
            for off in offsets:
                cand = best_x + off
                d = float(np.linalg.norm(_eval(m, cand) - target))
                if d < best_d:
                    best_x, best_d = cand, d
            width /= 4.0
    return best_x, best_d


def check_quasi_surjectivity(m: MapExpr, plan: SamplingPlan,
                             bound: float) -> Verdict:
    """Search preimages for target points on every annulus.

    Confirmed when every sampled target has a verified preimage within
    ``bound``; a finite search cannot refute quasi-surjectivity, so failures
    yield Inconclusive with the unresolved targets reported.
    """
    n = plan.dimension
    dirs = sphere_directions(n, min(plan.directions_per_annulus, 16), plan.seed)
    if len(dirs) == 0:
        raise EmptyPlan("no target directions")
    missed = []
    worst = 0.0
    checked = 0
    for r in plan.radii:
        for u in np.concatenate([canonical_directions(n)[:2], dirs]):
            target = r * u
            _, dist = _search_preimage(m, target, bound)
            checked += 1
            worst = max(worst, dist)
            if dist > bound * (1.0 + PAIR_SLACK_REL):
                missed.append({"target": target.tolist(), "best_dist": dist})
    thresholds = {"bound": bound}
    evidence = {"targets": checked, "worst_best_distance": worst,
                "unresolved": missed[:5]}
    if not missed:
        return Verdict(CONFIRMED, evidence, thresholds)
    evidence["note"] = ("search resolution insufficient for the listed "
                        "targets; a finite search cannot refute")
    return Verdict(INCONCLUSIVE, evidence, thresholds)
