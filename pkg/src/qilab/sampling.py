"""Deterministic sampling schedules: annulus radii, directions, point pairs.

Every estimator in the library consumes a SamplingPlan; identical
(plan, seed) always reproduces identical sample sets, which is what makes
reports byte-stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyPlan
from .maps import BallGadget, BlockRotation, Clamp, Compose, LogDrift, MapExpr

DEFAULT_SEED = 1729
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class SamplingPlan:
    """Radii schedule plus direction/pair budgets for all estimators.

    The recommended radii schedule is geometric (see geometric_plan); any
    strictly increasing positive sequence is accepted, which profile-style
    checks of gadget maps rely on.
    """

    radii: tuple[float, ...]
    directions_per_annulus: int = 64
    pair_samples: int = 48
    seed: int = DEFAULT_SEED
    dimension: int = 3

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise EmptyPlan("sampling plan needs at least one radius")
        if radii[0] <= 0 or any(not math.isfinite(r) for r in radii):
            raise ValueError("plan radii must be positive finite reals")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("plan radii must be strictly increasing")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "directions_per_annulus",
                           int(self.directions_per_annulus))
        object.__setattr__(self, "pair_samples", int(self.pair_samples))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "dimension", int(self.dimension))
        if self.directions_per_annulus < 1 or self.pair_samples < 1:
            raise ValueError("direction and pair budgets must be >= 1")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def r_min(self) -> float:
        return self.radii[0]

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    def restrict(self, r_lo: float) -> "SamplingPlan":
        """Keep only annuli with radius >= r_lo."""
        kept = tuple(r for r in self.radii if r >= r_lo)
        if not kept:
            raise EmptyPlan(f"no plan radii at or beyond {r_lo}")
        return replace(self, radii=kept)

    def with_radii(self, radii) -> "SamplingPlan":
        return replace(self, radii=tuple(radii))

    def to_dict(self) -> dict:
        return {"radii": list(self.radii),
                "directions_per_annulus": self.directions_per_annulus,
                "pair_samples": self.pair_samples,
                "seed": self.seed,
                "dimension": self.dimension}


def geometric_plan(r_min: float = 1e2, ratio: float = 10.0, annuli: int = 8,
                   **kwargs) -> SamplingPlan:
    if annuli < 1:
        raise EmptyPlan("need at least one annulus")
    radii = tuple(r_min * ratio ** i for i in range(annuli))
    return SamplingPlan(radii=radii, **kwargs)


def default_plan(dimension: int = 3, seed: int = DEFAULT_SEED) -> SamplingPlan:
    """The desk-scale default: 8 annuli from 1e2 to 1e9, 64 directions."""
    return geometric_plan(dimension=dimension, seed=seed)


def plan_from_dict(doc: dict) -> SamplingPlan:
    if "radii" in doc:
        radii = tuple(doc["radii"])
    else:
        r_min = float(doc.get("r_min", 1e2))
        ratio = float(doc.get("ratio", 10.0))
        annuli = int(doc.get("annuli", 8))
        radii = tuple(r_min * ratio ** i for i in range(annuli))
    return SamplingPlan(
        radii=radii,
        directions_per_annulus=doc.get("directions_per_annulus", 64),
        pair_samples=doc.get("pair_samples", 48),
        seed=doc.get("seed", DEFAULT_SEED),
        dimension=doc.get("dimension", 3))


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(entropy)))


def sphere_directions(dimension: int, count: int, seed: int) -> np.ndarray:
    """Deterministic unit directions: generalized spiral for n<=3, seeded
    normalized Gaussians beyond."""
    n, m = int(dimension), int(count)
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        ang = 2.0 * math.pi * np.arange(m) / m
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if n == 3:
        i = np.arange(m)
        z = 1.0 - 2.0 * (i + 0.5) / m
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = i * _GOLDEN_ANGLE
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    rng = _rng(seed, 0x5D1A)
    pts = rng.standard_normal((m, n))
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0] = 1.0
    return pts / norms[:, None]


def canonical_directions(dimension: int) -> np.ndarray:
    eye = np.eye(dimension)
    return np.concatenate([eye, -eye], axis=0)


def distinguished_directions(m: MapExpr, dimension: int) -> list[np.ndarray]:
    """Directions the asymptotic extremes of ``m`` are known to live on."""
    out: list[np.ndarray] = []

    def visit(node):
        if isinstance(node, BlockRotation):
            i, j = node.plane
            if max(i, j) < dimension:
                e = np.zeros(dimension)
                e[i] = 1.0
                out.append(e.copy())
                e[i], e[j] = 0.0, 1.0
                out.append(e.copy())
                diag = np.zeros(dimension)
                diag[i] = diag[j] = 1.0 / math.sqrt(2.0)
                out.append(diag)
        elif isinstance(node, LogDrift):
            if len(node.v) == dimension:
                out.append(np.asarray(node.v, dtype=float))
        elif isinstance(node, BallGadget):
            for c in node.gadget.centers:
                arr = np.asarray(c, dtype=float)
                nc = np.linalg.norm(arr)
                if nc > 0 and arr.size == dimension:
                    out.append(arr / nc)
        elif isinstance(node, Clamp):
            visit(node.inner)
        elif isinstance(node, Compose):
            visit(node.outer)
            visit(node.inner)

    visit(m)
    # include antipodes: witnesses often sit on the image side of a direction
    return out + [-d for d in out]


def profile_directions(plan: SamplingPlan, *for_maps: MapExpr) -> np.ndarray:
    """Canonical axes, then map-distinguished directions, then the plan set."""
    n = plan.dimension
    blocks = [canonical_directions(n)]
    for m in for_maps:
        extras = distinguished_directions(m, n)
        if extras:
            blocks.append(np.stack(extras))
    blocks.append(sphere_directions(n, plan.directions_per_annulus, plan.seed))
    stacked = np.concatenate(blocks, axis=0)
    seen: set[bytes] = set()
    keep = []
    for row in stacked:
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(row)
    return np.asarray(keep)


def annulus_pairs(plan: SamplingPlan, index: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Point pairs for one annulus, mixing three regimes.

    Near pairs (separation ~ r/100) probe the local Lipschitz behaviour, far
    pairs (antipodal) and cross-annulus pairs probe the large-separation
    inequalities; the two QI inequalities bind in different regimes.
    """
    r = plan.radii[index]
    n = plan.dimension
    dirs = sphere_directions(n, plan.directions_per_annulus, plan.seed)
    k = len(dirs)
    total = plan.pair_samples
    n_near = total // 3
    n_far = total // 3
    n_cross = total - n_near - n_far
    rng = _rng(plan.seed, 0xA17, index)
    pairs = []
    for j in range(n_near):
        u = dirs[j % k]
        w = rng.standard_normal(n)
        wn = np.linalg.norm(w)
        w = w / wn if wn > 0 else canonical_directions(n)[0]
        x = r * u
        pairs.append((x, x + (r / 100.0) * w))
    for j in range(n_far):
        u = dirs[(j + 1) % k]
        pairs.append((r * u, -r * u))
    if index + 1 < len(plan.radii):
        r2 = plan.radii[index + 1]
        for j in range(n_cross):
            u = dirs[j % k]
            u2 = dirs[(j + 3) % k]
            pairs.append((r * u, r2 * u2))
    return pairs


def all_pairs(plan: SamplingPlan) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for i in range(len(plan.radii)):
        out.extend(annulus_pairs(plan, i))
    return out


def gadget_plan(gadget, base_plan: SamplingPlan) -> SamplingPlan:
    """Plan whose annuli pass through the gadget's ball centers.

    Geometric plan radii never meet the balls, so profiles of a gadget map
    must be taken at the center norms (with center directions included via
    distinguished_directions).
    """
    data = gadget.gadget if isinstance(gadget, BallGadget) else gadget
    norms = sorted({float(np.linalg.norm(np.asarray(c))) for c in data.centers})
    if not norms:
        raise EmptyPlan("gadget has no balls")
    return replace(base_plan, radii=tuple(norms), dimension=data.dimension)
