"""Expression trees denoting self-maps of R^n, with exact evaluation.

Maps are closed, immutable expression trees rather than opaque callables:
this is what makes composition exact, serialization possible and structural
inversion rules available. Every node denotes a total map R^n -> R^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotExactlyInvertible, UnsupportedDimension

UNIT_NORM_TOL = 1e-12


def as_point(x, dimension: int | None = None) -> np.ndarray:
    """Validate and convert coordinates to a finite 1-d float64 vector."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("a point must be a 1-d vector with n >= 1 coordinates")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dimension is not None and arr.size != dimension:
        raise DimensionMismatch(
            f"point has dimension {arr.size}, expected {dimension}")
    return arr


def _coords(v) -> tuple[float, ...]:
    return tuple(float(c) for c in as_point(v))


class MapExpr:
    """Base class for map expression nodes."""

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class Identity(MapExpr):
    pass


@dataclass(frozen=True)
class Translation(MapExpr):
    v: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "v", _coords(self.v))


@dataclass(frozen=True)
class Dilation(MapExpr):
    factor: float

    def __post_init__(self):
        object.__setattr__(self, "factor", float(self.factor))
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise ValueError("dilation factor must be a positive finite real")


@dataclass(frozen=True)
class Affine(MapExpr):
    matrix: tuple[tuple[float, ...], ...]
    offset: tuple[float, ...]

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("affine matrix must be square")
        if not np.all(np.isfinite(a)):
            raise ValueError("affine matrix entries must be finite")
        b = as_point(self.offset, dimension=a.shape[0])
        object.__setattr__(self, "matrix", tuple(map(tuple, a.tolist())))
        object.__setattr__(self, "offset", tuple(b.tolist()))


@dataclass(frozen=True)
class BlockRotation(MapExpr):
    """Rotation by ``theta`` in the coordinate plane ``plane``, identity elsewhere."""

    theta: float
    plane: tuple[int, int] = (0, 1)

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        i, j = (int(k) for k in self.plane)
        if i < 0 or j < 0 or i == j:
            raise ValueError("rotation plane must be two distinct axis indices")
        object.__setattr__(self, "plane", (i, j))
        if not math.isfinite(self.theta):
            raise ValueError("rotation angle must be finite")


@dataclass(frozen=True)
class Reflection(MapExpr):
    """The antipodal map x -> -x (the order-2 isometry used for torsion in n=1)."""


@dataclass(frozen=True)
class LogDrift(MapExpr):
    """x -> x + A*ln(1+|x|)*v for a unit vector v.

    The unit-norm constraint keeps the coefficient A meaningful; a non-unit
    direction is rejected rather than silently normalized.
    """

    A: float
    v: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "A", float(self.A))
        vv = _coords(self.v)
        object.__setattr__(self, "v", vv)
        if abs(np.linalg.norm(vv) - 1.0) > UNIT_NORM_TOL:
            raise ValueError("drift direction must have unit norm (tol 1e-12)")


@dataclass(frozen=True)
class LinearOverLog(MapExpr):
    """x -> x + x/ln(2+|x|), sublinear but faster than every power |x|^a, a<1."""


@dataclass(frozen=True)
class PolarExp(MapExpr):
    """(r, theta) -> (e^{sin theta} r, theta) on R^2, with 0 -> 0."""


@dataclass(frozen=True)
class GadgetData:
    """Disjoint-ball data for a gadget map: balls B(centers[k], radii[k]).

    Invariants are checked exactly at construction: radii strictly increasing
    and positive, closed balls pairwise disjoint (which also keeps every
    center out of every other ball).
    """

    centers: tuple[tuple[float, ...], ...]
    radii: tuple[float, ...]
    drift_fraction: float = 0.25
    axis: int = -1

    def __post_init__(self):
        centers = tuple(_coords(c) for c in self.centers)
        radii = tuple(float(r) for r in self.radii)
        if len(centers) != len(radii) or not centers:
            raise ValueError("need one radius per center, at least one ball")
        n = len(centers[0])
        if any(len(c) != n for c in centers):
            raise DimensionMismatch("all ball centers must share one dimension")
        if any(not (r > 0 and math.isfinite(r)) for r in radii):
            raise ValueError("ball radii must be positive and finite")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("ball radii must be strictly increasing")
        frac = float(self.drift_fraction)
        if not (0.0 < frac < 1.0):
            raise ValueError("drift fraction must lie in (0, 1)")
        axis = int(self.axis)
        if axis < 0:
            axis += n
        if not (0 <= axis < n):
            raise ValueError("drift axis out of range")
        carr = np.asarray(centers, dtype=float)
        rarr = np.asarray(radii, dtype=float)
        for i in range(len(radii)):
            d = np.linalg.norm(carr[i + 1:] - carr[i], axis=1)
            if np.any(d <= rarr[i] + rarr[i + 1:]):
                raise ValueError("closed balls must be pairwise disjoint")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "drift_fraction", frac)
        object.__setattr__(self, "axis", axis)
        # evaluation caches, excluded from dataclass identity
        object.__setattr__(self, "_centers_arr", carr)
        object.__setattr__(self, "_radii_arr", rarr)

    @property
    def dimension(self) -> int:
        return len(self.centers[0])


@dataclass(frozen=True)
class BallGadget(MapExpr):
    gadget: GadgetData


@dataclass(frozen=True)
class Clamp(MapExpr):
    """Truncate the displacement field of ``inner`` to magnitude C*|x|^alpha.

    Identity inside radius R0; outside, the displacement keeps its direction
    but its length is capped, so the clamped map never moves a point farther
    from inner(x) than inner moved it from x.
    """

    inner: MapExpr
    alpha: float
    C: float
    R0: float

    def __post_init__(self):
        from .errors import AlphaOutOfRange
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "C", float(self.C))
        object.__setattr__(self, "R0", float(self.R0))
        if not (0.0 < self.alpha < 1.0):
            raise AlphaOutOfRange("clamp exponent must lie in (0, 1)")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError("clamp coefficient C must be positive")
        if not (self.R0 > 0 and math.isfinite(self.R0)):
            raise ValueError("clamp inner radius R0 must be positive")


@dataclass(frozen=True)
class Compose(MapExpr):
    """outer o inner, exact: evaluation applies inner first."""

    outer: MapExpr
    inner: MapExpr

    def __post_init__(self):
        _merge_dimensions(self.outer, self.inner)


_NODE_TYPES = (Identity, Translation, Dilation, Affine, BlockRotation,
               Reflection, LogDrift, LinearOverLog, PolarExp, BallGadget,
               Clamp, Compose)


def required_dimension(m: MapExpr) -> tuple[int | None, int]:
    """Return (exact dimension or None, minimum dimension) demanded by ``m``."""
    if isinstance(m, (Identity, Dilation, Reflection, LinearOverLog)):
        return None, 1
    if isinstance(m, Translation):
        return len(m.v), len(m.v)
    if isinstance(m, Affine):
        return len(m.offset), len(m.offset)
    if isinstance(m, BlockRotation):
        return None, max(m.plane) + 1
    if isinstance(m, LogDrift):
        return len(m.v), len(m.v)
    if isinstance(m, PolarExp):
        return 2, 2
    if isinstance(m, BallGadget):
        n = m.gadget.dimension
        return n, n
    if isinstance(m, Clamp):
        return required_dimension(m.inner)
    if isinstance(m, Compose):
        return _merge_dimensions(m.outer, m.inner)
    raise TypeError(f"not a map expression: {m!r}")


def _merge_dimensions(f: MapExpr, g: MapExpr) -> tuple[int | None, int]:
    ef, mf = required_dimension(f)
    eg, mg = required_dimension(g)
    if ef is not None and eg is not None and ef != eg:
        raise DimensionMismatch(
            f"cannot combine maps of dimension {ef} and {eg}")
    exact = ef if ef is not None else eg
    minimum = max(mf, mg)
    if exact is not None and exact < minimum:
        raise DimensionMismatch(
            f"map needs at least {minimum} coordinates but is fixed to {exact}")
    return exact, minimum


def dimension_of(m: MapExpr) -> int | None:
    """Exact ambient dimension of ``m`` if it is determined, else None."""
    return required_dimension(m)[0]


def evaluate(m: MapExpr, x) -> np.ndarray:
    """Evaluate the map at a point, exactly per constructor semantics."""
    arr = as_point(x)
    return _eval(m, arr)


def _eval(m: MapExpr, x: np.ndarray) -> np.ndarray:
    n = x.size
    if isinstance(m, Identity):
        return x.copy()
    if isinstance(m, Translation):
        if len(m.v) != n:
            raise DimensionMismatch(
                f"translation lives in dimension {len(m.v)}, point in {n}")
        return x + np.asarray(m.v)
    if isinstance(m, Dilation):
        return m.factor * x
    if isinstance(m, Affine):
        if len(m.offset) != n:
            raise DimensionMismatch(
                f"affine map lives in dimension {len(m.offset)}, point in {n}")
        return np.asarray(m.matrix) @ x + np.asarray(m.offset)
    if isinstance(m, BlockRotation):
        i, j = m.plane
        if max(i, j) >= n:
            raise DimensionMismatch(
                f"rotation plane {m.plane} needs dimension > {max(i, j)}")
        c, s = math.cos(m.theta), math.sin(m.theta)
        y = x.copy()
        y[i] = c * x[i] - s * x[j]
        y[j] = s * x[i] + c * x[j]
        return y
    if isinstance(m, Reflection):
        return -x
    if isinstance(m, LogDrift):
        if len(m.v) != n:
            raise DimensionMismatch(
                f"drift direction lives in dimension {len(m.v)}, point in {n}")
        return x + (m.A * math.log1p(np.linalg.norm(x))) * np.asarray(m.v)
    if isinstance(m, LinearOverLog):
        return x + x / math.log(2.0 + np.linalg.norm(x))
    if isinstance(m, PolarExp):
        if n != 2:
            raise UnsupportedDimension("the polar map is defined only on R^2")
        r = math.hypot(x[0], x[1])
        if r == 0.0:
            return x.copy()
        return math.exp(x[1] / r) * x
    if isinstance(m, BallGadget):
        return _eval_gadget(m.gadget, x)
    if isinstance(m, Clamp):
        r = np.linalg.norm(x)
        if r < m.R0:
            return x.copy()
        fx = _eval(m.inner, x)
        d = fx - x
        mag = np.linalg.norm(d)
        bound = m.C * r ** m.alpha
        if mag <= bound:
            # first branch: the clamped map IS the inner map here, bitwise
            return fx
        return x + (bound / mag) * d
    if isinstance(m, Compose):
        return _eval(m.outer, _eval(m.inner, x))
    raise TypeError(f"not a map expression: {m!r}")


def unit_ball_drift(y: np.ndarray, fraction: float, axis: int) -> np.ndarray:
    """Inner gadget map h on the closed unit ball.

    h(y) = y + fraction*max(0, 1-|y|)*e_axis: fixes the boundary sphere,
    maps the ball into itself, h(0) = fraction*e_axis, and is bi-Lipschitz
    with constants [1-fraction, 1+fraction].
    """
    slack = max(0.0, 1.0 - float(np.linalg.norm(y)))
    out = y.copy()
    out[axis] += fraction * slack
    return out


def _eval_gadget(g: GadgetData, x: np.ndarray) -> np.ndarray:
    if g.dimension != x.size:
        raise DimensionMismatch(
            f"gadget lives in dimension {g.dimension}, point in {x.size}")
    centers = g._centers_arr
    radii = g._radii_arr
    dists = np.linalg.norm(centers - x, axis=1)
    inside = dists <= radii
    if not inside.any():
        return x.copy()
    k = int(np.argmax(inside))  # balls are disjoint: at most one match
    rk = radii[k]
    rho = (x - centers[k]) / rk
    return centers[k] + rk * unit_ball_drift(rho, g.drift_fraction, g.axis)


def compose(f: MapExpr, g: MapExpr) -> MapExpr:
    """The exact composition f o g (g applied first)."""
    return Compose(f, g)


def compose_power(m: MapExpr, k: int) -> MapExpr:
    if k < 1:
        raise ValueError("power must be >= 1")
    out = m
    for _ in range(k - 1):
        out = Compose(out, m)
    return out


def exact_inverse(m: MapExpr) -> MapExpr:
    """Structural inverse, defined on the affine family only.

    General quasi-isometries get no numeric coarse inverse here; their
    uses are replaced by certificate-level constants downstream.
    """
    if isinstance(m, Identity):
        return Identity()
    if isinstance(m, Translation):
        return Translation(tuple(-c for c in m.v))
    if isinstance(m, Dilation):
        return Dilation(1.0 / m.factor)
    if isinstance(m, BlockRotation):
        return BlockRotation(-m.theta, m.plane)
    if isinstance(m, Reflection):
        return Reflection()
    if isinstance(m, Affine):
        a = np.asarray(m.matrix)
        try:
            inv = np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise NotExactlyInvertible("affine matrix is singular") from exc
        if not np.all(np.isfinite(inv)):
            raise NotExactlyInvertible("affine matrix is numerically singular")
        b = np.asarray(m.offset)
        return Affine(tuple(map(tuple, inv.tolist())),
                      tuple((-inv @ b).tolist()))
    if isinstance(m, Compose):
        return Compose(exact_inverse(m.inner), exact_inverse(m.outer))
    raise NotExactlyInvertible(
        f"{type(m).__name__} has no structural inverse; "
        "use certificate-level constants instead")


def displacement(m: MapExpr, x) -> float:
    """|f(x) - x|, the quantity all asymptotic invariants are built from."""
    arr = as_point(x)
    return float(np.linalg.norm(_eval(m, arr) - arr))


def affine_normal_form(m: MapExpr, dimension: int):
    """Reduce ``m`` to an exact pair (A, b) with m(x) = A x + b, or None.

    Compositions of affine-family nodes reduce by exact matrix algebra at
    unit scale; this is what keeps large-radius difference evaluations free
    of cancellation noise.
    """
    n = int(dimension)
    if isinstance(m, Identity):
        return np.eye(n), np.zeros(n)
    if isinstance(m, Translation):
        if len(m.v) != n:
            raise DimensionMismatch("translation dimension mismatch")
        return np.eye(n), np.asarray(m.v, dtype=float)
    if isinstance(m, Dilation):
        return m.factor * np.eye(n), np.zeros(n)
    if isinstance(m, Reflection):
        return -np.eye(n), np.zeros(n)
    if isinstance(m, BlockRotation):
        i, j = m.plane
        if max(i, j) >= n:
            raise DimensionMismatch("rotation plane outside dimension")
        a = np.eye(n)
        c, s = math.cos(m.theta), math.sin(m.theta)
        a[i, i] = c
        a[i, j] = -s
        a[j, i] = s
        a[j, j] = c
        return a, np.zeros(n)
    if isinstance(m, Affine):
        if len(m.offset) != n:
            raise DimensionMismatch("affine dimension mismatch")
        return np.asarray(m.matrix, dtype=float), np.asarray(m.offset, dtype=float)
    if isinstance(m, Compose):
        outer = affine_normal_form(m.outer, n)
        inner = affine_normal_form(m.inner, n)
        if outer is None or inner is None:
            return None
        ao, bo = outer
        ai, bi = inner
        return ao @ ai, ao @ bi + bo
    return None


def map_nodes(m: MapExpr):
    """Yield every node of the expression tree (pre-order)."""
    yield m
    if isinstance(m, Clamp):
        yield from map_nodes(m.inner)
    elif isinstance(m, Compose):
        yield from map_nodes(m.outer)
        yield from map_nodes(m.inner)
