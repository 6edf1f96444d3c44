import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qilab import (Affine, BlockRotation, Clamp, Compose, Dilation, Identity,
                   LinearOverLog, LogDrift, PolarExp, Reflection, Translation,
                   compose, displacement, evaluate, exact_inverse)
from qilab.errors import (AlphaOutOfRange, DimensionMismatch,
                          NotExactlyInvertible, UnsupportedDimension)


def test_identity_evaluation():
    assert np.array_equal(evaluate(Identity(), [3.0, 4.0]), [3.0, 4.0])


def test_logdrift_fixes_origin():
    out = evaluate(LogDrift(1.0, (1.0, 0.0)), [0.0, 0.0])
    assert np.array_equal(out, [0.0, 0.0])


def test_half_turn_rotation():
    out = evaluate(BlockRotation(math.pi, (0, 1)), [1.0, 0.0])
    assert out == pytest.approx([-1.0, 0.0], abs=1e-15)


def test_dilation_direct():
    assert np.array_equal(evaluate(Dilation(2.0), [1.0, 1.0]), [2.0, 2.0])


def test_compose_identity_is_transparent():
    g = LogDrift(0.5, (0.0, 1.0))
    x = np.array([2.0, -3.0])
    assert np.array_equal(evaluate(compose(Identity(), g), x), evaluate(g, x))


def test_compose_dilations_multiplies():
    m = compose(Dilation(2.0), Dilation(3.0))
    assert np.array_equal(evaluate(m, [1.0, 0.0]), [6.0, 0.0])


def test_translation_inverse_pair_restores_input():
    v = (1.5, -2.0, 0.25)
    m = compose(Translation(v), Translation(tuple(-c for c in v)))
    x = np.array([9.0, 8.0, 7.0])
    assert evaluate(m, x) == pytest.approx(x, abs=1e-12)


def test_exact_inverse_dilation():
    assert exact_inverse(Dilation(2.0)) == Dilation(0.5)


def test_exact_inverse_rotation():
    inv = exact_inverse(BlockRotation(0.7, (0, 2)))
    assert inv == BlockRotation(-0.7, (0, 2))


def test_exact_inverse_rejects_logdrift():
    with pytest.raises(NotExactlyInvertible):
        exact_inverse(LogDrift(1.0, (1.0, 0.0, 0.0)))


def test_exact_inverse_affine_roundtrip():
    m = Affine(((2.0, 1.0), (0.0, 1.0)), (3.0, -1.0))
    both = compose(m, exact_inverse(m))
    x = np.array([13.0, -7.0])
    assert evaluate(both, x) == pytest.approx(x, rel=1e-12)


def test_displacement_reflection_doubles_norm():
    x = [3.0, 4.0, 0.0]
    assert displacement(Reflection(), x) == pytest.approx(10.0, rel=1e-15)


@pytest.mark.parametrize("k", [2, 3, 4, 6, 9])
def test_displacement_chord_formula(k):
    # |R(x)-x| = 2|v| sin(pi/k) for in-plane component v
    theta = 2.0 * math.pi / k
    x = np.array([5.0, -2.0, 7.0])
    v = math.hypot(x[0], x[1])
    got = displacement(BlockRotation(theta, (0, 1)), x)
    assert got == pytest.approx(2.0 * v * math.sin(math.pi / k), rel=1e-12)


def test_displacement_identity_zero():
    assert displacement(Identity(), [1.0, 2.0, 3.0]) == 0.0


def test_rotation_preserves_norm():
    rng = np.random.default_rng(7)
    m = BlockRotation(1.234, (0, 2))
    for _ in range(50):
        x = rng.normal(size=3) * 10.0 ** rng.integers(0, 9)
        nx = np.linalg.norm(x)
        assert np.linalg.norm(evaluate(m, x)) == pytest.approx(nx, rel=1e-12)


def test_logdrift_lipschitz_bound():
    # |f(x)-f(y)| <= (1+|A|)|x-y| on sampled pairs
    a = 1.0
    m = LogDrift(a, (1.0, 0.0, 0.0))
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = rng.normal(size=3) * 10.0 ** rng.uniform(0, 6)
        y = x + rng.normal(size=3) * 10.0 ** rng.uniform(-2, 4)
        lhs = np.linalg.norm(evaluate(m, x) - evaluate(m, y))
        assert lhs <= (1.0 + abs(a)) * np.linalg.norm(x - y) + 1e-9


@pytest.mark.parametrize("lam,mu", [(1.0, 1.5), (2.0, 3.0), (0.5, 0.25)])
def test_dilation_difference_is_exact(lam, mu):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.normal(size=3) * 10.0 ** rng.uniform(0, 9)
        d = np.linalg.norm(evaluate(Dilation(lam), x) - evaluate(Dilation(mu), x))
        assert d / np.linalg.norm(x) == pytest.approx(abs(lam - mu), rel=1e-12)


def _affine_atoms(dim):
    return st.sampled_from([
        Identity(),
        Dilation(2.0),
        Dilation(0.5),
        Translation(tuple(float(i + 1) for i in range(dim))),
        BlockRotation(0.9, (0, 1)),
        Reflection(),
    ])


@settings(max_examples=60, deadline=None)
@given(st.lists(_affine_atoms(3), min_size=3, max_size=3),
       st.tuples(*([st.floats(-50, 50)] * 3)))
def test_composition_associativity(atoms, coords):
    f, g, h = atoms
    x = np.array(coords)
    left = evaluate(compose(compose(f, g), h), x)
    right = evaluate(compose(f, compose(g, h)), x)
    scale = max(1.0, float(np.linalg.norm(left)))
    assert np.linalg.norm(left - right) <= 1e-12 * scale


def test_polar_map_formula():
    # (r, theta) -> (e^{sin theta} r, theta)
    x = np.array([0.0, 2.0])  # theta = pi/2
    out = evaluate(PolarExp(), x)
    assert out == pytest.approx([0.0, 2.0 * math.e], rel=1e-15)
    assert np.array_equal(evaluate(PolarExp(), [0.0, 0.0]), [0.0, 0.0])


def test_polar_map_needs_dimension_two():
    with pytest.raises(UnsupportedDimension):
        evaluate(PolarExp(), [1.0, 2.0, 3.0])


def test_logdrift_requires_unit_direction():
    with pytest.raises(ValueError):
        LogDrift(1.0, (1.0, 1.0))


def test_clamp_validates_alpha():
    with pytest.raises(AlphaOutOfRange):
        Clamp(Identity(), 1.5, 1.0, 10.0)


def test_dimension_mismatch_is_rejected():
    with pytest.raises(DimensionMismatch):
        evaluate(Translation((1.0, 2.0)), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        compose(Translation((1.0, 2.0)), LogDrift(1.0, (1.0, 0.0, 0.0)))


def test_points_must_be_finite():
    with pytest.raises(ValueError):
        evaluate(Identity(), [1.0, float("nan")])


def test_affine_matrix_must_be_square():
    with pytest.raises(ValueError):
        Affine(((1.0, 0.0),), (0.0,))


def test_clamp_first_branch_is_bitwise_inner():
    # where |f(x)-x| <= C|x|^alpha the clamp returns f(x) itself
    f = LogDrift(1.0, (0.0, 0.0, 1.0))
    g = Clamp(f, 0.9, 5.0, 10.0)
    x = np.array([40.0, -3.0, 8.0])
    assert np.array_equal(evaluate(g, x), evaluate(f, x))


def test_clamp_is_identity_inside_inner_radius():
    g = Clamp(LinearOverLog(), 0.5, 1.0, 100.0)
    x = np.array([3.0, 4.0, 0.0])
    assert np.array_equal(evaluate(g, x), x)
