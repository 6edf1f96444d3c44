import math

import numpy as np
import pytest

from qilab import (Affine, BlockRotation, Clamp, Dilation, Identity,
                   LinearOverLog, LogDrift, QICertificate, Translation,
                   canonical_json, check_qi_inequalities,
                   check_quasi_surjectivity, estimate_qi_constants,
                   geometric_plan, grid_ceil)
from qilab.certify import K_GRID

# Grid floor (1 + 2^-10) and the grid point just above 2: frozen from the
# grid definition, independently recomputed here.
K_MIN = 1.0009765625
K_TWO = 2.001953125


def test_grid_endpoints():
    assert K_GRID[0] == K_MIN
    assert grid_ceil(1.0) == K_MIN
    assert grid_ceil(2.0) == K_TWO


def test_translation_certificate_is_minimal_isometry(plan3):
    cert = estimate_qi_constants(Translation((1.0, 2.0, 3.0)), plan3)
    assert cert.kind == "analytic"
    assert cert.K == K_MIN
    assert cert.C == 0.0
    # all pair ratios are 1 for an isometry
    assert cert.evidence["max_upper_ratio"] == pytest.approx(1.0, rel=1e-12)
    assert cert.evidence["min_lower_ratio"] == pytest.approx(1.0, rel=1e-12)


def test_dilation_certificate_matches_exact_ratio(plan3):
    # oracle: |2x - 2y| / |x - y| = 2 exactly for every pair, so the
    # certificate K is the smallest grid point at or above 2
    cert = estimate_qi_constants(Dilation(2.0), plan3)
    assert cert.K == K_TWO
    assert cert.C == 0.0


def test_logdrift_certificate_below_lipschitz_constant(plan3):
    cert = estimate_qi_constants(LogDrift(1.0, (1.0, 0.0, 0.0)), plan3)
    assert cert.kind == "sampled"
    assert cert.K <= 2.0 + 0.01
    assert cert.evidence["max_upper_ratio"] <= 2.0 + 1e-9


def test_check_identity_with_small_constants(plan3):
    verdict = check_qi_inequalities(
        Identity(), QICertificate(K=1.01, C=0.0, kind="analytic",
                                  evidence={"pairs": 0}), plan3)
    assert verdict.confirmed


def test_check_refutes_dilation_three_with_k_two(plan3):
    # oracle: exact ratio 3 violates K=2, C=0 on every pair
    verdict = check_qi_inequalities(
        Dilation(3.0), QICertificate(K=2.0, C=0.0, kind="analytic",
                                     evidence={"pairs": 0}), plan3)
    assert verdict.refuted
    witness = verdict.evidence["witness_pair"]
    assert witness["ratio"] == pytest.approx(3.0, rel=1e-9)


def test_check_confirms_logdrift_with_paper_constants(plan3):
    verdict = check_qi_inequalities(
        LogDrift(1.0, (1.0, 0.0, 0.0)),
        QICertificate(K=2.0, C=1.0, kind="analytic", evidence={"pairs": 0}),
        plan3)
    assert verdict.confirmed


def test_monotonicity_of_constants(plan3):
    m = Clamp(LinearOverLog(), 0.5, 1.0, 100.0)
    cert = estimate_qi_constants(m, plan3)
    assert check_qi_inequalities(m, cert, plan3).confirmed
    bigger = QICertificate(K=cert.K * 2, C=cert.C + 5.0, kind=cert.kind,
                           evidence=cert.evidence)
    assert check_qi_inequalities(m, bigger, plan3).confirmed


def test_analytic_never_contradicted_by_samples(plan3):
    rng = np.random.default_rng(23)
    for _ in range(5):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        scale = np.diag(2.0 ** rng.uniform(-1.5, 1.5, size=3))
        a = q @ scale
        m = Affine(tuple(map(tuple, a.tolist())),
                   tuple(rng.normal(size=3).tolist()))
        cert = estimate_qi_constants(m, plan3)
        sigma = np.linalg.svd(a, compute_uv=False)
        assert cert.kind == "analytic"
        assert cert.evidence["max_upper_ratio"] <= sigma.max() + 1e-9
        assert cert.evidence["min_lower_ratio"] >= sigma.min() - 1e-9
        assert cert.K >= max(sigma.max(), 1.0 / sigma.min()) * (1 - 1e-12)


def test_certificate_reports_are_deterministic(plan3):
    a = estimate_qi_constants(LogDrift(1.0, (0.0, 1.0, 0.0)), plan3)
    b = estimate_qi_constants(LogDrift(1.0, (0.0, 1.0, 0.0)), plan3)
    assert canonical_json(a.to_dict()) == canonical_json(b.to_dict())


def test_surjectivity_identity(desk_plan3):
    assert check_quasi_surjectivity(Identity(), desk_plan3, 1.0).confirmed


def test_surjectivity_translation(desk_plan3):
    m = Translation((5.0, -2.0, 1.0))
    assert check_quasi_surjectivity(m, desk_plan3, 1.0).confirmed


def test_surjectivity_clamped_map(desk_plan3):
    # oracle: direct forward verification of each found preimage is built
    # into the check; independently confirm one target by radial scan
    m = Clamp(LinearOverLog(), 0.5, 1.0, 10.0)
    verdict = check_quasi_surjectivity(m, desk_plan3, 5.0)
    assert verdict.confirmed
    target = np.array([1e4, 0.0, 0.0])
    u = target / np.linalg.norm(target)
    best = min(np.linalg.norm(np.asarray(m(s * u)) - target)
               for s in np.linspace(9.5e3, 1.0e4, 2001))
    assert best <= 5.0


def test_surjectivity_never_refutes(desk_plan3):
    # far-from-identity isometry: the search may or may not resolve it at
    # desk scale, but it must not claim refutation
    v = check_quasi_surjectivity(BlockRotation(math.pi), desk_plan3, 1.0)
    assert v.status in ("confirmed", "inconclusive")
