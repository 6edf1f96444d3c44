import math

import numpy as np
import pytest

from qilab import (BlockRotation, Dilation, HAlphaCertificate, Identity,
                   LinearOverLog, LogDrift, Reflection, check_certificate,
                   default_plan, geometric_plan, limsup_liminf, membership_H,
                   membership_H_alpha, ratio_profile)
from qilab.errors import AlphaOutOfRange, EmptyPlan, EmptyProfile
from qilab.asymptotics import RatioProfile


def max_log_over_power(alpha: float) -> float:
    """Independent oracle for sup_r ln(1+r)/r^alpha: log-grid plus golden
    section refinement around the best grid point."""
    rs = np.logspace(-6, 12, 20000)
    vals = np.log1p(rs) / rs ** alpha
    i = int(np.argmax(vals))
    lo, hi = rs[max(0, i - 1)], rs[min(len(rs) - 1, i + 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    for _ in range(200):
        c = b - phi * (b - a)
        d = a + phi * (b - a)
        fc = math.log1p(c) / c ** alpha
        fd = math.log1p(d) / d ** alpha
        if fc > fd:
            b = d
        else:
            a = c
    r = 0.5 * (a + b)
    return math.log1p(r) / r ** alpha


def test_reflection_profile_is_constant_two(plan3):
    profile = ratio_profile(Reflection(), 1.0, plan3)
    for e in profile.entries:
        assert e.sup_ratio == pytest.approx(2.0, rel=1e-12)
        assert e.inf_ratio == pytest.approx(2.0, rel=1e-12)


def test_linear_over_log_profile_closed_form(plan3):
    profile = ratio_profile(LinearOverLog(), 1.0, plan3)
    for e in profile.entries:
        assert e.sup_ratio == pytest.approx(1.0 / math.log(2.0 + e.radius),
                                            rel=1e-9)


def test_dilation_profile_closed_form(plan3):
    profile = ratio_profile(Dilation(1.01), 1.0, plan3)
    for e in profile.entries:
        assert e.sup_ratio == pytest.approx(0.01, rel=1e-9)


def test_rotation_profile_inplane_sup_orthogonal_inf(plan3):
    k = 3
    profile = ratio_profile(BlockRotation(2 * math.pi / k), 1.0, plan3)
    for e in profile.entries:
        assert e.sup_ratio == pytest.approx(2 * math.sin(math.pi / k),
                                            rel=1e-12)
        assert e.inf_ratio <= 1e-12  # axis e3 is fixed by the rotation


def test_membership_identity_confirmed(plan3):
    assert membership_H(Identity(), plan3, tol=1e-6).confirmed


def test_membership_reflection_refuted(plan3):
    verdict = membership_H(Reflection(), plan3, tol=1.99)
    assert verdict.refuted
    assert verdict.evidence["tail_floor"] == pytest.approx(2.0, rel=1e-12)


def test_membership_rotation_refuted_with_inplane_witness(plan3):
    verdict = membership_H(BlockRotation(2 * math.pi / 3), plan3, tol=0.1)
    assert verdict.refuted
    w = verdict.evidence["witnesses"][0]["argmax_dir"]
    assert abs(w[2]) < 1e-9  # witness direction lies in the rotation plane


def test_membership_linear_over_log(plan3):
    # decays like 1/ln(2+r): confirmed at the default tolerance, but at
    # tol=1e-3 the final value 1/ln(2+1e9) ~ 0.048 is still too large, so
    # the trend rule honestly reports inconclusive rather than confirmed
    assert membership_H(LinearOverLog(), plan3).confirmed
    strict = membership_H(LinearOverLog(), plan3, tol=1e-3)
    assert strict.inconclusive


def test_membership_logdrift_confirmed(plan3):
    assert membership_H(LogDrift(1.0, (1.0, 0.0, 0.0)), plan3).confirmed


def test_membership_needs_enough_annuli():
    small = geometric_plan(annuli=3, dimension=3)
    with pytest.raises(EmptyPlan):
        membership_H(Identity(), small)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.9])
def test_h_alpha_logdrift_confirmed_with_bounded_constant(plan3, alpha):
    verdict, cert = membership_H_alpha(LogDrift(1.0, (1.0, 0.0, 0.0)),
                                       alpha, plan3)
    assert verdict.confirmed
    assert cert.K <= 1.05 * max_log_over_power(alpha) + 1e-12
    assert check_certificate(LogDrift(1.0, (1.0, 0.0, 0.0)), cert,
                             plan3).confirmed


@pytest.mark.parametrize("alpha", [0.25, 0.5])
def test_h_alpha_linear_over_log_refuted(plan3, alpha):
    verdict, cert = membership_H_alpha(LinearOverLog(), alpha, plan3)
    assert verdict.refuted
    assert cert is None
    assert verdict.evidence["terminal_growth_decades"] >= 3.0


def test_h_alpha_identity_confirmed_tiny_constant(plan3):
    verdict, cert = membership_H_alpha(Identity(), 0.5, plan3)
    assert verdict.confirmed
    assert cert.K <= 1e-9


def test_h_alpha_rejects_bad_exponent(plan3):
    with pytest.raises(AlphaOutOfRange):
        membership_H_alpha(Identity(), 1.0, plan3)


def test_limsup_liminf_half_turn(plan3):
    profile = ratio_profile(BlockRotation(math.pi), 1.0, plan3)
    hi, lo = limsup_liminf(profile, 0.5)
    assert hi == pytest.approx(2.0, rel=1e-9)
    assert lo <= 1e-9


def test_limsup_identity_zero(plan3):
    hi, lo = limsup_liminf(ratio_profile(Identity(), 1.0, plan3))
    assert (hi, lo) == (0.0, 0.0)


def test_limsup_logdrift_closed_form(plan3):
    # oracle: the ratio is A ln(1+r)/r in every direction, so the tail max
    # sits at the first tail radius
    profile = ratio_profile(LogDrift(1.0, (1.0, 0.0, 0.0)), 1.0, plan3)
    hi, _ = limsup_liminf(profile, 0.5)
    r_tail = plan3.radii[len(plan3.radii) // 2]
    assert hi == pytest.approx(math.log1p(r_tail) / r_tail, rel=1e-9)


def test_limsup_requires_entries():
    with pytest.raises(EmptyProfile):
        limsup_liminf(RatioProfile(exponent=1.0, entries=()))


def test_nesting_certificates_pass_larger_exponents(plan3):
    _, cert = membership_H_alpha(LogDrift(1.0, (1.0, 0.0, 0.0)), 0.25, plan3)
    for beta in (0.5, 0.9):
        lifted = HAlphaCertificate(alpha=beta, K=cert.K, R=cert.R,
                                   kind=cert.kind, provenance="nesting")
        assert check_certificate(LogDrift(1.0, (1.0, 0.0, 0.0)), lifted,
                                 plan3).confirmed


def test_h_alpha_members_are_not_refuted_in_h(plan3):
    for m in (LogDrift(1.0, (1.0, 0.0, 0.0)), Identity()):
        verdict, _ = membership_H_alpha(m, 0.5, plan3)
        assert verdict.confirmed
        assert not membership_H(m, plan3).refuted


def test_basepoint_shift_leaves_verdicts_alone(plan3):
    # |x| and |x - x0| differ by a bounded amount, so membership agrees
    basepoint = (5.0, -3.0, 2.0)
    cases = [Identity(), Reflection(), Dilation(2.0),
             BlockRotation(2 * math.pi / 3), LogDrift(1.0, (1.0, 0.0, 0.0)),
             LinearOverLog()]
    for m in cases:
        plain = membership_H(m, plan3)
        shifted = membership_H(m, plan3, basepoint=basepoint)
        assert plain.status == shifted.status


def test_profile_exponent_validation(plan3):
    with pytest.raises(ValueError):
        ratio_profile(Identity(), 0.0, plan3)
