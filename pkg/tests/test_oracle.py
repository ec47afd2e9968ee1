import math

import numpy as np
import pytest

from fracstab.charfn import GeneralCharFn, SimpleCharFn, build_general
from fracstab.errors import SamplingInconclusive, ZeroAtOrigin, ZeroOnAxis
from fracstab.oracle import (
    ContourSpec,
    auto_contour,
    count_rhp_zeros,
    scan_imaginary_axis,
)


def _gq(*terms):
    return GeneralCharFn(terms=tuple(terms))


def _binomial_expected(beta, mu):
    """Closed-form count for s^beta = mu on the principal branch.

    Every zero has modulus |mu|^(1/beta) and argument
    (arg mu + 2 pi k) / beta for integer k, kept only when the argument
    stays in (-pi, pi]; it lies in the open right half-plane when the
    magnitude of the argument is below pi/2.  This enumeration is
    independent of the winding machinery.
    """
    base = math.atan2(0.0, mu)
    count = 0
    for k in range(-10, 11):
        theta = (base + 2.0 * math.pi * k) / beta
        if -math.pi < theta <= math.pi and abs(theta) < math.pi / 2:
            count += 1
    return count


def test_binomial_grid_matches_closed_form():
    for beta in (0.3, 0.9, 1.5, 1.9):
        for mu in (-100.0, -1.0, -0.01, 0.01, 1.0, 100.0):
            q = _gq((beta, 1.0), (0.0, -mu))
            res = count_rhp_zeros(q)
            assert res.zero_count == _binomial_expected(beta, mu), (beta, mu)
            assert res.residual <= 0.01
            assert res.min_abs_on_contour > 0.0


def test_binomial_products_add_counts():
    # (s^1.1 - 0.5)(s^0.7 + 0.3): one positive real zero from the first factor
    q = _gq((1.8, 1.0), (1.1, 0.3), (0.7, -0.5), (0.0, -0.15))
    assert count_rhp_zeros(q).zero_count == 1
    # (s^1.1 - 0.5)(s^0.9 - 0.4): one from each factor
    q = _gq((2.0, 1.0), (1.1, -0.4), (0.9, -0.5), (0.0, 0.2))
    assert count_rhp_zeros(q).zero_count == 2
    # (s^0.6 + 0.25)(s^0.9 + 0.7): none
    q = _gq((1.5, 1.0), (0.9, 0.25), (0.6, 0.7), (0.0, 0.175))
    assert count_rhp_zeros(q).zero_count == 0


def test_double_zero_counted_with_multiplicity():
    # (s^0.9 - 0.4)^2 has a double zero on the positive real axis
    q = _gq((1.8, 1.0), (0.9, -0.8), (0.0, 0.16))
    assert count_rhp_zeros(q).zero_count == 2


def test_benchmark_systems_have_no_rhp_zeros(ex3_system, ex13_system):
    for system in (ex3_system, ex13_system):
        res = count_rhp_zeros(build_general(system))
        assert res.zero_count == 0
        assert res.residual <= 0.01


def test_high_lead_trinomial_has_two_zeros():
    q = _gq((2.1, 1.0), (0.9, -0.5), (0.5, -0.1), (0.0, 0.2))
    res = count_rhp_zeros(q)
    assert res.zero_count == 2
    assert res.total_turning == pytest.approx(4.0 * math.pi, abs=0.01 * 2 * math.pi)


def test_count_invariant_under_contour_overrides(ex13_system):
    q = build_general(ex13_system)
    default = count_rhp_zeros(q)
    for spec in (
        ContourSpec(epsilon=1e-4, radius=64.0),
        ContourSpec(epsilon=1e-3, radius=8.0, samples_per_unit_angle=96),
        ContourSpec(epsilon=3e-3, radius=20.0, samples_per_unit_log_length=128),
    ):
        res = count_rhp_zeros(q, contour=spec)
        assert res.zero_count == default.zero_count == 0
        assert res.residual <= 0.01
    trinomial = _gq((2.1, 1.0), (0.9, -0.5), (0.5, -0.1), (0.0, 0.2))
    res = count_rhp_zeros(trinomial, contour=ContourSpec(epsilon=1e-3, radius=32.0))
    assert res.zero_count == 2


def test_axis_segments_turn_equally(ex3_system):
    """Real coefficients force conjugate symmetry, so the two straight
    segments contribute identical turning; the four segments must also
    sum to the reported total."""
    res = count_rhp_zeros(build_general(ex3_system))
    seg = res.segment_turning
    assert set(seg) == {"axis_upper", "inner_arc", "axis_lower", "outer_arc"}
    assert seg["axis_upper"] == pytest.approx(seg["axis_lower"], abs=1e-9)
    assert res.total_turning == pytest.approx(sum(seg.values()), abs=1e-12)


def test_samples_out_returns_contour_values(ex13_system):
    q = build_general(ex13_system)
    samples = []
    count_rhp_zeros(q, samples_out=samples)
    assert [name for name, _, _ in samples] == [
        "axis_upper", "inner_arc", "axis_lower", "outer_arc",
    ]
    for _, pts, vals in samples:
        assert len(pts) == len(vals)
        assert np.allclose(vals, q(pts))


def test_zero_at_origin_raises():
    q = _gq((1.2, 1.0), (0.5, -0.2), (0.0, 0.0))
    with pytest.raises(ZeroAtOrigin):
        count_rhp_zeros(q)


def test_constructed_axis_zero_is_detected():
    """Placing the constant exactly at the one-term bound puts a zero on
    the imaginary axis; the precondition scan must refuse to count."""
    thr = -0.04802821686494662
    q = _gq((1.2, 1.0), (0.5, -0.2), (0.0, -thr))
    with pytest.raises(ZeroOnAxis, match="certified zero near"):
        count_rhp_zeros(q)


def test_tiny_sample_budget_is_inconclusive(ex13_system):
    q = build_general(ex13_system)
    spec = ContourSpec(epsilon=1e-3, radius=10.0, max_samples=16)
    with pytest.raises(SamplingInconclusive):
        count_rhp_zeros(q, contour=spec)


def test_axis_scan_finds_certified_root():
    q = SimpleCharFn(p1=0.5, p2=0.5, p3=0.5, p4=1.2, a=0.0, b=0.0, c=0.2, d=-0.1)
    roots = scan_imaginary_axis(q)
    assert len(roots) == 1
    assert roots[0].omega == pytest.approx(0.06570279086872227, rel=1e-9)
    assert roots[0].real_part == pytest.approx(0.1 - 0.04802821686494662, rel=1e-9)


def test_axis_scan_single_signed_immediately_empty():
    q = _gq((1.2, 1.0), (0.0, 1.0))
    assert scan_imaginary_axis(q) == []


def test_axis_scan_near_degenerate_exponent_gap():
    """Neighboring exponents separated by 1e-3 once underflowed the
    dominance bracket; the clamped bracket must stay finite and usable."""
    q = _gq((1.2, 1.0), (0.5005, -0.11), (0.4995, -0.1), (0.0, 0.3))
    roots = scan_imaginary_axis(q)
    for r in roots:
        assert math.isfinite(r.omega) and r.omega > 0


def test_auto_contour_certificates(ex13_system):
    """Recheck the two dominance inequalities the radii are meant to
    certify, using plain arithmetic on the term list."""
    q = build_general(ex13_system)
    spec = auto_contour(q)
    interior = [(e, abs(k)) for e, k in q.terms if e > 0.0]
    ssum = sum(k for _, k in interior)
    e_min = min(e for e, _ in interior)
    assert ssum * spec.epsilon ** e_min <= 0.5 * abs(q.constant)
    lower = [(e, abs(k)) for e, k in q.terms[1:]]
    r = spec.radius
    assert r ** q.lead_exponent >= 2.0 * sum(k * r ** e for e, k in lower)
    assert r >= 1.0
