import cmath
import math

import numpy as np
import pytest

from fracstab.charfn import (
    GeneralCharFn,
    SimpleCharFn,
    axis_real_from_ratios,
    build_general,
    sine_ratios,
    to_simple,
)
from fracstab.errors import NotReducible, SineRatiosUndefined
from fracstab.model import MultiOrder, MultiOrderSystem, SystemMatrix


def _principal_det(alpha, a, s):
    """Independent evaluation route: assemble diag(s^alpha) - A and take
    the 3x3 determinant numerically, never expanding symbolically."""
    d = np.diag([s ** alpha[0], s ** alpha[1], s ** alpha[2]]).astype(complex)
    return complex(np.linalg.det(d - np.asarray(a, dtype=complex)))


def test_expected_term_exponents_generic():
    alpha = (0.4, 0.3, 0.5)
    a = [[1.1, 0.2, 0.3], [0.4, 1.5, 0.6], [0.7, 0.8, 1.9]]
    q = build_general(MultiOrderSystem(order=MultiOrder(alpha), matrix=SystemMatrix(a)))
    exps = [e for e, _ in q.terms]
    assert exps == sorted(exps, reverse=True)
    expected = sorted({1.2, 0.8, 0.9, 0.7, 0.4, 0.3, 0.5, 0.0}, reverse=True)
    assert exps == pytest.approx(expected, abs=1e-12)
    assert q.terms[0][1] == 1.0
    assert q.constant == pytest.approx(-np.linalg.det(np.array(a)), rel=1e-12)


def test_expansion_matches_numeric_determinant():
    rng = np.random.default_rng(101)
    for _ in range(80):
        alpha = tuple(rng.uniform(0.05, 1.0, size=3))
        a = rng.normal(size=(3, 3))
        q = build_general(MultiOrderSystem(order=MultiOrder(alpha), matrix=SystemMatrix(a)))
        for _ in range(6):
            s = complex(rng.normal(), rng.normal())
            if abs(s) < 1e-3:
                continue
            direct = _principal_det(alpha, a, s)
            scale = max(1.0, sum(abs(k) * abs(s) ** e for e, k in q.terms))
            assert abs(q(s) - direct) <= 1e-10 * scale


def test_example3_fixture_values(ex3_system):
    q = build_general(ex3_system)
    terms = dict((round(e, 12), k) for e, k in q.terms)
    assert terms[1.2] == pytest.approx(1.0, abs=1e-12)
    assert terms[0.8] == pytest.approx(3.0, abs=1e-12)
    assert terms[0.7] == pytest.approx(3.0, abs=1e-12)
    assert terms[0.4] == pytest.approx(0.5, abs=1e-12)
    assert terms[0.0] == pytest.approx(0.75, abs=1e-12)
    assert len(q.terms) == 5

    simple = to_simple(q)
    assert (simple.p1, simple.p2, simple.p3, simple.p4) == pytest.approx(
        (0.4, 0.7, 0.8, 1.2), abs=1e-12)
    assert (simple.a, simple.b, simple.c, simple.d) == pytest.approx(
        (-3.0, -3.0, -0.5, -0.75), abs=1e-12)


def test_example13_fixture_values(ex13_system):
    q = build_general(ex13_system)
    assert [e for e, _ in q.terms] == pytest.approx([1.2, 0.5, 0.0], abs=1e-12)
    assert [k for _, k in q.terms] == pytest.approx([1.0, -0.2, 0.1], abs=1e-12)
    simple = to_simple(q)
    # one surviving interior term: it fills the lowest slot, the empty
    # slots copy its exponent with zero coefficients
    assert (simple.p1, simple.p2, simple.p3, simple.p4) == pytest.approx(
        (0.5, 0.5, 0.5, 1.2), abs=1e-12)
    assert (simple.a, simple.b, simple.c, simple.d) == pytest.approx(
        (0.0, 0.0, 0.2, -0.1), abs=1e-12)


def test_slot_filling_two_terms():
    # two interior terms fill the two lowest slots ascending; p3 copies
    # the higher surviving exponent
    q = GeneralCharFn(terms=((1.1, 1.0), (0.6, -2.0), (0.3, 1.5), (0.0, 0.4)))
    s = to_simple(q)
    assert (s.p1, s.p2, s.p3, s.p4) == (0.3, 0.6, 0.6, 1.1)
    assert (s.a, s.b, s.c, s.d) == (0.0, 2.0, -1.5, -0.4)


def test_slot_filling_no_interior():
    q = GeneralCharFn(terms=((1.4, 1.0), (0.0, -2.0)))
    s = to_simple(q)
    assert s.p4 == 1.4
    assert s.p1 == s.p2 == s.p3 == pytest.approx(0.7)
    assert (s.a, s.b, s.c) == (0.0, 0.0, 0.0)
    assert s.d == 2.0


def test_not_reducible_with_four_interior_terms():
    q = GeneralCharFn(terms=(
        (1.5, 1.0), (1.1, 2.0), (0.9, -1.0), (0.5, 3.0), (0.2, 1.0), (0.0, 1.0)))
    with pytest.raises(NotReducible):
        to_simple(q)


def test_merge_of_equal_exponents():
    # alpha1 = alpha2 makes the two cross exponents collide; their
    # coefficients must sum, not shadow each other
    alpha = (0.4, 0.4, 0.5)
    a = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 0.0]]
    q = build_general(MultiOrderSystem(order=MultiOrder(alpha), matrix=SystemMatrix(a)))
    terms = {round(e, 12): k for e, k in q.terms}
    # exponent 0.9 = a1+a3 = a2+a3 carries -(a11) - (a22) = -5
    assert terms[0.9] == pytest.approx(-5.0, abs=1e-12)


def test_simple_reexpansion_is_bit_exact(ex3_system):
    q = build_general(ex3_system)
    s = to_simple(q)
    assert s.terms() == q.terms


def test_principal_branch_and_conjugate_symmetry():
    q = GeneralCharFn(terms=((1.2, 1.0), (0.5, -0.2), (0.0, 0.1)))
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = complex(rng.normal(), rng.normal())
        if abs(s) < 1e-6:
            continue
        # real coefficients: Q(conj s) = conj Q(s)
        assert q(s.conjugate()) == pytest.approx(q(s).conjugate(), rel=1e-13, abs=1e-13)
        # principal branch: s^e = exp(e log s), arg in (-pi, pi]
        direct = sum(k * cmath.exp(e * cmath.log(s)) if e else k for e, k in q.terms)
        assert q(s) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_axis_parts_match_complex_evaluation():
    q = GeneralCharFn(terms=((1.2, 1.0), (0.8, 3.0), (0.7, 3.0), (0.4, 0.5), (0.0, 0.75)))
    for omega in (1e-3, 0.1, 1.0, 7.3, 150.0):
        val = q(1j * omega)
        assert q.axis_real(omega) == pytest.approx(val.real, rel=1e-12, abs=1e-12)
        assert q.axis_imag(omega) == pytest.approx(val.imag, rel=1e-12, abs=1e-12)


def test_array_evaluation_matches_scalar():
    q = GeneralCharFn(terms=((1.2, 1.0), (0.5, -0.2), (0.0, 0.1)))
    pts = np.array([0.3 + 1j, -2j, 5.0 + 0j, 0.01j])
    vals = q(pts)
    for p, v in zip(pts, vals):
        assert v == pytest.approx(q(complex(p)), rel=1e-13)


def test_sine_ratio_values(ex13_system):
    simple = to_simple(build_general(ex13_system))
    r = sine_ratios(simple)
    s6 = math.sin(0.6 * math.pi)
    assert r.complement[0] == pytest.approx(math.sin(0.35 * math.pi) / s6, abs=1e-12)
    assert r.direct[0] == pytest.approx(math.sin(0.25 * math.pi) / s6, abs=1e-12)
    # degenerate duplicated slots share the same exponent and ratios
    assert r.complement[0] == r.complement[1] == r.complement[2]


def test_sine_ratios_undefined_at_two():
    q = SimpleCharFn(p1=0.5, p2=0.8, p3=1.1, p4=2.0, a=-1.0, b=-1.0, c=-1.0, d=-1.0)
    with pytest.raises(SineRatiosUndefined):
        sine_ratios(q)


def test_axis_identity_at_imag_roots():
    """Where the imaginary part of Q(i w) vanishes, the real part equals
    the complement-ratio combination of the lower terms; checked against
    the plain cosine-weighted evaluation."""
    rng = np.random.default_rng(29)
    checked = 0
    for _ in range(400):
        if checked >= 40:
            break
        p = np.sort(rng.uniform(0.05, 0.95, size=3))
        p4 = rng.uniform(p[2] + 0.05, 1.9)
        q = SimpleCharFn(p1=p[0], p2=p[1], p3=p[2], p4=p4,
                         a=rng.normal(), b=rng.normal(), c=rng.normal(), d=rng.normal())
        ratios = sine_ratios(q)
        # bisect imag-part roots on a log grid
        grid = np.geomspace(1e-6, 1e3, 4000)
        vals = np.array([q.axis_imag(w) for w in grid])
        sign = np.sign(vals)
        idx = np.flatnonzero(sign[:-1] * sign[1:] < 0)
        for i in idx:
            lo, hi = grid[i], grid[i + 1]
            for _ in range(80):
                mid = math.sqrt(lo * hi)
                if q.axis_imag(mid) * q.axis_imag(lo) > 0:
                    lo = mid
                else:
                    hi = mid
            w = 0.5 * (lo + hi)
            lhs = q.axis_real(w)
            rhs = axis_real_from_ratios(q, w, ratios)
            assert abs(lhs - rhs) <= 1e-8 * max(abs(lhs), abs(rhs), 1.0)
            checked += 1
    assert checked >= 40
