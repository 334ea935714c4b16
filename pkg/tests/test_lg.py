import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from instances import random_kahler
from oracles import bessel_period, p2_period, residue_p1
from toricslag.charges import ComplexifiedClass
from toricslag.chow import CohClass, DivisorClass, chern_character, curve_vector, toric_curves
from toricslag.fan import preset_fan
from toricslag.lg import (
    CriticalPointError,
    DivergenceError,
    LGError,
    LGModel,
    PeriodResult,
    SingularHessian,
    UnsupportedFan,
    asymptotic_sweep,
    build_lg,
    critical_points,
    enumerate_curve_classes,
    gamma_lhs,
    gamma_lhs_result,
    i_function,
    i_function_series,
    mori_generators,
    newton_volume,
    positive_cycle_period,
    relation_residuals,
    residue_pairing,
)

ALL = ["p2", "p1xp1", "hirzebruch(1)", "hirzebruch(2)", "blp_p2", "blpq_p2", "pn(1)", "pn(3)", "blp_pn(3)"]


def B(fan, **kw):
    return DivisorClass.from_basis(fan, kw)


def O(f):
    return chern_character(DivisorClass.zero(f), f.dim)


def test_p1_potential():
    f = preset_fan("pn(1)")
    m = build_lg(f, 0.04)
    assert m.exact_log is None and m.is_real()
    W = m(np.array([0.5]))
    assert W == pytest.approx(0.5 + 0.04 / 0.5)


def test_exact_build_p2():
    f = preset_fan("p2")
    m = build_lg(f, ComplexifiedClass(B(f, h=1), B(f, h=1) * 0))
    assert m.euler == 3 and m.dim == 2
    assert [str(re) for re, _ in m.exact_log].count("-1") == 1
    assert "exp(2pi*(-1)" in m.describe()


def test_relation_invariant_random():
    rng = random.Random(9)
    for name in ["p2", "p1xp1", "hirzebruch(2)", "blp_p2", "blpq_p2"]:
        f = preset_fan(name)
        for _ in range(5):
            w = random_kahler(f, rng)
            beta = DivisorClass([rng.randint(-3, 3) for _ in range(f.n_rays)])
            c = ComplexifiedClass(w, beta, radicand=rng.choice([1, 2, 3]))
            res = relation_residuals(build_lg(f, c), f, c)
            assert res["exact"] and res["max_log_residual"] < 1e-9


def test_relation_needs_exact_model():
    f = preset_fan("pn(1)")
    with pytest.raises(LGError):
        relation_residuals(build_lg(f, 0.1), f, ComplexifiedClass(B(f, h=1)))


def test_not_weak_fano_warns():
    f = preset_fan("hirzebruch(3)")
    with pytest.warns(UserWarning):
        m = build_lg(f, [0.1, 0.1])
    assert not m.weak_fano


def test_novikov_arity():
    with pytest.raises(LGError):
        build_lg(preset_fan("blp_p2"), 0.1)


def test_curve_classes():
    assert mori_generators(preset_fan("p2")) == [(1, 1, 1)]
    cl = enumerate_curve_classes(preset_fan("p2"), 3)
    assert [c for c, _ in cl] == [(0,), (1,), (2,), (3,)]
    assert cl[2][1] == (2, 2, 2)
    cl = enumerate_curve_classes(preset_fan("blp_p2"), 2)
    assert len(cl) == 6 and [sum(c) for c, _ in cl] == [0, 1, 1, 2, 2, 2]
    with pytest.raises(UnsupportedFan):
        mori_generators(preset_fan("blpq_p2"))


def test_i_function_degree_zero_is_exp():
    f = preset_fan("pn(1)")
    q, z = 0.04, 0.7
    I = i_function(f, q, z, 0)
    # exp(log q * H / z) with H^2 = 0
    assert I.terms[()] == pytest.approx(1)
    assert sum(v for k, v in I.terms.items() if k) == pytest.approx(math.log(q) / z)


def test_i_function_p1_coefficients():
    """Degree-zero cohomology part of I on P^1 is sum q^d / (d! z^d)^2."""
    f = preset_fan("pn(1)")
    q, z = 0.3, 1.3
    I = i_function(f, q, z, 25)
    want = sum(q ** d / (math.factorial(d) * z ** d) ** 2 for d in range(26))
    assert I.terms[()] == pytest.approx(want, rel=1e-14)


def test_divergence_detected():
    with pytest.raises(DivergenceError):
        i_function_series(preset_fan("pn(1)"), 1e6, 1.0, 6)


def test_zero_z_rejected():
    with pytest.raises(LGError):
        i_function(preset_fan("pn(1)"), 0.1, 0, 5)


@pytest.mark.parametrize("q", [0.01, 0.04])
@pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
def test_bessel_period_p1(q, z):
    f = preset_fan("pn(1)")
    quad = positive_cycle_period(build_lg(f, q), z)
    assert quad.value.real == pytest.approx(bessel_period(q, z), rel=1e-11)
    g = gamma_lhs(f, q, z, O(f), 30)
    assert abs(g - quad.value) / abs(quad.value) < 1e-10


def test_p2_period():
    f = preset_fan("p2")
    quad = positive_cycle_period(build_lg(f, 0.001), 1.0)
    assert quad.value.real == pytest.approx(p2_period(0.001, 1.0), rel=1e-8)
    g = gamma_lhs(f, 0.001, 1.0, O(f), 20)
    assert abs(g - quad.value) / abs(quad.value) < 1e-8


def test_blp_p2_gamma_identity():
    f = preset_fan("blp_p2")
    c = ComplexifiedClass(B(f, h=Fraction(3, 4), e=Fraction(-1, 4)))
    quad = positive_cycle_period(build_lg(f, c), 1.0)
    g = gamma_lhs(f, c, 1.0, O(f), 25)
    assert abs(g - quad.value) / abs(quad.value) < 1e-8


def test_gamma_zero_object():
    f = preset_fan("pn(1)")
    r = gamma_lhs_result(f, 0.01, 1.0, CohClass.zero(1))
    assert r.value == 0 and r.error_estimate == 0


def test_gamma_truncation_estimate_shrinks():
    f = preset_fan("pn(1)")
    e = [gamma_lhs_result(f, 0.04, 1.0, O(f), N).error_estimate for N in (2, 4, 8)]
    assert e[0] > e[1] > e[2]


def test_period_errors():
    f = preset_fan("pn(1)")
    with pytest.raises(LGError):
        positive_cycle_period(build_lg(f, 0.01), -1.0)
    g = preset_fan("pn(3)")
    with pytest.raises(LGError):
        positive_cycle_period(build_lg(g, 0.01), 1.0)
    with pytest.raises(ValueError):
        PeriodResult(1j, "guess", 0.0)
    with pytest.raises(ValueError):
        PeriodResult(1j, "quadrature", float("nan"))


def test_period_result_roundtrip():
    r = positive_cycle_period(build_lg(preset_fan("pn(1)"), 0.01), 1.0)
    assert PeriodResult.from_dict(r.to_dict()).to_dict() == r.to_dict()


@pytest.mark.parametrize("name", ALL)
def test_critical_point_count(name):
    f = preset_fan(name)
    with np.errstate(all="ignore"):
        pts = critical_points(build_lg(f, ComplexifiedClass(random_kahler(f, random.Random(1)))))
    assert len(pts) == len(f.max_cones)
    m = build_lg(f, ComplexifiedClass(random_kahler(f, random.Random(1))))
    V = np.array(m.exponents, dtype=float)
    for x in pts:
        t = m.coefficients * np.prod(x[None, :] ** V, axis=1)
        assert np.abs(V.T @ t).max() < 1e-9 * np.abs(t).max()


def test_critical_point_budget():
    m = build_lg(preset_fan("p2"), 0.01)
    with pytest.raises(CriticalPointError):
        critical_points(LGModel(m.exponents, m.log_coefficients, None, m.gauge, True, 4), budget=30)


@pytest.mark.parametrize("q", [0.01, 0.25, 2.0])
def test_residue_p1_desk(q):
    m = build_lg(preset_fan("pn(1)"), q)
    x = lambda p: p[0]
    assert abs(residue_pairing(m, 1, 1)) < 1e-10
    assert residue_pairing(m, 1, x) == pytest.approx(1, abs=1e-10)
    assert abs(residue_pairing(m, x, x)) < 1e-10
    for a, b in ((2, 0), (3, 1), (-1, 2), (2, 2)):
        ora = residue_p1(q, lambda t: t ** a, lambda t: t ** b)
        got = residue_pairing(m, {(a,): 1}, {(b,): 1})
        assert got == pytest.approx(ora, abs=1e-10)


def test_residue_p2():
    m = build_lg(preset_fan("p2"), 0.1)
    assert residue_pairing(m, {(1, 0): 1}, {(0, 1): 1}) == pytest.approx(1, abs=1e-9)
    assert abs(residue_pairing(m, 1, 1)) < 1e-9
    assert abs(residue_pairing(m, 1, {(1, 0): 1})) < 1e-9


def test_residue_bilinear_symmetric():
    rng = np.random.default_rng(0)
    m = build_lg(preset_fan("blp_p2"), [0.2, 0.3])
    monos = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 0)]
    for _ in range(5):
        f1 = {e: complex(*rng.normal(size=2)) for e in monos}
        f2 = {e: complex(*rng.normal(size=2)) for e in monos}
        g = {e: complex(*rng.normal(size=2)) for e in monos}
        a, b = rng.normal(size=2)
        comb = {e: a * f1[e] + b * f2[e] for e in monos}
        lhs = residue_pairing(m, comb, g)
        rhs = a * residue_pairing(m, f1, g) + b * residue_pairing(m, f2, g)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
        assert residue_pairing(m, f1, g) == pytest.approx(residue_pairing(m, g, f1), rel=1e-12)


def test_singular_hessian():
    # W = 3x - 3x^2 + x^3 has a degenerate critical point at x = 1
    logs = (cmath.log(3), cmath.log(-3), 0j)
    m = LGModel(((1,), (2,), (3,)), logs, None, (0,), True, 0)
    with pytest.raises(SingularHessian):
        residue_pairing(m, 1, 1, points=[np.array([1.0 + 0j])])


def test_model_roundtrip():
    f = preset_fan("blp_p2")
    for m in (build_lg(f, ComplexifiedClass(B(f, h=2, e=-1), B(f, h=1))), build_lg(f, [0.2, 0.3])):
        d = m.to_dict()
        m2 = LGModel.from_dict(d)
        assert m2 == m
        assert np.allclose(m2.coefficients, m.coefficients)


def test_asymptotic_rate():
    f = preset_fan("pn(1)")
    res = asymptotic_sweep(f, ComplexifiedClass(DivisorClass.ray(f, 0)), DivisorClass.ray(f, 0))
    assert 0.8 <= res["rate"] <= 1.2
    d = res["discrepancy"]
    assert all(a > b for a, b in zip(d, d[1:]))


def test_extreme_scale_fails_loudly():
    f = preset_fan("blp_p2")
    w = DivisorClass([Fraction(12), Fraction(1), Fraction(11, 2), Fraction(-4)])
    m = build_lg(f, ComplexifiedClass(w))
    try:
        pts = critical_points(m)
    except CriticalPointError as exc:
        assert "double precision" in str(exc)
    else:
        assert len(pts) == 4


def test_critical_points_moderate_scales():
    rng = random.Random(17)
    for name in ["hirzebruch(2)", "blp_p2", "blpq_p2", "blp_pn(3)"]:
        f = preset_fan(name)
        for k in (1, 3, 6):
            w = random_kahler(f, rng)
            mx = max(sum(a * b for a, b in zip(w.coeffs, curve_vector(f, C))) for C in toric_curves(f))
            assert len(critical_points(build_lg(f, ComplexifiedClass(w * (Fraction(k) / mx))))) == len(f.max_cones)


@pytest.mark.parametrize("a, count", [(3, 5), (4, 6)])
def test_non_weak_fano_hirzebruch_count(a, count):
    """Off the weak Fano range W has n! vol(Newton polytope) critical points, not chi(X)."""
    f = preset_fan(f"hirzebruch({a})")
    assert newton_volume(f.rays) == count
    with pytest.warns(UserWarning):
        m = build_lg(f, ComplexifiedClass(random_kahler(f, random.Random(2)) * Fraction(1, 8)))
    with pytest.warns(UserWarning, match="fixed points"):
        pts = critical_points(m)
    assert len(pts) == count


def test_newton_volume_matches_fixed_points_weak_fano():
    for name in ["pn(1)", "p2", "pn(4)", "p1xp1", "hirzebruch(2)", "blp_p2", "blpq_p2", "blp_pn(4)"]:
        f = preset_fan(name)
        assert newton_volume(f.rays) == len(f.max_cones)
