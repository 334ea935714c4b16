import random
from fractions import Fraction

import pytest

from instances import surface_instance
from oracles import golden_min_angle, min_angle_on_E
from toricslag.charges import ComplexifiedClass, dhym_nakai_moishezon
from toricslag.chow import DivisorClass, pairing
from toricslag.fan import preset_fan
from toricslag.minangle import (
    InfeasibleError,
    MinAngleResult,
    cot_phi,
    minimal_angle,
    nef_generators,
    rationality_round,
    semipositivity_check,
)


def B(fan, **kw):
    return DivisorClass.from_basis(fan, kw)


@pytest.fixture(scope="module")
def golden():
    f = preset_fan("blp_p2")
    w, a = B(f, h=2, e=-1), B(f, h=5, e=-1)
    return f, w, a, minimal_angle(f, w, a)


def test_cot_phi_examples():
    f = preset_fan("blp_p2")
    assert cot_phi(f, B(f, h=2, e=-1), B(f, h=5, e=-1)) == Fraction(7, 6)
    g = preset_fan("p2")
    assert cot_phi(g, B(g, h=1), B(g, h=1)) == 0
    assert cot_phi(g, B(g, h=1), B(g, h=2)) == Fraction(3, 4)
    with pytest.raises(ValueError):
        cot_phi(g, B(g, h=1), B(g, h=-1))


def test_golden_value(golden):
    f, w, a, r = golden
    val, coeff = golden_min_angle()
    assert r.exact == "10 - sqrt(78)"
    assert r.cot_theta_min == pytest.approx(val, abs=1e-12)
    assert r.support == (3,)
    assert r.D_star[3] == pytest.approx(coeff, abs=1e-12)
    assert r.D_star_exact == ("0", "0", "0", "9 - sqrt(78)")
    assert r.cot_theta_min > float(r.cot_phi) and r.cot_phi == Fraction(7, 6)
    assert r.certified and not r.multiple_maximizers


def test_golden_against_brute_grid(golden):
    *_, r = golden
    best = min_angle_on_E()
    assert r.cot_theta_min == pytest.approx(best, abs=1e-8)
    assert r.cot_theta_min >= best - 1e-12


def test_golden_fixed_point(golden):
    """Twisting by D* gives a class whose own cot phi is cot theta_min."""
    f, w, a, r = golden
    M = [[pairing(f, DivisorClass.ray(f, i), DivisorClass.ray(f, j)) for j in range(4)] for i in range(4)]
    t = [float(x) for x in a.coeffs]
    t[3] -= r.D_star[3]
    wf = [float(x) for x in w.coeffs]
    dot = lambda u, v: sum(M[i][j] * u[i] * v[j] for i in range(4) for j in range(4))
    assert (dot(t, t) - dot(wf, wf)) / (2 * dot(t, wf)) == pytest.approx(r.cot_theta_min, abs=1e-12)


def test_planted_rational():
    f = preset_fan("blp_p2")
    w, a = B(f, h=3, e=-1), B(f, h=7)
    r = minimal_angle(f, w, a)
    assert r.exact == "1"
    assert rationality_round(r, 10) == (0, 0, 0, 1)
    assert cot_phi(f, w, a - DivisorClass.ray(f, 3)) == 1


def test_rationality_round_irrational(golden):
    *_, r = golden
    assert rationality_round(r, 1000) is None
    numeric = MinAngleResult(r.cot_theta_min, None, (0.0, 0.0, 0.0, 0.5), None, (3,), True, 0.0,
                             r.cot_phi, True)
    assert rationality_round(numeric, 4) == (0, 0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        rationality_round(MinAngleResult(0.0, None, (), None, (), False, 0.0, Fraction(0), False), 3)


def test_p2_no_twist_helps():
    f = preset_fan("p2")
    r = minimal_angle(f, B(f, h=1), B(f, h=2))
    assert r.exact == "3/4" and r.support == () and r.gap == 0


def test_infeasible():
    f = preset_fan("p2")
    with pytest.raises(InfeasibleError):
        minimal_angle(f, B(f, h=1), B(f, h=-1))


def test_threefold_refused():
    f = preset_fan("pn(3)")
    with pytest.raises(ValueError):
        minimal_angle(f, B(f, h=1), B(f, h=1))


def test_semipositivity_golden_fails(golden):
    f, w, a, _ = golden
    res = semipositivity_check(f, w, a)
    assert not res["passes"]
    assert any(c.get("curve") == 3 for c in res["witnesses"])


def test_semipositivity_equality_criterion_random():
    rng = random.Random(8)
    for _ in range(40):
        f, w, a = surface_instance(rng)
        r = minimal_angle(f, w, a, certify_samples=500)
        sp = semipositivity_check(f, w, a)["passes"]
        equal = abs(r.cot_theta_min - float(r.cot_phi)) < 1e-9
        assert sp == equal
        if dhym_nakai_moishezon(f, ComplexifiedClass(w), a).overall == "positive":
            assert sp


@pytest.mark.parametrize("k", [2, 7])
def test_scale_invariance(k):
    rng = random.Random(k)
    for _ in range(15):
        f, w, a = surface_instance(rng)
        r1 = minimal_angle(f, w, a, certify_samples=200)
        rk = minimal_angle(f, w * k, a * k, certify_samples=200)
        assert r1.exact == rk.exact
        assert rk.D_star == pytest.approx(tuple(k * x for x in r1.D_star), abs=1e-9)


def test_certificate_never_beaten():
    rng = random.Random(4)
    for _ in range(10):
        f, w, a = surface_instance(rng)
        r = minimal_angle(f, w, a, certify_samples=3000, seed=rng.randint(0, 99))
        assert r.certified
        assert r.cot_theta_min >= float(r.cot_phi) - 1e-12


def test_nef_generators():
    f = preset_fan("blp_p2")
    assert len(nef_generators(f)) == 2
    for g in nef_generators(f):
        assert all(pairing(f, g, DivisorClass.ray(f, j)) >= 0 for j in range(4))
    assert len(nef_generators(preset_fan("p2"))) == 1


def test_result_roundtrip(golden):
    *_, r = golden
    assert MinAngleResult.from_dict(r.to_dict()).to_dict() == r.to_dict()
