"""Central charges, topological angles and the dHYM positivity criteria.

All integrals on rational input are evaluated exactly.  The Kähler class is
omega_eff = k * sqrt(radicand) * omega with omega rational, so values live in
Q(sqrt radicand) + i Q(sqrt radicand).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .chow import (
    CohClass,
    DivisorClass,
    chern_character,
    integrate_on,
    pairing,
    positivity_cones,
    toric_curves,
)
from .fan import Fan, Stratum, enumerate_strata
from .numbers import QComplex, QuadSurd, arg_compare, as_fraction, cross, dot

__all__ = [
    "ComplexifiedClass",
    "AngleData",
    "StabilityReport",
    "StratumRecord",
    "AngleUndefined",
    "NotSupercritical",
    "PreconditionError",
    "central_charge",
    "topological_angles",
    "dhym_nakai_moishezon",
    "phase_inequality_form",
    "jacob_sheu_check",
    "higher_rank_inequalities",
    "s_object_chern",
    "twisted_integral",
    "TORIC_ONLY",
]

TORIC_ONLY = "only torus-invariant subvarieties are tested; non-toric strict semistabilizers are assumed absent"


class AngleUndefined(ValueError):
    pass


class NotSupercritical(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ComplexifiedClass:
    """Kähler class scale*sqrt(radicand)*omega plus a B-field beta (scaled by ``scale`` too)."""

    omega: DivisorClass
    beta: DivisorClass | None = None
    scale: Fraction = Fraction(1)
    radicand: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scale", as_fraction(self.scale))
        object.__setattr__(self, "radicand", as_fraction(self.radicand))
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.radicand <= 0:
            raise ValueError("radicand must be positive")

    @classmethod
    def unit_volume(cls, f: Fan, omega: DivisorClass, beta=None, scale=1) -> "ComplexifiedClass":
        """Normalize omega so that its volume is 1 (curves and surfaces only)."""
        if f.dim > 2:
            raise ValueError("unit-volume normalization stays in Q(sqrt r) only for n <= 2")
        vol = pairing(f, *([omega] * f.dim))
        if vol <= 0:
            raise ValueError("omega has non-positive volume")
        return cls(omega, beta, scale, Fraction(1) / (vol * vol) if f.dim == 1 else 1 / vol)

    @property
    def factor(self) -> QuadSurd:
        """The real multiplier k*sqrt(r) in front of the rational omega."""
        return QuadSurd(0, self.scale, self.radicand)

    def rescaled(self, k) -> "ComplexifiedClass":
        return ComplexifiedClass(self.omega, self.beta, self.scale * as_fraction(k), self.radicand)

    def beta_or_zero(self, f: Fan) -> DivisorClass:
        return self.beta if self.beta is not None else DivisorClass.zero(f)

    def effective_beta(self, f: Fan) -> DivisorClass:
        return self.beta_or_zero(f) * self.scale

    def check_kahler(self, f: Fan) -> None:
        if len(self.omega) != f.n_rays:
            raise ValueError("omega does not match the fan")
        if not positivity_cones(f, self.omega)["is_kahler"]:
            raise PreconditionError("omega is not a Kähler class")

    def describe(self) -> dict:
        d = {"omega": self.omega.to_dict(), "scale": str(self.scale), "radicand": str(self.radicand)}
        if self.beta is not None:
            d["beta"] = self.beta.to_dict()
        return d


# exact integration helpers --------------------------------------------------


def _monomial_integrals(f: Fan, V, omega: DivisorClass, alpha: DivisorClass, d: int):
    """[int_V omega^j alpha^(d-j) for j = 0..d]."""
    out = []
    w = omega.to_coh(f.dim)
    a = alpha.to_coh(f.dim)
    for j in range(d + 1):
        out.append(integrate_on(f, V, (w ** j) * (a ** (d - j))))
    return out


def _unit(power: int) -> QComplex:
    return QComplex(1, 0).times_i(power)


def binomial_integral(f: Fan, V, s: QuadSurd, omega: DivisorClass, alpha: DivisorClass,
                      i_on_omega: int, i_on_alpha: int, d: int) -> QComplex:
    """int_V (i^a s omega + i^b alpha)^d exactly."""
    ints = _monomial_integrals(f, V, omega, alpha, d)
    total = QComplex(0, 0)
    for j in range(d + 1):
        if ints[j] == 0:
            continue
        coef = QComplex(s ** j * comb(d, j) * ints[j], 0)
        total = total + coef.times_i(i_on_omega * j + i_on_alpha * (d - j))
    return total


def twisted_integral(f: Fan, V, s: QuadSurd, omega: DivisorClass, F: CohClass):
    """int_V exp(-i s omega) F.  Exact for exact F, complex float otherwise."""
    d = f.dim - (len(V.cone) if isinstance(V, Stratum) else len(V or ()))
    w = omega.to_coh(f.dim)
    if F.mode == "float":
        total = 0j
        sf = float(s)
        for j in range(d + 1):
            val = integrate_on(f, V, (w ** j) * F)
            total += (-1j * sf) ** j / math.factorial(j) * complex(val)
        return total
    total = QComplex(0, 0)
    for j in range(d + 1):
        val = integrate_on(f, V, (w ** j) * F)
        if val == 0:
            continue
        term = QComplex(s ** j * Fraction(1, math.factorial(j)), 0) * val
        total = total + term.times_i(-j)
    return total


def central_charge(f: Fan, c: ComplexifiedClass, E: CohClass, stratum=None):
    """Z = -int exp(-i k omega) exp(-k beta) ch(E), restricted to ``stratum`` if given."""
    F = E
    if c.beta is not None and not c.beta.is_zero():
        F = chern_character(-c.effective_beta(f), f.dim) * E
    z = twisted_integral(f, stratum, c.factor, c.omega, F)
    return -z


# angles -----------------------------------------------------------------------


@dataclass
class AngleData:
    phi: float
    varphi: float
    supercritical: bool
    integral: QComplex
    cot_varphi: QuadSurd | None

    def to_dict(self) -> dict:
        return {
            "phi": self.phi,
            "varphi": self.varphi,
            "supercritical": self.supercritical,
            "integral": [str(self.integral.re), str(self.integral.im)],
            "cot_varphi": None if self.cot_varphi is None else str(self.cot_varphi),
        }


def topological_angles(f: Fan, c: ComplexifiedClass, alpha: DivisorClass) -> AngleData:
    n = f.dim
    Z = binomial_integral(f, None, c.factor, c.omega, alpha, 0, 1, n)  # int (omega + i alpha)^n
    if not Z:
        raise AngleUndefined("angle undefined: class on a wall")
    # e^{i varphi} is proportional to i^n conj(Z)
    u = Z.conjugate().times_i(n)
    supercritical = u.im.sign() > 0
    phi_principal = Z.arg()
    if n <= 2 or not supercritical:
        phi = phi_principal
        varphi = n * math.pi / 2 - phi
    else:
        varphi = u.arg()
        phi = n * math.pi / 2 - varphi
    if n % 2 == 0:
        cot = None if Z.im.sign() == 0 else -Z.re / Z.im
    else:
        cot = None if Z.re.sign() == 0 else Z.im / Z.re
    return AngleData(phi, varphi, supercritical, Z, cot)


# reports ----------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, QuadSurd):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, QComplex):
        return [str(v.re), str(v.im)]
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _float(v):
    if isinstance(v, (QuadSurd, Fraction, int, float)):
        return float(v)
    if isinstance(v, (QComplex, complex)):
        z = complex(v)
        return [z.real, z.imag]
    return v


@dataclass
class StratumRecord:
    cone: tuple
    codim: int
    lhs: object
    verdict: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"cone": list(self.cone), "codim": self.codim, "lhs": _fmt(self.lhs),
             "lhs_float": _float(self.lhs), "verdict": self.verdict}
        if self.extra:
            d["extra"] = self.extra
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StratumRecord":
        lhs = d["lhs"]
        if isinstance(lhs, str):
            lhs = QuadSurd.parse(lhs)
        return cls(tuple(d["cone"]), d["codim"], lhs, d["verdict"], d.get("extra", {}))

    def __eq__(self, other):
        if not isinstance(other, StratumRecord):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass
class StabilityReport:
    check: str
    strata: list
    overall: str = ""
    generic: bool = True
    assumptions: list = field(default_factory=lambda: [TORIC_ONLY])
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.overall:
            self.overall = summarize([r.verdict for r in self.strata])
            self.generic = all(r.verdict != "semistable" for r in self.strata)

    @property
    def witnesses(self) -> list:
        return [r.cone for r in self.strata if r.verdict == "violated"]

    def record(self, cone) -> StratumRecord:
        cone = tuple(cone)
        return next(r for r in self.strata if r.cone == cone)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "overall": self.overall,
            "generic": self.generic,
            "witnesses": [list(w) for w in self.witnesses],
            "strata": [r.to_dict() for r in self.strata],
            "assumptions": list(self.assumptions),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StabilityReport":
        return cls(d["check"], [StratumRecord.from_dict(s) for s in d["strata"]], d["overall"],
                   d["generic"], list(d["assumptions"]), d.get("meta", {}))


def summarize(verdicts) -> str:
    if any(v == "violated" for v in verdicts):
        return "violated"
    if any(v == "semistable" for v in verdicts):
        return "semistable"
    return "positive"


def _verdict_from_sign(sign: int) -> str:
    return "positive" if sign > 0 else ("violated" if sign < 0 else "semistable")


def _verdict(value, tol) -> str:
    if tol:
        x = float(value)
        if abs(x) <= tol:
            return "semistable"
        return "positive" if x > 0 else "violated"
    if isinstance(value, QuadSurd):
        return _verdict_from_sign(value.sign())
    x = value
    return _verdict_from_sign((x > 0) - (x < 0))


# dHYM criterion -----------------------------------------------------------------


def _require_angles(f: Fan, c: ComplexifiedClass, alpha: DivisorClass) -> AngleData:
    c.check_kahler(f)
    ang = topological_angles(f, c, alpha)
    if f.dim > 2 and not ang.supercritical:
        raise NotSupercritical(
            f"not supercritical (varphi = {ang.varphi:.6g} outside (0, pi)); "
            "the criterion is only established in the supercritical phase for n > 2")
    if ang.cot_varphi is None:
        raise AngleUndefined("angle undefined: cot(varphi) is infinite")
    return ang


def dhym_nakai_moishezon(f: Fan, c: ComplexifiedClass, alpha: DivisorClass, tol: float = 0.0) -> StabilityReport:
    """Per-stratum lhs int_V Re(i omega + alpha)^d - cot(varphi) int_V Im(i omega + alpha)^d."""
    ang = _require_angles(f, c, alpha)
    cot = ang.cot_varphi
    records = []
    for V in enumerate_strata(f):
        d = f.dim - V.codim
        val = binomial_integral(f, V, c.factor, c.omega, alpha, 1, 0, d)
        lhs = val.re - cot * val.im
        records.append(StratumRecord(V.cone, V.codim, lhs, _verdict(lhs, tol)))
    meta = {"cot_varphi": str(cot), "cot_varphi_float": float(cot), "angles": ang.to_dict(),
            "alpha": alpha.to_dict(), "class": c.describe(), "tol": tol}
    return StabilityReport("dhym_nakai_moishezon", records, meta=meta)


def phase_inequality_form(f: Fan, c: ComplexifiedClass, L: DivisorClass, tol: float = 0.0) -> StabilityReport:
    """arg((-1)^codim int_V e^{-i omega} ch(L)) < arg(int_X e^{-i omega} ch(L)) on every stratum."""
    alpha = -L
    _require_angles(f, c, alpha)
    chL = chern_character(L, f.dim)
    wX = twisted_integral(f, None, c.factor, c.omega, chL)
    if not wX:
        raise AngleUndefined("angle undefined: class on a wall")
    records = []
    for V in enumerate_strata(f):
        wV = twisted_integral(f, V, c.factor, c.omega, chL)
        if V.codim % 2:
            wV = -wV
        gap = wX.arg() - wV.arg()
        if tol:
            verdict = _verdict(gap, tol)
        else:
            verdict = {-1: "positive", 0: "semistable", 1: "violated"}[arg_compare(wV, wX)]
        records.append(StratumRecord(V.cone, V.codim, gap, verdict,
                                     {"w_V": _fmt(wV), "arg_w_V": wV.arg()}))
    meta = {"w_X": _fmt(wX), "arg_w_X": wX.arg(), "L": L.to_dict(), "class": c.describe(), "tol": tol,
            "lhs_meaning": "arg(w_X) - arg(w_V), principal branch"}
    return StabilityReport("phase_inequality_form", records, meta=meta)


def _is_blowup_of_pn(f: Fan) -> bool:
    return f.name is not None and (f.name == "blp_p2" or f.name.startswith("blp_pn("))


def jacob_sheu_check(f: Fan, c: ComplexifiedClass, L: DivisorClass) -> dict:
    """Window test theta_hat - pi/2 < arg(w_V) < theta_hat + pi/2 on toric divisors."""
    if not _is_blowup_of_pn(f):
        raise PreconditionError("wrong fan: the criterion is stated for the blow-up of P^n at a point")
    c.check_kahler(f)
    dual = -L
    if not positivity_cones(f, dual)["is_kahler"]:
        raise PreconditionError("L^dual is not ample")
    ch = chern_character(dual, f.dim)
    wX = -twisted_integral(f, None, c.factor, c.omega, ch)
    if not wX:
        raise AngleUndefined("angle undefined: class on a wall")
    theta = wX.arg() % (2 * math.pi)
    records = []
    for V in enumerate_strata(f):
        if V.codim != 1:
            continue
        wV = -twisted_integral(f, V, c.factor, c.omega, ch)
        # inside the open half-plane centred at theta_hat
        proj = dot(wX, wV)
        offset = math.remainder(wV.arg() - theta, 2 * math.pi)
        records.append(StratumRecord(V.cone, 1, proj, _verdict_from_sign(proj.sign()),
                                     {"w_V": _fmt(wV), "offset_from_theta_hat": offset}))
    rep = StabilityReport("jacob_sheu", records,
                          meta={"theta_hat": theta, "w_X": _fmt(wX), "L": L.to_dict(), "class": c.describe(),
                                "lhs_meaning": "Re(conj(w_X) w_V); positive inside the window"})
    return {"theta_hat": theta, "report": rep}


# higher rank -----------------------------------------------------------------------


def _dhym_charge(f: Fan, s: QuadSurd, omega, beta: DivisorClass | None, F: CohClass, V=None):
    """Z^dHYM = -i int_V e^{-i omega} e^{-beta} F."""
    if beta is not None and not beta.is_zero():
        F = chern_character(-beta, f.dim) * F
    return twisted_integral(f, V, s, omega, F).times_i(-1)


def higher_rank_inequalities(f: Fan, c: ComplexifiedClass, L1: DivisorClass, L2: DivisorClass,
                             k: int = 1) -> StabilityReport:
    """Curve and sub-bundle phase inequalities for E_k = L1^k + L2^k on a surface."""
    if f.dim != 2:
        raise PreconditionError("higher-rank inequalities are implemented for surfaces")
    if k <= 0:
        raise ValueError("k must be positive")
    c.check_kahler(f)
    ck = c.rescaled(k)
    s = ck.factor
    beta = ck.effective_beta(f)
    ch1 = chern_character(L1 * k, 2)
    chE = ch1 + chern_character(L2 * k, 2)
    ZX = _dhym_charge(f, s, c.omega, beta, chE)
    if not ZX:
        raise AngleUndefined("vanishing Z_X(E)")
    argX = ZX.arg()
    records = []
    for V in toric_curves(f):
        ZV = _dhym_charge(f, s, c.omega, beta, chE, V)
        x = cross(ZX, ZV)
        lifted = argX + math.remainder(ZV.arg() - argX, 2 * math.pi) if ZV else float("nan")
        records.append(StratumRecord(V.cone, 1, x, _verdict_from_sign(x.sign()),
                                     {"Z_V": _fmt(ZV), "arg_Z_V": lifted, "test": "arg Z_X < arg Z_V < arg Z_X + pi"}))
    ZL = _dhym_charge(f, s, c.omega, beta, ch1)
    x = -cross(ZX, ZL)
    lifted = argX + math.remainder(ZL.arg() - argX, 2 * math.pi) if ZL else float("nan")
    records.append(StratumRecord((), 0, x, _verdict_from_sign(x.sign()),
                                 {"object": "L1", "Z_L1": _fmt(ZL), "arg_Z_L1": lifted,
                                  "test": "arg Z_X - pi < arg Z_L1 < arg Z_X"}))
    meta = {"Z_X": _fmt(ZX), "arg_Z_X": argX, "k": k, "class": c.describe(),
            "L1": L1.to_dict(), "L2": L2.to_dict(),
            "lhs_meaning": "signed cross product; positive means the inequality holds"}
    return StabilityReport("higher_rank", records, meta=meta)


def s_object_chern(f: Fan, L: DivisorClass, V: Stratum, k: int, k_V: int) -> CohClass:
    """ch of the torsion sheaf cokernel of L^k -> L^k(k_V V)."""
    if V.codim != 1:
        raise ValueError("S-objects are implemented for divisor strata only")
    D = DivisorClass.ray(f, V.cone[0])
    return chern_character(L * k + D * k_V, f.dim) - chern_character(L * k, f.dim)
