"""Minimal angle over effective twists on toric surfaces, and the semipositivity test."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .chow import DivisorClass, independent, pairing, pic_basis_rays, pic_coordinates
from .fan import Fan
from .linalg import nullspace, solve_exact
from .numbers import QuadSurd

__all__ = [
    "MinAngleResult",
    "InfeasibleError",
    "cot_phi",
    "minimal_angle",
    "rationality_round",
    "semipositivity_check",
    "nef_generators",
]

CERT_TOL = 1e-9
TIE_TOL = 1e-11


class InfeasibleError(ValueError):
    pass


def _surface(f: Fan):
    if f.dim != 2:
        raise ValueError("minimal angle is implemented for surfaces")


def cot_phi(f: Fan, omega: DivisorClass, alpha: DivisorClass) -> Fraction:
    _surface(f)
    aw = pairing(f, alpha, omega)
    if aw <= 0:
        raise ValueError("alpha . omega must be positive")
    return (pairing(f, alpha, alpha) - pairing(f, omega, omega)) / (2 * aw)


@dataclass
class MinAngleResult:
    cot_theta_min: float
    exact: str | None
    D_star: tuple
    D_star_exact: tuple | None
    support: tuple
    attained: bool
    gap: float
    cot_phi: Fraction
    certified: bool
    multiple_maximizers: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cot_theta_min": self.cot_theta_min,
            "cot_theta_min_exact": self.exact,
            "D_star": list(self.D_star),
            "D_star_exact": None if self.D_star_exact is None else list(self.D_star_exact),
            "support": list(self.support),
            "attained": self.attained,
            "gap": self.gap,
            "cot_phi": str(self.cot_phi),
            "cot_phi_float": float(self.cot_phi),
            "certified": self.certified,
            "multiple_maximizers": self.multiple_maximizers,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MinAngleResult":
        return cls(d["cot_theta_min"], d["cot_theta_min_exact"], tuple(d["D_star"]),
                   None if d["D_star_exact"] is None else tuple(d["D_star_exact"]),
                   tuple(d["support"]), d["attained"], d["gap"], Fraction(d["cot_phi"]),
                   d["certified"], d["multiple_maximizers"], list(d["notes"]))


def _gram(f: Fan):
    G = f._cache.get("ray_gram")
    if G is None:
        rays = [DivisorClass.ray(f, i) for i in range(f.n_rays)]
        G = [[pairing(f, r, q) for q in rays] for r in rays]
        f._cache["ray_gram"] = G
    return G


def _supports(f: Fan):
    """Index sets of size <= rho whose divisors are independent in Pic."""
    out = f._cache.get("minangle_supports")
    if out is None:
        rays = [DivisorClass.ray(f, i) for i in range(f.n_rays)]
        out = [S for size in range(1, f.picard_rank + 1) for S in combinations(range(f.n_rays), size)
               if independent(f, [rays[i] for i in S])]
        f._cache["minangle_supports"] = out
    return out


class _Problem:
    """g(t) = (alpha^2 - 2 a.t + t G t - omega^2) / (2 (alpha.omega - w.t)) over t >= 0."""

    def __init__(self, f: Fan, omega: DivisorClass, alpha: DivisorClass):
        m = f.n_rays
        self.f = f
        self.m = m
        self.G = _gram(f)
        self.a = [sum((x * g for x, g in zip(alpha.coeffs, col)), Fraction(0)) for col in self.G]
        self.w = [sum((x * g for x, g in zip(omega.coeffs, col)), Fraction(0)) for col in self.G]
        self.aa = sum((x * y for x, y in zip(alpha.coeffs, self.a)), Fraction(0))
        self.ww = sum((x * y for x, y in zip(omega.coeffs, self.w)), Fraction(0))
        self.aw = sum((x * y for x, y in zip(alpha.coeffs, self.w)), Fraction(0))
        self.Gf = np.array(self.G, dtype=float)
        self.af = np.array(self.a, dtype=float)
        self.wf = np.array(self.w, dtype=float)
        self.c0 = float(self.aa - self.ww)
        self.awf = float(self.aw)

    def value_exact(self, t):
        nz = [(i, ti) for i, ti in enumerate(t) if ti != 0]
        n = QuadSurd(self.aa - self.ww)
        for i, ti in nz:
            n = n - ti * (2 * self.a[i])
            for j, tj in nz:
                n = n + ti * tj * self.G[i][j]
        d = QuadSurd(2 * self.aw)
        for i, ti in nz:
            d = d - ti * (2 * self.w[i])
        return n, d

    def values(self, T: np.ndarray):
        """g and denominator for a batch of points (rows)."""
        quad = np.einsum("ki,ij,kj->k", T, self.Gf, T)
        num = self.c0 - 2 * T @ self.af + quad
        den = 2 * (self.awf - T @ self.wf)
        return num / den, den

    def value(self, t: np.ndarray):
        num = self.c0 - 2 * t @ self.af + t @ self.Gf @ t
        den = 2 * (self.awf - t @ self.wf)
        return num / den, den

    def grad(self, t: np.ndarray):
        Gt = self.Gf @ t
        num = self.c0 - 2 * t @ self.af + t @ Gt
        den = 2 * (self.awf - t @ self.wf)
        dnum = -2 * self.af + 2 * Gt
        dden = -2 * self.wf
        return (dnum * den - num * dden) / den ** 2


def _support_candidates(p: _Problem, S: tuple):
    """Exact stationary points of g restricted to span(D_i, i in S), with t_S >= 0."""
    G = [[p.G[i][j] for j in S] for i in S]
    a = [p.a[i] for i in S]
    w = [p.w[i] for i in S]
    try:
        u = solve_exact(G, a)
        v = solve_exact(G, w)
    except ZeroDivisionError:
        return None
    wv = sum((x * y for x, y in zip(w, v)), Fraction(0))
    wu = sum((x * y for x, y in zip(w, u)), Fraction(0))
    au = sum((x * y for x, y in zip(a, u)), Fraction(0))
    A = -wv
    B = -2 * (p.aw - wu)
    C = p.aa - p.ww - au
    roots = []
    if A == 0:
        if B != 0:
            roots.append(QuadSurd(-C / B))
    else:
        disc = B * B - 4 * A * C
        if disc > 0:
            base = -B / (2 * A)
            rad = QuadSurd(0, Fraction(1) / (2 * A), disc)
            roots += [base + rad, base - rad]
        elif disc == 0:
            roots.append(QuadSurd(-B / (2 * A)))
    out = []
    for s in roots:
        tS = [ui - s * vi for ui, vi in zip(u, v)]
        if any(x.sign() < 0 for x in tS):
            continue
        t = [QuadSurd(0)] * p.m
        for i, x in zip(S, tS):
            t[i] = x
        num, den = p.value_exact(t)
        if den.sign() <= 0:
            continue
        # the stationary value equals s by construction
        assert num == s * den, "stationarity identity failed"
        out.append((s, t))
    return out


def _ascent(p: _Problem, starts: np.ndarray, max_iter: int = 400):
    """Projected gradient ascent with backtracking; returns the best point found."""
    best_t, best_g = None, -np.inf
    for t in starts:
        g, den = p.value(t)
        if den <= 0:
            continue
        step = 0.1
        for _ in range(max_iter):
            gr = p.grad(t)
            pg = np.where((t <= 0) & (gr < 0), 0.0, gr)
            if np.max(np.abs(pg)) < 1e-12:
                break
            improved = False
            while step > 1e-14:
                cand = np.maximum(t + step * pg, 0.0)
                gc, dc = p.value(cand)
                if dc > 0 and gc > g:
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
            t, g = cand, gc
            step = min(2 * step, 1e3)
        if g > best_g:
            best_t, best_g = t, g
    return best_t, best_g


def _feasible_samples(p: _Problem, rng, n: int):
    u = rng.dirichlet(np.ones(p.m + 1), size=n)[:, : p.m]
    return u * float(p.aw) / p.wf


def minimal_angle(f: Fan, omega: DivisorClass, alpha: DivisorClass, seed: int = 0,
                  certify_samples: int = 10_000, starts: int = 3) -> MinAngleResult:
    _surface(f)
    p = _Problem(f, omega, alpha)
    if p.aw <= 0:
        raise InfeasibleError("infeasible: (alpha - D) . omega <= 0 for every effective D")
    if any(x <= 0 for x in p.w):
        raise ValueError("omega must be Kähler")
    cphi = cot_phi(f, omega, alpha)
    rho = f.picard_rank
    candidates = [(QuadSurd(cphi), [QuadSurd(0)] * p.m, ())]
    for S in _supports(f):
        found = _support_candidates(p, S)
        if found:
            candidates += [(s, t, S) for s, t in found]
    # best exact candidate with deterministic tie-breaking
    fvals = [float(c[0]) for c in candidates]
    top = max(fvals)
    tied = [c for c, v in zip(candidates, fvals) if v >= top - TIE_TOL]
    tied.sort(key=lambda c: (len(c[2]), c[2]))
    best_s, best_t, best_S = tied[0]
    classes = {tuple(round(float(x), 9) for x in _class_of(f, c[1])) for c in tied}
    multiple = len(classes) > 1
    notes = []
    # numerical refinement from several starts
    rng = np.random.default_rng(seed)
    t_best = np.array([float(x) for x in best_t])
    st = [t_best, np.zeros(p.m)] + list(_feasible_samples(p, rng, max(starts - 1, 0)) * 0.5)
    t_num, g_num = _ascent(p, np.array(st))
    exact_ok = True
    if g_num > float(best_s) + CERT_TOL:
        exact_ok = False
        notes.append("numerical ascent exceeded every exact stationary candidate")
    # certification on random feasible points
    T = _feasible_samples(p, rng, certify_samples)
    g, den = p.values(T)
    value = float(best_s) if exact_ok else g_num
    certified = bool(np.all(g[den > 0] <= value + CERT_TOL)) and value >= float(cphi) - CERT_TOL
    if rho > 3:
        certified = False
        notes.append("Picard rank above 3: support enumeration not exhaustive")
    if exact_ok:
        D = tuple(float(x) for x in best_t)
        D_exact = tuple(str(x) for x in best_t)
        exact = str(best_s)
        support = best_S
    else:
        D = tuple(float(x) for x in t_num)
        D_exact = None
        exact = None
        support = tuple(i for i, x in enumerate(t_num) if x > 1e-12)
    return MinAngleResult(value, exact, D, D_exact, support, True, value - float(cphi), cphi, certified,
                          multiple, notes)


def _class_of(f: Fan, t) -> tuple:
    """Pic coordinates of sum t_i D_i (floats)."""
    basis = pic_basis_rays(f)
    out = np.zeros(len(basis))
    for i, ti in enumerate(t):
        if ti == 0:
            continue
        coords = pic_coordinates(f, DivisorClass.ray(f, i))
        out += float(ti) * np.array([float(c) for c in coords])
    return tuple(out)


def rationality_round(r: MinAngleResult, Q: int, f: Fan | None = None, omega=None, alpha=None):
    """A rational D* with denominators <= Q, or None.

    When the exact form is known rationality is decided exactly.  Otherwise each
    coefficient must be within 1e-9 of a rational with small denominator.
    """
    if not r.attained:
        raise ValueError("minimal angle not attained")
    if r.D_star_exact is not None:
        vals = [QuadSurd.parse(x) for x in r.D_star_exact]
        if all(v.is_rational and v.a.denominator <= Q for v in vals):
            return tuple(v.a for v in vals)
        return None
    approx = [Fraction(x).limit_denominator(Q) for x in r.D_star]
    if any(abs(float(q) - x) > 1e-9 * max(1.0, abs(x)) for q, x in zip(approx, r.D_star)):
        return None
    if f is not None and omega is not None and alpha is not None:
        p = _Problem(f, omega, alpha)
        num, den = p.value_exact([QuadSurd(x) for x in approx])
        if abs(float(num) / float(den) - r.cot_theta_min) > 1e-9:
            return None
    return tuple(approx)


def nef_generators(f: Fan) -> list[DivisorClass]:
    """Extremal rays of the nef cone of a toric surface, as divisor classes."""
    _surface(f)
    basis = pic_basis_rays(f)
    rho = len(basis)
    B = [DivisorClass.ray(f, b) for b in basis]
    curves = [DivisorClass.ray(f, j) for j in range(f.n_rays)]
    M = [[pairing(f, C, Bb) for Bb in B] for C in curves]
    gens = []
    for S in combinations(range(len(curves)), rho - 1):
        ns = nullspace([M[j] for j in S], rho)
        if len(ns) != 1:
            continue
        x = ns[0]
        vals = [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in M]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            x = [-c for c in x]
        else:
            continue
        scale = max(abs(c) for c in x)
        key = tuple(c / scale for c in x)
        if key in {tuple(c / max(abs(d) for d in g[1]) for c in g[1]) for g in gens}:
            continue
        gens.append((S, x))
    out = []
    for _, x in gens:
        d = DivisorClass.zero(f)
        for c, Bb in zip(x, B):
            d = d + Bb * c
        out.append(d)
    return out


def semipositivity_check(f: Fan, omega: DivisorClass, alpha: DivisorClass) -> dict:
    _surface(f)
    cot = cot_phi(f, omega, alpha)
    checks = []
    glob = pairing(f, alpha, alpha) - pairing(f, omega, omega) - cot * 2 * pairing(f, alpha, omega)
    checks.append({"test": "global k=2", "value": str(glob), "holds": glob >= 0})
    for j in range(f.n_rays):
        C = DivisorClass.ray(f, j)
        v = pairing(f, alpha, C) - cot * pairing(f, omega, C)
        checks.append({"test": "curve", "curve": j, "value": str(v), "holds": v >= 0})
    for g in nef_generators(f):
        v = pairing(f, alpha, g) - cot * pairing(f, omega, g)
        checks.append({"test": "nef generator", "gamma": g.to_dict(), "value": str(v), "holds": v >= 0})
    witnesses = [c for c in checks if not c["holds"]]
    zeros = [c for c in checks if c["holds"] and Fraction(c["value"]) == 0 and c["test"] != "global k=2"]
    return {"passes": not witnesses, "witnesses": witnesses, "zero_witnesses": zeros,
            "cot_phi": str(cot), "checks": checks}
