"""Landau-Ginzburg mirrors of toric manifolds: potential, I-function, periods, residues.

W = sum_i a_i x^{v_i} on (C*)^n.  One maximal cone is gauged to a_i = 1, the
remaining coefficients are fixed by the curve relations.  All numerics here
are floating point complex; the log-arguments are also kept exactly.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np
from scipy.spatial import ConvexHull

from .charges import ComplexifiedClass, twisted_integral
from .chow import (
    CohClass,
    DivisorClass,
    anticanonical,
    chern_character,
    curve_vector,
    evaluate_top,
    gamma_class,
    is_weak_fano,
    pic_basis_rays,
    toric_curves,
)
from .fan import Fan
from .linalg import solve_exact
from .numbers import QuadSurd
from .quadrature import tanh_sinh

__all__ = [
    "LGError",
    "UnsupportedFan",
    "DivergenceError",
    "CriticalPointError",
    "SingularHessian",
    "LGModel",
    "PeriodResult",
    "build_lg",
    "enumerate_curve_classes",
    "mori_generators",
    "i_function",
    "i_function_series",
    "gamma_lhs",
    "gamma_lhs_result",
    "positive_cycle_period",
    "critical_points",
    "residue_pairing",
    "newton_volume",
    "relation_residuals",
    "asymptotic_sweep",
]

TWO_PI = 2 * math.pi
LEVEL = 80.0  # sublevel height (in units of z) kept by the quadrature box


class LGError(ValueError):
    pass


class UnsupportedFan(LGError):
    pass


class DivergenceError(LGError):
    pass


class CriticalPointError(RuntimeError):
    pass


class SingularHessian(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# the potential


@dataclass
class LGModel:
    exponents: tuple
    log_coefficients: tuple  # complex floats
    exact_log: tuple | None  # (re/2pi, im/2pi) as (QuadSurd, Fraction) pairs
    gauge: tuple
    weak_fano: bool = True
    euler: int = 0  # number of fixed points, i.e. maximal cones
    newton_volume: int = 0  # n! vol of the Newton polytope: generic number of critical points
    _crit: list | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.exponents[0])

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(np.array(self.log_coefficients, dtype=complex))

    def is_real(self) -> bool:
        if self.exact_log is None:
            return all(abs(lc.imag) <= 1e-15 for lc in self.log_coefficients)
        return all(im == 0 for _, im in self.exact_log)

    def __call__(self, x) -> complex:
        x = np.asarray(x, dtype=complex)
        return complex(sum(a * np.prod(x ** np.array(v)) for a, v in zip(self.coefficients, self.exponents)))

    def describe(self) -> str:
        parts = []
        if self.exact_log is None:
            return " + ".join(f"({complex(a):.12g})*" + "*".join(f"x{j + 1}^{e}" for j, e in enumerate(v) if e)
                              for a, v in zip(self.coefficients, self.exponents))
        for (re, im), v in zip(self.exact_log, self.exponents):
            mono = "*".join(f"x{j + 1}^{e}" for j, e in enumerate(v) if e) or "1"
            if re == 0 and im == 0:
                parts.append(mono)
            else:
                parts.append(f"exp(2pi*({re}) + 2pi*i*({im}))*{mono}")
        return " + ".join(parts)

    def to_dict(self) -> dict:
        if self.exact_log is None:
            logs = [{"re": lc.real, "im": lc.imag} for lc in self.log_coefficients]
        else:
            logs = [{"re_over_2pi": str(re), "im_over_2pi": str(im)} for re, im in self.exact_log]
        return {
            "exponents": [list(v) for v in self.exponents],
            "log_coefficients": logs,
            "gauge": list(self.gauge),
            "weak_fano": self.weak_fano,
            "euler": self.euler,
            "newton_volume": self.newton_volume,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LGModel":
        entries = d["log_coefficients"]
        if entries and "re" in entries[0]:
            exact = None
            logs = tuple(complex(e["re"], e["im"]) for e in entries)
        else:
            exact = tuple((QuadSurd.parse(e["re_over_2pi"]), Fraction(e["im_over_2pi"])) for e in entries)
            logs = tuple(complex(TWO_PI * float(re), TWO_PI * float(im)) for re, im in exact)
        return cls(tuple(tuple(v) for v in d["exponents"]), logs, exact, tuple(d["gauge"]),
                   d.get("weak_fano", True), d.get("euler", 0), d.get("newton_volume", 0))

    def __eq__(self, other):
        if not isinstance(other, LGModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _gauge_relations(f: Fan):
    """For each ray j outside the gauge cone, the relation d with d_j = 1 supported on tau + {j}."""
    tau = f.max_cones[0]
    cols = [[f.rays[i][a] for i in tau] for a in range(f.dim)]
    out = {}
    for j in range(f.n_rays):
        if j in tau:
            continue
        try:
            cj = solve_exact(cols, [Fraction(x) for x in f.rays[j]])
        except ZeroDivisionError as exc:
            raise LGError("rank deficiency in the gauge cone") from exc
        d = [Fraction(0)] * f.n_rays
        d[j] = Fraction(1)
        for k, i in enumerate(tau):
            d[i] = -cj[k]
        out[j] = d
    return tau, out


def build_lg(f: Fan, c) -> LGModel:
    """Potential with a_i = 1 on the first maximal cone.

    ``c`` is a ComplexifiedClass (exact log-arguments are recorded) or Novikov
    values q, one per Mori generator (float log-arguments only).
    """
    wf = is_weak_fano(f)
    if not wf:
        warnings.warn(f"fan {f.name or ''} is not weak Fano; using the large-volume potential anyway")
    tau, rels = _gauge_relations(f)
    if isinstance(c, ComplexifiedClass):
        c.check_kahler(f)
        beta = c.effective_beta(f)
        exact = []
        for j in range(f.n_rays):
            if j in tau:
                exact.append((QuadSurd(0), Fraction(0)))
                continue
            d = rels[j]
            w = sum((a * b for a, b in zip(c.omega.coeffs, d)), Fraction(0))
            b = sum((a * b for a, b in zip(beta.coeffs, d)), Fraction(0))
            exact.append((-(c.factor * w), b))
        logs = tuple(complex(TWO_PI * float(re), TWO_PI * float(im)) for re, im in exact)
        exact = tuple(exact)
    else:
        P = _log_q(f, c)
        logs = tuple(0j if j in tau else complex(sum(P[k] * float(x) for k, x in enumerate(rels[j])))
                     for j in range(f.n_rays))
        exact = None
    return LGModel(tuple(f.rays), logs, exact, tuple(tau), wf, len(f.max_cones), newton_volume(f.rays))


def newton_volume(exponents) -> int:
    """n! times the volume of the convex hull of the exponents (origin assumed interior)."""
    pts = np.array(exponents, dtype=float)
    if pts.shape[1] == 1:
        return int(round(pts.max() - pts.min()))
    hull = ConvexHull(pts)
    return int(round(sum(abs(np.linalg.det(pts[s])) for s in hull.simplices)))


def relation_residuals(model: LGModel, f: Fan, c: ComplexifiedClass) -> dict:
    """Check prod a_i^{d_i} = exp(2 pi i int_C (beta + i omega)) over every toric curve."""
    beta = c.effective_beta(f)
    if model.exact_log is None:
        raise LGError("model was built from numeric Novikov values")
    exact_ok, worst = True, 0.0
    for C in toric_curves(f):
        d = curve_vector(f, C)
        re = sum((di * re for di, (re, _) in zip(d, model.exact_log)), QuadSurd(0))
        im = sum((di * im for di, (_, im) in zip(d, model.exact_log)), Fraction(0))
        w = sum((a * b for a, b in zip(c.omega.coeffs, d)), Fraction(0))
        b = sum((a * b for a, b in zip(beta.coeffs, d)), Fraction(0))
        want_re, want_im = -(c.factor * w), b
        exact_ok &= (re == want_re) and (im == want_im)
        lhs = sum(float(di) * lc for di, lc in zip(d, model.log_coefficients))
        rhs = complex(TWO_PI * float(want_re), TWO_PI * float(want_im))
        worst = max(worst, abs(lhs - rhs))
    return {"exact": exact_ok, "max_log_residual": worst}


# ---------------------------------------------------------------------------
# curve classes and the I-function


def _pic_pairings(f: Fan, d) -> tuple:
    return tuple(d[b] for b in pic_basis_rays(f))


def mori_generators(f: Fan) -> list[tuple[int, ...]]:
    """Primitive generators (as vectors (D_i . C)_i) of the Mori cone; rank <= 2 only."""
    key = "mori"
    if key in f._cache:
        return f._cache[key]
    rho = f.n_rays - f.dim
    if rho > 2:
        raise UnsupportedFan(f"Picard rank {rho} > 2: I-function work is not supported on this fan")
    vecs = {}
    for C in toric_curves(f):
        d = curve_vector(f, C)
        y = _pic_pairings(f, d)
        g = 0
        for t in y:
            g = gcd(g, int(t))
        vecs[tuple(int(t) // g for t in y)] = tuple(int(t) // g for t in d)
    ys = list(vecs)
    if rho == 1:
        gens = [vecs[y] for y in ys if y[0] > 0]
        if not gens or len(set(gens)) != 1:
            raise UnsupportedFan("could not identify the Mori generator")
        out = [gens[0]]
    else:
        def cross(a, b):
            return a[0] * b[1] - a[1] * b[0]

        g1 = [y for y in ys if all(cross(y, o) >= 0 for o in ys)]
        g2 = [y for y in ys if all(cross(o, y) >= 0 for o in ys)]
        if len(g1) != 1 or len(g2) != 1:
            raise UnsupportedFan("Mori cone is not strongly convex on toric curves")
        if abs(cross(g1[0], g2[0])) != 1:
            raise UnsupportedFan("Mori cone generators are not a lattice basis")
        out = [vecs[g1[0]], vecs[g2[0]]]
    f._cache[key] = out
    return out


def enumerate_curve_classes(f: Fan, N: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """[(generator coefficients, (D_i . d)_i)] for total degree <= N, sorted by degree then lex."""
    gens = mori_generators(f)
    out = []
    if len(gens) == 1:
        for a in range(N + 1):
            out.append(((a,), tuple(a * x for x in gens[0])))
        return out
    for tot in range(N + 1):
        for a in range(tot + 1):
            b = tot - a
            out.append(((a, b), tuple(a * x + b * y for x, y in zip(*gens))))
    return out


def _dual_to_generators(f: Fan) -> list[list[Fraction]]:
    """Divisors H_b (ray coefficients) with H_b . g_c = delta_bc."""
    gens = mori_generators(f)
    basis = pic_basis_rays(f)
    rho = len(gens)
    M = [[Fraction(g[b]) for g in gens] for b in basis]  # M[a][c] = D_{basis a} . g_c
    Mt = [[M[a][c] for a in range(rho)] for c in range(rho)]
    out = []
    for b in range(rho):
        x = solve_exact(Mt, [Fraction(int(b == c)) for c in range(rho)])
        coeffs = [Fraction(0)] * f.n_rays
        for a, r in enumerate(basis):
            coeffs[r] = x[a]
        out.append(coeffs)
    return out


def _log_q(f: Fan, q) -> np.ndarray:
    """Ray coefficients P_i of log q^p = sum P_i D_i."""
    if isinstance(q, ComplexifiedClass):
        s = float(q.factor)
        beta = q.effective_beta(f)
        return np.array([complex(-TWO_PI * s * float(w), TWO_PI * float(b))
                         for w, b in zip(q.omega.coeffs, beta.coeffs)])
    qs = [q] if np.isscalar(q) else list(q)
    duals = _dual_to_generators(f)
    if len(qs) != len(duals):
        raise LGError(f"need {len(duals)} Novikov variables, got {len(qs)}")
    P = np.zeros(f.n_rays, dtype=complex)
    for qb, H in zip(qs, duals):
        P += cmath.log(complex(qb)) * np.array([float(h) for h in H])
    return P


def _factor_series(e: int, z: complex, n: int) -> list[complex]:
    """Coefficients in D of prod_{j<=0}(D+jz) / prod_{j<=e}(D+jz), truncated at D^n."""
    poly = [1.0 + 0j] + [0j] * n
    if e >= 0:
        for j in range(1, e + 1):
            inv = 1.0 / (j * z)
            geo = [inv * (-inv) ** k for k in range(n + 1)]
            poly = _pmul(poly, geo, n)
    else:
        for j in range(e + 1, 1):
            poly = _pmul(poly, [j * z, 1.0], n)
    return poly


def _pmul(a, b, n):
    out = [0j] * (n + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if i + j > n:
                break
            out[i + j] += x * y
    return out


def i_function_series(f: Fan, q, z, N: int = 20):
    """(I, truncation error estimate, per-degree norms) of the I-function at degree N."""
    n = f.dim
    z = complex(z)
    if z == 0:
        raise LGError("z must be nonzero")
    P = _log_q(f, q)
    classes = enumerate_curve_classes(f, N)
    cache: dict = {}
    total = CohClass.zero(n, "float")
    groups: dict = {}
    for coeffs, d in classes:
        deg = sum(coeffs)
        log_qd = sum(P[i] * d[i] for i in range(f.n_rays))
        term = CohClass.scalar(n, cmath.exp(log_qd), "float")
        for i, e in enumerate(d):
            key = (i, e)
            if key not in cache:
                ser = _factor_series(e, z, n)
                cache[key] = CohClass(n, {(i,) * k: v for k, v in enumerate(ser)}, "float")
            term = term * cache[key]
            if not term.terms:
                break
        groups[deg] = groups.get(deg, CohClass.zero(n, "float")) + term
    norms = [groups[k].max_abs() if k in groups else 0.0 for k in range(N + 1)]
    for k in range(N + 1):
        total = total + groups.get(k, CohClass.zero(n, "float"))
    if N >= 3 and norms[-1] > norms[-2] > norms[-3] and norms[-1] > 1e-8 * max(total.max_abs(), 1e-300):
        raise DivergenceError(f"I-function partial sums are not Cauchy (degree norms {norms[-3:]})")
    lead = CohClass(n, {(i,): P[i] / z for i in range(f.n_rays)}, "float").exp()
    last = groups.get(N, CohClass.zero(n, "float"))
    err = (lead * last).max_abs() if N > 0 else float("nan")
    return lead * total, err, norms, lead * last


def i_function(f: Fan, q, z, N: int = 20) -> CohClass:
    """Cohomology-valued I-function truncated at Novikov degree N."""
    return i_function_series(f, q, z, N)[0]


# ---------------------------------------------------------------------------
# periods


@dataclass
class PeriodResult:
    value: complex
    method: str
    error_estimate: float
    truncation: int | None = None
    normalization: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("quadrature", "gamma_lhs", "saddle"):
            raise ValueError(f"unknown method {self.method}")
        if not math.isfinite(self.error_estimate):
            raise ValueError("error estimate must be finite")

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "method": self.method,
                "error_estimate": self.error_estimate, "truncation": self.truncation,
                "normalization": self.normalization, "meta": self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodResult":
        return cls(complex(*d["value"]), d["method"], d["error_estimate"], d["truncation"],
                   d["normalization"], d.get("meta", {}))


def _gamma_pairing(f: Fan, A: CohClass, z: complex, E: CohClass) -> complex:
    n = f.dim
    zdeg = A.map_degrees(lambda k: z ** k)
    zc1 = (anticanonical(f).to_coh(n).to_float() * cmath.log(z)).exp()
    chE = E.to_float().map_degrees(lambda k: (2j * math.pi) ** k)
    return complex(evaluate_top(f, zc1 * zdeg * gamma_class(f) * chE))


def gamma_lhs_result(f: Fan, q, z, E: CohClass, N: int = 20) -> PeriodResult:
    """int_X z^{c1} z^{deg/2} I(q,-z) Gamma ch(E) (2 pi i)^{deg/2}, with its truncation error."""
    z = complex(z)
    if not E.terms:
        return PeriodResult(0j, "gamma_lhs", 0.0, N)
    I, _, _, last = i_function_series(f, q, -z, N)
    val = _gamma_pairing(f, I, z, E)
    err = abs(_gamma_pairing(f, last, z, E)) if N > 0 else abs(val)
    return PeriodResult(val, "gamma_lhs", float(err), N, 1.0)


def gamma_lhs(f: Fan, q, z, E: CohClass, N: int = 20) -> complex:
    return gamma_lhs_result(f, q, z, E, N).value


def _real_terms(model: LGModel):
    if not model.is_real():
        raise LGError("positive real cycle needs real coefficients (beta = 0)")
    V = np.array(model.exponents, dtype=float)
    a = np.array([lc.real for lc in model.log_coefficients])
    return V, a


def _real_minimizer(V, loga):
    """Minimizer of the convex function sum exp(loga_i + v_i.u)."""
    n = V.shape[1]
    u = np.zeros(n)

    def vals(u):
        t = np.exp(loga + V @ u)
        return t.sum(), V.T @ t, (V.T * t) @ V

    for _ in range(200):
        w, g, H = vals(u)
        step = np.linalg.solve(H, -g)
        lam = 1.0
        while lam > 1e-12 and vals(u + lam * step)[0] > w + 0.25 * lam * (g @ step):
            lam *= 0.5
        u = u + lam * step
        if np.linalg.norm(lam * step) < 1e-14 * (1 + np.linalg.norm(u)):
            break
    return u, vals(u)[0]


def _box(V, loga, u0, w0, height):
    n = V.shape[1]
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        th = np.linspace(0, 2 * np.pi, 360, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)

    def W(pts):
        return np.exp(loga[None, :] + pts @ V.T).sum(axis=1)

    lo = np.zeros(len(dirs))
    hi = np.ones(len(dirs))
    for _ in range(200):
        over = W(u0 + hi[:, None] * dirs) - w0 > height
        if over.all():
            break
        hi = np.where(over, hi, 2 * hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        over = W(u0 + mid[:, None] * dirs) - w0 > height
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    pts = u0 + hi[:, None] * dirs
    box = []
    for a in range(n):
        mn, mx = pts[:, a].min(), pts[:, a].max()
        pad = 0.05 * (mx - mn)
        box.append((mn - pad, mx + pad))
    return box


def positive_cycle_period(model: LGModel, z: float, rtol: float = 1e-12) -> PeriodResult:
    """int over (R_{>0})^n of exp(-W/z) dx/x, by tanh-sinh in u = log x."""
    z = float(z)
    if not z > 0:
        raise LGError("z must be a positive real number")
    n = model.dim
    if n > 2:
        raise LGError("quadrature periods are implemented for n <= 2")
    V, loga = _real_terms(model)
    u0, w0 = _real_minimizer(V, loga)
    box = _box(V, loga, u0, w0, LEVEL * z)

    if n == 1:
        def fn(u):
            w = np.exp(loga[None, :] + np.outer(u, V[:, 0])).sum(axis=1)
            return np.exp(-(w - w0) / z)
        max_level = 11
    else:
        def fn(u1, u2):
            w = np.zeros_like(u1)
            for (p, r), la in zip(V, loga):
                w = w + np.exp(la + p * u1 + r * u2)
            return np.exp(-(w - w0) / z)
        max_level = 8
    val, err, level = tanh_sinh(fn, box, rtol=rtol, max_level=max_level)
    scale = math.exp(-w0 / z)
    return PeriodResult(complex(val * scale), "quadrature", float(err * scale), None, 1.0,
                        {"level": level, "box": [list(b) for b in box], "minimum": w0})


# ---------------------------------------------------------------------------
# critical points and residues


def _noise(V, t):
    """Rounding floor of each gradient component: terms of very different size cancel in V^T t."""
    return 1e-13 * (np.abs(V).T @ np.abs(t))


def _newton(V, loga, u, iters=100):
    """Damped Newton on grad W = 0 in log coordinates; stops at the rounding floor."""
    for _ in range(iters):
        t = np.exp(loga + V @ u)
        if not np.all(np.isfinite(t)):
            return u, False
        g = V.T @ t
        if np.all(np.abs(g) <= _noise(V, t)):
            return u, True
        H = (V.T * t) @ V
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return u, False
        if not np.all(np.isfinite(step)):
            return u, False
        gn = np.linalg.norm(g)
        lam = 1.0
        while lam > 1e-6:
            un = u + lam * step
            tn = np.exp(loga + V @ un)
            if np.all(np.isfinite(tn)) and np.linalg.norm(V.T @ tn) < (1 - lam / 4) * gn:
                break
            lam *= 0.5
        if lam <= 1e-6:
            # no descent left: accept if the full step is already below the noise it induces
            return u + step, bool(np.linalg.norm(step) <= 1e-6 * (1 + np.linalg.norm(u)))
        u = u + lam * step
    return u, False


def _uncertainty(V, loga, u):
    t = np.exp(loga + V @ u)
    H = (V.T * t) @ V
    try:
        return np.abs(np.linalg.inv(H)) @ _noise(V, t)
    except np.linalg.LinAlgError:
        return np.full(len(u), np.inf)


def _same(u, w, slack=0.0, tol=1e-8):
    d = u - w
    im = (d.imag + np.pi) % (2 * np.pi) - np.pi
    lim = tol * (1 + np.abs(u)) + 100 * slack
    return np.all(np.abs(d.real) < lim) and np.all(np.abs(im) < lim)


def _multistart(V, loga, rng, budget, expected, R):
    n = V.shape[1]
    found: list[np.ndarray] = []
    for attempt in range(budget):
        u = rng.uniform(-R, R, n) + 1j * rng.uniform(-np.pi, np.pi, n)
        u, ok = _newton(V, loga, u)
        if not ok:
            continue
        u = u.real + 1j * ((u.imag + np.pi) % (2 * np.pi) - np.pi)
        slack = _uncertainty(V, loga, u)
        if not any(_same(u, w, slack) for w in found):
            found.append(u)
        if expected is not None and len(found) >= expected and attempt > 20:
            break
    return found


def _track(V, l0, l1, u, h0=0.05):
    """Follow a critical point of W_s, log a(s) = (1-s) l0 + s l1, from s = 0 to 1."""
    dl = l1 - l0
    s, h = 0.0, h0
    while s < 1.0:
        h = min(h, 1.0 - s)
        t = np.exp(l0 + s * dl + V @ u)
        H = (V.T * t) @ V
        try:
            du = np.linalg.solve(H, -(V.T @ (t * dl)))
        except np.linalg.LinAlgError:
            return u, False
        ls = l0 + (s + h) * dl
        w = u + h * du
        ok = False
        for it in range(8):
            tw = np.exp(ls + V @ w)
            if not np.all(np.isfinite(tw)):
                break
            if it > 0 and np.all(np.abs(V.T @ tw) <= _noise(V, tw)):
                ok = True
                break
            try:
                step = np.linalg.solve((V.T * tw) @ V, -(V.T @ tw))
            except np.linalg.LinAlgError:
                break
            if it == 0 and np.linalg.norm(step) > 0.1 * (1 + h * np.linalg.norm(du)):
                break
            w = w + step
            if np.linalg.norm(step) <= 1e-10 * (1 + np.linalg.norm(w)):
                ok = True
                break
        if ok:
            s, u = s + h, w
            h = min(2 * h, 0.2)
        else:
            h /= 2
            if h < 1e-7:
                return u, False
    return _newton(V, l1, u)


def critical_points(model: LGModel, seed: int = 0, budget: int = 500) -> list[np.ndarray]:
    """All critical points of W in the torus, as arrays x in (C*)^n.

    With a known count the points are tracked from a random well-scaled start
    system along a complex path of coefficients; otherwise plain multi-start.
    """
    if model._crit is not None:
        return model._crit
    V = np.array(model.exponents, dtype=float)
    loga = np.array(model.log_coefficients, dtype=complex)
    expected = model.newton_volume or model.euler or None
    rng = np.random.default_rng(seed)
    with np.errstate(over="ignore", invalid="ignore"):
        if expected is None:
            found = _multistart(V, loga, rng, budget, None, 2.0 + np.abs(loga.real).max())
        else:
            found = []
            for _ in range(3):
                l0 = 0.3 * rng.normal(size=len(loga)) + 1j * rng.uniform(-np.pi, np.pi, len(loga))
                starts = _multistart(V, l0, rng, budget, expected, 3.0)
                if len(starts) != expected:
                    continue
                found = []
                for u in starts:
                    u, ok = _track(V, l0, loga, u)
                    if not ok:
                        break
                    u = u.real + 1j * ((u.imag + np.pi) % (2 * np.pi) - np.pi)
                    slack = _uncertainty(V, loga, u)
                    if not any(_same(u, w, slack) for w in found):
                        found.append(u)
                if len(found) == expected:
                    break
    if expected is not None and len(found) != expected:
        msg = f"found {len(found)} critical points, expected {expected}"
        if np.ptp(loga.real) > 36:
            msg += "; coefficients span more than double precision can separate"
        raise CriticalPointError(msg)
    if model.euler and len(found) != model.euler:
        warnings.warn(f"W has {len(found)} critical points but X has {model.euler} fixed points "
                      "(expected when X is not weak Fano)")
    found.sort(key=lambda u: tuple(np.round(np.concatenate([u.real, u.imag]), 9)))
    pts = [np.exp(u) for u in found]
    model._crit = pts
    return pts


def _laurent(p, x: np.ndarray) -> complex:
    if p is None:
        return 1.0
    if callable(p):
        return complex(p(x))
    if isinstance(p, dict):
        return complex(sum(c * np.prod(x ** np.array(e)) for e, c in p.items()))
    return complex(p)


def _log_hessian(model: LGModel, x: np.ndarray) -> np.ndarray:
    V = np.array(model.exponents, dtype=float)
    t = model.coefficients * np.array([np.prod(x ** v) for v in V])
    return (V.T * t) @ V, np.abs(t).max()


def residue_pairing(model: LGModel, fpoly, gpoly, points=None) -> complex:
    """sum over Crit(W) of f g / (prod x_i^2 det W'') = f g / det(log-coordinate Hessian)."""
    pts = critical_points(model) if points is None else points
    total = 0j
    for x in pts:
        H, scale = _log_hessian(model, x)
        det = np.linalg.det(H)
        if abs(det) <= 1e-12 * scale ** model.dim:
            raise SingularHessian(f"degenerate critical point at x = {x.tolist()}")
        total += _laurent(fpoly, x) * _laurent(gpoly, x) / det
    return total


# ---------------------------------------------------------------------------
# large-volume asymptotics


def asymptotic_sweep(f: Fan, c: ComplexifiedClass, L: DivisorClass, ks=(8, 16, 32, 64),
                     z: float = 1.0, N: int = 20) -> dict:
    """|(2 pi i k)^{-n} gamma_lhs(q_k, ch(L^k)) - int_X e^{-i omega} ch(L)| for each k."""
    n = f.dim
    target = complex(twisted_integral(f, None, c.factor, c.omega, chern_character(L, n)))
    rows = []
    for k in ks:
        ck = c.rescaled(k)
        g = gamma_lhs(f, ck, z, chern_character(L * k, n), N)
        approx = g / (2j * math.pi * k) ** n
        rows.append((k, abs(approx - target), approx))
    logk = np.log([r[0] for r in rows])
    logd = np.log([r[1] for r in rows])
    slope = float(np.polyfit(logk, logd, 1)[0])
    return {"k": [r[0] for r in rows], "discrepancy": [r[1] for r in rows],
            "approx": [r[2] for r in rows], "target": target, "rate": -slope}
