"""Cohomology ring of a smooth complete toric variety.

Classes are raw polynomials in the toric divisors D_i, truncated above the
dimension.  Nothing is reduced to a basis until a class is integrated.
"""

from __future__ import annotations

import cmath
import threading
from dataclasses import dataclass
from fractions import Fraction

from scipy.special import zeta as _zeta

from .fan import Fan, Stratum, dual_vector, enumerate_strata
from .linalg import rank, solve_exact
from .numbers import QComplex, QuadSurd, as_fraction

__all__ = [
    "CohClass",
    "DivisorClass",
    "intersection_number",
    "evaluate_top",
    "chern_character",
    "gamma_class",
    "positivity_cones",
    "is_weak_fano",
    "toric_curves",
    "curve_vector",
    "pairing",
    "integrate_on",
    "pic_coordinates",
    "anticanonical",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.57721566490153286061

_EXACT_TYPES = (int, Fraction, QuadSurd, QComplex)


def _is_exact(x) -> bool:
    return isinstance(x, _EXACT_TYPES)


def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


class CohClass:
    """Polynomial in the toric divisors, monomials keyed by sorted index tuples."""

    __slots__ = ("dim", "terms", "mode")

    def __init__(self, dim: int, terms=None, mode: str = "exact"):
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        self.dim = dim
        self.mode = mode
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(sorted(mono))
            if len(mono) > dim:
                continue
            if mode == "float":
                c = complex(c)
            elif not _is_exact(c):
                raise TypeError("exact-mode classes need exact coefficients")
            if c == 0:
                continue
            if mono in clean:
                c = clean[mono] + c
                if c == 0:
                    del clean[mono]
                    continue
            clean[mono] = c
        self.terms = clean

    # construction helpers
    @classmethod
    def one(cls, dim: int, mode: str = "exact") -> "CohClass":
        return cls(dim, {(): 1 if mode == "exact" else 1.0}, mode)

    @classmethod
    def zero(cls, dim: int, mode: str = "exact") -> "CohClass":
        return cls(dim, {}, mode)

    @classmethod
    def scalar(cls, dim: int, value, mode: str | None = None) -> "CohClass":
        if mode is None:
            mode = "exact" if _is_exact(value) else "float"
        return cls(dim, {(): value}, mode)

    def to_float(self) -> "CohClass":
        if self.mode == "float":
            return self
        return CohClass(self.dim, {k: _to_complex(v) for k, v in self.terms.items()}, "float")

    def _coerce(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        if isinstance(other, DivisorClass):
            return other.to_coh(self.dim)
        return CohClass.scalar(self.dim, other)

    @staticmethod
    def _mode(a: "CohClass", b: "CohClass") -> str:
        return "exact" if a.mode == b.mode == "exact" else "float"

    def __add__(self, other):
        o = self._coerce(other)
        mode = self._mode(self, o)
        a, b = (self, o) if mode == "exact" else (self.to_float(), o.to_float())
        t = dict(a.terms)
        for k, v in b.terms.items():
            t[k] = t[k] + v if k in t else v
        return CohClass(self.dim, t, mode)

    __radd__ = __add__

    def __neg__(self):
        return CohClass(self.dim, {k: -v for k, v in self.terms.items()}, self.mode)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (CohClass, DivisorClass)):
            if self.mode == "exact" and not _is_exact(other):
                return self.to_float() * other
            mode = self.mode
            return CohClass(self.dim, {k: v * other for k, v in self.terms.items()}, mode)
        o = self._coerce(other)
        mode = self._mode(self, o)
        a, b = (self, o) if mode == "exact" else (self.to_float(), o.to_float())
        out: dict = {}
        n = self.dim
        for ka, va in a.terms.items():
            la = len(ka)
            for kb, vb in b.terms.items():
                if la + len(kb) > n:
                    continue
                k = _merge(ka, kb)
                p = va * vb
                out[k] = out[k] + p if k in out else p
        return CohClass(n, out, mode)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e: int):
        out = CohClass.one(self.dim, self.mode)
        for _ in range(e):
            out = out * self
        return out

    def degree_part(self, k: int) -> "CohClass":
        return CohClass(self.dim, {m: v for m, v in self.terms.items() if len(m) == k}, self.mode)

    def constant(self):
        return self.terms.get((), 0)

    def map_degrees(self, fn) -> "CohClass":
        """Multiply the degree-k part by fn(k)."""
        out = {m: v * fn(len(m)) for m, v in self.terms.items()}
        mode = self.mode
        if mode == "exact" and any(not _is_exact(v) for v in out.values()):
            mode = "float"
        return CohClass(self.dim, out, mode)

    def exp(self) -> "CohClass":
        """Exponential in the truncated ring."""
        c0 = self.constant()
        nil = self - CohClass.scalar(self.dim, c0, self.mode) if c0 else self
        out = CohClass.one(self.dim, self.mode)
        term = CohClass.one(self.dim, self.mode)
        for j in range(1, self.dim + 1):
            term = term * nil * (Fraction(1, j) if self.mode == "exact" else 1.0 / j)
            out = out + term
        if c0:
            if self.mode == "exact":
                if c0 != 0:
                    raise ValueError("exponential of a nonzero exact constant is not exact")
            else:
                out = out * _cexp(c0)
        return out

    def log1p(self) -> "CohClass":
        """log(1 + x) for nilpotent x."""
        if self.constant():
            raise ValueError("log1p needs a nilpotent argument")
        out = CohClass.zero(self.dim, self.mode)
        term = CohClass.one(self.dim, self.mode)
        for j in range(1, self.dim + 1):
            term = term * self
            c = Fraction((-1) ** (j + 1), j) if self.mode == "exact" else (-1) ** (j + 1) / j
            out = out + term * c
        return out

    def max_abs(self) -> float:
        return max((abs(complex(_to_complex(v))) for v in self.terms.values()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "CohClass(0)"
        parts = []
        for m in sorted(self.terms, key=lambda k: (len(k), k)):
            mono = "*".join(f"D{i}" for i in m) or "1"
            parts.append(f"({self.terms[m]})*{mono}")
        return "CohClass(" + " + ".join(parts) + ")"


def _cexp(z):
    return cmath.exp(complex(z))


def _to_complex(v) -> complex:
    if isinstance(v, QComplex):
        return complex(v)
    if isinstance(v, QuadSurd):
        return complex(float(v))
    return complex(v)


@dataclass(frozen=True)
class DivisorClass:
    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in coeffs))

    @classmethod
    def ray(cls, f: Fan, i: int) -> "DivisorClass":
        return cls([int(j == i) for j in range(f.n_rays)])

    @classmethod
    def zero(cls, f: Fan) -> "DivisorClass":
        return cls([0] * f.n_rays)

    @classmethod
    def from_basis(cls, f: Fan, coeffs) -> "DivisorClass":
        """Build from coefficients in the fan's named Pic basis (e.g. h, e)."""
        if not f.basis:
            raise ValueError(f"fan {f.name!r} declares no named basis")
        if isinstance(coeffs, dict):
            coeffs = [coeffs.get(lab, 0) for lab in f.basis_labels()]
        if len(coeffs) != len(f.basis):
            raise ValueError(f"expected {len(f.basis)} basis coefficients, got {len(coeffs)}")
        out = [Fraction(0)] * f.n_rays
        for c, (_, vec) in zip(coeffs, f.basis):
            c = as_fraction(c)
            for i, v in enumerate(vec):
                out[i] += c * v
        return cls(out)

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        return DivisorClass([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return DivisorClass([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return DivisorClass([-a for a in self.coeffs])

    def __mul__(self, k):
        return DivisorClass([a * as_fraction(k) for a in self.coeffs])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_coh(self, dim: int) -> CohClass:
        return CohClass(dim, {(i,): c for i, c in enumerate(self.coeffs) if c != 0}, "exact")

    def to_dict(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d: dict) -> "DivisorClass":
        return cls([Fraction(x) for x in d["coeffs"]])

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


# intersection numbers -------------------------------------------------------

_LOCK = threading.Lock()


def _cache(f: Fan) -> dict:
    c = f._cache.get("intersections")
    if c is None:
        with _LOCK:
            c = f._cache.setdefault("intersections", {})
    return c


def intersection_number(f: Fan, factors) -> Fraction:
    """Top intersection of the divisors D_i, i in the multiset ``factors``."""
    key = tuple(sorted(int(i) for i in factors))
    if len(key) != f.dim:
        raise ValueError(f"arity mismatch: need {f.dim} factors, got {len(key)}")
    cache = _cache(f)
    hit = cache.get(key)
    if hit is not None:
        return hit
    val = _reduce(f, key)
    with _LOCK:
        cache[key] = val
    return val


def _reduce(f: Fan, key: tuple) -> Fraction:
    support = tuple(sorted(set(key)))
    if not f.is_cone(support):
        return Fraction(0)
    if len(support) == len(key):
        return Fraction(1)
    # the first repeated index
    i = next(j for j in support if key.count(j) > 1)
    tau = min(c for c in f.max_cones if set(support) <= set(c))
    m = dual_vector(f, tau, i)
    rest = list(key)
    rest.remove(i)
    total = Fraction(0)
    for j, v in enumerate(f.rays):
        if j == i:
            continue
        w = sum(a * b for a, b in zip(m, v))
        if w == 0:
            continue
        total += w * intersection_number(f, rest + [j])
    return total


def evaluate_top(f: Fan, c: CohClass):
    """Integral over X: the degree-n part paired with intersection numbers."""
    if c.dim != f.dim:
        raise ValueError("dimension mismatch")
    n = f.dim
    total = 0 if c.mode == "exact" else 0j
    for mono, v in c.terms.items():
        if len(mono) != n:
            continue
        num = intersection_number(f, mono)
        if num:
            total = total + v * (num if c.mode == "exact" else float(num))
    return total


def stratum_class(f: Fan, V: Stratum | tuple) -> CohClass:
    cone = V.cone if isinstance(V, Stratum) else tuple(V)
    return CohClass(f.dim, {tuple(sorted(cone)): 1}, "exact")


def integrate_on(f: Fan, V, c: CohClass):
    """Integral of c over the closure of the orbit V (the whole X for the empty cone)."""
    if V is None:
        return evaluate_top(f, c)
    return evaluate_top(f, c * stratum_class(f, V))


def pairing(f: Fan, *divisors: DivisorClass, stratum=None) -> Fraction:
    """Intersection number of divisor classes, optionally restricted to a stratum."""
    prod = CohClass.one(f.dim)
    for d in divisors:
        prod = prod * d.to_coh(f.dim)
    return integrate_on(f, stratum, prod)


def chern_character(d: DivisorClass, n: int) -> CohClass:
    return d.to_coh(n).exp()


def gamma_class(f: Fan) -> CohClass:
    n = f.dim
    zetas = {k: float(_zeta(k, 1)) for k in range(2, n + 1)}
    out = CohClass.one(n, "float")
    for i in range(f.n_rays):
        terms = {(i,): -EULER_GAMMA}
        for k in range(2, n + 1):
            terms[(i,) * k] = (-1) ** k * zetas[k] / k
        out = out * CohClass(n, terms, "float").exp()
    return out


# curves and cones -----------------------------------------------------------


def toric_curves(f: Fan) -> list[Stratum]:
    return [s for s in enumerate_strata(f) if s.codim == f.dim - 1] if f.dim > 1 else [Stratum(())]


def curve_vector(f: Fan, C: Stratum) -> tuple[Fraction, ...]:
    """(D_i . C)_i for a toric curve C."""
    return tuple(pairing(f, DivisorClass.ray(f, i), stratum=C) for i in range(f.n_rays))


def curve_pairing(f: Fan, d: DivisorClass, C: Stratum):
    vec = _curve_vectors(f)[C.cone]
    return sum((a * b for a, b in zip(d.coeffs, vec)), Fraction(0))


def _curve_vectors(f: Fan) -> dict:
    c = f._cache.get("curve_vectors")
    if c is None:
        c = {C.cone: curve_vector(f, C) for C in toric_curves(f)}
        with _LOCK:
            f._cache["curve_vectors"] = c
    return c


def positivity_cones(f: Fan, omega: DivisorClass) -> dict:
    vals = [curve_pairing(f, omega, C) for C in toric_curves(f)]
    return {"is_kahler": all(v > 0 for v in vals), "is_nef": all(v >= 0 for v in vals)}


def anticanonical(f: Fan) -> DivisorClass:
    return DivisorClass([1] * f.n_rays)


def is_weak_fano(f: Fan) -> bool:
    k = anticanonical(f)
    nef = positivity_cones(f, k)["is_nef"]
    big = pairing(f, *([k] * f.dim)) > 0
    return nef and big


def pic_basis_rays(f: Fan) -> tuple[int, ...]:
    """Rays outside the first maximal cone; their divisors form a Z-basis of Pic."""
    tau = set(f.max_cones[0])
    return tuple(i for i in range(f.n_rays) if i not in tau)


def pic_coordinates(f: Fan, d: DivisorClass) -> tuple[Fraction, ...]:
    """Coordinates of d in the basis ``pic_basis_rays``."""
    key = "pic_elim"
    elim = f._cache.get(key)
    if elim is None:
        tau = f.max_cones[0]
        rows = [f.rays[j] for j in tau]
        elim = {}
        # m_j dual to v_j within tau; D_j = -sum_k <m_j, v_k> D_k over k outside tau
        for pos, j in enumerate(tau):
            rhs = [Fraction(int(p == pos)) for p in range(len(tau))]
            mj = solve_exact(rows, rhs)
            elim[j] = mj
        f._cache[key] = elim
    basis = pic_basis_rays(f)
    out = []
    for k in basis:
        c = d.coeffs[k]
        for j, mj in elim.items():
            c -= d.coeffs[j] * sum(a * b for a, b in zip(mj, f.rays[k]))
        out.append(c)
    return tuple(out)


def linearly_equivalent(f: Fan, a: DivisorClass, b: DivisorClass) -> bool:
    return pic_coordinates(f, a) == pic_coordinates(f, b)


def independent(f: Fan, divisors) -> bool:
    rows = [pic_coordinates(f, d) for d in divisors]
    return rank(rows) == len(rows)


def relations(f: Fan) -> list[tuple[int, ...]]:
    """Rows <m, v_i> for the standard dual basis m = e_1..e_n."""
    return [tuple(v[a] for v in f.rays) for a in range(f.dim)]
