"""Smooth complete toric fans: validation, presets, strata."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .linalg import det_int, solve_exact

__all__ = [
    "Fan",
    "FanError",
    "Stratum",
    "load_fan",
    "preset_fan",
    "enumerate_strata",
    "surface_curve_selfintersections",
    "PRESET_NAMES",
]


class FanError(ValueError):
    """Invalid fan data."""


@dataclass(frozen=True)
class Stratum:
    cone: tuple[int, ...]

    @property
    def codim(self) -> int:
        return len(self.cone)

    def to_dict(self) -> dict:
        return {"cone": list(self.cone), "codim": self.codim}


@dataclass(frozen=True, eq=False)
class Fan:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]
    name: str | None = None
    # named basis of Pic: label -> coefficient vector over rays
    basis: tuple[tuple[str, tuple[int, ...]], ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def picard_rank(self) -> int:
        return self.n_rays - self.dim

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.dim, self.rays, self.max_cones) == (other.dim, other.rays, other.max_cones)

    def __hash__(self):
        return hash((self.dim, self.rays, self.max_cones))

    def cone_set(self) -> frozenset:
        """All cones (as sorted index tuples), including the zero cone."""
        key = "cones"
        if key not in self._cache:
            out = set()
            for c in self.max_cones:
                for k in range(len(c) + 1):
                    out.update(combinations(c, k))
            self._cache[key] = frozenset(out)
        return self._cache[key]

    def is_cone(self, idx) -> bool:
        return tuple(sorted(set(idx))) in self.cone_set()

    def basis_labels(self) -> list[str]:
        return [b[0] for b in self.basis]

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }
        if self.name:
            d["name"] = self.name
        if self.basis:
            d["basis"] = {lab: list(v) for lab, v in self.basis}
        return d


def _validate(dim, rays, cones) -> None:
    if dim < 1:
        raise FanError("dimension must be positive")
    for i, r in enumerate(rays):
        if len(r) != dim:
            raise FanError(f"ray {i} has wrong length")
        if math.gcd(*r) != 1:
            raise FanError(f"non-primitive ray {i}")
    if len(set(rays)) != len(rays):
        raise FanError("duplicate rays")
    seen = set()
    for j, c in enumerate(cones):
        if len(c) != dim or len(set(c)) != dim:
            raise FanError(f"maximal cone {j} must have {dim} distinct rays")
        for i in c:
            if not 0 <= i < len(rays):
                raise FanError(f"maximal cone {j} references unknown ray {i}")
        if c in seen:
            raise FanError(f"duplicate maximal cone {j}")
        seen.add(c)
        if abs(det_int([rays[i] for i in c])) != 1:
            raise FanError(f"non-smooth cone {j}")
    used = {i for c in cones for i in c}
    missing = set(range(len(rays))) - used
    if missing:
        raise FanError(f"incomplete fan: ray {min(missing)} lies in no maximal cone")
    # facet condition
    facets: dict[tuple, list[int]] = {}
    for j, c in enumerate(cones):
        for f in combinations(c, dim - 1):
            facets.setdefault(f, []).append(j)
    for f, owners in facets.items():
        if len(owners) != 2:
            raise FanError(f"incomplete fan: facet {list(f)} lies in {len(owners)} maximal cone(s)")
        if dim >= 2:
            # the two cones must lie on opposite sides of the facet hyperplane
            a, b = (cones[o] for o in owners)
            xa = next(i for i in a if i not in f)
            xb = next(i for i in b if i not in f)
            da = det_int([rays[i] for i in f] + [rays[xa]])
            db = det_int([rays[i] for i in f] + [rays[xb]])
            if da * db >= 0:
                raise FanError(f"overlapping cones across facet {list(f)}")
    # connectedness through facets
    adj = {j: set() for j in range(len(cones))}
    for owners in facets.values():
        a, b = owners
        adj[a].add(b)
        adj[b].add(a)
    stack, reached = [0], {0}
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in reached:
                reached.add(nb)
                stack.append(nb)
    if len(reached) != len(cones):
        raise FanError("incomplete fan: maximal cones not connected")
    if dim == 2:
        _check_surface_winding(rays, cones)


def _check_surface_winding(rays, cones) -> None:
    # a complete 2d fan winds exactly once around the origin
    total = 0.0
    for a, b in cones:
        va, vb = rays[a], rays[b]
        ang = abs(math.atan2(va[0] * vb[1] - va[1] * vb[0], va[0] * vb[0] + va[1] * vb[1]))
        total += ang
    if abs(total - 2 * math.pi) > 1e-9:
        raise FanError("incomplete fan: cones do not cover the plane exactly once")


def make_fan(dim, rays, cones, name=None, basis=()) -> Fan:
    rays_t = tuple(tuple(int(x) for x in r) for r in rays)
    cones_t = tuple(tuple(sorted(int(i) for i in c)) for c in cones)
    _validate(dim, rays_t, cones_t)
    cones_t = tuple(sorted(cones_t))
    basis_t = tuple((lab, tuple(int(x) for x in vec)) for lab, vec in basis)
    return Fan(dim, rays_t, cones_t, name, basis_t)


def load_fan(document) -> Fan:
    """Parse and validate a fan document (JSON text or an already decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise FanError(f"parse error: {exc}") from exc
    else:
        data = document
    try:
        dim = int(data["dim"])
        rays = [list(map(int, r)) for r in data["rays"]]
        cones = [list(map(int, c)) for c in data["max_cones"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FanError(f"parse error: {exc}") from exc
    basis = ()
    if "basis" in data:
        basis = tuple((k, tuple(v)) for k, v in data["basis"].items())
    return make_fan(dim, rays, cones, data.get("name"), basis)


# presets ------------------------------------------------------------------


def _unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


def _pn(n: int) -> Fan:
    rays = [_unit(n, i) for i in range(n)] + [tuple([-1] * n)]
    cones = list(combinations(range(n + 1), n))
    hvec = tuple([0] * n + [1])
    name = "p1" if n == 1 else ("p2" if n == 2 else f"pn({n})")
    return make_fan(n, rays, cones, name, [("h", hvec)])


def _p1xp1() -> Fan:
    rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    cones = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return make_fan(2, rays, cones, "p1xp1", [("f1", (1, 0, 0, 0)), ("f2", (0, 1, 0, 0))])


def _hirzebruch(a: int) -> Fan:
    if a < 0:
        raise FanError("hirzebruch parameter must be non-negative")
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    cones = [(0, 1), (1, 2), (2, 3), (3, 0)]
    # f: fibre (self-intersection 0); s: the negative section D_1 with s^2 = -a
    return make_fan(2, rays, cones, f"hirzebruch({a})", [("f", (1, 0, 0, 0)), ("s", (0, 1, 0, 0))])


def _blp_p2() -> Fan:
    rays = [(1, 0), (0, 1), (-1, -1), (1, 1)]
    cones = [(0, 3), (1, 3), (1, 2), (0, 2)]
    return make_fan(2, rays, cones, "blp_p2", [("h", (0, 0, 1, 0)), ("e", (0, 0, 0, 1))])


def _blpq_p2() -> Fan:
    # P^2 blown up at the fixed points of the cones <e1,e2> and <e2,-e1-e2>
    rays = [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0)]
    cones = [(0, 3), (1, 3), (1, 4), (2, 4), (0, 2)]
    basis = [("h", (1, 0, 0, 1, 0)), ("e1", (0, 0, 0, 1, 0)), ("e2", (0, 0, 0, 0, 1))]
    return make_fan(2, rays, cones, "blpq_p2", basis)


def _blp_pn(n: int) -> Fan:
    if n == 2:
        return _blp_p2()
    rays = [_unit(n, i) for i in range(n)] + [tuple([-1] * n), tuple([1] * n)]
    neg, pos = n, n + 1
    cones = [c for c in combinations(range(n + 1), n) if neg in c]
    cones += [tuple(sorted(c + (pos,))) for c in combinations(range(n), n - 1)]
    basis = [("h", tuple(1 if i == neg else 0 for i in range(n + 2))),
             ("e", tuple(1 if i == pos else 0 for i in range(n + 2)))]
    return make_fan(n, rays, cones, f"blp_pn({n})", basis)


PRESET_NAMES = ["p1", "p2", "pn(n)", "p1xp1", "hirzebruch(a)", "blp_p2", "blpq_p2", "blp_pn(n)"]

_PARAM = re.compile(r"^\s*([a-z0-9_]+?)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")


def preset_fan(name: str) -> Fan:
    m = _PARAM.match(name)
    if not m:
        raise FanError(f"unknown preset {name!r}")
    base, arg = m.group(1), m.group(2)
    cache = _PRESET_CACHE
    key = (base, arg)
    if key in cache:
        return cache[key]
    if base == "p1" and arg is None:
        f = _pn(1)
    elif base == "p2" and arg is None:
        f = _pn(2)
    elif base == "pn" and arg is not None and int(arg) >= 1:
        f = _pn(int(arg))
    elif base == "p1xp1" and arg is None:
        f = _p1xp1()
    elif base == "hirzebruch" and arg is not None:
        f = _hirzebruch(int(arg))
    elif base == "blp_p2" and arg is None:
        f = _blp_p2()
    elif base == "blpq_p2" and arg is None:
        f = _blpq_p2()
    elif base == "blp_pn" and arg is not None and int(arg) >= 2:
        f = _blp_pn(int(arg))
    else:
        raise FanError(f"unknown preset {name!r}")
    cache[key] = f
    return f


_PRESET_CACHE: dict = {}


def enumerate_strata(f: Fan) -> list[Stratum]:
    cones = [c for c in f.cone_set() if len(c) > 0]
    cones.sort(key=lambda c: (len(c), c))
    return [Stratum(c) for c in cones]


def cyclic_order(f: Fan) -> list[int]:
    if f.dim != 2:
        raise FanError("not a surface")
    return sorted(range(f.n_rays), key=lambda i: math.atan2(f.rays[i][1], f.rays[i][0]))


def surface_curve_selfintersections(f: Fan) -> dict[int, int]:
    """D_i^2 for each ray of a surface fan, from v_{i-1} + v_{i+1} = c v_i."""
    order = cyclic_order(f)
    m = len(order)
    out = {}
    for pos, i in enumerate(order):
        prev, nxt = f.rays[order[pos - 1]], f.rays[order[(pos + 1) % m]]
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        v = f.rays[i]
        # v is primitive, so s = c v has an integer solution
        c = Fraction(s[0], v[0]) if v[0] != 0 else Fraction(s[1], v[1])
        if (c * v[0], c * v[1]) != s or c.denominator != 1:
            raise FanError("rays are not in smooth cyclic position")
        out[i] = -int(c)
    return out


def dual_vector(f: Fan, cone: tuple[int, ...], i: int) -> tuple[int, ...]:
    """The m with <m, v_i> = -1 and <m, v_j> = 0 for the other rays j of a maximal cone."""
    rows = [f.rays[j] for j in cone]
    rhs = [Fraction(-1) if j == i else Fraction(0) for j in cone]
    sol = solve_exact(rows, rhs)
    return tuple(int(x) for x in sol)
