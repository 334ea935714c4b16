"""Independent reference computations used by the tests.

Nothing here calls into the intersection-number reduction of the package.
"""

import math
from fractions import Fraction
from itertools import product

from scipy import integrate
from scipy.special import k0


def cyclic_order(rays):
    return sorted(range(len(rays)), key=lambda i: math.atan2(rays[i][1], rays[i][0]))


def surface_form(rays):
    """Intersection matrix of a smooth complete toric surface from its cyclic fan."""
    m = len(rays)
    order = cyclic_order(rays)
    M = [[Fraction(0)] * m for _ in range(m)]
    for pos, i in enumerate(order):
        prev, nxt = order[pos - 1], order[(pos + 1) % m]
        s = (rays[prev][0] + rays[nxt][0], rays[prev][1] + rays[nxt][1])
        v = rays[i]
        c = s[0] // v[0] if v[0] else s[1] // v[1]
        assert (c * v[0], c * v[1]) == s
        M[i][i] = Fraction(-c)
        M[i][nxt] = M[nxt][i] = Fraction(1)
    return M


def dot(M, a, b):
    return sum(M[i][j] * a[i] * b[j] for i in range(len(a)) for j in range(len(b)))


def dhym_surface(M, omega, alpha):
    """(cot, [lhs on each divisor]) for rational omega, alpha on a surface."""
    aa, ww, aw = dot(M, alpha, alpha), dot(M, omega, omega), dot(M, alpha, omega)
    cot = (aa - ww) / (2 * aw)
    e = [[Fraction(int(i == j)) for j in range(len(M))] for i in range(len(M))]
    return cot, [dot(M, alpha, e[j]) - cot * dot(M, omega, e[j]) for j in range(len(M))]


def collins_shi_sides(k):
    """Both sides of the destabilizing inequality for (2h - e)/sqrt3, L = 2h, C = E, times sqrt3."""
    lhs = Fraction(3 * k * k - 1, 2 * (4 * k * k - k))
    rhs = Fraction(3, 8)
    return lhs, rhs


def bessel_period(q, z):
    return 2 * k0(2 * math.sqrt(q) / z)


def p2_period(q, z):
    """int over R_{>0}^2 of exp(-(x + y + q/(xy))/z) dx dy/(xy), y integrated in closed form."""
    def fn(u):
        x = math.exp(u)
        return math.exp(-x / z) * 2 * k0(2 * math.sqrt(q / x) / z)
    val, err = integrate.quad(fn, -80, 8, limit=400, epsabs=0, epsrel=1e-13)
    return val


def blp_p3_integral(poly, V=None):
    """Integrate a polynomial {(a, b): c} in H, E over Bl_p P^3 (H^3 = E^3 = 1, mixed terms 0).

    V is a divisor class (h, e) to multiply by first.
    """
    if V is not None:
        out = {}
        for (a, b), c in poly.items():
            out[(a + 1, b)] = out.get((a + 1, b), 0) + c * V[0]
            out[(a, b + 1)] = out.get((a, b + 1), 0) + c * V[1]
        poly = out
    return poly.get((3, 0), 0) + poly.get((0, 3), 0)


def exp_twisted_blp_p3(omega, L):
    """The polynomial e^{-i omega} e^{L} in H, E up to degree 3 (complex coefficients)."""
    x = (complex(L[0]) - 1j * omega[0], complex(L[1]) - 1j * omega[1])
    out = {}
    for d in range(4):
        for a in range(d + 1):
            b = d - a
            coeff = x[0] ** a * x[1] ** b / (math.factorial(a) * math.factorial(b))
            out[(a, b)] = out.get((a, b), 0) + coeff
    return out


def golden_min_angle():
    """cot theta_min and the E coefficient on blp_p2, omega = 2H - E, alpha = 5H - E."""
    r = math.sqrt(78)
    return 10 - r, 9 - r


def min_angle_on_E(a=(5, -1), w=(2, -1), grid=200001):
    """Brute-force sup over t >= 0 of g(alpha - tE) in the (H, E) basis."""
    best = -math.inf
    for i in range(grid):
        t = 5.0 * i / (grid - 1)
        h, e = a[0], a[1] - t
        aa = h * h - e * e
        aw = h * w[0] - e * w[1]
        ww = w[0] ** 2 - w[1] ** 2
        if aw > 0:
            best = max(best, (aa - ww) / (2 * aw))
    return best


def residue_p1(q, f, g):
    """Residue pairing on x + q/x; f, g are functions of x."""
    r = math.sqrt(q)
    return sum(f(x) * g(x) / (2 * x) for x in (r, -r))


def lattice_points(N):
    return [(a, b) for a, b in product(range(N + 1), repeat=2) if a + b <= N]
