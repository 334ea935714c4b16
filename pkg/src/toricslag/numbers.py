"""Exact arithmetic in real quadratic fields Q(sqrt r) and their Gaussian extension.

Kähler classes such as (2h - e)/sqrt(3) enter every stability test.  Carrying the
radical exactly keeps all sign decisions free of floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["QuadSurd", "QComplex", "as_fraction", "squarefree_split", "arg_compare"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def squarefree_split(r: Fraction) -> tuple[Fraction, int]:
    """Write a positive rational r as c**2 * s with s a squarefree integer."""
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("radicand must be positive")
    # sqrt(p/q) = sqrt(p*q)/q
    n = r.numerator * r.denominator
    outside = 1
    s = 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            outside *= d
            n //= d * d
        if n % d == 0:
            s *= d
            n //= d
        d += 1
    s *= n
    return Fraction(outside, r.denominator), s


class QuadSurd:
    """The real number a + b*sqrt(r), with a, b rational and r a squarefree integer."""

    __slots__ = ("a", "b", "r")

    def __init__(self, a=0, b=0, r=1):
        a = as_fraction(a)
        b = as_fraction(b)
        r = as_fraction(r)
        if b != 0:
            c, s = squarefree_split(r)
            b = b * c
            r = Fraction(s)
            if s == 1:
                a, b = a + b, Fraction(0)
        if b == 0:
            r = Fraction(1)
        self.a = a
        self.b = b
        self.r = int(r)

    @classmethod
    def sqrt(cls, r) -> "QuadSurd":
        return cls(0, 1, r)

    # coercion
    def _lift(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return QuadSurd(other)
        return NotImplemented

    def _common(self, other: "QuadSurd") -> int:
        if self.b == 0:
            return other.r
        if other.b == 0 or other.r == self.r:
            return self.r
        raise ValueError(f"incompatible radicals sqrt({self.r}) and sqrt({other.r})")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadSurd(self.a + o.a, self.b + o.b, self._common(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.r)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        r = self._common(o)
        return QuadSurd(self.a * o.a + self.b * o.b * r, self.a * o.b + self.b * o.a, r)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.r)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.r

    def inverse(self) -> "QuadSurd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt r)")
        c = self.conjugate()
        return QuadSurd(c.a / n, c.b / n, self.r)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers")
        out = QuadSurd(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 r
        d = self.a * self.a - self.b * self.b * self.r
        return sa if d > 0 else (sb if d < 0 else 0)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.r == o.r)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.r))

    def _cmp(self, other) -> int:
        o = self._lift(other)
        if o is NotImplemented:
            raise TypeError("unorderable")
        return (self - o).sign()

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        return self._cmp(other) < 0

    def __le__(self, other):
        if isinstance(other, float):
            return float(self) <= other
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if isinstance(other, float):
            return float(self) > other
        return self._cmp(other) > 0

    def __ge__(self, other):
        if isinstance(other, float):
            return float(self) >= other
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.r)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"QuadSurd({self})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        rad = f"sqrt({self.r})"
        if self.b == 1:
            tail = rad
        elif self.b == -1:
            tail = "-" + rad
        else:
            tail = f"{self.b}*{rad}"
        if self.a == 0:
            return tail
        if tail.startswith("-"):
            return f"{self.a} - {tail[1:]}"
        return f"{self.a} + {tail}"

    @classmethod
    def parse(cls, text: str) -> "QuadSurd":
        """Inverse of ``str``; accepts 'p/q', 'sqrt(r)', 'a + b*sqrt(r)', 'a - sqrt(r)'."""
        s = text.replace(" ", "")
        if "sqrt(" not in s:
            return cls(Fraction(s))
        head, _, rest = s.partition("sqrt(")
        r = Fraction(rest.rstrip(")"))
        head = head.rstrip("*")
        # split head into the rational part and the coefficient of the radical
        cut = max(head.rfind("+", 1), head.rfind("-", 1))
        if cut > 0:
            a, b = head[:cut], head[cut:]
        else:
            a, b = "0", head
        if b in ("", "+"):
            bval = Fraction(1)
        elif b == "-":
            bval = Fraction(-1)
        else:
            bval = Fraction(b)
        return cls(Fraction(a), bval, r)


def _q(x) -> QuadSurd:
    return x if isinstance(x, QuadSurd) else QuadSurd(x)


class QComplex:
    """re + i*im with both parts in a common Q(sqrt r)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    def _lift(self, other):
        if isinstance(other, QComplex):
            return other
        if isinstance(other, (int, Fraction, QuadSurd, Rational)):
            return QComplex(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        num = self * o.conjugate()
        return QComplex(num.re / n, num.im / n)

    def times_i(self, power: int = 1) -> "QComplex":
        z = self
        for _ in range(power % 4):
            z = QComplex(-z.im, z.re)
        return z

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def arg(self) -> float:
        if not self:
            raise ZeroDivisionError("argument of zero")
        return math.atan2(float(self.im), float(self.re))

    def __repr__(self):
        return f"QComplex({self.re}, {self.im})"

    def __str__(self):
        return f"({self.re}) + ({self.im})i"


def cross(z: QComplex, w: QComplex) -> QuadSurd:
    """Im(conj(z) w); its sign is the sign of sin(arg w - arg z)."""
    return z.re * w.im - z.im * w.re


def dot(z: QComplex, w: QComplex) -> QuadSurd:
    """Re(conj(z) w)."""
    return z.re * w.re + z.im * w.im


def _arg_class(z: QComplex) -> int:
    s_im = z.im.sign()
    if s_im < 0:
        return 0
    if s_im > 0:
        return 2
    s_re = z.re.sign()
    if s_re > 0:
        return 1
    if s_re < 0:
        return 3
    raise ZeroDivisionError("argument of zero")


def arg_compare(z: QComplex, w: QComplex) -> int:
    """Exact comparison of principal arguments in (-pi, pi]: returns -1, 0 or 1."""
    cz, cw = _arg_class(z), _arg_class(w)
    if cz != cw:
        return -1 if cz < cw else 1
    if cz in (1, 3):
        return 0
    return -cross(z, w).sign()
