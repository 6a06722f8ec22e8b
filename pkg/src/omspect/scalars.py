"""Exact scalars a + b*sqrt(m) over the rationals.

One square-free radicand m per model; m = 0 encodes plain rationals.
Every predicate downstream (orthogonality, idempotence, order) is decided
with these, never with floats.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


def is_square_free(m: int) -> bool:
    if m < 0:
        return False
    if m in (0, 1):
        return True
    d = 2
    while d * d <= m:
        if m % (d * d) == 0:
            return False
        d += 1
    return True


@total_ordering
class QuadScalar:
    """Immutable element of Q(sqrt(m)), normalized so b == 0 implies m == 0."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b=0, m: int = 0):
        a = a if isinstance(a, Fraction) else Fraction(a)
        b = b if isinstance(b, Fraction) else Fraction(b)
        if m == 1:
            a, b, m = a + b, Fraction(0), 0
        if b == 0:
            m = 0
        if m == 0 and b != 0:
            raise ValueError("irrational part requires a radicand")
        if m and not is_square_free(m):
            raise ValueError(f"radicand {m} is not square-free")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)

    def __setattr__(self, *_):
        raise AttributeError("QuadScalar is immutable")

    # -- ring plumbing -------------------------------------------------

    @staticmethod
    def _coerce(x) -> "QuadScalar":
        if isinstance(x, QuadScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return QuadScalar(x)
        return NotImplemented

    def _join_m(self, other: "QuadScalar") -> int:
        if self.m == other.m:
            return self.m
        if self.m == 0:
            return other.m
        if other.m == 0:
            return self.m
        raise ValueError(f"mixed radicands {self.m} and {other.m}")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadScalar(self.a + other.a, self.b + other.b, self._join_m(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.m)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m = self._join_m(other)
        if self.b == 0 and other.b == 0:
            return QuadScalar(self.a * other.a)
        return QuadScalar(
            self.a * other.a + self.b * other.b * m,
            self.a * other.b + self.b * other.a,
            m,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadScalar":
        if self.b == 0:
            if self.a == 0:
                raise ZeroDivisionError("zero scalar")
            return QuadScalar(1 / self.a)
        # (a + b r)^-1 = (a - b r) / (a^2 - m b^2); the norm is nonzero since
        # sqrt(m) is irrational for square-free m >= 2
        norm = self.a * self.a - self.m * self.b * self.b
        return QuadScalar(self.a / norm, -self.b / norm, self.m)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    # -- order and identity --------------------------------------------

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return 0 if a == 0 else (1 if a > 0 else -1)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with m b^2 (equality impossible)
        if a > 0:
            return 1 if a * a > self.m * b * b else -1
        return 1 if self.m * b * b > a * a else -1

    def __bool__(self) -> bool:
        return self.sign() != 0

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.m == other.m

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    # -- views -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def as_int(self) -> int:
        f = self.as_fraction()
        if f.denominator != 1:
            raise ValueError(f"{self} is not an integer")
        return f.numerator

    def __repr__(self):
        return f"QuadScalar({self.a!r}, {self.b!r}, {self.m!r})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = f"r{self.m}" if self.m != 2 else "r"
        bpart = f"{self.b}*{root}" if self.b != 1 else root
        if self.a == 0:
            return bpart
        sign = "+" if self.b > 0 else "-"
        mag = -self.b if self.b < 0 else self.b
        magpart = f"{mag}*{root}" if mag != 1 else root
        return f"{self.a}{sign}{magpart}"


QS0 = QuadScalar(0)
QS1 = QuadScalar(1)


def qs(a, b=0, m: int = 0) -> QuadScalar:
    return QuadScalar(a, b, m)
