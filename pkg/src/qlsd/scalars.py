"""Exact scalars over the real quadratic field Q(sqrt 2) and its complexification.

Every amplitude used by the shipped catalogs and protocols lives in this field
(0, +-1, +-1/2, +-1/sqrt2, ...), which makes orthogonality and probability-one
checks decidable with zero tolerance.  A floating-point fallback exists for
user-supplied states outside the field; see :mod:`qlsd.model`.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

_RAT = r"-?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<a>{_RAT})(?=\s*$|\s*[+-]))?"
    rf"(?:\s*(?P<sign>[+-])?\s*(?P<b>\d+(?:/\d+)?)\*sqrt2)?\s*$"
)


def _sqrt_fraction(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    if x < 0:
        return None
    pn = math.isqrt(x.numerator)
    pd = math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


_F0 = Fraction(0)


class QScalar:
    """An element a + b*sqrt(2) with rational a, b, stored in lowest terms."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction) -> "QScalar":
        out = object.__new__(cls)
        out.a = a
        out.b = b
        return out

    # -- constructors ------------------------------------------------------

    @staticmethod
    def sqrt2() -> QScalar:
        return QScalar(0, 1)

    @staticmethod
    def inv_sqrt2() -> QScalar:
        """1/sqrt(2) = (1/2)*sqrt(2)."""
        return QScalar(0, Fraction(1, 2))

    @classmethod
    def parse(cls, text: str) -> QScalar:
        """Parse the exact text form, e.g. "1/2*sqrt2", "-1", "1-1/2*sqrt2"."""
        m = _SCALAR_RE.match(text)
        if not m or (m.group("a") is None and m.group("b") is None):
            raise ValueError(f"not a valid exact scalar: {text!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if m.group("b") is not None:
            b = Fraction(m.group("b"))
            if m.group("sign") == "-":
                b = -b
        return cls(a, b)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: QScalar) -> QScalar:
        return QScalar._raw(self.a + other.a, self.b + other.b)

    def __sub__(self, other: QScalar) -> QScalar:
        return QScalar._raw(self.a - other.a, self.b - other.b)

    def __mul__(self, other: QScalar) -> QScalar:
        # (a + b r)(c + d r) = (ac + 2bd) + (ad + bc) r  with r^2 = 2
        b, d = self.b, other.b
        if not b and not d:
            return QScalar._raw(self.a * other.a, _F0)
        return QScalar._raw(
            self.a * other.a + 2 * b * d,
            self.a * d + b * other.a,
        )

    def __neg__(self) -> QScalar:
        return QScalar._raw(-self.a, -self.b)

    def inv(self) -> QScalar:
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        n = self.a * self.a - 2 * self.b * self.b
        if n == 0:
            if self.a == 0 and self.b == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt2)")
            raise ZeroDivisionError("norm form vanished on a nonzero element")
        return QScalar(self.a / n, -self.b / n)

    def __truediv__(self, other: QScalar) -> QScalar:
        return self * other.inv()

    # -- predicates and order ----------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(2)."""
        if self.a == 0 and self.b == 0:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1
        if self.a <= 0 and self.b <= 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        d = self.a * self.a - 2 * self.b * self.b
        if self.a > 0:
            return 1 if d > 0 else (-1 if d < 0 else 0)
        return 1 if d < 0 else (-1 if d > 0 else 0)

    def sqrt(self) -> QScalar | None:
        """Exact square root within the field, or None if it leaves Q(sqrt2)."""
        if self.sign() < 0:
            return None
        if self.is_zero():
            return QScalar(0, 0)
        if self.b == 0:
            x = _sqrt_fraction(self.a)
            if x is not None:
                return QScalar(x, 0)
            y2 = self.a / 2
            y = _sqrt_fraction(y2)
            if y is not None:
                return QScalar(0, y)
            return None
        # (x + y r)^2 = self with both x, y nonzero
        disc = _sqrt_fraction(self.a * self.a - 2 * self.b * self.b)
        if disc is None:
            return None
        for root in ((self.a + disc) / 2, (self.a - disc) / 2):
            x = _sqrt_fraction(root)
            if x is not None and x != 0:
                y = self.b / (2 * x)
                cand = QScalar(x, y)
                if (cand * cand) == self:
                    return cand if cand.sign() >= 0 else -cand
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, QScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __lt__(self, other: QScalar) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: QScalar) -> bool:
        return (self - other).sign() <= 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    # -- formatting ----------------------------------------------------------

    def format(self) -> str:
        """Canonical text form; parse(format(x)) == x."""
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt2"
        op = "+" if self.b > 0 else "-"
        return f"{self.a}{op}{abs(self.b)}*sqrt2"

    def __repr__(self):
        return f"QScalar({self.format()!r})"


Q_ZERO = QScalar(0)
Q_ONE = QScalar(1)


class CScalar:
    """Complex scalar with Q(sqrt2) real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: QScalar | int | Fraction = 0, im: QScalar | int | Fraction = 0):
        self.re = re if isinstance(re, QScalar) else QScalar(re)
        self.im = im if isinstance(im, QScalar) else QScalar(im)

    @classmethod
    def parse(cls, value) -> CScalar:
        """Parse a JSON scalar: a string (real) or a [re, im] pair of strings."""
        if isinstance(value, str):
            return cls(QScalar.parse(value))
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(QScalar.parse(value[0]), QScalar.parse(value[1]))
        if isinstance(value, int):
            return cls(QScalar(value))
        raise ValueError(f"not an exact scalar encoding: {value!r}")

    def to_json(self):
        if self.im.is_zero():
            return self.re.format()
        return [self.re.format(), self.im.format()]

    @classmethod
    def _raw(cls, re: QScalar, im: QScalar) -> "CScalar":
        out = object.__new__(cls)
        out.re = re
        out.im = im
        return out

    def __add__(self, other: CScalar) -> CScalar:
        return CScalar._raw(self.re + other.re, self.im + other.im)

    def __sub__(self, other: CScalar) -> CScalar:
        return CScalar._raw(self.re - other.re, self.im - other.im)

    def __mul__(self, other: CScalar) -> CScalar:
        i1, i2 = self.im, other.im
        if i1.is_zero() and i2.is_zero():
            return CScalar._raw(self.re * other.re, i1)
        return CScalar._raw(
            self.re * other.re - i1 * i2,
            self.re * i2 + i1 * other.re,
        )

    def __neg__(self) -> CScalar:
        return CScalar._raw(-self.re, -self.im)

    def conj(self) -> CScalar:
        if self.im.is_zero():
            return self
        return CScalar._raw(self.re, -self.im)

    def abs2(self) -> QScalar:
        """Squared modulus |z|^2, an exact QScalar."""
        if self.im.is_zero():
            return self.re * self.re
        return self.re * self.re + self.im * self.im

    def inv(self) -> CScalar:
        n = self.abs2()
        if n.is_zero():
            raise ZeroDivisionError("division by zero")
        ninv = n.inv()
        return CScalar(self.re * ninv, -(self.im * ninv))

    def __truediv__(self, other: CScalar) -> CScalar:
        return self * other.inv()

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, CScalar):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im.is_zero():
            return f"CScalar({self.re.format()!r})"
        return f"CScalar({self.re.format()!r}, {self.im.format()!r})"


C_ZERO = CScalar(0)
C_ONE = CScalar(1)


def qs(a, b=0) -> QScalar:
    """Shorthand constructor."""
    return QScalar(a, b)


def cs(a, b=0) -> CScalar:
    """Shorthand real-part constructor: cs(a, b) = (a + b*sqrt2) + 0i."""
    return CScalar(QScalar(a, b))
