"""Exact coefficient rings: finite fields, F_2(t) and the rational quaternions.

Every ring is an interned singleton obtained from :func:`field`,
:func:`funcfield2`, :func:`quaternions` or :func:`rationals`, so ring identity
can be tested with ``is``.  Elements are immutable value objects with the usual
operator overloads.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    DegreeOverflowError,
    DivisionByZeroError,
    IncompatibleAutomorphismError,
    ParseError,
    RingMismatchError,
    SizeCapError,
)

MAX_FIELD_ORDER = 2**16
MAX_POLY_DEGREE = 64
# "height <= 2^64 decimal digits", expressed in bits
MAX_HEIGHT_BITS = math.ceil(2**64 * math.log2(10))
_ADD_TABLE_LIMIT = 1024

# Fixed defining polynomials, coefficients from x^0 upwards (monic).
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


class Ring:
    """Common interface of the coefficient rings."""

    kind = "ring"
    characteristic = 0
    is_commutative = True
    is_finite = False
    order: int | None = None
    symbols: dict = {}

    def __call__(self, value):
        raise NotImplementedError

    def parse(self, text: str):
        return parse_element(self, text)

    def format(self, a) -> str:
        return str(a)

    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.spec()

    def elements(self):
        raise NotImplementedError

    def random_element(self, rng: random.Random, nonzero: bool = False, **kw):
        raise NotImplementedError


def _check_same(a, b):
    if a is not b:
        raise RingMismatchError(f"operands live in different rings: {a!r} and {b!r}")


# ---------------------------------------------------------------- finite fields


class FFElement:
    """Element of F_{p^n}; ``code`` packs the base-p coefficient digits."""

    __slots__ = ("field", "code")

    def __init__(self, field: FiniteField, code: int):
        self.field = field
        self.code = code

    @property
    def ring(self):
        return self.field

    def _other(self, other):
        if type(other) is FFElement:
            _check_same(self.field, other.field)
            return other.code
        if isinstance(other, int):
            return self.field(other).code
        return None

    def __add__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        f = self.field
        return f._el[f._add(self.code, c)]

    __radd__ = __add__

    def __neg__(self):
        return self.field._el[self.field._neg[self.code]]

    def __sub__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        f = self.field
        return f._el[f._add(self.code, f._neg[c])]

    def __rsub__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        f = self.field
        return f._el[f._add(c, f._neg[self.code])]

    def __mul__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        a = self.code
        if a == 0 or c == 0:
            return self.field.zero
        f = self.field
        return f._el[f._exp[f._log[a] + f._log[c]]]

    __rmul__ = __mul__

    def inverse(self):
        if self.code == 0:
            raise DivisionByZeroError("inverse of zero")
        f = self.field
        return f._el[f._exp[f._m - f._log[self.code]]]

    def __truediv__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        return self * self.field._el[c].inverse()

    def __rtruediv__(self, other):
        c = self._other(other)
        if c is None:
            return NotImplemented
        return self.field._el[c] * self.inverse()

    def __pow__(self, e: int):
        f = self.field
        if self.code == 0:
            if e < 0:
                raise DivisionByZeroError("negative power of zero")
            return f.one if e == 0 else f.zero
        return f._el[f._exp[(f._log[self.code] * e) % f._m]]

    def __eq__(self, other):
        if type(other) is FFElement:
            return self.field is other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field(other).code
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.n, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return self.field.format(self)

    __str__ = __repr__

    def digits(self) -> list[int]:
        return self.field.digits(self.code)


class FiniteField(Ring):
    """F_{p^n} as F_p[w] modulo a fixed irreducible (primitive) polynomial."""

    kind = "finite-field"
    is_finite = True

    def __init__(self, p: int, n: int = 1, name: str = "w"):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        q = p**n
        if q > MAX_FIELD_ORDER:
            raise SizeCapError(f"field order {q} exceeds cap {MAX_FIELD_ORDER}")
        self.p, self.n, self.order, self.name = p, n, q, name
        self.characteristic = p
        self._m = q - 1
        self.modulus = self._choose_modulus()
        self._build_tables()
        self._el = [FFElement(self, c) for c in range(q)]
        self.zero, self.one = self._el[0], self._el[1]
        self.symbols = {name: self.generator} if n > 1 else {}

    # -- construction helpers
    def _powers(self, modulus):
        """Successive powers of the root of ``modulus`` as codes, or None if not primitive."""
        p, n, q = self.p, self.n, self.order
        if n == 1:
            g = (-modulus[0]) % p
            seq, cur = [], 1
            for _ in range(q - 1):
                seq.append(cur)
                cur = cur * g % p
            ok = cur == 1 and len(set(seq)) == q - 1
            return seq if ok else None
        weights = [p**i for i in range(n)]
        cur = [1] + [0] * (n - 1)
        seq = []
        for _ in range(q - 1):
            seq.append(sum(d * w for d, w in zip(cur, weights)))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(c - top * m) % p for c, m in zip(cur, modulus)]
        ok = cur == [1] + [0] * (n - 1) and len(set(seq)) == q - 1
        return seq if ok else None

    def _choose_modulus(self):
        key = (self.p, self.n)
        if key in CONWAY and self._powers(CONWAY[key]) is not None:
            return CONWAY[key]
        if self.n == 1:
            for g in range(1, self.p):
                mod = ((-g) % self.p, 1)
                if self._powers(mod) is not None:
                    return mod
        for code in range(self.p**self.n):
            low = tuple((code // self.p**i) % self.p for i in range(self.n))
            mod = low + (1,)
            if low[0] and self._powers(mod) is not None:
                return mod
        raise AssertionError("no primitive polynomial found")

    def _build_tables(self):
        p, n, q = self.p, self.n, self.order
        seq = self._powers(self.modulus)
        self._exp = seq + seq + [seq[0]]
        self._log = [0] * q
        for k, c in enumerate(seq):
            self._log[c] = k
        self._log[0] = -(10**9)
        digits = np.array([[(c // p**i) % p for i in range(n)] for c in range(q)], dtype=np.int64)
        self._digits = digits
        weights = np.array([p**i for i in range(n)], dtype=np.int64)
        self._weights = weights
        self._neg = [int(x) for x in ((-digits) % p) @ weights]
        if p == 2:
            self._add = int.__xor__
        elif q <= _ADD_TABLE_LIMIT:
            table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
            rows = table.tolist()
            self._add = lambda a, b: rows[a][b]
        else:
            dl = digits.tolist()
            wl = weights.tolist()
            self._add = lambda a, b: sum(((x + y) % p) * w for x, y, w in zip(dl[a], dl[b], wl))
        self._frob = [self._exp[(self._log[c] * p) % self._m] if c else 0 for c in range(q)]

    # -- element construction
    @property
    def generator(self) -> FFElement:
        return self._el[self._exp[1]] if self.n > 1 or self.order > 2 else self.one

    def __call__(self, value) -> FFElement:
        if type(value) is FFElement:
            _check_same(self, value.field)
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self._el[value % self.p]
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into {self.spec()}")

    def from_code(self, code: int) -> FFElement:
        return self._el[code]

    def from_digits(self, digits) -> FFElement:
        return self._el[sum((int(d) % self.p) * self.p**i for i, d in enumerate(digits))]

    def digits(self, code: int) -> list[int]:
        return [int(x) for x in self._digits[code]]

    def elements(self):
        return list(self._el)

    def nonzero_elements(self):
        return self._el[1:]

    def frobenius(self, a: FFElement, k: int = 1) -> FFElement:
        c = a.code
        for _ in range(k % self.n):
            c = self._frob[c]
        return self._el[c]

    def sqrt(self, a: FFElement) -> FFElement:
        """Square root; every element is a square in characteristic 2."""
        if self.p != 2:
            raise ValueError("square roots are only provided in characteristic 2")
        return self.frobenius(a, self.n - 1)

    def random_element(self, rng: random.Random, nonzero: bool = False, **kw) -> FFElement:
        lo = 1 if nonzero else 0
        return self._el[rng.randrange(lo, self.order)]

    def tables(self) -> dict:
        """Dense numpy tables for the compiled kernels (requires q <= 1024)."""
        return _field_tables(self.p, self.n)

    def spec(self) -> str:
        return f"field({self.p},{self.n})"

    def format(self, a: FFElement) -> str:
        if self.n == 1:
            return str(a.code)
        terms = []
        for i, d in reversed(list(enumerate(self.digits(a.code)))):
            if d == 0:
                continue
            mono = "" if i == 0 else (self.name if i == 1 else f"{self.name}^{i}")
            if not mono:
                terms.append(str(d))
            else:
                terms.append(mono if d == 1 else f"{d}*{mono}")
        return "+".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def _field_tables(p: int, n: int) -> dict:
    F = field(p, n)
    q = F.order
    if q > _ADD_TABLE_LIMIT:
        raise SizeCapError(f"dense tables need q <= {_ADD_TABLE_LIMIT}")
    d = F._digits
    add = ((d[:, None, :] + d[None, :, :]) % p) @ F._weights
    exp = np.array(F._exp, dtype=np.int64)
    log = np.array([max(x, 0) for x in F._log], dtype=np.int64)
    mul = exp[(log[:, None] + log[None, :])]
    mul[0, :] = 0
    mul[:, 0] = 0
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
    neg = np.array(F._neg, dtype=np.int64)
    for arr in (add, mul, inv, neg):
        arr.setflags(write=False)
    return {"add": add.astype(np.int64), "mul": mul.astype(np.int64), "inv": inv, "neg": neg}


# ------------------------------------------------------ F_2[t] as Python ints


def pdeg(a: int) -> int:
    return a.bit_length() - 1


def pmul(a: int, b: int) -> int:
    """Carry-less product of F_2[t] polynomials encoded as bit masks."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


def pdivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise DivisionByZeroError("polynomial division by zero")
    db = b.bit_length()
    quo = 0
    while True:
        s = a.bit_length() - db
        if s < 0:
            return quo, a
        quo |= 1 << s
        a ^= b << s


def pmod(a: int, b: int) -> int:
    db = b.bit_length()
    while True:
        s = a.bit_length() - db
        if s < 0:
            return a
        a ^= b << s


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pmod(a, b)
    return a


def pdiv_exact(a: int, b: int) -> int:
    if b == 1:
        return a
    return pdivmod(a, b)[0]


def _spread(a: int) -> int:
    """a(t) -> a(t^2): move bit i to bit 2i."""
    r, i = 0, 0
    while a:
        if a & 1:
            r |= 1 << (2 * i)
        a >>= 1
        i += 1
    return r


def _compact(a: int) -> int:
    """Inverse of :func:`_spread` on even polynomials."""
    r, i = 0, 0
    while a:
        if a & 1:
            r |= 1 << i
        a >>= 2
        i += 1
    return r


_EVEN_MASK = int("01" * 512, 2)


def _split_parity(a: int) -> tuple[int, int]:
    """Split a = even + t*odd with both parts in F_2[t^2]."""
    if a.bit_length() > 1024:
        ev = sum(1 << i for i in range(0, a.bit_length(), 2))
    else:
        ev = _EVEN_MASK
    even = a & ev
    odd = (a & (ev << 1)) >> 1
    return even, odd


class RFElement:
    """Reduced fraction num/den of F_2[t] polynomials (bit masks)."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: FunctionField2, num: int, den: int = 1):
        self.ring = ring
        self.num = num
        self.den = den

    def _other(self, other):
        if type(other) is RFElement:
            _check_same(self.ring, other.ring)
            return other
        if isinstance(other, int):
            return self.ring(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        R = self.ring
        a, b, c, d = self.num, self.den, o.num, o.den
        if b == d:
            if b == 1:
                return R._make(a ^ c, 1)
            return R._reduce(a ^ c, b)
        g = pgcd(b, d)
        if g == 1:
            return R._make(pmul(a, d) ^ pmul(c, b), pmul(b, d))
        return R._reduce(pmul(a, pdiv_exact(d, g)) ^ pmul(c, pdiv_exact(b, g)), pmul(b, pdiv_exact(d, g)))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        R = self.ring
        a, b, c, d = self.num, self.den, o.num, o.den
        if b == 1 and d == 1:
            return R._make(pmul(a, c), 1)
        if a == 0 or c == 0:
            return R.zero
        g1 = pgcd(a, d)
        g2 = pgcd(c, b)
        return R._make(
            pmul(pdiv_exact(a, g1), pdiv_exact(c, g2)),
            pmul(pdiv_exact(b, g2), pdiv_exact(d, g1)),
        )

    __rmul__ = __mul__

    def inverse(self):
        if self.num == 0:
            raise DivisionByZeroError("inverse of zero")
        return self.ring._make(self.den, self.num)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = self.ring.one
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if type(other) is RFElement:
            return self.ring is other.ring and self.num == other.num and self.den == other.den
        if isinstance(other, int):
            return self.den == 1 and self.num == (other & 1)
        return NotImplemented

    def __hash__(self):
        return hash(("rf", self.num, self.den))

    def __bool__(self):
        return self.num != 0

    @property
    def is_polynomial(self) -> bool:
        return self.den == 1

    def degree(self) -> int:
        return max(pdeg(self.num), pdeg(self.den))

    def __repr__(self):
        return self.ring.format(self)

    __str__ = __repr__


class FunctionField2(Ring):
    """The rational function field F_2(t)."""

    kind = "rational-function-field-char2"
    characteristic = 2

    def __init__(self, var: str = "t", max_degree: int = MAX_POLY_DEGREE):
        self.var = var
        self.max_degree = max_degree
        self.zero = RFElement(self, 0, 1)
        self.one = RFElement(self, 1, 1)
        self.t = RFElement(self, 2, 1)
        self.symbols = {var: self.t}

    def _make(self, num: int, den: int) -> RFElement:
        if num == 0:
            return self.zero
        if max(num.bit_length(), den.bit_length()) - 1 > self.max_degree:
            raise DegreeOverflowError(
                f"degree exceeds cap {self.max_degree}", degree=max(pdeg(num), pdeg(den))
            )
        return RFElement(self, num, den)

    def _reduce(self, num: int, den: int) -> RFElement:
        if den == 0:
            raise DivisionByZeroError("zero denominator")
        if num == 0:
            return self.zero
        g = pgcd(num, den)
        if g != 1:
            num, den = pdiv_exact(num, g), pdiv_exact(den, g)
        return self._make(num, den)

    def fraction(self, num: int, den: int = 1) -> RFElement:
        return self._reduce(num, den)

    def poly(self, coeffs) -> RFElement:
        """Polynomial from its coefficient list (constant term first)."""
        return self._make(sum((int(c) & 1) << i for i, c in enumerate(coeffs)), 1)

    def __call__(self, value) -> RFElement:
        if type(value) is RFElement:
            _check_same(self, value.ring)
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.one if value & 1 else self.zero
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into {self.spec()}")

    def random_element(
        self,
        rng: random.Random,
        nonzero: bool = False,
        degree: int = 8,
        fractional: bool = False,
        **kw,
    ) -> RFElement:
        while True:
            num = rng.getrandbits(degree + 1)
            den = 1
            if fractional and rng.random() < 0.5:
                den = rng.getrandbits(degree + 1) | (1 << rng.randrange(degree + 1))
            if num or not nonzero:
                return self._reduce(num, den)

    def is_square_class(self, a: RFElement) -> bool:
        """True iff a lies in the subfield F_2(t^2)."""
        return not (_split_parity(a.num)[1] or _split_parity(a.den)[1])

    def sqrt(self, a: RFElement) -> RFElement:
        if not self.is_square_class(a):
            raise ValueError(f"{a} is not a square in {self.spec()}")
        return self._make(_compact(a.num), _compact(a.den))

    def spec(self) -> str:
        return f"funcfield2({self.var})"

    def _poly_str(self, a: int) -> str:
        terms = []
        for i in range(pdeg(a), -1, -1):
            if (a >> i) & 1:
                terms.append("1" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}"))
        return "+".join(terms) if terms else "0"

    def format(self, a: RFElement) -> str:
        num = self._poly_str(a.num)
        if a.den == 1:
            return num
        den = self._poly_str(a.den)
        if "+" in num:
            num = f"({num})"
        if "+" in den:
            den = f"({den})"
        return f"{num}/{den}"


def decompose_char2(u: RFElement) -> tuple[RFElement, RFElement]:
    """Return (u0, u1) in F_2(t^2) with u = u0 + t*u1.

    Writing u = a/b we have u = (a*b)/b^2; the numerator splits into even and
    odd monomials and b^2 already lies in F_2(t^2).
    """
    R = u.ring
    if u.num == 0:
        return R.zero, R.zero
    den2 = pmul(u.den, u.den)
    even, odd = _split_parity(pmul(u.num, u.den))
    return R._reduce(even, den2), R._reduce(odd, den2)


# ----------------------------------------------------------- quaternions


def _check_height(x: Fraction) -> Fraction:
    if max(abs(x.numerator), x.denominator).bit_length() > MAX_HEIGHT_BITS:
        raise DegreeOverflowError("rational height exceeds cap")
    return x


class QElement:
    """Quaternion a + b i + c j + d k with exact rational components."""

    __slots__ = ("ring", "a", "b", "c", "d")

    def __init__(self, ring: RationalQuaternions, a, b, c, d):
        self.ring = ring
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def components(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def _other(self, other):
        if type(other) is QElement:
            _check_same(self.ring, other.ring)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring(other)
        return None

    def __add__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self.ring._make(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return self.ring._make(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self.ring._make(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return self.ring._make(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o * self

    def norm(self) -> Fraction:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def conjugate(self):
        return self.ring._make(self.a, -self.b, -self.c, -self.d)

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise DivisionByZeroError("inverse of zero")
        return self.ring._make(self.a / n, -self.b / n, -self.c / n, -self.d / n)

    def __truediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        base = self if e >= 0 else self.inverse()
        out = self.ring.one
        for _ in range(abs(e)):
            out = out * base
        return out

    def __eq__(self, o):
        if type(o) is QElement:
            return self.ring is o.ring and self.components == o.components
        if isinstance(o, (int, Fraction)):
            return self.a == o and self.b == 0 and self.c == 0 and self.d == 0
        return NotImplemented

    def __hash__(self):
        return hash(("q",) + self.components)

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    @property
    def is_real(self) -> bool:
        return not (self.b or self.c or self.d)

    def __repr__(self):
        return self.ring.format(self)

    __str__ = __repr__


class RationalQuaternions(Ring):
    """Hamilton quaternions (-1,-1) over Q."""

    kind = "rational-quaternions"
    characteristic = 0
    is_commutative = False

    def __init__(self):
        F0, F1 = Fraction(0), Fraction(1)
        self.zero = QElement(self, F0, F0, F0, F0)
        self.one = QElement(self, F1, F0, F0, F0)
        self.i = QElement(self, F0, F1, F0, F0)
        self.j = QElement(self, F0, F0, F1, F0)
        self.k = QElement(self, F0, F0, F0, F1)
        self.symbols = {"i": self.i, "j": self.j, "k": self.k}

    def _make(self, a, b, c, d) -> QElement:
        for x in (a, b, c, d):
            _check_height(x)
        return QElement(self, a, b, c, d)

    def quaternion(self, a=0, b=0, c=0, d=0) -> QElement:
        return self._make(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    def __call__(self, value) -> QElement:
        if type(value) is QElement:
            _check_same(self, value.ring)
            return value
        if isinstance(value, (int, Fraction)):
            return self.quaternion(value)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (tuple, list)) and len(value) == 4:
            return self.quaternion(*value)
        raise TypeError(f"cannot coerce {value!r} into {self.spec()}")

    def random_element(
        self, rng: random.Random, nonzero: bool = False, height: int = 6, **kw
    ) -> QElement:
        while True:
            comps = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(4)]
            x = self._make(*comps)
            if x or not nonzero:
                return x

    def spec(self) -> str:
        return "quaternions()"

    def format(self, x: QElement) -> str:
        parts = []
        for coeff, unit in zip(x.components, ("", "i", "j", "k")):
            if coeff == 0:
                continue
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            if unit and mag == 1:
                body = unit
            else:
                body = f"{mag}{unit}"
            parts.append((sign, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


class RationalField(Ring):
    """Q with plain :class:`fractions.Fraction` elements (coordinate field)."""

    kind = "rationals"
    characteristic = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, value) -> Fraction:
        if isinstance(value, str):
            return Fraction(value)
        return Fraction(value)

    def random_element(self, rng, nonzero=False, height=6, **kw):
        while True:
            x = Fraction(rng.randint(-height, height), rng.randint(1, height))
            if x or not nonzero:
                return x

    def spec(self) -> str:
        return "rationals()"


# ------------------------------------------------------------- factories


_RINGS: dict = {}


def _interned(key, make):
    ring = _RINGS.get(key)
    if ring is None:
        ring = _RINGS[key] = make()
    return ring


def field(p: int, n: int = 1) -> FiniteField:
    return _interned(("field", p, n), lambda: FiniteField(p, n))


def funcfield2(var: str = "t") -> FunctionField2:
    return _interned(("funcfield2", var), lambda: FunctionField2(var))


def quaternions() -> RationalQuaternions:
    return _interned(("quaternions",), RationalQuaternions)


def rationals() -> RationalField:
    return _interned(("rationals",), RationalField)


def field_of_order(q: int) -> FiniteField:
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            if r != 1 or not is_prime(p):
                break
            return field(p, n)
    raise ValueError(f"{q} is not a prime power")


# ------------------------------------------------------- anti-automorphisms


@dataclass(frozen=True)
class AntiAutomorphism:
    """identity, x -> x^(p^power) on a finite field, or quaternion conjugation."""

    kind: str = "identity"
    power: int = 0

    def __post_init__(self):
        if self.kind not in ("identity", "frobenius", "conjugation"):
            raise ValueError(f"unknown anti-automorphism kind {self.kind!r}")

    def compatible(self, ring: Ring) -> None:
        """Raise unless this map is an anti-automorphism of ``ring``."""
        if self.kind == "frobenius" and not isinstance(ring, FiniteField):
            raise IncompatibleAutomorphismError("frobenius powers need a finite field")
        if self.kind == "conjugation" and not isinstance(ring, RationalQuaternions):
            raise IncompatibleAutomorphismError("conjugation needs the quaternions")
        if self.kind == "identity" and not ring.is_commutative:
            raise IncompatibleAutomorphismError(
                "identity does not reverse products in a non-commutative ring"
            )

    def normalized(self, ring: Ring) -> AntiAutomorphism:
        if self.kind == "frobenius" and isinstance(ring, FiniteField):
            k = self.power % ring.n
            return AntiAutomorphism("identity") if k == 0 else AntiAutomorphism("frobenius", k)
        return self

    def apply(self, t):
        if self.kind == "identity":
            return t
        if self.kind == "frobenius":
            if type(t) is not FFElement:
                raise IncompatibleAutomorphismError("frobenius powers need a finite field")
            return t.field.frobenius(t, self.power)
        if type(t) is not QElement:
            raise IncompatibleAutomorphismError("conjugation needs the quaternions")
        return t.conjugate()

    __call__ = apply

    def spec(self) -> str:
        if self.kind == "identity":
            return "id"
        if self.kind == "frobenius":
            return f"frob^{self.power}"
        return "conj"

    @staticmethod
    def parse(text: str) -> AntiAutomorphism:
        s = text.replace(" ", "")
        if s in ("id", "identity"):
            return AntiAutomorphism("identity")
        if s in ("conj", "conjugation"):
            return AntiAutomorphism("conjugation")
        m = re.fullmatch(r"frob(?:\^(\d+))?", s)
        if m:
            return AntiAutomorphism("frobenius", int(m.group(1) or 1))
        raise ParseError(f"unknown anti-automorphism {text!r}")

    def __repr__(self):
        return self.spec()


IDENTITY = AntiAutomorphism("identity")
CONJUGATION = AntiAutomorphism("conjugation")


def frobenius(k: int = 1) -> AntiAutomorphism:
    return AntiAutomorphism("frobenius", k)


def apply_antiauto(sigma: AntiAutomorphism, t):
    if sigma.kind != "identity":
        sigma.compatible(t.ring)
    return sigma.apply(t)


# ------------------------------------------------------ element parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text: str):
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        else:
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _ExprParser:
    """Recursive descent over + - * / ^, parentheses and implicit products."""

    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(f"{msg} in element {self.text!r}", column=tok[2] + 1)

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty element")
        val = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.power()
                if val == "*":
                    acc = acc * rhs
                else:
                    if not rhs:
                        raise DivisionByZeroError(f"division by zero in {self.text!r}")
                    acc = acc / rhs
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            neg = False
            if self.peek()[:2] == ("op", "-"):
                self.take()
                neg = True
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be an integer", tok)
            e = -tok[1] if neg else tok[1]
            if e < 0 and not base:
                raise DivisionByZeroError("negative power of zero")
            return base**e
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return self.ring(val)
        if kind == "name":
            if val not in self.ring.symbols:
                self.fail(f"unknown symbol {val!r}", tok)
            return self.ring.symbols[val]
        if kind == "op" and val == "(":
            inner = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.fail("missing ')'")
            return inner
        self.fail(f"unexpected {val!r}", tok)


def parse_element(ring: Ring, text: str):
    """Parse an element string such as ``w^2+w+1``, ``(t^3+t)/(t^2+1)`` or ``1 + 2i - 3/4k``."""
    if isinstance(ring, RationalField):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {text!r}") from exc
    return _ExprParser(ring, text).parse()


def parse_ring(text: str) -> Ring:
    s = text.replace(" ", "")
    m = re.fullmatch(r"field\((\d+)(?:,(\d+))?\)", s)
    if m:
        p = int(m.group(1))
        if m.group(2) is None:
            return field_of_order(p)
        if not is_prime(p):
            raise ParseError(f"{p} is not prime")
        return field(p, int(m.group(2)))
    m = re.fullmatch(r"funcfield2\(([A-Za-z_]\w*)?\)", s)
    if m:
        return funcfield2(m.group(1) or "t")
    if s in ("quaternions()", "quaternions"):
        return quaternions()
    raise ParseError(f"unknown ring {text!r}")
