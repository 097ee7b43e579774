"""Exact scalars and the commutative coefficient rings the operator layer acts over.

Scalars
-------
``GaussianRational`` is Q(i): complex numbers with exact rational real and
imaginary parts.  ``RatFunc`` is the field of rational functions in the
coupling constant g over Q(i), kept in canonical form (gcd(num, den) = 1,
monic denominator).

Coefficient rings
-----------------
Three commutative rings share one interface (+, -, *, ``derive``,
``conjugate``, ``is_zero``, ``render``):

* ``QPoly``      polynomials in the coordinate q, scalars in ``RatFunc``;
                 d/dq maps q^n to n*q^(n-1).
* ``TrigPoly``   trigonometric polynomials: finite sums of c_k(g)*E[k] where
                 E[k] stands for e^(i*k*g*q) and k runs over half-integers;
                 d/dq maps the k-term to (i*k*g) times itself.
* ``FormalPoly`` commutative polynomials over Q(i) in the formal symbols
                 W0, W1, W2, ... (the derivative tower of an unspecified real
                 function), two more towers Fp0, Fp1, ... / Fm0, Fm1, ...,
                 and a constant C; d/dq shifts each tower up and kills C.

All values are immutable and exact; floating point enters only through the
``eval_numeric`` / ``eval`` bridges.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd


class PoleError(ZeroDivisionError):
    """A denominator vanished at the requested numeric coupling."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

def _frac_str(n: int, d: int) -> str:
    return str(n) if d == 1 else f"{n}/{d}"


class GaussianRational:
    """Exact complex rational, stored as one reduced triple (a + b*i)/d.

    The single shared denominator (d > 0, gcd(a, b, d) = 1) costs one gcd
    per arithmetic operation instead of two Fraction normalizations, which
    matters in the inner loops of operator products.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, re=0, im=0):
        re = re if isinstance(re, Fraction) else Fraction(re)
        im = im if isinstance(im, Fraction) else Fraction(im)
        rd, jd = re.denominator, im.denominator
        l = rd * jd // gcd(rd, jd)
        self.a = re.numerator * (l // rd)
        self.b = im.numerator * (l // jd)
        self.d = l

    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.d)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_composite(self) -> bool:
        """True when rendering needs both a real and an imaginary part."""
        return self.a != 0 and self.b != 0

    def conjugate(self) -> "GaussianRational":
        return _gr_raw(self.a, -self.b, self.d)

    def __add__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        if self.d == o.d:
            return _gr(self.a + o.a, self.b + o.b, self.d)
        return _gr(self.a * o.d + o.a * self.d, self.b * o.d + o.b * self.d, self.d * o.d)

    __radd__ = __add__

    def __neg__(self):
        return _gr_raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return o.__add__(self.__neg__())

    def __mul__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        if self.b == 0 and o.b == 0:
            return _gr(self.a * o.a, 0, self.d * o.d)
        return _gr(self.a * o.a - self.b * o.b,
                   self.a * o.b + self.b * o.a,
                   self.d * o.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        n = o.a * o.a + o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return _gr(o.d * (self.a * o.a + self.b * o.b),
                   o.d * (self.b * o.a - self.a * o.b),
                   self.d * n)

    def __rtruediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n: int):
        if n < 0:
            return GaussianRational(1).__truediv__(self.__pow__(-n))
        out = _GR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __complex__(self):
        return complex(self.a / self.d, self.b / self.d)

    def render(self) -> str:
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return _frac_str(a, d)
        if a == 0:
            if b == 1 and d == 1:
                return "i"
            if b == -1 and d == 1:
                return "-i"
            return f"{_frac_str(b, d)}*i"
        sign = "+" if b > 0 else "-"
        ip = "i" if abs(b) == 1 and d == 1 else f"{_frac_str(abs(b), d)}*i"
        return f"({_frac_str(a, d)}{sign}{ip})"

    __str__ = render

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


def _gr_raw(a: int, b: int, d: int) -> GaussianRational:
    z = object.__new__(GaussianRational)
    z.a, z.b, z.d = a, b, d
    return z


def _gr(a: int, b: int, d: int) -> GaussianRational:
    if d < 0:
        a, b, d = -a, -b, -d
    if a == 0 and b == 0:
        return _GR_ZERO
    g = gcd(gcd(a, b), d)
    if g > 1:
        a //= g
        b //= g
        d //= g
    return _gr_raw(a, b, d)


def _as_gauss(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return _gr_raw(x, 0, 1)
    if isinstance(x, Fraction):
        return _gr_raw(x.numerator, 0, x.denominator)
    return None


_GR_ZERO = _gr_raw(0, 0, 1)
_GR_ONE = _gr_raw(1, 0, 1)
_GR_I = _gr_raw(0, 1, 1)

GaussianRational.ZERO = _GR_ZERO
GaussianRational.ONE = _GR_ONE
GaussianRational.I = _GR_I


# ---------------------------------------------------------------------------
# Dense polynomials in g over Q(i): tuples of GaussianRational, ascending
# degree, no trailing zeros, () is the zero polynomial.
# ---------------------------------------------------------------------------

_P_ZERO: tuple = ()
_P_ONE = (_GR_ONE,)

# Monic monomials g^k are interned so canonical denominators can be
# recognized by identity instead of by scanning coefficients.
_GPOWS = [_P_ONE]


def _gpow(k: int) -> tuple:
    while len(_GPOWS) <= k:
        _GPOWS.append((_GR_ZERO,) * len(_GPOWS) + (_GR_ONE,))
    return _GPOWS[k]


def _is_gpow(p: tuple) -> bool:
    return p is _GPOWS[len(p) - 1] if len(p) <= len(_GPOWS) else False


def _pstrip(cs) -> tuple:
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


def _padd(p, q):
    # Accumulates on raw (a, b, d) triples: one normalization per slot.
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        s = out[i]
        if s.d == c.d:
            out[i] = _gr(s.a + c.a, s.b + c.b, s.d)
        else:
            out[i] = _gr(s.a * c.d + c.a * s.d, s.b * c.d + c.b * s.d, s.d * c.d)
    return _pstrip(out)


def _pneg(p):
    return tuple(-c for c in p)


def _pmul(p, q):
    if not p or not q:
        return _P_ZERO
    if len(p) == 1 and len(q) == 1:
        return _pstrip((p[0] * q[0],))
    acc = [(0, 0, 1)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        a1, b1, d1 = x.a, x.b, x.d
        if a1 == 0 and b1 == 0:
            continue
        for j, y in enumerate(q):
            a2, b2, d2 = y.a, y.b, y.d
            if a2 == 0 and b2 == 0:
                continue
            na = a1 * a2 - b1 * b2
            nb = a1 * b2 + b1 * a2
            nd = d1 * d2
            A, B, D = acc[i + j]
            if D == nd:
                acc[i + j] = (A + na, B + nb, D)
            else:
                acc[i + j] = (A * nd + na * D, B * nd + nb * D, D * nd)
    return _pstrip([_gr(a, b, d) for a, b, d in acc])


def _pscale(p, c: GaussianRational):
    if not c:
        return _P_ZERO
    return tuple(a * c for a in p)


def _pdivmod(p, q):
    """Quotient and remainder; coefficients form a field so this is exact."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    lead = q[-1]
    quo = [_GR_ZERO] * max(len(p) - dq, 0)
    for i in range(len(p) - 1, dq - 1, -1):
        c = r[i]
        if not c:
            continue
        f = c / lead
        quo[i - dq] = f
        for j in range(dq + 1):
            r[i - dq + j] = r[i - dq + j] - f * q[j]
    return _pstrip(quo), _pstrip(r)


def _pmonic(p):
    lead = p[-1]
    if lead == _GR_ONE:
        return p
    return tuple(c / lead for c in p)


def _pgcd(p, q):
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _pmonic(p) if p else _P_ZERO


def _peval(p, x) -> complex:
    out = 0j
    for c in reversed(p):
        out = out * x + complex(c)
    return out


def _peval_exact(p, x: Fraction) -> GaussianRational:
    out = _GR_ZERO
    xg = _as_gauss(x)
    for c in reversed(p):
        out = out * xg + c
    return out


def _pconj(p):
    return tuple(c.conjugate() for c in p)


def _join_terms(parts) -> str:
    """Join rendered terms, folding leading minus signs into ' - '."""
    if not parts:
        return "0"
    out = [parts[0]]
    for s in parts[1:]:
        if s.startswith("-"):
            out.append(" - " + s[1:])
        else:
            out.append(" + " + s)
    return "".join(out)


def _prender(p, var: str = "g") -> str:
    if not p:
        return "0"
    parts = []
    for i, c in enumerate(p):
        if not c:
            continue
        cs = c.render()
        if i == 0:
            parts.append(cs)
            continue
        v = var if i == 1 else f"{var}^{i}"
        if cs == "1":
            parts.append(v)
        elif cs == "-1":
            parts.append(f"-{v}")
        elif c.is_composite():
            parts.append(f"({cs})*{v}")
        else:
            parts.append(f"{cs}*{v}")
    return _join_terms(parts)


# ---------------------------------------------------------------------------
# Rational functions in g
# ---------------------------------------------------------------------------

class RatFunc:
    """Rational function num(g)/den(g) over Q(i) in canonical form.

    Invariants: gcd(num, den) = 1 and den is monic; zero is ()/(1).  Most
    values occurring in practice have a monomial denominator (a power of g),
    which normalization detects and reduces without a polynomial gcd.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=_P_ONE):
        f = _ratfunc(tuple(num), tuple(den))
        self.num, self.den = f.num, f.den

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "RatFunc":
        return _RF_ZERO

    @classmethod
    def one(cls) -> "RatFunc":
        return _RF_ONE

    @classmethod
    def const(cls, x) -> "RatFunc":
        g = _as_gauss(x)
        if g is None:
            raise TypeError(f"cannot make a RatFunc constant from {x!r}")
        return _rf_raw((g,) if g else _P_ZERO, _P_ONE)

    @classmethod
    def g(cls, power: int = 1) -> "RatFunc":
        """The monomial g**power; negative powers give 1/g**|power|."""
        if power >= 0:
            return _rf_raw((_GR_ZERO,) * power + (_GR_ONE,), _P_ONE)
        return _rf_raw(_P_ONE, _gpow(-power))

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_atomic(self) -> bool:
        """Single-monomial value with a plain (non-composite) coefficient."""
        if self.den != _P_ONE:
            return False
        nz = [c for c in self.num if c]
        return len(nz) <= 1 and not (nz and nz[0].is_composite())

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        d1, d2 = self.den, o.den
        if d1 is d2:
            return _ratfunc(_padd(self.num, o.num), d1)
        if _is_gpow(d1) and _is_gpow(d2):
            # Common denominator is the larger power of g; shift the other
            # numerator up by the difference.
            k1, k2 = len(d1) - 1, len(d2) - 1
            n1, n2 = self.num, o.num
            if k1 < k2:
                n1 = (_GR_ZERO,) * (k2 - k1) + n1
            elif k2 < k1:
                n2 = (_GR_ZERO,) * (k1 - k2) + n2
            return _ratfunc(_padd(n1, n2), _gpow(max(k1, k2)))
        if d1 == d2:
            return _ratfunc(_padd(self.num, o.num), d1)
        return _ratfunc(_padd(_pmul(self.num, d2), _pmul(o.num, d1)),
                        _pmul(d1, d2))

    __radd__ = __add__

    def __neg__(self):
        return _rf_raw(_pneg(self.num), self.den)

    def __sub__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        return o.__add__(self.__neg__())

    def __mul__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        d1, d2 = self.den, o.den
        if d1 is _P_ONE and d2 is _P_ONE:
            return _rf_raw(_pmul(self.num, o.num), _P_ONE)
        if _is_gpow(d1) and _is_gpow(d2):
            return _ratfunc(_pmul(self.num, o.num),
                            _gpow(len(d1) + len(d2) - 2))
        return _ratfunc(_pmul(self.num, o.num), _pmul(d1, d2))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by zero RatFunc")
        return _ratfunc(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n: int):
        if n < 0:
            return _RF_ONE.__truediv__(self.__pow__(-n))
        out = _RF_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = _as_ratfunc(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- structure -----------------------------------------------------

    def derive(self) -> "RatFunc":
        # Scalars are constant in q.
        return _RF_ZERO

    def conjugate(self) -> "RatFunc":
        # Conjugation is a field automorphism fixing g, so canonical form
        # (monic den with leading coefficient 1, coprimality) survives;
        # interned monomial denominators are real and stay shared.
        den = self.den if _is_gpow(self.den) else _pconj(self.den)
        return _rf_raw(_pconj(self.num), den)

    def eval(self, g) -> complex:
        """Numeric value at a (real or complex) coupling g."""
        dv = _peval(self.den, g)
        if dv == 0:
            raise PoleError(f"denominator vanishes at g = {g!r}")
        return _peval(self.num, g) / dv

    def eval_exact(self, g: Fraction) -> GaussianRational:
        """Exact value at a rational coupling g."""
        g = Fraction(g)
        dv = _peval_exact(self.den, g)
        if not dv:
            raise PoleError(f"denominator vanishes at g = {g}")
        return _peval_exact(self.num, g) / dv

    def render(self, var: str = "g") -> str:
        if self.den == _P_ONE:
            return _prender(self.num, var)
        return f"({_prender(self.num, var)})/({_prender(self.den, var)})"

    __str__ = render

    def __repr__(self):
        return f"RatFunc<{self.render()}>"


def _rf_raw(num: tuple, den: tuple) -> RatFunc:
    f = object.__new__(RatFunc)
    f.num, f.den = num, den
    return f


def _ratfunc(num: tuple, den: tuple) -> RatFunc:
    """Normalize num/den to canonical form."""
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return _RF_ZERO
    if len(den) == 1:
        c = den[0]
        if c != _GR_ONE:
            num = tuple(a / c for a in num)
        return _rf_raw(num, _P_ONE)
    if _is_gpow(den) or all(not c for c in den[:-1]):
        # Monomial denominator c*g^k: cancel shared powers of g, make monic.
        k = len(den) - 1
        v = 0
        while v < len(num) and not num[v]:
            v += 1
        s = min(v, k)
        if s:
            num = num[s:]
            k -= s
        c = den[-1]
        if c != _GR_ONE:
            num = tuple(a / c for a in num)
        return _rf_raw(num, _gpow(k))
    g = _pgcd(num, den)
    if len(g) > 1:
        num = _pdivmod(num, g)[0]
        den = _pdivmod(den, g)[0]
    lead = den[-1]
    if lead != _GR_ONE:
        num = tuple(a / lead for a in num)
        den = _pmonic(den)
    if len(den) == 1:
        return _rf_raw(num, _P_ONE)
    if all(not c for c in den[:-1]):
        den = _gpow(len(den) - 1)
    return _rf_raw(den=den, num=num)


def _as_ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    g = _as_gauss(x)
    if g is not None:
        return _rf_raw((g,) if g else _P_ZERO, _P_ONE)
    return None


_RF_ZERO = _rf_raw(_P_ZERO, _P_ONE)
_RF_ONE = _rf_raw(_P_ONE, _P_ONE)


# ---------------------------------------------------------------------------
# Polynomials in the coordinate q
# ---------------------------------------------------------------------------

class QPoly:
    """Polynomial in q with RatFunc coefficients: {degree: coefficient}."""

    __slots__ = ("c",)

    def __init__(self, coeffs: dict):
        self.c = {n: v for n, v in coeffs.items() if v}

    @classmethod
    def zero(cls) -> "QPoly":
        return cls({})

    @classmethod
    def one(cls) -> "QPoly":
        return cls({0: _RF_ONE})

    @classmethod
    def const(cls, x) -> "QPoly":
        v = _as_ratfunc(x)
        if v is None:
            raise TypeError(f"cannot coerce {x!r} into QPoly")
        return cls({0: v})

    @classmethod
    def q(cls, power: int = 1) -> "QPoly":
        if power < 0:
            raise ValueError("q powers are non-negative")
        return cls({power: _RF_ONE})

    @classmethod
    def monomial(cls, power: int, coeff) -> "QPoly":
        v = _as_ratfunc(coeff)
        if v is None:
            raise TypeError(f"cannot coerce {coeff!r} into QPoly")
        return cls({power: v})

    def is_zero(self) -> bool:
        return not self.c

    def degree(self) -> int:
        """Degree in q; -1 for the zero polynomial."""
        return max(self.c) if self.c else -1

    def coeff(self, n: int) -> RatFunc:
        return self.c.get(n, _RF_ZERO)

    def _coerce(self, other):
        if isinstance(other, QPoly):
            return other
        v = _as_ratfunc(other)
        if v is not None:
            return QPoly({0: v})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.c)
        for n, v in o.c.items():
            s = out.get(n)
            s = v if s is None else s + v
            if s:
                out[n] = s
            elif n in out:
                del out[n]
        p = object.__new__(QPoly)
        p.c = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = object.__new__(QPoly)
        p.c = {n: -v for n, v in self.c.items()}
        return p

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__add__(self.__neg__())

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for n, a in self.c.items():
            for m, b in o.c.items():
                k = n + m
                v = a * b
                s = out.get(k)
                s = v if s is None else s + v
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        p = object.__new__(QPoly)
        p.c = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = QPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def derive(self) -> "QPoly":
        return QPoly({n - 1: v * n for n, v in self.c.items() if n > 0})

    def conjugate(self) -> "QPoly":
        # q and g are real, so only the scalars conjugate.
        p = object.__new__(QPoly)
        p.c = {n: v.conjugate() for n, v in self.c.items()}
        return p

    def eval_numeric(self, g, q) -> complex:
        out = 0j
        for n, v in self.c.items():
            out += v.eval(g) * (q ** n)
        return out

    def specialize_g(self, g: Fraction) -> dict:
        """Exact coefficients {degree: GaussianRational} at a rational g."""
        return {n: v.eval_exact(g) for n, v in self.c.items()}

    def render(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for n in sorted(self.c):
            v = self.c[n]
            cs = v.render()
            if n == 0:
                parts.append(cs if v.is_atomic() else f"({cs})")
                continue
            var = "q" if n == 1 else f"q^{n}"
            if cs == "1":
                parts.append(var)
            elif cs == "-1":
                parts.append(f"-{var}")
            elif v.is_atomic():
                parts.append(f"{cs}*{var}")
            else:
                parts.append(f"({cs})*{var}")
        return _join_terms(parts)

    __str__ = render

    def __repr__(self):
        return f"QPoly<{self.render()}>"


# ---------------------------------------------------------------------------
# Trigonometric polynomials
# ---------------------------------------------------------------------------

class TrigPoly:
    """Finite sum of c_k(g) * E[k], E[k] = e^(i*k*g*q), k in (1/2)Z."""

    __slots__ = ("c",)

    def __init__(self, coeffs: dict):
        out = {}
        for k, v in coeffs.items():
            if not v:
                continue
            k = Fraction(k)
            if k.denominator not in (1, 2):
                raise ValueError(f"mode {k} is not a half-integer")
            out[k] = v
        self.c = out

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls({})

    @classmethod
    def one(cls) -> "TrigPoly":
        return cls({Fraction(0): _RF_ONE})

    @classmethod
    def const(cls, x) -> "TrigPoly":
        v = _as_ratfunc(x)
        if v is None:
            raise TypeError(f"cannot coerce {x!r} into TrigPoly")
        return cls({Fraction(0): v})

    @classmethod
    def mode(cls, k, coeff=1) -> "TrigPoly":
        v = _as_ratfunc(coeff)
        if v is None:
            raise TypeError(f"cannot coerce {coeff!r} into TrigPoly")
        return cls({Fraction(k): v})

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, k) -> RatFunc:
        return self.c.get(Fraction(k), _RF_ZERO)

    def modes(self):
        return sorted(self.c)

    def _coerce(self, other):
        if isinstance(other, TrigPoly):
            return other
        v = _as_ratfunc(other)
        if v is not None:
            return TrigPoly({Fraction(0): v})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.c)
        for k, v in o.c.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        p = object.__new__(TrigPoly)
        p.c = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = object.__new__(TrigPoly)
        p.c = {k: -v for k, v in self.c.items()}
        return p

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__add__(self.__neg__())

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for k1, a in self.c.items():
            for k2, b in o.c.items():
                k = k1 + k2
                v = a * b
                s = out.get(k)
                s = v if s is None else s + v
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        p = object.__new__(TrigPoly)
        p.c = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = TrigPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def derive(self) -> "TrigPoly":
        out = {}
        for k, v in self.c.items():
            if k == 0:
                continue
            # d/dq of E[k] is (i*k*g)*E[k].
            out[k] = v * _rf_raw((_GR_ZERO, _gr(0, k.numerator, k.denominator)), _P_ONE)
        p = object.__new__(TrigPoly)
        p.c = out
        return p

    def conjugate(self) -> "TrigPoly":
        p = object.__new__(TrigPoly)
        p.c = {-k: v.conjugate() for k, v in self.c.items()}
        return p

    def translate_half_period(self) -> "TrigPoly":
        """Substitute q -> q + pi/g, i.e. scale the k-term by i^(2k)."""
        out = {}
        for k, v in self.c.items():
            m = int(2 * k) % 4
            if m == 1:
                v = v * _GR_I
            elif m == 2:
                v = -v
            elif m == 3:
                v = v * (-_GR_I)
            out[k] = v
        p = object.__new__(TrigPoly)
        p.c = out
        return p

    def eval_numeric(self, g, q) -> complex:
        out = 0j
        for k, v in self.c.items():
            out += v.eval(g) * cmath.exp(1j * float(k) * g * q)
        return out

    def specialize_g(self, g: Fraction) -> dict:
        return {k: v.eval_exact(g) for k, v in self.c.items()}

    def render(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c, reverse=True):
            v = self.c[k]
            cs = v.render()
            if k == 0:
                parts.append(cs if v.is_atomic() else f"({cs})")
            else:
                parts.append(f"({cs})*E[{k}]")
        return _join_terms(parts)

    __str__ = render

    def __repr__(self):
        return f"TrigPoly<{self.render()}>"


# ---------------------------------------------------------------------------
# Formal polynomials in derivative towers
# ---------------------------------------------------------------------------

_SYM_NAMES = ("W", "Fp", "Fm", "C")
_RANK = {name: i for i, name in enumerate(_SYM_NAMES)}
_RANK_C = _RANK["C"]


def _sym_str(key) -> str:
    rank, order = key
    if rank == _RANK_C:
        return "C"
    return f"{_SYM_NAMES[rank]}{order}"


class FormalPoly:
    """Commutative polynomial over Q(i) in W0, W1, ..., Fp0, ..., Fm0, ..., C.

    A monomial is a sorted tuple of ((rank, order), exponent) pairs; the
    derivation shifts each tower order up by one and annihilates C.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: dict):
        self.c = {m: v for m, v in coeffs.items() if v}

    @classmethod
    def zero(cls) -> "FormalPoly":
        return cls({})

    @classmethod
    def one(cls) -> "FormalPoly":
        return cls({(): _GR_ONE})

    @classmethod
    def const(cls, x) -> "FormalPoly":
        v = _as_gauss(x)
        if v is None:
            raise TypeError(f"cannot coerce {x!r} into FormalPoly")
        return cls({(): v})

    @classmethod
    def gen(cls, name: str, order: int = 0) -> "FormalPoly":
        return cls({(((_RANK[name], order), 1),): _GR_ONE})

    @classmethod
    def W(cls, order: int) -> "FormalPoly":
        return cls.gen("W", order)

    @classmethod
    def Fp(cls, order: int) -> "FormalPoly":
        return cls.gen("Fp", order)

    @classmethod
    def Fm(cls, order: int) -> "FormalPoly":
        return cls.gen("Fm", order)

    @classmethod
    def C(cls) -> "FormalPoly":
        return cls.gen("C", 0)

    def is_zero(self) -> bool:
        return not self.c

    def _coerce(self, other):
        if isinstance(other, FormalPoly):
            return other
        v = _as_gauss(other)
        if v is not None:
            return FormalPoly({(): v})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.c)
        for m, v in o.c.items():
            s = out.get(m)
            s = v if s is None else s + v
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        p = object.__new__(FormalPoly)
        p.c = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = object.__new__(FormalPoly)
        p.c = {m: -v for m, v in self.c.items()}
        return p

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__add__(self.__neg__())

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for m1, a in self.c.items():
            for m2, b in o.c.items():
                m = _mono_mul(m1, m2)
                v = a * b
                s = out.get(m)
                s = v if s is None else s + v
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        p = object.__new__(FormalPoly)
        p.c = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = FormalPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def derive(self) -> "FormalPoly":
        out = {}
        for m, v in self.c.items():
            for idx, (key, exp) in enumerate(m):
                rank, order = key
                if rank == _RANK_C:
                    continue
                factors = list(m)
                if exp == 1:
                    del factors[idx]
                else:
                    factors[idx] = (key, exp - 1)
                nm = _mono_mul(tuple(factors), (((rank, order + 1), 1),))
                nv = v * exp
                s = out.get(nm)
                s = nv if s is None else s + nv
                if s:
                    out[nm] = s
                elif nm in out:
                    del out[nm]
        p = object.__new__(FormalPoly)
        p.c = out
        return p

    def conjugate(self) -> "FormalPoly":
        # All symbols stand for real quantities.
        p = object.__new__(FormalPoly)
        p.c = {m: v.conjugate() for m, v in self.c.items()}
        return p

    def generators(self):
        """Sorted set of generator keys (rank, order) occurring."""
        keys = set()
        for m in self.c:
            for key, _ in m:
                keys.add(key)
        return sorted(keys)

    def substitute(self, mapping: dict) -> "FormalPoly":
        """Ring homomorphism sending generator key -> FormalPoly image.

        Keys absent from the mapping stay themselves.  ``mapping`` keys are
        (rank, order) pairs as returned by :meth:`generators`.
        """
        cache = {}
        out = FormalPoly.zero()
        for m, v in self.c.items():
            term = FormalPoly({(): v})
            for key, exp in m:
                p = cache.get((key, exp))
                if p is None:
                    base = mapping.get(key)
                    if base is None:
                        base = FormalPoly({((key, 1),): _GR_ONE})
                    p = base ** exp
                    cache[(key, exp)] = p
                term = term * p
            out = out + term
        return out

    def total_degree(self) -> int:
        if not self.c:
            return -1
        return max(sum(e for _, e in m) for m in self.c)

    def render(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for m in sorted(self.c, key=lambda m: (sum(e for _, e in m), m)):
            v = self.c[m]
            cs = v.render()
            if not m:
                parts.append(cs)
                continue
            mono = "*".join(_sym_str(key) if e == 1 else f"{_sym_str(key)}^{e}"
                            for key, e in m)
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            elif v.is_composite():
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return _join_terms(parts)

    __str__ = render

    def __repr__(self):
        return f"FormalPoly<{self.render()}>"


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        k1, e1 = m1[i]
        k2, e2 = m2[j]
        if k1 == k2:
            out.append((k1, e1 + e2))
            i += 1
            j += 1
        elif k1 < k2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)
