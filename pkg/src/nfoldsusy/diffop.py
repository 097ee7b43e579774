"""Normal-ordered linear differential operators over a coefficient ring.

An operator is a finite sum  sum_n c_n(q) * d^n  with every derivative moved
to the right (normal form); ``d`` is d/dq and the momentum is p = -i*d.
Products are normal-ordered eagerly through the Leibniz rule

    d o c = c o d + c',

so coefficients of d^k can always be read off directly.  Works over any of
the coefficient rings in :mod:`nfoldsusy.rings` (they share the +, *,
``derive``, ``conjugate`` interface); which ring an operator lives over is
recorded in ``ring``.
"""

from __future__ import annotations

from math import comb

from .rings import GaussianRational


class DiffOp:
    """Normal-ordered operator {order n: coefficient c_n}, zeros dropped."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: type, terms: dict):
        self.ring = ring
        self.terms = {n: c for n, c in terms.items() if not c.is_zero()}

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, ring: type) -> "DiffOp":
        return cls(ring, {})

    @classmethod
    def identity(cls, ring: type) -> "DiffOp":
        return cls(ring, {0: ring.one()})

    @classmethod
    def d(cls, ring: type, n: int = 1) -> "DiffOp":
        """The n-th derivative operator d^n."""
        return cls(ring, {n: ring.one()})

    @classmethod
    def p(cls, ring: type) -> "DiffOp":
        """Momentum p = -i * d."""
        return cls(ring, {1: ring.const(-GaussianRational.I)})

    @classmethod
    def mult(cls, f) -> "DiffOp":
        """Multiplication operator by the ring element f."""
        return cls(type(f), {0: f})

    @classmethod
    def const(cls, ring: type, x) -> "DiffOp":
        return cls(ring, {0: ring.const(x)})

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return max(self.terms) if self.terms else -1

    def coeff(self, n: int):
        c = self.terms.get(n)
        return c if c is not None else self.ring.zero()

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    # -- linear structure ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        out = dict(self.terms)
        for n, c in other.terms.items():
            s = out.get(n)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(n, None)
            else:
                out[n] = s
        r = object.__new__(DiffOp)
        r.ring, r.terms = self.ring, out
        return r

    def __neg__(self):
        r = object.__new__(DiffOp)
        r.ring = self.ring
        r.terms = {n: -c for n, c in self.terms.items()}
        return r

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.__add__(other.__neg__())

    # -- products --------------------------------------------------------

    def __mul__(self, other):
        """Operator composition (DiffOp) or right-composition with a
        multiplication operator (ring element / scalar)."""
        if not isinstance(other, DiffOp):
            other = DiffOp(self.ring, {0: self._coeff_of(other)})
        out = {}
        for m, bm in other.terms.items():
            chain = [bm]
            for n, an in self.terms.items():
                while len(chain) <= n:
                    chain.append(chain[-1].derive())
                for j in range(n + 1):
                    bj = chain[j]
                    if bj.is_zero():
                        continue
                    v = an * bj
                    c = comb(n, j)
                    if c != 1:
                        v = v * c
                    k = n + m - j
                    s = out.get(k)
                    s = v if s is None else s + v
                    if s.is_zero():
                        out.pop(k, None)
                    else:
                        out[k] = s
        r = object.__new__(DiffOp)
        r.ring, r.terms = self.ring, out
        return r

    def __rmul__(self, other):
        # Left multiplication by a function or scalar just scales
        # coefficients; no reordering is needed.
        f = self._coeff_of(other)
        r = object.__new__(DiffOp)
        r.ring = self.ring
        r.terms = {n: v for n, c in self.terms.items() if not (v := f * c).is_zero()}
        return r

    def __pow__(self, n: int):
        out = DiffOp.identity(self.ring)
        for _ in range(n):
            out = out * self
        return out

    def _coeff_of(self, x):
        if isinstance(x, self.ring):
            return x
        return self.ring.const(x)

    # -- the operations the models need -----------------------------------

    def adjoint(self) -> "DiffOp":
        """Formal adjoint: (c*d^n)+ = (-d)^n o conjugate(c), normal-ordered."""
        out = {}
        for n, c in self.terms.items():
            cc = c.conjugate()
            chain = [cc]
            sign = -1 if n % 2 else 1
            for j in range(n + 1):
                if j:
                    chain.append(chain[-1].derive())
                cj = chain[j]
                if cj.is_zero():
                    continue
                v = cj * (sign * comb(n, j))
                k = n - j
                s = out.get(k)
                s = v if s is None else s + v
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        r = object.__new__(DiffOp)
        r.ring, r.terms = self.ring, out
        return r

    def gauge_conjugate(self, w) -> "DiffOp":
        """Similarity transform by e^(integral of w): the substitution
        d -> d - w on normal-ordered operators, fixing multiplication
        operators.  Sends p - i*w to -i*d."""
        ring = self.ring
        shifted = DiffOp(ring, {1: ring.one(), 0: -w})
        powers = [DiffOp.identity(ring)]
        out = DiffOp.zero(ring)
        for n in sorted(self.terms):
            while len(powers) <= n:
                powers.append(powers[-1] * shifted)
            out = out + self.terms[n] * powers[n]
        return out

    def apply(self, f):
        """The function A f, for f in the coefficient ring."""
        out = self.ring.zero()
        chain = [f]
        for n in sorted(self.terms):
            while len(chain) <= n:
                chain.append(chain[-1].derive())
            out = out + self.terms[n] * chain[n]
        return out

    def specialize_g(self, g) -> bool:
        """True iff every coefficient vanishes at the exact rational g."""
        for c in self.terms.values():
            vals = c.specialize_g(g)
            if any(v for v in vals.values()):
                return False
        return True

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[n].render()})*d^{n}"
                          for n in sorted(self.terms, reverse=True))

    __str__ = render

    def __repr__(self):
        return f"DiffOp<{self.render()}>"
