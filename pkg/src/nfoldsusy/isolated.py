"""Quasi-solvable subspaces, the N x N matrix pencil, and isolated energies.

For both models the gauge-transformed lower Hamiltonian h preserves an
N-dimensional function space:

* periodic:  span of E[-k] = e^(-i*k*g*q), k = -M..M, M = (N-1)/2
  (half-integer modes when N is even);
* quadratic: span of 1, q, ..., q^(N-1).

The pencil is M_N(E) = 2(E*I - h) in that basis; isolated-state energies
are the roots of det M_N(E), a degree-N polynomial in E with leading
coefficient 2^N and coefficients exact in the coupling g.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diffop import DiffOp
from .rings import GaussianRational, QPoly, RatFunc, TrigPoly
from .susy import Model, gauge_h

_RF0 = RatFunc.zero()
_RF1 = RatFunc.one()
_RF2 = RatFunc.const(2)


class SubspaceError(RuntimeError):
    """The transformed Hamiltonian left its supposedly invariant subspace."""


class NoKernelError(RuntimeError):
    """No kernel vector exists at the supplied energy."""


class EPoly:
    """Polynomial in the energy E with RatFunc coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "EPoly":
        return cls(())

    @classmethod
    def const(cls, x) -> "EPoly":
        if not isinstance(x, RatFunc):
            x = RatFunc.const(x)
        return cls((x,))

    @classmethod
    def linear(cls, c0: RatFunc, c1: RatFunc) -> "EPoly":
        """c0 + c1*E."""
        return cls((c0, c1))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> RatFunc:
        return self.coeffs[k] if k < len(self.coeffs) else _RF0

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return EPoly(out)

    def __neg__(self):
        return EPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self.__add__(other.__neg__())

    def __mul__(self, other):
        if isinstance(other, EPoly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return EPoly(())
            out = [_RF0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x.is_zero():
                    continue
                for j, y in enumerate(b):
                    if not y.is_zero():
                        out[i + j] = out[i + j] + x * y
            return EPoly(out)
        return EPoly(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, EPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def exquo(self, other: "EPoly") -> "EPoly":
        """Exact polynomial division (raises if not divisible)."""
        if other.is_zero():
            raise ZeroDivisionError("EPoly division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        dq = len(div) - 1
        lead = div[-1]
        quo = [_RF0] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c.is_zero():
                continue
            f = c / lead
            quo[i - dq] = f
            for j in range(dq + 1):
                rem[i - dq + j] = rem[i - dq + j] - f * div[j]
        if any(not c.is_zero() for c in rem):
            raise ArithmeticError("inexact EPoly division")
        return EPoly(quo)

    def subs_e(self, e0: RatFunc) -> RatFunc:
        """Exact value at a RatFunc energy."""
        out = _RF0
        for c in reversed(self.coeffs):
            out = out * e0 + c
        return out

    def eval_coeffs(self, g) -> np.ndarray:
        """Complex coefficient array (ascending) at numeric coupling g."""
        return np.array([c.eval(g) for c in self.coeffs], dtype=complex)

    def eval(self, energy, g) -> complex:
        out = 0j
        for c in reversed(self.coeffs):
            out = out * energy + c.eval(g)
        return out

    def specialize_g(self, g: Fraction) -> list:
        """Exact coefficients [GaussianRational] at a rational coupling."""
        return [c.eval_exact(g) for c in self.coeffs]

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            cs = c.render()
            if k == 0:
                parts.append(cs if c.is_atomic() else f"({cs})")
                continue
            var = "E" if k == 1 else f"E^{k}"
            if cs == "1":
                parts.append(var)
            elif cs == "-1":
                parts.append(f"-{var}")
            elif c.is_atomic():
                parts.append(f"{cs}*{var}")
            else:
                parts.append(f"({cs})*{var}")
        out = [parts[0]]
        for s in parts[1:]:
            if s.startswith("-"):
                out.append(" - " + s[1:])
            else:
                out.append(" + " + s)
        return "".join(out)

    __str__ = render

    def __repr__(self):
        return f"EPoly<{self.render()}>"


@dataclass
class IsoMatrix:
    """The pencil M_N(E): entries degree <= 1 in E, exact in g."""

    n: int
    entries: list  # n x n nested lists of EPoly
    basis_labels: list  # Fourier modes k (Fraction) or monomial powers j (int)

    def eval_numeric(self, g, energy) -> np.ndarray:
        return np.array([[e.eval(energy, g) for e in row] for row in self.entries],
                        dtype=complex)

    def subs_e(self, e0: RatFunc) -> list:
        """Exact RatFunc matrix at a RatFunc energy."""
        return [[e.subs_e(e0) for e in row] for row in self.entries]


def build_mn_periodic(n: int) -> IsoMatrix:
    """Tridiagonal pencil from the three-term mode recursion.

    Row k of M_N(E) * a = 0 reads
        (k+1+M) a_(k+1) + (2E - k^2 g^2) a_k - (k-1-M) a_(k-1) = 0,
    k = -M..M, with a_(M+1) = a_(-M-1) = 0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m = Fraction(n - 1, 2)
    labels = [-m + j for j in range(n)]
    g2 = RatFunc.g(2)
    rows = []
    for k in labels:
        row = []
        for kc in labels:
            if kc == k:
                row.append(EPoly.linear(-(g2 * GaussianRational(k * k)), _RF2))
            elif kc == k + 1:
                row.append(EPoly.const(GaussianRational(k + 1 + m)))
            elif kc == k - 1:
                row.append(EPoly.const(GaussianRational(-(k - 1 - m))))
            else:
                row.append(EPoly.zero())
        rows.append(row)
    return IsoMatrix(n=n, entries=rows, basis_labels=labels)


def quadratic_h_matrix(n: int) -> list:
    """RatFunc matrix of the transformed Hamiltonian on 1, q, ..., q^(N-1).

    Built by applying the operator, not from a closed form, so a closure
    failure (a q^N term) is detected and raised as :class:`SubspaceError`.
    """
    from .susy import quadratic_model

    model = quadratic_model()
    h = gauge_h(model, -1, n)
    cols = []
    for j in range(n):
        img = h.apply(QPoly.q(j))
        if img.degree() >= n:
            raise SubspaceError(
                f"N={n}: image of q^{j} has degree {img.degree()}")
        cols.append([img.coeff(i) for i in range(n)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def build_mn_quadratic(n: int) -> IsoMatrix:
    """Pencil 2(E*I - h) in the monomial basis, h from the operator route."""
    if n < 1:
        raise ValueError("n must be positive")
    hm = quadratic_h_matrix(n)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            c0 = hm[i][j] * GaussianRational(-2)
            row.append(EPoly.linear(c0, _RF2) if i == j else EPoly.const(c0))
        rows.append(row)
    return IsoMatrix(n=n, entries=rows, basis_labels=list(range(n)))


def build_mn(model: Model, n: int) -> IsoMatrix:
    if model.kind == "periodic":
        return build_mn_periodic(n)
    return build_mn_quadratic(n)


def _det_cofactor(rows: list) -> EPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    out = EPoly.zero()
    for j, top in enumerate(rows[0]):
        if top.is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        term = top * _det_cofactor(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def _det_bareiss(rows: list) -> EPoly:
    """Fraction-free elimination; every division is exact in the ring."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return EPoly.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                elt = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                if prev is not None:
                    elt = elt.exquo(prev)
                m[i][j] = elt
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def det_mn(matrix: IsoMatrix) -> EPoly:
    """Exact determinant of the pencil; degree N, leading coefficient 2^N."""
    if matrix.n <= 4:
        return _det_cofactor(matrix.entries)
    return _det_bareiss(matrix.entries)


@dataclass
class RootInfo:
    """One root of the determinant at a numeric coupling."""

    value: complex
    is_real: bool
    residual: float  # |p(root)| / max|coeff|


def det_roots(det: EPoly, g: float, polish_tol: float = 1e-12) -> list:
    """All complex roots of det at numeric g: companion eigenvalues plus one
    Newton polish per root against the exact-coefficient evaluation."""
    cs = det.eval_coeffs(g)
    if np.max(np.abs(cs.imag)) > 1e-12 * np.max(np.abs(cs)):
        raise ArithmeticError("determinant coefficients are not real")
    cs = cs.real
    scale = np.max(np.abs(cs))
    deriv = np.array([k * cs[k] for k in range(1, len(cs))])
    roots = np.roots(cs[::-1])
    out = []
    for z in roots:
        for _ in range(2):
            pv = np.polyval(cs[::-1], z)
            dv = np.polyval(deriv[::-1], z)
            if dv != 0:
                step = pv / dv
                if abs(step) < 1.0:
                    z = z - step
        residual = abs(np.polyval(cs[::-1], z)) / scale
        is_real = abs(z.imag) <= 1e-8 * max(1.0, abs(z.real))
        if is_real:
            z = complex(z.real, 0.0)
        out.append(RootInfo(value=z, is_real=is_real, residual=residual))
    out.sort(key=lambda r: (not r.is_real, r.value.real))
    return out


def isolated_energies(model: Model, n: int, g: float) -> list:
    """Real determinant roots, sorted ascending (the isolated-state
    energies; there are N of them throughout the tested ranges)."""
    det = det_mn(build_mn(model, n))
    return [r.value.real for r in det_roots(det, g) if r.is_real]


@dataclass
class KernelVector:
    """A null vector of M_N at one energy."""

    energy: object  # RatFunc (exact path) or float
    components: list  # RatFunc entries (exact) or floats
    residual: float
    exact: bool


def _exact_kernel(rows: list) -> list | None:
    """Null vector of a square RatFunc matrix, or None if nonsingular.

    Plain Gaussian elimination over the rational-function field; the first
    free column is set to one and pivots are back-substituted.
    """
    n = len(rows)
    m = [list(r) for r in rows]
    pivots = []  # (row, col)
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, n):
            if not m[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = _RF1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == n:
            return None
    pivot_cols = {c for _, c in pivots}
    free = next(c for c in range(n) if c not in pivot_cols)
    vec = [_RF0] * n
    vec[free] = _RF1
    for pr, pc in pivots:
        vec[pc] = -m[pr][free]
    return vec


def kernel_vector(matrix: IsoMatrix, energy, g: float | None = None,
                  tol: float = 1e-10) -> KernelVector:
    """Kernel vector of M_N(energy).

    Exact path: ``energy`` is a RatFunc (or int / Fraction), solved over the
    rational-function field with an exactly zero residual.  Numeric path:
    ``energy`` is a float and ``g`` must be supplied; the vector is the
    smallest singular direction, normalized to unit max-component.
    """
    if isinstance(energy, (RatFunc, int, Fraction, GaussianRational)):
        e0 = energy if isinstance(energy, RatFunc) else RatFunc.const(energy)
        vec = _exact_kernel(matrix.subs_e(e0))
        if vec is None:
            raise NoKernelError(f"M_{matrix.n} is nonsingular at E = {e0.render()}")
        return KernelVector(energy=e0, components=vec, residual=0.0, exact=True)

    if g is None:
        raise ValueError("numeric kernel extraction needs the coupling g")
    a = matrix.eval_numeric(g, energy)
    _, s, vh = np.linalg.svd(a)
    smallest = s[-1]
    scale = max(s[0], 1.0)
    if smallest > tol * scale:
        raise NoKernelError(
            f"smallest singular value {smallest:.3e} exceeds tolerance")
    v = vh[-1].conj()
    lead = v[np.argmax(np.abs(v))]
    v = v / lead
    if np.max(np.abs(v.imag)) < 1e-12:
        v = v.real
    residual = float(np.linalg.norm(a @ v))
    return KernelVector(energy=float(energy), components=list(v),
                        residual=residual, exact=False)
