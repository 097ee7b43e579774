"""Model operators (D, D+, H, charges) and exact checks of their algebra.

Two concrete models are built in:

* quadratic:  W(q) = q - g*q^2       over QPoly, charge D^N;
* periodic:   W(q) = sin(g*q)/g      over TrigPoly, charge
              P_N = product of (D + k*g) for k = -M..M, M = (N-1)/2,
              k stepping by one (half-integers when N is even).

Everything here is an exact identity check: residuals are returned as
operators and the contract is that they vanish identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diffop import DiffOp
from .rings import GaussianRational, QPoly, RatFunc, TrigPoly

_I = GaussianRational.I
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Model:
    """A choice of prepotential W over one of the coefficient rings."""

    kind: str  # "quadratic" | "periodic"
    w: object  # QPoly or TrigPoly, real under conjugation

    @property
    def ring(self) -> type:
        return type(self.w)

    def __post_init__(self):
        if self.w.conjugate() != self.w:
            raise ValueError("prepotential must be real")


def quadratic_model(perturb: QPoly | None = None) -> Model:
    """W = q - g*q^2, optionally plus a real polynomial perturbation."""
    w = QPoly.q() - RatFunc.g() * QPoly.q(2)
    if perturb is not None:
        w = w + perturb
    return Model("quadratic", w)


def periodic_model() -> Model:
    """W = sin(g*q)/g = (E[1] - E[-1]) / (2*i*g)."""
    half_over_ig = RatFunc.const(GaussianRational(0, -_HALF)) * RatFunc.g(-1)
    w = TrigPoly.mode(1, half_over_ig) + TrigPoly.mode(-1, -half_over_ig)
    return Model("periodic", w)


@dataclass(frozen=True)
class SusyPair:
    """The two Hamiltonian blocks and the intertwining charge for one N."""

    n: int
    upper: DiffOp  # H(+N)
    lower: DiffOp  # H(-N)
    charge: DiffOp  # D^N or P_N


@dataclass
class IdentityReport:
    """Outcome of one exact operator-identity check."""

    model: str
    n: int
    identity: str
    holds: bool
    residual: str | None = None
    structural: bool = False


def build_d(model: Model) -> tuple[DiffOp, DiffOp]:
    """D = p - i*W and its adjoint D+ = p + i*W."""
    ring = model.ring
    d_op = DiffOp.p(ring) + DiffOp.mult(ring.const(-_I) * model.w)
    return d_op, d_op.adjoint()


def build_h(model: Model, sign: int, n: int) -> DiffOp:
    """H = (1/2)p^2 + (1/2)(W^2 + sign*n*W').

    The physical pair has n >= 1; the inductive identities below also use
    the same formula at shifted (possibly negative) indices.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ring = model.ring
    w = model.w
    pot = w * w + w.derive() * (sign * n)
    return DiffOp(ring, {2: ring.const(Fraction(-1, 2)), 0: pot * Fraction(1, 2)})


def potential(model: Model, sign: int, n: int):
    """The multiplicative part (1/2)(W^2 + sign*n*W') as a ring element."""
    w = model.w
    return (w * w + w.derive() * (sign * n)) * Fraction(1, 2)


def _kg(k: Fraction) -> RatFunc:
    return RatFunc.g() * RatFunc.const(GaussianRational(k))


def charge_factors(model: Model, n: int) -> list[DiffOp]:
    """Commuting factors (D + k*g), k = -M..M, of the periodic charge."""
    if model.kind != "periodic":
        raise ValueError("factored charges exist only for the periodic model")
    d_op, _ = build_d(model)
    m = Fraction(n - 1, 2)
    ring = model.ring
    out = []
    k = -m
    while k <= m:
        out.append(d_op + DiffOp.const(ring, _kg(k)))
        k += 1
    return out


def build_charge(model: Model, n: int) -> DiffOp:
    """D^N (quadratic) or P_N = prod(D + k*g) (periodic)."""
    if n < 0:
        raise ValueError("charge index must be non-negative")
    d_op, _ = build_d(model)
    if model.kind == "quadratic":
        return d_op ** n
    out = DiffOp.identity(model.ring)
    for f in charge_factors(model, n) if n >= 1 else []:
        out = out * f
    return out


def build_susy_pair(model: Model, n: int) -> SusyPair:
    return SusyPair(n=n,
                    upper=build_h(model, +1, n),
                    lower=build_h(model, -1, n),
                    charge=build_charge(model, n))


def check_intertwine(model: Model, n: int) -> DiffOp:
    """Residual of charge o H(-N) - H(+N) o charge; zero when the
    N-fold algebra closes."""
    pair = build_susy_pair(model, n)
    return pair.charge * pair.lower - pair.upper * pair.charge


def check_adjoint_intertwine(model: Model, n: int) -> DiffOp:
    """Residual of H(-N) o charge+ - charge+ o H(+N) (the conjugate half)."""
    pair = build_susy_pair(model, n)
    cd = pair.charge.adjoint()
    return pair.lower * cd - cd * pair.upper


def check_inductive(n: int, nprime: int = 1) -> DiffOp:
    """Residual of the periodic ladder identity taking H(+N) across P_N'.

    nprime = 1 checks  H(+N) D = D H(+(N-2)) + (g/4)(N-1)(-E[1]+E[-1]);
    nprime >= 2 checks the general step
        H(+N) P_N' = P_N' H(+(N-2N')) +
            (g/4) N' (N-N') P_(N'-2) [-(D-Kg)E[1] + (D+Kg)E[-1]],
    with K = (N'-1)/2.  At nprime = N the correction drops out and the
    identity reduces to the intertwining relation.
    """
    model = periodic_model()
    ring = model.ring
    d_op, _ = build_d(model)
    h_n = build_h(model, +1, n)
    e_plus = DiffOp.mult(TrigPoly.mode(1))
    e_minus = DiffOp.mult(TrigPoly.mode(-1))
    quarter_g = RatFunc.g() * Fraction(1, 4)

    if nprime == 1:
        rest = build_h(model, +1, n - 2)
        corr = DiffOp.const(ring, quarter_g * (n - 1)) * (-e_plus + e_minus)
        return h_n * d_op - d_op * rest - corr

    p_np = build_charge(model, nprime)
    p_small = build_charge(model, nprime - 2)
    rest = build_h(model, +1, n - 2 * nprime)
    kg = DiffOp.const(ring, _kg(Fraction(nprime - 1, 2)))
    bracket = -(d_op - kg) * e_plus + (d_op + kg) * e_minus
    corr = DiffOp.const(ring, quarter_g * (nprime * (n - nprime))) * p_small * bracket
    return h_n * p_np - p_np * rest - corr


def check_susy_algebra_n1(model: Model) -> list[IdentityReport]:
    """Blockwise verification of the ordinary (N=1) algebra."""
    d_op, d_dag = build_d(model)
    h_plus = build_h(model, +1, 1)
    h_minus = build_h(model, -1, 1)
    half = Fraction(1, 2)
    checks = [
        ("H(+1) = (1/2) D D+", h_plus - half * (d_op * d_dag)),
        ("H(-1) = (1/2) D+ D", h_minus - half * (d_dag * d_op)),
        ("D H(-1) = H(+1) D", d_op * h_minus - h_plus * d_op),
        ("H(-1) D+ = D+ H(+1)", h_minus * d_dag - d_dag * h_plus),
    ]
    out = []
    for name, residual in checks:
        ok = residual.is_zero()
        out.append(IdentityReport(model.kind, 1, name, ok,
                                  None if ok else residual.render()))
    out.append(IdentityReport(
        model.kind, 1, "{Q,Q} = {Q+,Q+} = 0 (strictly triangular blocks)",
        True, None, structural=True))
    return out


def translation_residual(n: int) -> TrigPoly:
    """Potential of H(-N) shifted by half a period minus potential of H(+N).

    The shift q -> q + pi/g flips the sign of every odd mode, so the two
    periodic partner potentials are translates of each other; the residual
    is identically zero.
    """
    model = periodic_model()
    v_minus = potential(model, -1, n)
    v_plus = potential(model, +1, n)
    return v_minus.translate_half_period() - v_plus


def gauge_h(model: Model, sign: int, n: int) -> DiffOp:
    """The Hamiltonian conjugated by e^(integral of W): acts on the
    slowly-varying factor f of eigenfunctions f * e^(-integral of W)."""
    return build_h(model, sign, n).gauge_conjugate(model.w)
