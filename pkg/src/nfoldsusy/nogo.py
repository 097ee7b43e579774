"""Mechanized obstruction analysis for power-of-D charges over a free W.

The charge is kept as D^N while the two partner potentials are relaxed to
(1/2)(W^2 + f+) and (1/2)(W^2 - f-) with unknown functions f+, f-.  All of
W, f+, f- live in the formal ring as derivative towers W0, W1, ..., Fp0,
Fp1, ..., Fm0, Fm1, ..., so the expansion below is exact and free of any
choice of model.

The pipeline computes

    T = i^N * G( 2 (D^N H_minus - H_plus D^N) )

where G is the gauge transform d -> d - W0, normal-orders T and reads off
the coefficient of each d^k.  The top two coefficients vanish identically;
the next two force f- = N*W' + C and f+ = N*W' - C (C an integration
constant); after that substitution the d^(N-2) coefficient collapses to

    -(1/6) N (N-1) (N+1) * W2'   (i.e. a multiple of the third derivative)

and every lower coefficient lies in the ideal generated by the third and
higher derivatives of W.  Hence charges of this shape only close the
algebra for N in {0, 1} or for W with vanishing third derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diffop import DiffOp
from .rings import FormalPoly, GaussianRational, _RANK

_I = GaussianRational.I
_W_RANK = _RANK["W"]
_FP_RANK = _RANK["Fp"]
_FM_RANK = _RANK["Fm"]


class NogoError(AssertionError):
    """An expansion coefficient violated its expected exact form."""


@dataclass
class ConstraintReport:
    """Exact d^k coefficient table of the transformed difference for one N."""

    n: int
    coeff_by_degree: dict  # {k: FormalPoly}, zeros omitted
    constraint_top: FormalPoly | None  # coefficient of d^N
    constraint_next: FormalPoly | None  # coefficient of d^(N-1), divided by N
    substitutions: dict  # generator key -> FormalPoly image solving both
    obstruction: FormalPoly | None  # post-substitution coefficient of d^(N-2)
    lower_tail: list  # [(k, FormalPoly)] post-substitution, k < N-2, k desc
    post_subst: dict = field(default_factory=dict)  # {k: FormalPoly} nonzero


def _substitutions(n: int, max_order: int) -> dict:
    """f-(k) -> N*W(k+1) + C*[k=0], f+(k) -> N*W(k+1) - C*[k=0]."""
    out = {}
    c = FormalPoly.C()
    for k in range(max_order + 1):
        base = FormalPoly.W(k + 1) * n
        out[(_FM_RANK, k)] = base + c if k == 0 else base
        out[(_FP_RANK, k)] = base - c if k == 0 else base
    return out


def _exact_div_int(p: FormalPoly, n: int) -> FormalPoly:
    return p * GaussianRational(Fraction(1, n))


def nogo_expand(n: int) -> ConstraintReport:
    """Expand and organize the transformed difference for one charge order.

    Accepts n >= 0 (n = 0 is the trivial identity charge).  Raises
    :class:`NogoError` if the d^(N+2) or d^(N+1) coefficient fails to cancel
    or the d^(N-1) coefficient is not divisible by N.
    """
    if n < 0:
        raise ValueError("charge order must be non-negative")
    ring = FormalPoly
    w0 = FormalPoly.W(0)
    d_op = DiffOp.p(ring) + DiffOp.mult(ring.const(-_I) * w0)
    half = GaussianRational(Fraction(1, 2))
    p2 = DiffOp.p(ring) ** 2
    h_plus = half * (p2 + DiffOp.mult(w0 * w0 + FormalPoly.Fp(0)))
    h_minus = half * (p2 + DiffOp.mult(w0 * w0 - FormalPoly.Fm(0)))
    charge = d_op ** n
    delta = GaussianRational(2) * (charge * h_minus - h_plus * charge)
    transformed = (_I ** n) * delta.gauge_conjugate(w0)

    coeffs = dict(transformed.terms)
    for k in (n + 2, n + 1):
        if k in coeffs:
            raise NogoError(f"N={n}: coefficient of d^{k} did not cancel: "
                            f"{coeffs[k].render()}")

    constraint_top = coeffs.get(n)
    constraint_next = None
    if n >= 1 and (n - 1) in coeffs:
        constraint_next = _exact_div_int(coeffs[n - 1], n)
        if constraint_next * n != coeffs[n - 1]:
            raise NogoError(f"N={n}: d^{n-1} coefficient not divisible by N")

    max_order = 0
    for p in coeffs.values():
        for rank, order in p.generators():
            if rank in (_FP_RANK, _FM_RANK):
                max_order = max(max_order, order)
    subs = _substitutions(n, max_order)

    post = {}
    for k, p in coeffs.items():
        s = p.substitute(subs)
        if not s.is_zero():
            post[k] = s

    obstruction = post.get(n - 2) if n >= 2 else None
    lower_tail = [(k, post[k]) for k in sorted(post, reverse=True) if k < n - 2]
    return ConstraintReport(n=n, coeff_by_degree=coeffs,
                            constraint_top=constraint_top,
                            constraint_next=constraint_next,
                            substitutions=subs,
                            obstruction=obstruction,
                            lower_tail=lower_tail,
                            post_subst=post)


def obstruction_coefficient(n: int) -> Fraction:
    """The closed-form multiple of the third derivative at charge order n."""
    return Fraction(-n * (n - 1) * (n + 1), 6)


def _in_high_derivative_ideal(p: FormalPoly) -> bool:
    """True iff every monomial contains some W-derivative of order >= 3."""
    for mono in p.c:
        if not any(rank == _W_RANK and order >= 3 for (rank, order), _ in mono):
            return False
    return True


def _kill_high_derivatives(p: FormalPoly) -> FormalPoly:
    """Substitute W(k) -> 0 for k >= 3 (a generic quadratic prepotential)."""
    mapping = {}
    for rank, order in p.generators():
        if rank == _W_RANK and order >= 3:
            mapping[(rank, order)] = FormalPoly.zero()
    return p.substitute(mapping) if mapping else p


def nogo_verify_formula(n_max: int) -> list[ConstraintReport]:
    """Run the expansion for 2 <= N <= n_max and assert every exact claim.

    Checks, per N: the two solved constraints take their displayed forms;
    the post-substitution d^(N-2) coefficient is exactly
    -(1/6)N(N-1)(N+1) * W2'; every lower coefficient sits in the ideal
    generated by third-and-higher derivatives of W; and truncating W to a
    quadratic kills the entire residual.  Raises :class:`NogoError` naming
    (N, k, coefficient) on the first violation.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    reports = []
    for n in range(2, n_max + 1):
        rep = nogo_expand(n)
        expected_top = (FormalPoly.W(1) * (2 * n)
                        - FormalPoly.Fp(0) - FormalPoly.Fm(0))
        if rep.constraint_top != expected_top:
            raise NogoError(f"N={n}, k={n}: constraint is "
                            f"{rep.constraint_top.render()!r}")
        expected_next = FormalPoly.W(2) * n - FormalPoly.Fm(1)
        if rep.constraint_next != expected_next:
            raise NogoError(f"N={n}, k={n-1}: constraint is "
                            f"{rep.constraint_next.render()!r}")
        expected_obs = FormalPoly.W(3) * GaussianRational(obstruction_coefficient(n))
        if rep.obstruction != expected_obs:
            got = rep.obstruction.render() if rep.obstruction else "0"
            raise NogoError(f"N={n}, k={n-2}: obstruction is {got!r}")
        for k, p in rep.lower_tail:
            if not _in_high_derivative_ideal(p):
                raise NogoError(f"N={n}, k={k}: coefficient {p.render()!r} "
                                "escapes the high-derivative ideal")
        for k, p in rep.post_subst.items():
            killed = _kill_high_derivatives(p)
            if not killed.is_zero():
                raise NogoError(f"N={n}, k={k}: quadratic-W residual "
                                f"{killed.render()!r}")
        reports.append(rep)
    return reports
