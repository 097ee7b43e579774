"""Randomized exact property suites shared by the test suite and the CLI.

Each checker runs a seeded batch of random elements through an algebraic
law and raises AssertionError (with the failing case) on the first exact
mismatch.  All comparisons are exact; no tolerances appear here.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .diffop import DiffOp
from .rings import FormalPoly, GaussianRational, QPoly, RatFunc, TrigPoly
from .susy import Model, build_d, gauge_h, quadratic_model, periodic_model

DEFAULT_CASES = 100


def random_fraction(rng: random.Random, span: int = 6) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 4))


def random_gaussian(rng: random.Random) -> GaussianRational:
    return GaussianRational(random_fraction(rng), random_fraction(rng))


def random_ratfunc(rng: random.Random, simple: bool = False) -> RatFunc:
    num = RatFunc.zero()
    for k in range(rng.randint(0, 2)):
        num = num + RatFunc.g(k) * random_gaussian(rng)
    if simple or rng.random() < 0.5:
        return num
    if rng.random() < 0.7:
        return num * RatFunc.g(-rng.randint(1, 2))
    den = RatFunc.g(1) + RatFunc.const(random_gaussian(rng) + 1)
    return num / den


def random_qpoly(rng: random.Random, real: bool = False) -> QPoly:
    out = QPoly.zero()
    for _ in range(rng.randint(0, 3)):
        c = (RatFunc.const(random_fraction(rng)) * RatFunc.g(rng.randint(0, 1))
             if real else random_ratfunc(rng, simple=True))
        out = out + QPoly.monomial(rng.randint(0, 4), c)
    return out


def random_trigpoly(rng: random.Random) -> TrigPoly:
    out = TrigPoly.zero()
    for _ in range(rng.randint(0, 3)):
        k = Fraction(rng.randint(-4, 4), rng.choice((1, 2)))
        out = out + TrigPoly.mode(k, random_ratfunc(rng))
    return out


def random_formalpoly(rng: random.Random) -> FormalPoly:
    gens = [FormalPoly.W(0), FormalPoly.W(1), FormalPoly.W(2),
            FormalPoly.Fp(0), FormalPoly.Fm(0), FormalPoly.C()]
    out = FormalPoly.zero()
    for _ in range(rng.randint(0, 3)):
        term = FormalPoly.const(random_gaussian(rng))
        for _ in range(rng.randint(0, 2)):
            term = term * rng.choice(gens)
        out = out + term
    return out


_RING_GENERATORS = {
    "ratfunc": random_ratfunc,
    "qpoly": random_qpoly,
    "trigpoly": random_trigpoly,
    "formalpoly": random_formalpoly,
}


def random_element(ring: str, rng: random.Random):
    return _RING_GENERATORS[ring](rng)


def random_diffop(ring: str, rng: random.Random, max_order: int = 2) -> DiffOp:
    gen = _RING_GENERATORS[ring]
    cls = {"qpoly": QPoly, "trigpoly": TrigPoly, "formalpoly": FormalPoly}[ring]
    terms = {n: gen(rng) for n in range(rng.randint(0, max_order) + 1)}
    return DiffOp(cls, terms)


def check_ring_axioms(ring: str, cases: int = DEFAULT_CASES, seed: int = 1) -> int:
    """Associativity, commutativity, distributivity and units, exactly."""
    rng = random.Random(seed)
    gen = _RING_GENERATORS[ring]
    for case in range(cases):
        a, b, c = gen(rng), gen(rng), gen(rng)
        assert (a + b) + c == a + (b + c), (ring, case, "add assoc")
        assert a + b == b + a, (ring, case, "add comm")
        assert (a * b) * c == a * (b * c), (ring, case, "mul assoc")
        assert a * b == b * a, (ring, case, "mul comm")
        assert a * (b + c) == a * b + a * c, (ring, case, "distributive")
        assert a + (-a) == a - a, (ring, case, "negation")
        one = a * 0 + 1
        zero = a - a
        assert a * one == a and a + zero == a, (ring, case, "units")
    return cases


def check_derivation_rule(ring: str, cases: int = DEFAULT_CASES, seed: int = 2) -> int:
    """derive(a*b) = derive(a)*b + a*derive(b), exactly."""
    rng = random.Random(seed)
    gen = _RING_GENERATORS[ring]
    for case in range(cases):
        a, b = gen(rng), gen(rng)
        assert (a * b).derive() == a.derive() * b + a * b.derive(), (ring, case)
    return cases


def check_conjugation(ring: str, cases: int = DEFAULT_CASES, seed: int = 3) -> int:
    """Involutive ring homomorphism commuting with the derivation."""
    rng = random.Random(seed)
    gen = _RING_GENERATORS[ring]
    for case in range(cases):
        a, b = gen(rng), gen(rng)
        assert a.conjugate().conjugate() == a, (ring, case, "involution")
        assert (a + b).conjugate() == a.conjugate() + b.conjugate(), (ring, case)
        assert (a * b).conjugate() == a.conjugate() * b.conjugate(), (ring, case)
        assert a.derive().conjugate() == a.conjugate().derive(), (ring, case)
    return cases


def check_op_algebra(ring: str, cases: int = 40, seed: int = 4) -> int:
    """Operator associativity/distributivity and the composition law of
    application: (A B) f = A (B f)."""
    rng = random.Random(seed)
    gen = _RING_GENERATORS[ring]
    for case in range(cases):
        a = random_diffop(ring, rng)
        b = random_diffop(ring, rng)
        c = random_diffop(ring, rng)
        assert (a * b) * c == a * (b * c), (ring, case, "assoc")
        assert a * (b + c) == a * b + a * c, (ring, case, "left dist")
        assert (a + b) * c == a * c + b * c, (ring, case, "right dist")
        f = gen(rng)
        assert (a * b).apply(f) == a.apply(b.apply(f)), (ring, case, "apply")
    return cases


def check_degree_law(ring: str, cases: int = DEFAULT_CASES, seed: int = 5) -> int:
    """order(A B) = order(A) + order(B) over integral-domain coefficients."""
    rng = random.Random(seed)
    for case in range(cases):
        a = random_diffop(ring, rng)
        b = random_diffop(ring, rng)
        if a.is_zero() or b.is_zero():
            continue
        assert (a * b).order() == a.order() + b.order(), (ring, case)
    return cases


def check_adjoint_antihom(ring: str, cases: int = DEFAULT_CASES, seed: int = 6) -> int:
    """(A B)+ = B+ A+ and adjoint is an involution."""
    rng = random.Random(seed)
    for case in range(cases):
        a = random_diffop(ring, rng)
        b = random_diffop(ring, rng)
        assert (a * b).adjoint() == b.adjoint() * a.adjoint(), (ring, case)
        assert a.adjoint().adjoint() == a, (ring, case, "involution")
    return cases


def check_gauge_homomorphism(ring: str, cases: int = 60, seed: int = 7) -> int:
    """Gauge conjugation respects sums and products and fixes functions."""
    rng = random.Random(seed)
    gen = _RING_GENERATORS[ring]
    for case in range(cases):
        w = gen(rng)
        a = random_diffop(ring, rng)
        b = random_diffop(ring, rng)
        ga, gb = a.gauge_conjugate(w), b.gauge_conjugate(w)
        assert (a * b).gauge_conjugate(w) == ga * gb, (ring, case, "mul")
        assert (a + b).gauge_conjugate(w) == ga + gb, (ring, case, "add")
        f = gen(rng)
        assert DiffOp.mult(f).gauge_conjugate(w) == DiffOp.mult(f), (ring, case)
    return cases


def check_commutator_dddag(cases: int = DEFAULT_CASES, seed: int = 8) -> int:
    """[D, D+] = 2 W' for both built-in models and random real W."""
    rng = random.Random(seed)
    models = [quadratic_model(), periodic_model()]
    for case in range(cases):
        if case < 2:
            model = models[case]
        else:
            w = random_qpoly(rng, real=True)
            model = Model("quadratic", w)
        d_op, d_dag = build_d(model)
        expected = DiffOp.mult(model.w.derive() * 2)
        assert d_op * d_dag - d_dag * d_op == expected, case
    return cases


def check_closure(n_max: int = 10) -> int:
    """The transformed lower Hamiltonian maps its N-dimensional basis into
    itself exactly, for both models and every N up to n_max."""
    checks = 0
    for n in range(1, n_max + 1):
        h = gauge_h(quadratic_model(), -1, n)
        for j in range(n):
            img = h.apply(QPoly.q(j))
            assert img.degree() <= n - 1, ("quadratic", n, j, img.degree())
            checks += 1
        h = gauge_h(periodic_model(), -1, n)
        m = Fraction(n - 1, 2)
        labels = [-m + j for j in range(n)]
        allowed = set(labels)
        for k in labels:
            img = h.apply(TrigPoly.mode(-k))
            got = {-mode for mode in img.modes()}
            assert got <= allowed, ("periodic", n, k, sorted(got))
            checks += 1
    return checks


ALL_SUITES = (
    ("ring axioms", lambda: sum(check_ring_axioms(r) for r in _RING_GENERATORS)),
    ("derivation rule", lambda: sum(check_derivation_rule(r) for r in _RING_GENERATORS)),
    ("conjugation", lambda: sum(check_conjugation(r) for r in _RING_GENERATORS)),
    ("operator algebra", lambda: sum(check_op_algebra(r) for r in
                                     ("qpoly", "trigpoly", "formalpoly"))),
    ("degree law", lambda: sum(check_degree_law(r) for r in ("qpoly", "trigpoly"))),
    ("adjoint antihomomorphism", lambda: sum(check_adjoint_antihom(r) for r in
                                             ("qpoly", "trigpoly"))),
    ("gauge homomorphism", lambda: sum(check_gauge_homomorphism(r) for r in
                                       ("qpoly", "trigpoly"))),
    ("[D,D+] = 2W'", check_commutator_dddag),
    ("quasi-solvable closure", check_closure),
)
