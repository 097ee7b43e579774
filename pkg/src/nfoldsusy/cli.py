"""Command-line front end: verify | nogo | isolated | mother | spectrum | all.

Exit codes: 0 all checks pass, 1 a checked identity failed, 2 usage error,
3 a recorded (conjectured, not asserted) identity was falsified and the
failure survived an independent rational-coupling recheck.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .isolated import EPoly, build_mn, det_mn, det_roots
from .mother import check_mother_identity, confirm_nonzero_residual
from .nogo import NogoError, nogo_expand, nogo_verify_formula, obstruction_coefficient
from .properties import ALL_SUITES
from .report import (EXIT_FAIL, EXIT_OK, EXIT_USAGE, STATUS_FAIL, STATUS_PASS,
                     STATUS_RECORDED, CheckRecord, RunReport, spectrum_rows,
                     write_spectra_csv)
from .rings import QPoly, RatFunc
from .spectral import (SpectralProblem, boundary_for, eigenvalues,
                       verify_isolated, verify_pairing)
from .susy import (check_adjoint_intertwine, check_inductive, check_intertwine,
                   check_susy_algebra_n1, periodic_model, quadratic_model)

QUADRATIC = "quadratic"
PERIODIC = "periodic"

_MODELS = {QUADRATIC: quadratic_model, PERIODIC: periodic_model}


def _timed(report: RunReport, name: str, anchor: str, fn) -> CheckRecord:
    """Run fn() -> (status, detail) and append the timed record."""
    t0 = time.perf_counter()
    try:
        status, detail = fn()
    except Exception as exc:  # a crashed check is a failed check
        status, detail = STATUS_FAIL, {"error": f"{type(exc).__name__}: {exc}"}
    rec = CheckRecord(name=name, anchor=anchor, status=status, detail=detail,
                      seconds=time.perf_counter() - t0)
    return report.add(rec)


def _parse_ns(args) -> list[int]:
    if args.n_range:
        m = re.fullmatch(r"(\d+)\.\.(\d+)", args.n_range)
        if not m:
            raise SystemExit(EXIT_USAGE)
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < 1 or hi < lo:
            raise SystemExit(EXIT_USAGE)
        return list(range(lo, hi + 1))
    if args.n is not None:
        return [args.n]
    return []


def _parse_g(text: str):
    """'p/q' stays exact (Fraction); anything else is a float."""
    if re.fullmatch(r"[+-]?\d+/\d+", text):
        return Fraction(text)
    return float(text)


def _parse_qpoly(text: str) -> QPoly:
    """Tiny parser for real polynomial perturbations like 'q^3 - 1/2*q'."""
    out = QPoly.zero()
    for term in re.findall(r"[+-]?[^+-]+", text.replace(" ", "")):
        m = re.fullmatch(r"([+-]?)(?:(\d+(?:/\d+)?)\*?)?(?:q(?:\^(\d+))?)?", term)
        if not m or (not m.group(2) and "q" not in term):
            raise ValueError(f"cannot parse perturbation term {term!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        power = int(m.group(3)) if m.group(3) else (1 if "q" in term else 0)
        out = out + QPoly.monomial(power, RatFunc.const(sign * coeff))
    return out


def _models_from(args) -> list:
    if getattr(args, "model", None):
        return [args.model]
    return [QUADRATIC, PERIODIC]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> RunReport:
    ns = _parse_ns(args) or list(range(1, 9))
    report = RunReport("verify", {"models": _models_from(args), "n": ns,
                                  "perturb_w": args.perturb_w})
    perturb = _parse_qpoly(args.perturb_w) if args.perturb_w else None
    for kind in _models_from(args):
        if perturb is not None and kind != QUADRATIC:
            print("--perturb-w applies to the quadratic model only",
                  file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        model = quadratic_model(perturb) if perturb is not None else _MODELS[kind]()
        charge_name = "D^N" if kind == QUADRATIC else "P_N"
        for n in ns:
            _timed(report, f"intertwine {kind} N={n}",
                   f"{charge_name} H(-N) = H(+N) {charge_name}",
                   lambda m=model, n=n: _residual_status(check_intertwine(m, n)))
            _timed(report, f"adjoint intertwine {kind} N={n}",
                   f"H(-N) {charge_name}+ = {charge_name}+ H(+N)",
                   lambda m=model, n=n: _residual_status(check_adjoint_intertwine(m, n)))
            if kind == PERIODIC and perturb is None and n >= 2:
                _timed(report, f"ladder identities periodic N={n}",
                       "H(+N) P_N' = P_N' H(+(N-2N')) + correction",
                       lambda n=n: _ladder_status(n))
        if 1 in ns:
            for rep in check_susy_algebra_n1(model):
                report.add(CheckRecord(
                    name=f"N=1 algebra {kind}: {rep.identity}",
                    anchor=rep.identity,
                    status=STATUS_PASS if rep.holds else STATUS_FAIL,
                    detail={"structural": rep.structural,
                            **({"residual": rep.residual} if rep.residual else {})}))
    return report


def _residual_status(residual) -> tuple:
    if residual.is_zero():
        return STATUS_PASS, {"residual": "0"}
    return STATUS_FAIL, {"residual": residual.render()}


def _ladder_status(n: int) -> tuple:
    for nprime in range(1, n + 1):
        r = check_inductive(n, nprime)
        if not r.is_zero():
            return STATUS_FAIL, {"nprime": nprime, "residual": r.render()}
    return STATUS_PASS, {"nprime_max": n}


def cmd_nogo(args) -> RunReport:
    ns = _parse_ns(args) or list(range(2, 7))
    report = RunReport("nogo", {"n": ns})
    for n in ns:
        rec = _timed(report, f"no-go expansion N={n}",
                     "coefficients of 2 i^N U (D^N H(-N) - H(+N) D^N) U^-1",
                     lambda n=n: _nogo_status(n))
        if "table" in rec.detail:
            report.notes.append(f"N={n} coefficient table (after solving "
                                f"the d^{n}, d^{n-1} constraints):")
            for k, text in rec.detail["table"]:
                report.notes.append(f"  d^{k}: {text}")
    return report


def _nogo_status(n: int) -> tuple:
    rep = nogo_expand(n)
    detail = {"table": [(k, p.render()) for k, p in
                        sorted(rep.post_subst.items(), reverse=True)]}
    if n >= 2:
        try:
            nogo_verify_formula_single(rep)
        except NogoError as exc:
            detail["error"] = str(exc)
            return STATUS_FAIL, detail
        coeff = obstruction_coefficient(n)
        detail["obstruction"] = rep.obstruction.render()
        detail["obstruction_coefficient"] = str(coeff)
        return STATUS_PASS, detail
    if rep.post_subst:
        detail["error"] = "residual did not vanish"
        return STATUS_FAIL, detail
    detail["note"] = "residual vanishes identically (no obstruction)"
    return STATUS_PASS, detail


def nogo_verify_formula_single(rep) -> None:
    """Per-N slice of :func:`nfoldsusy.nogo.nogo_verify_formula`."""
    from .nogo import (_in_high_derivative_ideal, _kill_high_derivatives)
    from .rings import FormalPoly, GaussianRational

    n = rep.n
    expected_top = FormalPoly.W(1) * (2 * n) - FormalPoly.Fp(0) - FormalPoly.Fm(0)
    if rep.constraint_top != expected_top:
        raise NogoError(f"N={n}: top constraint {rep.constraint_top.render()!r}")
    expected_next = FormalPoly.W(2) * n - FormalPoly.Fm(1)
    if rep.constraint_next != expected_next:
        raise NogoError(f"N={n}: next constraint {rep.constraint_next.render()!r}")
    expected_obs = FormalPoly.W(3) * GaussianRational(obstruction_coefficient(n))
    if rep.obstruction != expected_obs:
        raise NogoError(f"N={n}: obstruction {rep.obstruction.render()!r}")
    for k, p in rep.lower_tail:
        if not _in_high_derivative_ideal(p):
            raise NogoError(f"N={n}, k={k}: escapes the ideal")
    for k, p in rep.post_subst.items():
        if not _kill_high_derivatives(p).is_zero():
            raise NogoError(f"N={n}, k={k}: survives quadratic truncation")


def cmd_isolated(args) -> RunReport:
    ns = _parse_ns(args) or [3]
    gs = [(_parse_g(t)) for t in (args.g or [])]
    report = RunReport("isolated", {"models": _models_from(args), "n": ns,
                                    "g": [str(g) for g in gs]})
    for kind in _models_from(args):
        model = _MODELS[kind]()
        for n in ns:
            matrix = build_mn(model, n)
            det = det_mn(matrix)
            _timed(report, f"det M_{n} ({kind})", "det M_N(E) as exact polynomial",
                   lambda d=det, n=n: _det_status(d, n))
            report.notes.append(f"det M_{n} ({kind}) = {det.render()}")
            for g in gs:
                if isinstance(g, Fraction):
                    exact = det.specialize_g(g)
                    poly = " + ".join(f"({c.render()})*E^{k}"
                                      for k, c in enumerate(exact) if c)
                    report.notes.append(f"  at g = {g}: {poly}")
                    gf = float(g)
                else:
                    gf = g
                _timed(report, f"isolated energies {kind} N={n} g={g}",
                       "real roots of det M_N(E) = 0",
                       lambda d=det, n=n, gf=gf: _roots_status(d, n, gf))
    return report


def _det_status(det: EPoly, n: int) -> tuple:
    lead_ok = det.degree() == n and det.coeffs[-1] == RatFunc.const(2 ** n)
    detail = {"det": det.render(), "degree": det.degree()}
    return (STATUS_PASS if lead_ok else STATUS_FAIL), detail


def _roots_status(det: EPoly, n: int, g: float) -> tuple:
    roots = det_roots(det, g)
    real = [r.value.real for r in roots if r.is_real]
    detail = {"model_n": n, "g": g, "energies": real,
              "polish_residuals": [r.residual for r in roots]}
    if len(real) != n:
        detail["note"] = f"{len(real)} real roots out of {n}"
        return STATUS_RECORDED, detail
    if any(r.residual > 1e-12 for r in roots):
        detail["note"] = "root polish residual above 1e-12"
        return STATUS_RECORDED, detail
    return STATUS_PASS, detail


_MOTHER_ASSERTED = {QUADRATIC: 6, PERIODIC: 3}


def cmd_mother(args) -> RunReport:
    defaults = {QUADRATIC: list(range(1, 7)), PERIODIC: list(range(1, 6))}
    report = RunReport("mother", {"models": _models_from(args)})
    for kind in _models_from(args):
        model = _MODELS[kind]()
        ns = _parse_ns(args) or defaults[kind]
        report.config[f"n_{kind}"] = ns
        for n in ns:
            asserted = n <= _MOTHER_ASSERTED[kind]
            _timed(report, f"mother identity {kind} N={n}",
                   "(1/2){Q+,Q} = (1/2) det M_N(H_N)",
                   lambda m=model, n=n, a=asserted: _mother_status(m, n, a))
    return report


def _mother_status(model, n: int, asserted: bool) -> tuple:
    rep = check_mother_identity(model, n)
    detail = rep.to_dict()
    if rep.passed:
        return (STATUS_PASS if asserted else STATUS_RECORDED,
                {**detail, "falsified": False} if not asserted else detail)
    if asserted:
        return STATUS_FAIL, detail
    survived = (confirm_nonzero_residual(rep.upper_residual)
                or confirm_nonzero_residual(rep.lower_residual))
    if survived:
        return STATUS_RECORDED, {**detail, "falsified": True}
    return STATUS_FAIL, {**detail, "note": "residual vanished at sampled "
                                           "rational couplings: suspect a bug"}


def cmd_spectrum(args) -> RunReport:
    ns = _parse_ns(args) or [3]
    gs = [float(_parse_g(t)) for t in (args.g or ["0.5"])]
    report = RunReport("spectrum", {"models": _models_from(args), "n": ns,
                                    "g": gs, "boundary": args.boundary,
                                    "cutoff": args.cutoff, "points": args.points,
                                    "tol": args.tol})
    rows = []
    figures = []
    for kind in _models_from(args):
        model = _MODELS[kind]()
        for n in ns:
            for g in gs:
                for sign in (-1, +1):
                    kwargs = ({"cutoff": args.cutoff} if kind == PERIODIC
                              else {"points": args.points})
                    problem = SpectralProblem(model, sign, n, g,
                                              boundary=args.boundary, **kwargs)
                    result = eigenvalues(problem)
                    rows.extend(spectrum_rows(kind, sign, n, g, problem.boundary,
                                              result, limit=args.levels))
                    if sign < 0:
                        figures.append((problem, result))
                _timed(report, f"isolated vs spectrum {kind} N={n} g={g}",
                       "det roots appear in the spectrum of H(-N)",
                       lambda m=model, n=n, g=g: _match_status(m, n, g, args))
                _timed(report, f"pairing {kind} N={n} g={g}",
                       "spectra of H(+N) and H(-N) agree level by level",
                       lambda m=model, n=n, g=g: _pairing_status(m, n, g, args))
    if args.out:
        out = Path(args.out)
        write_spectra_csv(out, rows)
        report.notes.append(f"wrote {out}")
        from .figures import spectrum_figure
        for problem, result in figures:
            stem = (f"{out.stem}_{problem.model.kind}_N{problem.n}"
                    f"_g{problem.g}".replace(".", "p"))
            png = out.with_name(stem + ".png")
            spectrum_figure(problem, result, str(png))
            report.notes.append(f"wrote {png}")
    return report


def _match_status(model, n: int, g: float, args) -> tuple:
    rep = verify_isolated(model, n, g, tol=args.tol, cutoff=args.cutoff,
                          points=args.points)
    return (STATUS_PASS if rep.passed else STATUS_FAIL), rep.to_dict()


def _pairing_status(model, n: int, g: float, args) -> tuple:
    rep = verify_pairing(model, n, g, tol=args.tol, cutoff=args.cutoff,
                         points=args.points)
    return (STATUS_PASS if rep.passed else STATUS_FAIL), rep.to_dict()


def cmd_all(args) -> RunReport:
    report = RunReport("all", {"tol_spectral": 1e-8, "tol_quadratic": 1e-6,
                               "tol_zero_mode": 1e-10})
    qm, pm = quadratic_model(), periodic_model()

    for kind, model in ((QUADRATIC, qm), (PERIODIC, pm)):
        for n in range(1, 9):
            _timed(report, f"intertwine {kind} N={n}",
                   "charge H(-N) = H(+N) charge",
                   lambda m=model, n=n: _residual_status(check_intertwine(m, n)))

    def det3_status():
        det = det_mn(build_mn(pm, 3))
        g2 = RatFunc.g(2)
        closed = (EPoly.linear(-g2, RatFunc.const(2))
                  * EPoly((RatFunc.const(-4), -(g2 * 2), RatFunc.const(4))))
        ok = det == closed
        return (STATUS_PASS if ok else STATUS_FAIL), {"det": det.render()}

    _timed(report, "det M_3 closed form (periodic)",
           "det M_3(E) = (2E - g^2)(4(E^2 - 1) - 2E g^2)", det3_status)

    def nogo_status():
        nogo_verify_formula(6)
        return STATUS_PASS, {"n_max": 6}

    _timed(report, "no-go obstruction N=2..6",
           "d^(N-2) coefficient = -(1/6)N(N-1)(N+1) W'''", nogo_status)

    for kind, model, ns in ((QUADRATIC, qm, range(1, 7)), (PERIODIC, pm, range(1, 6))):
        for n in ns:
            asserted = n <= _MOTHER_ASSERTED[kind]
            _timed(report, f"mother identity {kind} N={n}",
                   "(1/2){Q+,Q} = (1/2) det M_N(H_N)",
                   lambda m=model, n=n, a=asserted: _mother_status(m, n, a))

    class _SpectralArgs:
        tol = 1e-8
        cutoff = 64
        points = 2000

    for n in range(1, 7):
        for g in (0.2, 0.5):
            _timed(report, f"isolated vs spectrum periodic N={n} g={g}",
                   "det roots appear in the plane-wave spectrum of H(-N)",
                   lambda n=n, g=g: _match_status(pm, n, g, _SpectralArgs))

    def zero_mode(g):
        res = eigenvalues(SpectralProblem(pm, -1, 1, g, cutoff=64))
        e0 = float(res.eigenvalues[0])
        ok = abs(e0) <= 1e-10
        return (STATUS_PASS if ok else STATUS_FAIL), {"g": g, "E0": e0}

    for g in (0.3, 0.5, 1.0):
        _timed(report, f"unbroken N=1 zero mode g={g}",
               "lowest eigenvalue of H(-1) is 0", lambda g=g: zero_mode(g))

    class _QuadraticArgs:
        tol = 1e-6
        cutoff = 64
        points = 2000

    for n in (2, 3):
        _timed(report, f"isolated vs spectrum quadratic N={n} g=0.05",
               "det roots match the double-well spectrum",
               lambda n=n: _match_status(qm, n, 0.05, _QuadraticArgs))

    for name, fn in ALL_SUITES:
        _timed(report, f"property suite: {name}", name,
               lambda fn=fn: (STATUS_PASS, {"cases": fn()}))

    if args.figures:
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        from .figures import spectrum_figure
        rows = []
        for model, n, g in ((pm, 3, 0.5), (qm, 3, 0.05)):
            kwargs = {"cutoff": 64} if model.kind == PERIODIC else {"points": 2000}
            problem = SpectralProblem(model, -1, n, g, **kwargs)
            result = eigenvalues(problem)
            rows.extend(spectrum_rows(model.kind, -1, n, g, problem.boundary,
                                      result, limit=12))
            png = fig_dir / f"{model.kind}_N{n}.png"
            spectrum_figure(problem, result, str(png))
            report.notes.append(f"wrote {png}")
        csv_path = fig_dir / "spectra.csv"
        write_spectra_csv(csv_path, rows)
        report.notes.append(f"wrote {csv_path}")
    return report


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, spectral: bool = False):
    p.add_argument("--model", choices=(QUADRATIC, PERIODIC))
    p.add_argument("--n", type=int)
    p.add_argument("--n-range", metavar="A..B")
    p.add_argument("--g", action="append", metavar="G",
                   help="coupling; 'p/q' stays exact, otherwise float")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--json", action="store_true",
                   help="print the JSON report to stdout")
    if spectral:
        p.add_argument("--boundary", default="auto",
                       choices=("auto", "periodic", "antiperiodic"))
        p.add_argument("--cutoff", type=int, default=64)
        p.add_argument("--points", type=int, default=2000)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--levels", type=int, default=24,
                       help="eigenvalues per problem written to CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfoldsusy",
        description="exact operator-identity checks and numerical spectra "
                    "for N-fold supersymmetric quantum mechanics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="intertwining and algebra identities")
    _add_common(p)
    p.add_argument("--perturb-w", metavar="POLY",
                   help="add a real polynomial to the quadratic W "
                        "(negative control)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("nogo", help="obstruction analysis for D^N charges")
    _add_common(p)
    p.set_defaults(func=cmd_nogo)

    p = sub.add_parser("isolated", help="determinants and isolated energies")
    _add_common(p)
    p.set_defaults(func=cmd_isolated)

    p = sub.add_parser("mother", help="anticommutator determinant identity")
    _add_common(p)
    p.set_defaults(func=cmd_mother)

    p = sub.add_parser("spectrum", help="numeric spectra, CSV and figures")
    _add_common(p, spectral=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("all", help="the full acceptance suite")
    _add_common(p)
    p.add_argument("--figures", metavar="DIR",
                   help="also write example spectra (CSV + PNG) here")
    p.set_defaults(func=cmd_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = args.func(args)
    if args.json:
        print(report.to_json())
    else:
        print(report.table())
        for note in report.notes:
            print(note)
    if args.out and args.command != "spectrum":
        Path(args.out).write_text(report.to_json() + "\n")
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
