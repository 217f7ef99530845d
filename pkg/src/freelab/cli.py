"""Command-line harness: every check as a seeded batch run emitting a JSON or CSV report.

Exit codes: 0 all checks pass, 1 a bound or identity is violated, 2 usage
error, 3 a resource guard was hit.
"""

from __future__ import annotations

import argparse
import sys

from . import fgroup, perturb, scdist
from .errors import DomainError, ResourceError
from .reports import Row, RunReport
from .rmt import RngStream, estimate_En_norm, matdist_curve
from .rmt.blocks import ALL_CIRCULAR, CONJUGATIONS, MODELS, check_size
from .wick import (
    build_voiculescu_symbolic,
    check_freeness,
    corollary32_check,
    diagonal_units,
    prop31_claims,
)

DEFAULT_SEED = 20240917

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

MOMENT_TOL = 1e-9
# the energy bound on f' is only claimed for small radii
SMALL_R = 0.05
MATDIST_RATIO = 0.95


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# commands


def cmd_moments(args, report):
    if args.law == "semicircle":
        law = scdist.SemicircleLaw(args.center, args.radius)
        closed, quad = scdist.sc_moment, scdist.sc_moment_quadrature
    else:
        if args.center != 0:
            raise DomainError("the quarter-circle law is centered at 0")
        law = scdist.QuarterCircleLaw(args.radius)
        closed, quad = scdist.qc_moment, scdist.qc_moment_quadrature
    details = []
    for m in args.m:
        if m < 0:
            raise DomainError("moment orders must be nonnegative")
        c = closed(law, m)
        q = quad(law, m)
        diff = abs(c - q)
        report.add(Row("moment_closed_form", c, k=m))
        report.add(Row("moment_quadrature", q, k=m))
        report.add(Row("moment_abs_diff", diff, MOMENT_TOL, diff <= MOMENT_TOL, k=m))
        details.append({"m": m, "closed_form": c, "quadrature": q})
    report.details = {"law": args.law, "center": args.center, "radius": args.radius, "moments": details}


def cmd_freeness(args, report):
    if args.n < 2:
        raise DomainError("n must be at least 2")
    family = build_voiculescu_symbolic(args.n, args.m)
    res = check_freeness([diagonal_units(args.n)] + [[a] for a in family], args.L)
    report.add(Row("alternating_traces_checked", res.checked, n=args.n, k=args.L))
    report.add(Row("nonzero_alternating_traces", len(res.violations), 0, res.all_zero, n=args.n, k=args.L))
    report.details = res.to_dict()


def cmd_prop31(args, report):
    B, = build_voiculescu_symbolic(args.n, 1, prefix="b")
    X, = build_voiculescu_symbolic(args.n, 1, prefix="x")
    res = prop31_claims(B, X, args.i0 - 1, args.j0 - 1, args.m_max)
    groups = {}
    for c in res.results:
        groups.setdefault(c.claim, []).append(c.equal)
    for claim, eqs in groups.items():
        bad = eqs.count(False)
        report.add(Row(f"claim_{claim}_unequal", bad, 0, bad == 0, n=args.n, k=args.m_max))
    report.details = res.to_dict()


def cmd_cor32(args, report):
    family = build_voiculescu_symbolic(args.n, args.m)
    res = corollary32_check(family, args.L)
    bad = sum(len(r.violations) for _, r in res.parts)
    report.add(Row("families_checked", len(res.parts), n=args.n, k=args.L))
    report.add(Row("nonzero_alternating_traces", bad, 0, res.free, n=args.n, k=args.L))
    report.details = res.to_dict()


def cmd_perturb(args, report):
    rng = RngStream(args.seed, 1)
    details = []
    for idx, r in enumerate(args.r):
        rec = perturb.perturb_report(r, args.K, args.N, args.trials, rng.child(idx), tol=args.tol)
        regime = r <= SMALL_R
        rec["small_r_regime"] = regime
        details.append(rec)
        common = dict(N=args.N, k=args.K, trials=args.trials)
        report.add(Row(f"sum_abs_coeffs[r={r}]", rec["sum_abs"], rec["bound"], rec["sum_abs_pass"], **common))
        fp_pass = rec["fprime_pass"] if regime else None
        report.add(Row(f"fprime_l2[r={r}]", rec["fprime_l2"], rec["fprime_bound"], fp_pass, **common))
        if not regime:
            report.warnings.append(
                f"r={r}: energy bound outside the small-r regime (r <= {SMALL_R}); "
                f"reported only, holds={rec['fprime_pass']}"
            )
        report.add(Row(f"l2_distance[r={r}]", rec["l2_distance"], rec["bound2"], rec["l2_pass"], **common))
        report.add(Row(f"lemma42_violations[r={r}]", rec["lemma42_violations"], 0,
                       rec["lemma42_violations"] == 0, **common))
    report.details = details


def cmd_rmt(args, report):
    details = []
    for n in args.n:
        means = []
        for N in args.N:
            check_size(n, N)
            rng = RngStream(args.seed, 2, (n, N))
            st = estimate_En_norm(n, N, args.trials, args.mode, rng, model=args.model, iterations=args.iterations)
            common = dict(n=n, N=N, trials=args.trials)
            report.add(Row("En_norm_mean", st.mean, **common))
            report.add(Row("En_norm_stderr", st.stderr, **common))
            report.add(Row("En_norm_max", st.max, st.bound, st.passed, **common))
            details.append(st.to_dict())
            means.append((N, st.mean, st.stderr))
        if len(means) > 1:
            # the mean should fall as N doubles, allowing one standard error
            ok = all(b[1] <= a[1] + max(a[2], b[2]) for a, b in zip(means[:-1], means[1:]))
            report.add(Row("En_norm_mean_decreasing_in_N", ok, None, ok if args.require_scaling else None,
                           n=n, trials=args.trials))
    report.details = details


def cmd_matdist(args, report):
    details = []
    for N in args.N:
        if N > 512:
            raise ResourceError("N exceeds guard 512")
        rows = matdist_curve(N, args.k, args.trials, RngStream(args.seed, 3, (N,)))
        for row in rows:
            common = dict(N=N, k=row.k, trials=args.trials)
            report.add(Row("mean_Ek_norm", row.mean_ek_norm, **common))
            report.add(Row("mean_relative_distance", row.mean_ratio, MATDIST_RATIO,
                           row.mean_ratio >= MATDIST_RATIO, **common))
            details.append(row.to_dict())
    report.details = details


def cmd_fgroup(args, report):
    details = []
    violations = 0
    worst = 0.0
    hash_bad = 0
    for t in range(args.trials):
        gen = RngStream(args.seed, 4, (t,)).generator()
        w1 = fgroup.random_element(gen, exact=args.exact)
        w2 = fgroup.random_element(gen, exact=args.exact)
        y = fgroup.random_y(gen, exact=args.exact)
        alpha = int(gen.integers(fgroup.MAX_GENERATORS))
        rec = fgroup.verify_lemma43(w1, w2, alpha, y)
        worst = max(worst, rec["identity_defect"])
        if not rec["pass"] or rec["exact_match"] is False:
            violations += 1
        x = fgroup.random_element(gen)
        lhs = sum(fgroup.norm_E(x, a) ** 2 for a in range(fgroup.MAX_GENERATORS))
        rhs = x.norm2_squared()
        if lhs > rhs + 1e-12:
            hash_bad += 1
        details.append({
            "trial": t,
            "alpha": alpha,
            "I1": rec["I1"],
            "I2": rec["I2"],
            "I3": rec["I3"],
            "total": rec["total"],
            "brute_force": rec["brute_force"],
            "exact_match": rec["exact_match"],
            "bounds": [b.to_dict() for b in rec["bounds"]],
            "sum_norm_E_squared": lhs,
            "norm2_squared": rhs,
        })
    report.add(Row("lemma43_violations", violations, 0, violations == 0, trials=args.trials))
    report.add(Row("max_identity_defect", worst, 1e-10, worst <= 1e-10, trials=args.trials))
    report.add(Row("norm_E_sum_violations", hash_bad, 0, hash_bad == 0, trials=args.trials))
    report.details = details


COMMANDS = {
    "moments": cmd_moments,
    "freeness": cmd_freeness,
    "prop31": cmd_prop31,
    "cor32": cmd_cor32,
    "perturb": cmd_perturb,
    "rmt": cmd_rmt,
    "matdist": cmd_matdist,
    "fgroup": cmd_fgroup,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="freelab", description="Seeded free-probability checks with JSON/CSV reports.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("moments", parents=[common], help="closed-form vs quadrature moments")
    s.add_argument("--law", choices=("semicircle", "quarter"), default="semicircle")
    s.add_argument("--center", type=float, default=0.0)
    s.add_argument("--radius", type=float, default=2.0)
    s.add_argument("--m", type=int, nargs="+", default=[0, 1, 2, 3, 4, 5, 6])

    s = sub.add_parser("freeness", parents=[common], help="exact freeness of a family from the diagonal algebra")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=1, help="number of matrices in the family")
    s.add_argument("--L", type=int, default=6, help="max total degree")

    s = sub.add_parser("prop31", parents=[common], help="moment-matching claims for two models")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m-max", dest="m_max", type=int, default=4)
    s.add_argument("--i0", type=int, default=1)
    s.add_argument("--j0", type=int, default=2)

    s = sub.add_parser("cor32", parents=[common], help="freeness of entries of a standard family")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--L", type=int, default=4)

    s = sub.add_parser("perturb", parents=[common], help="Fourier and L2 estimates for the perturbation")
    s.add_argument("--r", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.01])
    s.add_argument("--K", type=int, default=200, help="Fourier cutoff")
    s.add_argument("--N", type=int, default=256, help="matrix size of the trace-inequality model")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")

    s = sub.add_parser("rmt", parents=[common], help="block-trace conditional expectation norms")
    s.add_argument("--n", type=int, nargs="+", default=[4])
    s.add_argument("--N", type=int, nargs="+", default=[64])
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--mode", choices=CONJUGATIONS, default="random-diagonal")
    s.add_argument("--model", choices=MODELS, default=ALL_CIRCULAR)
    s.add_argument("--iterations", type=int, default=20, help="ascent sweeps in adversarial mode")
    s.add_argument("--require-scaling", dest="require_scaling", action="store_true",
                   help="fail unless the mean decreases as N grows")

    s = sub.add_parser("matdist", parents=[common], help="distance to spectral matrix-unit algebras")
    s.add_argument("--N", type=int, nargs="+", default=[512])
    s.add_argument("--k", type=int, nargs="+", default=[1, 2, 4, 8])
    s.add_argument("--trials", type=int, default=10)

    s = sub.add_parser("fgroup", parents=[common], help="split trace and its bounds in the free group algebra")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--exact", action="store_true", help="Gaussian-rational coefficients")
    return p


def _validate(args):
    for name in ("trials", "K"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise DomainError(f"--{name} must be positive")
    if args.command == "perturb" and args.N < 8:
        raise DomainError("--N must be at least 8")
    if args.command in ("rmt",) and (min(args.n) < 2 or min(args.N) < 2):
        raise DomainError("--n and --N must be at least 2")


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    return cfg


def run(argv=None):
    """Parse, execute, and return ``(exit code, rendered report or message)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    report = RunReport(args.command, _config(args))
    try:
        _validate(args)
        COMMANDS[args.command](args, report)
    except ResourceError as exc:
        return EXIT_RESOURCE, f"resource guard: {exc}\n"
    except DomainError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        text = ""
    return (EXIT_PASS if report.passed else EXIT_VIOLATION), text


def main(argv=None):
    code, text = run(argv)
    stream = sys.stdout if code in (EXIT_PASS, EXIT_VIOLATION) else sys.stderr
    if text:
        stream.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
