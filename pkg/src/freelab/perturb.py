"""Smoothing a semicircular function at its endpoints, and the resulting Fourier and L2 estimates.

The semicircular element of radius ``r`` is modelled as the function
``g(s)`` on ``[0, 1]`` (the quantile of the law), acting by multiplication on
``L^2[0, 1]`` where the Haar unitary is ``exp(2 pi i s)``. The perturbation
``f`` replaces ``g`` on ``[0, r]`` and ``[1 - r, 1]`` by parabolas vanishing at
the endpoints, which makes ``f'`` square-integrable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, NumericError
from .rmt.ensembles import RngStream, as_generator, haar_unitary
from .scdist import SemicircleLaw, sc_cdf, sc_quantile

QUAD_LIMIT = 2000


@dataclass(frozen=True)
class PerturbationProfile:
    r: float
    tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.r < 0.5:
            raise DomainError(f"r must lie in (0, 1/2), got {self.r}")
        if not self.tol > 0:
            raise DomainError("quadrature tolerance must be positive")

    @property
    def law(self):
        return SemicircleLaw(0.0, self.r)

    @property
    def left(self):
        """``g(r)``, nonpositive."""
        return _edge_values(self.r)[0]

    @property
    def right(self):
        """``g(1 - r)``, nonnegative."""
        return _edge_values(self.r)[1]


_EDGE_CACHE = {}


def _edge_values(r):
    if r not in _EDGE_CACHE:
        law = SemicircleLaw(0.0, r)
        gl = float(sc_quantile(law, r))
        gr = float(sc_quantile(law, 1.0 - r))
        if gl > 0.0 or gr < 0.0:
            raise NumericError(f"expected g(r) <= 0 <= g(1-r), got {gl}, {gr}")
        _EDGE_CACHE[r] = (gl, gr)
    return _EDGE_CACHE[r]


def _quad(fn, a, b, tol, **kw):
    val, err = integrate.quad(fn, a, b, epsabs=tol, epsrel=0.0, limit=QUAD_LIMIT, full_output=1, **kw)[:2]
    if not err <= max(10.0 * tol, 1e-14):
        raise NumericError(f"quadrature did not reach tolerance {tol} (error estimate {err})")
    return val


def g_of_s(profile: PerturbationProfile, s):
    """Quantile of the centered semicircle law of radius ``r``."""
    return sc_quantile(profile.law, s)


def f_of_s(profile: PerturbationProfile, s):
    """The perturbed function: parabolas on ``[0, r]`` and ``[1 - r, 1]``, ``g`` in between."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0) or np.any(s_arr > 1.0):
        raise DomainError("s must lie in [0, 1]")
    r = profile.r
    gl, gr = profile.left, profile.right
    out = np.empty_like(s_arr)
    lo = s_arr <= r
    hi = s_arr >= 1.0 - r
    mid = ~(lo | hi)
    out[lo] = gl / (r * r) * s_arr[lo] ** 2
    out[hi] = gr / (r * r) * (1.0 - s_arr[hi]) ** 2
    if mid.any():
        out[mid] = g_of_s(profile, s_arr[mid])
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# energy of f'


@dataclass
class EnergyReport:
    r: float
    left: float
    middle: float
    right: float

    @property
    def total(self):
        return self.left + self.middle + self.right

    def to_dict(self):
        return {"r": self.r, "left": self.left, "middle": self.middle, "right": self.right, "total": self.total}


def fprime_pieces(profile: PerturbationProfile) -> EnergyReport:
    """``int |f'|^2`` over each of the three pieces, in closed form.

    Parabolas give ``(4/3) g(r)^2 / r``; on the middle piece ``|g'|^2 ds`` becomes
    ``(pi r^2/2) dt / sqrt(r^2 - t^2)``, an arcsine difference.
    """
    r = profile.r
    gl, gr = profile.left, profile.right
    left = 4.0 / 3.0 * gl * gl / r
    right = 4.0 / 3.0 * gr * gr / r
    middle = math.pi * r * r / 2.0 * (math.asin(min(gr / r, 1.0)) - math.asin(max(gl / r, -1.0)))
    return EnergyReport(r, left, middle, right)


def fprime_l2(profile: PerturbationProfile) -> float:
    return fprime_pieces(profile).total


def fprime_l2_quadrature(profile: PerturbationProfile) -> EnergyReport:
    """Same pieces by quadrature of ``|f'(s)|^2`` in ``s``; ``f'`` is taken one-sidedly at the junctions."""
    r = profile.r
    gl, gr = profile.left, profile.right
    tol = profile.tol
    left = _quad(lambda s: (2.0 * gl * s / (r * r)) ** 2, 0.0, r, tol)
    right = _quad(lambda s: (2.0 * gr * (1.0 - s) / (r * r)) ** 2, 1.0 - r, 1.0, tol)
    law = profile.law

    def gprime2(s):
        t = float(sc_quantile(law, s))
        return (math.pi * r * r / 2.0) ** 2 / (r * r - t * t)

    middle = _quad(gprime2, r, 1.0 - r, max(tol, 1e-10) * r)
    return EnergyReport(r, left, middle, right)


def middle_threshold(lo=1e-4, hi=0.49) -> float:
    """Largest ``r`` below which the middle-piece energy stays at most ``r``."""
    h = lambda r: fprime_pieces(PerturbationProfile(r)).middle - r  # noqa: E731
    return _crossing(h, lo, hi)


def total_threshold(lo=1e-4, hi=0.49) -> float:
    """Largest ``r`` below which ``int |f'|^2 <= 5 r``; ``hi`` if it never fails."""
    h = lambda r: fprime_l2(PerturbationProfile(r)) - 5.0 * r  # noqa: E731
    return _crossing(h, lo, hi)


def _crossing(h, lo, hi):
    grid = np.linspace(lo, hi, 200)
    vals = [h(x) for x in grid]
    if vals[0] > 0:
        return 0.0
    for a, b, va, vb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if va <= 0 < vb:
            return float(optimize.brentq(h, a, b, xtol=1e-12))
    return float(hi)


# ---------------------------------------------------------------------------
# Fourier coefficients


def _parabola_coeff(amp, r, omega):
    """``amp * int_0^r u^2 exp(i omega u) du``."""
    if omega == 0.0:
        return complex(amp * r**3 / 3.0)
    a = 1j * omega
    prim = lambda u: np.exp(a * u) * (u * u / a - 2.0 * u / a**2 + 2.0 / a**3)  # noqa: E731
    return complex(amp * (prim(r) - prim(0.0)))


def fourier_coeff(profile: PerturbationProfile, k: int) -> complex:
    """``c_k = int_0^1 f(s) exp(2 pi i k s) ds``.

    The parabola pieces are integrated in closed form. On the middle piece
    ``s = s(t)`` with ``t = r sin(theta)`` turns ``g(s) ds`` into
    ``(2 r/pi) sin(theta) cos(theta)^2 d theta`` and the phase into
    ``2 pi k (1/2 + (theta + sin theta cos theta)/pi)``.
    """
    k = int(k)
    r = profile.r
    gl, gr = profile.left, profile.right
    omega = 2.0 * math.pi * k
    left = _parabola_coeff(gl / (r * r), r, omega)
    # (1 - s)^2 on [1 - r, 1]: substitute u = 1 - s, exp(i omega) = 1
    right = _parabola_coeff(gr / (r * r), r, -omega)
    th_lo = math.asin(max(gl / r, -1.0))
    th_hi = math.asin(min(gr / r, 1.0))

    def phase(th):
        return omega * (0.5 + (th + math.sin(th) * math.cos(th)) / math.pi)

    def amp(th):
        c = math.cos(th)
        return 2.0 * r / math.pi * math.sin(th) * c * c

    tol = profile.tol
    re = _quad(lambda th: amp(th) * math.cos(phase(th)), th_lo, th_hi, tol)
    im = _quad(lambda th: amp(th) * math.sin(phase(th)), th_lo, th_hi, tol) if k else 0.0
    return left + right + complex(re, im)


def fourier_coeff_direct(profile: PerturbationProfile, k: int, tol=1e-10) -> complex:
    """Quadrature of ``f(s) exp(2 pi i k s)`` directly in ``s``; slow, used as a cross-check."""
    omega = 2.0 * math.pi * k
    r = profile.r
    pts = [0.0, r, 1.0 - r, 1.0]
    re = im = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        re += _quad(lambda s: f_of_s(profile, s) * math.cos(omega * s), a, b, tol)
        im += _quad(lambda s: f_of_s(profile, s) * math.sin(omega * s), a, b, tol)
    return complex(re, im)


def tail_factor(K: int) -> float:
    """``sqrt(sum_{|k| > K} 1 / (2 pi k)^2)``."""
    return math.sqrt(2.0 * float(special.polygamma(1, K + 1)) / (4.0 * math.pi**2))


@dataclass
class FourierReport:
    r: float
    K: int
    coefficients: dict
    fprime_l2: float
    head: float
    tail: float

    @property
    def sum_abs(self):
        return self.head + self.tail

    @property
    def bound(self):
        return math.sqrt(5.0) * math.sqrt(self.r)

    @property
    def passed(self):
        return self.sum_abs <= self.bound

    def symmetry_defect(self):
        return max(
            (abs(self.coefficients[-k] - np.conj(self.coefficients[k])) for k in range(1, self.K + 1)),
            default=0.0,
        )

    def to_dict(self):
        return {
            "r": self.r,
            "K": self.K,
            "head": self.head,
            "tail": self.tail,
            "sum_abs": self.sum_abs,
            "bound": self.bound,
            "pass": self.passed,
        }


def sum_abs_coeffs(profile: PerturbationProfile, K: int = 200) -> FourierReport:
    """``sum_{0 < |k| <= K} |c_k|`` plus a rigorous bound on the rest.

    ``c_k = -(1/(2 pi i k)) int f' exp(2 pi i k s) ds``, so Cauchy-Schwarz and
    Bessel bound the tail by ``sqrt(sum_{|k|>K} (2 pi k)^-2) * ||f'||_2``.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    coeffs = {}
    for k in range(-K, K + 1):
        coeffs[k] = fourier_coeff(profile, k)
    head = sum(abs(coeffs[k]) for k in range(-K, K + 1) if k)
    fp = fprime_l2(profile)
    tail = tail_factor(K) * math.sqrt(fp)
    return FourierReport(profile.r, K, coeffs, fp, head, tail)


# ---------------------------------------------------------------------------
# distance between g and f


def l2_distance_g_f(profile: PerturbationProfile) -> float:
    """``int_0^1 |g(s) - f(s)|^2 ds``, nonzero only on the two end pieces.

    Integrated in ``theta`` with ``g = r sin(theta)`` and ``s = s(theta)``.
    """
    r = profile.r
    gl, gr = profile.left, profile.right
    a, b = gl / (r * r), gr / (r * r)
    th_l = math.asin(max(gl / r, -1.0))
    th_r = math.asin(min(gr / r, 1.0))

    def s_of(th):
        return 0.5 + (th + math.sin(th) * math.cos(th)) / math.pi

    def left(th):
        c = math.cos(th)
        return (r * math.sin(th) - a * s_of(th) ** 2) ** 2 * 2.0 / math.pi * c * c

    def right(th):
        c = math.cos(th)
        return (r * math.sin(th) - b * (1.0 - s_of(th)) ** 2) ** 2 * 2.0 / math.pi * c * c

    tol = profile.tol * r**3
    return _quad(left, -math.pi / 2, th_l, tol) + _quad(right, th_r, math.pi / 2, tol)


def l2_distance_direct(profile: PerturbationProfile, tol=1e-13) -> float:
    """Same integral directly in ``s`` through the quantile; cross-check."""
    r = profile.r

    def diff2(s):
        return (float(g_of_s(profile, s)) - float(f_of_s(profile, s))) ** 2

    return _quad(diff2, 0.0, r, tol) + _quad(diff2, 1.0 - r, 1.0, tol)


# ---------------------------------------------------------------------------
# finite diagonal model of the trace inequality


def diagonal_models(profile: PerturbationProfile, N: int):
    """Diagonals of ``x`` and ``x~`` sampled at the midpoints ``(i - 1/2)/N``."""
    s = (np.arange(N) + 0.5) / N
    return np.asarray(g_of_s(profile, s)), np.asarray(f_of_s(profile, s))


def lemma42_gap(x, xt, w1, w2, r) -> float:
    """``|tau(w1 x~ w2)|^2 + 6 r^(5/2) - |tau(w1 x w2)|^2`` for diagonal ``x``, ``x~``."""
    # tau(w1 d w2) = (1/N) sum_i d_i (w2 w1)_ii
    d = np.einsum("ij,ji->i", w2, w1)
    N = len(x)
    lhs = abs(np.dot(d, x) / N) ** 2
    rhs = abs(np.dot(d, xt) / N) ** 2
    return float(rhs + 6.0 * r**2.5 - lhs)


@dataclass
class Lemma42Report:
    r: float
    N: int
    trials: int
    slack: float
    min_gap: float
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        return {
            "r": self.r,
            "N": self.N,
            "trials": self.trials,
            "slack": self.slack,
            "min_gap": self.min_gap,
            "violations": list(self.violations),
            "pass": self.passed,
        }


def verify_lemma42(profile: PerturbationProfile, N: int, trials: int, rng, slack=1e-8) -> Lemma42Report:
    """Random contractions ``w = lambda U`` (Haar ``U``, uniform ``lambda`` in [0, 1]) per trial.

    A trial violates when ``|tau(w1 x w2)|^2 > |tau(w1 x~ w2)|^2 + 6 r^(5/2) + slack``.
    Trial ``t`` uses child stream ``t`` of ``rng``.
    """
    if N < 8:
        raise DomainError("N must be at least 8")
    if trials < 0:
        raise DomainError("trials must be nonnegative")
    x, xt = diagonal_models(profile, N)
    gaps = []
    violations = []
    for t in range(trials):
        gen = rng.child(t).generator() if isinstance(rng, RngStream) else as_generator(rng)
        w1 = gen.random() * haar_unitary(N, gen)
        w2 = gen.random() * haar_unitary(N, gen)
        gap = lemma42_gap(x, xt, w1, w2, profile.r)
        gaps.append(gap)
        if gap < -slack:
            violations.append(t)
    return Lemma42Report(profile.r, N, trials, slack, float(min(gaps)) if gaps else math.inf, violations)


def perturb_report(r: float, K: int, N: int, trials: int, rng, tol=1e-12) -> dict:
    """All the per-radius checks in one record."""
    prof = PerturbationProfile(r, tol)
    four = sum_abs_coeffs(prof, K)
    pieces = fprime_pieces(prof)
    dist = l2_distance_g_f(prof)
    lem = verify_lemma42(prof, N, trials, rng)
    return {
        "r": r,
        "K": K,
        "fprime_l2": pieces.total,
        "fprime_pieces": pieces.to_dict(),
        "fprime_bound": 5.0 * r,
        "fprime_pass": pieces.total <= 5.0 * r,
        "sum_abs": four.sum_abs,
        "tail": four.tail,
        "bound": four.bound,
        "sum_abs_pass": four.passed,
        "l2_distance": dist,
        "bound2": 2.0 * r**3,
        "l2_pass": dist <= 2.0 * r**3,
        "lemma42_violations": len(lem.violations),
        "lemma42_min_gap": lem.min_gap,
    }


def check_s_of_g(profile: PerturbationProfile, s):
    """``s(g(s)) - s``; round-trip defect of the quantile."""
    return sc_cdf(profile.law, g_of_s(profile, s)) - np.asarray(s)
