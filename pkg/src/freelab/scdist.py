"""Semicircle and quarter-circle laws: density, moments, CDF, quantile, sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError

QUAD_TOL = 1e-12

# quantile inversion
_BISECT_WIDTH = 1e-6
_EDGE_BAND = 1e-4
_NEWTON_STEPS = 8
_QUANTILE_TOL = 1e-12


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class SemicircleLaw:
    """Semicircle law on ``[center - radius, center + radius]``.

    The second central moment is ``radius**2 / 4``.
    """

    center: float = 0.0
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")

    @classmethod
    def from_variance(cls, variance, center=0.0):
        return cls(center, 2.0 * math.sqrt(variance))

    @property
    def support(self):
        return self.center - self.radius, self.center + self.radius


@dataclass(frozen=True)
class QuarterCircleLaw:
    """Law of ``sqrt(B*B)`` for ``B`` semicircular of ``(0, radius)``; supported on ``[0, radius]``."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")


def sc_density(law: SemicircleLaw, t):
    r = law.radius
    x = np.asarray(t, dtype=float) - law.center
    out = 2.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - x * x, 0.0, None))
    return float(out) if out.ndim == 0 else out


def qc_density(law: QuarterCircleLaw, t):
    r = law.radius
    x = np.asarray(t, dtype=float)
    inside = (x >= 0) & (x <= r)
    out = np.where(inside, 4.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - x * x, 0.0, None)), 0.0)
    return float(out) if out.ndim == 0 else out


def _centered_moment(radius, m):
    if m % 2:
        return 0.0
    return catalan(m // 2) * (radius / 2.0) ** m


def sc_moment(law: SemicircleLaw, m: int) -> float:
    """``m``-th raw moment; Catalan numbers for the centered law, binomially shifted otherwise."""
    if m < 0:
        raise DomainError("moment order must be nonnegative")
    if law.center == 0:
        return _centered_moment(law.radius, m)
    a = law.center
    return sum(math.comb(m, j) * a ** (m - j) * _centered_moment(law.radius, j) for j in range(0, m + 1, 2))


def _half_disc_integral(r, m):
    # int_0^r t^m sqrt(r^2 - t^2) dt = r^(m+2) W_m / (m+2), W_m = int_0^{pi/2} sin^m
    w = math.pi / 2 if m % 2 == 0 else 1.0
    for j in range(m % 2 + 2, m + 1, 2):
        w *= (j - 1) / j
    return r ** (m + 2) * w / (m + 2)


def qc_moment(law: QuarterCircleLaw, m: int) -> float:
    if m < 0:
        raise DomainError("moment order must be nonnegative")
    r = law.radius
    if m % 2 == 0:
        return _centered_moment(r, m)
    return 4.0 / (math.pi * r * r) * _half_disc_integral(r, m)


def sc_expectation(law: SemicircleLaw, fn, tol=QUAD_TOL) -> float:
    """Integrate ``fn`` against the law by adaptive quadrature in ``t = center + r sin(theta)``."""
    a, r = law.center, law.radius

    def integrand(theta):
        c = math.cos(theta)
        return fn(a + r * math.sin(theta)) * c * c

    val, _ = integrate.quad(integrand, -math.pi / 2, math.pi / 2, epsabs=tol, epsrel=tol, limit=200)
    return 2.0 / math.pi * val


def qc_expectation(law: QuarterCircleLaw, fn, tol=QUAD_TOL) -> float:
    r = law.radius

    def integrand(theta):
        c = math.cos(theta)
        return fn(r * math.sin(theta)) * c * c

    val, _ = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=tol, epsrel=tol, limit=200)
    return 4.0 / math.pi * val


def sc_moment_quadrature(law: SemicircleLaw, m: int, tol=QUAD_TOL) -> float:
    return sc_expectation(law, lambda t: t**m, tol)


def qc_moment_quadrature(law: QuarterCircleLaw, m: int, tol=QUAD_TOL) -> float:
    return qc_expectation(law, lambda t: t**m, tol)


def _cdf_centered(x, r):
    x = np.clip(x, -r, r)
    u = x / r
    return (u * np.sqrt(np.clip(1.0 - u * u, 0.0, None)) + np.arcsin(u)) / math.pi + 0.5


def sc_cdf(law: SemicircleLaw, t):
    """Distribution function; exactly 0 and 1 at (and beyond) the support edges."""
    x = np.asarray(t, dtype=float) - law.center
    out = np.clip(_cdf_centered(x, law.radius), 0.0, 1.0)
    out = np.where(x <= -law.radius, 0.0, np.where(x >= law.radius, 1.0, out))
    return float(out) if out.ndim == 0 else out


def sc_quantile(law: SemicircleLaw, s):
    """Inverse of :func:`sc_cdf` for ``0 <= s <= 1`` (scalar or array).

    Bisection narrows the bracket to width 1e-6, then guarded Newton steps
    finish the interior points. Within 1e-4 of either endpoint the density
    vanishes too fast for Newton, so those points are bisected to full
    precision instead.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s_arr)) or np.any(s_arr < 0.0) or np.any(s_arr > 1.0):
        raise DomainError("quantile level must lie in [0, 1]")
    r = law.radius
    flat = s_arr.reshape(-1)
    lo = np.full(flat.shape, -r)
    hi = np.full(flat.shape, r)
    while np.max(hi - lo, initial=0.0) > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        below = _cdf_centered(mid, r) < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    t = 0.5 * (lo + hi)
    edge = np.minimum(flat, 1.0 - flat) < _EDGE_BAND
    inner = ~edge
    if inner.any():
        ti, li, hi_i, si = t[inner], lo[inner], hi[inner], flat[inner]
        for _ in range(_NEWTON_STEPS):
            dens = 2.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - ti * ti, 0.0, None))
            step = (_cdf_centered(ti, r) - si) / dens
            ti = np.clip(ti - step, li, hi_i)
        t[inner] = ti
    if edge.any():
        le, he, se = lo[edge], hi[edge], flat[edge]
        for _ in range(64):
            mid = 0.5 * (le + he)
            below = _cdf_centered(mid, r) < se
            le = np.where(below, mid, le)
            he = np.where(below, he, mid)
        t[edge] = 0.5 * (le + he)

    t = np.where(flat == 0.0, -r, np.where(flat == 1.0, r, t)) + law.center
    t = t.reshape(s_arr.shape)
    return float(t) if t.ndim == 0 else t


def sc_sample(law: SemicircleLaw, rng: np.random.Generator, count: int) -> np.ndarray:
    """I.i.d. draws by inverse-transform sampling."""
    if count < 0:
        raise DomainError("count must be nonnegative")
    if count == 0:
        return np.empty(0)
    return sc_quantile(law, rng.random(count))
