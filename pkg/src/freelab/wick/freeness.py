"""Exact freeness checks, symbolic semicircular matrices, and the moment-matching claims."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DomainError, ResourceError
from .algebra import (
    CIRCULAR,
    SEMICIRCULAR,
    AlgElement,
    LabelAllocator,
    SymbolicMatrix,
    alg_trace,
    diagonal_trace_of_product,
    matrix_trace,
)

MAX_FREENESS_DEGREE = 8
MAX_PROP31_ORDER = 6
MAX_COR32_DEGREE = 6


def rational_str(q) -> str:
    """Exact value as ``"p/q"`` (``"a/b+c/di"`` for a Gaussian rational)."""
    if hasattr(q, "im") and hasattr(q, "re") and not isinstance(q, Fraction):
        if q.im == 0:
            return rational_str(q.re)
        return f"{rational_str(q.re)}{'+' if q.im >= 0 else '-'}{rational_str(abs(q.im))}i"
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def build_voiculescu_symbolic(n: int, m: int = 1, variance=None, prefix="a"):
    """A standard family of ``m`` self-adjoint symbolic matrices of size ``n``.

    Diagonal entries are fresh semicircular labels, entries above the diagonal
    fresh circular labels with the adjoint mirrored below. Every entry has
    variance ``1/n`` unless given, so ``tau_M(A_k^2) = 1``. All labels are
    distinct across the family.
    """
    if n < 2:
        raise DomainError("matrix dimension must be at least 2")
    if m < 1:
        raise DomainError("family size must be positive")
    v = Fraction(1, n) if variance is None else Fraction(variance)
    alloc = LabelAllocator(prefix)
    family = []
    for k in range(1, m + 1):
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            lab = alloc.fresh(SEMICIRCULAR, v, name=f"{prefix}{k}_{i + 1}{i + 1}")
            rows[i][i] = AlgElement.letter(lab)
            for j in range(i + 1, n):
                lab = alloc.fresh(CIRCULAR, v, name=f"{prefix}{k}_{i + 1}{j + 1}")
                rows[i][j] = AlgElement.letter(lab)
                rows[j][i] = AlgElement.letter(lab, starred=True)
        family.append(SymbolicMatrix(rows))
    return family


def diagonal_units(n: int):
    """Generators ``e_11, ..., e_nn`` of the diagonal algebra D_n."""
    return [SymbolicMatrix.unit(n, i, i) for i in range(n)]


def moments(a: SymbolicMatrix, kmax: int):
    """``[tau_M(a^0), ..., tau_M(a^kmax)]`` exactly."""
    out = [Fraction(1)]
    p = SymbolicMatrix.identity(a.n)
    for _ in range(kmax):
        out.append(diagonal_trace_of_product(p, a))
        p = p * a
    return out


# ---------------------------------------------------------------------------
# freeness


@dataclass
class Violation:
    pattern: str
    value: Fraction

    def to_dict(self):
        return {"pattern": self.pattern, "value": rational_str(self.value)}


@dataclass
class FreenessReport:
    all_zero: bool
    checked: int
    max_degree: int
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "all_zero": self.all_zero,
            "checked": self.checked,
            "max_degree": self.max_degree,
            "violations": [v.to_dict() for v in self.violations],
        }


def _centered_monomials(gens, max_degree, tag):
    """Distinct nonzero centered monomials ``w - tau(w)`` in ``gens``, lowest degree first."""
    n = gens[0].n
    seen = set()
    out = []
    frontier = [(SymbolicMatrix.identity(n), "")]
    for degree in range(1, max_degree + 1):
        nxt = []
        for prod, name in frontier:
            for gi, g in enumerate(gens):
                w = prod * g
                key = w.entries
                if key in seen or w.is_zero():
                    continue
                seen.add(key)
                wname = name + (f"{tag}{gi + 1}" if len(gens) > 1 else tag)
                nxt.append((w, wname))
                t = matrix_trace(w)
                centered = w - SymbolicMatrix.identity(n) * t if t else w
                if centered.is_zero():
                    continue
                out.append((degree, _power_name(wname, tag, len(gens)), centered))
        frontier = nxt
    return out


def _power_name(wname, tag, ngens):
    if ngens == 1:
        k = len(wname) // len(tag)
        return f"({tag}^{k}-tau)" if k > 1 else f"({tag}-tau)"
    return f"({wname}-tau)"


def check_freeness(families, max_degree: int) -> FreenessReport:
    """Exact test that the algebras generated by each family are free.

    Enumerates every alternating product (adjacent factors from different
    families) of centered monomials with total degree at most ``max_degree``
    and evaluates its trace in rational arithmetic. Freeness holds up to that
    degree iff every such trace is 0.
    """
    if max_degree > MAX_FREENESS_DEGREE:
        raise ResourceError(f"degree {max_degree} exceeds guard {MAX_FREENESS_DEGREE}")
    families = [list(f) for f in families]
    if not families or any(not f for f in families):
        raise DomainError("families must be nonempty generating sets")
    n = families[0][0].n
    if any(g.n != n for f in families for g in f):
        raise DomainError("all generators must share one dimension")

    tags = []
    for fi, fam in enumerate(families):
        tags.append(f"F{fi + 1}.")
    monos = [_centered_monomials(fam, max_degree, tags[fi] + "x") for fi, fam in enumerate(families)]

    violations = []
    checked = 0
    ident = SymbolicMatrix.identity(n)

    # depth-first over alternating words, reusing prefix products
    stack = [(ident, None, 0, ())]
    while stack:
        prefix, last, deg, pattern = stack.pop()
        for fi, mono in enumerate(monos):
            if fi == last:
                continue
            for d, name, c in mono:
                if deg + d > max_degree:
                    continue
                pat = pattern + (name,)
                # a single centered factor has trace 0 by construction
                if pattern:
                    value = diagonal_trace_of_product(prefix, c)
                    checked += 1
                    if value:
                        violations.append(Violation("·".join(pat), value))
                if deg + d < max_degree:
                    stack.append((prefix * c, fi, deg + d, pat))
    return FreenessReport(not violations, checked, max_degree, violations)


# ---------------------------------------------------------------------------
# moment-matching claims for two self-adjoint matrices


@dataclass
class ClaimResult:
    claim: str
    detail: str
    lhs: object
    rhs: object

    @property
    def equal(self):
        return self.lhs == self.rhs

    def to_dict(self):
        return {
            "claim": self.claim,
            "detail": self.detail,
            "lhs": rational_str(self.lhs),
            "rhs": rational_str(self.rhs),
            "equal": self.equal,
        }


@dataclass
class ClaimsReport:
    results: list

    @property
    def all_hold(self):
        return all(r.equal for r in self.results)

    def to_dict(self):
        return {"all_hold": self.all_hold, "claims": [r.to_dict() for r in self.results]}


class _Side:
    """Cached powers and products for one of the two matrices being compared."""

    def __init__(self, m: SymbolicMatrix, n: int, top: int):
        self.m = m
        self.powers = [SymbolicMatrix.identity(n)]
        for _ in range(top):
            self.powers.append(self.powers[-1] * m)

    def entry(self, i, j):
        return self.m.entries[i][j]


def prop31_claims(B: SymbolicMatrix, X: SymbolicMatrix, i0: int = 0, j0: int = 1, m_max: int = 4) -> ClaimsReport:
    """Evaluate Claim I and Claim II items (i)-(v) on both sides, exactly.

    Indices are 0-based. For each ``m <= m_max``:

    * (i)   ``tau_M(e_i0i0 (B e_j0j0)^(m-1) B)``
    * (ii)  ``tau_N(b_j0j0^m)``
    * (iii) ``tau_M((e_s1s1 - 1/n) B^t1 ... (e_slsl - 1/n) B^tl)`` for
      ``2 <= l <= m``, ``1 <= t <= m``, ``sum t <= m + 1``, ``s in {i0, j0}``
    * (iv)  ``tau_M(e_i0i0 (B e_j0j0)^m B)``
    * (v)   ``tau_M(B^(m+1))``
    """
    if B.n != X.n:
        raise DomainError("B and X must have the same dimension")
    if not (B.is_selfadjoint() and X.is_selfadjoint()):
        raise DomainError("B and X must be self-adjoint")
    if m_max > MAX_PROP31_ORDER:
        raise ResourceError(f"m_max {m_max} exceeds guard {MAX_PROP31_ORDER}")
    n = B.n
    if not (0 <= i0 < n and 0 <= j0 < n and i0 != j0):
        raise DomainError("need distinct indices i0, j0 in range")
    sides = (_Side(B, n, m_max + 1), _Side(X, n, m_max + 1))
    units = {i: SymbolicMatrix.unit(n, i, i) for i in (i0, j0)}
    cunits = {i: units[i] - Fraction(1, n) for i in (i0, j0)}
    results = []

    def both(claim, detail, fn):
        results.append(ClaimResult(claim, detail, fn(sides[0]), fn(sides[1])))

    for i in (i0, j0):
        for j in (i0, j0):
            both("I", f"tau_N(b_{i + 1}{j + 1} b_{j + 1}{i + 1})", lambda s, i=i, j=j: alg_trace(s.entry(i, j) * s.entry(j, i)))

    def chain(s, k):
        # e_i0i0 (M e_j0j0)^k M
        p = units[i0]
        for _ in range(k):
            p = p * s.m * units[j0]
        return diagonal_trace_of_product(p, s.m)

    for m in range(1, m_max + 1):
        both("II(i)", f"m={m}", lambda s, m=m: chain(s, m - 1))
        both("II(ii)", f"m={m}", lambda s, m=m: alg_trace(s.entry(j0, j0) ** m))
        for l in range(2, m + 1):
            for ts in itertools.product(range(1, m + 1), repeat=l):
                if sum(ts) > m + 1:
                    continue
                for ss in itertools.product((i0, j0), repeat=l):
                    detail = f"m={m} t={ts} s={tuple(x + 1 for x in ss)}"

                    def alt(s, ts=ts, ss=ss):
                        p = SymbolicMatrix.identity(n)
                        for t, sidx in zip(ts[:-1], ss[:-1]):
                            p = p * cunits[sidx] * s.powers[t]
                        p = p * cunits[ss[-1]]
                        return diagonal_trace_of_product(p, s.powers[ts[-1]])

                    both("II(iii)", detail, alt)
        both("II(iv)", f"m={m}", lambda s, m=m: chain(s, m))
        both("II(v)", f"m={m}", lambda s, m=m: matrix_trace(s.powers[m + 1]))
    return ClaimsReport(results)


# ---------------------------------------------------------------------------
# free compression of a standard family


@dataclass
class Cor32Report:
    parts: list  # (description, FreenessReport)

    @property
    def free(self):
        return all(r.all_zero for _, r in self.parts)

    def to_dict(self):
        return {
            "free": self.free,
            "parts": [{"family": d, **r.to_dict()} for d, r in self.parts],
        }


def corollary32_check(family, max_degree: int) -> Cor32Report:
    """Freeness of the entry families a free compression produces.

    (i)  ``{a_ii^(1), ..., a_ii^(m)}`` for each ``i``;
    (ii) ``{a_ij1^(1) a_ij1^(1)*, ..., a_ijm^(m) a_ijm^(m)*}`` for each ``i`` and
         each choice ``j1, ..., jm``.
    Each is tested inside the entry algebra by :func:`check_freeness`.
    """
    if max_degree > MAX_COR32_DEGREE:
        raise ResourceError(f"degree {max_degree} exceeds guard {MAX_COR32_DEGREE}")
    family = list(family)
    if not family:
        raise DomainError("empty family")
    n = family[0].n
    m = len(family)
    parts = []
    for i in range(n):
        fams = [[SymbolicMatrix.from_element(a.entries[i][i])] for a in family]
        parts.append((f"(i) diag i={i + 1}", check_freeness(fams, max_degree) if m > 1 else _vacuous(max_degree)))
    for i in range(n):
        for js in itertools.product(range(n), repeat=m):
            fams = []
            for a, j in zip(family, js):
                x = a.entries[i][j]
                fams.append([SymbolicMatrix.from_element(x * x.adjoint())])
            desc = f"(ii) i={i + 1} j={tuple(j + 1 for j in js)}"
            parts.append((desc, check_freeness(fams, max_degree) if m > 1 else _vacuous(max_degree)))
    return Cor32Report(parts)


def _vacuous(max_degree):
    return FreenessReport(True, 0, max_degree, [])
