"""Noncommutative polynomials over free semicircular/circular generators, exact coefficients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple

from ..errors import DomainError

SEMICIRCULAR = "semicircular"
CIRCULAR = "circular"


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _parts(other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        if isinstance(other, (int, Rational)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = p
        return GaussianRational(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


I = GaussianRational(0, 1)


def _conj(c):
    return c.conjugate()


@dataclass(frozen=True, eq=False)
class GeneratorLabel:
    """A free generator. Distinct label objects are distinct (mutually free) generators.

    ``variance`` is ``tau(g^2)`` for a semicircular label and ``tau(g g*)`` for a
    circular one.
    """

    id: str
    kind: str
    variance: Fraction

    def __post_init__(self):
        if self.kind not in (SEMICIRCULAR, CIRCULAR):
            raise DomainError(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "variance", Fraction(self.variance))
        if self.variance <= 0:
            raise DomainError("generator variance must be positive")

    def __repr__(self):
        return f"{self.id}"


class Letter(NamedTuple):
    label: GeneratorLabel
    starred: bool = False

    @classmethod
    def of(cls, label, starred=False):
        # a starred self-adjoint letter is the letter itself
        return cls(label, bool(starred) and label.kind == CIRCULAR)

    def adjoint(self):
        return Letter.of(self.label, not self.starred)

    def __str__(self):
        return f"{self.label.id}*" if self.starred else self.label.id


def covariance(x: Letter, y: Letter) -> Fraction:
    """Pairing weight ``tau(x y)`` of two letters."""
    if x.label is not y.label:
        return Fraction(0)
    if x.label.kind == SEMICIRCULAR:
        return x.label.variance
    return x.label.variance if x.starred != y.starred else Fraction(0)


def word_str(word) -> str:
    return "·".join(str(l) for l in word) if word else "1"


class AlgElement:
    """Finite linear combination of words in the letters, with exact coefficients.

    Values are immutable; arithmetic returns new elements and never stores a
    zero coefficient.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for w, c in terms.items():
                if c:
                    clean[tuple(w)] = c
        self._terms = clean

    @classmethod
    def scalar(cls, c):
        return cls({(): Fraction(c) if isinstance(c, (int, Rational)) else c})

    @classmethod
    def identity(cls):
        return cls.scalar(1)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def letter(cls, label, starred=False):
        return cls({(Letter.of(label, starred),): Fraction(1)})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def single_letter(self) -> Letter:
        """The letter of an element that is exactly one unit-coefficient letter."""
        if len(self._terms) != 1:
            raise DomainError("element is not a single letter")
        (w, c), = self._terms.items()
        if len(w) != 1 or c != 1:
            raise DomainError("element is not a single letter")
        return w[0]

    @staticmethod
    def _coerce(other):
        if isinstance(other, AlgElement):
            return other
        if isinstance(other, (int, Rational, GaussianRational)):
            return AlgElement.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0) + c
        return AlgElement(out)

    __radd__ = __add__

    def __neg__(self):
        return AlgElement({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        return AlgElement({w: q * c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, AlgElement):
            return NotImplemented
        out = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return AlgElement(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            return AlgElement({w: other * c for w, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, k):
        out = AlgElement.identity()
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self):
        return AlgElement({tuple(l.adjoint() for l in reversed(w)): _conj(c) for w, c in self._terms.items()})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c})·{word_str(w)}" for w, c in self._terms.items())


# ---------------------------------------------------------------------------
# exact moments


_MOMENT_CACHE: dict = {}


def _balanced(word) -> bool:
    counts = {}
    for l in word:
        key = (l.label, l.starred)
        counts[key] = counts.get(key, 0) + 1
    for (label, starred), k in counts.items():
        if label.kind == SEMICIRCULAR:
            if k % 2:
                return False
        elif not starred and counts.get((label, True), 0) != k:
            return False
        elif starred and counts.get((label, False), 0) != k:
            return False
    return True


def _moment(word):
    n = len(word)
    if n == 0:
        return Fraction(1)
    if n % 2:
        return Fraction(0)
    hit = _MOMENT_CACHE.get(word)
    if hit is not None:
        return hit
    if not _balanced(word):
        _MOMENT_CACHE[word] = Fraction(0)
        return Fraction(0)
    first = word[0]
    total = Fraction(0)
    # first letter pairs with an odd offset j; the pairing splits into inside and outside
    for j in range(1, n, 2):
        c = covariance(first, word[j])
        if not c:
            continue
        inside = _moment(word[1:j])
        if not inside:
            continue
        total += c * inside * _moment(word[j + 1:])
    _MOMENT_CACHE[word] = total
    return total


def wick_moment(word) -> Fraction:
    """``tau`` of a word: sum over non-crossing pairings of the pairwise covariances."""
    return _moment(tuple(word))


def clear_moment_cache():
    _MOMENT_CACHE.clear()


def alg_trace(x: AlgElement):
    """Linear extension of :func:`wick_moment`."""
    total = Fraction(0)
    for w, c in x.items():
        m = wick_moment(w)
        if m:
            total = c * m + total
    return total


# ---------------------------------------------------------------------------
# matrices over the algebra


class SymbolicMatrix:
    """Square matrix with :class:`AlgElement` entries, i.e. an element of N ⊗ M_n."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        rows = [list(r) for r in entries]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DomainError("symbolic matrix must be square and nonempty")
        self.n = n
        self.entries = tuple(
            tuple(e if isinstance(e, AlgElement) else AlgElement.scalar(e) for e in r) for r in rows
        )

    @classmethod
    def zeros(cls, n):
        return cls([[AlgElement.zero()] * n for _ in range(n)])

    @classmethod
    def identity(cls, n):
        return cls([[AlgElement.identity() if i == j else AlgElement.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n, i, j):
        """Matrix unit ``I ⊗ e_ij`` (0-based indices)."""
        return cls([[AlgElement.identity() if (a, b) == (i, j) else AlgElement.zero() for b in range(n)] for a in range(n)])

    @classmethod
    def from_element(cls, x: AlgElement):
        return cls([[x]])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other):
        if not isinstance(other, SymbolicMatrix):
            return False
        if other.n != self.n:
            raise DomainError(f"dimension mismatch: {self.n} vs {other.n}")
        return True

    def __add__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            other = SymbolicMatrix.identity(self.n) * other
        if not self._check(other):
            return NotImplemented
        return SymbolicMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    __radd__ = __add__

    def __neg__(self):
        return SymbolicMatrix([[-a for a in r] for r in self.entries])

    def __sub__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            other = SymbolicMatrix.identity(self.n) * other
        if not self._check(other):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            return SymbolicMatrix([[a.scale(other) for a in r] for r in self.entries])
        if not self._check(other):
            return NotImplemented
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = AlgElement.zero()
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SymbolicMatrix(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, GaussianRational)):
            return SymbolicMatrix([[other * a for a in r] for r in self.entries])
        return NotImplemented

    def __pow__(self, k):
        out = SymbolicMatrix.identity(self.n)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self):
        n = self.n
        return SymbolicMatrix([[self.entries[j][i].adjoint() for j in range(n)] for i in range(n)])

    def is_selfadjoint(self):
        n = self.n
        return all(self.entries[i][j] == self.entries[j][i].adjoint() for i in range(n) for j in range(i, n))

    def is_zero(self):
        return all(e.is_zero() for r in self.entries for e in r)

    def __eq__(self, other):
        if not isinstance(other, SymbolicMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def labels(self):
        """All generator labels occurring in the entries."""
        seen = {}
        for r in self.entries:
            for e in r:
                for w, _ in e.items():
                    for l in w:
                        seen[id(l.label)] = l.label
        return list(seen.values())

    def __repr__(self):
        return f"SymbolicMatrix(n={self.n})"


def matrix_trace(m: SymbolicMatrix):
    """Canonical trace ``(1/n) sum_i tau(m_ii)``."""
    total = Fraction(0)
    for i in range(m.n):
        total = alg_trace(m.entries[i][i]) + total
    return total * Fraction(1, m.n)


def diagonal_trace_of_product(a: SymbolicMatrix, b: SymbolicMatrix):
    """``matrix_trace(a * b)`` without forming the off-diagonal entries."""
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: {a.n} vs {b.n}")
    total = Fraction(0)
    for i in range(a.n):
        for k in range(a.n):
            x, y = a.entries[i][k], b.entries[k][i]
            if x.is_zero() or y.is_zero():
                continue
            total = alg_trace(x * y) + total
    return total * Fraction(1, a.n)


class LabelAllocator:
    """Single allocation point for fresh, mutually free generator labels."""

    def __init__(self, prefix="g"):
        self.prefix = prefix
        self._count = itertools.count()
        self.allocated = []

    def fresh(self, kind, variance, name=None):
        ident = name if name is not None else f"{self.prefix}{next(self._count)}"
        label = GeneratorLabel(ident, kind, Fraction(variance))
        self.allocated.append(label)
        return label
