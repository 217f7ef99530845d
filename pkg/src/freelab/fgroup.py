"""Free group algebra: reduced words, trailing/leading power decompositions, and a split trace.

Elements of the group algebra are finite sums ``sum x(w) lambda(w)``. For a
fixed generator ``alpha`` every word factors uniquely as ``a g^m`` with ``a`` not
ending in ``g`` (the E-decomposition) and as ``g^n b`` with ``b`` not starting
in ``g`` (the S-decomposition). For ``y`` in the algebra of ``g`` with zero
trace this splits ``tau(w1 y w2)`` into three sums ``I1 + I2 + I3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .wick.algebra import GaussianRational


def _reduce(letters):
    # a stack makes the result independent of where cancellation starts
    out = []
    for g, e in letters:
        e = int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
            if e:
                out.append((g, e))
        else:
            out.append((g, e))
    return tuple(out)


class FGWord:
    """Reduced word: tuple of ``(generator, exponent)`` with nonzero exponents and no equal neighbours."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters=()):
        self.letters = _reduce(letters)
        self._hash = hash(self.letters)

    @classmethod
    def gen(cls, g, e=1):
        return cls(((g, e),))

    @property
    def is_identity(self):
        return not self.letters

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __mul__(self, other):
        return FGWord(self.letters + other.letters)

    def inverse(self):
        return FGWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __eq__(self, other):
        return isinstance(other, FGWord) and self.letters == other.letters

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return repr(self.letters) < repr(other.letters)

    def __repr__(self):
        if not self.letters:
            return "e"
        return "".join(f"g{g}" + (f"^{e}" if e != 1 else "") for g, e in self.letters)


IDENTITY = FGWord()


def word_multiply(u: FGWord, v: FGWord) -> FGWord:
    return u * v


def _is_zero(c):
    return not c


class GroupAlgElement:
    """Finite sum ``sum_w x(w) lambda(w)``; coefficients are complex, Fraction or GaussianRational."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        for w, c in (coeffs or {}).items():
            if not isinstance(w, FGWord):
                w = FGWord(w)
            if not _is_zero(c):
                self.coeffs[w] = self.coeffs.get(w, 0) + c
        self.coeffs = {w: c for w, c in self.coeffs.items() if not _is_zero(c)}

    @classmethod
    def of(cls, word, c=1):
        return cls({word: c})

    @classmethod
    def identity(cls):
        return cls({IDENTITY: 1})

    def __add__(self, other):
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return GroupAlgElement(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q):
        return GroupAlgElement({w: q * c for w, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, GroupAlgElement):
            return self.scale(other)
        out = {}
        for u, a in self.coeffs.items():
            for v, b in other.coeffs.items():
                w = u * v
                out[w] = out.get(w, 0) + a * b
        return GroupAlgElement(out)

    __rmul__ = scale

    def adjoint(self):
        return GroupAlgElement({w.inverse(): _conj(c) for w, c in self.coeffs.items()})

    def trace(self):
        return self.coeffs.get(IDENTITY, 0)

    def norm2_squared(self):
        return sum(abs(complex(c)) ** 2 for c in self.coeffs.values())

    def norm2(self):
        return math.sqrt(self.norm2_squared())

    def generators(self):
        return sorted({g for w in self.coeffs for g, _ in w.letters})

    def __eq__(self, other):
        return isinstance(other, GroupAlgElement) and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})·{w}" for w, c in sorted(self.coeffs.items()))


def _conj(c):
    if isinstance(c, Fraction) or isinstance(c, int):
        return c
    return c.conjugate()


def power_element(alpha, coeffs) -> GroupAlgElement:
    """``sum_k coeffs[k] lambda(g_alpha^k)``."""
    return GroupAlgElement({FGWord.gen(alpha, k) if k else IDENTITY: c for k, c in coeffs.items()})


# ---------------------------------------------------------------------------
# decompositions and norms


def e_decompose(x: GroupAlgElement, alpha) -> dict:
    """``{(a, m): E(a, m)}`` with ``word = a g_alpha^m`` and ``a`` not ending in ``g_alpha``."""
    out = {}
    for w, c in x.coeffs.items():
        if w.letters and w.letters[-1][0] == alpha:
            key = (FGWord(w.letters[:-1]), w.letters[-1][1])
        else:
            key = (w, 0)
        out[key] = out.get(key, 0) + c
    return out


def s_decompose(x: GroupAlgElement, alpha) -> dict:
    """``{(b, n): S(b, n)}`` with ``word = g_alpha^n b`` and ``b`` not starting with ``g_alpha``."""
    out = {}
    for w, c in x.coeffs.items():
        if w.letters and w.letters[0][0] == alpha:
            key = (FGWord(w.letters[1:]), w.letters[0][1])
        else:
            key = (w, 0)
        out[key] = out.get(key, 0) + c
    return out


def e_reconstruct(dec, alpha) -> GroupAlgElement:
    return GroupAlgElement({a * FGWord.gen(alpha, m): c for (a, m), c in dec.items()})


def s_reconstruct(dec, alpha) -> GroupAlgElement:
    return GroupAlgElement({FGWord.gen(alpha, n) * b: c for (b, n), c in dec.items()})


def norm_E(x: GroupAlgElement, alpha) -> float:
    """l2 mass of the words ending in a nonzero power of ``g_alpha``."""
    return math.sqrt(sum(abs(complex(c)) ** 2 for (_, m), c in e_decompose(x, alpha).items() if m))


def norm_S(x: GroupAlgElement, alpha) -> float:
    """l2 mass of the words starting with a nonzero power of ``g_alpha``."""
    return math.sqrt(sum(abs(complex(c)) ** 2 for (_, n), c in s_decompose(x, alpha).items() if n))


# ---------------------------------------------------------------------------
# the split trace


def _check_y(y_coeffs):
    if any(k == 0 for k in y_coeffs):
        raise DomainError("y must have zero trace: exponent 0 is not allowed")


def compute_I123(w1: GroupAlgElement, w2: GroupAlgElement, alpha, y_coeffs):
    """The three parts of ``tau(w1 y w2)`` for ``y = sum_k y_coeffs[k] lambda(g_alpha^k)``.

    With ``w1 = sum E(a, m) a g^m`` and ``w2 = sum S(b, n) g^n b``, only ``b = a^-1``
    survives and the trace of ``y g^(m+n)`` is ``y_coeffs[-(m+n)]``.

    * ``I1``: ``m = 0``, ``n != 0``
    * ``I2``: ``m != 0``, ``n = 0``
    * ``I3``: ``m != 0``, ``n != 0``, with coefficient ``E(a, m)``
    """
    _check_y(y_coeffs)
    E = e_decompose(w1, alpha)
    S = s_decompose(w2, alpha)
    by_b = {}
    for (b, n), c in S.items():
        by_b.setdefault(b, []).append((n, c))
    zero = _zero_like(list(E.values()) + list(S.values()) + list(y_coeffs.values()))
    I1 = I2 = I3 = zero
    for (a, m), ca in E.items():
        for n, cb in by_b.get(a.inverse(), ()):
            yk = y_coeffs.get(-(m + n))
            if yk is None or m + n == 0:
                continue
            term = ca * cb * yk
            if m == 0:
                I1 = I1 + term
            elif n == 0:
                I2 = I2 + term
            else:
                I3 = I3 + term
    return I1, I2, I3


def _zero_like(values):
    if values and all(isinstance(v, (Fraction, int, GaussianRational)) for v in values):
        return Fraction(0)
    return 0j


def brute_force_trace(w1: GroupAlgElement, y: GroupAlgElement, w2: GroupAlgElement):
    """Identity coefficient of ``w1 y w2`` by direct multiplication."""
    return (w1 * y * w2).trace()


@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    slack: float = 1e-12

    @property
    def passed(self):
        return self.lhs <= self.rhs + self.slack

    @property
    def margin(self):
        return self.rhs - self.lhs

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "pass": self.passed}


def verify_lemma43(w1, w2, alpha, y_coeffs) -> dict:
    """Evaluate the three bounds on ``|I1|``, ``|I2|``, ``|I3|`` and the oracle identity."""
    I1, I2, I3 = compute_I123(w1, w2, alpha, y_coeffs)
    y = power_element(alpha, y_coeffs)
    brute = brute_force_trace(w1, y, w2)
    total = I1 + I2 + I3
    y2 = math.sqrt(sum(abs(complex(c)) ** 2 for c in y_coeffs.values()))
    y1 = sum(abs(complex(c)) for c in y_coeffs.values())
    n1, n2 = w1.norm2(), w2.norm2()
    e1, s2 = norm_E(w1, alpha), norm_S(w2, alpha)
    bounds = [
        BoundCheck("I1", abs(complex(I1)), n1 * s2 * y2),
        BoundCheck("I2", abs(complex(I2)), e1 * n2 * y2),
        BoundCheck("I3", abs(complex(I3)), e1 * s2 * y1),
    ]
    defect = abs(complex(total) - complex(brute))
    return {
        "I1": complex(I1),
        "I2": complex(I2),
        "I3": complex(I3),
        "total": complex(total),
        "brute_force": complex(brute),
        "exact_match": total == brute if _exact(total) else None,
        "identity_defect": defect,
        "bounds": bounds,
        "pass": all(b.passed for b in bounds) and defect <= 1e-10,
    }


def _exact(v):
    return isinstance(v, (Fraction, GaussianRational))


# ---------------------------------------------------------------------------
# random inputs

MAX_WORDS = 20
MAX_GENERATORS = 3
MAX_EXPONENT = 3


def random_word(gen: np.random.Generator, ngens=MAX_GENERATORS, max_len=4, max_exp=MAX_EXPONENT) -> FGWord:
    """Random reduced word of up to ``max_len`` syllables."""
    length = int(gen.integers(0, max_len + 1))
    letters = []
    last = None
    for _ in range(length):
        choices = [g for g in range(ngens) if g != last]
        g = int(choices[int(gen.integers(len(choices)))])
        e = int(gen.integers(1, max_exp + 1)) * (1 if gen.random() < 0.5 else -1)
        letters.append((g, e))
        last = g
    return FGWord(letters)


def _random_coeff(gen, exact):
    if exact:
        return GaussianRational(Fraction(int(gen.integers(-5, 6)), int(gen.integers(1, 5))),
                                Fraction(int(gen.integers(-5, 6)), int(gen.integers(1, 5))))
    return complex(gen.standard_normal(), gen.standard_normal())


def random_element(gen, nwords=None, ngens=MAX_GENERATORS, max_exp=MAX_EXPONENT, exact=False) -> GroupAlgElement:
    """Sparse random element with at most ``MAX_WORDS`` words."""
    if nwords is None:
        nwords = int(gen.integers(1, MAX_WORDS + 1))
    if nwords > MAX_WORDS or ngens > MAX_GENERATORS or max_exp > MAX_EXPONENT:
        raise DomainError("random input exceeds the size bounds")
    coeffs = {}
    for _ in range(nwords):
        coeffs[random_word(gen, ngens, 4, max_exp)] = _random_coeff(gen, exact)
    return GroupAlgElement(coeffs)


def random_y(gen, max_exp=MAX_EXPONENT, exact=False) -> dict:
    """Coefficients of a random self-adjoint ``y`` with zero trace: ``y_-k = conj(y_k)``."""
    out = {}
    for k in range(1, max_exp + 1):
        if gen.random() < 0.75:
            c = _random_coeff(gen, exact)
            out[k] = c
            out[-k] = _conj(c)
    if not out:
        c = _random_coeff(gen, exact)
        out = {1: c, -1: _conj(c)}
    return out
