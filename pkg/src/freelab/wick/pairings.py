"""Non-crossing pair partitions."""

from fractions import Fraction

from ..errors import DomainError, ResourceError

MAX_PAIRING_SIZE = 16


def enumerate_nc_pairings(size: int):
    """All non-crossing pairings of ``range(size)`` as tuples of ``(i, j)`` with ``i < j``.

    There are ``catalan(size // 2)`` of them.
    """
    if size < 0 or size % 2:
        raise DomainError(f"pairing size must be a nonnegative even integer, got {size}")
    if size > MAX_PAIRING_SIZE:
        raise ResourceError(f"pairing size {size} exceeds guard {MAX_PAIRING_SIZE}")
    return [tuple(sorted(p)) for p in _nc(0, size)]


def _nc(lo, hi):
    if lo == hi:
        yield ()
        return
    # lo pairs with some j leaving an even-sized inside (lo+1..j-1) and outside (j+1..hi-1)
    for j in range(lo + 1, hi, 2):
        for inner in _nc(lo + 1, j):
            for outer in _nc(j + 1, hi):
                yield ((lo, j),) + inner + outer


def is_noncrossing(pairing) -> bool:
    for a, b in pairing:
        for c, d in pairing:
            if a < c < b < d:
                return False
    return True


def moment_by_pairings(word, covariance) -> Fraction:
    """Sum over non-crossing pairings of the product of pairwise covariances."""
    if len(word) % 2:
        return Fraction(0)
    total = Fraction(0)
    for pairing in enumerate_nc_pairings(len(word)):
        term = Fraction(1)
        for i, j in pairing:
            term *= covariance(word[i], word[j])
            if not term:
                break
        total += term
    return total
