"""Seeded random streams and the Gaussian and Haar ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

MAX_N = 512


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream)``.

    Child streams extend the key, so per-trial streams ``(seed, stream, trial)``
    never collide with the parent or with each other.
    """

    seed: int
    stream: int = 0
    path: tuple = ()

    def generator(self) -> np.random.Generator:
        key = (self.stream,) + tuple(self.path)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream, self.path + (int(index),))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _check(N, v):
    if N < 1:
        raise DomainError("dimension must be positive")
    if not v > 0:
        raise DomainError("variance must be positive")


def _complex_normal(gen, shape, var):
    # E|z|^2 = var
    s = np.sqrt(var / 2.0)
    return s * gen.standard_normal(shape) + 1j * s * gen.standard_normal(shape)


def sample_gue(N: int, v: float, rng) -> np.ndarray:
    """Hermitian ``N x N`` with ``E|h_ij|^2 = v/N`` off and on the diagonal, so ``E tau(H^2) = v``."""
    _check(N, v)
    gen = as_generator(rng)
    x = _complex_normal(gen, (N, N), v / N)
    h = (x + x.conj().T) / np.sqrt(2.0)
    # the diagonal of (x + x*)/sqrt 2 is real with variance v/N
    h[np.diag_indices(N)] = h.diagonal().real
    return h


def sample_ginibre(N: int, v: float, rng) -> np.ndarray:
    """All entries i.i.d. complex Gaussian with ``E|c_ij|^2 = v/N``."""
    _check(N, v)
    return _complex_normal(as_generator(rng), (N, N), v / N)


def haar_unitary(N: int, rng) -> np.ndarray:
    """Haar unitary: QR of a Ginibre matrix with the phases of diag(R) absorbed into Q."""
    if N < 1:
        raise DomainError("dimension must be positive")
    z = _complex_normal(as_generator(rng), (N, N), 1.0)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    ph = d / np.where(np.abs(d) == 0, 1.0, np.abs(d))
    return q * ph[None, :]


def ntrace(a) -> complex:
    """Normalized trace ``(1/N) Tr``."""
    return np.trace(a) / a.shape[0]


def norm2(a) -> float:
    """Trace 2-norm ``sqrt(tau(a* a))``."""
    return float(np.sqrt(np.sum(np.abs(a) ** 2) / a.shape[0]))
