"""Hermitian eigensolver and polar decomposition built on the Jacobi kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DomainError, NumericError

EIGEN_TOL = 1e-12
MAX_SWEEPS = 100


@dataclass
class EigenDecomposition:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # columns
    sweeps: int = 0

    def reconstruct(self):
        v = self.vectors
        return (v * self.values[None, :]) @ v.conj().T

    def residual(self, a) -> float:
        return float(np.linalg.norm(a - self.reconstruct()))

    def unitarity_error(self) -> float:
        v = self.vectors
        return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))


def hermitian_eigen(a, tol=EIGEN_TOL, max_sweeps=MAX_SWEEPS, backend=None) -> EigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius mass is at most
    ``tol * ||A||_F``. Eigenvalues come back ascending.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("expected a square matrix")
    n = a.shape[0]
    fro = float(np.linalg.norm(a))
    if fro and np.max(np.abs(a - a.conj().T)) > 1e-10 * fro:
        raise DomainError("matrix is not Hermitian")
    work = np.array(a, dtype=np.complex128, order="C", copy=True)
    vt = np.eye(n, dtype=np.complex128)
    if fro == 0.0:
        return EigenDecomposition(np.zeros(n), vt, 0)
    sweeps = kernels.jacobi_sweeps(work, vt, tol * fro, max_sweeps, backend)
    if sweeps < 0:
        raise NumericError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = work.diagonal().real.copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], vt.T[:, order].copy(), sweeps)


def _complete_columns(cols, keep):
    """Modified Gram-Schmidt over ``cols``; columns not in ``keep`` are rebuilt from the standard basis."""
    n = cols.shape[0]
    out = np.zeros_like(cols)
    done = []
    basis = iter(range(n))
    for j in range(cols.shape[1]):
        if keep[j]:
            x = cols[:, j].copy()
            for u in done:
                x -= u * np.vdot(u, x)
            nx = np.linalg.norm(x)
            if nx > 1e-8:
                out[:, j] = x / nx
                done.append(out[:, j])
                continue
        # kernel direction: first standard basis vector with a fresh component
        for b in basis:
            x = np.zeros(n, dtype=cols.dtype)
            x[b] = 1.0
            for _ in range(2):
                for u in done:
                    x -= u * np.vdot(u, x)
            nx = np.linalg.norm(x)
            if nx > 1e-6:
                out[:, j] = x / nx
                done.append(out[:, j])
                break
    return out


def polar_decompose(c, backend=None):
    """``C = U H`` with ``H = sqrt(C* C)`` psd and ``U`` unitary.

    ``H`` comes from the eigen-decomposition of ``C* C`` with negative rounding
    clamped to 0. Columns of ``U`` on the numerical kernel (eigenvalues below
    ``1e-12 ||C||_F^2``) are completed by Gram-Schmidt.
    """
    c = np.asarray(c, dtype=np.complex128)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DomainError("expected a square matrix")
    n = c.shape[0]
    gram = c.conj().T @ c
    gram = 0.5 * (gram + gram.conj().T)
    eig = hermitian_eigen(gram, backend=backend)
    lam = np.clip(eig.values, 0.0, None)
    fro2 = float(np.sum(np.abs(c) ** 2))
    keep = lam > 1e-12 * fro2
    # rounding noise on the kernel would otherwise enter H at the sqrt(eps) level
    sig = np.where(keep, np.sqrt(lam), 0.0)
    v = eig.vectors
    h = (v * sig[None, :]) @ v.conj().T
    h = 0.5 * (h + h.conj().T)
    cv = c @ v
    cols = np.where(keep[None, :], cv / np.where(keep, sig, 1.0)[None, :], 0.0)
    # orthonormalize in order of decreasing singular value
    order = np.argsort(-sig, kind="stable")
    w = _complete_columns(cols[:, order], keep[order])
    cols = np.empty_like(w)
    cols[:, order] = w
    u = cols @ v.conj().T
    if n == 0:
        u = np.zeros((0, 0), dtype=np.complex128)
    return u, h
