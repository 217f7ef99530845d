"""Matrix-unit subalgebras from spectral blocks, their conditional expectations, and distance curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .ensembles import RngStream, norm2, ntrace, sample_gue
from .linalg import hermitian_eigen


@dataclass
class MatrixUnits:
    """``k x k`` matrix units ``f_ij = V_i V_j*`` held in factored form.

    ``blocks[i]`` is an ``N x (N/k)`` isometry onto the ``i``-th spectral block.
    """

    blocks: list

    @property
    def k(self):
        return len(self.blocks)

    @property
    def N(self):
        return self.blocks[0].shape[0]

    def unit(self, i, j):
        return self.blocks[i] @ self.blocks[j].conj().T

    def stacked(self):
        return np.hstack(self.blocks)

    def relation_error(self, explicit=False) -> float:
        """Largest Frobenius defect of ``f_ij f_pq = delta_jp f_iq``, ``f_ij* = f_ji``, ``sum f_ii = I``."""
        k = self.k
        err = 0.0
        if explicit:
            units = [[self.unit(i, j) for j in range(k)] for i in range(k)]
            for i in range(k):
                for j in range(k):
                    err = max(err, float(np.linalg.norm(units[i][j].conj().T - units[j][i])))
                    for p in range(k):
                        for q in range(k):
                            want = units[i][q] if j == p else 0.0
                            err = max(err, float(np.linalg.norm(units[i][j] @ units[p][q] - want)))
        else:
            # f_ij f_pq - delta_jp f_iq = V_i (V_j* V_p - delta_jp I) V_q*, and each V_i is an isometry
            v = self.stacked()
            err = float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))
        total = sum(self.unit(i, i) for i in range(k))
        return max(err, float(np.linalg.norm(total - np.eye(self.N))))

    def traces(self):
        return [float(ntrace(self.unit(i, i)).real) for i in range(self.k)]


def build_Ik_factor(a, k: int) -> MatrixUnits:
    """Matrix units whose diagonal projections are spectral projections of ``a``.

    ``f_ii`` projects onto the ``i``-th contiguous block of ``N/k`` eigenvectors in
    ascending eigenvalue order. ``f_ij`` maps the ``j``-th block onto the
    ``i``-th, eigenvector to eigenvector in order.
    """
    a = np.asarray(a)
    N = a.shape[0]
    if k < 1 or N % k:
        raise DomainError(f"k={k} must divide N={N}")
    vecs = hermitian_eigen(a).vectors
    m = N // k
    return MatrixUnits([vecs[:, i * m:(i + 1) * m].copy() for i in range(k)])


def compression_coefficients(b, units: MatrixUnits) -> np.ndarray:
    """``c_ij = (1/m) Tr(V_i* b V_j)`` so that ``E(b) = sum c_ij f_ij``."""
    v = units.stacked()
    k = units.k
    m = units.N // k
    big = v.conj().T @ b @ v
    return np.einsum("iaja->ij", big.reshape(k, m, k, m)) / m


def conditional_expectation_onto_Ik(b, units: MatrixUnits) -> np.ndarray:
    """Trace-preserving conditional expectation onto the span of the ``f_ij``.

    ``E(b) = k sum_ij tau(f_ji b) f_ij``, evaluated as ``V (C (x) I_m) V*``.
    """
    b = np.asarray(b)
    c = compression_coefficients(b, units)
    m = units.N // units.k
    v = units.stacked()
    return v @ np.kron(c, np.eye(m)) @ v.conj().T


def ek_norm(b, units: MatrixUnits) -> float:
    """``||E(b)||_2 = sqrt((1/k) sum |c_ij|^2)`` without forming ``E(b)``."""
    c = compression_coefficients(b, units)
    return float(np.sqrt(np.sum(np.abs(c) ** 2) / units.k))


@dataclass
class MatDistRow:
    k: int
    N: int
    trials: int
    mean_ek_norm: float
    mean_ratio: float
    ek_norms: list
    ratios: list

    def to_dict(self):
        return {
            "k": self.k,
            "N": self.N,
            "trials": self.trials,
            "mean_ek_norm": self.mean_ek_norm,
            "mean_ratio": self.mean_ratio,
            "ek_norms": list(self.ek_norms),
            "ratios": list(self.ratios),
        }


def matdist_curve(N: int, ks, trials: int, rng) -> list:
    """Distance from ``b`` to ``k x k`` matrix units built on the spectrum of ``a``.

    ``a`` and ``b`` are independent GUE(1) per trial. Each row reports the mean
    ``||E_k(b)||_2`` and the mean relative distance ``||b - E_k(b)||_2 / ||b||_2``.
    For independent ``a`` and ``b`` each ``c_ij`` has variance ``k/N^2``, so the first
    behaves like ``k/N``.
    """
    ks = list(ks)
    if any(k < 1 or N % k for k in ks):
        raise DomainError("every k must divide N")
    if trials < 1:
        raise DomainError("trials must be positive")
    if not isinstance(rng, RngStream):
        raise DomainError("matdist_curve needs an RngStream for per-trial streams")
    norms = {k: [] for k in ks}
    ratios = {k: [] for k in ks}
    for t in range(trials):
        gen = rng.child(t).generator()
        a = sample_gue(N, 1.0, gen)
        b = sample_gue(N, 1.0, gen)
        vecs = hermitian_eigen(a).vectors
        nb = norm2(b)
        for k in ks:
            m = N // k
            units = MatrixUnits([vecs[:, i * m:(i + 1) * m] for i in range(k)])
            e = conditional_expectation_onto_Ik(b, units)
            norms[k].append(norm2(e))
            ratios[k].append(norm2(b - e) / nb)
    return [
        MatDistRow(k, N, trials, float(np.mean(norms[k])), float(np.mean(ratios[k])), norms[k], ratios[k])
        for k in ks
    ]


def pythagoras_defect(b, units: MatrixUnits) -> float:
    """``| ||b||^2 - ||E b||^2 - ||b - E b||^2 |`` in the trace 2-norm."""
    e = conditional_expectation_onto_Ik(b, units)
    return abs(norm2(b) ** 2 - norm2(e) ** 2 - norm2(b - e) ** 2)


def expected_ek_norm(N, k):
    """Leading-order size of ``||E_k(b)||_2`` for ``b`` independent of the units."""
    return k / N
