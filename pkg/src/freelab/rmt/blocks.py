"""Block random matrices, the block-trace conditional expectation, and its norm under conjugation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, ResourceError
from ..scdist import QuarterCircleLaw, qc_moment
from .ensembles import MAX_N, RngStream, as_generator, haar_unitary, ntrace, sample_ginibre, sample_gue
from .linalg import hermitian_eigen, polar_decompose

MAX_TOTAL = 2048

ALL_CIRCULAR = "all-circular"
QUARTER_COLUMN = "quarter-column"
MODELS = (ALL_CIRCULAR, QUARTER_COLUMN)

CONJUGATIONS = ("none", "random-diagonal", "adversarial")


def check_size(n, N):
    if N > MAX_N or n * N > MAX_TOTAL:
        raise ResourceError(f"n={n}, N={N} exceeds guard N <= {MAX_N}, nN <= {MAX_TOTAL}")


class BlockMatrix:
    """``n x n`` array of ``N x N`` complex blocks, stored as one ``nN x nN`` array."""

    def __init__(self, data, n):
        data = np.asarray(data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] % n:
            raise DomainError("data must be square with side divisible by n")
        self.data = data
        self.n = n
        self.N = data.shape[0] // n

    @classmethod
    def from_blocks(cls, blocks):
        return cls(np.block(blocks), len(blocks))

    @classmethod
    def lift(cls, m0, N):
        """``I_N (x) M0``: block ``(i, j)`` equals ``m0[i, j] * I``."""
        m0 = np.asarray(m0)
        return cls(np.kron(m0, np.eye(N)), m0.shape[0])

    def block(self, i, j):
        N = self.N
        return self.data[i * N:(i + 1) * N, j * N:(j + 1) * N]

    def conjugate_by_diagonal(self, us):
        """``U* B U`` for ``U = sum u_i (x) e_ii``."""
        out = np.empty_like(self.data)
        N = self.N
        for i in range(self.n):
            for j in range(self.n):
                out[i * N:(i + 1) * N, j * N:(j + 1) * N] = us[i].conj().T @ self.block(i, j) @ us[j]
        return BlockMatrix(out, self.n)

    def is_selfadjoint(self, tol=0.0):
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def trace(self):
        return ntrace(self.data)

    def moment(self, m):
        """``tau_M(B^m)``, real part."""
        return float(ntrace(np.linalg.matrix_power(self.data, m)).real)


def _abs_hermitian(h):
    e = hermitian_eigen(h)
    v = e.vectors
    return (v * np.abs(e.values)[None, :]) @ v.conj().T


def build_voiculescu_blocks(n: int, N: int, model: str, rng) -> BlockMatrix:
    """Finite model of a self-adjoint semicircular matrix with entry variance ``1/n``.

    Diagonal blocks are GUE, blocks strictly above the diagonal away from the
    last column are Ginibre with adjoints mirrored below. The last column is
    Ginibre for ``all-circular`` and ``|GUE|`` (positive) for ``quarter-column``.
    ``E tau_M(B^2) = 1``.
    """
    if n < 2 or N < 2:
        raise DomainError("need n >= 2 and N >= 2")
    if model not in MODELS:
        raise DomainError(f"unknown model {model!r}")
    check_size(n, N)
    gen = as_generator(rng)
    v = 1.0 / n
    blocks = [[None] * n for _ in range(n)]
    for i in range(n):
        blocks[i][i] = sample_gue(N, v, gen)
        for j in range(i + 1, n):
            if j == n - 1 and model == QUARTER_COLUMN:
                b = _abs_hermitian(sample_gue(N, v, gen))
            else:
                b = sample_ginibre(N, v, gen)
            blocks[i][j] = b
            blocks[j][i] = b.conj().T
    return BlockMatrix.from_blocks(blocks)


def conditional_expectation_En(B: BlockMatrix) -> np.ndarray:
    """Matrix of normalized block traces ``(1/N) Tr(b_ij)``."""
    n, N = B.n, B.N
    t = B.data.reshape(n, N, n, N)
    return np.einsum("iaja->ij", t) / N


def en_norm(e) -> float:
    """Trace 2-norm on ``M_n``: ``sqrt((1/n) sum |e_ij|^2)``."""
    return float(np.sqrt(np.sum(np.abs(e) ** 2) / e.shape[0]))


# ---------------------------------------------------------------------------
# adversarial diagonal conjugation


def _objective(traces):
    return en_norm(traces)


def _block_traces(B, us):
    n = B.n
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = ntrace(us[i].conj().T @ B.block(i, j) @ us[j])
    return out


@dataclass
class SearchResult:
    unitaries: list
    value: float
    history: list = field(default_factory=list)


def adversarial_diag_search(B: BlockMatrix, iterations: int, rng, start=None) -> SearchResult:
    """Push ``||E_n(U* B U)||_2`` up over diagonal unitaries ``U = sum u_i (x) e_ii``.

    Only off-diagonal blocks depend on the ``u_i``. With the others fixed the
    objective is ``2 sum_j |tau(u_i* M_j)|^2``, ``M_j = b_ij u_j``, a convex
    function of ``u_i``; its linearization at the current point is maximized by
    the unitary polar factor of ``G = sum_j conj(c_j) M_j``. Steps are kept only
    if they do not decrease the objective, so ``history`` is nondecreasing.
    """
    if iterations < 1:
        raise DomainError("iterations must be positive")
    n, N = B.n, B.N
    if start is None:
        gen = as_generator(rng)
        us = [haar_unitary(N, gen) for _ in range(n)]
    else:
        us = [np.array(u, dtype=np.complex128) for u in start]
    best = _objective(_block_traces(B, us))
    history = [best]
    for _ in range(iterations):
        for i in range(n):
            g = np.zeros((N, N), dtype=np.complex128)
            for j in range(n):
                if j == i:
                    continue
                m = B.block(i, j) @ us[j]
                c = ntrace(us[i].conj().T @ m)
                g += np.conj(c) * m
            if not np.any(g):
                continue
            ui, _ = polar_decompose(g)
            trial = list(us)
            trial[i] = ui
            val = _objective(_block_traces(B, trial))
            if val >= best:
                us, best = trial, val
        history.append(best)
    return SearchResult(us, best, history)


# ---------------------------------------------------------------------------
# Monte Carlo estimate


@dataclass
class EnStats:
    n: int
    N: int
    conjugation: str
    model: str
    values: list

    @property
    def mean(self):
        return float(np.mean(self.values))

    @property
    def max(self):
        return float(np.max(self.values))

    @property
    def stderr(self):
        if len(self.values) < 2:
            return 0.0
        return float(np.std(self.values, ddof=1) / math.sqrt(len(self.values)))

    @property
    def bound(self):
        return 7.0 / self.n ** 0.125

    @property
    def passed(self):
        return self.max <= self.bound

    def to_dict(self):
        return {
            "n": self.n,
            "N": self.N,
            "conjugation": self.conjugation,
            "model": self.model,
            "trials": len(self.values),
            "mean": self.mean,
            "max": self.max,
            "stderr": self.stderr,
            "bound": self.bound,
            "pass": self.passed,
            "values": list(self.values),
        }


def estimate_En_norm(n, N, trials, conjugation, rng, model=ALL_CIRCULAR, iterations=20) -> EnStats:
    """Sample ``B``, conjugate by a diagonal unitary, record ``||E_n(U* B U)||_2`` per trial.

    Trial ``t`` draws from the child stream ``t`` of ``rng`` (an :class:`RngStream`).
    The default model has centered blocks, so ``||E_n(B)||_2`` is of order ``1/N``.
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    if conjugation not in CONJUGATIONS:
        raise DomainError(f"unknown conjugation {conjugation!r}")
    check_size(n, N)
    if not isinstance(rng, RngStream):
        raise DomainError("estimate_En_norm needs an RngStream for per-trial streams")
    values = []
    for t in range(trials):
        gen = rng.child(t).generator()
        B = build_voiculescu_blocks(n, N, model, gen)
        if conjugation == "none":
            val = en_norm(conditional_expectation_En(B))
        elif conjugation == "random-diagonal":
            us = [haar_unitary(N, gen) for _ in range(n)]
            val = en_norm(conditional_expectation_En(B.conjugate_by_diagonal(us)))
        else:
            val = adversarial_diag_search(B, iterations, gen).value
        values.append(val)
    return EnStats(n, N, conjugation, model, values)


# ---------------------------------------------------------------------------
# polar conjugation of the last column


def _entry_moments(x, orders=(1, 2, 3, 4)):
    p = np.eye(x.shape[0], dtype=np.complex128)
    out = {}
    for k in range(1, max(orders) + 1):
        p = p @ x
        if k in orders:
            out[k] = float(ntrace(p).real)
    return out


def verify_polar_conjugation(B: BlockMatrix, min_singular=1e-8, psd_tol=1e-8) -> dict:
    """Rotate the last column positive with the polar factors of its blocks.

    For ``b_in = u_i h_i`` (``i < n``) and ``U = diag(u_1, ..., u_{n-1}, I)``, the
    last-column blocks of ``U* B U`` are ``h_i``. Reports positivity of those
    blocks and the low moments of each entry class against the laws of a
    semicircular matrix with entry variance ``1/n``, tolerance ``5/sqrt(N)``.
    """
    n, N = B.n, B.N
    us = []
    skipped = []
    for i in range(n - 1):
        b = B.block(i, n - 1)
        u, h = polar_decompose(b)
        smin = float(np.sqrt(max(hermitian_eigen(h @ h).values[0], 0.0)))
        if smin < min_singular:
            skipped.append(i)
        us.append(u)
    us.append(np.eye(N, dtype=np.complex128))
    C = B.conjugate_by_diagonal(us)

    psd_min = math.inf
    herm_err = 0.0
    for i in range(n - 1):
        if i in skipped:
            continue
        h = C.block(i, n - 1)
        herm_err = max(herm_err, float(np.max(np.abs(h - h.conj().T))))
        psd_min = min(psd_min, float(hermitian_eigen(0.5 * (h + h.conj().T)).values[0]))
    scale = max(1.0, float(np.max(np.abs(C.data))))
    psd = bool(herm_err <= psd_tol * scale * N and psd_min >= -psd_tol * scale * N)

    v = 1.0 / n
    tol = 5.0 / math.sqrt(N)
    qc = QuarterCircleLaw(2.0 * math.sqrt(v))
    checks = []

    def record(cls, idx, k, value, expected):
        checks.append({
            "class": cls,
            "entry": idx,
            "order": k,
            "value": value,
            "expected": expected,
            "pass": abs(value - expected) <= tol,
        })

    for i in range(n):
        m = _entry_moments(C.block(i, i))
        for k, val in m.items():
            record("diagonal", [i + 1, i + 1], k, val, _sc_moment(v, k))
    for i in range(n):
        for j in range(i + 1, n - 1):
            b = C.block(i, j)
            m = _entry_moments(b @ b.conj().T, (1, 2))
            for k, val in m.items():
                record("circular", [i + 1, j + 1], 2 * k, val, _circ_moment(v, k))
    for i in range(n - 1):
        if i in skipped:
            continue
        m = _entry_moments(C.block(i, n - 1))
        for k, val in m.items():
            record("last-column", [i + 1, n], k, val, qc_moment(qc, k))
    return {
        "n": n,
        "N": N,
        "skipped": skipped,
        "psd": psd,
        "psd_min_eigenvalue": psd_min if psd_min != math.inf else None,
        "tolerance": tol,
        "moments": checks,
        "pass": psd and all(c["pass"] for c in checks),
    }


def _sc_moment(v, k):
    if k % 2:
        return 0.0
    return math.comb(k, k // 2) / (k // 2 + 1) * v ** (k // 2)


def _circ_moment(v, k):
    # tau((c c*)^k) for circular c of variance v is Catalan(k) v^k
    return math.comb(2 * k, k) / (k + 1) * v**k
